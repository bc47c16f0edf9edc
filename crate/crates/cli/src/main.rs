use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use gflab_core::experiments::{run, ExperimentSpec};
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Experiment {
    Lemma1,
    Thm4,
    Approx,
    Grunsky,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::Lemma1 => "lemma1",
            Experiment::Thm4 => "thm4",
            Experiment::Approx => "approx",
            Experiment::Grunsky => "grunsky",
        }
    }
}

/// Run a gflab experiment and write results.csv, report.json and
/// manifest.json. Exits 0 iff every assertion passes.
#[derive(Parser, Debug)]
#[command(name = "gflab", version)]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON parameter file (defaults apply to omitted fields).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Higher truncations and tighter tolerances.
    #[arg(long)]
    deep: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn pretty(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let args = Args::parse();
    let params: Value = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Value::Null,
    };
    let spec = ExperimentSpec { name: args.experiment.name().into(), params, seed: args.seed, deep: args.deep };
    let outcome = run(&spec).with_context(|| format!("experiment {}", spec.name))?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    std::fs::write(args.out.join("results.csv"), &outcome.csv)?;
    std::fs::write(args.out.join("report.json"), pretty(&outcome.report)?)?;
    std::fs::write(args.out.join("manifest.json"), pretty(&outcome.manifest)?)?;
    for f in &outcome.failures {
        eprintln!("FAIL: {f}");
    }
    println!("{}: {} ({})", spec.name, if outcome.passed { "PASS" } else { "FAIL" }, args.out.display());
    Ok(outcome.passed)
}
