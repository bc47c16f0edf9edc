//! Named experiments behind the `gflab` runner. Each returns its CSV table,
//! a JSON report, a manifest and a pass/fail verdict; nothing here touches
//! the filesystem.

use crate::approx::{convergence_report_eps, ConvergenceReport, FitConfig, PolePlacement};
use crate::beltrami::{
    degen_pairing_limit, halfstrip_at, harmonic_beltrami, hkrs_extremality_estimate, pullback_halfstrip, DegenReport, HkrsReport,
};
use crate::domains::DomainModel;
use crate::error::{Error, Result};
use crate::grunsky::{grunsky_coefficients, grunsky_norm, kappa_trend, laurent_from_map, milin_univalence_test, KappaTrend, LaurentTail, Verdict};
use crate::holo::{Holo, NamedFunction};
use crate::point::ComplexValue;
use crate::rational::{bp_norm, boundary_limsup, boundary_limsup_of, random_halfplane_rational, PoleJson, PoleTerm, RationalConfig, RationalQD};
use crate::schwarzian::{solve_schwarzian, Normalization};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const EXPERIMENTS: [&str; 4] = ["lemma1", "thm4", "approx", "grunsky"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default)]
    pub params: Value,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub deep: bool,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub csv: String,
    pub report: Value,
    pub manifest: Value,
    pub passed: bool,
    pub failures: Vec<String>,
}

fn params<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T> {
    let v = if v.is_null() { json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("bad experiment parameters: {e}")))
}

fn manifest(spec: &ExperimentSpec, resolved: &impl Serialize, tolerances: Value) -> Value {
    json!({
        "experiment": spec.name,
        "gflab_version": env!("CARGO_PKG_VERSION"),
        "seed": spec.seed,
        "deep": spec.deep,
        "params": resolved,
        "tolerances": tolerances,
        "outputs": ["results.csv", "report.json", "manifest.json"],
    })
}

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    match spec.name.as_str() {
        "lemma1" => run_lemma1(spec),
        "thm4" => run_theorem4(spec),
        "approx" => run_approx(spec),
        "grunsky" => run_grunsky_suite(spec),
        other => Err(Error::InvalidInput(format!("unknown experiment {other}; expected one of {}", EXPERIMENTS.join(", ")))),
    }
}

fn csv_c(z: ComplexValue) -> String {
    let (a, b) = z.re_im();
    format!("{a},{b}")
}

// ---------------------------------------------------------------- lemma 1

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma1Params {
    #[serde(default = "fifty")]
    pub instances: usize,
    #[serde(default = "four")]
    pub max_poles: usize,
    #[serde(default = "lemma1_tol")]
    pub rel_tol: f64,
    /// Run this single rational instead of random ones.
    #[serde(default)]
    pub instance: Option<RationalConfig>,
}

fn fifty() -> usize {
    50
}
fn four() -> usize {
    4
}
fn lemma1_tol() -> f64 {
    1e-4
}

#[derive(Clone, Debug, Serialize)]
pub struct Lemma1Row {
    pub index: usize,
    pub bp_norm: f64,
    pub boundary_limsup: f64,
    pub argmax: ComplexValue,
    pub limsup_argmax: ComplexValue,
    pub rel_gap: f64,
    pub pass: bool,
}

fn lemma1_instance(index: usize, r: &RationalQD, tol: f64) -> Result<Lemma1Row> {
    let bp = bp_norm(&r.to_holo(), &r.domain, 2)?;
    let ls = boundary_limsup(r, 2)?;
    let rel_gap = (bp.value - ls.value).abs() / bp.value.max(1e-300);
    Ok(Lemma1Row { index, bp_norm: bp.value, boundary_limsup: ls.value, argmax: bp.argmax, limsup_argmax: ls.argmax, rel_gap, pass: rel_gap <= tol })
}

/// Checks `‖r‖_{B₂(ℍ)} = limsup_{z→∂ℍ} 4y²|r(z)|` on random boundary-pole
/// rationals, plus an off-boundary contrast.
pub fn run_lemma1(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let p: Lemma1Params = params(&spec.params)?;
    let instances: Vec<RationalQD> = match &p.instance {
        Some(cfg) => vec![cfg.build()?],
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..p.instances).map(|_| random_halfplane_rational(&mut rng, p.max_poles.max(1))).collect()
        }
    };
    let rows: Vec<Lemma1Row> = instances.par_iter().enumerate().map(|(i, r)| lemma1_instance(i, r, p.rel_tol)).collect::<Result<_>>()?;
    let mut csv = String::from("index,bp_norm,boundary_limsup,argmax_re,argmax_im,limsup_argmax_re,limsup_argmax_im,rel_gap,pass\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.index, r.bp_norm, r.boundary_limsup, csv_c(r.argmax), csv_c(r.limsup_argmax), r.rel_gap, r.pass
        ));
    }
    // contrast: a pole off the boundary is not an admissible input, and the
    // interior sup of 1/(z+i)⁴ (0.25 at i) exceeds its boundary limsup (0)
    let rejected = RationalQD::new(
        vec![PoleTerm { a: C64::new(0.0, -1.0), c: C64::new(1.0, 0.0), cp: C64::new(0.0, 0.0) }],
        DomainModel::UpperHalfPlane,
    );
    let q4 = NamedFunction::ShiftedPower { k: 4, b: 1.0, x0: 0.0, scale: 1.0 }.build()?;
    let c_sup = bp_norm(&q4, &DomainModel::UpperHalfPlane, 2)?;
    let c_lim = boundary_limsup_of(&q4, &DomainModel::UpperHalfPlane, 2)?;
    let contrast_ok = rejected.is_err() && c_sup.value > c_lim.value + 0.1;
    let failing: Vec<Value> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| json!({ "row": r, "instance": instances[r.index].to_config() }))
        .collect();
    let mut failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("instance {}: bp_norm {:.6} vs boundary limsup {:.6} (relative gap {:.2e})", r.index, r.bp_norm, r.boundary_limsup, r.rel_gap))
        .collect();
    if !contrast_ok {
        failures.push("off-boundary contrast did not show strict inequality".into());
    }
    let report = json!({
        "instances": rows.len(),
        "passes": rows.iter().filter(|r| r.pass).count(),
        "failing_instances": failing,
        "contrast": {
            "rational_with_pole_at_minus_i": match &rejected { Ok(_) => "accepted".to_string(), Err(e) => format!("rejected: {e}") },
            "function": "1/(z+i)^4",
            "interior_sup": c_sup.value,
            "interior_argmax": c_sup.argmax,
            "boundary_limsup": c_lim.value,
            "strict": contrast_ok,
        },
        "passed": failures.is_empty(),
    });
    Ok(ExperimentOutcome {
        csv,
        manifest: manifest(spec, &p, json!({ "rel_tol": p.rel_tol })),
        passed: failures.is_empty(),
        report,
        failures,
    })
}

// ---------------------------------------------------------------- theorem 4

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem4Params {
    /// The quadratic differential on ℍ; defaults to `0.05/z²`.
    #[serde(default = "default_r")]
    pub r: RationalConfig,
    /// Gate on `‖r‖_{B₂(ℍ)}`.
    #[serde(default = "half")]
    pub c0: f64,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m_schedule: Option<Vec<u32>>,
    #[serde(default)]
    pub tol_kappa: Option<f64>,
    #[serde(default)]
    pub tol_d: Option<f64>,
    #[serde(default = "two_hundred")]
    pub hkrs_basis: usize,
    #[serde(default = "laurent_radius")]
    pub laurent_radius: f64,
    /// Scale factors applied to `r`; the report gives the largest
    /// `‖s·r‖_{B₂}` (below `c0`) at which the chain still verifies.
    #[serde(default)]
    pub sweep: Option<Vec<f64>>,
}

fn default_r() -> RationalConfig {
    RationalConfig { poles: vec![PoleJson { a: [0.0, 0.0], c: [0.05, 0.0], cp: [0.0, 0.0] }], domain: "halfplane".into(), chain: None }
}
fn half() -> f64 {
    0.5
}
fn two_hundred() -> usize {
    200
}
fn laurent_radius() -> f64 {
    1.2
}

#[derive(Clone, Debug, Serialize)]
pub struct Resolved4 {
    pub r: RationalConfig,
    pub c0: f64,
    pub n: usize,
    pub m_schedule: Vec<u32>,
    pub tol_kappa: f64,
    pub tol_d: f64,
    pub hkrs_basis: usize,
    pub laurent_radius: f64,
    pub sweep: Option<Vec<f64>>,
}

impl Theorem4Params {
    pub fn resolve(&self, deep: bool) -> Resolved4 {
        let (n, mmax, tol) = if deep { (48, 256, 0.02) } else { (24, 64, 0.05) };
        let mut sched = vec![];
        let mut m = 1;
        while m <= mmax {
            sched.push(m);
            m *= 2;
        }
        Resolved4 {
            r: self.r.clone(),
            c0: self.c0,
            n: self.n.unwrap_or(n),
            m_schedule: self.m_schedule.clone().unwrap_or(sched),
            tol_kappa: self.tol_kappa.unwrap_or(tol),
            tol_d: self.tol_d.unwrap_or(tol),
            hkrs_basis: self.hkrs_basis,
            laurent_radius: self.laurent_radius,
            sweep: self.sweep.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaPipeline {
    pub n: usize,
    pub kappa_n: f64,
    pub trend: KappaTrend,
    pub laurent_radius: f64,
    pub b: Vec<C64>,
}

/// `κ_N` of the Schwarzian solution `w` of `S_w = r` on ℍ, transported to
/// 𝔻* by `τ(z) = i(z + 1)/(z − 1)` and Σ-normalized:
/// `F = G/a₁`, `G = 1/(w∘τ − w(i))`, `a₁ = 1/(2i w′(i))`.
pub fn kappa_from_schwarzian(r: &Holo, n: usize, radius: f64) -> Result<KappaPipeline> {
    let sol = solve_schwarzian(r, &DomainModel::UpperHalfPlane, ComplexValue::new(0.0, 1.0), Normalization::None)?;
    let i = C64::new(0.0, 1.0);
    let s0 = sol.state(i)?;
    let wi = s0[0] / s0[2];
    let wp = (s0[1] * s0[2] - s0[0] * s0[3]) / (s0[2] * s0[2]);
    let a1 = (2.0 * i * wp).inv();
    let f = |z: C64| {
        let tau = i * (z + 1.0) / (z - 1.0);
        match sol.state(tau) {
            Ok(s) => s[2] / (s[0] - wi * s[2]) / a1,
            Err(_) => C64::new(f64::NAN, f64::NAN),
        }
    };
    let tail = laurent_from_map(&f, 2 * n - 1, radius)?;
    let kappa_n = grunsky_norm(&grunsky_coefficients(&tail, n)?);
    let trend = kappa_trend(&tail, n)?;
    Ok(KappaPipeline { n, kappa_n, trend, laurent_radius: radius, b: tail.b })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub bp_norm_r: f64,
    pub k_upper: f64,
    pub ratio_mu_over_r: f64,
    pub kappa: Option<KappaPipeline>,
    pub a0: ComplexValue,
    pub degen: Option<DegenReport>,
    pub hkrs: Option<HkrsReport>,
    pub kappa_ok: bool,
    pub pairing_ok: bool,
    pub hkrs_ok: bool,
    pub univalent: bool,
}

impl ChainReport {
    pub fn verified(&self) -> bool {
        self.kappa_ok && self.pairing_ok && self.hkrs_ok && self.univalent
    }
}

/// Boundary point where `4y²|r|` attains its boundary limsup, from the
/// closed form: a pole with the largest `|c_j|`, or ∞ when
/// `|Σ(c_j + c′_j a_j)|` is larger. Ties go to the finite pole. The
/// half-strip chart magnifies any offset exponentially, so a grid argmax
/// is not precise enough as an anchor.
pub fn lemma1_anchor(r: &RationalQD) -> ComplexValue {
    let at_inf = r.terms.iter().map(|t| t.c + t.cp * t.a).sum::<C64>().norm();
    let best = r.terms.iter().max_by(|x, y| x.c.norm().total_cmp(&y.c.norm()));
    match best {
        Some(t) if t.c.norm() >= at_inf * (1.0 - 1e-12) => ComplexValue::Finite(C64::new(t.a.re, 0.0)),
        _ => ComplexValue::Infinity,
    }
}

/// The chain `κ = k = ‖μ‖_∞` for one `r`.
pub fn theorem4_chain(r: &RationalQD, p: &Resolved4) -> Result<ChainReport> {
    if !matches!(r.domain, DomainModel::UpperHalfPlane) {
        return Err(Error::InvalidInput("the Theorem-4 pipeline runs on the upper half-plane".into()));
    }
    let phi = r.to_holo();
    let bp = bp_norm(&phi, &r.domain, 2)?.value;
    if !(bp < p.c0) {
        return Err(Error::Gate(format!("‖r‖_B₂ = {bp} is not below c₀ = {}", p.c0)));
    }
    let mu = harmonic_beltrami(&phi)?;
    let k_upper = mu.sup_norm.value;
    let ratio = if bp > 0.0 { k_upper / bp } else { 0.0 };
    if k_upper == 0.0 {
        return Ok(ChainReport {
            bp_norm_r: bp,
            k_upper,
            ratio_mu_over_r: ratio,
            kappa: None,
            a0: ComplexValue::Infinity,
            degen: None,
            hkrs: None,
            kappa_ok: true,
            pairing_ok: true,
            hkrs_ok: true,
            univalent: true,
        });
    }
    let kappa = kappa_from_schwarzian(&phi, p.n, p.laurent_radius)?;
    let a0 = lemma1_anchor(r);
    let star = pullback_halfstrip(&mu.normalized()?, &halfstrip_at(&mu.domain, a0)?)?;
    let degen = degen_pairing_limit(&star, &p.m_schedule)?;
    let hkrs = hkrs_extremality_estimate(&mu, &mu.domain.clone(), p.hkrs_basis, false)?;
    Ok(ChainReport {
        bp_norm_r: bp,
        k_upper,
        ratio_mu_over_r: ratio,
        kappa_ok: kappa.kappa_n >= (1.0 - p.tol_kappa) * k_upper,
        pairing_ok: degen.limit >= 1.0 - p.tol_d,
        hkrs_ok: hkrs.estimate >= (1.0 - p.tol_kappa) * k_upper,
        univalent: kappa.kappa_n <= 1.0 + 1e-9,
        kappa: Some(kappa),
        a0,
        degen: Some(degen),
        hkrs: Some(hkrs),
    })
}

fn scaled(cfg: &RationalConfig, s: f64) -> RationalConfig {
    let mut out = cfg.clone();
    for pole in &mut out.poles {
        pole.c = [pole.c[0] * s, pole.c[1] * s];
        pole.cp = [pole.cp[0] * s, pole.cp[1] * s];
    }
    out
}

/// Theorem-4 pipeline: harmonic coefficient, Grunsky norm of the
/// Schwarzian solution, degenerating pairing and HKRS lower bound.
pub fn run_theorem4(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let raw: Theorem4Params = params(&spec.params)?;
    let p = raw.resolve(spec.deep);
    let r = p.r.build()?;
    let chain = theorem4_chain(&r, &p)?;
    let mut failures = vec![];
    if !chain.univalent {
        failures.push(format!("κ_N = {} exceeds 1: w is not univalent", chain.kappa.as_ref().map_or(0.0, |k| k.kappa_n)));
    }
    if !chain.kappa_ok {
        failures.push(format!(
            "κ_{} = {:.6} is below (1 − {})·‖μ‖_∞ = {:.6}",
            p.n,
            chain.kappa.as_ref().map_or(0.0, |k| k.kappa_n),
            p.tol_kappa,
            (1.0 - p.tol_kappa) * chain.k_upper
        ));
    }
    if !chain.pairing_ok {
        failures.push(format!("degenerating pairing limit {:.6} is below 1 − {}", chain.degen.as_ref().map_or(0.0, |d| d.limit), p.tol_d));
    }
    if !chain.hkrs_ok {
        failures.push(format!(
            "HKRS estimate {:.6} is below (1 − {})·‖μ‖_∞ = {:.6}",
            chain.hkrs.as_ref().map_or(0.0, |h| h.estimate),
            p.tol_kappa,
            (1.0 - p.tol_kappa) * chain.k_upper
        ));
    }
    let mut sweep_rows = vec![];
    if let Some(scales) = &p.sweep {
        for &s in scales {
            let cfg = scaled(&p.r, s);
            let row = match cfg.build().and_then(|rs| theorem4_chain(&rs, &p)) {
                Ok(c) => json!({ "scale": s, "bp_norm_r": c.bp_norm_r, "k_upper": c.k_upper,
                    "kappa_n": c.kappa.as_ref().map(|k| k.kappa_n), "verified": c.verified() }),
                Err(e) => json!({ "scale": s, "error": e.to_string(), "verified": false }),
            };
            sweep_rows.push(row);
        }
    }
    let largest_verified = sweep_rows
        .iter()
        .filter(|r| r["verified"].as_bool() == Some(true))
        .filter_map(|r| r["bp_norm_r"].as_f64())
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let mut csv = String::from("m,pairing_modulus,quadrature_error\n");
    if let Some(d) = &chain.degen {
        for ((m, v), e) in d.m.iter().zip(&d.pairing_modulus).zip(&d.errors) {
            csv.push_str(&format!("{m},{v},{e}\n"));
        }
    }
    let report = json!({
        "chain": chain,
        "certified_equality": chain.verified(),
        "sweep": if p.sweep.is_some() { json!({ "rows": sweep_rows, "largest_verified_norm": largest_verified }) } else { Value::Null },
        "passed": failures.is_empty(),
        "failures": failures,
    });
    Ok(ExperimentOutcome {
        csv,
        manifest: manifest(spec, &p, json!({ "tol_kappa": p.tol_kappa, "tol_d": p.tol_d, "c0": p.c0 })),
        passed: failures.is_empty(),
        report,
        failures,
    })
}

// ---------------------------------------------------------------- approx

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxParams {
    #[serde(default = "default_target")]
    pub function: NamedFunction,
    #[serde(default = "two")]
    pub p: u32,
    #[serde(default = "default_schedule")]
    pub schedule: Vec<usize>,
    /// Theorem-2 mode: real poles and real coefficients.
    #[serde(default)]
    pub real: bool,
    #[serde(default = "default_placement")]
    pub pole_placement: PolePlacement,
    /// Exponents `p + ε` charted without any acceptance claim.
    #[serde(default)]
    pub explore_eps: Vec<f64>,
}

fn default_target() -> NamedFunction {
    NamedFunction::ShiftedPower { k: 2, b: 1.0, x0: 0.0, scale: 1.0 }
}
fn two() -> u32 {
    2
}
fn default_schedule() -> Vec<usize> {
    vec![4, 8, 16, 32, 64]
}
fn default_placement() -> PolePlacement {
    PolePlacement::Cayley
}

/// The three registry targets of the approximation harness on ℍ.
pub fn approx_registry() -> Vec<(&'static str, NamedFunction)> {
    vec![
        ("1/(z+i)^2", NamedFunction::ShiftedPower { k: 2, b: 1.0, x0: 0.0, scale: 1.0 }),
        ("1/(z+i)^3", NamedFunction::ShiftedPower { k: 3, b: 1.0, x0: 0.0, scale: 1.0 }),
        ("1/(z-1+i/2)^2", NamedFunction::ShiftedPower { k: 2, b: 0.5, x0: 1.0, scale: 1.0 }),
    ]
}

/// Theorems 1–2 harness: fit error in `B_{p+1}(ℍ)` against the pole count.
pub fn run_approx(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let p: ApproxParams = params(&spec.params)?;
    let phi = p.function.build()?;
    let mut base = FitConfig::new(p.schedule.first().copied().unwrap_or(4), p.p);
    base.real_coefficients = p.real;
    base.pole_placement = p.pole_placement;
    let rep: ConvergenceReport = convergence_report_eps(&phi, &DomainModel::UpperHalfPlane, p.p, &p.schedule, &base, &p.explore_eps)?;
    let mut failures = vec![];
    let zero = rep.rows.iter().all(|r| r.bp1_error == 0.0);
    if p.real {
        if rep.reality_check != Some(true) {
            failures.push("Theorem-2 mode produced a non-real pole or coefficient".into());
        }
    } else if !zero && !rep.strictly_decreasing {
        failures.push(rep.failure.clone().unwrap_or_else(|| "B_{p+1} error is not strictly decreasing".into()));
    }
    let report = json!({
        "function": p.function,
        "p": p.p,
        "convergence": rep,
        "passed": failures.is_empty(),
        "failures": failures,
    });
    Ok(ExperimentOutcome {
        csv: rep.to_csv(),
        manifest: manifest(spec, &p, json!({ "decrease": "strict", "fit_config": base })),
        passed: failures.is_empty(),
        report,
        failures,
    })
}

// ---------------------------------------------------------------- grunsky

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrunskyParams {
    #[serde(default = "default_ts")]
    pub t: Vec<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "twenty")]
    pub random_tails: usize,
    #[serde(default = "diag_tol")]
    pub tol: f64,
}

fn default_ts() -> Vec<f64> {
    (0..=15).map(|k| k as f64 / 10.0).collect()
}
fn twenty() -> usize {
    20
}
fn diag_tol() -> f64 {
    1e-8
}

/// `κ_N` of `z + t/z` against the diagonal oracle `max_{m ≤ N} |t|^m`,
/// Milin verdicts, and monotonicity in `N` on random tails.
pub fn run_grunsky_suite(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let p: GrunskyParams = params(&spec.params)?;
    let n = p.n.unwrap_or(if spec.deep { 48 } else { 24 });
    let mut csv = String::from("t,N,kappa_N,oracle,verdict\n");
    let mut rows = vec![];
    let mut failures = vec![];
    for &t in &p.t {
        let f = LaurentTail::joukowski(C64::new(t, 0.0), 2 * n);
        let rep = milin_univalence_test(&f, n)?;
        let oracle = (1..=n).map(|m| t.abs().powi(m as i32)).fold(0.0, f64::max);
        let ok = (rep.kappa - oracle).abs() <= p.tol * oracle.max(1.0);
        let expected = if t.abs() > 1.0 { Verdict::CertifiedNonunivalent } else { Verdict::Consistent };
        if !ok {
            failures.push(format!("t = {t}: κ_{n} = {} differs from the diagonal oracle {oracle}", rep.kappa));
        }
        if rep.verdict != expected {
            failures.push(format!("t = {t}: verdict {:?}, expected {:?}", rep.verdict, expected));
        }
        let verdict = serde_json::to_value(rep.verdict).unwrap_or(Value::Null);
        csv.push_str(&format!("{t},{n},{},{oracle},{}\n", rep.kappa, verdict.as_str().unwrap_or("")));
        rows.push(json!({ "t": t, "N": n, "kappa_N": rep.kappa, "oracle": oracle, "equals_t": (rep.kappa - t.abs()).abs() <= p.tol, "verdict": verdict }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut monotone = vec![];
    for i in 0..p.random_tails {
        let b: Vec<C64> = (0..=23).map(|k| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.5f64.powi(k as i32)).collect();
        let f = LaurentTail::new(b);
        let ks: Vec<f64> = (2..=12).map(|m| grunsky_coefficients(&f, m).map(|g| grunsky_norm(&g))).collect::<Result<_>>()?;
        let ok = ks.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        if !ok {
            failures.push(format!("random tail {i}: κ_N decreased in N: {ks:?}"));
        }
        monotone.push(json!({ "index": i, "kappas": ks, "nondecreasing": ok }));
    }
    let report = json!({ "diagonal": rows, "random_tails": monotone, "passed": failures.is_empty(), "failures": failures });
    Ok(ExperimentOutcome {
        csv,
        manifest: manifest(spec, &json!({ "t": p.t, "N": n, "random_tails": p.random_tails }), json!({ "diagonal": p.tol })),
        passed: failures.is_empty(),
        report,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, params: Value) -> ExperimentSpec {
        ExperimentSpec { name: name.into(), params, seed: 7, deep: false }
    }

    #[test]
    fn lemma1_single_instance_closed_form() {
        let out = run_lemma1(&spec("lemma1", json!({ "instance": { "poles": [{ "a": [0.0, 0.0], "c": [1.0, 0.0] }] } }))).unwrap();
        let row = out.csv.lines().nth(1).unwrap();
        let cols: Vec<f64> = row.split(',').take(3).map(|s| s.parse().unwrap()).collect();
        assert!((cols[1] - 4.0).abs() < 1e-9 && (cols[2] - 4.0).abs() < 1e-4, "{row}");
        assert!(out.passed);
        assert_eq!(out.report["contrast"]["strict"], json!(true));
    }

    #[test]
    fn unknown_names_and_fields_are_rejected() {
        assert!(run(&spec("nope", Value::Null)).is_err());
        assert!(run(&spec("grunsky", json!({ "bogus": 1 }))).is_err());
    }

    #[test]
    fn grunsky_suite_rows() {
        let out = run_grunsky_suite(&spec("grunsky", json!({ "t": [0.0, 0.5, 1.2], "n": 8, "random_tails": 3 }))).unwrap();
        assert!(out.passed, "{:?}", out.failures);
        let lines: Vec<&str> = out.csv.lines().collect();
        assert!(lines[2].starts_with("0.5,8,") && lines[2].ends_with(",0.5,CONSISTENT"), "{}", lines[2]);
        assert!((out.report["diagonal"][1]["kappa_N"].as_f64().unwrap() - 0.5).abs() < 1e-8);
        assert!(lines[3].ends_with("CERTIFIED_NONUNIVALENT"));
        assert_eq!(out.report["diagonal"][0]["kappa_N"], json!(0.0));
    }

    #[test]
    fn zero_differential_through_theorem4() {
        let out = run_theorem4(&spec("thm4", json!({ "r": { "poles": [] } }))).unwrap();
        assert!(out.passed);
        assert_eq!(out.report["chain"]["k_upper"], json!(0.0));
    }

    #[test]
    fn pure_simple_pole_fails_the_gate() {
        let r = json!({ "r": { "poles": [{ "a": [0.0, 0.0], "c": [0.0, 0.0], "cp": [0.05, 0.0] }] } });
        assert!(matches!(run_theorem4(&spec("thm4", r)), Err(Error::Gate(_)) | Err(Error::InvalidInput(_))));
    }

    #[test]
    fn kappa_pipeline_matches_the_power_map() {
        // w = z^α exactly; b₁ of the transported map is −2c/3 for this chart
        let phi = NamedFunction::InverseSquare { c: [0.02, 0.0], a: [0.0, 0.0] }.build().unwrap();
        let k = kappa_from_schwarzian(&phi, 12, 1.2).unwrap();
        assert!((k.b[1] - C64::new(-0.02 * 2.0 / 3.0, 0.0)).norm() < 1e-9, "{}", k.b[1]);
        assert!(k.kappa_n > 0.0 && k.kappa_n < 0.04);
    }
}
