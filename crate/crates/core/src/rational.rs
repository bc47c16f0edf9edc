//! Rational quadratic differentials with double poles on the boundary, and
//! the weighted norms `B_p` (sup) and `A_p` (integral).

use crate::domains::{DomainModel, Quasidisk};
use crate::error::{Error, Result};
use crate::holo::Holo;
use crate::maps::MapChain;
use crate::maximize::{maximize_line, maximize_upper, MaxOptions};
use crate::point::{ChartPoint, ComplexValue};
use crate::quadrature::{integrate_disk, integrate_rect, integrate_upper, QuadOptions};
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleTerm {
    pub a: C64,
    pub c: C64,
    pub cp: C64,
}

/// `Σ c_j/(z − a_j)² + Σ c′_j/(z − a_j)` with every `a_j` on `∂d`.
/// An empty term list is the zero differential.
#[derive(Clone, Debug)]
pub struct RationalQD {
    pub terms: Vec<PoleTerm>,
    pub domain: DomainModel,
}

impl RationalQD {
    pub fn new(terms: Vec<PoleTerm>, domain: DomainModel) -> Result<Self> {
        for t in &terms {
            if !domain.on_boundary(ComplexValue::Finite(t.a), 1e-10) {
                return Err(Error::InvalidInput(format!("pole {} is not on the boundary", t.a)));
            }
        }
        for (i, s) in terms.iter().enumerate() {
            if terms[..i].iter().any(|t| t.a == s.a) {
                return Err(Error::InvalidInput(format!("duplicate pole {}", s.a)));
            }
        }
        if !terms.is_empty() && !(terms.iter().map(|t| t.c.norm()).sum::<f64>() > 0.0) {
            return Err(Error::InvalidInput("needs a nonzero double-pole coefficient".into()));
        }
        Ok(RationalQD { terms, domain })
    }

    pub fn zero(domain: DomainModel) -> Self {
        RationalQD { terms: vec![], domain }
    }

    pub fn eval(&self, z: ComplexValue) -> Result<ComplexValue> {
        let z = match z {
            ComplexValue::Infinity => return Ok(ComplexValue::Finite(C64::new(0.0, 0.0))),
            ComplexValue::Finite(z) => z,
        };
        let mut acc = C64::new(0.0, 0.0);
        for t in &self.terms {
            let d = z - t.a;
            if d.norm() == 0.0 {
                return Err(Error::Pole(ComplexValue::Finite(z)));
            }
            let inv = d.inv();
            acc += t.c * inv * inv + t.cp * inv;
        }
        Ok(ComplexValue::Finite(acc))
    }

    pub fn scale(&self, k: C64) -> RationalQD {
        let terms = self.terms.iter().map(|t| PoleTerm { a: t.a, c: k * t.c, cp: k * t.cp }).collect();
        RationalQD { terms, domain: self.domain.clone() }
    }

    pub fn to_holo(&self) -> Holo {
        let terms = self.terms.clone();
        let far_terms = self.terms.clone();
        let sum_cp: C64 = self.terms.iter().map(|t| t.cp).sum();
        let scale: f64 = self.terms.iter().map(|t| t.cp.norm()).sum::<f64>().max(1e-300);
        let residue_free = sum_cp.norm() <= 1e-14 * scale;
        Holo::new("rational", move |z| {
            terms.iter().fold(C64::new(0.0, 0.0), |acc, t| {
                let inv = (z - t.a).inv();
                acc + t.c * inv * inv + t.cp * inv
            })
        })
        .with_far_field(move |s| {
            // z²r(z) at z = 1/s; the simple parts telescope when Σc′ = 0.
            let mut acc = C64::new(0.0, 0.0);
            for t in &far_terms {
                let q = (C64::new(1.0, 0.0) - t.a * s).inv();
                acc += t.c * q * q + t.cp * t.a * q;
            }
            if !residue_free {
                acc += sum_cp / s;
            }
            acc
        })
        .with_singularities(self.terms.iter().map(|t| ComplexValue::Finite(t.a)).collect())
    }

    pub fn to_config(&self) -> RationalConfig {
        RationalConfig {
            poles: self
                .terms
                .iter()
                .map(|t| PoleJson { a: [t.a.re, t.a.im], c: [t.c.re, t.c.im], cp: [t.cp.re, t.cp.im] })
                .collect(),
            domain: self.domain.name().to_string(),
            chain: match &self.domain {
                DomainModel::Quasidisk(q) => q.chain.clone(),
                _ => None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleJson {
    pub a: [f64; 2],
    pub c: [f64; 2],
    #[serde(default)]
    pub cp: [f64; 2],
}

/// JSON form: `{"poles":[{"a":[re,im],"c":[re,im],"cp":[re,im]}],"domain":"halfplane"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalConfig {
    pub poles: Vec<PoleJson>,
    #[serde(default = "halfplane")]
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<MapChain>,
}

fn halfplane() -> String {
    "halfplane".into()
}

pub fn domain_from_name(name: &str, chain: Option<&MapChain>) -> Result<DomainModel> {
    Ok(match name {
        "halfplane" => DomainModel::UpperHalfPlane,
        "lower_halfplane" => DomainModel::LowerHalfPlane,
        "disk" => DomainModel::Disk,
        "exterior_disk" => DomainModel::ExteriorDisk,
        "halfstrip" => DomainModel::HalfStrip,
        "quasidisk" => {
            let chain = chain.ok_or_else(|| Error::InvalidInput("quasidisk needs a chain".into()))?;
            DomainModel::Quasidisk(Quasidisk::from_chain(chain.clone())?)
        }
        other => return Err(Error::InvalidInput(format!("unknown domain {other}"))),
    })
}

impl RationalConfig {
    pub fn build(&self) -> Result<RationalQD> {
        let d = domain_from_name(&self.domain, self.chain.as_ref())?;
        let c = |v: [f64; 2]| C64::new(v[0], v[1]);
        RationalQD::new(self.poles.iter().map(|p| PoleTerm { a: c(p.a), c: c(p.c), cp: c(p.cp) }).collect(), d)
    }
}

pub fn eval_rational(r: &RationalQD, z: ComplexValue) -> Result<ComplexValue> {
    r.eval(z)
}

/// Random rational on ∂ℍ with real poles in `[−5, 5]`, complex coefficients
/// and `Σ c′_j = 0`, so that the differential lies in `B₂(ℍ)`.
pub fn random_halfplane_rational<R: Rng>(rng: &mut R, max_poles: usize) -> RationalQD {
    let n = rng.gen_range(1..=max_poles);
    let mut poles: Vec<f64> = Vec::new();
    while poles.len() < n {
        let a = rng.gen_range(-5.0..5.0);
        if poles.iter().all(|p: &f64| (p - a).abs() > 0.05) {
            poles.push(a);
        }
    }
    let mut terms: Vec<PoleTerm> = poles
        .iter()
        .map(|&a| {
            let c = C64::from_polar(rng.gen_range(0.1..1.0), rng.gen_range(0.0..2.0 * PI));
            let cp = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            PoleTerm { a: C64::new(a, 0.0), c, cp }
        })
        .collect();
    let mean: C64 = terms.iter().map(|t| t.cp).sum::<C64>() / n as f64;
    for t in &mut terms {
        t.cp -= mean;
    }
    RationalQD::new(terms, DomainModel::UpperHalfPlane).expect("random rational is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub argmax: ComplexValue,
    pub grid_level: u32,
    pub converged: bool,
}

impl NormResult {
    pub fn csv_row(&self) -> String {
        let (re, im) = self.argmax.re_im();
        format!("{},{},{},{},{}", self.value, re, im, self.grid_level, self.converged)
    }

    pub const CSV_HEADER: &'static str = "value,argmax_re,argmax_im,level,converged";
}

/// Boundary hints in the ℍ-chart: preimages of singularities on `∂d`.
pub(crate) fn chart_hints(phi: &Holo, d: &DomainModel) -> Vec<ComplexValue> {
    let g = d.parametrization();
    let mut out = vec![ComplexValue::Infinity];
    for s in &phi.singularities {
        if let ComplexValue::Finite(p) = s {
            if !d.on_boundary(*s, 1e-8) {
                continue;
            }
            match g.inverse(*p) {
                Ok(z) if z.re.is_finite() && z.norm() < 1e12 => out.push(ComplexValue::Finite(C64::new(z.re, 0.0))),
                _ => {}
            }
        }
    }
    out
}

pub(crate) fn bulk_frame(hints: &[ComplexValue]) -> (f64, f64) {
    let xs: Vec<f64> = hints.iter().filter_map(|h| h.finite()).map(|z| z.re).collect();
    if xs.is_empty() {
        return (0.0, 1.0);
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0.5 * (lo + hi), (0.5 * (hi - lo)).max(1.0))
}

/// `(2 Im ζ)^p |g′(ζ)|^p |φ(g(ζ))|`, the weighted modulus pulled back to ℍ.
pub(crate) fn pulled_weight(phi: &Holo, d: &DomainModel, g: &crate::maps::AnalyticMap, p: f64, pt: ChartPoint) -> f64 {
    match (d, pt) {
        (DomainModel::UpperHalfPlane, ChartPoint::Plane(z)) if z.norm() > 1e8 => {
            pulled_weight(phi, d, g, p, ChartPoint::Inverted(z.inv()))
        }
        (DomainModel::UpperHalfPlane, ChartPoint::Plane(z)) => (2.0 * z.im).powf(p) * phi.eval(z).norm(),
        (DomainModel::UpperHalfPlane, ChartPoint::Inverted(s)) => {
            // ζ = 1/s: Im ζ = −Im s/|s|², φ(ζ) = s²·(z²φ)(s)
            // grouped as (2y/|s|)^p·|s|^{2−p} to stay in range for tiny s
            let r = s.norm();
            (-2.0 * s.im / r).powf(p) * r.powf(2.0 - p) * phi.far_field(s).norm()
        }
        (_, pt) => {
            let z = match pt {
                ChartPoint::Plane(z) => z,
                ChartPoint::Inverted(s) => s.inv(),
            };
            match g.jet(z) {
                Ok(j) => (2.0 * z.im * j.d1.norm()).powf(p) * phi.eval(j.value).norm(),
                Err(_) => f64::NAN,
            }
        }
    }
}

pub(crate) fn chart_to_domain(d: &DomainModel, pt: ChartPoint) -> ComplexValue {
    let g = d.parametrization();
    let z = match pt {
        ChartPoint::Plane(z) => z,
        ChartPoint::Inverted(s) if s.norm() == 0.0 => {
            return match d {
                DomainModel::UpperHalfPlane => ComplexValue::Infinity,
                _ => g.value(C64::new(0.0, 1e15)).map(ComplexValue::from_c64).unwrap_or(ComplexValue::Infinity),
            }
        }
        ChartPoint::Inverted(s) => s.inv(),
    };
    g.value(z).map(ComplexValue::from_c64).unwrap_or(ComplexValue::Infinity)
}

/// `sup λ_d^{−p}|φ|` for real `p`.
pub fn weighted_sup(phi: &Holo, d: &DomainModel, p: f64, opts: &MaxOptions) -> NormResult {
    let g = d.parametrization();
    let hints = chart_hints(phi, d);
    let (xc, s) = bulk_frame(&hints);
    let f = |pt: ChartPoint| pulled_weight(phi, d, &g, p, pt);
    let r = maximize_upper(&f, &hints, xc, s, opts);
    NormResult { value: r.value.max(0.0), argmax: chart_to_domain(d, r.argmax), grid_level: r.level, converged: r.converged }
}

pub fn bp_norm(phi: &Holo, d: &DomainModel, p: u32) -> Result<NormResult> {
    if p < 2 {
        return Err(Error::InvalidInput("p must be at least 2".into()));
    }
    Ok(weighted_sup(phi, d, p as f64, &MaxOptions::default()))
}

/// `∬_d λ_d^{2−p}|φ| dx dy`.
pub fn ap_norm(phi: &Holo, d: &DomainModel, p: u32) -> Result<f64> {
    if p < 2 {
        return Err(Error::InvalidInput("p must be at least 2".into()));
    }
    let pe = p as f64 - 2.0;
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-9, max_cells: 60_000, ..Default::default() };
    let integrand: Box<dyn Fn(C64) -> C64> = match d {
        DomainModel::Disk => Box::new(|z: C64| C64::new((1.0 - z.norm_sqr()).powf(pe) * phi.eval(z).norm(), 0.0)),
        DomainModel::HalfStrip => {
            return halfstrip_ap(phi, pe, &opts);
        }
        _ => {
            let g = d.parametrization();
            Box::new(move |z: C64| match g.jet(z) {
                Ok(j) => C64::new((2.0 * z.im).powf(pe) * j.d1.norm().powf(pe + 2.0) * phi.eval(j.value).norm(), 0.0),
                Err(_) => C64::new(f64::NAN, 0.0),
            })
        }
    };
    let hints = chart_hints(phi, d);
    let (xc, s) = bulk_frame(&hints);
    let q = match d {
        DomainModel::Disk => integrate_disk(&*integrand, &opts),
        _ => integrate_upper(&*integrand, xc, s, &opts),
    };
    if q.converged && q.value.re.is_finite() {
        return Ok(q.value.re);
    }
    // Nested truncations: a divergent integral keeps growing by a
    // non-vanishing amount as the cut-off shrinks.
    let truncated = |eps: f64| {
        let h = |u: f64, v: f64| {
            let (cu, cv) = (u.cos(), v.cos());
            integrand(C64::new(xc + s * u.tan(), s * v.tan())) * (s * s / (cu * cu * cv * cv))
        };
        let rect = match d {
            DomainModel::Disk => [0.0, 1.0 - eps, 0.0, 2.0 * PI],
            _ => [-PI / 2.0 + eps, PI / 2.0 - eps, eps, PI / 2.0 - eps],
        };
        let disk = |r: f64, t: f64| integrand(C64::from_polar(r, t)) * r;
        let o = QuadOptions { max_cells: 20_000, ..opts };
        match d {
            DomainModel::Disk => integrate_rect(&disk, rect, &o).value.re,
            _ => integrate_rect(&h, rect, &o).value.re,
        }
    };
    let (i1, i2, i3) = (truncated(2f64.powi(-4)), truncated(2f64.powi(-8)), truncated(2f64.powi(-12)));
    let (d1, d2) = (i2 - i1, i3 - i2);
    if !i3.is_finite() || (d2 > 0.3 * d1 && d2 > 1e-6 * i3.abs()) {
        return Err(Error::Divergent(format!("truncated integrals {i1:.6e}, {i2:.6e}, {i3:.6e}")));
    }
    Err(Error::NotConverged(format!("estimate {:.10e} ± {:.3e}", q.value.re, q.error)))
}

fn halfstrip_ap(phi: &Holo, pe: f64, opts: &QuadOptions) -> Result<f64> {
    let f = |z: C64| {
        let lam = DomainModel::HalfStrip.hyperbolic_density(ComplexValue::Finite(z)).unwrap_or(f64::NAN);
        C64::new(lam.powf(-pe) * phi.eval(z).norm(), 0.0)
    };
    let mut xi_max = 64.0;
    let mut prev = f64::NAN;
    loop {
        let q = crate::quadrature::integrate_halfstrip(&f, xi_max, opts);
        let v = q.value.re;
        if !v.is_finite() {
            return Err(Error::NotConverged("half-strip integral".into()));
        }
        if (v - prev).abs() <= 1e-10 * v.abs().max(1e-300) || v == 0.0 {
            return Ok(v);
        }
        if xi_max > 1e5 {
            return Err(Error::Divergent(format!("half-strip integral still growing: {v:.6e}")));
        }
        prev = v;
        xi_max *= 4.0;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanInequality {
    pub bp: f64,
    pub ap: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// `‖φ‖_{B_p} ≤ (4/π)‖φ‖_{A_p}`.
pub fn check_mean_inequality(phi: &Holo, d: &DomainModel, p: u32) -> Result<MeanInequality> {
    let bp = bp_norm(phi, d, p)?.value;
    let ap = ap_norm(phi, d, p)?;
    let ratio = if ap > 0.0 { bp / ap } else { 0.0 };
    let holds = bp <= 4.0 / PI * ap + 1e-6;
    if !holds {
        return Err(Error::Invariant {
            message: format!("B_p = {bp} exceeds (4/π)·A_p = {}", 4.0 / PI * ap),
            witness: ComplexValue::Infinity,
        });
    }
    Ok(MeanInequality { bp, ap, ratio, holds })
}

/// Collar sup on the line `Im ζ = ρ` (finite part) and the line
/// `Im σ = ρ` in the chart `σ = −1/ζ` (neighbourhood of ∞).
fn collar_sup(f: &dyn Fn(ChartPoint) -> f64, poles: &[f64], rho: f64, extent: f64) -> (f64, ChartPoint) {
    let mut nodes: Vec<f64> = (0..801).map(|i| extent * (-PI / 2.0 + PI * (i as f64 + 0.5) / 801.0).tan() / 100.0).collect();
    for &a in poles {
        for k in -60..=60 {
            nodes.push(a + rho * k as f64 * 0.5);
        }
        for k in 0..40 {
            let t = rho * 30.0 * 1.25f64.powi(k);
            nodes.push(a + t);
            nodes.push(a - t);
        }
    }
    let line = |x: f64| f(ChartPoint::Plane(C64::new(x, rho)));
    let (v1, x1) = maximize_line(&line, &mut nodes);
    let t_max = 1.0 / extent;
    let mut tn: Vec<f64> = (-60..=60).map(|k| rho * k as f64 * 0.5).collect();
    for k in 0..60 {
        let t = rho * 30.0 * 1.25f64.powi(k);
        if t > t_max {
            break;
        }
        tn.push(t);
        tn.push(-t);
    }
    let inf_line = |t: f64| f(ChartPoint::Inverted(-C64::new(t, rho)));
    let (v2, t2) = maximize_line(&inf_line, &mut tn);
    if v2 > v1 {
        (v2, ChartPoint::Inverted(-C64::new(t2, rho)))
    } else {
        (v1, ChartPoint::Plane(C64::new(x1, rho)))
    }
}

/// `limsup_{z→∂d} λ_d^{−p}|r|` from collars `ρ_k = 2^{−k}`, `k = 3..14`.
pub fn boundary_limsup(r: &RationalQD, p: u32) -> Result<NormResult> {
    boundary_limsup_of(&r.to_holo(), &r.domain, p)
}

/// The same collar limit for any evaluator on a half-plane-parametrized
/// domain.
pub fn boundary_limsup_of(phi: &Holo, d: &DomainModel, p: u32) -> Result<NormResult> {
    let phi = phi.clone();
    let g = d.parametrization();
    let hints = chart_hints(&phi, d);
    let poles: Vec<f64> = hints.iter().filter_map(|h| h.finite()).map(|z| z.re).collect();
    let max_a = poles.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let extent = 10.0 * (1.0 + max_a);
    let f = |pt: ChartPoint| pulled_weight(&phi, d, &g, p as f64, pt);
    let mut sups = Vec::new();
    let mut arg = ChartPoint::Plane(C64::new(0.0, 1.0));
    for k in 3..=14 {
        let (v, a) = collar_sup(&f, &poles, 2f64.powi(-k), extent);
        sups.push(v);
        arg = a;
    }
    // Collar sups approach the limit linearly in ρ; halving ρ each step,
    // 2S(ρ/2) − S(ρ) removes the leading term.
    let n = sups.len();
    let ext: Vec<f64> = (1..n).map(|i| (2.0 * sups[i] - sups[i - 1]).max(0.0)).collect();
    let m = ext.len();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    let converged = (m - 2..m).all(|i| rel(ext[i], ext[i - 1]) < 1e-4) || sups[n - 1] == 0.0;
    let value = ext[m - 1];
    // Project the collar maximizer to the boundary; on the ∞ line the
    // point −1/(t + iρ) tends to −1/t, or to ∞ when t = O(ρ).
    let rho = 2f64.powi(-14);
    let boundary = match arg {
        ChartPoint::Plane(z) => Some(z.re),
        ChartPoint::Inverted(s) => {
            let t = -s.re;
            if t.abs() <= 100.0 * rho {
                None
            } else {
                Some(-1.0 / t)
            }
        }
    };
    let argmax = match boundary {
        None => match d {
            DomainModel::UpperHalfPlane => ComplexValue::Infinity,
            _ => g.value(C64::new(1e15, 0.0)).map(ComplexValue::from_c64).unwrap_or(ComplexValue::Infinity),
        },
        Some(x) => g.value(C64::new(x, 0.0)).map(ComplexValue::from_c64).unwrap_or(ComplexValue::Infinity),
    };
    Ok(NormResult { value, argmax, grid_level: n as u32, converged })
}

/// Closed-form boundary limsup of a double-pole rational on ℍ with `p = 2`:
/// `max(4|c_j|, 4|Σ(c_j + c′_j a_j)|)`.
pub fn halfplane_limsup_closed_form(r: &RationalQD) -> f64 {
    let at_poles = r.terms.iter().map(|t| 4.0 * t.c.norm()).fold(0.0, f64::max);
    let at_inf = 4.0 * r.terms.iter().map(|t| t.c + t.cp * t.a).sum::<C64>().norm();
    at_poles.max(at_inf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::NamedFunction;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(terms: &[(f64, f64, f64)]) -> RationalQD {
        RationalQD::new(
            terms.iter().map(|&(a, c, cp)| PoleTerm { a: C64::new(a, 0.0), c: C64::new(c, 0.0), cp: C64::new(cp, 0.0) }).collect(),
            DomainModel::UpperHalfPlane,
        )
        .unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let one = r(&[(0.0, 1.0, 0.0)]);
        assert_eq!(one.eval(ComplexValue::new(0.0, 1.0)).unwrap(), ComplexValue::new(-1.0, 0.0));
        let two = r(&[(0.0, 1.0, 0.0), (1.0, 1.0, 0.0)]);
        assert_eq!(two.eval(ComplexValue::new(2.0, 0.0)).unwrap(), ComplexValue::new(1.25, 0.0));
        assert_eq!(one.eval(ComplexValue::Infinity).unwrap(), ComplexValue::new(0.0, 0.0));
        assert!(matches!(one.eval(ComplexValue::new(0.0, 0.0)), Err(Error::Pole(_))));
    }

    #[test]
    fn simple_pole_only_is_rejected() {
        let t = vec![PoleTerm { a: C64::new(0.0, 0.0), c: C64::new(0.0, 0.0), cp: C64::new(1.0, 0.0) }];
        assert!(RationalQD::new(t, DomainModel::UpperHalfPlane).is_err());
    }

    #[test]
    fn off_boundary_pole_is_rejected() {
        let t = vec![PoleTerm { a: C64::new(0.0, -1.0), c: C64::new(1.0, 0.0), cp: C64::new(0.0, 0.0) }];
        assert!(RationalQD::new(t, DomainModel::UpperHalfPlane).is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg: RationalConfig = serde_json::from_str(r#"{"poles":[{"a":[0,0],"c":[1,0],"cp":[0,0]}],"domain":"halfplane"}"#).unwrap();
        let q = cfg.build().unwrap();
        assert_eq!(q.to_config(), cfg);
    }

    #[test]
    fn bp_norm_of_inverse_square() {
        let q = r(&[(0.0, 1.0, 0.0)]);
        let n = bp_norm(&q.to_holo(), &DomainModel::UpperHalfPlane, 2).unwrap();
        assert!((n.value - 4.0).abs() < 1e-9, "{}", n.value);
        assert_eq!(bp_norm(&Holo::zero(), &DomainModel::UpperHalfPlane, 2).unwrap().value, 0.0);
    }

    #[test]
    fn bp_norm_of_shifted_inverse_fourth_power_peaks_at_i() {
        // 4y²/|z+i|⁴ attains 1/4 at z = i.
        let f = NamedFunction::ShiftedPower { k: 4, b: 1.0, x0: 0.0, scale: 1.0 }.build().unwrap();
        let n = bp_norm(&f, &DomainModel::UpperHalfPlane, 2).unwrap();
        assert!((n.value - 0.25).abs() < 1e-9);
        assert!(n.argmax.chordal(&ComplexValue::new(0.0, 1.0)) < 1e-3);
    }

    #[test]
    fn bp_norm_of_shifted_inverse_square_is_four() {
        // 4y²/|z+i|² increases to 4 along the imaginary axis.
        let f = NamedFunction::ShiftedPower { k: 2, b: 1.0, x0: 0.0, scale: 1.0 }.build().unwrap();
        let n = bp_norm(&f, &DomainModel::UpperHalfPlane, 2).unwrap();
        assert!((n.value - 4.0).abs() < 1e-6, "{}", n.value);
    }

    #[test]
    fn scaling_is_exact() {
        let q = r(&[(-1.0, 1.0, 0.5), (1.0, 0.3, -0.5)]);
        let a = bp_norm(&q.to_holo(), &DomainModel::UpperHalfPlane, 2).unwrap().value;
        let b = bp_norm(&q.scale(C64::new(0.0, -3.0)).to_holo(), &DomainModel::UpperHalfPlane, 2).unwrap().value;
        assert!((b - 3.0 * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn limsup_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let q = random_halfplane_rational(&mut rng, 4);
            let l = boundary_limsup(&q, 2).unwrap();
            let want = halfplane_limsup_closed_form(&q);
            assert!((l.value - want).abs() < 1e-5 * want, "{} vs {want}", l.value);
            assert!(l.converged);
        }
    }

    #[test]
    fn limsup_of_single_pole_and_symmetric_pair() {
        let l = boundary_limsup(&r(&[(0.0, 1.0, 0.0)]), 2).unwrap();
        assert!((l.value - 4.0).abs() < 1e-6);
        let pair = r(&[(-1.0, 1.0, 0.0), (1.0, 1.0, 0.0)]);
        let l = boundary_limsup(&pair, 2).unwrap().value;
        let b = bp_norm(&pair.to_holo(), &DomainModel::UpperHalfPlane, 2).unwrap().value;
        assert!((l - b).abs() <= 1e-4 * b, "{l} {b}");
    }

    #[test]
    fn conformal_invariance_half_plane_to_disk() {
        // (φ∘σ⁻¹)(σ⁻¹′)² on 𝔻 has the same B₂ norm as φ on ℍ.
        let phi = NamedFunction::ShiftedPower { k: 4, b: 1.0, x0: 0.3, scale: 1.0 }.build().unwrap();
        let inv = crate::mobius::Mobius::cayley().inverse();
        let p2 = phi.clone();
        let pulled = Holo::new("pulled", move |w| {
            let j = inv.jet(w);
            p2.eval(j[0]) * j[1] * j[1]
        });
        let a = bp_norm(&phi, &DomainModel::UpperHalfPlane, 2).unwrap().value;
        let b = bp_norm(&pulled, &DomainModel::Disk, 2).unwrap().value;
        assert!((a - b).abs() < 1e-5 * a, "{a} {b}");
    }

    #[test]
    fn exponential_on_halfstrip_has_unit_a2_norm_and_satisfies_mean_inequality() {
        let w1 = Holo::new("omega1", |z: C64| (-z).exp());
        let a = ap_norm(&w1, &DomainModel::HalfStrip, 2).unwrap();
        assert!((a - 1.0).abs() < 1e-8, "{a}");
        let m = check_mean_inequality(&w1, &DomainModel::HalfStrip, 2).unwrap();
        assert!(m.ratio <= 4.0 / PI);
    }

    #[test]
    fn divergent_integral_is_detected() {
        let f = NamedFunction::ShiftedPower { k: 2, b: 1.0, x0: 0.0, scale: 1.0 }.build().unwrap();
        assert!(matches!(ap_norm(&f, &DomainModel::UpperHalfPlane, 2), Err(Error::Divergent(_))));
    }

    #[test]
    fn a2_norm_of_shifted_fourth_power() {
        // ∬_ℍ |z + i|^{-4} = π/4
        let f = NamedFunction::ShiftedPower { k: 4, b: 1.0, x0: 0.0, scale: 1.0 }.build().unwrap();
        let a = ap_norm(&f, &DomainModel::UpperHalfPlane, 2).unwrap();
        assert!((a - PI / 4.0).abs() < 1e-7, "{a}");
    }
}
