//! Rational approximation with boundary poles: integrate `φ`, fit simple
//! poles to the integral by weighted least squares, differentiate, and
//! measure the error in `B_{p+1}`.

use crate::domains::DomainModel;
use crate::error::{Error, Result};
use crate::holo::Holo;
use crate::lsq::constrained_lstsq;
use crate::maximize::MaxOptions;
use crate::point::ComplexValue;
use crate::quadrature::{integrate_segment, integrate_upper, QuadOptions};
use crate::rational::{weighted_sup, PoleTerm, RationalQD};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolePlacement {
    /// Equal spacing on `[−4L, 4L]` (equal angles on the circle).
    Uniform,
    /// Chebyshev points of `[−4L, 4L]`.
    Chebyshev,
    /// Preimages of equally spaced circle points under the Cayley map
    /// scaled by `L`: clustered near the centre, reaching out to ∞.
    Cayley,
    /// Start from half the Cayley set, then repeatedly add the boundary
    /// point under the largest weighted residual.
    Adaptive,
}

fn default_placement() -> PolePlacement {
    PolePlacement::Cayley
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub n: usize,
    #[serde(default = "default_placement")]
    pub pole_placement: PolePlacement,
    pub sample_count: usize,
    /// `p + 1`, the exponent of the target norm.
    pub weight_exponent: u32,
    /// Reality condition `Im[ζ^m r̃(ζ)] = 0` on the unit circle.
    #[serde(default)]
    pub symmetry: Option<u32>,
    /// Real coefficients (poles are always on the boundary).
    #[serde(default)]
    pub real_coefficients: bool,
    /// Placement scale `L`; derived from the singularities when absent.
    #[serde(default)]
    pub scale: Option<f64>,
}

impl FitConfig {
    pub fn new(n: usize, p: u32) -> Self {
        FitConfig {
            n,
            pole_placement: PolePlacement::Cayley,
            sample_count: (40 * n).max(1200),
            weight_exponent: p + 1,
            symmetry: None,
            real_coefficients: false,
            scale: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidInput("pole count must be at least 1".into()));
        }
        if self.sample_count < 10 * self.n {
            return Err(Error::InvalidInput(format!("sample_count {} is below 10n = {}", self.sample_count, 10 * self.n)));
        }
        if self.weight_exponent < 3 {
            return Err(Error::InvalidInput("weight exponent p + 1 must be at least 3".into()));
        }
        Ok(())
    }
}

/// Starting point of the integration paths.
fn base_point(phi: &Holo, d: &DomainModel) -> Result<C64> {
    let near_singular = |b: C64| phi.singularities.iter().any(|s| s.finite().is_some_and(|p| (p - b).norm() < 1e-6));
    let candidates: Vec<C64> = match d {
        DomainModel::UpperHalfPlane => vec![C64::new(0.0, 0.0), C64::new(0.0, 1.0)],
        DomainModel::LowerHalfPlane => vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        DomainModel::Disk => vec![C64::new(0.0, 0.0)],
        DomainModel::ExteriorDisk => vec![C64::new(2.0, 0.0)],
        DomainModel::HalfStrip => vec![C64::new(1.0, 0.5)],
        DomainModel::Quasidisk(q) => vec![q.map.value(C64::new(0.0, 1.0))?],
    };
    candidates.into_iter().find(|b| !near_singular(*b)).ok_or_else(|| Error::InvalidInput("no regular base point for the integral".into()))
}

fn segment_clear(phi: &Holo, a: C64, b: C64) -> bool {
    let len = (b - a).norm().max(1e-300);
    phi.singularities.iter().filter_map(|s| s.finite()).all(|p| {
        let t = (((p - a) * (b - a).conj()).re / (len * len)).clamp(0.0, 1.0);
        (a + (b - a) * t - p).norm() > 1e-6 * (1.0 + len)
    })
}

fn path_integral(phi: &Holo, path: &[C64]) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for w in path.windows(2) {
        if !segment_clear(phi, w[0], w[1]) {
            return Err(Error::NoPath(ComplexValue::Finite(w[1])));
        }
        acc += integrate_segment(&|z| phi.eval(z), w[0], w[1], 1e-13)?;
    }
    Ok(acc)
}

/// A bent path from `a` to `b` through a point pushed into the domain.
fn detour(d: &DomainModel, a: C64, b: C64) -> Vec<C64> {
    let mid = 0.5 * (a + b);
    let len = (b - a).norm();
    let w = match d {
        DomainModel::UpperHalfPlane => mid + C64::new(0.0, 0.5 * len.max(1.0)),
        DomainModel::LowerHalfPlane => mid - C64::new(0.0, 0.5 * len.max(1.0)),
        DomainModel::Disk => 0.5 * mid + C64::new(0.0, 0.25 * len) * if mid.im > 0.0 { -1.0 } else { 1.0 },
        _ => mid + C64::new(0.0, 0.25 * len),
    };
    vec![a, w, b]
}

/// `I_φ(z) = ∫ φ` from the base point, checked on two homotopic paths.
pub fn integrate_phi(phi: &Holo, d: &DomainModel, z: ComplexValue) -> Result<ComplexValue> {
    let z = z.finite().ok_or_else(|| Error::InvalidInput("cannot integrate to ∞".into()))?;
    let b = base_point(phi, d)?;
    if (z - b).norm() == 0.0 {
        return Ok(ComplexValue::Finite(C64::new(0.0, 0.0)));
    }
    let straight = path_integral(phi, &[b, z]);
    let bent = path_integral(phi, &detour(d, b, z));
    match (straight, bent) {
        (Ok(s), Ok(t)) => {
            if (s - t).norm() > 1e-8 * (1.0 + s.norm()) {
                return Err(Error::Invariant {
                    message: format!("path dependence {:.2e} between homotopic paths", (s - t).norm()),
                    witness: ComplexValue::Finite(z),
                });
            }
            Ok(ComplexValue::Finite(s))
        }
        (Ok(s), Err(_)) | (Err(_), Ok(s)) => Ok(ComplexValue::Finite(s)),
        (Err(e), Err(_)) => Err(e),
    }
}

/// `I_φ` as a function, straight paths from the base point.
pub fn antiderivative(phi: &Holo, d: &DomainModel) -> Result<Holo> {
    let b = base_point(phi, d)?;
    let ph = phi.clone();
    Ok(Holo::new(format!("I[{}]", phi.label), move |z| {
        if (z - b).norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        path_integral(&ph, &[b, z]).unwrap_or(C64::new(f64::NAN, f64::NAN))
    })
    .with_singularities(phi.singularities.clone()))
}

/// `c₀ + Σ c_j/(z − a_j)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimpleFit {
    pub poles: Vec<C64>,
    pub coeffs: Vec<C64>,
    pub constant: C64,
    /// Weighted residual relative to the weighted data.
    pub residual: f64,
    pub condition: f64,
    pub used_svd: bool,
    pub constraint_residual: f64,
    pub warnings: Vec<String>,
}

impl SimpleFit {
    pub fn eval(&self, z: C64) -> C64 {
        self.poles.iter().zip(&self.coeffs).fold(self.constant, |acc, (a, c)| acc + c / (z - a))
    }
}

/// Centre and scale of the singular structure projected to the boundary.
fn frame(psi: &Holo, d: &DomainModel) -> (f64, f64) {
    if !matches!(d, DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane) {
        return (0.0, 1.0);
    }
    let pts: Vec<C64> = psi.singularities.iter().filter_map(|s| s.finite()).collect();
    if pts.is_empty() {
        return (0.0, 1.0);
    }
    let xc = pts.iter().map(|p| p.re).sum::<f64>() / pts.len() as f64;
    let l = pts.iter().map(|p| (p.re - xc).abs().max(p.im.abs())).fold(0.0, f64::max);
    (xc, l.max(1.0))
}

fn placement(d: &DomainModel, kind: PolePlacement, n: usize, xc: f64, l: f64) -> Vec<C64> {
    let t = |j: usize| (j as f64 + 0.5) / n as f64;
    match d {
        DomainModel::Disk => (0..n).map(|j| C64::from_polar(1.0, 2.0 * PI * t(j) - PI)).collect(),
        _ => (0..n)
            .map(|j| {
                let x = match kind {
                    PolePlacement::Uniform => xc + 4.0 * l * (2.0 * t(j) - 1.0),
                    PolePlacement::Chebyshev => xc - 4.0 * l * (PI * t(j)).cos(),
                    PolePlacement::Cayley | PolePlacement::Adaptive => xc + l * (PI * (t(j) - 0.5)).tan(),
                };
                C64::new(x, 0.0)
            })
            .collect(),
    }
}

struct Samples {
    z: Vec<C64>,
    w: Vec<f64>,
}

/// Collars `y = L·2^{−k}`, `k = −10..8`, on the half-plane and
/// `|ζ| = 1 − 2^{−k}`, `k = 1..12`, on the disk, weighted by `λ^{−p}`.
fn samples(d: &DomainModel, count: usize, p: u32, xc: f64, l: f64) -> Result<Samples> {
    let mut z = vec![];
    let mut w = vec![];
    match d {
        DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane => {
            let sign = if matches!(d, DomainModel::UpperHalfPlane) { 1.0 } else { -1.0 };
            let ks: Vec<i32> = (-10..=8).collect();
            let per = (count / ks.len()).max(4);
            for k in ks {
                let y = l * 2f64.powi(-k);
                for i in 0..per {
                    let u = -PI / 2.0 + PI * (i as f64 + 0.5) / per as f64;
                    z.push(C64::new(xc + (l + y) * u.tan(), sign * y));
                    w.push((2.0 * y).powi(p as i32));
                }
            }
        }
        DomainModel::Disk => {
            let ks: Vec<i32> = (1..=12).collect();
            let per = (count / ks.len()).max(4);
            for k in ks {
                let r = 1.0 - 2f64.powi(-k);
                for i in 0..per {
                    let th = 2.0 * PI * (i as f64 + 0.5 * (k % 2) as f64 + 0.25) / per as f64;
                    z.push(C64::from_polar(r, th));
                    w.push((1.0 - r * r).powi(p as i32));
                }
            }
        }
        _ => return Err(Error::InvalidInput(format!("fitting is implemented on ℍ, ℍ* and 𝔻, not {}", d.name()))),
    }
    Ok(Samples { z, w })
}

/// Unknown layout: `[Re c₀, Im c₀, Re c₁, (Im c₁,) …]`.
struct Layout {
    n: usize,
    real: bool,
}

impl Layout {
    fn width(&self) -> usize {
        2 + if self.real { self.n } else { 2 * self.n }
    }

    /// Real rows for `Re`/`Im` of `Σ_j coef_j·c_j + k₀·c₀`.
    fn rows(&self, k0: C64, coef: &[C64]) -> [Vec<f64>; 2] {
        let mut re = vec![0.0; self.width()];
        let mut im = vec![0.0; self.width()];
        re[0] = k0.re;
        re[1] = -k0.im;
        im[0] = k0.im;
        im[1] = k0.re;
        for (j, k) in coef.iter().enumerate() {
            if self.real {
                re[2 + j] = k.re;
                im[2 + j] = k.im;
            } else {
                re[2 + 2 * j] = k.re;
                re[3 + 2 * j] = -k.im;
                im[2 + 2 * j] = k.im;
                im[3 + 2 * j] = k.re;
            }
        }
        [re, im]
    }

    fn unpack(&self, x: &DVector<f64>) -> (C64, Vec<C64>) {
        let c0 = C64::new(x[0], x[1]);
        let cs = (0..self.n)
            .map(|j| if self.real { C64::new(x[2 + j], 0.0) } else { C64::new(x[2 + 2 * j], x[3 + 2 * j]) })
            .collect();
        (c0, cs)
    }
}

fn solve_fit(
    psi_vals: &[C64],
    smp: &Samples,
    poles: &[C64],
    d: &DomainModel,
    cfg: &FitConfig,
    tail: &[C64],
) -> Result<SimpleFit> {
    let lay = Layout { n: poles.len(), real: cfg.real_coefficients };
    let mut a_rows = vec![];
    let mut b = vec![];
    for ((z, v), w) in smp.z.iter().zip(psi_vals).zip(&smp.w) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            continue;
        }
        let coef: Vec<C64> = poles.iter().map(|a| *w / (z - a)).collect();
        let [re, im] = lay.rows(C64::new(*w, 0.0), &coef);
        a_rows.push(re);
        a_rows.push(im);
        b.push(w * v.re);
        b.push(w * v.im);
    }
    let m = b.len();
    if m < lay.width() {
        return Err(Error::InvalidInput("too few usable samples".into()));
    }
    let a = DMatrix::from_fn(m, lay.width(), |i, j| a_rows[i][j]);
    let b = DVector::from_vec(b);
    let mut c_rows: Vec<Vec<f64>> = vec![];
    let mut d_vals: Vec<f64> = vec![];
    match d {
        DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane => {
            // r̃ − c₀ = Σ_k (Σ_j c_j a_j^k) z^{−k−1} must match ψ's tail
            for (k, t) in tail.iter().enumerate() {
                let coef: Vec<C64> = poles.iter().map(|a| a.powu(k as u32)).collect();
                let [re, im] = lay.rows(C64::new(0.0, 0.0), &coef);
                c_rows.push(re);
                c_rows.push(im);
                d_vals.push(t.re);
                d_vals.push(t.im);
            }
        }
        DomainModel::Disk => {
            if let Some(mm) = cfg.symmetry {
                // Im[ζ^m r̃(ζ)] = 0 at enough circle points to force it identically
                let count = 4 * (poles.len() + mm as usize) + 16;
                for i in 0..count {
                    let th = 2.0 * PI * (i as f64 + 0.37) / count as f64;
                    let zeta = C64::from_polar(1.0, th);
                    if poles.iter().any(|a| (zeta - a).norm() < 1e-9) {
                        continue;
                    }
                    let zm = zeta.powu(mm);
                    let coef: Vec<C64> = poles.iter().map(|a| zm / (zeta - a)).collect();
                    let [_, im] = lay.rows(zm, &coef);
                    c_rows.push(im);
                    d_vals.push(0.0);
                }
            }
        }
        _ => unreachable!(),
    }
    let sol = if c_rows.is_empty() {
        constrained_lstsq(&a, &b, None)?
    } else {
        let c = DMatrix::from_fn(c_rows.len(), lay.width(), |i, j| c_rows[i][j]);
        let dv = DVector::from_vec(d_vals);
        constrained_lstsq(&a, &b, Some((&c, &dv)))?
    };
    let (constant, coeffs) = lay.unpack(&sol.x);
    let mut warnings = vec![];
    if sol.used_svd {
        warnings.push(format!("ill-conditioned design (condition {:.2e}); solved by SVD", sol.condition));
    }
    Ok(SimpleFit {
        poles: poles.to_vec(),
        coeffs,
        constant,
        residual: sol.residual / b.norm().max(f64::MIN_POSITIVE),
        condition: sol.condition,
        used_svd: sol.used_svd,
        constraint_residual: sol.constraint_residual,
        warnings,
    })
}

/// Coefficients of `ψ − ψ(∞)` in `z^{−1}, …, z^{−k}`, or `None` when `ψ`
/// cannot be evaluated on a large circle.
fn tail_at_infinity(psi: &Holo, k: usize) -> Option<Vec<C64>> {
    let r = 4.0 * (1.0 + psi.singularity_radius());
    let m = psi.laurent_at_infinity(k + 1, r);
    m.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then(|| m[1..].to_vec())
}

/// The same tail for `ψ = ∫φ`, read off `φ = Σ m_j z^{−j}`: the
/// coefficient of `z^{−k}` is `−m_{k+1}/k`.
fn integral_tail(phi: &Holo, k: usize) -> Vec<C64> {
    let r = 4.0 * (1.0 + phi.singularity_radius());
    let m = phi.laurent_at_infinity(k + 2, r);
    (1..=k).map(|j| -m[j + 1] / j as f64).collect()
}

/// Least-squares fit of `c₀ + Σ c_j/(z − a_j)` with poles on `∂d`. On the
/// half-planes the first `p` coefficients of `ψ` at ∞ are matched exactly.
pub fn fit_simple_poles(psi: &Holo, d: &DomainModel, cfg: &FitConfig) -> Result<SimpleFit> {
    let p = cfg.weight_exponent.saturating_sub(1) as usize;
    match d {
        DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane => match tail_at_infinity(psi, p) {
            Some(t) => fit_with_tail(psi, d, cfg, &t),
            None => {
                let mut fit = fit_with_tail(psi, d, cfg, &[])?;
                fit.warnings.push("ψ is not evaluable near ∞; moment constraints dropped".into());
                Ok(fit)
            }
        },
        _ => fit_with_tail(psi, d, cfg, &[]),
    }
}

/// Fit to `I_φ`, taking the moment constraints from `φ` itself.
pub fn fit_integral(phi: &Holo, d: &DomainModel, cfg: &FitConfig) -> Result<SimpleFit> {
    let psi = antiderivative(phi, d)?;
    let tail = match d {
        DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane => integral_tail(phi, cfg.weight_exponent.saturating_sub(1) as usize),
        _ => vec![],
    };
    fit_with_tail(&psi, d, cfg, &tail)
}

fn fit_with_tail(psi: &Holo, d: &DomainModel, cfg: &FitConfig, tail: &[C64]) -> Result<SimpleFit> {
    cfg.validate()?;
    let (xc, l0) = frame(psi, d);
    let l = cfg.scale.unwrap_or(l0);
    let p = cfg.weight_exponent - 1;
    let smp = samples(d, cfg.sample_count, p, xc, l)?;
    let vals: Vec<C64> = smp.z.iter().map(|z| psi.eval(*z)).collect();
    if cfg.pole_placement != PolePlacement::Adaptive {
        let poles = placement(d, cfg.pole_placement, cfg.n, xc, l);
        return solve_fit(&vals, &smp, &poles, d, cfg, tail);
    }
    let mut poles = placement(d, PolePlacement::Cayley, cfg.n.div_ceil(2), xc, l);
    loop {
        let fit = solve_fit(&vals, &smp, &poles, d, cfg, tail)?;
        if poles.len() >= cfg.n {
            return Ok(fit);
        }
        let mut order: Vec<usize> = (0..smp.z.len()).filter(|&i| vals[i].re.is_finite()).collect();
        let res = |i: usize| smp.w[i] * (fit.eval(smp.z[i]) - vals[i]).norm();
        order.sort_by(|&i, &j| res(j).total_cmp(&res(i)));
        let min_gap = 1e-3 * l;
        let next = order
            .iter()
            .map(|&i| {
                let z = smp.z[i];
                match d {
                    DomainModel::Disk => z / z.norm(),
                    _ => C64::new(z.re, 0.0),
                }
            })
            .find(|a| poles.iter().all(|b| (a - b).norm() > min_gap));
        match next {
            Some(a) => poles.push(a),
            None => return Ok(fit),
        }
    }
}

/// `c/(z − a) ↦ −c/(z − a)²`.
pub fn differentiate_fit(fit: &SimpleFit, d: &DomainModel) -> Result<RationalQD> {
    let terms: Vec<PoleTerm> = fit
        .poles
        .iter()
        .zip(&fit.coeffs)
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(a, c)| PoleTerm { a: *a, c: -c, cp: C64::new(0.0, 0.0) })
        .collect();
    if terms.is_empty() {
        return Ok(RationalQD::zero(d.clone()));
    }
    RationalQD::new(terms, d.clone())
}

/// `ψ(z) = −((2p − 1)/π) ∬_{ℍ*} (ζ − ζ̄)^{2p−2} ψ(ζ̄) / (ζ − z)^{2p} dξ dη`
/// for `ψ` holomorphic on ℍ and `z ∈ ℍ`.
pub fn reproducing_apply(psi: &Holo, p: u32, z: ComplexValue) -> Result<ComplexValue> {
    let z = z.finite().filter(|z| z.im > 0.0).ok_or_else(|| Error::OutsideDomain(z))?;
    if p < 2 {
        return Err(Error::InvalidInput("p must be at least 2".into()));
    }
    let k = 2 * p as i32;
    // ζ = w̄ with w ∈ ℍ: ζ − ζ̄ = −2i·Im w
    let f = |w: C64| {
        let v = psi.eval(w);
        if v == C64::new(0.0, 0.0) {
            return v;
        }
        C64::new(0.0, -2.0 * w.im).powi(k - 2) * v / (w.conj() - z).powi(k)
    };
    let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-10, max_cells: 80_000, ..Default::default() };
    let q = integrate_upper(&f, z.re, z.im, &opts);
    if !(q.value.re.is_finite() && q.value.im.is_finite()) || !(q.converged || q.error <= 1e-8 * (1.0 + q.value.norm())) {
        return Err(Error::Divergent(format!("reproducing integral error {:.2e}", q.error)));
    }
    Ok(ComplexValue::Finite(-(2.0 * p as f64 - 1.0) / PI * q.value))
}

/// `r − φ`, with the far field near ∞ summed from Laurent moments so that
/// the cancellation of the leading terms is not swamped by rounding. Moments
/// up to `z^{−(p+1)}` that agree to `1e-10` (the fitted constraints) are
/// treated as equal; any larger mismatch is kept.
fn error_function(r: &RationalQD, phi: &Holo, p: usize) -> Holo {
    const K: usize = 16;
    let rad = 4.0 * (1.0 + phi.singularity_radius());
    let m = phi.laurent_at_infinity(K + 2, rad);
    let mut delta: Vec<C64> = (2..K + 2)
        .map(|k| {
            let rk = r.terms.iter().fold(C64::new(0.0, 0.0), |acc, t| {
                acc + t.c * (k as f64 - 1.0) * t.a.powu(k as u32 - 2) + t.cp * t.a.powu(k as u32 - 1)
            });
            rk - m[k]
        })
        .collect();
    for (j, dk) in delta.iter_mut().enumerate().take(p) {
        if dk.norm() <= 1e-10 * (1.0 + m[j + 2].norm()) {
            *dk = C64::new(0.0, 0.0);
        }
    }
    let reach = r.terms.iter().map(|t| t.a.norm()).fold(rad, f64::max);
    let s0 = 0.05 / reach;
    let (rh, ph) = (r.to_holo(), phi.clone());
    let (rh2, ph2) = (rh.clone(), ph.clone());
    let sing = r.terms.iter().map(|t| ComplexValue::Finite(t.a)).chain(phi.singularities.iter().copied()).collect();
    Holo::new(format!("{}-{}", rh.label, ph.label), move |z| rh.eval(z) - ph.eval(z))
        .with_far_field(move |s| {
            if s.norm() < s0 {
                delta.iter().rev().fold(C64::new(0.0, 0.0), |acc, d| acc * s + d)
            } else {
                rh2.far_field(s) - ph2.far_field(s)
            }
        })
        .with_singularities(sing)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub bp1_error: f64,
    pub residual: f64,
    pub condition_estimate: f64,
    /// Where the weighted error peaks.
    pub argmax: ComplexValue,
    /// `[ε, ‖r − φ‖_{B_{p+ε}}]` pairs.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub exploratory: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub strictly_decreasing: bool,
    /// Set when the error fails to decrease over the last three `n`.
    pub failure: Option<String>,
    pub warnings: Vec<String>,
    /// In real mode: every pole and coefficient real.
    pub reality_check: Option<bool>,
}

impl ConvergenceReport {
    pub const CSV_HEADER: &'static str = "n,bp1_error,residual,condition_estimate";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            s.push_str(&format!("{},{:e},{:e},{:e}\n", r.n, r.bp1_error, r.residual, r.condition_estimate));
        }
        s
    }
}

/// Integrate, fit, differentiate and measure `‖r_n − φ‖_{B_{p+1}(d)}` for
/// each `n`.
pub fn convergence_report(phi: &Holo, d: &DomainModel, p: u32, schedule: &[usize], base: &FitConfig) -> Result<ConvergenceReport> {
    convergence_report_eps(phi, d, p, schedule, base, &[])
}

/// As [`convergence_report`], also charting the error in `B_{p+ε}` for each
/// `ε` (exploratory, no acceptance claim).
pub fn convergence_report_eps(
    phi: &Holo,
    d: &DomainModel,
    p: u32,
    schedule: &[usize],
    base: &FitConfig,
    eps: &[f64],
) -> Result<ConvergenceReport> {
    let mut rows = vec![];
    let mut warnings = vec![];
    let mut real_ok = true;
    let mut prev_residual = f64::INFINITY;
    for &n in schedule {
        let cfg = FitConfig { n, weight_exponent: p + 1, sample_count: base.sample_count.max(10 * n), ..base.clone() };
        let fit = fit_integral(phi, d, &cfg)?;
        warnings.extend(fit.warnings.iter().map(|w| format!("n = {n}: {w}")));
        if fit.residual > prev_residual {
            warnings.push(format!("n = {n}: residual {:.3e} increased from {:.3e}", fit.residual, prev_residual));
        }
        prev_residual = fit.residual;
        let r = differentiate_fit(&fit, d)?;
        if cfg.real_coefficients {
            real_ok &= r.terms.iter().all(|t| t.a.im == 0.0 && t.c.im == 0.0 && t.cp == C64::new(0.0, 0.0));
        }
        let diff = error_function(&r, phi, p as usize);
        let err = weighted_sup(&diff, d, (p + 1) as f64, &MaxOptions::default());
        let exploratory = eps.iter().map(|&e| [e, weighted_sup(&diff, d, p as f64 + e, &MaxOptions::default()).value]).collect();
        rows.push(ConvergenceRow {
            n,
            bp1_error: err.value,
            residual: fit.residual,
            condition_estimate: fit.condition,
            argmax: err.argmax,
            exploratory,
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].bp1_error < w[0].bp1_error);
    let failure = if rows.len() >= 3 {
        let t = &rows[rows.len() - 3..];
        if !(t[1].bp1_error < t[0].bp1_error && t[2].bp1_error < t[1].bp1_error) {
            Some(format!(
                "B_{} error not decreasing over n = {}, {}, {}: {:.3e}, {:.3e}, {:.3e}; residuals {:.3e}, {:.3e}, {:.3e}",
                p + 1, t[0].n, t[1].n, t[2].n, t[0].bp1_error, t[1].bp1_error, t[2].bp1_error, t[0].residual, t[1].residual, t[2].residual
            ))
        } else {
            None
        }
    } else {
        None
    };
    Ok(ConvergenceReport {
        rows,
        strictly_decreasing,
        failure,
        warnings,
        reality_check: base.real_coefficients.then_some(real_ok),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::NamedFunction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn shifted(k: u32) -> Holo {
        NamedFunction::ShiftedPower { k, b: 1.0, x0: 0.0, scale: 1.0 }.build().unwrap()
    }

    #[test]
    fn integrals_against_antiderivatives() {
        let h = DomainModel::UpperHalfPlane;
        let i = ComplexValue::Finite(c(0.0, 1.0));
        assert_eq!(integrate_phi(&Holo::zero(), &h, i).unwrap(), ComplexValue::Finite(c(0.0, 0.0)));
        let sq = Holo::new("3(z+i)^2", |z: C64| 3.0 * (z + c(0.0, 1.0)).powi(2));
        let v = integrate_phi(&sq, &h, i).unwrap().finite().unwrap();
        assert!((v - c(0.0, -7.0)).norm() < 1e-12, "{v}");
        let cube = shifted(3);
        let v = integrate_phi(&cube, &h, i).unwrap().finite().unwrap();
        assert!((v - c(-0.375, 0.0)).norm() < 1e-12, "{v}");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0));
            let v = integrate_phi(&shifted(2), &h, ComplexValue::Finite(z)).unwrap().finite().unwrap();
            let want = -1.0 / (z + c(0.0, 1.0)) + 1.0 / c(0.0, 1.0);
            assert!((v - want).norm() < 1e-11);
        }
    }

    #[test]
    fn exact_simple_pole_rationals_are_reproduced() {
        let poles = placement(&DomainModel::UpperHalfPlane, PolePlacement::Cayley, 8, 0.0, 1.0);
        let (a1, a2) = (poles[2], poles[5]);
        // Σc = 0 keeps ψ = O(1/z²) so that the tail constraints are consistent
        let psi = Holo::new("exact", move |z: C64| 0.7 / (z - a1) - 0.7 / (z - a2) + c(0.2, 0.1))
            .with_singularities(vec![ComplexValue::Finite(a1), ComplexValue::Finite(a2)]);
        let mut cfg = FitConfig::new(8, 2);
        cfg.scale = Some(1.0);
        let fit = fit_simple_poles(&psi, &DomainModel::UpperHalfPlane, &cfg).unwrap();
        assert!(fit.residual < 1e-10, "{}", fit.residual);
    }

    #[test]
    fn nested_pole_sets_reduce_the_residual() {
        let h = DomainModel::UpperHalfPlane;
        let r8 = fit_integral(&shifted(3), &h, &FitConfig::new(8, 2)).unwrap();
        let r32 = fit_integral(&shifted(3), &h, &FitConfig::new(32, 2)).unwrap();
        assert!(r32.residual < r8.residual, "{} vs {}", r32.residual, r8.residual);
    }

    #[test]
    fn disk_symmetry_constraint_holds_identically() {
        let psi = Holo::new("1/(z-1.5)", |z: C64| (z - 1.5).inv());
        let mut cfg = FitConfig::new(16, 2);
        cfg.symmetry = Some(2);
        let fit = fit_simple_poles(&psi, &DomainModel::Disk, &cfg).unwrap();
        let scale = fit.coeffs.iter().map(|c| c.norm()).sum::<f64>().max(1.0);
        let mut worst: f64 = 0.0;
        for i in 0..500 {
            let zeta = C64::from_polar(1.0, 2.0 * PI * (i as f64 + 0.123) / 500.0);
            let v = zeta * zeta * fit.eval(zeta);
            let gap = fit.poles.iter().map(|a| (zeta - a).norm()).fold(f64::INFINITY, f64::min);
            worst = worst.max(v.im.abs() * gap);
        }
        assert!(worst < 1e-8 * scale, "{worst}");
    }

    #[test]
    fn differentiation_is_termwise() {
        let fit = SimpleFit {
            poles: vec![c(1.0, 0.0), c(-2.0, 0.0)],
            coeffs: vec![c(1.0, 0.0), c(0.3, -0.2)],
            constant: c(5.0, 0.0),
            residual: 0.0,
            condition: 1.0,
            used_svd: false,
            constraint_residual: 0.0,
            warnings: vec![],
        };
        let r = differentiate_fit(&fit, &DomainModel::UpperHalfPlane).unwrap();
        assert_eq!(r.terms[0].c, c(-1.0, 0.0));
        let h = r.to_holo();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.2..3.0));
            let e = 1e-4;
            let fd = (fit.eval(z + e) - fit.eval(z - e)) / (2.0 * e);
            let fd2 = (fit.eval(z + e / 2.0) - fit.eval(z - e / 2.0)) / e;
            let rich = (4.0 * fd2 - fd) / 3.0;
            assert!((h.eval(z) - rich).norm() < 1e-8 * h.eval(z).norm());
        }
    }

    #[test]
    fn reproducing_formula_closed_forms() {
        let i = ComplexValue::Finite(c(0.0, 1.0));
        let v = reproducing_apply(&shifted(2), 2, i).unwrap().finite().unwrap();
        assert!((v - c(-0.25, 0.0)).norm() < 1e-4 * 1.25, "{v}");
        let psi = NamedFunction::ShiftedPower { k: 3, b: 2.0, x0: 0.0, scale: 1.0 }.build().unwrap();
        let v = reproducing_apply(&psi, 3, i).unwrap().finite().unwrap();
        let want = c(0.0, 3.0).powi(-3);
        assert!((v - want).norm() < 1e-4 * (1.0 + want.norm()), "{v} vs {want}");
        assert_eq!(reproducing_apply(&Holo::zero(), 2, i).unwrap(), ComplexValue::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn convergence_of_the_harness() {
        let h = DomainModel::UpperHalfPlane;
        let sched = [4, 8, 16, 32, 64];
        let r = convergence_report(&shifted(2), &h, 2, &sched, &FitConfig::new(4, 2)).unwrap();
        assert!(r.strictly_decreasing && r.failure.is_none(), "{}", r.to_csv());
        assert!(r.rows.last().unwrap().bp1_error < 1e-2);
        let z = convergence_report(&Holo::zero(), &h, 2, &sched, &FitConfig::new(4, 2)).unwrap();
        assert!(z.rows.iter().all(|r| r.bp1_error == 0.0));
    }

    #[test]
    fn real_mode_is_real_and_meets_the_moment_obstruction() {
        let h = DomainModel::UpperHalfPlane;
        let mut cfg = FitConfig::new(4, 2);
        cfg.real_coefficients = true;
        let r = convergence_report(&shifted(2), &h, 2, &[8, 16], &cfg).unwrap();
        assert_eq!(r.reality_check, Some(true));
        // the z⁻³ coefficient of φ is −2i; real approximants keep it real,
        // so the B₃ distance is at least 8·2
        for row in &r.rows {
            assert!((row.bp1_error - 16.0).abs() < 1e-4 * 16.0, "{}", row.bp1_error);
        }
        let r3 = convergence_report(&shifted(3), &h, 2, &[8, 16, 32], &cfg).unwrap();
        assert!(r3.strictly_decreasing);
    }
}
