//! Beltrami coefficients: the harmonic coefficient of a small Schwarzian,
//! pairings with integrable quadratic differentials, pullbacks, and the
//! degenerating sequence on the half-strip.

use crate::domains::{halfstrip_map, DomainKind, DomainModel, HalfStripMap};
use crate::error::{Error, Result};
use crate::holo::Holo;
use crate::maps::AnalyticMap;
use crate::maximize::{maximize_upper, MaxOptions};
use crate::point::{ChartPoint, ComplexValue};
use crate::quadrature::{integrate_disk, integrate_halfstrip, integrate_upper, QuadEstimate, QuadOptions};
use crate::rational::{bp_norm, bulk_frame, chart_hints, chart_to_domain, NormResult};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

type FieldFn = Arc<dyn Fn(ChartPoint) -> C64 + Send + Sync>;

#[derive(Clone)]
pub struct BeltramiField {
    f: FieldFn,
    pub domain: DomainModel,
    pub sup_norm: NormResult,
    /// Boundary points where the field is expected to concentrate.
    pub hints: Vec<ComplexValue>,
    pub label: String,
}

impl std::fmt::Debug for BeltramiField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BeltramiField({}, {}, ‖μ‖ = {})", self.label, self.domain.name(), self.sup_norm.value)
    }
}

fn exact_norm(value: f64) -> NormResult {
    NormResult { value, argmax: ComplexValue::Infinity, grid_level: 0, converged: true }
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `conj(v)/|v|`, taken as 0 where `v` vanishes (a null set).
fn unit_conj(v: C64) -> C64 {
    let n = v.norm();
    if n == 0.0 {
        zero()
    } else {
        v.conj() / n
    }
}

/// Chart point of the domain reached from a chart point of ℍ through the
/// domain's parametrization.
fn param_chart(d: &DomainModel, g: &AnalyticMap, pt: ChartPoint) -> ChartPoint {
    match (d, pt) {
        (DomainModel::UpperHalfPlane, p) => p,
        (DomainModel::LowerHalfPlane, ChartPoint::Plane(z)) => ChartPoint::Plane(-z),
        (DomainModel::LowerHalfPlane, ChartPoint::Inverted(s)) => ChartPoint::Inverted(-s),
        (_, p) => {
            let z = match p {
                ChartPoint::Plane(z) => z,
                ChartPoint::Inverted(s) => s.inv(),
            };
            match g.value(z) {
                Ok(w) => ChartPoint::Plane(w).balanced(),
                Err(_) => ChartPoint::Plane(C64::new(f64::NAN, f64::NAN)),
            }
        }
    }
}

impl BeltramiField {
    /// A field with a known sup norm; norms above 1 are rejected.
    pub fn new(
        label: impl Into<String>,
        domain: DomainModel,
        sup_norm: NormResult,
        f: impl Fn(ChartPoint) -> C64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(sup_norm.value <= 1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!("Beltrami coefficient has sup norm {} ≥ 1", sup_norm.value)));
        }
        Ok(BeltramiField { f: Arc::new(f), domain, sup_norm, hints: vec![ComplexValue::Infinity], label: label.into() })
    }

    /// A field whose sup norm is found by grid maximization over the
    /// domain's ℍ-parametrization.
    pub fn estimate(
        label: impl Into<String>,
        domain: DomainModel,
        hints: Vec<ComplexValue>,
        f: impl Fn(ChartPoint) -> C64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let f: FieldFn = Arc::new(f);
        let g = domain.parametrization();
        let mut chart = vec![ComplexValue::Infinity];
        for h in &hints {
            if let ComplexValue::Finite(p) = h {
                if let Ok(z) = g.inverse(*p) {
                    if z.re.is_finite() && z.norm() < 1e12 {
                        chart.push(ComplexValue::Finite(C64::new(z.re, 0.0)));
                    }
                }
            }
        }
        let (xc, s) = bulk_frame(&chart);
        let m = |pt: ChartPoint| f(param_chart(&domain, &g, pt)).norm();
        let r = maximize_upper(&m, &chart, xc, s, &MaxOptions::default());
        let sup = NormResult { value: r.value, argmax: chart_to_domain(&domain, r.argmax), grid_level: r.level, converged: r.converged };
        if !(sup.value <= 1.0 + 1e-12) {
            return Err(Error::InvalidInput(format!("Beltrami coefficient has sup norm {} ≥ 1", sup.value)));
        }
        Ok(BeltramiField { f, domain, sup_norm: sup, hints, label: label.into() })
    }

    pub fn zero(domain: DomainModel) -> Self {
        BeltramiField::new("0", domain, exact_norm(0.0), |_| zero()).unwrap()
    }

    pub fn constant(domain: DomainModel, k: C64) -> Result<Self> {
        BeltramiField::new(format!("const {k}"), domain, exact_norm(k.norm()), move |_| k)
    }

    /// `k·|ψ|/ψ`, i.e. `k·conj(ψ)/|ψ|`.
    pub fn teichmuller(domain: DomainModel, k: f64, psi: Holo) -> Result<Self> {
        let label = format!("{k}|{0}|/{0}", psi.label);
        BeltramiField::new(label, domain, exact_norm(k.abs()), move |pt| match pt {
            ChartPoint::Plane(z) => unit_conj(psi.eval(z)) * k,
            // the phase of ψ(1/s) is the phase of s²·(z²ψ)(s)
            ChartPoint::Inverted(s) => {
                let us = unit_conj(s);
                us * us * unit_conj(psi.far_field(s)) * k
            }
        })
    }

    pub fn with_hints(mut self, hints: Vec<ComplexValue>) -> Self {
        self.hints = hints;
        self
    }

    pub fn eval(&self, pt: ChartPoint) -> C64 {
        (self.f)(pt)
    }

    pub fn at(&self, z: C64) -> C64 {
        (self.f)(ChartPoint::Plane(z))
    }

    pub fn try_eval(&self, pt: ChartPoint) -> Result<C64> {
        let v = self.eval(pt);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::CriticalPoint(pt.to_value()))
        }
    }

    /// `μ/‖μ‖_∞`.
    pub fn normalized(&self) -> Result<BeltramiField> {
        let k = self.sup_norm.value;
        if k == 0.0 {
            return Err(Error::InvalidInput("cannot normalize the zero coefficient".into()));
        }
        let f = self.f.clone();
        let mut out = BeltramiField::new(format!("{}/‖·‖", self.label), self.domain.clone(), NormResult { value: 1.0, ..self.sup_norm }, move |p| f(p) / k)?;
        out.hints = self.hints.clone();
        Ok(out)
    }
}

/// `μ(z) = −2y²φ(z̄)` on ℍ*. The sup norm is computed on its own grid and
/// checked against `½‖φ‖_{B₂(ℍ)}`.
pub fn harmonic_beltrami(phi: &Holo) -> Result<BeltramiField> {
    let bp = bp_norm(phi, &DomainModel::UpperHalfPlane, 2)?;
    if !(bp.value < 0.5) {
        return Err(Error::Gate(format!("‖φ‖_B₂ = {} is not below 1/2", bp.value)));
    }
    let ph = phi.clone();
    let f = move |pt: ChartPoint| match pt {
        ChartPoint::Plane(z) => -2.0 * z.im * z.im * ph.eval(z.conj()),
        ChartPoint::Inverted(s) => {
            if s.norm() == 0.0 {
                return zero();
            }
            // (Im s)²/s² from the unit vector, which cannot underflow
            let r = s.norm();
            let u = s.conj() / r;
            -2.0 * (s.im / r).powi(2) * u * u * ph.far_field(s.conj())
        }
    };
    let hints = chart_hints(phi, &DomainModel::UpperHalfPlane);
    let (xc, s) = bulk_frame(&hints);
    let modulus = |pt: ChartPoint| f(pt.conj()).norm();
    let r = maximize_upper(&modulus, &hints, xc, s, &MaxOptions::default());
    let sup = NormResult {
        value: r.value,
        argmax: chart_to_domain(&DomainModel::UpperHalfPlane, r.argmax.conj()),
        grid_level: r.level,
        converged: r.converged,
    };
    let half = 0.5 * bp.value;
    if (sup.value - half).abs() > 1e-6 * half.max(1e-300) && !(sup.value == 0.0 && half == 0.0) {
        return Err(Error::Invariant {
            message: format!("‖μ‖_∞ = {} differs from ½‖φ‖_B₂ = {half}", sup.value),
            witness: sup.argmax,
        });
    }
    let mut out = BeltramiField::new(format!("harmonic({})", phi.label), DomainModel::LowerHalfPlane, sup, f)?;
    out.hints = phi.singularities.clone();
    out.hints.push(ComplexValue::Infinity);
    Ok(out)
}

/// Transfer across the real axis: `ν(z) = conj(μ(z̄))` is the coefficient of
/// `z ↦ conj(w(z̄))`.
pub fn reflect(mu: &BeltramiField) -> Result<BeltramiField> {
    let target = match mu.domain {
        DomainModel::UpperHalfPlane => DomainModel::LowerHalfPlane,
        DomainModel::LowerHalfPlane => DomainModel::UpperHalfPlane,
        _ => return Err(Error::InvalidInput("reflection is implemented for half-planes only".into())),
    };
    let f = mu.f.clone();
    let mut sup = mu.sup_norm;
    if let ComplexValue::Finite(z) = sup.argmax {
        sup.argmax = ComplexValue::Finite(z.conj());
    }
    let mut out = BeltramiField::new(format!("reflect({})", mu.label), target, sup, move |p| f(p.conj()).conj())?;
    out.hints = mu.hints.clone();
    Ok(out)
}

pub fn dilatation(mu: &BeltramiField) -> f64 {
    mu.sup_norm.value
}

fn quad_opts() -> QuadOptions {
    QuadOptions { abs_tol: 1e-13, rel_tol: 1e-10, max_cells: 60_000, ..Default::default() }
}

/// Accepts a quadrature that met its tolerance or whose error estimate is
/// below `accept`.
fn finish(q: QuadEstimate, what: &str, accept: f64) -> Result<C64> {
    if !(q.value.re.is_finite() && q.value.im.is_finite()) {
        return Err(Error::Divergent(format!("{what}: non-finite integrand")));
    }
    if !q.converged && !(q.error <= accept) {
        return Err(Error::Divergent(format!("{what}: quadrature did not converge (error {:.2e} after {} cells)", q.error, q.cells)));
    }
    Ok(q.value)
}

fn pairing_in_frame(mu: &BeltramiField, psi: &dyn Fn(C64) -> C64, xc: f64, s: f64) -> Result<C64> {
    let opts = quad_opts();
    let q = match mu.domain {
        DomainModel::UpperHalfPlane => integrate_upper(&|z| mu.at(z) * psi(z), xc, s, &opts),
        DomainModel::LowerHalfPlane => integrate_upper(&|z| mu.at(z.conj()) * psi(z.conj()), xc, s, &opts),
        DomainModel::Disk => integrate_disk(&|z| mu.at(z) * psi(z), &opts),
        DomainModel::HalfStrip => integrate_halfstrip(&|z| mu.at(z) * psi(z), 60.0, &opts),
        _ => return Err(Error::InvalidInput(format!("pairing is not implemented on {}", mu.domain.name()))),
    };
    finish(q, "pairing", 1e-10)
}

/// `⟨μ, ψ⟩ = ∬_d μψ dx dy`.
pub fn pairing(mu: &BeltramiField, psi: &Holo, d: &DomainModel) -> Result<C64> {
    if d.kind() != mu.domain.kind() {
        return Err(Error::InvalidInput(format!("field lives on {}, not {}", mu.domain.name(), d.name())));
    }
    let pts: Vec<ComplexValue> = psi.singularities.iter().chain(&mu.hints).map(|p| match p {
        ComplexValue::Finite(z) => ComplexValue::Finite(C64::new(z.re, 0.0)),
        ComplexValue::Infinity => ComplexValue::Infinity,
    }).collect();
    let (xc, s) = bulk_frame(&pts);
    pairing_in_frame(mu, &|z| psi.eval(z), xc, s)
}

/// `ω_m(ζ) = (1/m)e^{−ζ/m}` on Π₊.
pub fn degenerating_sequence(m: u32) -> Result<Holo> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be at least 1".into()));
    }
    let mf = m as f64;
    Ok(Holo::new(format!("omega_{m}"), move |z| (-z / mf).exp() / mf).with_singularities(vec![ComplexValue::Infinity]))
}

/// `⟨μ, ω_m⟩` on Π₊ over `ξ ≤ max(30, 30m)`; the remainder is bounded by
/// `‖μ‖_∞·e^{−ξ_max/m}` and added to the error.
pub fn pairing_omega(mu: &BeltramiField, m: u32) -> Result<(C64, f64)> {
    if mu.domain.kind() != DomainKind::HalfStrip {
        return Err(Error::InvalidInput("the degenerating sequence lives on the half-strip".into()));
    }
    let w = degenerating_sequence(m)?;
    let xi_max = 30.0 * (m.max(1) as f64);
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-9, max_cells: 120_000, ..Default::default() };
    let q = integrate_halfstrip(&|z| mu.at(z) * w.eval(z), xi_max, &opts);
    let tail = mu.sup_norm.value * (-xi_max / m as f64).exp();
    let v = finish(q, "pairing with ω_m", 1e-9)?;
    Ok((v, q.error + tail))
}

fn domain_of_kind(k: DomainKind) -> Result<DomainModel> {
    Ok(match k {
        DomainKind::UpperHalfPlane => DomainModel::UpperHalfPlane,
        DomainKind::LowerHalfPlane => DomainModel::LowerHalfPlane,
        DomainKind::Disk => DomainModel::Disk,
        DomainKind::ExteriorDisk => DomainModel::ExteriorDisk,
        DomainKind::HalfStrip => DomainModel::HalfStrip,
        other => return Err(Error::InvalidInput(format!("no canonical domain for {other:?}"))),
    })
}

/// `(μ∘g)·conj(g′)/g′` on the domain of `g`.
pub fn pullback_beltrami(mu: &BeltramiField, g: &AnalyticMap) -> Result<BeltramiField> {
    if g.codomain != mu.domain.kind() {
        return Err(Error::InvalidInput(format!("map lands in {:?}, field lives on {}", g.codomain, mu.domain.name())));
    }
    let domain = domain_of_kind(g.domain)?;
    let f = mu.f.clone();
    let g2 = g.clone();
    let mut out = BeltramiField::new(format!("pullback({})", mu.label), domain, mu.sup_norm, move |pt| {
        let z = match pt {
            ChartPoint::Plane(z) => z,
            ChartPoint::Inverted(s) => s.inv(),
        };
        match g2.jet(z) {
            Ok(j) if j.d1.norm() > 0.0 => f(ChartPoint::Plane(j.value).balanced()) * j.d1.conj() / j.d1,
            _ => C64::new(f64::NAN, f64::NAN),
        }
    })?;
    out.sup_norm.argmax = ComplexValue::Infinity;
    out.hints = vec![ComplexValue::Infinity];
    Ok(out)
}

/// Pullback to Π₊ through a half-strip map onto ℍ, or its negative onto ℍ*.
pub fn pullback_halfstrip(mu: &BeltramiField, h: &HalfStripMap) -> Result<BeltramiField> {
    let flip = match mu.domain {
        DomainModel::UpperHalfPlane => false,
        DomainModel::LowerHalfPlane => true,
        _ => return Err(Error::InvalidInput("half-strip pullback needs a half-plane field".into())),
    };
    let f = mu.f.clone();
    let h2 = h.clone();
    let mut out = BeltramiField::new(format!("pullback({})", mu.label), DomainModel::HalfStrip, mu.sup_norm, move |pt| {
        let zeta = match pt {
            ChartPoint::Plane(z) => z,
            ChartPoint::Inverted(s) => s.inv(),
        };
        let w = match (h2.image(zeta), flip) {
            (p, false) => p,
            (ChartPoint::Plane(z), true) => ChartPoint::Plane(-z),
            (ChartPoint::Inverted(s), true) => ChartPoint::Inverted(-s),
        };
        f(w) * h2.derivative_phase(zeta)
    })?;
    out.sup_norm.argmax = ComplexValue::Infinity;
    out.hints = vec![ComplexValue::Infinity];
    Ok(out)
}

/// Half-strip chart concentrating at the boundary point `a0` of a
/// half-plane, with the corners placed to its left.
pub fn halfstrip_at(d: &DomainModel, a0: ComplexValue) -> Result<HalfStripMap> {
    let flip = match d {
        DomainModel::UpperHalfPlane => false,
        DomainModel::LowerHalfPlane => true,
        _ => return Err(Error::InvalidInput("half-strip charts are built on half-planes".into())),
    };
    match a0 {
        ComplexValue::Infinity => halfstrip_map(-1.0, 1.0, ComplexValue::Infinity),
        ComplexValue::Finite(a) => {
            let a = if flip { -a.re } else { a.re };
            halfstrip_map(a - 2.0, a - 1.0, ComplexValue::Finite(C64::new(a, 0.0)))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenReport {
    pub m: Vec<u32>,
    pub pairing_modulus: Vec<f64>,
    pub errors: Vec<f64>,
    /// Richardson extrapolation in `1/m` from the last two entries when they
    /// are a doubling, otherwise the last entry.
    pub limit: f64,
}

pub fn degen_pairing_limit(mu_star: &BeltramiField, schedule: &[u32]) -> Result<DegenReport> {
    if !(mu_star.sup_norm.value <= 1.0 + 1e-9) {
        return Err(Error::InvalidInput("μ* must have sup norm at most 1".into()));
    }
    let mut mods = vec![];
    let mut errs = vec![];
    for &m in schedule {
        let (v, e) = pairing_omega(mu_star, m)?;
        mods.push(v.norm());
        errs.push(e);
    }
    let n = mods.len();
    let limit = match n {
        0 => 0.0,
        1 => mods[0],
        _ if schedule[n - 1] == 2 * schedule[n - 2] => 2.0 * mods[n - 1] - mods[n - 2],
        _ => mods[n - 1],
    };
    Ok(DegenReport { m: schedule.to_vec(), pairing_modulus: mods, errors: errs, limit })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HkrsReport {
    pub estimate: f64,
    pub sup_norm: f64,
    pub ratio: f64,
    pub basis_size: usize,
    pub best: String,
    /// Candidates whose pairing quadrature could not be certified.
    pub skipped: Vec<String>,
}

enum TestDifferential {
    /// `ω_m` pushed forward from a half-strip chart at `a0`.
    Exponential { a0: ComplexValue, m: u32 },
    /// `1/(z − a)⁴`, `a` reflected across the boundary.
    Square { a: C64 },
    /// `1/((z − a)²(z − b)²)`, also a square.
    SquareProduct { a: C64, b: C64 },
    /// `1/((z − a)³(z − b))`, not a square.
    Mixed { a: C64, b: C64 },
}

impl TestDifferential {
    fn label(&self) -> String {
        match self {
            TestDifferential::Exponential { a0, m } => format!("omega_{m}@{a0}"),
            TestDifferential::Square { a } => format!("1/(z-({a}))^4"),
            TestDifferential::SquareProduct { a, b } => format!("1/((z-({a}))^2(z-({b}))^2)"),
            TestDifferential::Mixed { a, b } => format!("1/((z-({a}))^3(z-({b})))"),
        }
    }
}

/// Nested family of test differentials: the first `n` elements of a fixed
/// sequence, so enlarging `n` only adds candidates.
fn test_family(mu: &BeltramiField, n: usize, squares_only: bool) -> Vec<TestDifferential> {
    let below = matches!(mu.domain, DomainModel::UpperHalfPlane);
    let mut anchors: Vec<ComplexValue> = vec![];
    for h in mu.hints.iter().chain(std::iter::once(&mu.sup_norm.argmax)) {
        let p = match h {
            ComplexValue::Finite(z) => ComplexValue::Finite(C64::new(z.re, 0.0)),
            ComplexValue::Infinity => ComplexValue::Infinity,
        };
        if !anchors.contains(&p) {
            anchors.push(p);
        }
    }
    anchors.truncate(4);
    let mut out = vec![];
    for m in [1u32, 4, 16, 64] {
        for a0 in &anchors {
            out.push(TestDifferential::Exponential { a0: *a0, m });
        }
    }
    let pts: Vec<ComplexValue> = anchors.clone();
    let (xc, s) = bulk_frame(&pts);
    let ts = [0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5, 4.0, -4.0, 0.25, -0.25, 8.0, -8.0];
    let mut prev: Option<C64> = None;
    'levels: for level in 0..64usize {
        for (i, &t) in ts.iter().enumerate() {
            for j in -(level as i32)..=(level as i32) {
                if i.max(j.unsigned_abs() as usize) != level {
                    continue;
                }
                let h = s * 2f64.powi(j);
                let a = C64::new(xc + s * t, if below { -h } else { h });
                out.push(TestDifferential::Square { a });
                if let Some(b) = prev {
                    out.push(TestDifferential::SquareProduct { a, b });
                    if !squares_only {
                        out.push(TestDifferential::Mixed { a, b });
                    }
                }
                prev = Some(a);
                if out.len() >= n + 16 {
                    break 'levels;
                }
            }
        }
    }
    out.truncate(n);
    out
}

/// Lower bound for `sup |⟨μ, ψ⟩|` over unit-norm integrable ψ, taken over a
/// finite family of test differentials.
pub fn hkrs_extremality_estimate(mu: &BeltramiField, d: &DomainModel, basis_size: usize, squares_only: bool) -> Result<HkrsReport> {
    if d.kind() != mu.domain.kind() || !matches!(d, DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane) {
        return Err(Error::InvalidInput(format!("HKRS estimate needs the field's own half-plane, got {}", d.name())));
    }
    let k = mu.sup_norm.value;
    let mut best = (0.0, String::from("none"));
    if k == 0.0 {
        return Ok(HkrsReport { estimate: 0.0, sup_norm: 0.0, ratio: 0.0, basis_size, best: best.1, skipped: vec![] });
    }
    let family = test_family(mu, basis_size, squares_only);
    let eval = |t: &TestDifferential| -> Result<f64> {
        Ok(match t {
            TestDifferential::Exponential { a0, m } => {
                let h = halfstrip_at(d, *a0)?;
                let pulled = pullback_halfstrip(mu, &h)?;
                pairing_omega(&pulled, *m)?.0.norm()
            }
            TestDifferential::Square { a } => {
                let a = *a;
                let h = a.im.abs();
                let norm = PI / (4.0 * h * h);
                pairing_in_frame(mu, &|z| (z - a).powi(-4), a.re, h)?.norm() / norm
            }
            TestDifferential::SquareProduct { a, b } | TestDifferential::Mixed { a, b } => {
                let (a, b) = (*a, *b);
                let mixed = matches!(t, TestDifferential::Mixed { .. });
                let psi = move |z: C64| if mixed { ((z - a).powi(3) * (z - b)).inv() } else { ((z - a) * (z - b)).powi(-2) };
                let (xc, s) = (0.5 * (a.re + b.re), a.im.abs().min(b.im.abs()));
                let abs = BeltramiField::new("1", mu.domain.clone(), exact_norm(1.0), move |p| match p {
                    ChartPoint::Plane(z) => unit_conj(psi(z)),
                    ChartPoint::Inverted(s) => unit_conj(psi(s.inv())),
                })?;
                let norm = pairing_in_frame(&abs, &psi, xc, s)?.re;
                pairing_in_frame(mu, &psi, xc, s)?.norm() / norm
            }
        })
    };
    let values: Vec<Result<f64>> = family.par_iter().map(eval).collect();
    let mut skipped = vec![];
    for (t, v) in family.iter().zip(values) {
        match v {
            // an uncertified quadrature only drops a candidate; the maximum
            // over the rest is still a lower bound
            Err(Error::Divergent(_)) => skipped.push(t.label()),
            Err(e) => return Err(e),
            Ok(value) if value > best.0 => best = (value, t.label()),
            Ok(_) => {}
        }
    }
    Ok(HkrsReport { estimate: best.0, sup_norm: k, ratio: best.0 / k, basis_size, best: best.1, skipped })
}
