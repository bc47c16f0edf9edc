//! Schwarzian derivatives and the Schwarzian equation `S_w = φ`, solved as
//! `u″ + ½φu = 0` with `w = u₁/u₂`.

use crate::domains::{DomainKind, DomainModel};
use crate::error::{Error, Result};
use crate::holo::Holo;
use crate::maps::{AnalyticMap, Jet, MapChain};
use crate::maximize::MaxOptions;
use crate::mobius::Mobius;
use crate::ode::{integrate_segment, OdeOptions, State};
use crate::point::ComplexValue;
use crate::rational::weighted_sup;
use num_complex::Complex64 as C64;
use std::sync::{Arc, Mutex};

fn schwarzian_from_jet(j: &Jet, d3: C64) -> C64 {
    let r = j.d2 / j.d1;
    d3 / j.d1 - 1.5 * r * r
}

/// Third derivative by Richardson-extrapolated central differences of `w″`.
fn richardson_d3(d2: &dyn Fn(C64) -> Result<C64>, z: C64) -> Result<C64> {
    let h = 1e-4 * (1.0 + z.norm());
    let diff = |h: f64| -> Result<C64> { Ok((d2(z + h)? - d2(z - h)?) / (2.0 * h)) };
    let (a, b) = (diff(h)?, diff(h / 2.0)?);
    Ok((4.0 * b - a) / 3.0)
}

/// `S_w(z) = (w″/w′)′ − ½(w″/w′)²`.
pub fn schwarzian_of(w: &AnalyticMap, z: ComplexValue) -> Result<ComplexValue> {
    let z = z.finite().ok_or_else(|| Error::InvalidInput("Schwarzian at ∞ needs a chart".into()))?;
    let j = w.jet(z)?;
    if !(j.d1.norm() > 0.0) {
        return Err(Error::CriticalPoint(ComplexValue::Finite(z)));
    }
    let d3 = match j.d3 {
        Some(d3) => d3,
        None => richardson_d3(&|x| Ok(w.jet(x)?.d2), z)?,
    };
    Ok(ComplexValue::from_c64(schwarzian_from_jet(&j, d3)))
}

/// `ζ ↦ (φ∘g)(ζ)·g′(ζ)² + S_g(ζ)`; NaN where `g′` vanishes.
pub fn compose_schwarzian(phi: &Holo, g: &AnalyticMap) -> Holo {
    let (phi, g2) = (phi.clone(), g.clone());
    let mut sing = Vec::new();
    for s in &phi.singularities {
        if let Some(p) = s.finite() {
            if let Ok(z) = g.inverse(p) {
                sing.push(ComplexValue::from_c64(z));
            }
        }
    }
    Holo::new(format!("compose({})", phi.label), move |z| compose_schwarzian_at(&phi, &g2, z).unwrap_or(C64::new(f64::NAN, f64::NAN)))
        .with_singularities(sing)
}

pub fn compose_schwarzian_at(phi: &Holo, g: &AnalyticMap, z: C64) -> Result<C64> {
    let j = g.jet(z)?;
    if !(j.d1.norm() > 0.0) {
        return Err(Error::CriticalPoint(ComplexValue::Finite(z)));
    }
    let sg = schwarzian_of(g, ComplexValue::Finite(z))?.finite().unwrap_or(C64::new(f64::NAN, 0.0));
    Ok(phi.eval(j.value) * j.d1 * j.d1 + sg)
}

/// `S_g` of a chain as a function on ℍ, with its singular points recorded.
pub fn chain_schwarzian(chain: &MapChain) -> Holo {
    let ch = chain.clone();
    Holo::new("S_chain", move |z| match ch.jet(z) {
        Ok(j) => schwarzian_from_jet(&j, j.d3.unwrap_or_default()),
        Err(_) => C64::new(f64::NAN, f64::NAN),
    })
    .with_singularities(
        chain
            .schwarzian_singularities()
            .into_iter()
            .filter(|z| z.im.abs() < 1e-9)
            .map(|z| ComplexValue::Finite(C64::new(z.re, 0.0)))
            .collect(),
    )
}

/// `‖S_g‖_{B₂(ℍ)}` for a chain map `g`.
pub fn chain_schwarzian_bound(chain: &MapChain) -> Result<f64> {
    let s = chain_schwarzian(chain);
    let n = weighted_sup(&s, &DomainModel::UpperHalfPlane, 2.0, &MaxOptions::quick());
    if !n.value.is_finite() {
        return Err(Error::NotQuasidisk(n.value));
    }
    Ok(n.value)
}

/// True iff `‖φ‖_{B₂(d)} < 1/2`.
pub fn ahlfors_weill_gate(phi: &Holo, d: &DomainModel) -> Result<bool> {
    Ok(crate::rational::bp_norm(phi, d, 2)?.value < 0.5)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    None,
    /// Post-compose with the Möbius map fixing the boundary limits at 0, 1, ∞.
    FixZeroOneInfinity,
}

const CLEARANCE: f64 = 1e-3;

#[derive(Clone, Copy)]
struct Entry {
    z: C64,
    state: State,
    depth: u8,
}

struct Core {
    phi: Holo,
    domain: DomainModel,
    base: C64,
    poles: Vec<C64>,
    opts: OdeOptions,
    cache: Mutex<Vec<Entry>>,
    drift: Mutex<f64>,
}

const CACHE_LIMIT: usize = 50_000;

fn seg_distance(a: C64, b: C64, p: C64) -> f64 {
    let d = b - a;
    let t = if d.norm_sqr() == 0.0 { 0.0 } else { (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0) };
    (a + d * t - p).norm()
}

impl Core {
    fn rhs(&self, z: C64, y: &State) -> State {
        let q = -0.5 * self.phi.eval(z);
        [y[1], q * y[0], y[3], q * y[2]]
    }

    fn integrate(&self, a: C64, b: C64, y: State) -> Result<State> {
        let renorm = |y: &mut State| {
            let w = y[1] * y[2] - y[0] * y[3];
            let drift = (w - 1.0).norm();
            let s = w.sqrt().inv();
            for v in y.iter_mut() {
                *v *= s;
            }
            drift
        };
        let (out, st) = integrate_segment(&|z, y| self.rhs(z, y), a, b, y, &self.opts, &renorm)?;
        let mut d = self.drift.lock().unwrap();
        *d = d.max(st.max_drift);
        Ok(out)
    }

    fn clearance(&self, a: C64, b: C64) -> f64 {
        self.poles.iter().map(|&p| seg_distance(a, b, p)).fold(f64::INFINITY, f64::min)
    }

    fn segment_inside(&self, a: C64, b: C64) -> bool {
        match self.domain {
            DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane | DomainModel::Disk | DomainModel::HalfStrip => true,
            _ => (0..=64).all(|k| self.domain.contains(ComplexValue::Finite(a + (b - a) * (k as f64 / 64.0)))),
        }
    }

    fn candidates(&self, z: C64) -> Vec<Vec<C64>> {
        let b = self.base;
        match self.domain {
            DomainModel::UpperHalfPlane => {
                let top = 2.0 * b.im.max(z.im).max(1.0);
                vec![
                    vec![b, C64::new(b.re, z.im), z],
                    vec![b, C64::new(z.re, b.im), z],
                    vec![b, C64::new(b.re, top), C64::new(z.re, top), z],
                ]
            }
            DomainModel::Disk => vec![vec![b, z], vec![b, C64::new(0.0, 0.0), z]],
            _ => vec![vec![b, z]],
        }
    }

    fn plan(&self, z: C64) -> Result<Vec<C64>> {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for path in self.candidates(z) {
            let mut path: Vec<C64> = path;
            path.dedup();
            let ok = path.windows(2).all(|w| self.segment_inside(w[0], w[1]));
            let clr = path.windows(2).map(|w| self.clearance(w[0], w[1])).fold(f64::INFINITY, f64::min);
            if ok && clr >= CLEARANCE && best.as_ref().map_or(true, |(c, _)| clr > *c) {
                best = Some((clr, path));
            }
        }
        best.map(|(_, p)| p).ok_or(Error::NoPath(ComplexValue::Finite(z)))
    }

    fn point_clearance(&self, z: C64) -> f64 {
        let pc = self.poles.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min);
        let bd = self.domain.boundary_distance(ComplexValue::Finite(z)).unwrap_or(0.0);
        pc.min(bd)
    }

    fn lookup(&self, z: C64) -> (Option<State>, Option<Entry>) {
        let cache = self.cache.lock().unwrap();
        let mut nearest: Option<(f64, Entry)> = None;
        for e in cache.iter() {
            if e.z == z {
                return (Some(e.state), None);
            }
            if e.depth == 0 {
                let d = (e.z - z).norm();
                if nearest.map_or(true, |(n, _)| d < n) {
                    nearest = Some((d, *e));
                }
            }
        }
        (None, nearest.map(|(_, e)| e))
    }

    fn store(&self, z: C64, state: State, depth: u8) {
        let mut cache = self.cache.lock().unwrap();
        if cache.len() < CACHE_LIMIT {
            cache.push(Entry { z, state, depth });
        }
    }

    fn state_at(&self, z: C64) -> Result<State> {
        if !self.domain.contains(ComplexValue::Finite(z)) {
            return Err(Error::OutsideDomain(ComplexValue::Finite(z)));
        }
        let (hit, near) = self.lookup(z);
        if let Some(s) = hit {
            return Ok(s);
        }
        if let Some(e) = near {
            let radius = 0.25 * self.point_clearance(e.z).min(2.0);
            if (e.z - z).norm() <= radius && self.clearance(e.z, z) >= CLEARANCE && self.segment_inside(e.z, z) {
                let s = self.integrate(e.z, z, e.state)?;
                self.store(z, s, 1);
                return Ok(s);
            }
        }
        let path = self.plan(z)?;
        let mut cur = (path[0], base_state());
        for &w in &path[1..] {
            let s = match self.lookup(w).0 {
                Some(s) => s,
                None => {
                    let s = self.integrate(cur.0, w, cur.1)?;
                    self.store(w, s, 0);
                    s
                }
            };
            cur = (w, s);
        }
        Ok(cur.1)
    }
}

fn base_state() -> State {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    [z, o, o, z]
}

/// Solution of `S_w = φ` on a domain, evaluated lazily along cached paths.
#[derive(Clone)]
pub struct SchwarzianSolution {
    core: Arc<Core>,
    pub normalization: Mobius,
    pub normalization_kind: Normalization,
    /// Boundary limits of the raw ratio at 0, 1, ∞ (when normalized).
    pub limits: Option<[ComplexValue; 3]>,
}

impl std::fmt::Debug for SchwarzianSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SchwarzianSolution({}, base {})", self.core.phi.label, self.core.base)
    }
}

pub fn solve_schwarzian(phi: &Holo, d: &DomainModel, base: ComplexValue, normalization: Normalization) -> Result<SchwarzianSolution> {
    let b = base.finite().ok_or(Error::OutsideDomain(base))?;
    if !d.contains(base) {
        return Err(Error::OutsideDomain(base));
    }
    let core = Core {
        phi: phi.clone(),
        domain: d.clone(),
        base: b,
        poles: phi.singularities.iter().filter_map(|p| p.finite()).collect(),
        opts: OdeOptions::default(),
        cache: Mutex::new(vec![Entry { z: b, state: base_state(), depth: 0 }]),
        drift: Mutex::new(0.0),
    };
    let mut sol = SchwarzianSolution { core: Arc::new(core), normalization: Mobius::identity(), normalization_kind: normalization, limits: None };
    if normalization == Normalization::FixZeroOneInfinity {
        if !matches!(d, DomainModel::UpperHalfPlane) {
            return Err(Error::InvalidInput("0, 1, ∞ normalization is defined on ℍ".into()));
        }
        let heights: Vec<f64> = (0..=18).map(|k| 2f64.powf(-0.5 * k as f64)).collect();
        let near = |p: f64| -> Result<ComplexValue> {
            let cp = { let h = C64::new(0.0, 1e-7); h * h * phi.eval(C64::new(p, 0.0) + h) };
            let probes: Vec<C64> = heights.iter().map(|&y| C64::new(p, y)).collect();
            let offsets: Vec<C64> = heights.iter().map(|&y| C64::new(0.0, y)).collect();
            sol.boundary_limit(&probes, &offsets, cp)
        };
        let a = near(0.0)?;
        let bb = near(1.0)?;
        // at ∞ in the chart s = −1/z the local coefficient is lim z²φ(z)
        let cinf = phi.far_field(C64::new(0.0, -1e-7));
        let probes: Vec<C64> = heights.iter().map(|&y| C64::new(0.0, 1.0 / y)).collect();
        let offsets: Vec<C64> = heights.iter().map(|&y| C64::new(0.0, y)).collect();
        let c = sol.boundary_limit(&probes, &offsets, cinf)?;
        sol.normalization = Mobius::to_zero_one_infinity(a, bb, c)
            .map_err(|_| Error::NormalizationFailed("boundary limits at 0, 1, ∞ coincide".into()))?;
        sol.limits = Some([a, bb, c]);
    }
    Ok(sol)
}

impl SchwarzianSolution {
    pub fn phi(&self) -> &Holo {
        &self.core.phi
    }

    /// `(u₁, u₁′, u₂, u₂′)` at `z`.
    pub fn state(&self, z: C64) -> Result<State> {
        self.core.state_at(z)
    }

    pub fn wronskian_drift(&self) -> f64 {
        *self.core.drift.lock().unwrap()
    }

    fn raw(&self, z: C64) -> Result<ComplexValue> {
        let s = self.state(z)?;
        Ok(if s[2].norm() == 0.0 { ComplexValue::Infinity } else { ComplexValue::from_c64(s[0] / s[2]) })
    }

    /// Normalized `w(z)`; `Infinity` at poles of `w`.
    pub fn w(&self, z: C64) -> Result<ComplexValue> {
        Ok(self.normalization.apply(self.raw(z)?))
    }

    /// `w, w′, w″` from the ODE state (no third derivative).
    pub fn w_jet(&self, z: C64) -> Result<Jet> {
        let s = self.state(z)?;
        if s[2].norm() == 0.0 {
            return Err(Error::Pole(ComplexValue::Finite(z)));
        }
        let wr = s[1] * s[2] - s[0] * s[3];
        let u2 = s[2];
        let raw = Jet { value: s[0] / u2, d1: wr / (u2 * u2), d2: -2.0 * wr * s[3] / (u2 * u2 * u2), d3: None };
        if self.normalization == Mobius::identity() {
            return Ok(raw);
        }
        let m = self.normalization.jet(raw.value);
        if !(m[0].re.is_finite() && m[0].im.is_finite()) {
            return Err(Error::Pole(ComplexValue::Finite(z)));
        }
        Ok(raw.push(m, false))
    }

    pub fn as_analytic_map(&self) -> AnalyticMap {
        let me = self.clone();
        AnalyticMap::new("w_phi", self.core.domain.kind(), DomainKind::Plane, move |z| me.w_jet(z))
    }

    /// `S_w(z)` with the third derivative from short ODE hops around `z`.
    pub fn schwarzian_at(&self, z: C64) -> Result<C64> {
        let j = self.w_jet(z)?;
        let s0 = self.state(z)?;
        let d2 = |x: C64| -> Result<C64> {
            let s = self.core.integrate(z, x, s0)?;
            let wr = s[1] * s[2] - s[0] * s[3];
            let raw = Jet { value: s[0] / s[2], d1: wr / (s[2] * s[2]), d2: -2.0 * wr * s[3] / (s[2] * s[2] * s[2]), d3: None };
            if self.normalization == Mobius::identity() {
                Ok(raw.d2)
            } else {
                Ok(raw.push(self.normalization.jet(raw.value), false).d2)
            }
        };
        Ok(schwarzian_from_jet(&j, richardson_d3(&d2, z)?))
    }

    /// Limit of the raw ratio at a boundary point approached through
    /// `probes`, whose local coordinates are `offsets`. Near a boundary
    /// point with local coefficient `c` (`φ ≈ c/t²`), `w` is a Möbius image
    /// of `t^α(1 + O(t))` with `α = √(1 − 2c)`, so the values expand in
    /// powers `t^{αj + m}`; the limit is the constant term of a least-squares
    /// fit in that basis, taken in whichever sphere chart stays bounded.
    fn boundary_limit(&self, probes: &[C64], offsets: &[C64], c: C64) -> Result<ComplexValue> {
        let vals: Vec<ComplexValue> = probes.iter().map(|&z| self.raw(z)).collect::<Result<_>>()?;
        let last = vals.last().unwrap();
        let inverted = last.finite().map_or(true, |v| v.norm() > 1.0);
        let seq: Vec<C64> = vals
            .iter()
            .map(|v| match (v, inverted) {
                (ComplexValue::Finite(x), false) => *x,
                (ComplexValue::Finite(x), true) => x.inv(),
                (ComplexValue::Infinity, true) => C64::new(0.0, 0.0),
                (ComplexValue::Infinity, false) => C64::new(f64::INFINITY, 0.0),
            })
            .collect();
        let start = seq.iter().rposition(|v| !(v.re.is_finite() && v.im.is_finite())).map_or(0, |i| i + 1);
        let (seq, offs) = (&seq[start..], &offsets[start..]);
        let alpha = (C64::new(1.0, 0.0) - 2.0 * c).sqrt();
        let (est, err) = limit_fit(offs, seq, alpha);
        if !(err <= 1e-9 * (1.0 + est.norm())) {
            return Err(Error::NormalizationFailed(format!(
                "probe sequence toward {} did not settle (estimate {est}, spread {err:.2e})",
                probes.last().unwrap()
            )));
        }
        Ok(if inverted {
            if est.norm() <= 1e-12 {
                ComplexValue::Infinity
            } else {
                ComplexValue::from_c64(est.inv())
            }
        } else {
            ComplexValue::Finite(est)
        })
    }

    /// Rows `(re z, im z, re w, im w)`; poles of `w` print as `inf`.
    pub fn sample_csv(&self, points: &[C64]) -> Result<String> {
        let mut out = String::from("z_re,z_im,w_re,w_im\n");
        for &z in points {
            let (a, b) = self.w(z)?.re_im();
            out.push_str(&format!("{},{},{},{}\n", z.re, z.im, a, b));
        }
        Ok(out)
    }
}

/// Exponents `m` and `α + m` for `m ≤ deg`, without repeats.
fn local_exponents(alpha: C64, deg: usize) -> Vec<C64> {
    let mut e: Vec<C64> = Vec::new();
    for m in 0..=deg {
        for v in [C64::new(m as f64, 0.0), alpha + m as f64] {
            if e.iter().all(|u| (u - v).norm() > 1e-6) {
                e.push(v);
            }
        }
    }
    e
}

/// Near a boundary point `w` is `(A t^α f₊ + B f₋)/(C t^α f₊ + D f₋)` with
/// `f±` analytic, so numerator and denominator are series in `t^m, t^{α+m}`.
/// Fits that ratio (linearized, denominator constant fixed to 1) and returns
/// the value at `t = 0` with the change against one degree less.
pub fn limit_fit(t: &[C64], v: &[C64], alpha: C64) -> (C64, f64) {
    let solve = |deg: usize| -> C64 {
        let exps = local_exponents(alpha, deg);
        let zero = exps.iter().position(|e| e.norm() < 1e-12).unwrap();
        let rows = t.len();
        let pw = |i: usize, e: C64| if e.norm() < 1e-12 { C64::new(1.0, 0.0) } else { (e * t[i].ln()).exp() };
        let cols = 2 * exps.len() - 1;
        let mut m = nalgebra::DMatrix::<C64>::zeros(rows, cols);
        for i in 0..rows {
            let mut j = 0;
            for &e in &exps {
                m[(i, j)] = pw(i, e);
                j += 1;
            }
            for (k, &e) in exps.iter().enumerate() {
                if k != zero {
                    m[(i, j)] = -v[i] * pw(i, e);
                    j += 1;
                }
            }
        }
        let scales: Vec<f64> = (0..cols).map(|j| m.column(j).norm().max(1e-300)).collect();
        for j in 0..cols {
            let sc = scales[j];
            m.column_mut(j).iter_mut().for_each(|x| *x /= sc);
        }
        let rhs = nalgebra::DVector::from_iterator(rows, v.iter().copied());
        match m.svd(true, true).solve(&rhs, 1e-15) {
            Ok(x) => x[zero] / scales[zero],
            Err(_) => C64::new(f64::NAN, f64::NAN),
        }
    };
    let full = solve(3);
    let reduced = solve(2);
    (full, (full - reduced).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::holo::NamedFunction;
    use crate::maps::Primitive;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn closed_form_schwarzians() {
        let sq = AnalyticMap::new("z2", DomainKind::Plane, DomainKind::Plane, |z| {
            Ok(Jet { value: z * z, d1: 2.0 * z, d2: c(2.0, 0.0), d3: None })
        });
        let s = schwarzian_of(&sq, ComplexValue::new(0.0, 1.0)).unwrap().finite().unwrap();
        assert!((s - c(1.5, 0.0)).norm() < 1e-8, "{s}");
        let ex = MapChain::new(vec![Primitive::Exp]).to_map(DomainKind::Plane, DomainKind::Plane);
        let s = schwarzian_of(&ex, ComplexValue::new(0.3, -2.0)).unwrap().finite().unwrap();
        assert!((s + 0.5).norm() < 1e-12);
        let m = AnalyticMap::from_mobius(Mobius::cayley(), DomainKind::Plane, DomainKind::Plane);
        assert!(schwarzian_of(&m, ComplexValue::new(2.0, 1.0)).unwrap().finite().unwrap().norm() < 1e-12);
        let crit = AnalyticMap::new("z2", DomainKind::Plane, DomainKind::Plane, |z| {
            Ok(Jet { value: z * z, d1: 2.0 * z, d2: c(2.0, 0.0), d3: Some(c(0.0, 0.0)) })
        });
        assert!(matches!(schwarzian_of(&crit, ComplexValue::new(0.0, 0.0)), Err(Error::CriticalPoint(_))));
    }

    #[test]
    fn limit_fit_recovers_a_moebius_of_a_power() {
        let alpha = c(0.9, 0.05);
        let t: Vec<C64> = (0..=18).map(|k| c(0.0, 2f64.powf(-0.5 * k as f64))).collect();
        let v: Vec<C64> = t.iter().map(|&x| {
            let p = (alpha * x.ln()).exp();
            (c(2.0, 1.0) + 3.0 * p) / (1.0 + 0.5 * p)
        }).collect();
        let (est, err) = limit_fit(&t, &v, alpha);
        assert!((est - c(2.0, 1.0)).norm() < 1e-9 && err < 1e-8, "{est} {err}");
    }

    #[test]
    fn zero_gives_the_identity_after_normalization() {
        let sol = solve_schwarzian(&Holo::zero(), &DomainModel::UpperHalfPlane, ComplexValue::new(0.0, 1.0), Normalization::FixZeroOneInfinity).unwrap();
        for z in [c(0.3, 0.2), c(-2.0, 5.0), c(7.0, 0.01)] {
            let w = sol.w(z).unwrap().finite().unwrap();
            assert!((w - z).norm() < 1e-8 * (1.0 + z.norm()), "{w} vs {z}");
        }
    }

    #[test]
    fn inverse_square_matches_power_map() {
        // S(z^α) = (1 − α²)/(2z²); c/z² with α = √(1 − 2c) and the 0,1,∞
        // normalization gives exactly z^α.
        let cc = 0.05;
        let phi = NamedFunction::InverseSquare { c: [cc, 0.0], a: [0.0, 0.0] }.build().unwrap();
        let sol = solve_schwarzian(&phi, &DomainModel::UpperHalfPlane, ComplexValue::new(0.0, 1.0), Normalization::FixZeroOneInfinity).unwrap();
        let alpha = (1.0 - 2.0 * cc).sqrt();
        for z in [c(0.5, 0.5), c(-1.0, 2.0), c(3.0, 0.1)] {
            let w = sol.w(z).unwrap().finite().unwrap();
            let want = (alpha * z.ln()).exp();
            assert!((w - want).norm() < 1e-7 * want.norm(), "{w} vs {want}");
            let s = sol.schwarzian_at(z).unwrap();
            assert!((s - phi.eval(z)).norm() < 1e-5 * phi.eval(z).norm());
        }
        assert!(sol.wronskian_drift() < 1e-6);
    }

    #[test]
    fn constant_minus_half_is_an_exponential() {
        let phi = NamedFunction::Constant { c: [-0.5, 0.0] }.build().unwrap();
        let sol = solve_schwarzian(&phi, &DomainModel::UpperHalfPlane, ComplexValue::new(0.0, 1.0), Normalization::None).unwrap();
        // u1 = 2 sinh((z−i)/2), u2 = cosh((z−i)/2): w = 2 tanh((z−i)/2)
        for z in [c(0.4, 0.9), c(-1.0, 3.0)] {
            let w = sol.w(z).unwrap().finite().unwrap();
            let want = 2.0 * ((z - c(0.0, 1.0)) / 2.0).tanh();
            assert!((w - want).norm() < 1e-8);
            let s = schwarzian_of(&sol.as_analytic_map(), ComplexValue::Finite(z)).unwrap().finite().unwrap();
            assert!((s + 0.5).norm() < 1e-5 * 0.5);
        }
    }

    #[test]
    fn path_too_close_to_a_pole_is_rejected() {
        let phi = NamedFunction::InverseSquare { c: [0.05, 0.0], a: [0.0, 0.0] }.build().unwrap();
        let sol = solve_schwarzian(&phi, &DomainModel::UpperHalfPlane, ComplexValue::new(0.0, 1.0), Normalization::None).unwrap();
        assert!(matches!(sol.w(c(0.0, 1e-4)), Err(Error::NoPath(_))));
    }

    #[test]
    fn gate_examples() {
        let f = |k: f64| NamedFunction::InverseSquare { c: [k, 0.0], a: [0.0, 0.0] }.build().unwrap();
        assert!(ahlfors_weill_gate(&f(0.05), &DomainModel::UpperHalfPlane).unwrap());
        assert!(!ahlfors_weill_gate(&f(0.2), &DomainModel::UpperHalfPlane).unwrap());
        assert!(ahlfors_weill_gate(&Holo::zero(), &DomainModel::UpperHalfPlane).unwrap());
    }

    #[test]
    fn composition_with_identity_and_mobius() {
        let phi = NamedFunction::InverseSquare { c: [0.05, 0.0], a: [0.0, 0.0] }.build().unwrap();
        let id = AnalyticMap::identity(DomainKind::UpperHalfPlane);
        let z = c(0.3, 0.8);
        assert!((compose_schwarzian(&phi, &id).eval(z) - phi.eval(z)).norm() < 1e-14);
        let m = AnalyticMap::from_mobius(Mobius::cayley(), DomainKind::UpperHalfPlane, DomainKind::Disk);
        assert!(compose_schwarzian(&Holo::zero(), &m).eval(z).norm() < 1e-12);
    }

    #[test]
    fn chain_bound_of_a_mild_power() {
        // S(z^α) = (1−α²)/(2z²) has B₂ norm 2(1 − α²).
        let ch = MapChain::new(vec![Primitive::Power { alpha: 0.95 }]);
        let b = chain_schwarzian_bound(&ch).unwrap();
        assert!((b - 2.0 * (1.0 - 0.95f64 * 0.95)).abs() < 1e-8, "{b}");
    }
}
