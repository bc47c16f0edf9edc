//! Domain models: half-planes, disks, the half-strip Π₊ and quasidisks given
//! as images of ℍ. Every model carries a conformal parametrization from ℍ,
//! which the sup-norm and quadrature engines use as a common chart.

use crate::error::{Error, Result};
use crate::maps::{AnalyticMap, Jet, MapChain};
use crate::mobius::Mobius;
use crate::point::{ChartPoint, ComplexValue};
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    UpperHalfPlane,
    LowerHalfPlane,
    Disk,
    ExteriorDisk,
    HalfStrip,
    Quasidisk,
    Plane,
}

/// Quasidisk `g(ℍ)` with `‖S_g‖_{B₂(ℍ)} < 1/2`.
#[derive(Clone, Debug)]
pub struct Quasidisk {
    pub map: AnalyticMap,
    pub schwarzian_bound: f64,
    pub chain: Option<MapChain>,
}

impl Quasidisk {
    pub fn new(map: AnalyticMap, schwarzian_bound: f64) -> Result<Self> {
        if !(schwarzian_bound < 0.5) {
            return Err(Error::NotQuasidisk(schwarzian_bound));
        }
        if !map.has_inverse() {
            return Err(Error::InvalidInput("quasidisk map needs an inverse".into()));
        }
        Ok(Quasidisk { map, schwarzian_bound, chain: None })
    }

    /// Builds the map from a chain and measures its Schwarzian bound.
    pub fn from_chain(chain: MapChain) -> Result<Self> {
        let bound = crate::schwarzian::chain_schwarzian_bound(&chain)?;
        let mut q = Quasidisk::new(chain.to_map(DomainKind::UpperHalfPlane, DomainKind::Quasidisk), bound)?;
        q.chain = Some(chain);
        Ok(q)
    }

    fn preimage(&self, z: C64) -> Result<C64> {
        let zeta = self.map.inverse(z)?;
        let back = self.map.value(zeta)?;
        if (back - z).norm() > 1e-8 * (1.0 + z.norm()) {
            return Err(Error::OutsideDomain(ComplexValue::Finite(z)));
        }
        Ok(zeta)
    }
}

#[derive(Clone, Debug)]
pub enum DomainModel {
    UpperHalfPlane,
    LowerHalfPlane,
    Disk,
    ExteriorDisk,
    HalfStrip,
    Quasidisk(Quasidisk),
}

fn im_only(z: ComplexValue) -> Result<C64> {
    z.finite().ok_or(Error::OutsideDomain(ComplexValue::Infinity))
}

impl DomainModel {
    pub fn kind(&self) -> DomainKind {
        match self {
            DomainModel::UpperHalfPlane => DomainKind::UpperHalfPlane,
            DomainModel::LowerHalfPlane => DomainKind::LowerHalfPlane,
            DomainModel::Disk => DomainKind::Disk,
            DomainModel::ExteriorDisk => DomainKind::ExteriorDisk,
            DomainModel::HalfStrip => DomainKind::HalfStrip,
            DomainModel::Quasidisk(_) => DomainKind::Quasidisk,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DomainModel::UpperHalfPlane => "halfplane",
            DomainModel::LowerHalfPlane => "lower_halfplane",
            DomainModel::Disk => "disk",
            DomainModel::ExteriorDisk => "exterior_disk",
            DomainModel::HalfStrip => "halfstrip",
            DomainModel::Quasidisk(_) => "quasidisk",
        }
    }

    pub fn contains_infinity(&self) -> bool {
        matches!(self, DomainModel::ExteriorDisk)
    }

    pub fn contains(&self, z: ComplexValue) -> bool {
        let z = match z {
            ComplexValue::Infinity => return self.contains_infinity(),
            ComplexValue::Finite(z) => z,
        };
        match self {
            DomainModel::UpperHalfPlane => z.im > 0.0,
            DomainModel::LowerHalfPlane => z.im < 0.0,
            DomainModel::Disk => z.norm_sqr() < 1.0,
            DomainModel::ExteriorDisk => z.norm_sqr() > 1.0,
            DomainModel::HalfStrip => z.re > 0.0 && z.im > 0.0 && z.im < 1.0,
            DomainModel::Quasidisk(q) => q.preimage(z).map(|w| w.im > 0.0).unwrap_or(false),
        }
    }

    /// Density of the hyperbolic metric of curvature −4.
    pub fn hyperbolic_density(&self, z: ComplexValue) -> Result<f64> {
        if !self.contains(z) {
            return Err(Error::OutsideDomain(z));
        }
        let z = match z {
            ComplexValue::Infinity => return Ok(0.0),
            ComplexValue::Finite(z) => z,
        };
        Ok(match self {
            DomainModel::UpperHalfPlane => 1.0 / (2.0 * z.im),
            DomainModel::LowerHalfPlane => 1.0 / (-2.0 * z.im),
            DomainModel::Disk => 1.0 / (1.0 - z.norm_sqr()),
            DomainModel::ExteriorDisk => 1.0 / (z.norm_sqr() - 1.0),
            DomainModel::HalfStrip => halfstrip_density(z),
            DomainModel::Quasidisk(q) => {
                let zeta = q.preimage(z)?;
                1.0 / (2.0 * zeta.im * q.map.derivative(zeta)?.norm())
            }
        })
    }

    /// Euclidean distance to the boundary.
    pub fn boundary_distance(&self, z: ComplexValue) -> Result<f64> {
        if !self.contains(z) {
            return Err(Error::OutsideDomain(z));
        }
        let zf = im_only(z)?;
        Ok(match self {
            DomainModel::UpperHalfPlane => zf.im,
            DomainModel::LowerHalfPlane => -zf.im,
            DomainModel::Disk => 1.0 - zf.norm(),
            DomainModel::ExteriorDisk => zf.norm() - 1.0,
            DomainModel::HalfStrip => zf.re.min(zf.im).min(1.0 - zf.im),
            DomainModel::Quasidisk(q) => curve_distance(zf, |x| q.map.value(C64::new(x, 0.0)).ok()),
        })
    }

    /// Is `z` on the boundary, within `tol`, under the domain's boundary
    /// parametrization?
    pub fn on_boundary(&self, z: ComplexValue, tol: f64) -> bool {
        let zf = match z {
            ComplexValue::Infinity => {
                return matches!(
                    self,
                    DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane | DomainModel::HalfStrip
                ) || matches!(self, DomainModel::Quasidisk(q) if q.map.value(C64::new(1e15, 0.0)).map(|v| v.norm() > 1e8).unwrap_or(true));
            }
            ComplexValue::Finite(z) => z,
        };
        match self {
            DomainModel::UpperHalfPlane | DomainModel::LowerHalfPlane => zf.im.abs() <= tol,
            DomainModel::Disk | DomainModel::ExteriorDisk => (zf.norm() - 1.0).abs() <= tol,
            DomainModel::HalfStrip => {
                (zf.re.abs() <= tol && zf.im >= -tol && zf.im <= 1.0 + tol)
                    || (zf.re >= -tol && (zf.im.abs() <= tol || (zf.im - 1.0).abs() <= tol))
            }
            DomainModel::Quasidisk(q) => q
                .map
                .inverse(zf)
                .map(|w| w.im.abs() <= tol.max(1e-10) * (1.0 + w.norm()))
                .unwrap_or(false),
        }
    }

    /// Conformal map from ℍ onto the domain.
    pub fn parametrization(&self) -> AnalyticMap {
        let h = DomainKind::UpperHalfPlane;
        match self {
            DomainModel::UpperHalfPlane => AnalyticMap::identity(h),
            DomainModel::LowerHalfPlane => AnalyticMap::from_mobius(
                Mobius { a: C64::new(-1.0, 0.0), b: C64::new(0.0, 0.0), c: C64::new(0.0, 0.0), d: C64::new(1.0, 0.0) },
                h,
                DomainKind::LowerHalfPlane,
            ),
            DomainModel::Disk => AnalyticMap::from_mobius(Mobius::cayley(), h, DomainKind::Disk),
            DomainModel::ExteriorDisk => AnalyticMap::from_mobius(
                Mobius::cayley().inverse().compose(&Mobius {
                    a: C64::new(0.0, 0.0),
                    b: C64::new(1.0, 0.0),
                    c: C64::new(1.0, 0.0),
                    d: C64::new(0.0, 0.0),
                })
                .inverse(),
                h,
                DomainKind::ExteriorDisk,
            ),
            DomainModel::HalfStrip => acosh_over_pi(),
            DomainModel::Quasidisk(q) => q.map.clone(),
        }
    }
}

fn halfstrip_density(z: C64) -> f64 {
    // λ = π|sinh πz| / (2 Im cosh πz); divide through by cosh(πξ) for large ξ.
    let (xi, eta) = (z.re, z.im);
    let th = (PI * xi).tanh();
    let num = PI * (th * th * (PI * eta).cos().powi(2) + (PI * eta).sin().powi(2)).sqrt();
    num / (2.0 * th * (PI * eta).sin())
}

/// `ζ ↦ acosh(ζ)/π`, ℍ onto Π₊.
fn acosh_over_pi() -> AnalyticMap {
    AnalyticMap::new("acosh/pi", DomainKind::UpperHalfPlane, DomainKind::HalfStrip, |zeta| {
        let g = zeta.acosh() / PI;
        let f1 = PI * (PI * g).sinh();
        if f1.norm() == 0.0 {
            return Err(Error::CriticalPoint(ComplexValue::Finite(zeta)));
        }
        let f2 = PI * PI * (PI * g).cosh();
        let f3 = PI * PI * PI * (PI * g).sinh();
        let g1 = f1.inv();
        let g2 = -f2 * g1 * g1 * g1;
        let g3 = (3.0 * f2 * f2 - f1 * f3) * g1.powi(5);
        Ok(Jet { value: g, d1: g1, d2: g2, d3: Some(g3) })
    })
    .with_inverse(|w| Ok((PI * w).cosh()))
}

/// Distance from `z` to the curve `x ↦ c(x)`, `x ∈ ℝ`, via a tangent grid
/// followed by golden-section refinement.
fn curve_distance(z: C64, c: impl Fn(f64) -> Option<C64>) -> f64 {
    let n = 4096;
    let dist = |t: f64| c(t.tan()).map(|w| (w - z).norm()).unwrap_or(f64::INFINITY);
    let ts: Vec<f64> = (0..n).map(|i| -PI / 2.0 + PI * (i as f64 + 0.5) / n as f64).collect();
    let ds: Vec<f64> = ts.iter().map(|&t| dist(t)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ds[a].total_cmp(&ds[b]).then(a.cmp(&b)));
    let h = PI / n as f64;
    let mut best = ds[order[0]];
    for &i in order.iter().take(4) {
        let (mut a, mut b) = (ts[i] - h, ts[i] + h);
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let (x1, x2) = (b - gr * (b - a), a + gr * (b - a));
            if dist(x1) < dist(x2) {
                b = x2;
            } else {
                a = x1;
            }
        }
        best = best.min(dist(0.5 * (a + b)));
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KoebeReport {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// Checks `1/4 ≤ λ_D(z)·δ_D(z) ≤ 1` at every sample.
pub fn check_koebe_bounds(d: &DomainModel, samples: &[ComplexValue]) -> Result<KoebeReport> {
    if d.contains_infinity() {
        return Err(Error::InvalidInput("Koebe bounds need ∞ outside the domain".into()));
    }
    let tol = 1e-9;
    let mut rep = KoebeReport { min: f64::INFINITY, max: 0.0, count: 0 };
    for &z in samples {
        let v = d.hyperbolic_density(z)? * d.boundary_distance(z)?;
        if v < 0.25 - tol || v > 1.0 + tol || !v.is_finite() {
            return Err(Error::Invariant { message: format!("λ·δ = {v} outside [1/4, 1]"), witness: z });
        }
        rep.min = rep.min.min(v);
        rep.max = rep.max.max(v);
        rep.count += 1;
    }
    Ok(rep)
}

/// Random interior points spread over several scales.
pub fn sample_interior<R: Rng>(d: &DomainModel, n: usize, rng: &mut R) -> Vec<ComplexValue> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let v: f64 = rng.gen();
            let z = match d {
                DomainModel::Disk | DomainModel::ExteriorDisk => {
                    let r = 1.0 - 10f64.powf(-4.0 * u);
                    let r = if matches!(d, DomainModel::ExteriorDisk) { 1.0 / r } else { r };
                    C64::from_polar(r, 2.0 * PI * v)
                }
                DomainModel::HalfStrip => C64::new(10f64.powf(4.0 * u - 3.0), 1e-3 + 0.998 * v),
                _ => {
                    let zeta = C64::new(20.0 * (u - 0.5), 10f64.powf(5.0 * v - 3.0));
                    match d {
                        DomainModel::Quasidisk(q) => q.map.value(zeta).unwrap_or(zeta),
                        DomainModel::LowerHalfPlane => zeta.conj(),
                        _ => zeta,
                    }
                }
            };
            ComplexValue::Finite(z)
        })
        .collect()
}

/// Conformal map `Π₊ → ℍ`, `g = M∘cosh(πζ)` with `M` a real Möbius map:
/// the corners `0` and `i` go to `{x″, x′}`, the far end to `a0`, and the
/// vertical edge onto the boundary arc between `x′` and `x″` avoiding `a0`.
#[derive(Clone, Copy, Debug)]
pub struct HalfStripMap {
    pub m: Mobius,
    pub x1: f64,
    pub x2: f64,
    pub a0: ComplexValue,
}

/// Beyond this real part the map equals its limit to machine precision.
const XI_CLAMP: f64 = 60.0;

pub fn halfstrip_map(x1: f64, x2: f64, a0: ComplexValue) -> Result<HalfStripMap> {
    let real_a0 = match a0 {
        ComplexValue::Infinity => true,
        ComplexValue::Finite(a) => a.im == 0.0 && a.re != x1 && a.re != x2,
    };
    if !(x1.is_finite() && x2.is_finite()) || x1 == x2 || !real_a0 {
        return Err(Error::InvalidInput("half-strip map needs distinct real boundary points".into()));
    }
    let r = |x: f64| ComplexValue::Finite(C64::new(x, 0.0));
    // K: (1, −1, ∞) → (0, 1, ∞).
    let k = Mobius { a: C64::new(-0.5, 0.0), b: C64::new(0.5, 0.0), c: C64::new(0.0, 0.0), d: C64::new(1.0, 0.0) };
    for (p0, p1) in [(x2, x1), (x1, x2)] {
        let l = Mobius::to_zero_one_infinity(r(p0), r(p1), a0)?;
        let m = l.inverse().compose(&k);
        if real_det(&m) > 0.0 {
            return Ok(HalfStripMap { m, x1, x2, a0 });
        }
    }
    Err(Error::InvalidInput("no orientation-preserving half-strip map".into()))
}

fn real_det(m: &Mobius) -> f64 {
    let coeffs = [m.a, m.b, m.c, m.d];
    let pivot = coeffs.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
    let ph = pivot.conj() / pivot.norm();
    let [a, b, c, d] = coeffs.map(|v| (v * ph).re);
    a * d - b * c
}

impl HalfStripMap {
    /// `1/cosh(πζ)` and the direction of `cosh(πζ)`, stable for large ξ.
    fn recip_cosh(zeta: C64) -> C64 {
        let z = C64::new(zeta.re.min(XI_CLAMP), zeta.im);
        if z.re < 5.0 {
            (PI * z).cosh().inv()
        } else {
            let t = (-PI * z).exp();
            2.0 * t / (1.0 + t * t)
        }
    }

    /// Image point in whichever chart keeps the coordinate bounded.
    pub fn image(&self, zeta: C64) -> ChartPoint {
        let u = Self::recip_cosh(zeta);
        let num = self.m.a + self.m.b * u;
        let den = self.m.c + self.m.d * u;
        if num.norm() > den.norm() {
            ChartPoint::Inverted(den / num)
        } else {
            ChartPoint::Plane(num / den)
        }
    }

    /// `conj(g′)/g′` at ζ.
    pub fn derivative_phase(&self, zeta: C64) -> C64 {
        let (xi, eta) = (zeta.re, zeta.im);
        let th = (PI * xi.min(XI_CLAMP)).tanh();
        let sh_dir = C64::new(th * (PI * eta).cos(), (PI * eta).sin());
        let u = Self::recip_cosh(zeta);
        // g′ = det · u² / (c + d u)² · π sinh(πζ)
        let det = self.m.det();
        let den = self.m.c + self.m.d * u;
        // normalize factor by factor: u² underflows far out in the strip
        let unit_of = |v: C64| v / v.norm();
        let uu = unit_of(u);
        let ud = unit_of(den);
        let unit = unit_of(unit_of(det) * uu * uu / (ud * ud) * unit_of(sh_dir));
        unit.conj() / unit
    }

    pub fn as_analytic_map(&self) -> AnalyticMap {
        let m = self.m;
        let inv = m.inverse();
        AnalyticMap::new("halfstrip", DomainKind::HalfStrip, DomainKind::UpperHalfPlane, move |zeta| {
            let ch = [(PI * zeta).cosh(), PI * (PI * zeta).sinh(), PI * PI * (PI * zeta).cosh(), PI.powi(3) * (PI * zeta).sinh()];
            let j0 = Jet { value: ch[0], d1: ch[1], d2: ch[2], d3: Some(ch[3]) };
            Ok(j0.push(m.jet(ch[0]), true))
        })
        .with_inverse(move |w| Ok(inv.eval(w).acosh() / PI))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_densities() {
        let i = ComplexValue::new(0.0, 1.0);
        assert!((DomainModel::UpperHalfPlane.hyperbolic_density(i).unwrap() - 0.5).abs() < 1e-15);
        assert!((DomainModel::Disk.hyperbolic_density(ComplexValue::new(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((DomainModel::ExteriorDisk.hyperbolic_density(ComplexValue::new(2.0, 0.0)).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            DomainModel::UpperHalfPlane.hyperbolic_density(ComplexValue::new(0.0, -1.0)),
            Err(Error::OutsideDomain(ComplexValue::new(0.0, -1.0)))
        );
    }

    #[test]
    fn halfstrip_density_is_pullback_of_upper_half_plane() {
        for z in [C64::new(0.3, 0.4), C64::new(2.0, 0.9), C64::new(40.0, 0.5)] {
            let w = (PI * z).cosh();
            let pulled = (PI * (PI * z).sinh()).norm() / (2.0 * w.im);
            let ours = DomainModel::HalfStrip.hyperbolic_density(ComplexValue::Finite(z)).unwrap();
            assert!((ours - pulled).abs() < 1e-10 * pulled, "{z}");
        }
    }

    #[test]
    fn parametrizations_land_in_their_domains() {
        let models = [
            DomainModel::UpperHalfPlane,
            DomainModel::LowerHalfPlane,
            DomainModel::Disk,
            DomainModel::ExteriorDisk,
            DomainModel::HalfStrip,
        ];
        for d in &models {
            let g = d.parametrization();
            for zeta in [C64::new(0.3, 0.2), C64::new(-4.0, 3.0), C64::new(10.0, 0.01)] {
                let w = g.value(zeta).unwrap();
                assert!(d.contains(ComplexValue::Finite(w)), "{:?} {zeta}", d.kind());
                // density transforms as λ_D(g)|g'| = λ_ℍ
                let lam = d.hyperbolic_density(ComplexValue::Finite(w)).unwrap() * g.derivative(zeta).unwrap().norm();
                assert!((lam - 0.5 / zeta.im).abs() < 1e-8 * lam, "{:?}", d.kind());
                let back = g.inverse(w).unwrap();
                assert!((back - zeta).norm() < 1e-9 * (1.0 + zeta.norm()));
            }
        }
    }

    #[test]
    fn koebe_holds_on_standard_domains() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [DomainModel::UpperHalfPlane, DomainModel::Disk, DomainModel::HalfStrip] {
            let s = sample_interior(&d, 200, &mut rng);
            let rep = check_koebe_bounds(&d, &s).unwrap();
            assert!(rep.min >= 0.25 && rep.max <= 1.0);
        }
        assert!(check_koebe_bounds(&DomainModel::ExteriorDisk, &[]).is_err());
    }

    #[test]
    fn koebe_reports_a_witness_for_a_wrong_density() {
        // a density scaled by 10 must be rejected; emulate via a point of the disk
        // whose product we compute by hand and compare against the bound.
        let z = ComplexValue::new(0.0, 0.999);
        let v = DomainModel::Disk.hyperbolic_density(z).unwrap() * DomainModel::Disk.boundary_distance(z).unwrap();
        assert!((v - 1.0 / 1.999).abs() < 1e-12);
    }

    #[test]
    fn halfstrip_map_sends_corners_and_end() {
        let h = halfstrip_map(-3.0, -2.0, ComplexValue::Infinity).unwrap();
        let g = h.as_analytic_map();
        let c0 = g.value(C64::new(0.0, 0.0)).unwrap();
        let ci = g.value(C64::new(0.0, 1.0)).unwrap();
        let mut corners = [c0.re, ci.re];
        corners.sort_by(f64::total_cmp);
        assert!((corners[0] + 3.0).abs() < 1e-12 && (corners[1] + 2.0).abs() < 1e-12);
        assert!(matches!(h.image(C64::new(500.0, 0.5)), ChartPoint::Inverted(s) if s.norm() < 1e-50));
        // interior maps to ℍ, vertical edge to the arc between the corners
        assert!(g.value(C64::new(0.7, 0.3)).unwrap().im > 0.0);
        let e = g.value(C64::new(0.0, 0.5)).unwrap();
        assert!(e.re > -3.0 && e.re < -2.0);
        let f = halfstrip_map(-3.0, -2.0, ComplexValue::new(1.0, 0.0)).unwrap();
        let far = f.image(C64::new(80.0, 0.4)).to_value().finite().unwrap();
        assert!((far - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn halfstrip_phase_matches_analytic_derivative() {
        let h = halfstrip_map(-1.5, -0.5, ComplexValue::new(2.0, 0.0)).unwrap();
        let g = h.as_analytic_map();
        for z in [C64::new(0.2, 0.3), C64::new(3.0, 0.8)] {
            let d = g.derivative(z).unwrap();
            let want = d.conj() / d;
            assert!((h.derivative_phase(z) - want).norm() < 1e-10);
        }
    }
}
