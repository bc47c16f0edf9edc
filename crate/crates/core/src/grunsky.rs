//! Grunsky–Milin coefficients of `f(z) = z + b₀ + b₁/z + …` on the exterior
//! disk, the truncated Grunsky norm, and Laurent extraction from evaluators.

use crate::error::{Error, Result};
use crate::series::Series2;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentTail {
    /// `[b₀, b₁, …, b_K]`; the coefficient of `z` is 1 by construction.
    pub b: Vec<C64>,
}

impl LaurentTail {
    pub fn new(b: Vec<C64>) -> Self {
        LaurentTail { b }
    }

    /// `z + t/z`.
    pub fn joukowski(t: C64, k: usize) -> Self {
        let mut b = vec![C64::new(0.0, 0.0); k.max(1) + 1];
        b[1] = t;
        LaurentTail { b }
    }

    pub fn eval(&self, z: C64) -> C64 {
        let u = z.inv();
        z + self.b.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * u + c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrunskyMatrix {
    pub n: usize,
    /// `β_{mn}` at `(m − 1, n − 1)`.
    pub beta: DMatrix<C64>,
}

impl GrunskyMatrix {
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.beta[(m - 1, n - 1)]
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,n,re_beta,im_beta\n");
        for m in 1..=self.n {
            for n in 1..=self.n {
                let b = self.get(m, n);
                s.push_str(&format!("{m},{n},{:e},{:e}\n", b.re, b.im));
            }
        }
        s
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.beta[(i, j)] - self.beta[(j, i)]).norm());
            }
        }
        worst
    }
}

/// `β_{mn} = √(mn)·α_{mn}` for `m, n ≤ N`, from the formal expansion of
/// `−log((f(z) − f(ζ))/(z − ζ))` in `u = 1/z`, `v = 1/ζ`.
///
/// `(f(z) − f(ζ))/(z − ζ) = 1 − uv·Σ_k b_k h_{k−1}(u, v)` with `h_j` the
/// complete homogeneous polynomial of degree `j`, so the logarithm has no
/// constant term and no branch choice arises.
pub fn grunsky_coefficients(f: &LaurentTail, n: usize) -> Result<GrunskyMatrix> {
    if n == 0 {
        return Err(Error::InvalidInput("truncation order must be at least 1".into()));
    }
    let required = 2 * n - 1;
    let got = f.b.len().saturating_sub(1);
    if f.b.len() < required + 1 {
        // trailing coefficients that are absent are only acceptable when the
        // caller gave an exact Laurent polynomial; we cannot know, so refuse
        return Err(Error::TruncationTooShort { required, got });
    }
    let mut q = Series2::zero(n);
    for (k, &bk) in f.b.iter().enumerate().skip(1).take(required) {
        if bk == C64::new(0.0, 0.0) {
            continue;
        }
        // uv · b_k · Σ_{i+j=k−1} u^i v^j
        for i in 0..k {
            let j = k - 1 - i;
            if i + 1 <= n && j + 1 <= n {
                q.add_at(i + 1, j + 1, bk);
            }
        }
    }
    let l = Series2::neg_log_one_minus(&q);
    let beta = DMatrix::from_fn(n, n, |i, j| {
        let (m, k) = (i + 1, j + 1);
        l.get(m, k) * ((m * k) as f64).sqrt()
    });
    Ok(GrunskyMatrix { n, beta })
}

/// Largest singular value of `β`: power iteration on `β*β`, falling back to
/// a full SVD if the iteration stagnates.
pub fn grunsky_norm(g: &GrunskyMatrix) -> f64 {
    let a = &g.beta;
    if a.iter().all(|x| x.norm() == 0.0) {
        return 0.0;
    }
    let ah = a.adjoint();
    let m = &ah * a;
    let n = g.n;
    let mut v = DVector::from_fn(n, |i, _| C64::new(1.0 / (i + 1) as f64, 0.1 / (i + 2) as f64));
    v /= C64::new(v.norm(), 0.0);
    let mut lambda = 0.0;
    for _ in 0..20000 {
        let w = &m * &v;
        let lam = v.dotc(&w).re;
        let resid = (&w - &v * C64::new(lam, 0.0)).norm();
        let wn = w.norm();
        if wn == 0.0 {
            break;
        }
        v = w / C64::new(wn, 0.0);
        if resid <= 1e-10 * lam.abs() && (lam - lambda).abs() <= 1e-10 * lam.abs() {
            return lam.max(0.0).sqrt();
        }
        lambda = lam;
    }
    a.clone().svd(false, false).singular_values.max()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedNonunivalent,
    Consistent,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MilinReport {
    #[serde(rename = "kappa_N")]
    pub kappa: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub verdict: Verdict,
}

/// Milin's criterion at truncation `N`: `κ_N > 1` certifies non-univalence
/// since `κ_N ≤ κ`; otherwise nothing can be certified.
pub fn milin_univalence_test(f: &LaurentTail, n: usize) -> Result<MilinReport> {
    let kappa = grunsky_norm(&grunsky_coefficients(f, n)?);
    let verdict = if kappa > 1.0 + 1e-9 { Verdict::CertifiedNonunivalent } else { Verdict::Consistent };
    Ok(MilinReport { kappa, n, verdict })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KappaTrend {
    pub orders: Vec<usize>,
    pub kappas: Vec<f64>,
    pub converged: bool,
}

/// `κ_N` for `N = 4, 8, …, n_max`, converged once consecutive values differ
/// by less than `1e-6`.
pub fn kappa_trend(f: &LaurentTail, n_max: usize) -> Result<KappaTrend> {
    let mut orders = vec![];
    let mut kappas: Vec<f64> = vec![];
    let mut n = 4.min(n_max);
    loop {
        orders.push(n);
        kappas.push(grunsky_norm(&grunsky_coefficients(f, n)?));
        if n >= n_max {
            break;
        }
        n = (n + 4).min(n_max);
    }
    let converged = kappas.len() >= 2 && (kappas[kappas.len() - 1] - kappas[kappas.len() - 2]).abs() < 1e-6;
    Ok(KappaTrend { orders, kappas, converged })
}

/// `b₀..b_K` of a Σ-normalized map by the trapezoidal rule on `|z| = R`
/// with 4096 nodes.
pub fn laurent_from_map(w: &dyn Fn(C64) -> C64, k: usize, r: f64) -> Result<LaurentTail> {
    if !(r > 1.0) {
        return Err(Error::InvalidInput(format!("sampling radius must exceed 1, got {r}")));
    }
    const NODES: usize = 4096;
    let z: Vec<C64> = (0..NODES).map(|j| C64::from_polar(r, 2.0 * PI * j as f64 / NODES as f64)).collect();
    let vals: Vec<C64> = z.iter().map(|&z| w(z)).collect();
    if vals.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidInput("map is not finite on the sampling circle".into()));
    }
    let coeff = |power: i32| -> C64 {
        vals.iter().zip(&z).map(|(v, z)| v * z.powi(-power)).sum::<C64>() / NODES as f64
    };
    let a1 = coeff(1);
    if (a1 - 1.0).norm() > 1e-8 {
        return Err(Error::NotNormalized(format!("coefficient of z is {a1}, expected 1")));
    }
    let b: Vec<C64> = (0..=k).map(|j| coeff(-(j as i32))).collect();
    if k >= 8 {
        // the scaled terms |b_k|/R^k must decay; a stalled tail means the
        // circle sits where the samples no longer resolve the expansion
        let scaled: Vec<f64> = b.iter().enumerate().map(|(j, c)| c.norm() / r.powi(j as i32)).collect();
        let head = scaled[1..=k / 2].iter().cloned().fold(0.0, f64::max);
        let tail = scaled[3 * k / 4..].iter().cloned().fold(0.0, f64::max);
        if head > 1e-13 && tail >= head {
            return Err(Error::RadiusTooSmall(format!("tail |b_k|R^-k = {tail:.3e} does not decay below {head:.3e}")));
        }
    }
    Ok(LaurentTail { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Direct oracle: α_{mn} by expanding −log((f(z) − f(ζ))/(z − ζ)) as a
    /// double contour integral on |z| = |ζ| = R.
    fn alpha_by_contours(f: &LaurentTail, m: usize, n: usize, r: f64) -> C64 {
        let nodes = 64;
        let mut s = c(0.0, 0.0);
        for a in 0..nodes {
            let z = C64::from_polar(r, 2.0 * PI * a as f64 / nodes as f64);
            for b in 0..nodes {
                let zeta = C64::from_polar(r * 1.01, 2.0 * PI * (b as f64 + 0.37) / nodes as f64);
                let q = (f.eval(z) - f.eval(zeta)) / (z - zeta);
                s += -q.ln() * z.powi(m as i32) * zeta.powi(n as i32);
            }
        }
        s / (nodes * nodes) as f64
    }

    #[test]
    fn trivial_maps_have_zero_matrices() {
        for b in [vec![c(0.0, 0.0); 10], {
            let mut v = vec![c(0.0, 0.0); 10];
            v[0] = c(2.0, -1.0);
            v
        }] {
            let g = grunsky_coefficients(&LaurentTail::new(b), 5).unwrap();
            assert!(g.beta.iter().all(|x| x.norm() == 0.0));
            assert_eq!(grunsky_norm(&g), 0.0);
        }
    }

    #[test]
    fn joukowski_gives_powers_on_the_diagonal() {
        let t = c(0.3, 0.2);
        let g = grunsky_coefficients(&LaurentTail::joukowski(t, 11), 6).unwrap();
        for m in 1..=6 {
            for n in 1..=6 {
                let want = if m == n { t.powu(m as u32) } else { c(0.0, 0.0) };
                assert!((g.get(m, n) - want).norm() < 1e-14);
            }
        }
        let k = grunsky_norm(&grunsky_coefficients(&LaurentTail::joukowski(c(0.3, 0.0), 15), 8).unwrap());
        assert!((k - 0.3).abs() < 1e-12);
    }

    #[test]
    fn coefficients_match_contour_oracle() {
        let f = LaurentTail::new(vec![c(0.1, 0.0), c(0.2, 0.1), c(-0.05, 0.02), c(0.03, 0.0), c(0.0, 0.01), c(0.0, 0.0), c(0.0, 0.0)]);
        let g = grunsky_coefficients(&f, 3).unwrap();
        for m in 1..=3 {
            for n in 1..=3 {
                let want = alpha_by_contours(&f, m, n, 1.5) * ((m * n) as f64).sqrt();
                assert!((g.get(m, n) - want).norm() < 1e-9, "{m}{n} {} {}", g.get(m, n), want);
            }
        }
    }

    #[test]
    fn short_tails_are_rejected() {
        let e = grunsky_coefficients(&LaurentTail::new(vec![c(0.0, 0.0); 4]), 4).unwrap_err();
        assert_eq!(e, Error::TruncationTooShort { required: 7, got: 3 });
    }

    #[test]
    fn milin_verdicts() {
        let r = milin_univalence_test(&LaurentTail::joukowski(c(1.2, 0.0), 15), 8).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedNonunivalent);
        let r = milin_univalence_test(&LaurentTail::joukowski(c(0.5, 0.0), 15), 8).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent);
        assert!((r.kappa - 0.5).abs() < 1e-12);
        let r = milin_univalence_test(&LaurentTail::joukowski(c(0.0, 0.0), 15), 8).unwrap();
        assert_eq!((r.kappa, r.verdict), (0.0, Verdict::Consistent));
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["verdict"], "CONSISTENT");
        assert_eq!(j["N"], 8);
    }

    #[test]
    fn laurent_extraction_of_exact_polynomials() {
        let b = laurent_from_map(&|z: C64| z + 0.3 / z, 6, 4.0).unwrap();
        assert!((b.b[1] - 0.3).norm() < 1e-10);
        assert!(b.b.iter().enumerate().all(|(k, v)| k == 1 || v.norm() < 1e-10));
        let b = laurent_from_map(&|z: C64| z + 1.0 / z + 0.1 / (z * z * z), 6, 4.0).unwrap();
        assert!((b.b[1] - 1.0).norm() < 1e-10 && (b.b[3] - 0.1).norm() < 1e-10);
        assert!(b.b.iter().enumerate().all(|(k, v)| k == 1 || k == 3 || v.norm() < 1e-10));
        assert!(matches!(laurent_from_map(&|z: C64| 2.0 * z, 4, 4.0), Err(Error::NotNormalized(_))));
    }

    fn tail_strategy() -> impl Strategy<Value = LaurentTail> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24).prop_map(|v| {
            LaurentTail::new(v.iter().enumerate().map(|(k, &(a, b))| c(a, b) * 0.8f64.powi(k as i32)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn kappa_is_nondecreasing_and_beta_symmetric(f in tail_strategy()) {
            let mut prev = 0.0;
            for n in 2..=12 {
                let g = grunsky_coefficients(&f, n).unwrap();
                prop_assert!(g.max_asymmetry() < 1e-10);
                let k = grunsky_norm(&g);
                prop_assert!(k >= prev - 1e-10 * (1.0 + prev), "{n}: {k} < {prev}");
                prev = k;
            }
        }

        #[test]
        fn univalent_joukowski_maps_stay_below_one(t in 0.0f64..=1.0, th in 0.0f64..6.3) {
            let tt = C64::from_polar(t, th);
            for n in [2, 5, 9] {
                let k = grunsky_norm(&grunsky_coefficients(&LaurentTail::joukowski(tt, 2 * n), n).unwrap());
                prop_assert!(k <= 1.0 + 1e-9 && k <= t + 1e-8);
            }
        }
    }
}
