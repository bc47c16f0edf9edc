//! Gauss–Legendre rules and a globally adaptive tensor-product cubature
//! with dyadic subdivision. Cells are refined in order of estimated error;
//! ties break on creation order so results are reproducible.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

/// Nodes and weights on [−1, 1] by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> GaussLegendre {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = t;
            }
            dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    GaussLegendre { x, w }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_cells: usize,
    pub order: usize,
    pub initial: (usize, usize),
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { abs_tol: 1e-12, rel_tol: 1e-8, max_cells: 40_000, order: 7, initial: (4, 4) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadEstimate {
    pub value: C64,
    pub error: f64,
    pub cells: usize,
    pub converged: bool,
}

#[derive(Clone, Copy)]
struct Rect([f64; 4]);

impl Rect {
    fn children(&self) -> [Rect; 4] {
        let [x0, x1, y0, y1] = self.0;
        let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        [Rect([x0, xm, y0, ym]), Rect([xm, x1, y0, ym]), Rect([x0, xm, ym, y1]), Rect([xm, x1, ym, y1])]
    }
}

struct Cell {
    rect: Rect,
    kids: [C64; 4],
    fine: C64,
    err: f64,
    seq: u64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err).then(o.seq.cmp(&self.seq))
    }
}

struct Rule<'a> {
    gl: GaussLegendre,
    f: &'a dyn Fn(f64, f64) -> C64,
}

impl Rule<'_> {
    fn apply(&self, r: &Rect) -> C64 {
        let [x0, x1, y0, y1] = r.0;
        let (hx, hy) = (0.5 * (x1 - x0), 0.5 * (y1 - y0));
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let mut acc = C64::new(0.0, 0.0);
        for (xi, wi) in self.gl.x.iter().zip(&self.gl.w) {
            let mut row = C64::new(0.0, 0.0);
            for (yj, wj) in self.gl.x.iter().zip(&self.gl.w) {
                row += *wj * (self.f)(cx + hx * xi, cy + hy * yj);
            }
            acc += *wi * row;
        }
        acc * hx * hy
    }

    fn cell(&self, rect: Rect, coarse: C64, seq: u64) -> Cell {
        let ch = rect.children();
        let kids = [self.apply(&ch[0]), self.apply(&ch[1]), self.apply(&ch[2]), self.apply(&ch[3])];
        let fine = kids[0] + kids[1] + kids[2] + kids[3];
        let err = (fine - coarse).norm();
        Cell { rect, kids, fine, err: if err.is_nan() { f64::INFINITY } else { err }, seq }
    }
}

/// Adaptive cubature of `f` over `[x0, x1] × [y0, y1]`.
pub fn integrate_rect(f: &dyn Fn(f64, f64) -> C64, rect: [f64; 4], opts: &QuadOptions) -> QuadEstimate {
    let rule = Rule { gl: gauss_legendre(opts.order), f };
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let (nx, ny) = opts.initial;
    let [x0, x1, y0, y1] = rect;
    for i in 0..nx {
        for j in 0..ny {
            let r = Rect([
                x0 + (x1 - x0) * i as f64 / nx as f64,
                x0 + (x1 - x0) * (i + 1) as f64 / nx as f64,
                y0 + (y1 - y0) * j as f64 / ny as f64,
                y0 + (y1 - y0) * (j + 1) as f64 / ny as f64,
            ]);
            let coarse = rule.apply(&r);
            heap.push(rule.cell(r, coarse, seq));
            seq += 1;
        }
    }
    let sums = |h: &BinaryHeap<Cell>| h.iter().fold((C64::new(0.0, 0.0), 0.0), |(t, e), c| (t + c.fine, e + c.err));
    let (mut total, mut err) = sums(&heap);
    let mut steps = 0usize;
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= tol || heap.len() + 3 > opts.max_cells {
            let (total, err) = sums(&heap);
            return QuadEstimate { value: total, error: err, cells: heap.len(), converged: err <= tol };
        }
        let worst = heap.pop().unwrap();
        total -= worst.fine;
        err -= worst.err;
        for (k, r) in worst.rect.children().into_iter().enumerate() {
            let c = rule.cell(r, worst.kids[k], seq);
            total += c.fine;
            err += c.err;
            heap.push(c);
            seq += 1;
        }
        steps += 1;
        if steps % 512 == 0 || !err.is_finite() {
            (total, err) = sums(&heap);
        }
    }
}

/// Integral over ℍ via `x = xc + s·tan u`, `y = s·tan v`.
pub fn integrate_upper(f: &dyn Fn(C64) -> C64, xc: f64, s: f64, opts: &QuadOptions) -> QuadEstimate {
    let g = |u: f64, v: f64| {
        let (cu, cv) = (u.cos(), v.cos());
        let z = C64::new(xc + s * u.tan(), s * v.tan());
        let val = f(z);
        if val == C64::new(0.0, 0.0) {
            val
        } else {
            val * (s * s / (cu * cu * cv * cv))
        }
    };
    integrate_rect(&g, [-PI / 2.0, PI / 2.0, 0.0, PI / 2.0], opts)
}

/// Integral over the unit disk in polar coordinates.
pub fn integrate_disk(f: &dyn Fn(C64) -> C64, opts: &QuadOptions) -> QuadEstimate {
    let g = |r: f64, t: f64| f(C64::from_polar(r, t)) * r;
    integrate_rect(&g, [0.0, 1.0, 0.0, 2.0 * PI], opts)
}

/// Integral over `(0, xi_max) × (0, 1)` ⊂ Π₊, split dyadically in ξ so
/// that exponentially decaying integrands are resolved at every scale.
pub fn integrate_halfstrip(f: &dyn Fn(C64) -> C64, xi_max: f64, opts: &QuadOptions) -> QuadEstimate {
    let g = |x: f64, y: f64| f(C64::new(x, y));
    let mut edges = vec![0.0];
    let mut e = 0.125f64.min(xi_max);
    while e < xi_max {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(xi_max);
    let per = QuadOptions { max_cells: opts.max_cells / edges.len().max(1), initial: (1, 2), ..*opts };
    let mut out = QuadEstimate { value: C64::new(0.0, 0.0), error: 0.0, cells: 0, converged: true };
    for w in edges.windows(2) {
        let q = integrate_rect(&g, [w[0], w[1], 0.0, 1.0], &per);
        out.value += q.value;
        out.error += q.error;
        out.cells += q.cells;
        out.converged &= q.converged || q.error <= opts.abs_tol.max(opts.rel_tol * out.value.norm());
    }
    out
}

/// Adaptive Gauss–Legendre line integral `∫_a^b f(z) dz` along a segment.
pub fn integrate_segment(f: &dyn Fn(C64) -> C64, a: C64, b: C64, tol: f64) -> Result<C64> {
    let gl = gauss_legendre(10);
    let rule = |a: C64, b: C64| {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        gl.x.iter().zip(&gl.w).fold(C64::new(0.0, 0.0), |acc, (x, w)| acc + *w * f(m + h * *x)) * h
    };
    let mut total = C64::new(0.0, 0.0);
    let mut stack = vec![(a, b, rule(a, b), 0u32)];
    let scale = (b - a).norm();
    while let Some((l, r, whole, depth)) = stack.pop() {
        let m = 0.5 * (l + r);
        let (left, right) = (rule(l, m), rule(m, r));
        let err = (left + right - whole).norm();
        if err <= tol * (1.0 + (left + right).norm()) * (r - l).norm() / scale || depth >= 48 {
            if depth >= 48 || !err.is_finite() {
                return Err(Error::NotConverged(format!("segment integral near {m}")));
            }
            total += left + right;
        } else {
            stack.push((m, r, right, depth + 1));
            stack.push((l, m, left, depth + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = gauss_legendre(7);
        let s: f64 = gl.x.iter().zip(&gl.w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-14);
        assert!((gl.w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn upper_half_plane_gaussian() {
        let f = |z: C64| C64::new((-(z.re * z.re) - z.im * z.im).exp(), 0.0);
        let q = integrate_upper(&f, 0.0, 1.0, &QuadOptions::default());
        assert!(q.converged);
        assert!((q.value.re - PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn disk_area_and_moment() {
        let q = integrate_disk(&|z: C64| C64::new(z.norm_sqr(), 0.0), &QuadOptions::default());
        assert!((q.value.re - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn halfstrip_exponential() {
        let q = integrate_halfstrip(&|z: C64| (-z / 4.0).exp() / 4.0, 200.0, &QuadOptions::default());
        // ∫₀^∞ e^{-ξ/4}/4 dξ · ∫₀¹ e^{-iη/4} dη
        let want = (1.0 - (-C64::new(0.0, 0.25)).exp()) / C64::new(0.0, 0.25);
        assert!((q.value - want).norm() < 1e-8, "{}", q.value);
    }

    #[test]
    fn segment_integral_of_inverse_square() {
        let f = |z: C64| (z + C64::new(0.0, 1.0)).powi(-2);
        let (a, b) = (C64::new(-3.0, 0.5), C64::new(4.0, 2.0));
        let got = integrate_segment(&f, a, b, 1e-13).unwrap();
        let prim = |z: C64| -(z + C64::new(0.0, 1.0)).inv();
        assert!((got - (prim(b) - prim(a))).norm() < 1e-12);
    }
}
