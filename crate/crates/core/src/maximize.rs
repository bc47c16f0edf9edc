//! Deterministic global maximization over ℍ.
//!
//! The search runs on several structured grids: a tangent/log grid for the
//! bulk, log-polar grids around hinted boundary points (poles), and a
//! log-polar grid in the chart `σ = −1/ζ` around ∞. The best 1% of nodes are
//! refined five times, then polished with Nelder–Mead.

use crate::point::{ChartPoint, ComplexValue};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct MaxOptions {
    pub nx: usize,
    pub ny: usize,
    pub n_polar: usize,
    pub levels: u32,
    pub top_fraction: f64,
    pub pole_radius: f64,
}

impl Default for MaxOptions {
    fn default() -> Self {
        MaxOptions { nx: 256, ny: 160, n_polar: 48, levels: 5, top_fraction: 0.01, pole_radius: 1e-2 }
    }
}

impl MaxOptions {
    pub fn quick() -> Self {
        MaxOptions { nx: 96, ny: 64, n_polar: 24, levels: 5, top_fraction: 0.01, pole_radius: 1e-2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxResult {
    pub value: f64,
    /// Maximizer in ℍ; `Inverted(s)` is the point `1/s`.
    pub argmax: ChartPoint,
    pub level: u32,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug)]
enum Family {
    Bulk { xc: f64, s: f64 },
    Polar { a: f64 },
    Infinity,
}

impl Family {
    fn point(&self, u: f64, v: f64) -> ChartPoint {
        match *self {
            Family::Bulk { xc, s } => {
                let u = u.clamp(-PI / 2.0 + 1e-15, PI / 2.0 - 1e-15);
                ChartPoint::Plane(C64::new(xc + s * u.tan(), s * v.exp()))
            }
            Family::Polar { a } => {
                let v = v.clamp(1e-300, PI - 1e-15);
                ChartPoint::Plane(C64::new(a, 0.0) + C64::from_polar(u.exp(), v))
            }
            Family::Infinity => {
                // ζ = −1/σ, σ = e^{u+iv} ∈ ℍ, so the inverted coordinate is −σ.
                let v = v.clamp(1e-300, PI - 1e-15);
                ChartPoint::Inverted(-C64::from_polar(u.exp(), v))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cand {
    fam: usize,
    u: f64,
    v: f64,
    du: f64,
    dv: f64,
    val: f64,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
}

/// Maximizes `f` over ℍ. `hints` are boundary points (real or ∞) near which
/// `f` may concentrate; `center`/`scale` set the bulk grid.
pub fn maximize_upper(
    f: &dyn Fn(ChartPoint) -> f64,
    hints: &[ComplexValue],
    center: f64,
    scale: f64,
    opts: &MaxOptions,
) -> MaxResult {
    let eval = |p: ChartPoint| {
        let v = f(p);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let mut real_hints: Vec<f64> = hints.iter().filter_map(|h| h.finite()).map(|z| z.re).collect();
    real_hints.sort_by(f64::total_cmp);
    real_hints.dedup();

    let mut fams = vec![Family::Bulk { xc: center, s: scale }, Family::Infinity];
    let mut cands = Vec::new();

    // Bulk grid: uniform in u plus hint abscissae and midpoints between them.
    let mut us = linspace(-PI / 2.0, PI / 2.0, opts.nx);
    for (i, &a) in real_hints.iter().enumerate() {
        us.push(((a - center) / scale).atan());
        if i + 1 < real_hints.len() {
            us.push(((0.5 * (a + real_hints[i + 1]) - center) / scale).atan());
        }
    }
    us.sort_by(f64::total_cmp);
    us.dedup();
    let vs = linspace((1e-8f64).ln(), (1e6f64).ln(), opts.ny);
    let dv = vs[1] - vs[0];
    for (i, &u) in us.iter().enumerate() {
        let left = if i > 0 { u - us[i - 1] } else { PI / opts.nx as f64 };
        let right = if i + 1 < us.len() { us[i + 1] - u } else { PI / opts.nx as f64 };
        let du = left.min(right).max(1e-12);
        for &v in &vs {
            cands.push(Cand { fam: 0, u, v, du, dv, val: eval(fams[0].point(u, v)) });
        }
    }

    let np = opts.n_polar;
    let push_polar = |fam: usize, fams: &Vec<Family>, lo: f64, hi: f64, cands: &mut Vec<Cand>| {
        let rs = linspace(lo, hi, np);
        let ts = linspace(0.0, PI, np);
        let (du, dv) = (rs[1] - rs[0], ts[1] - ts[0]);
        for &u in &rs {
            for &v in &ts {
                cands.push(Cand { fam, u, v, du, dv, val: eval(fams[fam].point(u, v)) });
            }
        }
    };
    push_polar(1, &fams, (1e-10 / scale).ln(), (1e-2 / scale).ln(), &mut cands);
    for &a in &real_hints {
        fams.push(Family::Polar { a });
        let k = fams.len() - 1;
        push_polar(k, &fams, (1e-10 * scale).ln(), opts.pole_radius.max(1e-6).ln(), &mut cands);
    }

    let by_val = |a: &Cand, b: &Cand| b.val.total_cmp(&a.val).then(a.fam.cmp(&b.fam)).then(a.u.total_cmp(&b.u)).then(a.v.total_cmp(&b.v));
    let keep = ((cands.len() as f64 * opts.top_fraction) as usize).max(16);
    cands.sort_by(by_val);
    let mut best = cands[0];
    let mut prev_best = best.val;
    let mut level = 0;
    let mut frontier: Vec<Cand> = cands.into_iter().take(keep).collect();
    let mut converged = false;
    for l in 1..=opts.levels {
        level = l;
        let mut next = Vec::with_capacity(frontier.len() * 49);
        for c in &frontier {
            let (du, dv) = (c.du / 3.0, c.dv / 3.0);
            for i in -3i32..=3 {
                for j in -3i32..=3 {
                    let (u, v) = (c.u + i as f64 * du, c.v + j as f64 * dv);
                    let val = if i == 0 && j == 0 { c.val } else { eval(fams[c.fam].point(u, v)) };
                    next.push(Cand { fam: c.fam, u, v, du, dv, val });
                }
            }
        }
        next.sort_by(by_val);
        next.truncate(keep);
        if by_val(&next[0], &best) == std::cmp::Ordering::Less {
            best = next[0];
        }
        converged = (best.val - prev_best).abs() <= 1e-6 * best.val.abs().max(1e-300) || best.val == prev_best;
        prev_best = best.val;
        frontier = next;
    }

    // Polish the best few distinct candidates.
    let mut polished = best;
    for c in frontier.iter().take(4) {
        let fam = fams[c.fam];
        let g = |x: [f64; 2]| eval(fam.point(x[0], x[1]));
        let (x, val) = nelder_mead_max(&g, [c.u, c.v], [c.du, c.dv], 300);
        if val > polished.val {
            polished = Cand { u: x[0], v: x[1], val, ..*c };
        }
    }
    if best.val.is_finite() && (polished.val - best.val).abs() > 1e-6 * best.val.abs() {
        // a large polish gain means the grid had not resolved the peak
        converged = false;
    }
    MaxResult { value: polished.val, argmax: fams[polished.fam].point(polished.u, polished.v), level, converged }
}

/// Derivative-free local maximization in two variables.
pub fn nelder_mead_max(f: &dyn Fn([f64; 2]) -> f64, x0: [f64; 2], step: [f64; 2], iters: usize) -> ([f64; 2], f64) {
    let mut s = [x0, [x0[0] + step[0], x0[1]], [x0[0], x0[1] + step[1]]];
    let mut fs = [f(s[0]), f(s[1]), f(s[2])];
    for _ in 0..iters {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| fs[b].total_cmp(&fs[a]));
        s = [s[idx[0]], s[idx[1]], s[idx[2]]];
        fs = [fs[idx[0]], fs[idx[1]], fs[idx[2]]];
        let size = ((s[2][0] - s[0][0]).abs() + (s[1][0] - s[0][0]).abs()) / step[0].abs().max(1e-300)
            + ((s[2][1] - s[0][1]).abs() + (s[1][1] - s[0][1]).abs()) / step[1].abs().max(1e-300);
        if size < 1e-9 {
            break;
        }
        let c = [(s[0][0] + s[1][0]) / 2.0, (s[0][1] + s[1][1]) / 2.0];
        let at = |t: f64| [c[0] + t * (s[2][0] - c[0]), c[1] + t * (s[2][1] - c[1])];
        let xr = at(-1.0);
        let fr = f(xr);
        if fr > fs[0] {
            let xe = at(-2.0);
            let fe = f(xe);
            if fe > fr {
                s[2] = xe;
                fs[2] = fe;
            } else {
                s[2] = xr;
                fs[2] = fr;
            }
        } else if fr > fs[1] {
            s[2] = xr;
            fs[2] = fr;
        } else {
            let xc = if fr > fs[2] { at(-0.5) } else { at(0.5) };
            let fc = f(xc);
            if fc > fs[2].max(fr) {
                s[2] = xc;
                fs[2] = fc;
            } else {
                for k in 1..3 {
                    s[k] = [(s[0][0] + s[k][0]) / 2.0, (s[0][1] + s[k][1]) / 2.0];
                    fs[k] = f(s[k]);
                }
            }
        }
    }
    let k = (0..3).max_by(|&a, &b| fs[a].total_cmp(&fs[b]).then(b.cmp(&a))).unwrap();
    (s[k], fs[k])
}

/// Maximizes a function of one real variable: evaluate on `nodes`, then
/// golden-section refinement around the best few.
pub fn maximize_line(f: &dyn Fn(f64) -> f64, nodes: &mut Vec<f64>) -> (f64, f64) {
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let vals: Vec<f64> = nodes.iter().map(|&x| {
        let v = f(x);
        if v.is_nan() { f64::NEG_INFINITY } else { v }
    }).collect();
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let (mut bx, mut bv) = (nodes[order[0]], vals[order[0]]);
    let gr = 0.5 * (5f64.sqrt() - 1.0);
    for &i in order.iter().take(6) {
        let lo = if i > 0 { nodes[i - 1] } else { nodes[i] - 1.0 };
        let hi = if i + 1 < nodes.len() { nodes[i + 1] } else { nodes[i] + 1.0 };
        let (mut a, mut b) = (lo, hi);
        let (mut x1, mut x2) = (b - gr * (b - a), a + gr * (b - a));
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..90 {
            if f1 > f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = f(x2);
            }
            if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
                break;
            }
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v > bv {
                bx = x;
                bv = v;
            }
        }
    }
    (bv, bx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as_plane(p: ChartPoint) -> C64 {
        match p {
            ChartPoint::Plane(z) => z,
            ChartPoint::Inverted(s) => s.inv(),
        }
    }

    #[test]
    fn finds_interior_peak() {
        let f = |p: ChartPoint| {
            let z = as_plane(p);
            let y = z.im;
            4.0 * y * y / (z + C64::new(0.0, 1.0)).norm_sqr().powi(2)
        };
        // 4y²/|z+i|⁴ peaks at z = i with value 1/4
        let r = maximize_upper(&f, &[], 0.0, 1.0, &MaxOptions::quick());
        assert!((r.value - 0.25).abs() < 1e-9, "{}", r.value);
        assert!((as_plane(r.argmax) - C64::new(0.0, 1.0)).norm() < 1e-3);
    }

    #[test]
    fn finds_boundary_supremum_near_a_pole() {
        // 4y²|1/(z−1)²| equals 4 sin²θ near the pole: sup 4, approached at the pole.
        let f = |p: ChartPoint| {
            let z = as_plane(p);
            4.0 * z.im * z.im / (z - 1.0).norm_sqr()
        };
        let r = maximize_upper(&f, &[ComplexValue::new(1.0, 0.0)], 0.0, 1.0, &MaxOptions::quick());
        assert!((r.value - 4.0).abs() < 1e-9);
    }

    #[test]
    fn line_maximum() {
        let f = |x: f64| -(x - 0.3).powi(2);
        let mut nodes: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let (v, x) = maximize_line(&f, &mut nodes);
        assert!(v.abs() < 1e-14 && (x - 0.3).abs() < 1e-7);
    }
}
