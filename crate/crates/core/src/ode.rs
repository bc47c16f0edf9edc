//! Dormand–Prince 5(4) for complex systems along straight segments.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

pub type State = [C64; 4];

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    pub renorm_every: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { atol: 1e-10, rtol: 1e-10, max_steps: 500_000, renorm_every: 100 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SegmentStats {
    pub steps: usize,
    pub rejected: usize,
    pub max_drift: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dz = f(z, y)` from `z0` to `z1` along the segment.
/// `renorm` is called every `renorm_every` accepted steps; it may rescale
/// the state in place and returns the drift it observed.
pub fn integrate_segment(
    f: &dyn Fn(C64, &State) -> State,
    z0: C64,
    z1: C64,
    y0: State,
    opts: &OdeOptions,
    renorm: &dyn Fn(&mut State) -> f64,
) -> Result<(State, SegmentStats)> {
    let dz = z1 - z0;
    let mut stats = SegmentStats::default();
    if dz.norm() == 0.0 {
        return Ok((y0, stats));
    }
    let rhs = |t: f64, y: &State| {
        let v = f(z0 + dz * t, y);
        [v[0] * dz, v[1] * dz, v[2] * dz, v[3] * dz]
    };
    let mut t = 0.0;
    let mut y = y0;
    let mut h: f64 = 0.05;
    let mut k0 = rhs(0.0, &y);
    while t < 1.0 {
        if stats.steps + stats.rejected > opts.max_steps {
            return Err(Error::Integrator(format!("step budget exhausted between {z0} and {z1}")));
        }
        h = h.min(1.0 - t);
        let mut k = [[C64::new(0.0, 0.0); 4]; 7];
        k[0] = k0;
        for s in 1..7 {
            let mut ys = y;
            for (j, a) in A[s].iter().enumerate().take(s) {
                if *a != 0.0 {
                    for i in 0..4 {
                        ys[i] += h * a * k[j][i];
                    }
                }
            }
            k[s] = rhs(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err: f64 = 0.0;
        for i in 0..4 {
            let mut e = C64::new(0.0, 0.0);
            for s in 0..7 {
                y5[i] += h * B5[s] * k[s][i];
                e += h * (B5[s] - B4[s]) * k[s][i];
            }
            let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Integrator(format!("non-finite state near {}", z0 + dz * t)));
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            k0 = k[6];
            stats.steps += 1;
            if stats.steps % opts.renorm_every == 0 {
                stats.max_drift = stats.max_drift.max(renorm(&mut y));
                k0 = rhs(t, &y);
            }
        } else {
            stats.rejected += 1;
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
        if h < 1e-14 {
            return Err(Error::Integrator(format!("step size underflow near {}", z0 + dz * t)));
        }
    }
    stats.max_drift = stats.max_drift.max(renorm(&mut y));
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_along_a_complex_segment() {
        // u″ = u, u(0) = 1, u′(0) = 1 → e^z
        let f = |_z: C64, y: &State| [y[1], y[0], C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let z1 = C64::new(1.5, -2.0);
        let (y, st) = integrate_segment(&f, zero, z1, [one, one, zero, zero], &OdeOptions::default(), &|_| 0.0).unwrap();
        assert!((y[0] - z1.exp()).norm() < 1e-8 * z1.exp().norm());
        assert!(st.steps > 0);
    }
}
