use crate::error::{Error, Result};
use crate::point::ComplexValue;
use num_complex::Complex64 as C64;

/// `z ↦ (a z + b) / (c z + d)`, `ad − bc ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let m = Mobius { a, b, c, d };
        let det = m.det();
        let scale = [a, b, c, d].iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(det.norm() > 1e-14 * scale * scale) {
            return Err(Error::InvalidInput("degenerate Möbius map".into()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Mobius { a: c(1.0, 0.0), b: c(0.0, 0.0), c: c(0.0, 0.0), d: c(1.0, 0.0) }
    }

    /// Cayley map `(z − i)/(z + i)` from ℍ onto 𝔻.
    pub fn cayley() -> Self {
        Mobius { a: c(1.0, 0.0), b: c(0.0, -1.0), c: c(1.0, 0.0), d: c(0.0, 1.0) }
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: ComplexValue) -> ComplexValue {
        match z {
            ComplexValue::Infinity => {
                if self.c == C64::new(0.0, 0.0) {
                    ComplexValue::Infinity
                } else {
                    ComplexValue::from_c64(self.a / self.c)
                }
            }
            ComplexValue::Finite(z) => {
                let den = self.c * z + self.d;
                if den == C64::new(0.0, 0.0) {
                    ComplexValue::Infinity
                } else {
                    ComplexValue::from_c64((self.a * z + self.b) / den)
                }
            }
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Value and the first three derivatives at a finite point.
    pub fn jet(&self, z: C64) -> [C64; 4] {
        let den = self.c * z + self.d;
        let d1 = self.det() / (den * den);
        let r = self.c / den;
        [self.eval(z), d1, -2.0 * d1 * r, 6.0 * d1 * r * r]
    }

    pub fn inverse(&self) -> Mobius {
        Mobius { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// The map sending `z1, z2, z3` to `0, 1, ∞`.
    pub fn to_zero_one_infinity(z1: ComplexValue, z2: ComplexValue, z3: ComplexValue) -> Result<Mobius> {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let m = match (z1, z2, z3) {
            (ComplexValue::Infinity, ComplexValue::Finite(b), ComplexValue::Finite(cc)) => {
                Mobius { a: zero, b: b - cc, c: one, d: -cc }
            }
            (ComplexValue::Finite(a), ComplexValue::Infinity, ComplexValue::Finite(cc)) => {
                Mobius { a: one, b: -a, c: one, d: -cc }
            }
            (ComplexValue::Finite(a), ComplexValue::Finite(b), ComplexValue::Infinity) => {
                Mobius { a: one, b: -a, c: zero, d: b - a }
            }
            (ComplexValue::Finite(a), ComplexValue::Finite(b), ComplexValue::Finite(cc)) => Mobius {
                a: b - cc,
                b: -a * (b - cc),
                c: b - a,
                d: -cc * (b - a),
            },
            _ => return Err(Error::InvalidInput("three distinct points required".into())),
        };
        Mobius::new(m.a, m.b, m.c, m.d)
    }

    /// True when a real multiple of the coefficients is real.
    pub fn is_real(&self, tol: f64) -> bool {
        let coeffs = [self.a, self.b, self.c, self.d];
        let pivot = coeffs.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        let phase = pivot.conj() / pivot.norm();
        coeffs.iter().all(|v| (v * phase).im.abs() <= tol * pivot.norm())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cayley_sends_i_to_origin_and_infinity_to_one() {
        let m = Mobius::cayley();
        assert_eq!(m.apply(ComplexValue::Finite(c(0.0, 1.0))), ComplexValue::Finite(c(0.0, 0.0)));
        assert_eq!(m.apply(ComplexValue::Infinity), ComplexValue::Finite(c(1.0, 0.0)));
        assert!(m.apply(ComplexValue::Finite(c(0.0, -1.0))).is_infinite());
    }

    #[test]
    fn three_point_normalization() {
        let pts = [
            ComplexValue::Finite(c(2.0, 1.0)),
            ComplexValue::Infinity,
            ComplexValue::Finite(c(-1.0, 0.5)),
        ];
        let m = Mobius::to_zero_one_infinity(pts[0], pts[1], pts[2]).unwrap();
        assert!(m.apply(pts[0]).chordal(&ComplexValue::new(0.0, 0.0)) < 1e-14);
        assert!(m.apply(pts[1]).chordal(&ComplexValue::new(1.0, 0.0)) < 1e-14);
        assert!(m.apply(pts[2]).is_infinite());
    }

    #[test]
    fn jet_matches_finite_differences() {
        let m = Mobius::new(c(1.0, 2.0), c(0.5, 0.0), c(0.3, -0.1), c(2.0, 1.0)).unwrap();
        let z = c(0.4, 0.7);
        let h = 1e-5;
        let j = m.jet(z);
        let fd = (m.eval(z + h) - m.eval(z - h)) / (2.0 * h);
        assert!((j[1] - fd).norm() < 1e-8);
        let fd2 = (m.jet(z + h)[1] - m.jet(z - h)[1]) / (2.0 * h);
        assert!((j[2] - fd2).norm() < 1e-7);
        let fd3 = (m.jet(z + h)[2] - m.jet(z - h)[2]) / (2.0 * h);
        assert!((j[3] - fd3).norm() < 1e-6);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let m = Mobius::new(c(1.0, 2.0), c(0.5, 0.0), c(0.3, -0.1), c(2.0, 1.0)).unwrap();
        let id = m.compose(&m.inverse());
        let z = c(0.7, -3.0);
        assert!((id.eval(z) - z).norm() < 1e-12);
    }
}
