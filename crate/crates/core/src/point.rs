use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ComplexValue {
    Finite(C64),
    Infinity,
}

impl ComplexValue {
    pub fn new(re: f64, im: f64) -> Self {
        Self::from_c64(C64::new(re, im))
    }

    /// Non-finite components collapse to the point at infinity.
    pub fn from_c64(z: C64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ComplexValue::Finite(z)
        } else {
            ComplexValue::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ComplexValue::Infinity)
    }

    pub fn finite(&self) -> Option<C64> {
        match self {
            ComplexValue::Finite(z) => Some(*z),
            ComplexValue::Infinity => None,
        }
    }

    /// Chordal distance on the sphere of diameter 1.
    pub fn chordal(&self, other: &ComplexValue) -> f64 {
        match (self, other) {
            (ComplexValue::Infinity, ComplexValue::Infinity) => 0.0,
            (ComplexValue::Finite(z), ComplexValue::Infinity)
            | (ComplexValue::Infinity, ComplexValue::Finite(z)) => 1.0 / (1.0 + z.norm_sqr()).sqrt(),
            (ComplexValue::Finite(a), ComplexValue::Finite(b)) => {
                (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }

    pub fn to_chart(&self) -> ChartPoint {
        match self {
            ComplexValue::Finite(z) => ChartPoint::Plane(*z),
            ComplexValue::Infinity => ChartPoint::Inverted(C64::new(0.0, 0.0)),
        }
    }

    pub fn re_im(&self) -> (f64, f64) {
        match self {
            ComplexValue::Finite(z) => (z.re, z.im),
            ComplexValue::Infinity => (f64::INFINITY, f64::INFINITY),
        }
    }
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue::from_c64(z)
    }
}

impl fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexValue::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            ComplexValue::Infinity => write!(f, "inf"),
        }
    }
}

/// A sphere point in one of two charts. `Inverted(s)` is the point `1/s`;
/// it keeps directional information near infinity that `ComplexValue`
/// cannot carry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChartPoint {
    Plane(C64),
    Inverted(C64),
}

impl ChartPoint {
    /// Prefer the chart in which the coordinate is bounded by 1.
    pub fn balanced(self) -> ChartPoint {
        match self {
            ChartPoint::Plane(z) if z.norm() > 1.0 => ChartPoint::Inverted(z.inv()),
            ChartPoint::Inverted(s) if s.norm() > 1.0 => ChartPoint::Plane(s.inv()),
            p => p,
        }
    }

    pub fn to_value(self) -> ComplexValue {
        match self {
            ChartPoint::Plane(z) => ComplexValue::from_c64(z),
            ChartPoint::Inverted(s) => {
                if s.norm() == 0.0 {
                    ComplexValue::Infinity
                } else {
                    ComplexValue::from_c64(s.inv())
                }
            }
        }
    }

    pub fn conj(self) -> ChartPoint {
        match self {
            ChartPoint::Plane(z) => ChartPoint::Plane(z.conj()),
            ChartPoint::Inverted(s) => ChartPoint::Inverted(s.conj()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nonfinite_collapses_to_infinity() {
        assert!(ComplexValue::new(f64::NAN, 0.0).is_infinite());
        assert!(ComplexValue::new(f64::INFINITY, 1.0).is_infinite());
        assert_eq!(ComplexValue::new(1.0, 2.0).finite(), Some(C64::new(1.0, 2.0)));
    }

    #[test]
    fn chordal_is_symmetric_and_bounded() {
        let a = ComplexValue::new(3.0, -1.0);
        let b = ComplexValue::Infinity;
        assert!((a.chordal(&b) - b.chordal(&a)).abs() < 1e-15);
        assert!(a.chordal(&b) <= 1.0);
        assert_eq!(b.chordal(&b), 0.0);
    }

    #[test]
    fn balanced_chart_round_trip() {
        let p = ChartPoint::Plane(C64::new(1e8, 3.0)).balanced();
        assert!(matches!(p, ChartPoint::Inverted(_)));
        let v = p.to_value().finite().unwrap();
        assert!((v - C64::new(1e8, 3.0)).norm() < 1e-6);
    }
}
