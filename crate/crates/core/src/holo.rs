//! Holomorphic functions handled by value: an evaluator, its known singular
//! points, and optionally a far-field form `z²φ(z)` in the chart `s = 1/z`.

use crate::error::{Error, Result};
use crate::point::{ChartPoint, ComplexValue};
use num_complex::Complex64 as C64;
use serde::Deserialize;
use std::f64::consts::PI;
use std::sync::Arc;

type Eval = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub struct Holo {
    f: Eval,
    far: Option<Eval>,
    pub singularities: Vec<ComplexValue>,
    pub label: String,
}

impl std::fmt::Debug for Holo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Holo({})", self.label)
    }
}

impl Holo {
    pub fn new(label: impl Into<String>, f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        Holo { f: Arc::new(f), far: None, singularities: vec![], label: label.into() }
    }

    pub fn with_singularities(mut self, s: Vec<ComplexValue>) -> Self {
        self.singularities = s;
        self
    }

    /// `s ↦ z²φ(z)` at `z = 1/s`, analytic at `s = 0` for quadratic
    /// differentials regular at ∞.
    pub fn with_far_field(mut self, far: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        self.far = Some(Arc::new(far));
        self
    }

    pub fn eval(&self, z: C64) -> C64 {
        (self.f)(z)
    }

    pub fn far_field(&self, s: C64) -> C64 {
        match &self.far {
            Some(g) => g(s),
            None => {
                let z = s.inv();
                z * z * self.eval(z)
            }
        }
    }

    /// `φ` at a chart point, as `(φ(z))` in the plane chart or
    /// `z²φ(z)` in the inverted chart.
    pub fn eval_chart(&self, p: ChartPoint) -> C64 {
        match p {
            ChartPoint::Plane(z) => self.eval(z),
            ChartPoint::Inverted(s) => self.far_field(s),
        }
    }

    pub fn zero() -> Self {
        Holo::new("zero", |_| C64::new(0.0, 0.0)).with_far_field(|_| C64::new(0.0, 0.0))
    }

    pub fn scale(&self, k: C64) -> Holo {
        let (f, g) = (self.clone(), self.clone());
        Holo::new(format!("{k}·{}", self.label), move |z| k * f.eval(z))
            .with_far_field(move |s| k * g.far_field(s))
            .with_singularities(self.singularities.clone())
    }

    pub fn sub(&self, other: &Holo) -> Holo {
        let (a, b, a2, b2) = (self.clone(), other.clone(), self.clone(), other.clone());
        let mut sing = self.singularities.clone();
        sing.extend(other.singularities.iter().copied());
        Holo::new(format!("{}-{}", self.label, other.label), move |z| a.eval(z) - b.eval(z))
            .with_far_field(move |s| a2.far_field(s) - b2.far_field(s))
            .with_singularities(sing)
    }

    /// Laurent coefficients `m_0, …, m_{k−1}` at ∞ (`φ = Σ m_j z^{−j}`)
    /// from a contour integral on `|z| = radius`, which must enclose every
    /// finite singularity.
    pub fn laurent_at_infinity(&self, k: usize, radius: f64) -> Vec<C64> {
        let n = 1024;
        (0..k)
            .map(|j| {
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..n {
                    let z = C64::from_polar(radius, 2.0 * PI * (t as f64 + 0.5) / n as f64);
                    acc += self.eval(z) * z.powu(j as u32);
                }
                acc / n as f64
            })
            .collect()
    }

    pub fn singularity_radius(&self) -> f64 {
        self.singularities.iter().filter_map(|p| p.finite()).map(|p| p.norm()).fold(0.0, f64::max)
    }
}

/// Named closed forms accepted in configuration files.
#[derive(Clone, Debug, Deserialize, serde::Serialize, PartialEq)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum NamedFunction {
    Zero,
    Constant { c: [f64; 2] },
    /// `c/(z − a)²`
    InverseSquare { c: [f64; 2], #[serde(default)] a: [f64; 2] },
    /// `scale/(z − x0 + i b)^k`, poles in the lower half-plane for `b > 0`.
    ShiftedPower { k: u32, b: f64, #[serde(default)] x0: f64, #[serde(default = "one")] scale: f64 },
}

fn one() -> f64 {
    1.0
}

impl NamedFunction {
    pub fn build(&self) -> Result<Holo> {
        Ok(match self.clone() {
            NamedFunction::Zero => Holo::zero(),
            NamedFunction::Constant { c } => {
                let c = C64::new(c[0], c[1]);
                Holo::new("constant", move |_| c)
                    .with_far_field(move |s| c / (s * s))
                    .with_singularities(vec![ComplexValue::Infinity])
            }
            NamedFunction::InverseSquare { c, a } => {
                let (c, a) = (C64::new(c[0], c[1]), C64::new(a[0], a[1]));
                Holo::new("inverse_square", move |z| c / ((z - a) * (z - a)))
                    .with_far_field(move |s| c / ((1.0 - a * s) * (1.0 - a * s)))
                    .with_singularities(vec![ComplexValue::Finite(a)])
            }
            NamedFunction::ShiftedPower { k, b, x0, scale } => {
                if k == 0 {
                    return Err(Error::InvalidInput("shifted power needs k ≥ 1".into()));
                }
                let p = C64::new(x0, -b);
                Holo::new(format!("shifted_power_{k}"), move |z| scale / (z - p).powu(k))
                    .with_far_field(move |s| scale * s.powu(k) / (s * s * (1.0 - p * s).powu(k)))
                    .with_singularities(vec![ComplexValue::Finite(p)])
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn far_field_matches_direct_evaluation() {
        let f = NamedFunction::ShiftedPower { k: 3, b: 1.0, x0: 0.5, scale: 2.0 }.build().unwrap();
        let z = C64::new(3.0, 4.0);
        assert!((f.far_field(z.inv()) - z * z * f.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn laurent_at_infinity_of_inverse_square() {
        let f = NamedFunction::InverseSquare { c: [1.0, 0.0], a: [0.0, -1.0] }.build().unwrap();
        // 1/(z+i)² = z^-2 − 2i z^-3 − 3 z^-4 + …
        let m = f.laurent_at_infinity(4, 4.0);
        assert!(m[0].norm() < 1e-13 && m[1].norm() < 1e-13);
        assert!((m[2] - 1.0).norm() < 1e-12);
        assert!((m[3] - C64::new(0.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn named_functions_parse_from_json() {
        let v: NamedFunction = serde_json::from_str(r#"{"name":"shifted_power","k":2,"b":1.0}"#).unwrap();
        assert_eq!(v, NamedFunction::ShiftedPower { k: 2, b: 1.0, x0: 0.0, scale: 1.0 });
    }
}
