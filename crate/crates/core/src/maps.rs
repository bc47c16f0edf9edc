//! Holomorphic maps with derivative jets, and serializable chains of
//! elementary maps used to build quasidisks.

use crate::domains::DomainKind;
use crate::error::{Error, Result};
use crate::mobius::Mobius;
use crate::point::ComplexValue;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Value and derivatives of a holomorphic map at a point. The third
/// derivative is present only when analytically available.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: C64,
    pub d1: C64,
    pub d2: C64,
    pub d3: Option<C64>,
}

impl Jet {
    pub fn identity(z: C64) -> Jet {
        Jet { value: z, d1: C64::new(1.0, 0.0), d2: C64::new(0.0, 0.0), d3: Some(C64::new(0.0, 0.0)) }
    }

    /// Jet of `h ∘ u` where `h` has derivatives `h` at `u.value`.
    pub fn push(&self, h: [C64; 4], h3_known: bool) -> Jet {
        let (u1, u2) = (self.d1, self.d2);
        let d3 = match (self.d3, h3_known) {
            (Some(u3), true) => Some(h[3] * u1 * u1 * u1 + 3.0 * h[2] * u1 * u2 + h[1] * u3),
            _ => None,
        };
        Jet { value: h[0], d1: h[1] * u1, d2: h[2] * u1 * u1 + h[1] * u2, d3 }
    }
}

type JetFn = Arc<dyn Fn(C64) -> Result<Jet> + Send + Sync>;
type InvFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

#[derive(Clone)]
pub struct AnalyticMap {
    jet: JetFn,
    inverse: Option<InvFn>,
    pub domain: DomainKind,
    pub codomain: DomainKind,
    pub label: String,
}

impl std::fmt::Debug for AnalyticMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "AnalyticMap({}: {:?} -> {:?})", self.label, self.domain, self.codomain)
    }
}

impl AnalyticMap {
    pub fn new(
        label: impl Into<String>,
        domain: DomainKind,
        codomain: DomainKind,
        jet: impl Fn(C64) -> Result<Jet> + Send + Sync + 'static,
    ) -> Self {
        AnalyticMap { jet: Arc::new(jet), inverse: None, domain, codomain, label: label.into() }
    }

    pub fn with_inverse(mut self, inv: impl Fn(C64) -> Result<C64> + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inv));
        self
    }

    pub fn identity(kind: DomainKind) -> Self {
        AnalyticMap::new("id", kind, kind, |z| Ok(Jet::identity(z))).with_inverse(Ok)
    }

    pub fn from_mobius(m: Mobius, domain: DomainKind, codomain: DomainKind) -> Self {
        let inv = m.inverse();
        AnalyticMap::new("mobius", domain, codomain, move |z| {
            let j = m.jet(z);
            if !(j[0].re.is_finite() && j[0].im.is_finite()) {
                return Err(Error::Pole(ComplexValue::Finite(z)));
            }
            Ok(Jet { value: j[0], d1: j[1], d2: j[2], d3: Some(j[3]) })
        })
        .with_inverse(move |w| Ok(inv.eval(w)))
    }

    pub fn jet(&self, z: C64) -> Result<Jet> {
        (self.jet)(z)
    }

    pub fn value(&self, z: C64) -> Result<C64> {
        Ok(self.jet(z)?.value)
    }

    pub fn derivative(&self, z: C64) -> Result<C64> {
        Ok(self.jet(z)?.d1)
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse(&self, w: C64) -> Result<C64> {
        match &self.inverse {
            Some(f) => f(w),
            None => Err(Error::InvalidInput(format!("map {} has no inverse", self.label))),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AnalyticMap) -> AnalyticMap {
        let (outer_j, inner_j) = (self.jet.clone(), inner.jet.clone());
        let mut m = AnalyticMap::new(
            format!("{}∘{}", self.label, inner.label),
            inner.domain,
            self.codomain,
            move |z| {
                let u = inner_j(z)?;
                let h = outer_j(u.value)?;
                Ok(u.push([h.value, h.d1, h.d2, h.d3.unwrap_or_default()], h.d3.is_some()))
            },
        );
        if let (Some(oi), Some(ii)) = (self.inverse.clone(), inner.inverse.clone()) {
            m.inverse = Some(Arc::new(move |w| ii(oi(w)?)));
        }
        m
    }

    /// Checks a nonvanishing derivative that agrees with central
    /// differences (relative 1e-6) at every sample.
    pub fn check_conformal(&self, samples: &[C64]) -> Result<()> {
        for &z in samples {
            let j = self.jet(z)?;
            let h = 1e-5 * (1.0 + z.norm());
            let fd = (self.value(z + h)? - self.value(z - h)?) / (2.0 * h);
            let scale = j.d1.norm();
            if !(scale > 1e-300) {
                return Err(Error::CriticalPoint(ComplexValue::Finite(z)));
            }
            if (fd - j.d1).norm() > 1e-6 * scale.max(1e-300) + 1e-12 * j.value.norm() / h {
                return Err(Error::Invariant {
                    message: format!("derivative of {} disagrees with finite differences", self.label),
                    witness: ComplexValue::Finite(z),
                });
            }
        }
        Ok(())
    }

    /// Newton refinement of an approximate preimage.
    pub fn newton_inverse(&self, w: C64, guess: C64) -> Result<C64> {
        let mut z = guess;
        for _ in 0..40 {
            let j = self.jet(z)?;
            if j.d1.norm() == 0.0 {
                return Err(Error::CriticalPoint(ComplexValue::Finite(z)));
            }
            let step = (j.value - w) / j.d1;
            z -= step;
            if step.norm() <= 1e-15 * (1.0 + z.norm()) {
                break;
            }
        }
        Ok(z)
    }
}

/// Elementary map in a chain. Serialized with an `op` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Primitive {
    Mobius { a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2] },
    Power { alpha: f64 },
    Exp,
    CoshPi,
    Affine { a: [f64; 2], b: [f64; 2] },
}

fn cx(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

impl Primitive {
    fn mobius(&self) -> Option<Mobius> {
        match self {
            Primitive::Mobius { a, b, c, d } => Some(Mobius { a: cx(*a), b: cx(*b), c: cx(*c), d: cx(*d) }),
            Primitive::Affine { a, b } => {
                Some(Mobius { a: cx(*a), b: cx(*b), c: C64::new(0.0, 0.0), d: C64::new(1.0, 0.0) })
            }
            _ => None,
        }
    }

    pub fn derivatives(&self, u: C64) -> Result<[C64; 4]> {
        if let Some(m) = self.mobius() {
            let j = m.jet(u);
            if !(j[0].re.is_finite() && j[0].im.is_finite()) {
                return Err(Error::Pole(ComplexValue::Finite(u)));
            }
            return Ok(j);
        }
        Ok(match self {
            Primitive::Power { alpha } => {
                if u.norm() == 0.0 {
                    return Err(Error::CriticalPoint(ComplexValue::Finite(u)));
                }
                let a = *alpha;
                let w = (a * u.ln()).exp();
                [w, a * w / u, a * (a - 1.0) * w / (u * u), a * (a - 1.0) * (a - 2.0) * w / (u * u * u)]
            }
            Primitive::Exp => {
                let e = u.exp();
                [e, e, e, e]
            }
            Primitive::CoshPi => {
                let (ch, sh) = ((PI * u).cosh(), (PI * u).sinh());
                [ch, PI * sh, PI * PI * ch, PI * PI * PI * sh]
            }
            _ => unreachable!(),
        })
    }

    pub fn inverse(&self, w: C64) -> Result<C64> {
        if let Some(m) = self.mobius() {
            return Ok(m.inverse().eval(w));
        }
        Ok(match self {
            Primitive::Power { alpha } => {
                if w.norm() == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    (w.ln() / *alpha).exp()
                }
            }
            Primitive::Exp => w.ln(),
            Primitive::CoshPi => w.acosh() / PI,
            _ => unreachable!(),
        })
    }

    /// Points (in this primitive's source coordinates) where its Schwarzian
    /// is singular.
    fn singular_points(&self) -> Vec<C64> {
        match self {
            Primitive::Power { .. } => vec![C64::new(0.0, 0.0)],
            Primitive::CoshPi => (-2..=2).map(|k| C64::new(0.0, k as f64)).collect(),
            _ => vec![],
        }
    }
}

/// Composition of primitives, applied first to last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MapChain {
    pub ops: Vec<Primitive>,
}

impl MapChain {
    pub fn new(ops: Vec<Primitive>) -> Self {
        MapChain { ops }
    }

    pub fn jet(&self, z: C64) -> Result<Jet> {
        let mut j = Jet::identity(z);
        for op in &self.ops {
            let h = op.derivatives(j.value)?;
            j = j.push(h, true);
        }
        Ok(j)
    }

    /// Principal-branch inverse of each stage in reverse order.
    pub fn inverse_guess(&self, w: C64) -> Result<C64> {
        let mut z = w;
        for op in self.ops.iter().rev() {
            z = op.inverse(z)?;
        }
        Ok(z)
    }

    /// Singular points of the Schwarzian pulled back to source coordinates.
    pub fn schwarzian_singularities(&self) -> Vec<C64> {
        let mut out = Vec::new();
        for (i, op) in self.ops.iter().enumerate() {
            for p in op.singular_points() {
                let mut z = p;
                let mut ok = true;
                for prev in self.ops[..i].iter().rev() {
                    match prev.inverse(z) {
                        Ok(v) if v.re.is_finite() && v.im.is_finite() => z = v,
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    out.push(z);
                }
            }
        }
        out
    }

    pub fn to_map(&self, domain: DomainKind, codomain: DomainKind) -> AnalyticMap {
        let chain = self.clone();
        let chain_inv = self.clone();
        let fwd = AnalyticMap::new("chain", domain, codomain, move |z| chain.jet(z));
        let fwd2 = fwd.clone();
        fwd.with_inverse(move |w| {
            let guess = chain_inv.inverse_guess(w)?;
            fwd2.newton_inverse(w, guess)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_chain() -> MapChain {
        MapChain::new(vec![
            Primitive::Power { alpha: 0.9 },
            Primitive::Affine { a: [1.0, 0.2], b: [0.3, 0.0] },
            Primitive::Mobius { a: [1.0, 0.0], b: [0.0, 0.0], c: [0.1, 0.0], d: [1.0, 0.0] },
        ])
    }

    #[test]
    fn chain_json_is_op_tagged() {
        let s = serde_json::to_string(&sample_chain()).unwrap();
        assert!(s.starts_with("[{\"op\":\"power\""));
        let back: MapChain = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sample_chain());
    }

    #[test]
    fn chain_jet_matches_finite_differences() {
        let ch = sample_chain();
        let z = C64::new(0.3, 1.1);
        let h = 1e-4;
        let j = ch.jet(z).unwrap();
        let d2 = |z| ch.jet(z).unwrap().d2;
        let fd3 = (d2(z + h) - d2(z - h)) / (2.0 * h);
        assert!((j.d3.unwrap() - fd3).norm() < 1e-6 * (1.0 + fd3.norm()));
        let m = ch.to_map(DomainKind::UpperHalfPlane, DomainKind::Quasidisk);
        m.check_conformal(&[z, C64::new(-2.0, 0.5)]).unwrap();
    }

    #[test]
    fn cosh_pi_inverse_lands_in_half_strip() {
        let p = Primitive::CoshPi;
        let w = C64::new(-3.0, 0.7);
        let z = p.inverse(w).unwrap();
        assert!(z.re > 0.0 && z.im > 0.0 && z.im < 1.0);
        assert!((p.derivatives(z).unwrap()[0] - w).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn chain_inverse_round_trips(x in -5.0f64..5.0, y in 0.01f64..5.0) {
            let m = sample_chain().to_map(DomainKind::UpperHalfPlane, DomainKind::Quasidisk);
            let z = C64::new(x, y);
            let w = m.value(z).unwrap();
            let back = m.inverse(w).unwrap();
            prop_assert!((back - z).norm() < 1e-9 * (1.0 + z.norm()));
        }
    }
}
