use std::fmt;

use crate::error::{GeomError, Result};
use crate::geometry::S1Point;
use crate::moebius::MoebiusMap;

/// The semi-multiplicative homeomorphism `f_{r,s}`:
/// `x ↦ x^r` for `x ≥ 0`, `x ↦ -s|x|^r` for `x < 0`, `∞ ↦ ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SemiMult {
    r: f64,
    s: f64,
}

impl SemiMult {
    pub const IDENTITY: SemiMult = SemiMult { r: 1.0, s: 1.0 };

    pub fn new(r: f64, s: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(GeomError::InvalidParameter(format!(
                "semi-multiplicative exponent r must be positive, got {r}"
            )));
        }
        if !(s > 0.0 && s.is_finite()) {
            return Err(GeomError::InvalidParameter(format!(
                "semi-multiplicative factor s must be positive, got {s}"
            )));
        }
        Ok(SemiMult { r, s })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn is_identity(&self) -> bool {
        self.r == 1.0 && self.s == 1.0
    }

    /// Evaluation on a finite real.
    #[inline]
    pub fn eval_real(&self, x: f64) -> f64 {
        if x >= 0.0 {
            if self.r == 1.0 {
                x
            } else {
                x.powf(self.r)
            }
        } else if self.r == 1.0 {
            self.s * x
        } else {
            -self.s * (-x).powf(self.r)
        }
    }

    #[inline]
    pub fn inverse_real(&self, y: f64) -> f64 {
        if y >= 0.0 {
            if self.r == 1.0 {
                y
            } else {
                y.powf(1.0 / self.r)
            }
        } else if self.r == 1.0 {
            y / self.s
        } else {
            -(-y / self.s).powf(1.0 / self.r)
        }
    }

    pub fn eval(&self, x: S1Point) -> S1Point {
        match x {
            S1Point::Infinity => S1Point::Infinity,
            S1Point::Finite(v) => S1Point::new(self.eval_real(v)),
        }
    }

    /// Derivative in angle coordinates; NaN at `0` and `∞` unless `f` is
    /// the identity.
    pub fn angle_slope(&self, x: S1Point) -> f64 {
        if self.is_identity() {
            return 1.0;
        }
        match x {
            S1Point::Finite(v) if v != 0.0 => {
                let y = self.eval_real(v).abs();
                let v = v.abs();
                self.r * (v + 1.0 / v) / (y + 1.0 / y)
            }
            _ => f64::NAN,
        }
    }

    pub fn inverse(&self, y: S1Point) -> S1Point {
        match y {
            S1Point::Infinity => S1Point::Infinity,
            S1Point::Finite(v) => S1Point::new(self.inverse_real(v)),
        }
    }
}

/// `f_{r,s}(x)`.
pub fn semi_mult_eval(r: f64, s: f64, x: S1Point) -> Result<S1Point> {
    Ok(SemiMult::new(r, s)?.eval(x))
}

/// Inverse of `f_{r,s}`.
pub fn semi_mult_inverse(r: f64, s: f64, y: S1Point) -> Result<S1Point> {
    Ok(SemiMult::new(r, s)?.inverse(y))
}

/// A homeomorphism of 𝕊¹ given by a symbolic descriptor.
///
/// `Composite` applies its members left to right.
#[derive(Clone, Debug, PartialEq)]
pub enum Homeo {
    Identity,
    SemiMult(SemiMult),
    Moebius(MoebiusMap),
    Composite(Vec<Homeo>),
}

impl Homeo {
    pub fn semi_mult(r: f64, s: f64) -> Result<Self> {
        Ok(Homeo::SemiMult(SemiMult::new(r, s)?))
    }

    pub fn eval(&self, x: S1Point) -> S1Point {
        match self {
            Homeo::Identity => x,
            Homeo::SemiMult(f) => f.eval(x),
            Homeo::Moebius(m) => m.apply(x),
            Homeo::Composite(parts) => parts.iter().fold(x, |acc, h| h.eval(acc)),
        }
    }

    pub fn inverse_eval(&self, y: S1Point) -> S1Point {
        match self {
            Homeo::Identity => y,
            Homeo::SemiMult(f) => f.inverse(y),
            Homeo::Moebius(m) => m.inverse().apply(y),
            Homeo::Composite(parts) => parts.iter().rev().fold(y, |acc, h| h.inverse_eval(acc)),
        }
    }

    /// Derivative in angle coordinates (NaN where not differentiable).
    pub fn angle_slope(&self, x: S1Point) -> f64 {
        match self {
            Homeo::Identity => 1.0,
            Homeo::SemiMult(f) => f.angle_slope(x),
            Homeo::Moebius(m) => m.angle_slope(x),
            Homeo::Composite(parts) => {
                let mut slope = 1.0;
                let mut at = x;
                for h in parts {
                    slope *= h.angle_slope(at);
                    at = h.eval(at);
                }
                slope
            }
        }
    }

    pub fn is_orientation_preserving(&self) -> bool {
        match self {
            Homeo::Identity | Homeo::SemiMult(_) => true,
            Homeo::Moebius(m) => m.det_sign() > 0,
            Homeo::Composite(parts) => {
                parts
                    .iter()
                    .filter(|h| !h.is_orientation_preserving())
                    .count()
                    % 2
                    == 0
            }
        }
    }

    /// Structurally the identity (no numeric probing).
    pub fn is_trivially_identity(&self) -> bool {
        match self {
            Homeo::Identity => true,
            Homeo::SemiMult(f) => f.is_identity(),
            Homeo::Moebius(m) => m.is_identity(0.0),
            Homeo::Composite(parts) => parts.iter().all(Homeo::is_trivially_identity),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn after(&self, other: &Homeo) -> Homeo {
        match (self, other) {
            (Homeo::Identity, h) | (h, Homeo::Identity) => h.clone(),
            (Homeo::Moebius(a), Homeo::Moebius(b)) => Homeo::Moebius(a.compose(b)),
            _ => {
                let mut parts = Vec::new();
                for h in [other, self] {
                    match h {
                        Homeo::Composite(inner) => parts.extend(inner.iter().cloned()),
                        h => parts.push(h.clone()),
                    }
                }
                Homeo::Composite(parts)
            }
        }
    }
}

impl fmt::Display for Homeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Homeo::Identity => write!(f, "id"),
            Homeo::SemiMult(m) => write!(f, "semi({},{})", m.r, m.s),
            Homeo::Moebius(m) => write!(f, "moebius({m})"),
            Homeo::Composite(parts) => {
                write!(f, "composite(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::INF;
    use proptest::prelude::*;

    fn f(x: f64) -> S1Point {
        S1Point::Finite(x)
    }

    #[test]
    fn semi_mult_examples() {
        for x in [f(-2.0), f(0.0), f(5.0), INF] {
            assert_eq!(semi_mult_eval(1.0, 1.0, x).unwrap(), x);
        }
        assert_eq!(semi_mult_eval(2.0, 3.0, f(-2.0)).unwrap(), f(-12.0));
        assert_eq!(semi_mult_inverse(2.0, 3.0, f(-12.0)).unwrap(), f(-2.0));
        assert!(semi_mult_eval(0.0, 1.0, f(1.0)).is_err());
        assert!(semi_mult_eval(1.0, -1.0, f(1.0)).is_err());
    }

    #[test]
    fn composite_order() {
        let h = Homeo::Composite(vec![
            Homeo::Moebius(MoebiusMap::affine(1.0, 1.0).unwrap()),
            Homeo::semi_mult(2.0, 1.0).unwrap(),
        ]);
        // (2 + 1)^2
        assert_eq!(h.eval(f(2.0)), f(9.0));
        assert_eq!(h.inverse_eval(f(9.0)), f(2.0));
    }

    #[test]
    fn orientation_flags() {
        assert!(Homeo::semi_mult(0.3, 7.0)
            .unwrap()
            .is_orientation_preserving());
        let rev = Homeo::Moebius(MoebiusMap::new(0.0, 1.0, 1.0, 0.0).unwrap());
        assert!(!rev.is_orientation_preserving());
        assert!(Homeo::Composite(vec![rev.clone(), rev]).is_orientation_preserving());
    }

    proptest! {
        #[test]
        fn semi_mult_inverse_roundtrip(r in 0.2f64..5.0, s in 0.2f64..5.0, x in -50.0f64..50.0) {
            let m = SemiMult::new(r, s).unwrap();
            let back = m.inverse(m.eval(f(x)));
            prop_assert!(back.chart_distance(f(x)) <= 1e-10);
        }

        #[test]
        fn semi_mult_homogeneity(d in 0.2f64..5.0, s in 0.2f64..5.0, r in 0.01f64..100.0, x in -100.0f64..100.0) {
            let m = SemiMult::new(d, s).unwrap();
            let lhs = m.eval_real(r * x);
            let rhs = r.powf(d) * m.eval_real(x);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(f64::MIN_POSITIVE));
        }
    }
}
