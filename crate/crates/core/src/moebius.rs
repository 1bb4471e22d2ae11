//! Real Möbius maps `x ↦ (ax + b)/(cx + d)` acting on ℝ ∪ {∞}: the groups
//! PGL(2,ℝ) and its orientation-preserving subgroup PSL(2,ℝ).

use std::fmt;

use crate::error::{GeomError, Result};
use crate::geometry::S1Point;

/// An element of PGL(2,ℝ), stored as a coefficient matrix up to a nonzero
/// scalar.
///
/// Stored coefficients are only ever rescaled by powers of two, which is exact
/// in floating point. The canonical representative (`|ad - bc| = 1`, first
/// nonzero coefficient positive) is available through [`MoebiusMap::normalized`].
#[derive(Clone, Copy, Debug)]
pub struct MoebiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

fn pow2_rescale(m: [f64; 4]) -> [f64; 4] {
    let big = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if big == 0.0 || !big.is_finite() {
        return m;
    }
    let exp = big.log2().floor() as i32;
    if exp == 0 {
        return m;
    }
    let scale = 2.0_f64.powi(-exp);
    [m[0] * scale, m[1] * scale, m[2] * scale, m[3] * scale]
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(GeomError::InvalidParameter(
                "Möbius coefficients must be finite".into(),
            ));
        }
        let [a, b, c, d] = pow2_rescale([a, b, c, d]);
        if a * d - b * c == 0.0 {
            return Err(GeomError::DegenerateInput(
                "Möbius map with ad - bc = 0".into(),
            ));
        }
        Ok(MoebiusMap { a, b, c, d })
    }

    /// `x ↦ rx + t`.
    pub fn affine(r: f64, t: f64) -> Result<Self> {
        Self::new(r, t, 0.0, 1.0)
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// `+1` for PSL(2,ℝ) (orientation-preserving on 𝕊¹), `-1` otherwise.
    pub fn det_sign(&self) -> i8 {
        if self.det() > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Canonical coefficients: `|ad - bc| = 1` and the first nonzero entry positive.
    pub fn normalized(&self) -> [f64; 4] {
        let s = self.det().abs().sqrt();
        let mut m = [self.a / s, self.b / s, self.c / s, self.d / s];
        if m.iter().find(|v| **v != 0.0).is_some_and(|v| *v < 0.0) {
            for v in &mut m {
                *v = -*v;
            }
        }
        // avoid printing -0
        for v in &mut m {
            if *v == 0.0 {
                *v = 0.0;
            }
        }
        m
    }

    /// Projective equality within `tol` on the canonical coefficients.
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        let p = self.normalized();
        let q = other.normalized();
        p.iter().zip(q.iter()).all(|(u, v)| (u - v).abs() <= tol)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Self::IDENTITY, tol)
    }

    pub fn apply(&self, x: S1Point) -> S1Point {
        match x {
            S1Point::Infinity => {
                if self.c == 0.0 {
                    S1Point::Infinity
                } else {
                    S1Point::new(self.a / self.c)
                }
            }
            S1Point::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    S1Point::Infinity
                } else {
                    S1Point::new((self.a * x + self.b) / den)
                }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let [a1, b1, c1, d1] = self.coefficients();
        let [a2, b2, c2, d2] = other.coefficients();
        let m = pow2_rescale([
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
        ]);
        MoebiusMap {
            a: m[0],
            b: m[1],
            c: m[2],
            d: m[3],
        }
    }

    pub fn inverse(&self) -> MoebiusMap {
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Derivative in angle coordinates, `dθ(m(x))/dθ(x)`; defined everywhere.
    pub fn angle_slope(&self, x: S1Point) -> f64 {
        let [a, b, c, d] = self.coefficients();
        let det = self.det();
        match x {
            S1Point::Infinity => det / (a * a + c * c),
            S1Point::Finite(x) if x.abs() <= 1.0 => {
                let (p, q) = (a * x + b, c * x + d);
                det * (1.0 + x * x) / (p * p + q * q)
            }
            S1Point::Finite(x) => {
                let u = 1.0 / x;
                let (p, q) = (a + b * u, c + d * u);
                det * (1.0 + u * u) / (p * p + q * q)
            }
        }
    }

    /// Derivative at a finite point that is not the pole.
    pub fn derivative(&self, x: f64) -> f64 {
        let den = self.c * x + self.d;
        self.det() / (den * den)
    }

    /// The map sending `(z1, z2, z3)` to `(0, 1, ∞)`.
    pub fn to_standard(z1: S1Point, z2: S1Point, z3: S1Point) -> Result<MoebiusMap> {
        if z1.same_as(z2) || z2.same_as(z3) || z1.same_as(z3) {
            return Err(GeomError::DegenerateInput(format!(
                "repeated point among {z1}, {z2}, {z3}"
            )));
        }
        use S1Point::{Finite, Infinity};
        match (z1, z2, z3) {
            (Infinity, Finite(z2), Finite(z3)) => Self::new(0.0, z2 - z3, 1.0, -z3),
            (Finite(z1), Infinity, Finite(z3)) => Self::new(1.0, -z1, 1.0, -z3),
            (Finite(z1), Finite(z2), Infinity) => Self::new(1.0, -z1, 0.0, z2 - z1),
            (Finite(z1), Finite(z2), Finite(z3)) => {
                Self::new(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
            }
            _ => unreachable!("at most one point is infinite"),
        }
    }

    /// The unique map with `src[i] ↦ dst[i]`.
    pub fn from_three_pairs(src: [S1Point; 3], dst: [S1Point; 3]) -> Result<MoebiusMap> {
        let s = Self::to_standard(src[0], src[1], src[2])?;
        let t = Self::to_standard(dst[0], dst[1], dst[2])?;
        Ok(t.inverse().compose(&s))
    }
}

impl Default for MoebiusMap {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// Projective equality on canonical coefficients within `1e-12`.
impl PartialEq for MoebiusMap {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, 1e-12)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.normalized();
        write!(f, "{a},{b},{c},{d}")
    }
}

/// Cross-ratio `(z1, z2; z3, z4)`, the image of `z1` under the map sending
/// `(z2, z3, z4)` to `(0, 1, ∞)`.
pub fn cross_ratio(z1: S1Point, z2: S1Point, z3: S1Point, z4: S1Point) -> Result<S1Point> {
    Ok(MoebiusMap::to_standard(z2, z3, z4)?.apply(z1))
}
