//! Points of the circle 𝕊¹ = ℝ ∪ {∞}, the torus 𝕊¹ × 𝕊¹, and the metrics on them.
//!
//! The circle is parametrized by angle through `x = tan(θ/2)`, so `0 ↦ 0`,
//! `1 ↦ π/2`, `∞ ↦ π` and `-1 ↦ 3π/2`. The torus is embedded in ℝ³ as the
//! standard ring torus with radii 2 and 1, which fixes the metric `e`.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GeomError, Result};

/// Tolerance for coincidence of two circle points in chart coordinates.
pub const POINT_EQ_TOL: f64 = 1e-12;

/// Torus radii of the embedding used by [`metric_e`].
pub const MAJOR_RADIUS: f64 = 2.0;
pub const MINOR_RADIUS: f64 = 1.0;

/// A point of 𝕊¹ = ℝ ∪ {∞}. The point at infinity is a distinct state, never a
/// large float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum S1Point {
    Finite(f64),
    Infinity,
}

pub use S1Point::Infinity as INF;

impl S1Point {
    pub fn new(x: f64) -> Self {
        if x.is_finite() {
            S1Point::Finite(x)
        } else {
            S1Point::Infinity
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, S1Point::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            S1Point::Finite(x) => Some(x),
            S1Point::Infinity => None,
        }
    }

    /// The inverted chart `x ↦ -1/x`, with `∞ ↦ 0`.
    pub fn inverted_chart(self) -> f64 {
        match self {
            S1Point::Finite(x) => -1.0 / x,
            S1Point::Infinity => 0.0,
        }
    }

    /// Distance in chart coordinates: the plain chart when both points have
    /// modulus at most one, the chart `x ↦ -1/x` otherwise.
    pub fn chart_distance(self, other: S1Point) -> f64 {
        match (self, other) {
            (S1Point::Infinity, S1Point::Infinity) => 0.0,
            (S1Point::Finite(a), S1Point::Finite(b)) if a.abs() <= 1.0 && b.abs() <= 1.0 => {
                (a - b).abs()
            }
            _ => (self.inverted_chart() - other.inverted_chart()).abs(),
        }
    }

    /// Coincidence: exact on the `∞` flag, within [`POINT_EQ_TOL`] in chart
    /// coordinates otherwise.
    pub fn same_as(self, other: S1Point) -> bool {
        match (self, other) {
            (S1Point::Infinity, S1Point::Infinity) => true,
            (S1Point::Finite(_), S1Point::Finite(_)) => self.chart_distance(other) <= POINT_EQ_TOL,
            _ => false,
        }
    }

    /// Angle parameter in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        angle_of(self)
    }
}

impl From<f64> for S1Point {
    fn from(x: f64) -> Self {
        S1Point::new(x)
    }
}

impl fmt::Display for S1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            S1Point::Finite(x) => write!(f, "{x}"),
            S1Point::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for S1Point {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" | "+inf" | "-inf" => return Ok(S1Point::Infinity),
            _ => {}
        }
        t.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(S1Point::Finite)
            .ok_or_else(|| GeomError::InvalidParameter(format!("not a circle point: {s:?}")))
    }
}

impl Serialize for S1Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            S1Point::Finite(x) => serializer.serialize_f64(*x),
            S1Point::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for S1Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(x) => Ok(S1Point::new(x)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Angle of a circle point in `[0, 2π)`; `∞` sits at `π`.
pub fn angle_of(x: S1Point) -> f64 {
    match x {
        S1Point::Infinity => PI,
        S1Point::Finite(v) => {
            let t = 2.0 * v.atan();
            if t < 0.0 {
                let w = t + TAU;
                // -0.0 and tiny negatives round up to 2π
                if w >= TAU {
                    0.0
                } else {
                    w
                }
            } else {
                t
            }
        }
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Inverse of [`angle_of`].
pub fn point_at_angle(theta: f64) -> S1Point {
    let t = wrap_angle(theta);
    if t == PI {
        S1Point::Infinity
    } else {
        S1Point::Finite((t / 2.0).tan())
    }
}

/// Relation between two torus points with respect to the parallel classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParallelRelation {
    /// Same vertical `{x₀} × 𝕊¹`.
    Plus,
    /// Same horizontal `𝕊¹ × {y₀}`.
    Minus,
    Equal,
    None,
}

/// A point of the torus 𝓟 = 𝕊¹ × 𝕊¹.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: S1Point,
    pub y: S1Point,
}

impl TorusPoint {
    pub fn new(x: impl Into<S1Point>, y: impl Into<S1Point>) -> Self {
        TorusPoint {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        TorusPoint {
            x: point_at_angle(theta),
            y: point_at_angle(phi),
        }
    }

    pub fn angles(&self) -> (f64, f64) {
        (angle_of(self.x), angle_of(self.y))
    }

    pub fn relation(&self, other: &TorusPoint) -> ParallelRelation {
        parallel_relation(self, other)
    }

    pub fn is_parallel(&self, other: &TorusPoint) -> bool {
        self.relation(other) != ParallelRelation::None
    }

    /// Both coordinates finite.
    pub fn is_affine(&self) -> bool {
        !self.x.is_infinite() && !self.y.is_infinite()
    }

    /// Largest chart distance over the two coordinates.
    pub fn chart_distance(&self, other: &TorusPoint) -> f64 {
        self.x
            .chart_distance(other.x)
            .max(self.y.chart_distance(other.y))
    }

    /// Position in ℝ³ on the standard torus.
    pub fn embed(&self) -> [f64; 3] {
        let (theta, phi) = self.angles();
        let ring = MAJOR_RADIUS + MINOR_RADIUS * phi.cos();
        [
            ring * theta.cos(),
            ring * theta.sin(),
            MINOR_RADIUS * phi.sin(),
        ]
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

pub fn parallel_relation(p: &TorusPoint, q: &TorusPoint) -> ParallelRelation {
    match (p.x.same_as(q.x), p.y.same_as(q.y)) {
        (true, true) => ParallelRelation::Equal,
        (true, false) => ParallelRelation::Plus,
        (false, true) => ParallelRelation::Minus,
        (false, false) => ParallelRelation::None,
    }
}

/// True when no two of the points are parallel (or equal).
pub fn pairwise_nonparallel(points: &[TorusPoint]) -> bool {
    points
        .iter()
        .enumerate()
        .all(|(i, p)| points[i + 1..].iter().all(|q| !p.is_parallel(q)))
}

fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// The metric `e`: Euclidean distance of the embedded points.
pub fn metric_e(p: &TorusPoint, q: &TorusPoint) -> f64 {
    dist3(&p.embed(), &q.embed())
}

fn directed_hausdorff(from: &[[f64; 3]], to: &[[f64; 3]]) -> f64 {
    from.iter()
        .map(|a| {
            to.iter()
                .map(|b| {
                    let dx = a[0] - b[0];
                    let dy = a[1] - b[1];
                    let dz = a[2] - b[2];
                    dx * dx + dy * dy + dz * dz
                })
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        .sqrt()
}

/// Hausdorff distance under `e` between two finite point sets.
pub fn hausdorff_h(a: &[TorusPoint], b: &[TorusPoint]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(GeomError::EmptyInput);
    }
    let ea: Vec<_> = a.iter().map(TorusPoint::embed).collect();
    let eb: Vec<_> = b.iter().map(TorusPoint::embed).collect();
    Ok(directed_hausdorff(&ea, &eb).max(directed_hausdorff(&eb, &ea)))
}

/// Whether `b` lies strictly inside the positively oriented arc from `a` to `c`.
pub fn cyclic_between(a: S1Point, b: S1Point, c: S1Point) -> Result<bool> {
    if a.same_as(b) || b.same_as(c) || a.same_as(c) {
        return Err(GeomError::DegenerateInput(format!(
            "repeated point among {a}, {b}, {c}"
        )));
    }
    let ta = angle_of(a);
    let ob = wrap_angle(angle_of(b) - ta);
    let oc = wrap_angle(angle_of(c) - ta);
    Ok(ob.partial_cmp(&oc) == Some(Ordering::Less))
}

/// Angle-uniform parameters `2πk/n`, `k = 0..n`.
pub fn uniform_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| TAU * k as f64 / n as f64)
}

/// Finite stand-in for a circle in metric computations.
#[derive(Clone, Debug)]
pub struct SampledCircle {
    samples: Vec<TorusPoint>,
}

/// Minimum number of samples in a [`SampledCircle`].
pub const MIN_SAMPLES: usize = 64;

impl SampledCircle {
    pub fn new(samples: Vec<TorusPoint>) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(GeomError::InvalidParameter(format!(
                "a sampled circle needs at least {MIN_SAMPLES} samples, got {}",
                samples.len()
            )));
        }
        Ok(SampledCircle { samples })
    }

    pub fn points(&self) -> &[TorusPoint] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn hausdorff(&self, other: &SampledCircle) -> f64 {
        hausdorff_h(&self.samples, &other.samples).expect("sampled circles are nonempty")
    }

    /// Largest gap in `e` between cyclically consecutive samples; a bound for
    /// the discretization slack of [`SampledCircle::hausdorff`].
    pub fn max_gap(&self) -> f64 {
        let n = self.samples.len();
        (0..n)
            .map(|i| metric_e(&self.samples[i], &self.samples[(i + 1) % n]))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn f(x: f64) -> S1Point {
        S1Point::Finite(x)
    }

    #[test]
    fn parallel_relation_cases() {
        assert_eq!(
            parallel_relation(&TorusPoint::new(1.0, 2.0), &TorusPoint::new(1.0, 5.0)),
            ParallelRelation::Plus
        );
        assert_eq!(
            parallel_relation(&TorusPoint::new(1.0, 2.0), &TorusPoint::new(3.0, 2.0)),
            ParallelRelation::Minus
        );
        assert_eq!(
            parallel_relation(&TorusPoint::new(1.0, 2.0), &TorusPoint::new(3.0, 4.0)),
            ParallelRelation::None
        );
        let p = TorusPoint::new(INF, 2.0);
        assert_eq!(parallel_relation(&p, &p), ParallelRelation::Equal);
        // ∞ is never identified with a large float
        assert_eq!(
            parallel_relation(&TorusPoint::new(INF, 0.0), &TorusPoint::new(1e300, 1.0)),
            ParallelRelation::None
        );
    }

    #[test]
    fn angles() {
        assert_eq!(angle_of(f(0.0)), 0.0);
        assert_eq!(angle_of(INF), PI);
        assert!((angle_of(f(1.0)) - FRAC_PI_2).abs() < 1e-15);
        assert!((angle_of(f(-1.0)) - 3.0 * FRAC_PI_2).abs() < 1e-15);
        assert_eq!(point_at_angle(PI), INF);
        assert_eq!(angle_of(f(-0.0)), 0.0);
    }

    #[test]
    fn metric_e_examples() {
        let p = TorusPoint::new(0.0, 0.0);
        assert_eq!(metric_e(&p, &p), 0.0);
        assert!((metric_e(&p, &TorusPoint::new(0.0, INF)) - 2.0).abs() < 1e-12);
        assert!((metric_e(&p, &TorusPoint::new(INF, 0.0)) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_examples() {
        let a = [TorusPoint::new(0.0, 0.0)];
        let b = [TorusPoint::new(0.0, INF)];
        assert_eq!(hausdorff_h(&a, &a).unwrap(), 0.0);
        assert!((hausdorff_h(&a, &b).unwrap() - 2.0).abs() < 1e-12);
        let bb = [TorusPoint::new(0.0, 0.0), TorusPoint::new(0.0, INF)];
        assert!((hausdorff_h(&a, &bb).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(hausdorff_h(&a, &[]), Err(GeomError::EmptyInput));
    }

    #[test]
    fn cyclic_between_examples() {
        assert!(cyclic_between(f(0.0), f(1.0), INF).unwrap());
        assert!(!cyclic_between(f(0.0), INF, f(1.0)).unwrap());
        assert!(cyclic_between(f(1.0), INF, f(-1.0)).unwrap());
        assert!(matches!(
            cyclic_between(f(1.0), f(1.0), INF),
            Err(GeomError::DegenerateInput(_))
        ));
    }

    #[test]
    fn chart_distance_is_continuous_through_infinity() {
        assert!(f(1e12).chart_distance(INF) < 1e-11);
        assert!(f(-1e12).chart_distance(INF) < 1e-11);
        assert!((f(1.0).chart_distance(f(-1.0)) - 2.0).abs() < 1e-15);
        assert!(f(0.5).chart_distance(f(2.0)) > 0.4);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("inf".parse::<S1Point>().unwrap(), INF);
        assert_eq!("∞".parse::<S1Point>().unwrap(), INF);
        assert_eq!(" -2.5 ".parse::<S1Point>().unwrap(), f(-2.5));
        assert!("abc".parse::<S1Point>().is_err());
        assert_eq!(INF.to_string(), "inf");
        let json = serde_json::to_string(&TorusPoint::new(1.5, INF)).unwrap();
        assert_eq!(json, r#"{"x":1.5,"y":"inf"}"#);
        let back: TorusPoint = serde_json::from_str(&json).unwrap();
        assert_eq!(back, TorusPoint::new(1.5, INF));
    }

    #[test]
    fn sampled_circle_needs_64_points() {
        let pts = vec![TorusPoint::new(0.0, 0.0); 10];
        assert!(SampledCircle::new(pts).is_err());
    }
}
