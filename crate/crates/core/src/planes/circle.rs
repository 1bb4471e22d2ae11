use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{
    angle_of, point_at_angle, uniform_angles, S1Point, SampledCircle, TorusPoint,
};
use crate::moebius::MoebiusMap;
use crate::planes::homeo::{Homeo, SemiMult};

/// Which family of reciprocal graphs a Hartmann hyperbola belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `a > 0`, built from `f_{r₁,s₁}`.
    Pos,
    /// `a < 0`, built from `f_{r₂,s₂}`.
    Neg,
}

impl Branch {
    pub fn of_sign(a: f64) -> Branch {
        if a > 0.0 {
            Branch::Pos
        } else {
            Branch::Neg
        }
    }
}

/// A circle: the graph of a homeomorphism of 𝕊¹, kept symbolically.
#[derive(Clone, Debug, PartialEq)]
pub enum Circle {
    /// Graph of a Möbius map.
    MoebiusGraph(MoebiusMap),
    /// Graph of `g⁻¹ ∘ h ∘ f` with `h` orientation-reversing.
    SwappedGraph { g: Homeo, h: MoebiusMap, f: Homeo },
    /// `{(x, slope·x + intercept)} ∪ {(∞,∞)}`.
    HartLine { slope: f64, intercept: f64 },
    /// `{(x, a/f(x - b) + c)} ∪ {(b,∞), (∞,c)}` with `f` the branch's
    /// semi-multiplicative map.
    HartHyperbola {
        a: f64,
        b: f64,
        c: f64,
        branch: Branch,
        exponent: SemiMult,
    },
}

impl Circle {
    pub fn identity() -> Circle {
        Circle::MoebiusGraph(MoebiusMap::IDENTITY)
    }

    /// The `y` with `(x, y)` on the circle.
    pub fn eval(&self, x: S1Point) -> S1Point {
        match self {
            Circle::MoebiusGraph(m) => m.apply(x),
            Circle::SwappedGraph { g, h, f } => g.inverse_eval(h.apply(f.eval(x))),
            Circle::HartLine { slope, intercept } => match x {
                S1Point::Infinity => S1Point::Infinity,
                S1Point::Finite(x) => S1Point::new(slope * x + intercept),
            },
            Circle::HartHyperbola {
                a, b, c, exponent, ..
            } => match x {
                S1Point::Infinity => S1Point::Finite(*c),
                S1Point::Finite(x) => {
                    let den = exponent.eval_real(x - b);
                    if den == 0.0 {
                        S1Point::Infinity
                    } else {
                        S1Point::new(a / den + c)
                    }
                }
            },
        }
    }

    /// `dθ(y)/dθ(x)` along the circle at abscissa `x`; NaN at corners.
    pub fn angle_slope(&self, x: S1Point) -> f64 {
        match self {
            Circle::MoebiusGraph(m) => m.angle_slope(x),
            Circle::SwappedGraph { g, h, f } => {
                let fx = f.eval(x);
                let y = self.eval(x);
                f.angle_slope(x) * h.angle_slope(fx) / g.angle_slope(y)
            }
            Circle::HartLine { slope, intercept } => match MoebiusMap::affine(*slope, *intercept) {
                Ok(m) => m.angle_slope(x),
                Err(_) => f64::NAN,
            },
            Circle::HartHyperbola {
                a, b, c, exponent, ..
            } => {
                let (Ok(shift), Ok(outer)) = (
                    MoebiusMap::affine(1.0, -b),
                    MoebiusMap::new(*c, *a, 1.0, 0.0),
                ) else {
                    return f64::NAN;
                };
                let t = shift.apply(x);
                shift.angle_slope(x) * exponent.angle_slope(t) * outer.angle_slope(exponent.eval(t))
            }
        }
    }

    /// The `x` with `(x, y)` on the circle.
    pub fn inv_eval(&self, y: S1Point) -> S1Point {
        match self {
            Circle::MoebiusGraph(m) => m.inverse().apply(y),
            Circle::SwappedGraph { g, h, f } => f.inverse_eval(h.inverse().apply(g.eval(y))),
            Circle::HartLine { slope, intercept } => match y {
                S1Point::Infinity => S1Point::Infinity,
                S1Point::Finite(y) => S1Point::new((y - intercept) / slope),
            },
            Circle::HartHyperbola {
                a, b, c, exponent, ..
            } => match y {
                S1Point::Infinity => S1Point::Finite(*b),
                S1Point::Finite(y) => {
                    let dy = y - c;
                    if dy == 0.0 {
                        S1Point::Infinity
                    } else {
                        S1Point::new(b + exponent.inverse_real(a / dy))
                    }
                }
            },
        }
    }

    /// `+1` if the underlying homeomorphism preserves the orientation of 𝕊¹.
    pub fn orientation(&self) -> i8 {
        match self {
            Circle::MoebiusGraph(m) => m.det_sign(),
            Circle::SwappedGraph { g, h, f } => {
                let flips = [
                    !g.is_orientation_preserving(),
                    !f.is_orientation_preserving(),
                ]
                .iter()
                .filter(|b| **b)
                .count();
                if flips % 2 == 0 {
                    h.det_sign()
                } else {
                    -h.det_sign()
                }
            }
            Circle::HartLine { slope, .. } => {
                if *slope > 0.0 {
                    1
                } else {
                    -1
                }
            }
            Circle::HartHyperbola { a, .. } => {
                if *a > 0.0 {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn point_at(&self, x: S1Point) -> TorusPoint {
        TorusPoint { x, y: self.eval(x) }
    }

    /// Residual of `p` against the circle in chart coordinates.
    pub fn residual(&self, p: &TorusPoint) -> f64 {
        self.eval(p.x).chart_distance(p.y)
    }

    pub fn contains(&self, p: &TorusPoint, tol: f64) -> bool {
        self.residual(p) <= tol
    }

    /// Points at `n` angle-uniform abscissae, paired with their angles.
    pub fn sample_with_angles(&self, n: usize) -> Vec<(f64, TorusPoint)> {
        uniform_angles(n)
            .map(|t| (t, self.point_at(point_at_angle(t))))
            .collect()
    }

    pub fn sample_points(&self, n: usize) -> Vec<TorusPoint> {
        uniform_angles(n)
            .map(|t| self.point_at(point_at_angle(t)))
            .collect()
    }

    /// Sampled stand-in with `n ≥ 64` points.
    pub fn sample(&self, n: usize) -> crate::Result<SampledCircle> {
        SampledCircle::new(self.sample_points(n))
    }

    /// The circle evaluated at given abscissae.
    pub fn sample_at(&self, xs: impl IntoIterator<Item = S1Point>) -> Vec<TorusPoint> {
        xs.into_iter().map(|x| self.point_at(x)).collect()
    }

    /// Angle of the image of the point at angle `theta`.
    pub fn angle_map(&self, theta: f64) -> f64 {
        angle_of(self.eval(point_at_angle(theta)))
    }

    /// The circle as a Möbius graph in raw coordinates, when it is one.
    pub fn as_moebius(&self) -> Option<MoebiusMap> {
        match self {
            Circle::MoebiusGraph(m) => Some(*m),
            Circle::SwappedGraph { g, h, f }
                if g.is_trivially_identity() && f.is_trivially_identity() =>
            {
                Some(*h)
            }
            Circle::HartLine { slope, intercept } => MoebiusMap::affine(*slope, *intercept).ok(),
            Circle::HartHyperbola {
                a, b, c, exponent, ..
            } if exponent.is_identity() => MoebiusMap::new(*c, a - b * c, 1.0, -b).ok(),
            _ => None,
        }
    }

    /// Abscissae at which the graph may fail to be smooth.
    pub fn corner_abscissae(&self) -> Vec<S1Point> {
        match self {
            Circle::MoebiusGraph(_) => Vec::new(),
            Circle::HartLine { .. } => Vec::new(),
            Circle::HartHyperbola { exponent, .. } if exponent.is_identity() => Vec::new(),
            Circle::HartHyperbola { .. } => self.special_abscissae(),
            Circle::SwappedGraph { g, f, .. }
                if g.is_trivially_identity() && f.is_trivially_identity() =>
            {
                Vec::new()
            }
            Circle::SwappedGraph { .. } => vec![
                S1Point::Infinity,
                S1Point::Finite(0.0),
                self.inv_eval(S1Point::Infinity),
                self.inv_eval(S1Point::Finite(0.0)),
            ],
        }
    }

    /// Abscissae where the circle reaches `∞` together with `∞` itself.
    pub fn special_abscissae(&self) -> Vec<S1Point> {
        vec![S1Point::Infinity, self.inv_eval(S1Point::Infinity)]
    }
}

impl fmt::Display for Circle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Circle::MoebiusGraph(m) => write!(f, "moebius({m})"),
            Circle::SwappedGraph { h, .. } => write!(f, "swapped({h})"),
            Circle::HartLine { slope, intercept } => write!(f, "line({slope},{intercept})"),
            Circle::HartHyperbola { a, b, c, .. } => write!(f, "hyperbola({a},{b},{c})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::INF;

    fn f(x: f64) -> S1Point {
        S1Point::Finite(x)
    }

    fn hyperbola(a: f64, b: f64, c: f64) -> Circle {
        Circle::HartHyperbola {
            a,
            b,
            c,
            branch: Branch::of_sign(a),
            exponent: SemiMult::IDENTITY,
        }
    }

    #[test]
    fn eval_examples() {
        let line = Circle::HartLine {
            slope: 1.0,
            intercept: 0.0,
        };
        assert_eq!(line.eval(f(5.0)), f(5.0));
        assert_eq!(line.eval(INF), INF);

        assert_eq!(hyperbola(-1.0, 1.0, 0.0).eval(f(0.0)), f(1.0));

        let m = Circle::MoebiusGraph(MoebiusMap::new(0.0, 1.0, -1.0, 1.0).unwrap());
        assert_eq!(m.eval(f(1.0)), INF);
    }

    #[test]
    fn hyperbola_special_points() {
        let h = hyperbola(2.0, 1.5, -3.0);
        assert_eq!(h.eval(f(1.5)), INF);
        assert_eq!(h.eval(INF), f(-3.0));
        assert_eq!(h.inv_eval(INF), f(1.5));
        assert_eq!(h.inv_eval(f(-3.0)), INF);
    }

    #[test]
    fn orientations() {
        assert_eq!(hyperbola(2.0, 0.0, 0.0).orientation(), -1);
        assert_eq!(hyperbola(-2.0, 0.0, 0.0).orientation(), 1);
        let g = Circle::HartLine {
            slope: -0.5,
            intercept: 1.0,
        };
        assert_eq!(g.orientation(), -1);
    }

    #[test]
    fn eval_inverse_roundtrip_on_all_descriptors() {
        let semi = SemiMult::new(2.5, 0.4).unwrap();
        let circles = [
            Circle::MoebiusGraph(MoebiusMap::new(1.0, 2.0, -3.0, 0.5).unwrap()),
            Circle::SwappedGraph {
                g: Homeo::semi_mult(0.7, 2.0).unwrap(),
                h: MoebiusMap::new(0.0, 1.0, 1.0, 0.3).unwrap(),
                f: Homeo::SemiMult(semi),
            },
            Circle::HartLine {
                slope: -2.0,
                intercept: 0.25,
            },
            Circle::HartHyperbola {
                a: 0.8,
                b: -1.0,
                c: 2.0,
                branch: Branch::Pos,
                exponent: semi,
            },
        ];
        for c in &circles {
            for (_, p) in c.sample_with_angles(257) {
                let back = c.inv_eval(p.y);
                assert!(back.chart_distance(p.x) <= 1e-9, "{c}: {p} -> {back}");
            }
        }
    }

    #[test]
    fn angle_slope_matches_differences() {
        use crate::geometry::{angle_of, point_at_angle};
        use crate::planes::Homeo;
        let circles = [
            Circle::MoebiusGraph(MoebiusMap::new(2.0, -1.0, 0.5, 3.0).unwrap()),
            hyperbola(0.7, -0.4, 1.2),
            Circle::HartLine {
                slope: -2.0,
                intercept: 0.5,
            },
            Circle::SwappedGraph {
                g: Homeo::Identity,
                h: MoebiusMap::new(1.0, 2.0, 3.0, -1.0).unwrap(),
                f: Homeo::semi_mult(2.0, 0.5).unwrap(),
            },
        ];
        let h = 1e-5;
        for c in &circles {
            for t in [0.4, 1.3, 2.9, 4.1, 5.5] {
                let y = |u: f64| angle_of(c.eval(point_at_angle(t + u)));
                let mut d = y(h) - y(-h);
                if d.abs() > std::f64::consts::PI {
                    d -= std::f64::consts::TAU * d.signum();
                }
                let numeric = d / (2.0 * h);
                let exact = c.angle_slope(point_at_angle(t));
                assert!(
                    (numeric - exact).abs() <= 1e-6 * (1.0 + exact.abs()),
                    "{c} at {t}: {numeric} vs {exact}"
                );
            }
        }
        let swapped = &circles[3];
        assert!(swapped.angle_slope(f(0.0)).is_nan());
        assert!(hyperbola(1.0, 0.0, 0.0).angle_slope(INF).is_finite());
    }
}
