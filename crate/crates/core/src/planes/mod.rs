//! The concrete plane families: the classical Minkowski plane, swapping half
//! planes `𝓜(f, g)` and generalized Hartmann planes `𝓜_GH(r₁,s₁; r₂,s₂)`.

mod circle;
pub mod hartmann;
mod homeo;
pub mod swapping;

use std::fmt;

pub use circle::{Branch, Circle};
pub use hartmann::{join_hartmann, HartmannParams};
pub use homeo::{semi_mult_eval, semi_mult_inverse, Homeo, SemiMult};
pub use swapping::join_swapping;

use crate::error::{GeomError, Result};
use crate::geometry::TorusPoint;
use crate::moebius::MoebiusMap;

/// Samples per circle used by [`Plane::circle_equal`].
pub const EQUALITY_SAMPLES: usize = 512;

/// Solver and comparison thresholds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Residual bound for circles found by iterative solves.
    pub join_residual: f64,
    /// Residual bound for closed-form solves.
    pub closed_form_residual: f64,
    /// Sampled Hausdorff distance below which two circles are equal.
    pub hausdorff_eq: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            join_residual: 1e-7,
            closed_form_residual: 1e-9,
            hausdorff_eq: 1e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlaneFamily {
    Classical,
    Swapping { f: Homeo, g: Homeo },
    Hartmann(HartmannParams),
}

/// A toroidal circle plane from one of the implemented families.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    family: PlaneFamily,
    pub tol: Tolerances,
}

impl Plane {
    pub fn classical() -> Plane {
        Plane {
            family: PlaneFamily::Classical,
            tol: Tolerances::default(),
        }
    }

    /// `𝓜(f, g)` for orientation-preserving `f`, `g`.
    pub fn swapping(f: Homeo, g: Homeo) -> Result<Plane> {
        for (name, h) in [("f", &f), ("g", &g)] {
            if !h.is_orientation_preserving() {
                return Err(GeomError::InvalidParameter(format!(
                    "{name} = {h} must preserve orientation"
                )));
            }
        }
        Ok(Plane {
            family: PlaneFamily::Swapping { f, g },
            tol: Tolerances::default(),
        })
    }

    /// `𝓜(f_{d,s}, id)`.
    pub fn swapping_semi(d: f64, s: f64) -> Result<Plane> {
        Self::swapping(Homeo::semi_mult(d, s)?, Homeo::Identity)
    }

    pub fn hartmann(r1: f64, s1: f64, r2: f64, s2: f64) -> Result<Plane> {
        Ok(Plane {
            family: PlaneFamily::Hartmann(HartmannParams::new(r1, s1, r2, s2)?),
            tol: Tolerances::default(),
        })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Plane {
        self.tol = tol;
        self
    }

    pub fn family(&self) -> &PlaneFamily {
        &self.family
    }

    /// `f`, `g` when the plane is presented as a swapping half plane
    /// (the classical plane is `𝓜(id, id)`).
    pub fn swapping_maps(&self) -> Option<(Homeo, Homeo)> {
        match &self.family {
            PlaneFamily::Classical => Some((Homeo::Identity, Homeo::Identity)),
            PlaneFamily::Swapping { f, g } => Some((f.clone(), g.clone())),
            PlaneFamily::Hartmann(_) => None,
        }
    }

    /// The exponent `d` and factor `s` when the plane is `𝓜(f_{d,s}, id)`
    /// (classical counts as `d = s = 1`).
    pub fn semi_swapping_params(&self) -> Option<(f64, f64)> {
        match &self.family {
            PlaneFamily::Classical => Some((1.0, 1.0)),
            PlaneFamily::Swapping { f, g } if g.is_trivially_identity() => match f {
                Homeo::Identity => Some((1.0, 1.0)),
                Homeo::SemiMult(m) => Some((m.r(), m.s())),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn hartmann_params(&self) -> Option<HartmannParams> {
        match &self.family {
            PlaneFamily::Hartmann(p) => Some(*p),
            PlaneFamily::Classical => Some(HartmannParams::new(1.0, 1.0, 1.0, 1.0).unwrap()),
            PlaneFamily::Swapping { .. } => None,
        }
    }

    /// The unique circle through three pairwise nonparallel points.
    pub fn join(&self, p1: TorusPoint, p2: TorusPoint, p3: TorusPoint) -> Result<Circle> {
        match &self.family {
            PlaneFamily::Classical => join_swapping(
                &Homeo::Identity,
                &Homeo::Identity,
                [p1, p2, p3],
                self.tol.closed_form_residual,
            ),
            PlaneFamily::Swapping { f, g } => {
                join_swapping(f, g, [p1, p2, p3], self.tol.closed_form_residual)
            }
            PlaneFamily::Hartmann(params) => {
                join_hartmann(params, [p1, p2, p3], self.tol.join_residual)
            }
        }
    }

    /// Equality of circles by sampled Hausdorff distance.
    pub fn circle_equal(&self, c: &Circle, d: &Circle) -> bool {
        circle_distance(c, d) <= self.tol.hausdorff_eq
    }

    /// Build a circle from a textual descriptor: `moebius(a,b,c,d)`,
    /// `swapped(a,b,c,d)`, `line(s,t)` or `hyperbola(a,b,c)`.
    pub fn parse_circle(&self, text: &str) -> Result<Circle> {
        let bad = || GeomError::InvalidParameter(format!("cannot parse circle {text:?}"));
        let t = text.trim();
        let open = t.find('(').ok_or_else(bad)?;
        if !t.ends_with(')') {
            return Err(bad());
        }
        let kind = t[..open].trim().to_ascii_lowercase();
        let args: Vec<f64> = t[open + 1..t.len() - 1]
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let circle = match (kind.as_str(), args.as_slice()) {
            ("moebius", &[a, b, c, d]) => Circle::MoebiusGraph(MoebiusMap::new(a, b, c, d)?),
            ("swapped", &[a, b, c, d]) => {
                let (f, g) = self.swapping_maps().ok_or_else(|| {
                    GeomError::InvalidParameter("swapped circles need a swapping plane".into())
                })?;
                let h = MoebiusMap::new(a, b, c, d)?;
                Circle::SwappedGraph { g, h, f }
            }
            ("line", &[s, t]) => hartmann::line(s, t)?,
            ("hyperbola", &[a, b, c]) => self
                .hartmann_params()
                .ok_or_else(|| {
                    GeomError::InvalidParameter("hyperbolas need a Hartmann plane".into())
                })?
                .hyperbola(a, b, c)?,
            _ => return Err(bad()),
        };
        self.validate_circle(&circle)?;
        Ok(circle)
    }

    /// Whether a descriptor names a circle of this plane.
    pub fn validate_circle(&self, circle: &Circle) -> Result<()> {
        let ok = match (&self.family, circle) {
            (PlaneFamily::Classical, Circle::MoebiusGraph(_)) => true,
            (PlaneFamily::Classical, Circle::SwappedGraph { g, f, h }) => {
                g.is_trivially_identity() && f.is_trivially_identity() && h.det_sign() < 0
            }
            (PlaneFamily::Classical, Circle::HartLine { .. }) => true,
            (PlaneFamily::Classical, Circle::HartHyperbola { exponent, .. }) => {
                exponent.is_identity()
            }
            (PlaneFamily::Swapping { .. }, Circle::MoebiusGraph(m)) => m.det_sign() > 0,
            (PlaneFamily::Swapping { .. }, Circle::SwappedGraph { h, .. }) => h.det_sign() < 0,
            (PlaneFamily::Hartmann(_), Circle::HartLine { .. }) => true,
            (
                PlaneFamily::Hartmann(p),
                Circle::HartHyperbola {
                    branch,
                    exponent,
                    a,
                    ..
                },
            ) => *branch == Branch::of_sign(*a) && *exponent == p.exponent(*branch),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GeomError::InvalidParameter(format!(
                "{circle} is not a circle of {self}"
            )))
        }
    }
}

/// Sampled Hausdorff distance between two circles at [`EQUALITY_SAMPLES`]
/// common abscissae.
pub fn circle_distance(c: &Circle, d: &Circle) -> f64 {
    crate::geometry::hausdorff_h(
        &c.sample_points(EQUALITY_SAMPLES),
        &d.sample_points(EQUALITY_SAMPLES),
    )
    .expect("nonempty samples")
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            PlaneFamily::Classical => write!(f, "classical"),
            PlaneFamily::Swapping { f: ff, g } => write!(f, "swapping(f = {ff}, g = {g})"),
            PlaneFamily::Hartmann(p) => {
                let [r1, s1, r2, s2] = p.as_array();
                write!(f, "hartmann({r1}, {s1}; {r2}, {s2})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::INF;

    #[test]
    fn circle_equal_examples() {
        let plane = Plane::classical();
        let l = hartmann::line(1.0, 0.0).unwrap();
        assert!(plane.circle_equal(&l, &l));
        assert!(!plane.circle_equal(&l, &hartmann::line(1.0, 1e-3).unwrap()));
        assert!(plane.circle_equal(&Circle::identity(), &l));
    }

    #[test]
    fn swapping_rejects_reversing_maps() {
        let rev = Homeo::Moebius(MoebiusMap::new(0.0, 1.0, 1.0, 0.0).unwrap());
        assert!(Plane::swapping(rev, Homeo::Identity).is_err());
        assert!(Plane::hartmann(1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn parse_circle_descriptors() {
        let h = Plane::hartmann(2.0, 0.5, 1.0, 3.0).unwrap();
        let c = h.parse_circle("hyperbola(1, 1, 2)").unwrap();
        assert_eq!(c.eval(INF), crate::geometry::S1Point::Finite(2.0));
        assert!(h.parse_circle("moebius(1,0,0,1)").is_err());
        assert!(h.parse_circle("line(0, 1)").is_err());
        let s = Plane::swapping_semi(2.0, 1.0).unwrap();
        assert!(s.parse_circle("swapped(0,1,1,0)").is_ok());
        assert!(s.parse_circle("moebius(0,1,1,0)").is_err());
        assert!(s.parse_circle("nonsense").is_err());
    }

    #[test]
    fn descriptor_display_roundtrip() {
        let plane = Plane::classical();
        let c = plane
            .join(
                TorusPoint::new(0.0, 1.0),
                TorusPoint::new(1.0, INF),
                TorusPoint::new(INF, 0.0),
            )
            .unwrap();
        let back = plane.parse_circle(&c.to_string()).unwrap();
        assert!(plane.circle_equal(&c, &back));
    }
}
