//! The geometric operations: joining, parallel intersection and projection,
//! intersection and touching.

pub mod intersect;
pub mod k4;
pub mod touching;

pub use intersect::{gamma_intersect, IntersectionKind, IntersectionResult};
pub use k4::{k4_probe, K4Report, K4Spec, PointSequence};
pub use touching::{numeric_touching, touching_solver, touching_solver_with, TouchingOptions};

use crate::error::{GeomError, Result};
use crate::geometry::TorusPoint;
use crate::planes::{Circle, Plane};

/// The circle through three pairwise nonparallel points.
pub fn alpha_join(plane: &Plane, p1: TorusPoint, p2: TorusPoint, p3: TorusPoint) -> Result<Circle> {
    plane.join(p1, p2, p3)
}

/// `[p.x]₊ ∩ [q.y]₋`.
pub fn pi_parallel_intersection(p: &TorusPoint, q: &TorusPoint) -> TorusPoint {
    TorusPoint { x: p.x, y: q.y }
}

/// The point of `c` on the (+)-class of `p`.
pub fn pi_plus_projection(p: &TorusPoint, c: &Circle) -> TorusPoint {
    c.point_at(p.x)
}

/// The point of `c` on the (−)-class of `p`.
pub fn pi_minus_projection(p: &TorusPoint, c: &Circle) -> TorusPoint {
    TorusPoint {
        x: c.inv_eval(p.y),
        y: p.y,
    }
}

/// The common point of two touching circles.
pub fn beta_touch_point(c: &Circle, d: &Circle) -> Result<TorusPoint> {
    let hit = gamma_intersect(c, d)?;
    match hit.kind {
        IntersectionKind::Touching => Ok(hit.points[0]),
        _ => Err(GeomError::NotTouching {
            points: hit.points.len(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::INF;
    use crate::moebius::MoebiusMap;
    use crate::planes::hartmann::line;

    fn tp(x: f64, y: f64) -> TorusPoint {
        TorusPoint::new(x, y)
    }

    #[test]
    fn join_examples() {
        let c = alpha_join(
            &Plane::classical(),
            tp(0.0, 1.0),
            TorusPoint::new(1.0, INF),
            TorusPoint::new(INF, 0.0),
        )
        .unwrap();
        assert_eq!(
            c,
            Circle::MoebiusGraph(MoebiusMap::new(0.0, 1.0, -1.0, 1.0).unwrap())
        );
        let h = Plane::hartmann(1.0, 1.0, 1.0, 1.0).unwrap();
        let c = alpha_join(&h, tp(0.0, 1.0), tp(2.0, 3.0), TorusPoint::new(INF, 2.0)).unwrap();
        assert_eq!(
            c,
            h.hartmann_params()
                .unwrap()
                .hyperbola(1.0, 1.0, 2.0)
                .unwrap()
        );
    }

    #[test]
    fn parallel_intersection() {
        assert_eq!(
            pi_parallel_intersection(&tp(1.0, 2.0), &tp(3.0, 4.0)),
            tp(1.0, 4.0)
        );
        let p = tp(1.0, 2.0);
        assert_eq!(pi_parallel_intersection(&p, &p), p);
        assert_eq!(
            pi_parallel_intersection(&TorusPoint::new(INF, 0.0), &TorusPoint::new(0.0, INF)),
            TorusPoint::new(INF, INF)
        );
    }

    #[test]
    fn projections() {
        let id = line(1.0, 0.0).unwrap();
        assert_eq!(pi_plus_projection(&tp(5.0, 7.0), &id), tp(5.0, 5.0));
        assert_eq!(pi_minus_projection(&tp(5.0, 7.0), &id), tp(7.0, 7.0));
        let h = Plane::hartmann(1.0, 1.0, 1.0, 1.0).unwrap();
        let c = h.parse_circle("hyperbola(1,1,2)").unwrap();
        assert_eq!(
            pi_plus_projection(&tp(1.0, 9.0), &c),
            TorusPoint::new(1.0, INF)
        );
    }

    #[test]
    fn touch_point_examples() {
        let d = Circle::MoebiusGraph(MoebiusMap::new(1.0, 0.0, 1.0, 1.0).unwrap());
        let p = beta_touch_point(&Circle::identity(), &d).unwrap();
        assert!(p.chart_distance(&tp(0.0, 0.0)) < 1e-7);
        let p = beta_touch_point(&line(1.0, 0.0).unwrap(), &line(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(p, TorusPoint::new(INF, INF));
        let secant = Circle::MoebiusGraph(MoebiusMap::affine(2.0, 0.0).unwrap());
        assert_eq!(
            beta_touch_point(&Circle::identity(), &secant),
            Err(GeomError::NotTouching { points: 2 })
        );
    }
}
