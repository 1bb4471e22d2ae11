//! Joining in swapping half planes `𝓜(f, g)`, whose circles are graphs of
//! PSL(2,ℝ) elements and of `g⁻¹ ∘ h ∘ f` with `h ∈ PGL(2,ℝ) ∖ PSL(2,ℝ)`.

use crate::error::{GeomError, Result};
use crate::geometry::{pairwise_nonparallel, TorusPoint};
use crate::moebius::MoebiusMap;
use crate::planes::circle::Circle;
use crate::planes::homeo::Homeo;

fn max_residual(circle: &Circle, points: &[TorusPoint; 3]) -> f64 {
    points
        .iter()
        .map(|p| circle.residual(p))
        .fold(0.0, f64::max)
}

/// The unique circle of `𝓜(f, g)` through three pairwise nonparallel points.
///
/// Exactly one of two candidates validates: the Möbius interpolant of the raw
/// coordinates when it lies in PSL(2,ℝ), or the interpolant of `(f(xᵢ), g(yᵢ))`
/// when it is orientation-reversing.
pub fn join_swapping(
    f: &Homeo,
    g: &Homeo,
    points: [TorusPoint; 3],
    residual_tol: f64,
) -> Result<Circle> {
    if !pairwise_nonparallel(&points) {
        return Err(GeomError::ParallelInput(format!(
            "{}, {}, {}",
            points[0], points[1], points[2]
        )));
    }
    let xs = points.map(|p| p.x);
    let ys = points.map(|p| p.y);
    let direct = MoebiusMap::from_three_pairs(xs, ys)?;
    let candidate_a = (direct.det_sign() > 0).then_some(Circle::MoebiusGraph(direct));

    let swapped = MoebiusMap::from_three_pairs(xs.map(|x| f.eval(x)), ys.map(|y| g.eval(y)))?;
    let candidate_b = (swapped.det_sign() < 0).then(|| Circle::SwappedGraph {
        g: g.clone(),
        h: swapped,
        f: f.clone(),
    });

    let circle = match (candidate_a, candidate_b) {
        (Some(c), None) | (None, Some(c)) => c,
        (a, b) => {
            return Err(GeomError::JoinFailure(format!(
                "{} candidates validate for {}, {}, {} (f = {f}, g = {g})",
                a.is_some() as u8 + b.is_some() as u8,
                points[0],
                points[1],
                points[2]
            )))
        }
    };
    let residual = max_residual(&circle, &points);
    if residual > residual_tol {
        return Err(GeomError::JoinFailure(format!(
            "residual {residual:e} exceeds {residual_tol:e} for {circle}"
        )));
    }
    Ok(circle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::INF;

    fn pts(raw: [(f64, f64); 3]) -> [TorusPoint; 3] {
        raw.map(|(x, y)| TorusPoint::new(x, y))
    }

    #[test]
    fn identity_circle() {
        let c = join_swapping(
            &Homeo::Identity,
            &Homeo::Identity,
            [
                TorusPoint::new(0.0, 0.0),
                TorusPoint::new(1.0, 1.0),
                TorusPoint::new(INF, INF),
            ],
            1e-9,
        )
        .unwrap();
        assert_eq!(c, Circle::identity());
    }

    #[test]
    fn orientation_reversing_triple_gives_swapped_graph() {
        let c = join_swapping(
            &Homeo::Identity,
            &Homeo::Identity,
            [
                TorusPoint::new(0.0, 1.0),
                TorusPoint::new(1.0, 0.0),
                TorusPoint::new(INF, INF),
            ],
            1e-9,
        )
        .unwrap();
        match c {
            Circle::SwappedGraph { h, .. } => {
                assert!(h.approx_eq(&MoebiusMap::new(-1.0, 1.0, 0.0, 1.0).unwrap(), 1e-15));
                assert_eq!(h.det_sign(), -1);
            }
            other => panic!("expected swapped graph, got {other}"),
        }
    }

    #[test]
    fn reciprocal_triple() {
        let c = join_swapping(
            &Homeo::Identity,
            &Homeo::Identity,
            [
                TorusPoint::new(0.0, 1.0),
                TorusPoint::new(1.0, INF),
                TorusPoint::new(INF, 0.0),
            ],
            1e-9,
        )
        .unwrap();
        assert_eq!(
            c,
            Circle::MoebiusGraph(MoebiusMap::new(0.0, 1.0, -1.0, 1.0).unwrap())
        );
    }

    #[test]
    fn parallel_points_rejected() {
        let err = join_swapping(
            &Homeo::Identity,
            &Homeo::Identity,
            pts([(0.0, 1.0), (0.0, 2.0), (3.0, 4.0)]),
            1e-9,
        );
        assert!(matches!(err, Err(GeomError::ParallelInput(_))));
    }

    #[test]
    fn semi_multiplicative_plane_passes_through_points() {
        let f = Homeo::semi_mult(2.0, 0.5).unwrap();
        let points = pts([(-1.0, 3.0), (0.5, -2.0), (2.0, 0.25)]);
        let c = join_swapping(&f, &Homeo::Identity, points, 1e-9).unwrap();
        for p in &points {
            assert!(c.residual(p) < 1e-12);
        }
    }
}
