//! Convergence probe for the K4 coherence condition.
//!
//! Three sequences `p_{i,n}` are joined to circles `C_n`. When `p_{1,n}` and
//! `p_{2,n}` converge to (+)-parallel limits, the circles degenerate and the
//! parallel projections of a converging `p_n` onto `C_n` must approach
//! `π(p₁, p)` and `π(p, p₃)`.

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{metric_e, TorusPoint};
use crate::operations::{pi_minus_projection, pi_parallel_intersection, pi_plus_projection};
use crate::planes::{Plane, Tolerances};

/// `point(n)` has angle coordinates `limit + offset / n^rate`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSequence {
    pub limit: TorusPoint,
    #[serde(default)]
    pub offset: [f64; 2],
    #[serde(default = "default_rate")]
    pub rate: f64,
}

fn default_rate() -> f64 {
    1.0
}

impl PointSequence {
    pub fn constant(limit: TorusPoint) -> Self {
        PointSequence {
            limit,
            offset: [0.0, 0.0],
            rate: 1.0,
        }
    }

    pub fn point(&self, n: usize) -> TorusPoint {
        let (t, f) = self.limit.angles();
        let scale = (n as f64).powf(-self.rate);
        TorusPoint::from_angles(t + self.offset[0] * scale, f + self.offset[1] * scale)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct K4Spec {
    pub tripod: [PointSequence; 3],
    pub extra: PointSequence,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_n_max() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct K4Report {
    pub n_max: usize,
    pub tol: f64,
    /// Whether the limits of the first two sequences are (+)-parallel, the
    /// case in which the predicted limits are meaningful.
    pub degenerate_limit: bool,
    pub predicted_minus: TorusPoint,
    pub predicted_plus: TorusPoint,
    /// `e(π⁻(p_n, C_n), π(p₁, p))` for `n = 1..=n_max`.
    pub minus_distances: Vec<f64>,
    /// `e(π⁺(p_n, C_n), π(p, p₃))` for `n = 1..=n_max`.
    pub plus_distances: Vec<f64>,
    pub final_minus: f64,
    pub final_plus: f64,
    pub pass: bool,
}

/// Run the probe for `n = 1..=n_max`.
pub fn k4_probe(plane: &Plane, spec: &K4Spec) -> Result<K4Report> {
    if spec.n_max == 0 {
        return Err(GeomError::SpecViolation("n_max must be positive".into()));
    }
    let [s1, s2, s3] = &spec.tripod;
    let (p1, p2, p3, p) = (s1.limit, s2.limit, s3.limit, spec.extra.limit);
    if p3.x.same_as(p1.x) {
        return Err(GeomError::SpecViolation(format!(
            "limit {p3} lies on the (+)-class of {p1}"
        )));
    }
    for (name, pi) in [("p1", p1), ("p2", p2), ("p3", p3)] {
        if p.is_parallel(&pi) {
            return Err(GeomError::SpecViolation(format!(
                "extra limit {p} is parallel to {name} = {pi}"
            )));
        }
    }
    // the circles degenerate, so closed-form joins get the iterative bound
    let plane = plane.clone().with_tolerances(Tolerances {
        closed_form_residual: plane.tol.closed_form_residual.max(plane.tol.join_residual),
        ..plane.tol
    });
    let predicted_minus = pi_parallel_intersection(&p1, &p);
    let predicted_plus = pi_parallel_intersection(&p, &p3);

    let mut minus_distances = Vec::with_capacity(spec.n_max);
    let mut plus_distances = Vec::with_capacity(spec.n_max);
    for n in 1..=spec.n_max {
        let [a, b, c] = [s1.point(n), s2.point(n), s3.point(n)];
        let circle = plane
            .join(a, b, c)
            .map_err(|e| GeomError::SpecViolation(format!("n = {n}: {e}")))?;
        let pn = spec.extra.point(n);
        minus_distances.push(metric_e(
            &pi_minus_projection(&pn, &circle),
            &predicted_minus,
        ));
        plus_distances.push(metric_e(&pi_plus_projection(&pn, &circle), &predicted_plus));
    }
    let final_minus = *minus_distances.last().expect("n_max > 0");
    let final_plus = *plus_distances.last().expect("n_max > 0");
    Ok(K4Report {
        n_max: spec.n_max,
        tol: spec.tol,
        degenerate_limit: p1.x.same_as(p2.x) && !p1.y.same_as(p2.y),
        predicted_minus,
        predicted_plus,
        pass: final_minus <= spec.tol && final_plus <= spec.tol,
        minus_distances,
        plus_distances,
        final_minus,
        final_plus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tp(x: f64, y: f64) -> TorusPoint {
        TorusPoint::new(x, y)
    }

    fn converging(limit: TorusPoint, offset: [f64; 2]) -> PointSequence {
        PointSequence {
            limit,
            offset,
            rate: 2.0,
        }
    }

    #[test]
    fn constant_sequences_give_constant_distances() {
        let spec = K4Spec {
            tripod: [
                PointSequence::constant(tp(0.0, 0.0)),
                PointSequence::constant(tp(1.0, 1.0)),
                PointSequence::constant(tp(-1.0, 3.0)),
            ],
            extra: PointSequence::constant(tp(2.0, -2.0)),
            n_max: 5,
            tol: 1e-4,
        };
        let r = k4_probe(&Plane::classical(), &spec).unwrap();
        assert!(!r.degenerate_limit);
        assert!(r.minus_distances.iter().all(|d| *d == r.minus_distances[0]));
        assert!(r.plus_distances.iter().all(|d| *d == r.plus_distances[0]));
    }

    #[test]
    fn classical_tripod_converges() {
        let spec = K4Spec {
            tripod: [
                converging(tp(0.0, 0.0), [0.0, 0.3]),
                converging(tp(0.0, 1.0), [0.2, 0.1]),
                converging(tp(2.0, -1.0), [0.0, 0.0]),
            ],
            extra: converging(tp(-1.0, 3.0), [0.1, -0.1]),
            n_max: 1000,
            tol: 1e-4,
        };
        let r = k4_probe(&Plane::classical(), &spec).unwrap();
        assert!(r.degenerate_limit);
        assert!(r.pass, "{} {}", r.final_minus, r.final_plus);
        assert_eq!(r.predicted_minus, tp(0.0, 3.0));
        assert_eq!(r.predicted_plus, tp(-1.0, -1.0));
    }

    #[test]
    fn extra_parallel_to_tripod_rejected() {
        let spec = K4Spec {
            tripod: [
                PointSequence::constant(tp(0.0, 0.0)),
                PointSequence::constant(tp(1.0, 1.0)),
                PointSequence::constant(tp(-1.0, 3.0)),
            ],
            extra: PointSequence::constant(tp(0.0, 5.0)),
            n_max: 3,
            tol: 1e-4,
        };
        assert!(matches!(
            k4_probe(&Plane::classical(), &spec),
            Err(GeomError::SpecViolation(_))
        ));
    }
}
