//! Joining in generalized Hartmann planes `𝓜_GH(r₁,s₁; r₂,s₂)`.
//!
//! Circles are the non-horizontal, non-vertical lines (closed up by `(∞,∞)`)
//! and the reciprocal graphs `y = a/f(x - b) + c` closed up by `(b,∞)` and
//! `(∞,c)`, where `f = f_{r₁,s₁}` when `a > 0` and `f = f_{r₂,s₂}` when `a < 0`.
//!
//! Infinite coordinates pin parameters directly. Three finite points are
//! tested for collinearity first; otherwise `b` solves
//!
//! ```text
//! (y₁ - y₂)(v₃ - v₁)v₂ - (y₁ - y₃)(v₂ - v₁)v₃ = 0,   vᵢ = f(xᵢ - b),
//! ```
//!
//! which is the cross-multiplied form of `(y₁-y₂)/(y₁-y₃) = (u₁-u₂)/(u₁-u₃)`
//! with `uᵢ = 1/vᵢ`. The cleared form is continuous across the `xᵢ` and does
//! not vanish there, so one ordered seed list over ℝ brackets every root.

use crate::error::{GeomError, Result};
use crate::geometry::{pairwise_nonparallel, S1Point, TorusPoint};
use crate::planes::circle::{Branch, Circle};
use crate::planes::homeo::SemiMult;
use crate::roots::bracket_roots;

/// Seeds per maximal interval of ℝ ∖ {x₁, x₂, x₃}.
pub const SEEDS_PER_INTERVAL: usize = 64;
/// Bracket refinement tolerance on `b`.
pub const B_TOL: f64 = 1e-15;
/// Collinearity residual below which three finite points are joined by a line.
/// Candidates whose residual exceeds the best one by this factor are
/// dropped.
pub const NEAR_MISS_RATIO: f64 = 1e4;
pub const COLLINEAR_TOL: f64 = 1e-10;

/// Parameters of `𝓜_GH(r₁,s₁; r₂,s₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HartmannParams {
    pub pos: SemiMult,
    pub neg: SemiMult,
}

impl HartmannParams {
    pub fn new(r1: f64, s1: f64, r2: f64, s2: f64) -> Result<Self> {
        Ok(HartmannParams {
            pos: SemiMult::new(r1, s1)?,
            neg: SemiMult::new(r2, s2)?,
        })
    }

    pub fn exponent(&self, branch: Branch) -> SemiMult {
        match branch {
            Branch::Pos => self.pos,
            Branch::Neg => self.neg,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.pos.r(), self.pos.s(), self.neg.r(), self.neg.s()]
    }

    pub fn hyperbola(&self, a: f64, b: f64, c: f64) -> Result<Circle> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() || !c.is_finite() {
            return Err(GeomError::InvalidParameter(format!(
                "hyperbola needs finite a ≠ 0, b, c; got ({a}, {b}, {c})"
            )));
        }
        let branch = Branch::of_sign(a);
        Ok(Circle::HartHyperbola {
            a,
            b,
            c,
            branch,
            exponent: self.exponent(branch),
        })
    }
}

pub fn line(slope: f64, intercept: f64) -> Result<Circle> {
    if slope == 0.0 || !slope.is_finite() || !intercept.is_finite() {
        return Err(GeomError::InvalidParameter(format!(
            "line needs finite nonzero slope; got ({slope}, {intercept})"
        )));
    }
    Ok(Circle::HartLine { slope, intercept })
}

fn max_residual(circle: &Circle, points: &[TorusPoint]) -> f64 {
    points
        .iter()
        .map(|p| circle.residual(p))
        .fold(0.0, f64::max)
}

/// Ordered seeds covering ℝ: geometric tails beyond the outer nodes and uniform
/// seeds between consecutive nodes (nodes included).
fn seeds_over_line(nodes: &[f64]) -> Vec<f64> {
    let lo = nodes[0];
    let hi = nodes[nodes.len() - 1];
    let w = (hi - lo).max(1e-300);
    let tail: Vec<f64> = (0..SEEDS_PER_INTERVAL)
        .map(|k| w * 10f64.powf(-4.0 + 16.0 * k as f64 / (SEEDS_PER_INTERVAL - 1) as f64))
        .collect();
    let mut seeds: Vec<f64> = tail.iter().rev().map(|g| lo - g).collect();
    for pair in nodes.windows(2) {
        let (u, v) = (pair[0], pair[1]);
        for k in 0..=SEEDS_PER_INTERVAL {
            seeds.push(u + (v - u) * k as f64 / (SEEDS_PER_INTERVAL + 1) as f64);
        }
    }
    seeds.push(hi);
    seeds.extend(tail.iter().map(|g| hi + g));
    seeds
}

/// `f((x - b)/L)` with a common positive scale `L`, which keeps the cleared
/// equations in range without changing their sign.
fn scaled(f: &SemiMult, x: f64, b: f64, scale: f64) -> f64 {
    f.eval_real((x - b) / scale)
}

struct Candidate {
    circle: Circle,
    residual: f64,
    b: f64,
    branch: Branch,
}

fn push_candidate(
    found: &mut Vec<Candidate>,
    params: &HartmannParams,
    branch: Branch,
    a: f64,
    b: f64,
    c: f64,
    points: &[TorusPoint],
) {
    if !(a.is_finite() && b.is_finite() && c.is_finite())
        || Branch::of_sign(a) != branch
        || a == 0.0
    {
        return;
    }
    let circle = Circle::HartHyperbola {
        a,
        b,
        c,
        branch,
        exponent: params.exponent(branch),
    };
    let residual = max_residual(&circle, points);
    found.push(Candidate {
        circle,
        residual,
        b,
        branch,
    });
}

fn select(mut found: Vec<Candidate>, tol: f64, points: &[TorusPoint]) -> Result<Circle> {
    found.retain(|c| c.residual <= tol);
    // with two close points, near misses can pass the tolerance next to an
    // exact solution
    let best = found
        .iter()
        .map(|c| c.residual)
        .fold(f64::INFINITY, f64::min);
    found.retain(|c| c.residual <= (NEAR_MISS_RATIO * best).max(1e-12));
    // collapse duplicates of the same root reached from adjacent brackets
    let mut distinct: Vec<Candidate> = Vec::new();
    for c in found {
        if !distinct
            .iter()
            .any(|d| d.branch == c.branch && (d.b - c.b).abs() <= 1e-9 * (1.0 + c.b.abs()))
        {
            distinct.push(c);
        }
    }
    match distinct.len() {
        1 => Ok(distinct.pop().unwrap().circle),
        0 => Err(GeomError::JoinFailure(format!(
            "no Hartmann circle through {} within residual {tol:e}",
            list(points)
        ))),
        n => Err(GeomError::JoinFailure(format!(
            "{n} distinct Hartmann circles through {} (residuals {:?})",
            list(points),
            distinct.iter().map(|c| c.residual).collect::<Vec<_>>()
        ))),
    }
}

fn list(points: &[TorusPoint]) -> String {
    points
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn fin(p: S1Point) -> f64 {
    p.finite().expect("finite coordinate")
}

/// The unique circle of `𝓜_GH` through three pairwise nonparallel points.
pub fn join_hartmann(
    params: &HartmannParams,
    points: [TorusPoint; 3],
    residual_tol: f64,
) -> Result<Circle> {
    if !pairwise_nonparallel(&points) {
        return Err(GeomError::ParallelInput(list(&points)));
    }

    // (∞,∞) lies only on lines
    if let Some(i) = points
        .iter()
        .position(|p| p.x.is_infinite() && p.y.is_infinite())
    {
        let others: Vec<&TorusPoint> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p)
            .collect();
        let (x1, y1) = (fin(others[0].x), fin(others[0].y));
        let (x2, y2) = (fin(others[1].x), fin(others[1].y));
        let slope = (y2 - y1) / (x2 - x1);
        let circle = line(slope, y1 - slope * x1)?;
        return checked(circle, &points, residual_tol);
    }

    let pinned_c = points.iter().find(|p| p.x.is_infinite()).map(|p| fin(p.y));
    let pinned_b = points.iter().find(|p| p.y.is_infinite()).map(|p| fin(p.x));
    let finite: Vec<TorusPoint> = points
        .iter()
        .copied()
        .filter(TorusPoint::is_affine)
        .collect();

    match (pinned_b, pinned_c) {
        (Some(b), Some(c)) => {
            let (x, y) = (fin(finite[0].x), fin(finite[0].y));
            let branch = Branch::of_sign((y - c) * (x - b));
            let a = (y - c) * params.exponent(branch).eval_real(x - b);
            checked(params.hyperbola(a, b, c)?, &points, residual_tol)
        }
        (Some(b), None) => {
            let (x1, y1) = (fin(finite[0].x), fin(finite[0].y));
            let (x2, y2) = (fin(finite[1].x), fin(finite[1].y));
            let mut found = Vec::new();
            for branch in [Branch::Pos, Branch::Neg] {
                let f = params.exponent(branch);
                let u1 = 1.0 / f.eval_real(x1 - b);
                let u2 = 1.0 / f.eval_real(x2 - b);
                let a = (y1 - y2) / (u1 - u2);
                let c = 0.5 * ((y1 - a * u1) + (y2 - a * u2));
                push_candidate(&mut found, params, branch, a, b, c, &points);
            }
            select(found, residual_tol, &points)
        }
        (None, Some(c)) => {
            let mut pair = [
                (fin(finite[0].x), fin(finite[0].y)),
                (fin(finite[1].x), fin(finite[1].y)),
            ];
            pair.sort_by(|p, q| p.0.total_cmp(&q.0));
            let [(x1, y1), (x2, y2)] = pair;
            let seeds = seeds_over_line(&[x1, x2]);
            let mut found = Vec::new();
            for branch in [Branch::Pos, Branch::Neg] {
                let f = params.exponent(branch);
                let cleared = |b: f64| {
                    let scale = 1.0 + (x1 - b).abs().max((x2 - b).abs());
                    (y1 - c) * scaled(&f, x1, b, scale) - (y2 - c) * scaled(&f, x2, b, scale)
                };
                for b in bracket_roots(cleared, &seeds, B_TOL) {
                    let a = if (x1 - b).abs() >= (x2 - b).abs() {
                        (y1 - c) * f.eval_real(x1 - b)
                    } else {
                        (y2 - c) * f.eval_real(x2 - b)
                    };
                    push_candidate(&mut found, params, branch, a, b, c, &points);
                }
            }
            select(found, residual_tol, &points)
        }
        (None, None) => join_finite(params, points, residual_tol),
    }
}

fn checked(circle: Circle, points: &[TorusPoint], tol: f64) -> Result<Circle> {
    let residual = max_residual(&circle, points);
    if residual > tol {
        return Err(GeomError::JoinFailure(format!(
            "residual {residual:e} exceeds {tol:e} for {circle}"
        )));
    }
    Ok(circle)
}

fn join_finite(params: &HartmannParams, points: [TorusPoint; 3], tol: f64) -> Result<Circle> {
    let mut xy = points.map(|p| (fin(p.x), fin(p.y)));
    xy.sort_by(|p, q| p.0.total_cmp(&q.0));
    let [(x1, y1), (x2, y2), (x3, y3)] = xy;

    let slope = (y3 - y1) / (x3 - x1);
    let through = line(slope, y1 - slope * x1);
    if let Ok(l) = &through {
        if l.eval(S1Point::Finite(x2))
            .chart_distance(S1Point::Finite(y2))
            <= COLLINEAR_TOL
        {
            return checked(l.clone(), &points, tol);
        }
    }

    let seeds = seeds_over_line(&[x1, x2, x3]);
    let mut found = Vec::new();
    for branch in [Branch::Pos, Branch::Neg] {
        let f = params.exponent(branch);
        let cleared = |b: f64| {
            let scale = 1.0 + (x1 - b).abs().max((x3 - b).abs());
            let v1 = scaled(&f, x1, b, scale);
            let v2 = scaled(&f, x2, b, scale);
            let v3 = scaled(&f, x3, b, scale);
            (y1 - y2) * (v3 - v1) * v2 - (y1 - y3) * (v2 - v1) * v3
        };
        for b in bracket_roots(cleared, &seeds, B_TOL) {
            let u = [x1, x2, x3].map(|x| 1.0 / f.eval_real(x - b));
            if u.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let ys = [y1, y2, y3];
            // best-conditioned pair for the slope in u
            let (i, j) = [(0, 1), (0, 2), (1, 2)]
                .into_iter()
                .max_by(|&(i, j), &(k, l)| (u[i] - u[j]).abs().total_cmp(&(u[k] - u[l]).abs()))
                .unwrap();
            let a = (ys[i] - ys[j]) / (u[i] - u[j]);
            let c = (0..3).map(|k| ys[k] - a * u[k]).sum::<f64>() / 3.0;
            push_candidate(&mut found, params, branch, a, b, c, &points);
        }
    }
    let hyperbola = select(found, tol, &points);
    match (hyperbola, through) {
        (Ok(c), _) => Ok(c),
        // nearly collinear triples whose hyperbola root lies beyond the seeds:
        // the line is then within the iterative tolerance
        (Err(e), Ok(l)) => checked(l, &points, tol).map_err(|_| e),
        (Err(e), Err(_)) => Err(e),
    }
}
