//! Intersection of two circles.
//!
//! Both circles are graphs of homeomorphisms, so the angle of `C(x)` is a
//! monotone function of the angle of `x` once lifted to ℝ. The lifted
//! difference `δ(θ) = angle C(x(θ)) - angle D(x(θ))` is therefore exact and
//! continuous, and common points are the solutions of `δ(θ) ∈ 2πℤ`: sign
//! changes of `δ - 2πm` are bracketed on a uniform grid and refined, and
//! contacts without a sign change (touching points, possibly at corners) are
//! found by minimizing `|δ - 2πm|` around local extrema of `δ`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{angle_of, point_at_angle, wrap_angle, TorusPoint, INF};
use crate::planes::Circle;
use crate::roots::{brent, golden_min};

/// Grid density of the scan.
pub const SCAN_SAMPLES: usize = 4096;
/// Roots closer than this (in angle) are merged.
pub const MERGE_TOL: f64 = 1e-9;
/// Contact threshold for extrema of `|δ - 2πm|` (in angle).
pub const CONTACT_TOL: f64 = 1e-10;
/// All grid values of `|δ mod 2π|` below this mean the circles coincide.
pub const EQUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntersectionKind {
    Disjoint,
    Touching,
    Secant,
}

/// Common points of two distinct circles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionResult {
    pub points: Vec<TorusPoint>,
    pub kind: IntersectionKind,
}

impl IntersectionResult {
    fn from_points(points: Vec<TorusPoint>) -> Self {
        let kind = match points.len() {
            0 => IntersectionKind::Disjoint,
            1 => IntersectionKind::Touching,
            _ => IntersectionKind::Secant,
        };
        IntersectionResult { points, kind }
    }
}

/// Lifted angle step from `from` to `to` in the direction of `orientation`.
/// Rounding may move a monotone image a few ulps backwards; such steps are
/// kept as tiny negative moves instead of almost full turns.
#[inline]
fn lifted_step(from: f64, to: f64, orientation: i8) -> f64 {
    const SLACK: f64 = 1e-9;
    if orientation > 0 {
        let s = (to - from).rem_euclid(TAU);
        if s > TAU - SLACK {
            s - TAU
        } else {
            s
        }
    } else {
        let s = (from - to).rem_euclid(TAU);
        if s > TAU - SLACK {
            TAU - s
        } else {
            -s
        }
    }
}

struct Scan<'a> {
    c: &'a Circle,
    d: &'a Circle,
    oc: i8,
    od: i8,
    step: f64,
    /// Image angles on the grid, `n + 1` entries (the last repeats the first).
    ac: Vec<f64>,
    ad: Vec<f64>,
    /// Lifted difference on the grid.
    delta: Vec<f64>,
}

impl<'a> Scan<'a> {
    fn new(c: &'a Circle, d: &'a Circle, n: usize) -> Self {
        let (oc, od) = (c.orientation(), d.orientation());
        let step = TAU / n as f64;
        let mut ac = Vec::with_capacity(n + 1);
        let mut ad = Vec::with_capacity(n + 1);
        for k in 0..n {
            let x = point_at_angle(step * k as f64);
            ac.push(angle_of(c.eval(x)));
            ad.push(angle_of(d.eval(x)));
        }
        ac.push(ac[0]);
        ad.push(ad[0]);
        let mut delta = Vec::with_capacity(n + 1);
        let (mut lc, mut ld) = (ac[0], ad[0]);
        delta.push(lc - ld);
        for k in 1..=n {
            lc += lifted_step(ac[k - 1], ac[k], oc);
            ld += lifted_step(ad[k - 1], ad[k], od);
            // the lift fixes the branch; the value itself is recomputed
            // locally to avoid accumulated rounding
            let raw = ac[k] - ad[k];
            let lifted = lc - ld;
            delta.push(raw + TAU * ((lifted - raw) / TAU).round());
        }
        // a full turn of two homeomorphisms of the same orientation returns δ
        // to its start; otherwise it advances by ±4π
        let winding = (oc as f64 - od as f64) * TAU;
        delta[n] = delta[0] + winding;
        Scan {
            c,
            d,
            oc,
            od,
            step,
            ac,
            ad,
            delta,
        }
    }

    fn n(&self) -> usize {
        self.ac.len() - 1
    }

    /// Lifted `δ` at an angle inside grid cell `k` (`θ ∈ [θ_k, θ_{k+1}]`).
    fn delta_in_cell(&self, k: usize, theta: f64) -> f64 {
        let x = point_at_angle(theta);
        let a = angle_of(self.c.eval(x));
        let b = angle_of(self.d.eval(x));
        self.delta[k] + lifted_step(self.ac[k], a, self.oc) - lifted_step(self.ad[k], b, self.od)
    }

    /// Lifted `δ` on the window of cells `k - 1` and `k` (cyclic), expressed
    /// on the branch of cell `k`.
    fn delta_around(&self, k: usize, theta: f64) -> f64 {
        let n = self.n();
        let t0 = self.step * k as f64;
        if theta >= t0 {
            self.delta_in_cell(k % n, wrap_angle(theta))
        } else {
            let prev = (k + n - 1) % n;
            // cell k-1 lives on the branch of δ[prev]; shift it when wrapping
            let shift = if k == 0 {
                self.delta[0] - self.delta[n]
            } else {
                0.0
            };
            self.delta_in_cell(prev, wrap_angle(theta)) + shift
        }
    }
}

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `angle C(x) - angle D(x)` reduced to `(-π, π]`.
fn local_gap(c: &Circle, d: &Circle, theta: f64) -> f64 {
    let x = point_at_angle(theta);
    let g = (angle_of(c.eval(x)) - angle_of(d.eval(x))).rem_euclid(TAU);
    if g > PI {
        g - TAU
    } else {
        g
    }
}

/// Locate a contact near the minimizer `t` of `v = sign·(δ - 2πm)`.
///
/// The minimizer alone is only accurate to `√(ε/κ)` on flat contacts. The
/// midpoint of the sublevel interval `{v ≤ v(t) + T}` moves linearly in `T`
/// at a corner and like `T + O(T²)` at a smooth contact, so two levels
/// combined by Richardson extrapolation locate both kinds.
fn refine_contact(scan: &Scan<'_>, k: usize, t: f64, sign: f64, target: f64) -> f64 {
    const LEVEL: f64 = 1e-10;
    const REACH: f64 = 0.25;
    let v = |u: f64| sign * (scan.delta_around(k, u) - target);
    let base = v(t);
    let midpoint = |level: f64| -> Option<f64> {
        let floor = base + level;
        let edge = |dir: f64| -> Option<f64> {
            let mut inner = 0.0;
            let mut outer = 1e-12;
            while v(t + dir * outer) <= floor {
                inner = outer;
                outer *= 4.0;
                if outer > REACH {
                    return None;
                }
            }
            brent(|w| v(t + dir * w) - floor, inner, outer, 1e-15)
        };
        Some(t + 0.5 * (edge(1.0)? - edge(-1.0)?))
    };
    match (midpoint(LEVEL), midpoint(4.0 * LEVEL)) {
        (Some(m1), Some(m2)) => (4.0 * m1 - m2) / 3.0,
        (Some(m1), None) => m1,
        _ => t,
    }
}

/// Whether the circles stay within [`CONTACT_TOL`] of each other along the
/// shorter arc between two abscissae given by angle.
pub fn in_contact(c: &Circle, d: &Circle, from: f64, to: f64) -> bool {
    const PROBES: usize = 16;
    let span = signed_angle(to, from);
    (0..=PROBES).all(|i| {
        let t = from + span * i as f64 / PROBES as f64;
        local_gap(c, d, t).abs() <= CONTACT_TOL
    })
}

fn signed_angle(a: f64, b: f64) -> f64 {
    let g = (a - b).rem_euclid(TAU);
    if g > PI {
        g - TAU
    } else {
        g
    }
}

/// Merge roots closer than [`MERGE_TOL`], and roots joined by an arc along
/// which the circles agree to [`CONTACT_TOL`]: a double root resolved as
/// two, or a plateau of numerically coincident arcs. Contact roots are
/// preferred as representatives.
fn merge_roots(c: &Circle, d: &Circle, roots: Vec<f64>, contacts: Vec<f64>) -> Vec<f64> {
    let mut all: Vec<(f64, bool)> = roots
        .into_iter()
        .map(|r| (r, false))
        .chain(contacts.into_iter().map(|r| (r, true)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut merged: Vec<(f64, bool)> = Vec::new();
    for (r, contact) in all {
        let joined = merged
            .iter_mut()
            .find(|(m, _)| cyclic_gap(*m, r) <= MERGE_TOL || in_contact(c, d, *m, r));
        match joined {
            Some(slot) => {
                if contact && !slot.1 {
                    *slot = (r, true);
                }
            }
            None => merged.push((r, contact)),
        }
    }
    merged.into_iter().map(|(r, _)| r).collect()
}

/// All common points of two distinct circles, at most two.
pub fn gamma_intersect(c: &Circle, d: &Circle) -> Result<IntersectionResult> {
    gamma_intersect_with(c, d, SCAN_SAMPLES)
}

/// [`gamma_intersect`] with a configurable scan density.
pub fn gamma_intersect_with(c: &Circle, d: &Circle, samples: usize) -> Result<IntersectionResult> {
    let scan = Scan::new(c, d, samples.max(16));
    let n = scan.n();

    let off = |v: f64| {
        let m = (v / TAU).round();
        (v - TAU * m, m)
    };
    if scan.delta[..n].iter().all(|v| off(*v).0.abs() <= EQUAL_TOL) {
        return Err(GeomError::EqualCircles);
    }

    let mut roots: Vec<f64> = Vec::new();
    let mut contacts: Vec<f64> = Vec::new();
    // sign changes of δ - 2πm and exact hits
    let mut crossed = vec![false; n];
    for (k, cross) in crossed.iter_mut().enumerate() {
        let (u, v) = (scan.delta[k], scan.delta[k + 1]);
        if off(u).0 == 0.0 {
            roots.push(scan.step * k as f64);
        }
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let m_lo = (lo / TAU).floor() as i64 + 1;
        let m_hi = (hi / TAU).ceil() as i64 - 1;
        for m in m_lo..=m_hi {
            let target = TAU * m as f64;
            if !(lo < target && target < hi) {
                continue;
            }
            *cross = true;
            let t0 = scan.step * k as f64;
            let t1 = scan.step * (k + 1) as f64;
            let g = |t: f64| scan.delta_in_cell(k, t) - target;
            if let Some(t) = brent(g, t0, t1, 1e-12) {
                roots.push(wrap_angle(t));
            }
        }
    }

    // extrema of δ: contacts without a sign change, or two crossings closer
    // than the grid spacing
    for k in 0..n {
        let prev = if k == 0 {
            scan.delta[n - 1] + (scan.delta[0] - scan.delta[n])
        } else {
            scan.delta[k - 1]
        };
        let cur = scan.delta[k];
        let next = scan.delta[k + 1];
        if (cur - prev) * (next - cur) > 0.0 || crossed[k] || crossed[(k + n - 1) % n] {
            continue;
        }
        let target = TAU * (cur / TAU).round();
        let swing = (cur - prev).abs().max((next - cur).abs());
        if (cur - target).abs() > 2.0 * swing + CONTACT_TOL {
            continue;
        }
        // orient so that the extremum is a minimum
        let sign = if cur <= prev && cur <= next {
            1.0
        } else {
            -1.0
        };
        let t0 = scan.step * k as f64;
        let (lo, hi) = (t0 - scan.step, t0 + scan.step);
        let (t, _) = golden_min(|t| sign * scan.delta_around(k, t), lo, hi, 1e-13);
        let extreme = scan.delta_around(k, t);
        let target = TAU * (extreme / TAU).round();
        let gap = sign * (extreme - target);
        if gap.abs() <= CONTACT_TOL {
            contacts.push(wrap_angle(refine_contact(&scan, k, t, sign, target)));
        } else if gap < 0.0 {
            for (a, b) in [(lo, t), (t, hi)] {
                if let Some(r) = brent(|u| scan.delta_around(k, u) - target, a, b, 1e-12) {
                    roots.push(wrap_angle(r));
                }
            }
        }
    }

    // points at which either circle is infinite, tested exactly
    for x in c
        .special_abscissae()
        .into_iter()
        .chain(d.special_abscissae())
    {
        let (yc, yd) = (c.eval(x), d.eval(x));
        if yc.same_as(yd) {
            roots.push(angle_of(x));
        }
    }

    let merged = merge_roots(c, d, roots, contacts);
    if merged.len() > 2 {
        return Err(GeomError::TooManyIntersections {
            count: merged.len(),
        });
    }
    let both_at_infinity = c.eval(INF).same_as(d.eval(INF));
    let points = merged
        .into_iter()
        .map(|t| {
            // the common point over ∞ is reported exactly
            if both_at_infinity && cyclic_gap(t, PI) <= MERGE_TOL {
                c.point_at(INF)
            } else {
                c.point_at(point_at_angle(t))
            }
        })
        .collect();
    Ok(IntersectionResult::from_points(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::S1Point;
    use crate::moebius::MoebiusMap;
    use crate::planes::hartmann::line;

    fn mg(a: f64, b: f64, c: f64, d: f64) -> Circle {
        Circle::MoebiusGraph(MoebiusMap::new(a, b, c, d).unwrap())
    }

    fn swapped(a: f64, b: f64, c: f64, d: f64) -> Circle {
        Circle::SwappedGraph {
            g: crate::planes::Homeo::Identity,
            h: MoebiusMap::new(a, b, c, d).unwrap(),
            f: crate::planes::Homeo::Identity,
        }
    }

    #[test]
    fn secant_through_zero_and_infinity() {
        let r = gamma_intersect(&Circle::identity(), &mg(2.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(r.kind, IntersectionKind::Secant);
        assert!(r
            .points
            .iter()
            .any(|p| p.chart_distance(&TorusPoint::new(0.0, 0.0)) < 1e-9));
        assert!(r.points.iter().any(|p| *p == TorusPoint::new(INF, INF)));
    }

    #[test]
    fn disjoint_reciprocal() {
        // y = -1/x has det +1, same orientation as the identity
        let r = gamma_intersect(&Circle::identity(), &mg(0.0, -1.0, 1.0, 0.0)).unwrap();
        assert_eq!(r.kind, IntersectionKind::Disjoint);
    }

    #[test]
    fn touching_at_origin() {
        let r = gamma_intersect(&Circle::identity(), &mg(1.0, 0.0, 1.0, 1.0)).unwrap();
        assert_eq!(r.kind, IntersectionKind::Touching);
        assert!(r.points[0].chart_distance(&TorusPoint::new(0.0, 0.0)) < 1e-7);
    }

    #[test]
    fn parallel_lines_touch_at_infinity() {
        let r = gamma_intersect(&line(1.0, 0.0).unwrap(), &line(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.kind, IntersectionKind::Touching);
        assert_eq!(r.points[0], TorusPoint::new(INF, INF));
    }

    #[test]
    fn opposite_orientations_always_meet_twice() {
        // y = x and y = -x + 1 meet at x = 1/2 and at ∞
        let r = gamma_intersect(&Circle::identity(), &swapped(-1.0, 1.0, 0.0, 1.0)).unwrap();
        assert_eq!(r.kind, IntersectionKind::Secant);
        assert!(r
            .points
            .iter()
            .any(|p| p.chart_distance(&TorusPoint::new(0.5, 0.5)) < 1e-10));
    }

    #[test]
    fn equal_circles_rejected() {
        assert_eq!(
            gamma_intersect(&Circle::identity(), &line(1.0, 0.0).unwrap()),
            Err(GeomError::EqualCircles)
        );
    }

    #[test]
    fn secant_roots_match_quadratic() {
        // x ↦ (2x + 1)/(x + 3) against the identity: x² + x - 1 = 0
        let r = gamma_intersect(&Circle::identity(), &mg(2.0, 1.0, 1.0, 3.0)).unwrap();
        assert_eq!(r.kind, IntersectionKind::Secant);
        let s5 = 5f64.sqrt();
        for want in [(-1.0 + s5) / 2.0, (-1.0 - s5) / 2.0] {
            assert!(r
                .points
                .iter()
                .any(|p| p.x.chart_distance(S1Point::Finite(want)) < 1e-11));
        }
    }
}
