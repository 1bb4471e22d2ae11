//! The touching circle through a point of a circle and a second point.
//!
//! Circles that are Möbius graphs in suitable coordinates get a closed-form
//! tangency. The general solver works on the pencil of circles through `p`
//! and `q`, indexed by their value `λ` at a reference abscissa `x_r`: the
//! circle through `p`, `q` and a point `C(θ)` of `C` has index `Λ(θ)`, and
//! the touching circle is the limit of `Λ(θ)` as `C(θ)` approaches `p`. The
//! limit is extrapolated from geometric offsets, then certified by
//! intersecting with `C`.

use std::f64::consts::{PI, TAU};

use crate::error::{GeomError, Result};
use crate::geometry::{angle_of, metric_e, point_at_angle, wrap_angle, S1Point, TorusPoint};
use crate::moebius::MoebiusMap;
use crate::operations::intersect::{gamma_intersect, in_contact, IntersectionKind};
use crate::planes::{Circle, HartmannParams, Plane, PlaneFamily, Tolerances};
use crate::roots::{brent, neville_at_zero};

/// Residual above which `p` does not count as a point of `C`.
pub const ON_CIRCLE_TOL: f64 = 1e-9;
/// Number of halvings of the extrapolation offset.
const LEVELS: usize = 4;
/// Largest extrapolation offset in angle.
const MAX_OFFSET: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TouchingOptions {
    /// Seeds of the monotonicity scan along the pencil; `0` skips it.
    pub scan_seeds: usize,
    /// Rank of the reference abscissa indexing the pencil; `0` is the one
    /// farthest from the given points and the corners of nearby pencil
    /// circles. Distinct ranks give independent solves.
    pub pencil_seed: usize,
    /// Use the closed form when available.
    pub closed_form: bool,
    /// Acceptance tolerance for residuals and the touching point.
    pub tol: f64,
}

impl Default for TouchingOptions {
    fn default() -> Self {
        TouchingOptions {
            scan_seeds: 256,
            pencil_seed: 0,
            closed_form: true,
            tol: 1e-7,
        }
    }
}

/// The unique circle through `p` and `q` meeting `c` only at `p`.
pub fn touching_solver(
    plane: &Plane,
    c: &Circle,
    p: TorusPoint,
    q: TorusPoint,
    tol: f64,
) -> Result<Circle> {
    touching_solver_with(
        plane,
        c,
        p,
        q,
        &TouchingOptions {
            tol,
            ..TouchingOptions::default()
        },
    )
}

pub fn touching_solver_with(
    plane: &Plane,
    c: &Circle,
    p: TorusPoint,
    q: TorusPoint,
    opts: &TouchingOptions,
) -> Result<Circle> {
    check_preconditions(c, &p, &q)?;
    if opts.closed_form {
        if let Some(d) = closed_form_touching(plane, c, p, q)? {
            return certify(c, d, &p, &q, opts.tol);
        }
    }
    let candidates = pencil_candidates(plane, c, p, q, opts)?;
    let mut last = None;
    for d in candidates {
        match certify(c, d, &p, &q, opts.tol) {
            Ok(d) => return Ok(d),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| GeomError::NoTouchingCircle("no pencil candidate".into())))
}

fn check_preconditions(c: &Circle, p: &TorusPoint, q: &TorusPoint) -> Result<()> {
    let rp = c.residual(p);
    if rp.is_nan() || rp > ON_CIRCLE_TOL {
        return Err(GeomError::PreconditionViolated(format!(
            "{p} is not on {c} (residual {rp:e})"
        )));
    }
    if c.residual(q) <= ON_CIRCLE_TOL {
        return Err(GeomError::PreconditionViolated(format!("{q} lies on {c}")));
    }
    if p.is_parallel(q) {
        return Err(GeomError::PreconditionViolated(format!(
            "{p} and {q} are parallel"
        )));
    }
    Ok(())
}

/// Accept `d` if it passes through both points and meets `c` only near `p`.
fn certify(c: &Circle, d: Circle, p: &TorusPoint, q: &TorusPoint, tol: f64) -> Result<Circle> {
    let (rp, rq) = (d.residual(p), d.residual(q));
    if rp > tol || rq > tol {
        return Err(GeomError::NoTouchingCircle(format!(
            "{d} misses the given points (residuals {rp:e}, {rq:e})"
        )));
    }
    let hit =
        gamma_intersect(c, &d).map_err(|e| GeomError::NoTouchingCircle(format!("{d}: {e}")))?;
    // on very flat contacts the reported point may sit anywhere on the
    // plateau where the circles agree to rounding
    let at_p =
        |h: &TorusPoint| metric_e(h, p) <= tol || in_contact(c, &d, angle_of(h.x), angle_of(p.x));
    match hit.kind {
        IntersectionKind::Touching if at_p(&hit.points[0]) => Ok(d),
        _ => Err(GeomError::NoTouchingCircle(format!(
            "{d} meets {c} in {} point(s)",
            hit.points.len()
        ))),
    }
}

fn sends_zero_to(v: S1Point) -> MoebiusMap {
    match v {
        S1Point::Finite(v) => MoebiusMap::affine(1.0, v).expect("unit slope"),
        S1Point::Infinity => MoebiusMap::new(0.0, -1.0, 1.0, 0.0).expect("nondegenerate"),
    }
}

/// The Möbius map `D` with `D(u0) = v0`, `D(uq) = vq` touching `m` at `u0`.
pub fn moebius_tangent(
    m: &MoebiusMap,
    (u0, v0): (S1Point, S1Point),
    (uq, vq): (S1Point, S1Point),
) -> Result<MoebiusMap> {
    // conjugate so that the contact point is the origin
    let a = sends_zero_to(u0);
    let b = sends_zero_to(v0).inverse();
    let local = b.compose(m).compose(&a);
    let [_, _, _, dd] = local.coefficients();
    if dd == 0.0 {
        return Err(GeomError::PreconditionViolated(
            "contact point is not on the circle".into(),
        ));
    }
    let k = local.derivative(0.0);
    let u = a.inverse().apply(uq);
    let v = b.apply(vq);
    let c = match (u, v) {
        (S1Point::Finite(u), S1Point::Finite(v)) if u != 0.0 && v != 0.0 => (k * u - v) / (u * v),
        (S1Point::Infinity, S1Point::Finite(v)) if v != 0.0 => k / v,
        (S1Point::Finite(u), S1Point::Infinity) if u != 0.0 => -1.0 / u,
        (S1Point::Infinity, S1Point::Infinity) => 0.0,
        _ => {
            return Err(GeomError::PreconditionViolated(
                "second point is parallel to the contact point".into(),
            ))
        }
    };
    let n = MoebiusMap::new(k, 0.0, c, 1.0)?;
    Ok(b.inverse().compose(&n).compose(&a.inverse()))
}

/// A Möbius map with identity exponent as a Hartmann line or hyperbola.
fn moebius_as_hartmann(m: &MoebiusMap, params: &HartmannParams) -> Result<Circle> {
    let [a, b, c, d] = m.coefficients();
    if c == 0.0 {
        crate::planes::hartmann::line(a / d, b / d)
    } else {
        params.hyperbola(-m.det() / (c * c), -d / c, a / c)
    }
}

fn closed_form_touching(
    plane: &Plane,
    c: &Circle,
    p: TorusPoint,
    q: TorusPoint,
) -> Result<Option<Circle>> {
    let pair = |t: &TorusPoint| (t.x, t.y);
    Ok(match plane.family() {
        PlaneFamily::Classical => match c.as_moebius() {
            Some(m) => Some(Circle::MoebiusGraph(moebius_tangent(
                &m,
                pair(&p),
                pair(&q),
            )?)),
            None => None,
        },
        PlaneFamily::Hartmann(params) => match c.as_moebius() {
            Some(m) if params.as_array() == [1.0; 4] => {
                let d = moebius_tangent(&m, pair(&p), pair(&q))?;
                Some(moebius_as_hartmann(&d, params)?)
            }
            _ => None,
        },
        PlaneFamily::Swapping { .. } => match c {
            Circle::MoebiusGraph(m) => Some(Circle::MoebiusGraph(moebius_tangent(
                m,
                pair(&p),
                pair(&q),
            )?)),
            Circle::SwappedGraph { g, h, f } => {
                let work = |t: &TorusPoint| (f.eval(t.x), g.eval(t.y));
                let d = moebius_tangent(h, work(&p), work(&q))?;
                Some(Circle::SwappedGraph {
                    g: g.clone(),
                    h: d,
                    f: f.clone(),
                })
            }
            _ => None,
        },
    })
}

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Signed representative of `a - b` in `(-π, π]`.
fn signed_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

struct Pencil<'a> {
    plane: Plane,
    c: &'a Circle,
    p: TorusPoint,
    q: TorusPoint,
}

impl Pencil<'_> {
    fn circle_through(&self, theta: f64) -> Result<Circle> {
        let s = self.c.point_at(point_at_angle(theta));
        self.plane.join(self.p, self.q, s)
    }

    fn member(&self, xr: S1Point, lambda: f64) -> Result<Circle> {
        self.plane
            .join(self.p, self.q, TorusPoint::new(xr, point_at_angle(lambda)))
    }
}

/// Reference abscissae ranked by their distance to `p.x`, `q.x` and the
/// corners of the given pencil circles.
fn ranked_references(p: &TorusPoint, q: &TorusPoint, circles: &[Circle]) -> Vec<f64> {
    const CANDIDATES: usize = 64;
    let mut avoid = vec![angle_of(p.x), angle_of(q.x)];
    for d in circles {
        avoid.extend(d.corner_abscissae().into_iter().map(angle_of));
    }
    let mut scored: Vec<(f64, f64)> = (0..CANDIDATES)
        .map(|i| {
            let t = (i as f64 + 0.5) * TAU / CANDIDATES as f64;
            let room = avoid.iter().map(|a| cyclic_gap(*a, t)).fold(PI, f64::min);
            (room, t)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    scored.into_iter().map(|(_, t)| t).collect()
}

/// Angles near which `Λ` is undefined or may fail to be smooth.
fn obstacles(c: &Circle, q: &TorusPoint) -> (Vec<f64>, Vec<f64>) {
    let undefined = vec![angle_of(q.x), angle_of(c.inv_eval(q.y))];
    let corners = c.corner_abscissae().into_iter().map(angle_of).collect();
    (undefined, corners)
}

/// Unwrap angles into a continuous sequence along the given order.
fn unwrap(values: &mut [f64]) {
    for i in 1..values.len() {
        values[i] = values[i - 1] + signed_gap(values[i], values[i - 1]);
    }
}

/// Candidate touching circles from extrapolations of the pencil index.
fn pencil_candidates(
    plane: &Plane,
    c: &Circle,
    p: TorusPoint,
    q: TorusPoint,
    opts: &TouchingOptions,
) -> Result<Vec<Circle>> {
    // members only steer the search; the final circle is certified at `tol`
    let loose = Tolerances {
        join_residual: plane.tol.join_residual.max(opts.tol),
        closed_form_residual: plane.tol.closed_form_residual.max(opts.tol),
        ..plane.tol
    };
    let pencil = Pencil {
        plane: plane.clone().with_tolerances(loose),
        c,
        p,
        q,
    };
    let tp = angle_of(p.x);
    let (undefined, corners) = obstacles(c, &q);

    let at_corner = corners.iter().any(|t| cyclic_gap(*t, tp) <= 1e-12);
    let room = undefined
        .iter()
        .chain(corners.iter())
        .map(|t| cyclic_gap(*t, tp))
        .filter(|g| *g > 1e-12)
        .fold(PI, f64::min);
    let h0 = MAX_OFFSET.min(0.25 * room);

    let offsets = |sign: f64| -> Vec<f64> {
        (0..LEVELS)
            .map(|i| sign * h0 / (1u32 << i) as f64)
            .collect()
    };
    let (hr, hl) = (offsets(1.0), offsets(-1.0));
    let members = |hs: &[f64]| -> Result<Vec<Circle>> {
        hs.iter().map(|h| pencil.circle_through(tp + h)).collect()
    };
    let (dr, dl) = (members(&hr)?, members(&hl)?);

    let all: Vec<Circle> = dr.iter().chain(dl.iter()).cloned().collect();
    let refs = ranked_references(&p, &q, &all);
    let xr = point_at_angle(refs[opts.pencil_seed % refs.len()]);

    if opts.scan_seeds > 0 {
        check_monotone(&pencil, xr, tp, &undefined, opts.scan_seeds)?;
    }

    let index = |ds: &[Circle]| -> Vec<f64> { ds.iter().map(|d| angle_of(d.eval(xr))).collect() };
    let (mut lr, mut ll) = (index(&dr), index(&dl));
    unwrap(&mut lr);
    for v in ll.iter_mut() {
        *v = lr[0] + signed_gap(*v, lr[0]);
    }
    unwrap(&mut ll);

    let right = neville_at_zero(&hr, &lr);
    let left = neville_at_zero(&hl, &ll);
    let mut xs = Vec::with_capacity(2 * LEVELS);
    let mut ys = Vec::with_capacity(2 * LEVELS);
    for i in 0..LEVELS {
        xs.extend([hr[i], hl[i]]);
        ys.extend([lr[i], ll[i]]);
    }
    let both = neville_at_zero(&xs, &ys);
    let order = if at_corner {
        [right, left, 0.5 * (left + right)]
    } else {
        [both, right, left]
    };

    let mut out = Vec::new();
    let polished = (!at_corner).then(|| polish(&pencil, xr, both)).flatten();
    for lambda in polished.into_iter().chain(order) {
        if let Ok(d) = pencil.member(xr, wrap_angle(lambda)) {
            out.push(d);
        }
    }
    Ok(out)
}

/// Refine the extrapolated index by matching slopes at `p`: the touching
/// member is tangent to `C` there.
fn polish(pencil: &Pencil<'_>, xr: S1Point, lambda: f64) -> Option<f64> {
    let target = pencil.c.angle_slope(pencil.p.x);
    if !target.is_finite() {
        return None;
    }
    let slope_gap = |l: f64| -> f64 {
        match pencil.member(xr, wrap_angle(l)) {
            Ok(d) => d.angle_slope(pencil.p.x) - target,
            Err(_) => f64::NAN,
        }
    };
    let g0 = slope_gap(lambda);
    if !g0.is_finite() {
        return None;
    }
    if g0 == 0.0 {
        return Some(lambda);
    }
    let mut width = 1e-10;
    while width <= 1e-2 {
        for side in [1.0, -1.0] {
            let other = lambda + side * width;
            let g = slope_gap(other);
            if g.is_finite() && g.signum() != g0.signum() {
                let (lo, hi) = if side > 0.0 {
                    (lambda, other)
                } else {
                    (other, lambda)
                };
                return brent(slope_gap, lo, hi, 1e-15);
            }
        }
        width *= 4.0;
    }
    None
}

/// Along each arc of `C` avoiding `p` and the undefined points, distinct
/// points lie on distinct pencil circles, so the index is monotone. The
/// index can sweep almost a full turn between neighbouring seeds, so steps
/// that disagree with the prevailing direction are subdivided before they
/// count as violations.
fn check_monotone(
    pencil: &Pencil<'_>,
    xr: S1Point,
    tp: f64,
    undefined: &[f64],
    seeds: usize,
) -> Result<()> {
    const DEPTH: u32 = 10;
    let step = TAU / seeds as f64;
    let mut cuts: Vec<f64> = undefined.iter().map(|t| (t - tp).rem_euclid(TAU)).collect();
    cuts.push(TAU);
    cuts.sort_by(f64::total_cmp);
    let index = |offset: f64| -> Option<f64> {
        pencil
            .circle_through(tp + offset)
            .ok()
            .map(|d| angle_of(d.eval(xr)))
    };

    // samples grouped by arc
    let mut arcs: Vec<Vec<(f64, f64)>> = vec![Vec::new(); cuts.len()];
    for j in 0..seeds {
        let offset = (j as f64 + 0.5) * step;
        if cuts.iter().any(|c| (c - offset).abs() <= 1e-6) {
            continue;
        }
        let arc = cuts.iter().position(|c| offset < *c).unwrap_or(0);
        if let Some(v) = index(offset) {
            arcs[arc].push((offset, v));
        }
    }

    fn consistent(
        index: &dyn Fn(f64) -> Option<f64>,
        (t0, l0): (f64, f64),
        (t1, l1): (f64, f64),
        direction: f64,
        depth: u32,
    ) -> bool {
        let m = signed_gap(l1, l0);
        if m == 0.0 || (m.abs() < PI / 2.0 && m.signum() == direction) {
            return true;
        }
        if depth == 0 {
            // an unresolved large step is ambiguous, a small one is not
            return m.abs() >= PI / 2.0;
        }
        let tm = 0.5 * (t0 + t1);
        match index(tm) {
            Some(lm) => {
                consistent(index, (t0, l0), (tm, lm), direction, depth - 1)
                    && consistent(index, (tm, lm), (t1, l1), direction, depth - 1)
            }
            None => true,
        }
    }

    for samples in arcs.iter().filter(|a| a.len() > 1) {
        // a sweep through most of the circle in one step wraps to a short
        // backwards step, so the direction is decided by majority
        let drift: f64 = samples
            .windows(2)
            .map(|w| signed_gap(w[1].1, w[0].1))
            .filter(|m| m.abs() < PI / 2.0)
            .map(f64::signum)
            .sum();
        if drift == 0.0 {
            continue;
        }
        let direction = drift.signum();
        for w in samples.windows(2) {
            if !consistent(&index, w[0], w[1], direction, DEPTH) {
                return Err(GeomError::NoTouchingCircle(format!(
                    "pencil through {} and {} is not monotone along {}",
                    pencil.p, pencil.q, pencil.c
                )));
            }
        }
    }
    Ok(())
}

/// The touching circle from the pencil alone, skipping any closed form.
pub fn numeric_touching(
    plane: &Plane,
    c: &Circle,
    p: TorusPoint,
    q: TorusPoint,
    opts: &TouchingOptions,
) -> Result<Circle> {
    touching_solver_with(
        plane,
        c,
        p,
        q,
        &TouchingOptions {
            closed_form: false,
            ..*opts
        },
    )
}
