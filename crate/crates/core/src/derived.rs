//! Derived planes `𝕋_p`: the points not parallel to `p`, with the parallel
//! classes avoiding `p` and the circles through `p` as lines.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{angle_of, metric_e, wrap_angle, S1Point, TorusPoint};
use crate::operations::gamma_intersect;
use crate::planes::{Circle, Plane};

/// Residual bound for collinearity.
pub const COLLINEAR_TOL: f64 = 1e-7;
/// Points closer than this in `d` are merged by [`generate_dense`].
pub const DEDUP_TOL: f64 = 1e-9;
/// Deepest closure level accepted by [`generate_dense`].
pub const MAX_DEPTH: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum LineKind {
    /// `{x₀} × 𝕊¹` minus its point on `[p]₋`.
    PlusClass(S1Point),
    /// `𝕊¹ × {y₀}` minus its point on `[p]₊`.
    MinusClass(S1Point),
    /// A circle through `p`, minus `p`.
    CircleLine(Circle),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedLine {
    pub kind: LineKind,
    pub base: TorusPoint,
}

impl DerivedLine {
    /// Distance of `c` from the line in the coordinate that the line fixes.
    pub fn residual(&self, c: &TorusPoint) -> f64 {
        match &self.kind {
            LineKind::PlusClass(x0) => x0.chart_distance(c.x),
            LineKind::MinusClass(y0) => y0.chart_distance(c.y),
            LineKind::CircleLine(circle) => circle.residual(c),
        }
    }

    pub fn contains(&self, c: &TorusPoint, tol: f64) -> bool {
        self.residual(c) <= tol
    }

    /// Position of `c` along the line, an angle in `(0, 2π)` measured from
    /// the puncture.
    pub fn order_key(&self, c: &TorusPoint) -> f64 {
        match &self.kind {
            LineKind::PlusClass(_) => wrap_angle(angle_of(c.y) - angle_of(self.base.y)),
            LineKind::MinusClass(_) | LineKind::CircleLine(_) => {
                wrap_angle(angle_of(c.x) - angle_of(self.base.x))
            }
        }
    }

    pub fn circle(&self) -> Option<&Circle> {
        match &self.kind {
            LineKind::CircleLine(c) => Some(c),
            _ => None,
        }
    }
}

fn check_in_plane(p: &TorusPoint, points: &[&TorusPoint]) -> Result<()> {
    if points.iter().any(|a| a.is_parallel(p)) {
        Err(GeomError::OutsideDerivedPlane)
    } else {
        Ok(())
    }
}

fn check_distinct(points: &[&TorusPoint]) -> Result<()> {
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a.x.same_as(b.x) && a.y.same_as(b.y) {
                return Err(GeomError::DegenerateInput(format!("repeated point {a}")));
            }
        }
    }
    Ok(())
}

/// The line `ab` of `𝕋_p`.
pub fn derived_line(
    plane: &Plane,
    p: &TorusPoint,
    a: &TorusPoint,
    b: &TorusPoint,
) -> Result<DerivedLine> {
    check_in_plane(p, &[a, b])?;
    check_distinct(&[a, b])?;
    let kind = if a.x.same_as(b.x) {
        LineKind::PlusClass(a.x)
    } else if a.y.same_as(b.y) {
        LineKind::MinusClass(a.y)
    } else {
        LineKind::CircleLine(plane.join(*p, *a, *b)?)
    };
    Ok(DerivedLine { kind, base: *p })
}

/// Whether `c` lies on `ab` within `tol`.
pub fn collinear(
    plane: &Plane,
    p: &TorusPoint,
    a: &TorusPoint,
    b: &TorusPoint,
    c: &TorusPoint,
    tol: f64,
) -> Result<bool> {
    check_in_plane(p, &[a, b, c])?;
    check_distinct(&[a, b, c])?;
    Ok(derived_line(plane, p, a, b)?.contains(c, tol))
}

/// Whether `b` lies in the open interval `(a, c)` of their common line.
pub fn between(
    plane: &Plane,
    p: &TorusPoint,
    a: &TorusPoint,
    b: &TorusPoint,
    c: &TorusPoint,
) -> Result<bool> {
    if !collinear(plane, p, a, c, b, COLLINEAR_TOL)? {
        return Err(GeomError::NotCollinear);
    }
    let line = derived_line(plane, p, a, c)?;
    let [ka, kb, kc] = [a, b, c].map(|t| line.order_key(t));
    Ok((ka < kb && kb < kc) || (kc < kb && kb < ka))
}

/// The maximum metric on affine points.
pub fn metric_d(a: &TorusPoint, b: &TorusPoint) -> Result<f64> {
    match (a.x, a.y, b.x, b.y) {
        (S1Point::Finite(x1), S1Point::Finite(y1), S1Point::Finite(x2), S1Point::Finite(y2)) => {
            Ok((x1 - x2).abs().max((y1 - y2).abs()))
        }
        _ => Err(GeomError::InfiniteCoordinate),
    }
}

/// A closed coordinate rectangle `[x₀, x₁] × [y₀, y₁]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Region {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) || x0 >= x1 || y0 >= y1 {
            return Err(GeomError::InvalidParameter(format!(
                "region [{x0}, {x1}] x [{y0}, {y1}] must be a finite, nondegenerate rectangle"
            )));
        }
        Ok(Region {
            x: [x0, x1],
            y: [y0, y1],
        })
    }

    pub fn unit_square() -> Self {
        Region {
            x: [0.0, 1.0],
            y: [0.0, 1.0],
        }
    }

    /// `d`-distance from the rectangle; infinite for points at infinity.
    pub fn distance(&self, q: &TorusPoint) -> f64 {
        match (q.x.finite(), q.y.finite()) {
            (Some(x), Some(y)) => {
                let dx = (self.x[0] - x).max(x - self.x[1]).max(0.0);
                let dy = (self.y[0] - y).max(y - self.y[1]).max(0.0);
                dx.max(dy)
            }
            _ => f64::INFINITY,
        }
    }

    fn meets_classes_of(&self, p: &TorusPoint) -> bool {
        let inside = |v: S1Point, r: [f64; 2]| v.finite().is_some_and(|v| r[0] <= v && v <= r[1]);
        inside(p.x, self.x) || inside(p.y, self.y)
    }

    /// The `n × n` grid including the corners.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let at = |r: [f64; 2], i: usize| r[0] + (r[1] - r[0]) * i as f64 / (n - 1) as f64;
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (at(self.x, i), at(self.y, j))))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DenseOptions {
    /// Points feeding the constructions of one level: half spread over the
    /// region by farthest-point selection, half from the previous level.
    pub active: usize,
    pub level_cap: usize,
    pub total_cap: usize,
    /// Side of the grid measuring the covering radius.
    pub grid: usize,
}

impl Default for DenseOptions {
    fn default() -> Self {
        DenseOptions {
            active: 32,
            level_cap: 10_000,
            total_cap: 100_000,
            grid: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseResult {
    pub points: Vec<TorusPoint>,
    /// Covering radius after each level, starting with the seeds.
    pub radii: Vec<f64>,
    pub covering_radius: f64,
}

/// Hash key on a `DEDUP_TOL` grid; far or infinite coordinates fall back
/// to angles.
fn dedup_key(q: &TorusPoint) -> (i64, i64, bool) {
    let coord = |v: S1Point| match v.finite() {
        Some(v) if v.abs() < 1e6 => (v / DEDUP_TOL).round() as i64,
        _ => (angle_of(v) / DEDUP_TOL).round() as i64,
    };
    let far =
        q.x.finite().is_none_or(|v| v.abs() >= 1e6) || q.y.finite().is_none_or(|v| v.abs() >= 1e6);
    (coord(q.x), coord(q.y), far)
}

fn line_key(line: &DerivedLine) -> Vec<i64> {
    const PROBES: [f64; 3] = [0.7, 2.3, 4.4];
    let round = |t: f64| (t / DEDUP_TOL).round() as i64;
    match &line.kind {
        LineKind::PlusClass(x) => vec![0, round(angle_of(*x))],
        LineKind::MinusClass(y) => vec![1, round(angle_of(*y))],
        LineKind::CircleLine(c) => {
            let mut key = vec![2];
            key.extend(
                PROBES
                    .iter()
                    .map(|t| round(angle_of(c.eval(crate::geometry::point_at_angle(*t))))),
            );
            key
        }
    }
}

/// Common points of two circles through `p` other than `p`.
fn circle_meets(c: &Circle, d: &Circle, p: &TorusPoint) -> Vec<TorusPoint> {
    if let (Some(m1), Some(m2)) = (c.as_moebius(), d.as_moebius()) {
        // fixed points of m2⁻¹ ∘ m1
        let [a, b, cc, dd] = m2.inverse().compose(&m1).coefficients();
        let scale = a.abs().max(b.abs()).max(cc.abs()).max(dd.abs());
        let mut xs = Vec::new();
        if cc.abs() <= 1e-14 * scale {
            xs.push(S1Point::Infinity);
            if (dd - a).abs() > 1e-14 * scale {
                xs.push(S1Point::new(b / (dd - a)));
            }
        } else {
            // cc x² + (dd - a) x - b = 0
            let (qa, qb, qc) = (cc, dd - a, -b);
            let disc = qb * qb - 4.0 * qa * qc;
            if disc >= 0.0 {
                let s = -0.5 * (qb + qb.signum() * disc.sqrt());
                if s != 0.0 {
                    xs.push(S1Point::new(qc / s));
                }
                xs.push(S1Point::new(s / qa));
            }
        }
        return xs
            .into_iter()
            .map(|x| c.point_at(x))
            .filter(|q| metric_e(q, p) > 1e-7)
            .collect();
    }
    match gamma_intersect(c, d) {
        Ok(hit) => hit
            .points
            .into_iter()
            .filter(|q| metric_e(q, p) > 1e-7)
            .collect(),
        Err(_) => Vec::new(),
    }
}

fn meet(l: &DerivedLine, m: &DerivedLine, p: &TorusPoint) -> Vec<TorusPoint> {
    use LineKind::*;
    match (&l.kind, &m.kind) {
        (PlusClass(_), PlusClass(_)) | (MinusClass(_), MinusClass(_)) => Vec::new(),
        (PlusClass(x), MinusClass(y)) | (MinusClass(y), PlusClass(x)) => {
            vec![TorusPoint { x: *x, y: *y }]
        }
        (PlusClass(x), CircleLine(c)) | (CircleLine(c), PlusClass(x)) => vec![c.point_at(*x)],
        (MinusClass(y), CircleLine(c)) | (CircleLine(c), MinusClass(y)) => vec![TorusPoint {
            x: c.inv_eval(*y),
            y: *y,
        }],
        (CircleLine(c), CircleLine(d)) => circle_meets(c, d, p),
    }
}

/// Greedy farthest-point selection under `d`, starting from the first point.
fn spread(points: &[TorusPoint], k: usize) -> Vec<TorusPoint> {
    if points.is_empty() || k == 0 {
        return Vec::new();
    }
    let d = |a: &TorusPoint, b: &TorusPoint| metric_d(a, b).unwrap_or(f64::INFINITY);
    let mut chosen = vec![points[0]];
    let mut gap: Vec<f64> = points.iter().map(|q| d(q, &points[0])).collect();
    while chosen.len() < k.min(points.len()) {
        let (i, g) =
            gap.iter().enumerate().fold(
                (0, -1.0),
                |best, (i, g)| if *g > best.1 { (i, *g) } else { best },
            );
        if g <= 0.0 {
            break;
        }
        chosen.push(points[i]);
        for (j, q) in points.iter().enumerate() {
            gap[j] = gap[j].min(d(q, &points[i]));
        }
    }
    chosen
}

fn covering_radius(points: &[TorusPoint], region: &Region, n: usize) -> f64 {
    let affine: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|q| Some((q.x.finite()?, q.y.finite()?)))
        .collect();
    region
        .grid(n)
        .into_iter()
        .map(|(gx, gy)| {
            affine
                .iter()
                .map(|(x, y)| (x - gx).abs().max((y - gy).abs()))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Closure of `{d₂, d₃, π(d₂,d₃), π(d₃,d₂)}` under parallel intersection,
/// intersection of lines and parallel projection onto circle lines, run for
/// `depth` levels.
pub fn generate_dense(
    plane: &Plane,
    p: &TorusPoint,
    d2: &TorusPoint,
    d3: &TorusPoint,
    depth: usize,
    region: &Region,
) -> Result<DenseResult> {
    generate_dense_with(plane, p, d2, d3, depth, region, &DenseOptions::default())
}

pub fn generate_dense_with(
    plane: &Plane,
    p: &TorusPoint,
    d2: &TorusPoint,
    d3: &TorusPoint,
    depth: usize,
    region: &Region,
    opts: &DenseOptions,
) -> Result<DenseResult> {
    if depth > MAX_DEPTH {
        return Err(GeomError::InvalidParameter(format!(
            "depth {depth} exceeds {MAX_DEPTH}"
        )));
    }
    if p.is_parallel(d2) || p.is_parallel(d3) || d2.is_parallel(d3) {
        return Err(GeomError::ParallelInput(format!("{p}, {d2}, {d3}")));
    }
    if region.meets_classes_of(p) {
        return Err(GeomError::RegionOutsideDerivedPlane);
    }
    if opts.grid < 2 {
        return Err(GeomError::InvalidParameter(
            "covering grid needs at least 2 points per side".into(),
        ));
    }

    let mut points = vec![
        *d2,
        *d3,
        TorusPoint { x: d2.x, y: d3.y },
        TorusPoint { x: d3.x, y: d2.y },
    ];
    let mut seen: HashSet<(i64, i64, bool)> = points.iter().map(dedup_key).collect();
    let mut radii = vec![covering_radius(&points, region, opts.grid)];
    let mut last = points.clone();
    let reach = 0.5 * (region.x[1] - region.x[0]).max(region.y[1] - region.y[0]);

    for _ in 0..depth {
        let near: Vec<TorusPoint> = points
            .iter()
            .filter(|q| region.distance(q) <= reach)
            .copied()
            .collect();
        let fresh: Vec<TorusPoint> = last
            .iter()
            .filter(|q| region.distance(q) == 0.0)
            .copied()
            .collect();
        let mut active = spread(&near, opts.active / 2);
        for q in spread(&fresh, opts.active - active.len()) {
            if !active.contains(&q) {
                active.push(q);
            }
        }

        let mut candidates: Vec<TorusPoint> = Vec::new();
        for a in &active {
            for b in &active {
                candidates.push(TorusPoint { x: a.x, y: b.y });
            }
        }
        let mut lines: Vec<DerivedLine> = Vec::new();
        let mut line_keys = HashSet::new();
        for (i, a) in active.iter().enumerate() {
            for b in &active[i + 1..] {
                if let Ok(l) = derived_line(plane, p, a, b) {
                    if line_keys.insert(line_key(&l)) {
                        lines.push(l);
                    }
                }
            }
        }
        for (i, l) in lines.iter().enumerate() {
            for m in &lines[i + 1..] {
                candidates.extend(meet(l, m, p));
            }
        }
        for a in &active {
            for c in lines.iter().filter_map(DerivedLine::circle) {
                candidates.push(c.point_at(a.x));
                candidates.push(TorusPoint {
                    x: c.inv_eval(a.y),
                    y: a.y,
                });
            }
        }

        let mut fresh_points = Vec::new();
        let mut level_keys = HashSet::new();
        for q in candidates {
            if q.is_parallel(p) {
                continue;
            }
            let key = dedup_key(&q);
            if !seen.contains(&key) && level_keys.insert(key) {
                fresh_points.push(q);
            }
        }
        // stable: recipe order breaks ties
        fresh_points.sort_by(|a, b| region.distance(a).total_cmp(&region.distance(b)));
        let room = opts.total_cap.saturating_sub(points.len());
        fresh_points.truncate(opts.level_cap.min(room));
        for q in &fresh_points {
            seen.insert(dedup_key(q));
        }
        points.extend(fresh_points.iter().copied());
        last = fresh_points;
        radii.push(covering_radius(&points, region, opts.grid));
    }

    Ok(DenseResult {
        points,
        covering_radius: *radii.last().expect("seed radius"),
        radii,
    })
}
