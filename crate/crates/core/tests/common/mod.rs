//! Convergent families in the derived planes of the classical plane.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toroidal::derived::{between, collinear, derived_line};
use toroidal::geometry::{angle_of, point_at_angle};
use toroidal::{Circle, Plane, TorusPoint};

/// Sequence terms are perturbed by `offset / n²` in angle.
pub const LAST_INDEX: u32 = 1000;

pub struct Family {
    pub p: TorusPoint,
    pub limits: [TorusPoint; 3],
    pub term: Box<dyn Fn(u32) -> [TorusPoint; 3]>,
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

fn angles_apart(angles: &[f64], gap: f64) -> bool {
    angles
        .iter()
        .enumerate()
        .all(|(i, a)| angles[i + 1..].iter().all(|b| angle_gap(*a, *b) > gap))
}

fn affine_point(rng: &mut ChaCha8Rng) -> TorusPoint {
    TorusPoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
}

/// Abscissa angles of three points on a circle line through `p`, well
/// apart from each other and from the puncture.
fn line_angles(rng: &mut ChaCha8Rng, p: &TorusPoint) -> [f64; 3] {
    loop {
        let t: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.0..std::f64::consts::TAU));
        if angles_apart(&[t[0], t[1], t[2], angle_of(p.x)], 0.2) {
            return t;
        }
    }
}

fn through_p(
    plane: &Plane,
    p: &TorusPoint,
    rng: &mut ChaCha8Rng,
) -> (Circle, TorusPoint, TorusPoint) {
    loop {
        let (u, v) = (affine_point(rng), affine_point(rng));
        if let Ok(c) = plane.join(*p, u, v) {
            return (c, u, v);
        }
    }
}

fn nudge(q: &TorusPoint, off: [f64; 2], n: u32) -> TorusPoint {
    let (t, f) = q.angles();
    let s = 1.0 / (n as f64 * n as f64);
    TorusPoint::from_angles(t + off[0] * s, f + off[1] * s)
}

/// A convergent family of collinear triples. `kind` 0 gives circle lines,
/// 1 vertical classes and 2 horizontal classes.
pub fn convergent_family(rng: &mut ChaCha8Rng, kind: u8) -> Family {
    let plane = Plane::classical();
    let p = affine_point(rng);
    match kind {
        0 => {
            let (_, u, v) = through_p(&plane, &p, rng);
            let ts = line_angles(rng, &p);
            let [du, dv]: [[f64; 2]; 2] =
                std::array::from_fn(|_| [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)]);
            let dts: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
            let limit_line = plane.join(p, u, v).unwrap();
            let limits = ts.map(|t| limit_line.point_at(point_at_angle(t)));
            let term = move |n: u32| {
                let line = Plane::classical()
                    .join(p, nudge(&u, du, n), nudge(&v, dv, n))
                    .unwrap();
                let s = 1.0 / (n as f64 * n as f64);
                std::array::from_fn(|i| line.point_at(point_at_angle(ts[i] + dts[i] * s)))
            };
            Family {
                p,
                limits,
                term: Box::new(term),
            }
        }
        _ => {
            let vertical = kind == 1;
            let fixed = loop {
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                let base = if vertical { p.x } else { p.y };
                if angle_gap(t, angle_of(base)) > 0.2 {
                    break t;
                }
            };
            let puncture = if vertical { p.y } else { p.x };
            let free = loop {
                let t: [f64; 3] =
                    std::array::from_fn(|_| rng.gen_range(0.0..std::f64::consts::TAU));
                if angles_apart(&[t[0], t[1], t[2], angle_of(puncture)], 0.2) {
                    break t;
                }
            };
            let dfixed = rng.gen_range(-0.3..0.3);
            let dfree: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-0.3..0.3));
            let make = move |n: Option<u32>| -> [TorusPoint; 3] {
                let s = n.map_or(0.0, |n| 1.0 / (n as f64 * n as f64));
                let c = fixed + dfixed * s;
                std::array::from_fn(|i| {
                    let t = free[i] + dfree[i] * s;
                    if vertical {
                        TorusPoint::from_angles(c, t)
                    } else {
                        TorusPoint::from_angles(t, c)
                    }
                })
            };
            Family {
                p,
                limits: make(None),
                term: Box::new(move |n| make(Some(n))),
            }
        }
    }
}

/// Residual of the third point against the line through the first two.
pub fn residual(p: &TorusPoint, t: &[TorusPoint; 3]) -> f64 {
    derived_line(&Plane::classical(), p, &t[0], &t[1])
        .unwrap()
        .residual(&t[2])
}

/// Three distinct points of a random line of a derived plane.
pub fn random_collinear(rng: &mut ChaCha8Rng) -> (TorusPoint, [TorusPoint; 3]) {
    let plane = Plane::classical();
    let p = affine_point(rng);
    let (c, _, _) = through_p(&plane, &p, rng);
    let ts = line_angles(rng, &p);
    (p, ts.map(|t| c.point_at(point_at_angle(t))))
}

/// Collinearity and betweenness of the limits, judged by the last term.
pub fn limit_preserved(f: &Family) -> Result<(), String> {
    let plane = Plane::classical();
    let last = (f.term)(LAST_INDEX);
    let tau = 2.0 * residual(&f.p, &last) + 1e-15;
    let [a, b, c] = f.limits;
    if !collinear(&plane, &f.p, &a, &b, &c, 10.0 * tau).map_err(|e| e.to_string())? {
        return Err(format!(
            "limits off their line by {:e} > {:e}",
            residual(&f.p, &f.limits),
            10.0 * tau
        ));
    }
    let order = |t: &[TorusPoint; 3]| -> Result<[bool; 3], String> {
        let [a, b, c] = t;
        let bt = |x, y, z| between(&plane, &f.p, x, y, z).map_err(|e| e.to_string());
        Ok([bt(a, b, c)?, bt(b, a, c)?, bt(a, c, b)?])
    };
    let (seq, lim) = (order(&last)?, order(&f.limits)?);
    if seq != lim {
        return Err(format!(
            "betweenness {seq:?} at n = {LAST_INDEX}, {lim:?} in the limit"
        ));
    }
    Ok(())
}
