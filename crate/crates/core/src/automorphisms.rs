//! Torus maps, the explicit automorphism groups of the swapping and
//! Hartmann planes, circle-invariance testing, kernels and the sup metric.

use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::geometry::{hausdorff_h, metric_e, point_at_angle, uniform_angles, TorusPoint};
use crate::moebius::MoebiusMap;
use crate::planes::{Circle, Homeo, Plane};
use crate::verification::{random_circle, trial_rng, VerificationReport};

/// Samples per circle compared by [`is_automorphism`].
pub const IMAGE_SAMPLES: usize = 256;
/// Probe points used by [`kernel_membership`].
pub const KERNEL_PROBES: usize = 128;
pub const KERNEL_TOL: f64 = 1e-10;
/// Default grid size for [`metric_e_tilde`].
pub const E_TILDE_SAMPLES: usize = 256 * 256;

/// `(x, y) ↦ (xmap(x), ymap(y))`, or `(xmap(y), ymap(x))` when `swap` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusMap {
    pub xmap: Homeo,
    pub ymap: Homeo,
    pub swap: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    TPlus,
    TMinus,
    Both,
    Neither,
}

impl TorusMap {
    pub fn identity() -> Self {
        TorusMap {
            xmap: Homeo::Identity,
            ymap: Homeo::Identity,
            swap: false,
        }
    }

    pub fn new(xmap: Homeo, ymap: Homeo, swap: bool) -> Self {
        TorusMap { xmap, ymap, swap }
    }

    pub fn apply(&self, p: &TorusPoint) -> TorusPoint {
        let (u, v) = if self.swap { (p.y, p.x) } else { (p.x, p.y) };
        TorusPoint {
            x: self.xmap.eval(u),
            y: self.ymap.eval(v),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &TorusMap) -> TorusMap {
        let (xmap, ymap) = if self.swap {
            (self.xmap.after(&other.ymap), self.ymap.after(&other.xmap))
        } else {
            (self.xmap.after(&other.xmap), self.ymap.after(&other.ymap))
        };
        TorusMap {
            xmap,
            ymap,
            swap: self.swap != other.swap,
        }
    }

    pub fn inverse_apply(&self, p: &TorusPoint) -> TorusPoint {
        let (u, v) = (self.xmap.inverse_eval(p.x), self.ymap.inverse_eval(p.y));
        if self.swap {
            TorusPoint { x: v, y: u }
        } else {
            TorusPoint { x: u, y: v }
        }
    }

    /// Orientation reversal per factor.
    pub fn flips(&self) -> (bool, bool) {
        (
            !self.xmap.is_orientation_preserving(),
            !self.ymap.is_orientation_preserving(),
        )
    }

    /// Structurally the identity.
    pub fn is_identity_descriptor(&self) -> bool {
        !self.swap && self.xmap.is_trivially_identity() && self.ymap.is_trivially_identity()
    }

    /// `(r, s, a, b)` when both factors are affine Möbius maps `rx + a`,
    /// `sy + b`.
    pub fn hartmann_params(&self) -> Option<[f64; 4]> {
        if self.swap {
            return None;
        }
        let (r, a) = affine_params(&self.xmap)?;
        let (s, b) = affine_params(&self.ymap)?;
        Some([r, s, a, b])
    }
}

fn affine_params(h: &Homeo) -> Option<(f64, f64)> {
    match h {
        Homeo::Identity => Some((1.0, 0.0)),
        Homeo::Moebius(m) => {
            let [a, b, c, d] = m.coefficients();
            (c == 0.0).then(|| (a / d, b / d))
        }
        _ => None,
    }
}

impl fmt::Display for TorusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.swap {
            write!(f, "(x,y) -> ({}(y), {}(x))", self.xmap, self.ymap)
        } else {
            write!(f, "(x,y) -> ({}(x), {}(y))", self.xmap, self.ymap)
        }
    }
}

/// `(x, y) ↦ (rx, δ(y))`, an automorphism of `𝓜(f_{d,s}, id)`.
pub fn family_swapping(r: f64, delta: MoebiusMap) -> Result<TorusMap> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(GeomError::InvalidParameter(format!(
            "r = {r} must be positive"
        )));
    }
    if delta.det_sign() < 0 {
        return Err(GeomError::InvalidParameter(format!(
            "δ = {delta} reverses orientation"
        )));
    }
    Ok(TorusMap {
        xmap: Homeo::Moebius(MoebiusMap::affine(r, 0.0)?),
        ymap: Homeo::Moebius(delta),
        swap: false,
    })
}

/// `(x, y) ↦ (rx + a, sy + b)`, an automorphism of every Hartmann plane.
pub fn family_hartmann(r: f64, s: f64, a: f64, b: f64) -> Result<TorusMap> {
    for (name, v) in [("r", r), ("s", s)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(GeomError::InvalidParameter(format!(
                "{name} = {v} must be positive"
            )));
        }
    }
    Ok(TorusMap {
        xmap: Homeo::Moebius(MoebiusMap::affine(r, a)?),
        ymap: Homeo::Moebius(MoebiusMap::affine(s, b)?),
        swap: false,
    })
}

/// A random element of PSL(2,ℝ) with entries in `[-2, 2]` and `det ≥ 0.1`.
pub fn random_psl(rng: &mut ChaCha8Rng) -> MoebiusMap {
    loop {
        let [a, b, c, d] = [0, 1, 2, 3].map(|_| rng.gen_range(-2.0..2.0));
        let det: f64 = a * d - b * c;
        if det.abs() < 0.1 {
            continue;
        }
        let (a, b) = if det < 0.0 { (-a, -b) } else { (a, b) };
        if let Ok(m) = MoebiusMap::new(a, b, c, d) {
            return m;
        }
    }
}

/// The circle through the images of three points of `c`, and the Hausdorff
/// distance from `σ(c)` to it.
pub fn image_circle(plane: &Plane, sigma: &TorusMap, c: &Circle) -> Result<(Circle, f64)> {
    image_circle_at(plane, sigma, c, 0.0)
}

fn image_circle_at(
    plane: &Plane,
    sigma: &TorusMap,
    c: &Circle,
    offset: f64,
) -> Result<(Circle, f64)> {
    let [p1, p2, p3] =
        [0.3, 2.4, 4.5].map(|t| sigma.apply(&c.point_at(point_at_angle(t + offset))));
    let d = plane.join(p1, p2, p3)?;
    let image: Vec<TorusPoint> = uniform_angles(IMAGE_SAMPLES)
        .map(|t| sigma.apply(&c.point_at(point_at_angle(t))))
        .collect();
    let refit: Vec<TorusPoint> = image.iter().map(|q| d.point_at(q.x)).collect();
    let h = hausdorff_h(&image, &refit)?;
    Ok((d, h))
}

/// Tests that `σ` maps circles to circles: each trial pushes three points
/// of a random circle `C` through `σ`, re-joins them to `D` and compares the
/// image of 256 samples of `C` with `D` sampled at the same abscissae.
pub fn is_automorphism(
    plane: &Plane,
    sigma: &TorusMap,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(GeomError::InvalidTrials);
    }
    let mut report = VerificationReport::new("automorphism", plane.to_string(), trials, seed);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let Some(c) = random_circle(plane, &mut rng, &mut report.resampled) else {
            report.skipped += 1;
            continue;
        };
        let offset = rng.gen_range(0.0..TAU);
        match image_circle_at(plane, sigma, &c, offset) {
            Ok((d, h)) => {
                report.residual(h);
                if h > tol {
                    report.fail(
                        trial,
                        format!("σ = {sigma}, C = {c}"),
                        vec![h],
                        format!("image is not the circle {d}"),
                    );
                }
            }
            Err(e) => report.fail(
                trial,
                format!("σ = {sigma}, C = {c}"),
                vec![],
                e.to_string(),
            ),
        }
    }
    Ok(report.finish())
}

fn fixes_all(h: &Homeo) -> bool {
    uniform_angles(KERNEL_PROBES).all(|t| {
        let x = point_at_angle(t);
        h.eval(x).chart_distance(x) <= KERNEL_TOL
    })
}

/// Which kernel `σ` belongs to: `T⁺` fixes every (+)-class (vertical),
/// `T⁻` every (−)-class.
pub fn kernel_membership(sigma: &TorusMap) -> Kernel {
    if sigma.swap {
        return Kernel::Neither;
    }
    match (fixes_all(&sigma.xmap), fixes_all(&sigma.ymap)) {
        (true, true) => Kernel::Both,
        (true, false) => Kernel::TPlus,
        (false, true) => Kernel::TMinus,
        (false, false) => Kernel::Neither,
    }
}

/// `sup e(σ(x), τ(x))` over an angle-uniform grid of about `n` points.
pub fn metric_e_tilde(sigma: &TorusMap, tau: &TorusMap, n: usize) -> Result<f64> {
    if n < 64 * 64 {
        return Err(GeomError::InvalidParameter(format!(
            "the sup metric needs at least 4096 grid points, got {n}"
        )));
    }
    let side = (n as f64).sqrt() as usize;
    let mut worst: f64 = 0.0;
    for t in uniform_angles(side) {
        for u in uniform_angles(side) {
            let p = TorusPoint::from_angles(t, u);
            worst = worst.max(metric_e(&sigma.apply(&p), &tau.apply(&p)));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::INF;
    use crate::planes::hartmann::line;
    use crate::planes::{circle_distance, Circle};
    use proptest::prelude::*;

    fn tp(x: f64, y: f64) -> TorusPoint {
        TorusPoint::new(x, y)
    }

    fn affine(r: f64, t: f64) -> Homeo {
        Homeo::Moebius(MoebiusMap::affine(r, t).unwrap())
    }

    #[test]
    fn apply_and_compose_examples() {
        assert_eq!(
            TorusMap::identity().apply(&TorusPoint::new(3.0, INF)),
            TorusPoint::new(3.0, INF)
        );
        let s = TorusMap::new(affine(2.0, 1.0), affine(3.0, 0.0), false);
        assert_eq!(s.apply(&tp(1.0, 2.0)), tp(3.0, 6.0));
        let shift = TorusMap::new(affine(1.0, 1.0), Homeo::Identity, false);
        let double = TorusMap::new(affine(2.0, 0.0), Homeo::Identity, false);
        assert_eq!(shift.compose(&double).apply(&tp(1.0, 0.0)), tp(3.0, 0.0));
    }

    #[test]
    fn swap_composition_matches_pointwise() {
        let s = TorusMap::new(affine(2.0, 1.0), Homeo::semi_mult(3.0, 0.5).unwrap(), true);
        let t = TorusMap::new(Homeo::semi_mult(2.0, 2.0).unwrap(), affine(-1.0, 4.0), true);
        let u = TorusMap::new(affine(0.5, -2.0), affine(1.0, 3.0), false);
        let p = tp(0.7, -1.3);
        for (a, b) in [(&s, &t), (&t, &u), (&u, &s), (&s, &s)] {
            let lhs = a.compose(b).apply(&p);
            let rhs = a.apply(&b.apply(&p));
            assert!(lhs.chart_distance(&rhs) < 1e-12, "{lhs} {rhs}");
        }
        assert!(
            s.compose(&s)
                .inverse_apply(&s.compose(&s).apply(&p))
                .chart_distance(&p)
                < 1e-12
        );
    }

    #[test]
    fn family_examples() {
        assert!(family_swapping(1.0, MoebiusMap::IDENTITY)
            .unwrap()
            .is_identity_descriptor());
        let delta = MoebiusMap::new(0.0, 1.0, -1.0, 1.0).unwrap();
        let s = family_swapping(2.0, delta).unwrap();
        assert_eq!(s.apply(&tp(1.5, 3.0)), tp(3.0, -0.5));
        let flip = MoebiusMap::new(0.0, 1.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            family_swapping(3.0, flip),
            Err(GeomError::InvalidParameter(_))
        ));
        assert!(family_hartmann(1.0, 1.0, 0.0, 0.0)
            .unwrap()
            .is_identity_descriptor());
        let h = family_hartmann(2.0, 3.0, 1.0, 0.0).unwrap();
        assert_eq!(h.apply(&tp(1.0, 1.0)), tp(3.0, 3.0));
        assert_eq!(
            h.apply(&TorusPoint::new(INF, 5.0)),
            TorusPoint::new(INF, 15.0)
        );
        assert!(family_hartmann(-1.0, 1.0, 0.0, 0.0).is_err());
        assert_eq!(h.flips(), (false, false));
        assert_eq!(h.hartmann_params(), Some([2.0, 3.0, 1.0, 0.0]));
    }

    #[test]
    fn hartmann_images_of_line_and_hyperbola() {
        let plane = Plane::hartmann(1.0, 1.0, 1.0, 1.0).unwrap();
        let s = family_hartmann(2.0, 3.0, 1.0, 0.0).unwrap();
        let join_image = |c: &Circle| {
            let [a, b, d] = [0.0, 1.0, 2.5].map(|x| s.apply(&c.point_at(crate::S1Point::new(x))));
            plane.join(a, b, d).unwrap()
        };
        let image = join_image(&line(1.0, 0.0).unwrap());
        assert!(circle_distance(&image, &line(1.5, -1.5).unwrap()) < 1e-9);
        let params = plane.hartmann_params().unwrap();
        let recip = params.hyperbola(1.0, 0.0, 0.0).unwrap();
        let image = join_image(&recip);
        assert!(circle_distance(&image, &params.hyperbola(6.0, 1.0, 0.0).unwrap()) < 1e-9);
        let r = is_automorphism(&plane, &s, 20, 1e-6, 42).unwrap();
        assert!(r.passed(), "{}", r.to_key_value());
    }

    #[test]
    fn cubic_is_not_an_automorphism() {
        let plane = Plane::hartmann(1.0, 1.0, 1.0, 1.0).unwrap();
        let cube = TorusMap::new(Homeo::semi_mult(3.0, 1.0).unwrap(), Homeo::Identity, false);
        let r = is_automorphism(&plane, &cube, 10, 1e-6, 42).unwrap();
        assert!(!r.passed());
        assert!(r.max_residual > 1e-3);
        assert_eq!(
            is_automorphism(&plane, &cube, 0, 1e-6, 42),
            Err(GeomError::InvalidTrials)
        );
    }

    #[test]
    fn swapping_family_acts() {
        let plane = Plane::swapping_semi(2.0, 1.0).unwrap();
        let delta = MoebiusMap::new(1.0, 2.0, -0.5, 1.0).unwrap();
        let r =
            is_automorphism(&plane, &family_swapping(1.7, delta).unwrap(), 20, 1e-6, 7).unwrap();
        assert!(r.passed(), "{}", r.to_key_value());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_membership(&TorusMap::identity()), Kernel::Both);
        let t = TorusMap::new(Homeo::Identity, affine(3.0, 1.0), false);
        assert_eq!(kernel_membership(&t), Kernel::TPlus);
        let n = TorusMap::new(affine(2.0, 0.0), affine(1.0, 1.0), false);
        assert_eq!(kernel_membership(&n), Kernel::Neither);
        let m = family_hartmann(2.0, 1.0, 0.5, 0.0).unwrap();
        assert_eq!(kernel_membership(&m), Kernel::TMinus);
        let sw = TorusMap::new(Homeo::Identity, Homeo::Identity, true);
        assert_eq!(kernel_membership(&sw), Kernel::Neither);
    }

    #[test]
    fn e_tilde_examples() {
        let id = TorusMap::identity();
        assert_eq!(metric_e_tilde(&id, &id, E_TILDE_SAMPLES).unwrap(), 0.0);
        let half_turn = TorusMap::new(
            Homeo::Identity,
            Homeo::Moebius(MoebiusMap::new(0.0, -1.0, 1.0, 0.0).unwrap()),
            false,
        );
        let v = metric_e_tilde(&id, &half_turn, E_TILDE_SAMPLES).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        let eps: f64 = 1e-4;
        let rot = MoebiusMap::new(
            (eps / 2.0).cos(),
            (eps / 2.0).sin(),
            -(eps / 2.0).sin(),
            (eps / 2.0).cos(),
        )
        .unwrap();
        let tiny = TorusMap::new(Homeo::Moebius(rot), Homeo::Identity, false);
        let v = metric_e_tilde(&id, &tiny, 4096).unwrap();
        assert!(v > 0.0 && v <= 3.0 * eps, "{v}");
        assert!(metric_e_tilde(&id, &id, 100).is_err());
    }

    fn member() -> impl Strategy<Value = [f64; 4]> {
        (0.2f64..5.0, 0.2f64..5.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(r, s, a, b)| [r, s, a, b])
    }

    proptest! {
        #[test]
        fn hartmann_closure_is_exact(p in member(), q in member()) {
            let [r1, s1, a1, b1] = p;
            let [r2, s2, a2, b2] = q;
            let composed = family_hartmann(r1, s1, a1, b1).unwrap()
                .compose(&family_hartmann(r2, s2, a2, b2).unwrap());
            prop_assert_eq!(
                composed.hartmann_params().unwrap(),
                [r1 * r2, s1 * s2, r1 * a2 + a1, s1 * b2 + b1]
            );
        }

        #[test]
        fn kernel_matches_parameters(s in 0.2f64..5.0, b in -3.0f64..3.0) {
            let m = family_hartmann(1.0, s, 0.0, b).unwrap();
            let expected = if s == 1.0 && b == 0.0 { Kernel::Both } else { Kernel::TPlus };
            prop_assert_eq!(kernel_membership(&m), expected);
        }

        #[test]
        fn e_tilde_is_a_metric(p in member(), q in member(), u in member()) {
            let maps = [p, q, u].map(|[r, s, a, b]| family_hartmann(r, s, a, b).unwrap());
            let d = |i: usize, j: usize| metric_e_tilde(&maps[i], &maps[j], 4096).unwrap();
            prop_assert_eq!(d(0, 1), d(1, 0));
            prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
        }

        #[test]
        fn rigidity_of_hartmann_members(p in member(), seed in 0u64..1000) {
            let m = family_hartmann(p[0], p[1], p[2], p[3]).unwrap();
            let mut rng = trial_rng(seed, 0);
            let mut n = 0;
            let pts = crate::verification::random_triple(&mut rng, &mut n).unwrap();
            let moved = pts.iter().map(|q| metric_e(&m.apply(q), q)).fold(0.0, f64::max);
            if moved <= 1e-10 {
                prop_assert_eq!(p, [1.0, 1.0, 0.0, 0.0]);
            }
        }
    }
}
