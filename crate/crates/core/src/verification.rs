//! Randomized verification of the incidence axioms and of the automorphism
//! families, with reproducible reports.
//!
//! Every trial draws from its own ChaCha8 stream (`seed`, stream = trial
//! index), so a report depends only on the seed and the trial count and
//! trials could be run in any order.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphisms::{family_hartmann, family_swapping, random_psl, TorusMap};
use crate::error::{GeomError, Result};
use crate::geometry::{angle_of, metric_e, point_at_angle, TorusPoint};
use crate::operations::{
    alpha_join, gamma_intersect, touching_solver, touching_solver_with, TouchingOptions,
};
use crate::planes::{circle_distance, Circle, Plane, PlaneFamily};

/// Residual bound for points on a joined circle.
pub const JOIN_TOL: f64 = 1e-7;
/// Hausdorff bound for agreement of touching circles from different seeds.
pub const TOUCH_AGREEMENT_TOL: f64 = 1e-6;
/// Touching circles are rerun from this many pencil seeds.
pub const TOUCH_RERUNS: usize = 8;
/// Smallest displacement that counts as moving a point.
pub const RIGIDITY_TOL: f64 = 1e-9;
/// Attempts per trial before a degenerate draw is given up.
pub const RESAMPLE_CAP: usize = 100;
/// Smallest angle between coordinates that count as distinct in a draw.
pub const MIN_SEPARATION: f64 = 1e-6;
/// Separation of the points re-joined in the uniqueness check.
pub const REJOIN_SEPARATION: f64 = 0.05;
/// Separation required in touching draws; closer configurations are
/// numerically undecidable at the contact tolerance.
pub const TOUCH_SEPARATION: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub inputs: String,
    pub residuals: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub plane: String,
    pub trials: usize,
    pub seed: u64,
    pub failures: Vec<TrialFailure>,
    pub max_residual: f64,
    /// Trials dropped after [`RESAMPLE_CAP`] degenerate draws, or whose
    /// random circles coincided.
    pub skipped: usize,
    /// Degenerate draws that were replaced.
    pub resampled: usize,
    /// Suite-specific summary values.
    pub metrics: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub(crate) fn new(suite: &str, plane: String, trials: usize, seed: u64) -> Self {
        VerificationReport {
            suite: suite.into(),
            plane,
            trials,
            seed,
            failures: Vec::new(),
            max_residual: 0.0,
            skipped: 0,
            resampled: 0,
            metrics: BTreeMap::new(),
            verdict: Verdict::Pass,
        }
    }

    pub(crate) fn residual(&mut self, r: f64) {
        if r > self.max_residual || r.is_nan() {
            self.max_residual = r;
        }
    }

    pub(crate) fn fail(
        &mut self,
        trial: usize,
        inputs: String,
        residuals: Vec<f64>,
        reason: String,
    ) {
        self.failures.push(TrialFailure {
            trial,
            inputs,
            residuals,
            reason,
        });
    }

    pub(crate) fn finish(mut self) -> Self {
        self.verdict = if self.failures.is_empty() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Line-oriented `key = value` rendering.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        };
        let _ = writeln!(out, "suite = {}", self.suite);
        let _ = writeln!(out, "plane = {}", self.plane);
        let _ = writeln!(out, "trials = {}", self.trials);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "failures = {}", self.failures.len());
        let _ = writeln!(out, "max_residual = {:e}", self.max_residual);
        let _ = writeln!(out, "skipped = {}", self.skipped);
        let _ = writeln!(out, "resampled = {}", self.resampled);
        for (k, v) in &self.metrics {
            let _ = writeln!(out, "metric.{k} = {v:e}");
        }
        let _ = writeln!(out, "verdict = {verdict}");
        for f in &self.failures {
            let _ = writeln!(
                out,
                "failure.{} = {} | {} | {:?}",
                f.trial, f.inputs, f.reason, f.residuals
            );
        }
        out
    }
}

/// The random stream of one trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(GeomError::InvalidTrials)
    } else {
        Ok(())
    }
}

fn random_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.0..TAU)
}

/// A point uniform in angle coordinates.
pub fn random_point(rng: &mut ChaCha8Rng) -> TorusPoint {
    TorusPoint::from_angles(random_angle(rng), random_angle(rng))
}

fn cyclic_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn separated(points: &[TorusPoint], min: f64) -> bool {
    for (i, p) in points.iter().enumerate() {
        let (px, py) = p.angles();
        for q in &points[i + 1..] {
            let (qx, qy) = q.angles();
            if cyclic_gap(px, qx) < min || cyclic_gap(py, qy) < min {
                return false;
            }
        }
    }
    true
}

/// Draw until `accept` holds, counting replaced draws; `None` after
/// [`RESAMPLE_CAP`] attempts.
fn draw<T>(
    rng: &mut ChaCha8Rng,
    resampled: &mut usize,
    mut make: impl FnMut(&mut ChaCha8Rng) -> Option<T>,
) -> Option<T> {
    for attempt in 0..RESAMPLE_CAP {
        if let Some(t) = make(rng) {
            return Some(t);
        }
        if attempt + 1 < RESAMPLE_CAP {
            *resampled += 1;
        }
    }
    None
}

/// Three points uniform in angle coordinates, pairwise nonparallel.
pub fn random_triple(rng: &mut ChaCha8Rng, resampled: &mut usize) -> Option<[TorusPoint; 3]> {
    draw(rng, resampled, |rng| {
        let t = [random_point(rng), random_point(rng), random_point(rng)];
        separated(&t, MIN_SEPARATION).then_some(t)
    })
}

/// A random circle of the plane, joined through a random triple.
pub fn random_circle(plane: &Plane, rng: &mut ChaCha8Rng, resampled: &mut usize) -> Option<Circle> {
    draw(rng, resampled, |rng| {
        let mut inner = 0;
        let [a, b, c] = random_triple(rng, &mut inner)?;
        plane.join(a, b, c).ok()
    })
}

/// Three points of `c`, each drawn uniformly in either its x- or its
/// y-angle, separated by [`REJOIN_SEPARATION`] in both coordinates.
///
/// Nearly degenerate circles are flat over most of their abscissae, so
/// abscissa-uniform draws alone would often give an ill-conditioned triple.
fn points_on(c: &Circle, rng: &mut ChaCha8Rng, resampled: &mut usize) -> Option<[TorusPoint; 3]> {
    draw(rng, resampled, |rng| {
        let t = [0, 1, 2].map(|_| {
            let at = point_at_angle(random_angle(rng));
            if rng.gen_bool(0.5) {
                c.point_at(at)
            } else {
                TorusPoint {
                    x: c.inv_eval(at),
                    y: at,
                }
            }
        });
        separated(&t, REJOIN_SEPARATION).then_some(t)
    })
}

fn describe(points: &[TorusPoint]) -> String {
    points
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Joining exists (residuals at most [`JOIN_TOL`]) and is unique (three
/// other points of the circle give the same circle).
pub fn verify_joining(plane: &Plane, trials: usize, seed: u64) -> Result<VerificationReport> {
    check_trials(trials)?;
    let mut report = VerificationReport::new("joining", plane.to_string(), trials, seed);
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let Some(points) = random_triple(&mut rng, &mut report.resampled) else {
            report.skipped += 1;
            continue;
        };
        let [a, b, c] = points;
        let circle = match alpha_join(plane, a, b, c) {
            Ok(circle) => circle,
            Err(e) => {
                report.fail(trial, describe(&points), vec![], e.to_string());
                continue;
            }
        };
        let residuals: Vec<f64> = points.iter().map(|p| circle.residual(p)).collect();
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        report.residual(worst);
        if worst > JOIN_TOL {
            report.fail(
                trial,
                describe(&points),
                residuals,
                format!("{circle} misses a point"),
            );
            continue;
        }
        let Some(others) = points_on(&circle, &mut rng, &mut report.resampled) else {
            report.skipped += 1;
            continue;
        };
        let [d, e, f] = others;
        match alpha_join(plane, d, e, f) {
            Ok(again) => {
                let h = circle_distance(&circle, &again);
                report.residual(h);
                if h > plane.tol.hausdorff_eq {
                    report.fail(
                        trial,
                        describe(&points),
                        vec![h],
                        format!("{circle} rejoined as {again}"),
                    );
                }
            }
            Err(e) => report.fail(trial, describe(&others), vec![], e.to_string()),
        }
    }
    Ok(report.finish())
}

/// Distinct random circles share at most two points.
pub fn verify_two_point_bound(
    plane: &Plane,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    check_trials(trials)?;
    let mut report = VerificationReport::new("two_point_bound", plane.to_string(), trials, seed);
    let mut counts = [0usize; 3];
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let (Some(c), Some(d)) = (
            random_circle(plane, &mut rng, &mut report.resampled),
            random_circle(plane, &mut rng, &mut report.resampled),
        ) else {
            report.skipped += 1;
            continue;
        };
        if plane.circle_equal(&c, &d) {
            report.skipped += 1;
            continue;
        }
        match gamma_intersect(&c, &d) {
            Ok(hit) => {
                counts[hit.points.len()] += 1;
                for p in &hit.points {
                    report.residual(c.residual(p).max(d.residual(p)));
                }
            }
            Err(GeomError::EqualCircles) => report.skipped += 1,
            Err(e) => report.fail(trial, format!("{c} / {d}"), vec![], e.to_string()),
        }
    }
    report.metrics.insert("disjoint".into(), counts[0] as f64);
    report.metrics.insert("touching".into(), counts[1] as f64);
    report.metrics.insert("secant".into(), counts[2] as f64);
    Ok(report.finish())
}

/// A random touching request `(C, p, q)` whose coordinates are separated
/// by [`TOUCH_SEPARATION`] and whose `p` avoids the corners of `C` in both
/// coordinates.
fn touching_request(
    plane: &Plane,
    rng: &mut ChaCha8Rng,
    resampled: &mut usize,
) -> Option<(Circle, TorusPoint, TorusPoint)> {
    draw(rng, resampled, |rng| {
        let mut inner = 0;
        let c = random_circle(plane, rng, &mut inner)?;
        let p = c.point_at(point_at_angle(random_angle(rng)));
        let q = random_point(rng);
        let ((px, py), (qx, qy)) = (p.angles(), q.angles());
        let on_c = angle_of(c.eval(q.x));
        let corner = c.corner_abscissae().into_iter().any(|x| {
            cyclic_gap(angle_of(x), px) < TOUCH_SEPARATION
                || cyclic_gap(angle_of(c.eval(x)), py) < TOUCH_SEPARATION
        });
        let ok = cyclic_gap(px, qx) >= TOUCH_SEPARATION
            && cyclic_gap(py, qy) >= TOUCH_SEPARATION
            && cyclic_gap(on_c, qy) >= TOUCH_SEPARATION
            && !corner;
        ok.then_some((c, p, q))
    })
}

/// The touching circle exists and agrees across [`TOUCH_RERUNS`] pencil
/// seeds.
pub fn verify_touching(plane: &Plane, trials: usize, seed: u64) -> Result<VerificationReport> {
    check_trials(trials)?;
    let mut report = VerificationReport::new("touching", plane.to_string(), trials, seed);
    let mut worst_agreement: f64 = 0.0;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let Some((c, p, q)) = touching_request(plane, &mut rng, &mut report.resampled) else {
            report.skipped += 1;
            continue;
        };
        let inputs = format!("C = {c}, p = {p}, q = {q}");
        let d = match touching_solver(plane, &c, p, q, JOIN_TOL) {
            Ok(d) => d,
            Err(e) => {
                report.fail(trial, inputs, vec![], e.to_string());
                continue;
            }
        };
        report.residual(d.residual(&p).max(d.residual(&q)));
        let mut distances = Vec::with_capacity(TOUCH_RERUNS);
        let mut problem = None;
        for pencil_seed in 1..=TOUCH_RERUNS {
            let opts = TouchingOptions {
                scan_seeds: 0,
                pencil_seed,
                closed_form: false,
                tol: JOIN_TOL,
            };
            match touching_solver_with(plane, &c, p, q, &opts) {
                Ok(other) => distances.push(circle_distance(&d, &other)),
                Err(e) => {
                    problem = Some(format!("pencil seed {pencil_seed}: {e}"));
                    break;
                }
            }
        }
        let spread = distances.iter().cloned().fold(0.0, f64::max);
        worst_agreement = worst_agreement.max(spread);
        if let Some(reason) = problem {
            report.fail(trial, inputs, distances, reason);
        } else if spread > TOUCH_AGREEMENT_TOL {
            report.fail(trial, inputs, distances, format!("seeds disagree with {d}"));
        }
    }
    report
        .metrics
        .insert("max_seed_disagreement".into(), worst_agreement);
    Ok(report.finish())
}

/// A random member of the plane's explicit automorphism family together
/// with its parameters.
pub fn random_family_member(plane: &Plane, rng: &mut ChaCha8Rng) -> Result<(TorusMap, Vec<f64>)> {
    let positive = |rng: &mut ChaCha8Rng| rng.gen_range(-1.5f64..1.5).exp();
    match plane.family() {
        PlaneFamily::Classical | PlaneFamily::Hartmann(_) => {
            let (r, s) = (positive(rng), positive(rng));
            let (a, b) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            Ok((family_hartmann(r, s, a, b)?, vec![r, s, a, b]))
        }
        PlaneFamily::Swapping { .. } if plane.semi_swapping_params().is_some() => {
            let r = positive(rng);
            let delta = random_psl(rng);
            let mut params = vec![r];
            params.extend(delta.normalized());
            Ok((family_swapping(r, delta)?, params))
        }
        PlaneFamily::Swapping { .. } => Err(GeomError::InvalidParameter(format!(
            "no automorphism family implemented for {plane}"
        ))),
    }
}

/// A nonidentity family member never fixes three pairwise nonparallel
/// points.
pub fn verify_rigidity(plane: &Plane, trials: usize, seed: u64) -> Result<VerificationReport> {
    check_trials(trials)?;
    let mut report = VerificationReport::new("rigidity", plane.to_string(), trials, seed);
    let mut least_motion = f64::INFINITY;
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        let (sigma, params) = random_family_member(plane, &mut rng)?;
        if sigma.is_identity_descriptor() {
            report.skipped += 1;
            continue;
        }
        let Some(points) = random_triple(&mut rng, &mut report.resampled) else {
            report.skipped += 1;
            continue;
        };
        let motion = points
            .iter()
            .map(|p| metric_e(&sigma.apply(p), p))
            .fold(0.0, f64::max);
        least_motion = least_motion.min(motion);
        if motion < RIGIDITY_TOL {
            report.fail(
                trial,
                format!("{sigma} {params:?} on {}", describe(&points)),
                vec![motion],
                "nonidentity member fixes three points".into(),
            );
        }
    }
    report.metrics.insert("least_motion".into(), least_motion);
    Ok(report.finish())
}
