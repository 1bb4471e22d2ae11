//! Command-line front end for toroidal circle planes.

pub mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use toroidal::automorphisms::{family_hartmann, family_swapping, image_circle, TorusMap};
use toroidal::derived::{generate_dense, Region};
use toroidal::geometry::{point_at_angle, uniform_angles};
use toroidal::operations::{gamma_intersect, k4_probe, touching_solver, IntersectionKind, K4Spec};
use toroidal::verification::{
    verify_joining, verify_rigidity, verify_touching, verify_two_point_bound, TrialFailure,
    Verdict, VerificationReport,
};
use toroidal::{GeomError, MoebiusMap, S1Point, TorusPoint};

pub use config::{parse_config, ConfigError, Family, PlaneConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "toroidal",
    version,
    about = "Toroidal circle plane computations"
)]
pub struct Cli {
    /// Plane configuration file; the classical plane if omitted
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Write a JSON report to this path
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the joining, two-point, touching and rigidity suites
    Verify {
        /// Overrides the configured seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        join_trials: usize,
        #[arg(long, default_value_t = 1000)]
        bound_trials: usize,
        #[arg(long, default_value_t = 500)]
        touch_trials: usize,
        #[arg(long, default_value_t = 100)]
        rigidity_trials: usize,
    },
    /// Circle through three points: join x1 y1 x2 y2 x3 y3
    #[command(allow_negative_numbers = true)]
    Join {
        #[arg(num_args = 6, value_name = "COORD")]
        coords: Vec<String>,
    },
    /// Common points of two circles
    Intersect { c: String, d: String },
    /// Circle through p and q touching C at p
    #[command(allow_negative_numbers = true)]
    Touch {
        circle: String,
        #[arg(num_args = 4, value_name = "COORD")]
        coords: Vec<String>,
    },
    /// Image of a circle under a family automorphism
    #[command(allow_negative_numbers = true)]
    Orbit {
        /// (x, y) ↦ (rx + a, sy + b)
        #[arg(long, num_args = 4, value_names = ["R", "S", "A", "B"], conflicts_with = "swapping")]
        hartmann: Option<Vec<f64>>,
        /// (x, y) ↦ (rx, δ(y)) with δ = moebius(a, b, c, d)
        #[arg(long, num_args = 5, value_names = ["R", "A", "B", "C", "D"])]
        swapping: Option<Vec<f64>>,
        circle: String,
    },
    /// CSV of n points `theta,x,y` of a circle
    Sample {
        circle: String,
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense closure in the derived plane at p: dense x2 y2 x3 y3
    #[command(allow_negative_numbers = true)]
    Dense {
        #[arg(num_args = 4, value_name = "COORD")]
        seeds: Vec<String>,
        #[arg(long, num_args = 2, value_names = ["X", "Y"], default_values = ["inf", "inf"])]
        p: Vec<String>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// x0 x1 y0 y1
        #[arg(long, num_args = 4, default_values_t = [0.0, 1.0, 0.0, 1.0])]
        region: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence probe read from a JSON sequence spec
    K4probe { spec: PathBuf },
}

/// A failed command: exit code and message for stderr.
#[derive(Debug)]
struct Failure(i32, String);

impl From<GeomError> for Failure {
    fn from(e: GeomError) -> Self {
        let code = match e {
            GeomError::JoinFailure(_) | GeomError::NoTouchingCircle(_) => EXIT_SOLVER,
            _ => EXIT_USAGE,
        };
        Failure(code, e.to_string())
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, message.into())
}

#[derive(Serialize)]
struct SuiteSummary<'a> {
    name: &'a str,
    plane: &'a str,
    trials: usize,
    failures: usize,
    max_residual: f64,
    verdict: &'static str,
    seed: u64,
    skipped: usize,
    resampled: usize,
    metrics: &'a BTreeMap<String, f64>,
    failure_details: &'a [TrialFailure],
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
    }
}

impl<'a> From<&'a VerificationReport> for SuiteSummary<'a> {
    fn from(r: &'a VerificationReport) -> Self {
        SuiteSummary {
            name: &r.suite,
            plane: &r.plane,
            trials: r.trials,
            failures: r.failures.len(),
            max_residual: r.max_residual,
            verdict: verdict_str(r.verdict),
            seed: r.seed,
            skipped: r.skipped,
            resampled: r.resampled,
            metrics: &r.metrics,
            failure_details: &r.failures,
        }
    }
}

fn point_arg(x: &str, y: &str) -> Result<TorusPoint, Failure> {
    let coord = |s: &str| {
        s.replace('\u{2212}', "-")
            .parse::<S1Point>()
            .map_err(|_| usage(format!("{s:?} is not a coordinate (a number or inf)")))
    };
    Ok(TorusPoint {
        x: coord(x)?,
        y: coord(y)?,
    })
}

fn points_arg(coords: &[String]) -> Result<Vec<TorusPoint>, Failure> {
    coords.chunks(2).map(|c| point_arg(&c[0], &c[1])).collect()
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn write_report(path: Option<&PathBuf>, value: &impl Serialize) -> Result<(), Failure> {
    let Some(path) = path else { return Ok(()) };
    let json = serde_json::to_string_pretty(value).expect("reports serialize");
    write_file(path, &(json + "\n"))
}

fn load_config(path: Option<&PathBuf>) -> Result<PlaneConfig, Failure> {
    let Some(path) = path else {
        return Ok(PlaneConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn csv_rows<T>(items: &[T], header: &str, row: impl Fn(&T) -> String) -> String {
    let mut text = format!("{header}\n");
    for item in items {
        text.push_str(&row(item));
        text.push('\n');
    }
    text
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let config = load_config(cli.config.as_ref())?;
    let plane = config.plane();
    let report = cli.report.as_ref();
    let mut text = String::new();
    let mut code = EXIT_OK;

    match &cli.command {
        Command::Verify {
            seed,
            join_trials,
            bound_trials,
            touch_trials,
            rigidity_trials,
        } => {
            let seed = seed.or(config.seed).unwrap_or(DEFAULT_SEED);
            let reports = [
                verify_joining(&plane, *join_trials, seed)?,
                verify_two_point_bound(&plane, *bound_trials, seed)?,
                verify_touching(&plane, *touch_trials, seed)?,
                verify_rigidity(&plane, *rigidity_trials, seed)?,
            ];
            for r in &reports {
                text.push_str(&r.to_key_value());
                text.push('\n');
            }
            let pass = reports.iter().all(VerificationReport::passed);
            let _ = writeln!(text, "verdict = {}", if pass { "pass" } else { "fail" });
            let summaries: Vec<SuiteSummary> = reports.iter().map(SuiteSummary::from).collect();
            write_report(report, &summaries)?;
            if !pass {
                code = EXIT_VERIFY;
            }
        }
        Command::Join { coords } => {
            let [a, b, c] = points_arg(coords)?[..] else {
                unreachable!("clap takes six coordinates")
            };
            let circle = plane.join(a, b, c)?;
            let _ = writeln!(text, "{circle}");
            write_report(report, &serde_json::json!({ "circle": circle.to_string() }))?;
        }
        Command::Intersect { c, d } => {
            let (c, d) = (plane.parse_circle(c)?, plane.parse_circle(d)?);
            let hit = gamma_intersect(&c, &d)?;
            let kind = match hit.kind {
                IntersectionKind::Disjoint => "disjoint",
                IntersectionKind::Touching => "touching",
                IntersectionKind::Secant => "secant",
            };
            let _ = writeln!(text, "kind = {kind}");
            for q in &hit.points {
                let _ = writeln!(text, "point = {q}");
            }
            write_report(
                report,
                &serde_json::json!({ "kind": kind, "points": hit.points }),
            )?;
        }
        Command::Touch { circle, coords } => {
            let c = plane.parse_circle(circle)?;
            let [p, q] = points_arg(coords)?[..] else {
                unreachable!("clap takes four coordinates")
            };
            let d = touching_solver(&plane, &c, p, q, plane.tol.join_residual)?;
            let _ = writeln!(text, "{d}");
            write_report(report, &serde_json::json!({ "circle": d.to_string() }))?;
        }
        Command::Orbit {
            hartmann,
            swapping,
            circle,
        } => {
            let sigma: TorusMap = match (hartmann, swapping) {
                (Some(h), None) => family_hartmann(h[0], h[1], h[2], h[3])?,
                (None, Some(s)) => family_swapping(s[0], MoebiusMap::new(s[1], s[2], s[3], s[4])?)?,
                _ => {
                    return Err(usage(
                        "orbit needs --hartmann R S A B or --swapping R A B C D",
                    ))
                }
            };
            let c = plane.parse_circle(circle)?;
            let (image, residual) = image_circle(&plane, &sigma, &c)?;
            let _ = writeln!(text, "map = {sigma}");
            let _ = writeln!(text, "image = {image}");
            let _ = writeln!(text, "residual = {residual:e}");
            write_report(
                report,
                &serde_json::json!({
                    "map": sigma.to_string(),
                    "image": image.to_string(),
                    "residual": residual,
                }),
            )?;
            if residual > plane.tol.hausdorff_eq {
                code = EXIT_VERIFY;
            }
        }
        Command::Sample { circle, n, out } => {
            if *n == 0 {
                return Err(usage("n must be positive"));
            }
            let c = plane.parse_circle(circle)?;
            let rows: Vec<(f64, TorusPoint)> = uniform_angles(*n)
                .map(|t| (t, c.point_at(point_at_angle(t))))
                .collect();
            let csv = csv_rows(&rows, "theta,x,y", |(t, q)| format!("{t},{},{}", q.x, q.y));
            match out {
                Some(path) => write_file(path, &csv)?,
                None => text.push_str(&csv),
            }
        }
        Command::Dense {
            seeds,
            p,
            depth,
            region,
            out,
        } => {
            let [d2, d3] = points_arg(seeds)?[..] else {
                unreachable!("clap takes four coordinates")
            };
            let p = point_arg(&p[0], &p[1])?;
            let region = Region::new(region[0], region[1], region[2], region[3])?;
            let result = generate_dense(&plane, &p, &d2, &d3, *depth, &region)?;
            let csv = csv_rows(&result.points, "x,y", |q| format!("{},{}", q.x, q.y));
            let mut summary = format!("points = {}\n", result.points.len());
            for (k, r) in result.radii.iter().enumerate() {
                let _ = writeln!(summary, "radius.depth_{k} = {r}");
            }
            let _ = writeln!(summary, "covering_radius = {}", result.covering_radius);
            match out {
                Some(path) => {
                    write_file(path, &csv)?;
                    text.push_str(&summary);
                }
                None => {
                    text.push_str(&csv);
                    let _ = err.write_all(summary.as_bytes());
                }
            }
            write_report(report, &result)?;
        }
        Command::K4probe { spec } => {
            let raw = std::fs::read_to_string(spec)
                .map_err(|e| usage(format!("cannot read {}: {e}", spec.display())))?;
            let spec: K4Spec = serde_json::from_str(&raw)
                .map_err(|e| usage(format!("{}: {e}", spec.display())))?;
            let r = k4_probe(&plane, &spec)?;
            let _ = writeln!(text, "n_max = {}", r.n_max);
            let _ = writeln!(text, "degenerate_limit = {}", r.degenerate_limit);
            let _ = writeln!(text, "predicted_minus = {}", r.predicted_minus);
            let _ = writeln!(text, "predicted_plus = {}", r.predicted_plus);
            let _ = writeln!(text, "final_minus = {:e}", r.final_minus);
            let _ = writeln!(text, "final_plus = {:e}", r.final_plus);
            let _ = writeln!(text, "verdict = {}", if r.pass { "PASS" } else { "FAIL" });
            write_report(report, &r)?;
            if !r.pass {
                code = EXIT_VERIFY;
            }
        }
    }
    out.write_all(text.as_bytes())
        .map_err(|e| usage(format!("cannot write output: {e}")))?;
    Ok(code)
}

/// Parse `args` (program name first), run the command and return the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}
