//! Command-line front end for the quaternionic contact verification
//! engine: resolves a chart (built-in example or JSON file), runs the
//! selected check suites at seeded rational sample points, prints a
//! summary, and optionally writes the full JSON report.
//!
//! Exit codes: `0` — every required check is exactly zero; `1` — some
//! required check is nonzero or errored (with a verified engine this
//! signals an unsound computation, since the required checks are proved
//! identities of every accepted chart); `2` — invalid input or
//! configuration (unknown example, unreadable chart file, bad flag
//! combination, degenerate chart).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qcgeom::atlas;
use qcgeom::qcframe::QcChart;
use qcgeom::report::{CheckStatus, Report};
use qcgeom::suite::{run, RunConfig, SuiteSelection};
use qcgeom::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "qc-cli",
    version,
    about = "Exact-arithmetic checks for quaternionic contact charts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the check suites at seeded rational sample points of a chart
    Check(CheckArgs),
    /// Write a built-in example chart to a JSON file
    Emit(EmitArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Built-in example chart: heisenberg or sphere3sasakian
    #[arg(long, value_name = "NAME", conflicts_with = "chart")]
    pub example: Option<String>,

    /// Chart JSON file (as written by `emit`)
    #[arg(long, value_name = "PATH")]
    pub chart: Option<PathBuf>,

    /// Quaternionic rank n; the chart has dimension 4n + 3 (default 1
    /// for --example, must match the file for --chart)
    #[arg(long, value_name = "INT")]
    pub n: Option<usize>,

    /// Conformal deformation factor applied to the chart, e.g. "1 + x1^2"
    #[arg(long, value_name = "EXPR")]
    pub deform: Option<String>,

    /// Number of sample points
    #[arg(long, value_name = "INT", default_value_t = 3)]
    pub points: u64,

    /// Seed of the sample-point stream
    #[arg(long, value_name = "INT", default_value_t = 0)]
    pub seed: u64,

    /// Jet truncation order (>= 2, and >= 3 for the connection-based suites)
    #[arg(long, value_name = "INT", default_value_t = 3)]
    pub jet_order: u32,

    /// Bound on numerators and denominators of sampled coordinates
    #[arg(long, value_name = "INT", default_value_t = 7)]
    pub coeff_bound: u32,

    /// Comma-separated subset of: structure, torsion, theorem, cone
    #[arg(
        long,
        value_name = "LIST",
        default_value = "structure,torsion,theorem,cone"
    )]
    pub suites: String,

    /// Write the full JSON report to this path
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,

    /// Re-run every check modulo a 62-bit prime and report disagreements
    #[arg(long)]
    pub prescreen: bool,
}

#[derive(Args, Debug)]
pub struct EmitArgs {
    /// Example name: heisenberg or sphere3sasakian
    pub name: String,

    /// Output path for the chart JSON
    pub path: PathBuf,

    /// Quaternionic rank n
    #[arg(long, value_name = "INT", default_value_t = 1)]
    pub n: usize,
}

/// Resolves a built-in example chart by name.
pub fn example_chart(name: &str, n: usize) -> Result<QcChart> {
    match name {
        "heisenberg" => atlas::heisenberg(n),
        "sphere3sasakian" => atlas::sphere_3sasakian(n),
        other => Err(Error::InvalidChart {
            context: format!(
                "unknown example `{other}`; available examples: heisenberg, sphere3sasakian"
            ),
        }),
    }
}

/// Resolves the chart a `check` invocation refers to, applying `--deform`.
pub fn resolve_chart(args: &CheckArgs) -> Result<QcChart> {
    let mut chart = match (&args.example, &args.chart) {
        (Some(name), None) => example_chart(name, args.n.unwrap_or(1))?,
        (None, Some(path)) => {
            let chart = atlas::load_chart(path)?;
            if let Some(n) = args.n {
                if n != chart.n {
                    return Err(Error::InvalidChart {
                        context: format!(
                            "--n {n} contradicts the chart file, which has n = {}",
                            chart.n
                        ),
                    });
                }
            }
            chart
        }
        _ => {
            return Err(Error::InvalidChart {
                context: "exactly one of --example and --chart must be given".into(),
            })
        }
    };
    if let Some(factor) = &args.deform {
        chart = atlas::conformal_deform(&chart, factor)?;
    }
    Ok(chart)
}

/// The exit code a finished run maps to: `0` when every required check
/// is exactly zero, `1` otherwise.
pub fn exit_code_for(report: &Report) -> u8 {
    if report.all_required_zero {
        0
    } else {
        1
    }
}

fn status_word(status: CheckStatus) -> &'static str {
    match status {
        CheckStatus::Zero => "zero",
        CheckStatus::Nonzero => "nonzero",
        CheckStatus::Error => "error",
    }
}

/// Renders the human-readable run summary.
pub fn summary(report: &Report) -> String {
    use std::fmt::Write;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "chart {} (n = {}), {} point(s), seed {}, jet order {}, suites [{}]{}",
        report.chart,
        report.n,
        report.points.len(),
        report.seed,
        report.jet_order,
        report.suites.join(", "),
        if report.prescreen {
            ", prime-field prescreen on"
        } else {
            ""
        }
    );
    for point in &report.points {
        let all = || {
            point
                .checks
                .iter()
                .chain(point.cone.iter().flat_map(|c| c.checks.iter()))
        };
        let zero = all().filter(|c| c.status == CheckStatus::Zero).count();
        let total = all().count();
        let _ = write!(out, "  point {}: {zero}/{total} checks zero", point.index);
        if let Some(scalars) = &point.scalars {
            let _ = write!(out, ", s = {}, Scal = {}", scalars.s, scalars.scal);
        }
        if let Some(class) = &point.classification {
            let _ = write!(out, " — {}", class.verdict);
        }
        let _ = writeln!(out);
        for check in all() {
            if check.required && check.status != CheckStatus::Zero {
                let _ = writeln!(
                    out,
                    "    required check {} is {}: {}",
                    check.name,
                    status_word(check.status),
                    check.witness.as_deref().unwrap_or("(no witness)")
                );
            }
        }
    }
    let _ = writeln!(
        out,
        "{}",
        if report.all_required_zero {
            "PASS: every required check is exactly zero"
        } else {
            "FAIL: a required check is nonzero or errored"
        }
    );
    out
}

fn run_check(args: &CheckArgs) -> Result<u8> {
    let chart = resolve_chart(args)?;
    let config = RunConfig {
        chart,
        points: args.points,
        seed: args.seed,
        jet_order: args.jet_order,
        coeff_bound: args.coeff_bound,
        suites: SuiteSelection::parse(&args.suites)?,
        prescreen: args.prescreen,
    };
    let report = run(&config)?;
    print!("{}", summary(&report));
    if let Some(path) = &args.json {
        report.save(path)?;
        println!("report written to {}", path.display());
    }
    Ok(exit_code_for(&report))
}

fn run_emit(args: &EmitArgs) -> Result<u8> {
    let chart = example_chart(&args.name, args.n)?;
    atlas::save_chart(&chart, &args.path)?;
    println!(
        "wrote chart {} ({} coordinates) to {}",
        chart.label,
        chart.coords.len(),
        args.path.display()
    );
    Ok(0)
}

/// Dispatches a parsed invocation and returns the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    let outcome = match &cli.command {
        Command::Check(args) => run_check(args),
        Command::Emit(args) => run_emit(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcgeom::report::{CheckRecord, PointReport};

    fn report_with(checks: Vec<CheckRecord>, all_required_zero: bool) -> Report {
        Report {
            chart: "test".into(),
            n: 1,
            seed: 0,
            jet_order: 3,
            coeff_bound: 7,
            point_count: 1,
            suites: vec!["structure".into()],
            prescreen: false,
            points: vec![PointReport {
                index: 0,
                coordinates: vec![],
                scalars: None,
                checks,
                classification: None,
                cone: None,
            }],
            all_required_zero,
        }
    }

    #[test]
    fn exit_codes_follow_the_required_status() {
        let pass = report_with(
            vec![CheckRecord {
                name: "a".into(),
                status: CheckStatus::Zero,
                required: true,
                witness: None,
            }],
            true,
        );
        assert_eq!(exit_code_for(&pass), 0);

        // A nonzero required check — or one that errored — fails the run,
        // while nonzero informative checks do not.
        let fail = report_with(
            vec![
                CheckRecord {
                    name: "a".into(),
                    status: CheckStatus::Nonzero,
                    required: true,
                    witness: Some("w".into()),
                },
                CheckRecord {
                    name: "b".into(),
                    status: CheckStatus::Nonzero,
                    required: false,
                    witness: Some("w".into()),
                },
            ],
            false,
        );
        assert_eq!(exit_code_for(&fail), 1);
        let text = summary(&fail);
        assert!(text.contains("FAIL"));
        assert!(text.contains("required check a is nonzero: w"));
        assert!(!text.contains("required check b"));
    }

    #[test]
    fn unknown_example_is_rejected() {
        assert!(matches!(
            example_chart("klein-bottle", 1),
            Err(Error::InvalidChart { .. })
        ));
    }

    #[test]
    fn check_needs_exactly_one_chart_source() {
        let args = CheckArgs {
            example: None,
            chart: None,
            n: None,
            deform: None,
            points: 1,
            seed: 0,
            jet_order: 3,
            coeff_bound: 7,
            suites: "structure".into(),
            json: None,
            prescreen: false,
        };
        assert!(matches!(
            resolve_chart(&args),
            Err(Error::InvalidChart { .. })
        ));
    }
}
