//! Deterministic multi-point check runs.
//!
//! A run samples seeded rational points on a chart, executes the selected
//! check families at each point, and assembles a serializable report:
//!
//! * `structure` — the three structure-equation residual families;
//! * `torsion` — algebraic torsion properties plus the agreement of the
//!   two independent torsion computations (and, in dimension seven, the
//!   required refusal of the contraction route);
//! * `theorem` — the Ricci/torsion trace identities, vertical torsion,
//!   mixed vertical identities, behavior flags, and the flag-equivalence
//!   meta-checks;
//! * `cone` — the Sasakian-type sign detection and the cone closedness
//!   checks, with their mutual agreement.
//!
//! Points that hit a degenerate denominator or a singular solve are
//! skipped deterministically (the retry consumes a fresh stream index),
//! so equal configurations yield byte-identical reports.  An optional
//! prime-field pass re-runs every check modulo a large prime and flags
//! any check that is exactly zero over the rationals but nonzero modulo
//! the prime — such a disagreement would expose an unsound computation.

use rayon::prelude::*;

use crate::biquard::{
    classify, connection_forms, identity_suite, torsion_from_four_form, torsion_from_ricci,
    torsion_property_residuals, Classification, NamedResidual, Residual, TorsionReport,
};
use crate::cone::{cone_over_frame, hyperkahler_check, sasakian_check_frame};
use crate::qcframe::{QcChart, QcPointFrame};
use crate::ratjet::{format_rational, rat, Fp, Jet, Rational, SampleStream, Scalar};
use crate::report::{
    CheckRecord, CheckStatus, ClassificationRecord, ConeSection, PointReport, Report,
    ScalarValues,
};
use crate::{Error, Result};

/// How many consecutive stream indices a point slot may consume while
/// skipping degenerate sample points.
pub const MAX_POINT_ATTEMPTS: u64 = 16;

/// Which check families to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteSelection {
    pub structure: bool,
    pub torsion: bool,
    pub theorem: bool,
    pub cone: bool,
}

impl Default for SuiteSelection {
    fn default() -> Self {
        SuiteSelection {
            structure: true,
            torsion: true,
            theorem: true,
            cone: true,
        }
    }
}

impl SuiteSelection {
    /// Parses a comma-separated list such as `"structure,torsion"`.
    pub fn parse(list: &str) -> Result<Self> {
        let mut selection = SuiteSelection {
            structure: false,
            torsion: false,
            theorem: false,
            cone: false,
        };
        for raw in list.split(',') {
            match raw.trim() {
                "structure" => selection.structure = true,
                "torsion" => selection.torsion = true,
                "theorem" => selection.theorem = true,
                "cone" => selection.cone = true,
                "" => {}
                other => {
                    return Err(Error::InvalidChart {
                        context: format!(
                            "unknown suite `{other}`; expected a comma-separated subset of \
                             structure, torsion, theorem, cone"
                        ),
                    });
                }
            }
        }
        if selection == (SuiteSelection {
            structure: false,
            torsion: false,
            theorem: false,
            cone: false,
        }) {
            return Err(Error::InvalidChart {
                context: "at least one suite must be selected".into(),
            });
        }
        Ok(selection)
    }

    pub fn names(&self) -> Vec<String> {
        let mut names = Vec::new();
        if self.structure {
            names.push("structure".to_string());
        }
        if self.torsion {
            names.push("torsion".to_string());
        }
        if self.theorem {
            names.push("theorem".to_string());
        }
        if self.cone {
            names.push("cone".to_string());
        }
        names
    }

    /// The suites that need the connection (and therefore jets of order
    /// at least three).
    fn needs_connection(&self) -> bool {
        self.structure || self.torsion || self.theorem
    }
}

/// Everything a single run needs; equal configs produce byte-identical
/// reports.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub chart: QcChart,
    pub points: u64,
    pub seed: u64,
    pub jet_order: u32,
    /// Numerators and denominators of sample coordinates are drawn from
    /// `[-bound, bound]` (denominators positive).
    pub coeff_bound: u32,
    pub suites: SuiteSelection,
    pub prescreen: bool,
}

impl RunConfig {
    pub fn new(chart: QcChart) -> Self {
        RunConfig {
            chart,
            points: 3,
            seed: 0,
            jet_order: 3,
            coeff_bound: 7,
            suites: SuiteSelection::default(),
            prescreen: false,
        }
    }
}

/// Outcome of the generic per-point pipeline, before serialization.
struct PointEvaluation<S: Scalar> {
    checks: Vec<NamedResidual<S>>,
    scalars: Option<(S, S)>,
    classification: Option<Classification<S>>,
    cone: Option<ConeEvaluation<S>>,
}

struct ConeEvaluation<S: Scalar> {
    epsilon: i32,
    detected: Option<i32>,
    checks: Vec<NamedResidual<S>>,
}

fn is_retryable(err: &Error) -> bool {
    matches!(
        err,
        Error::DivisionByZero { .. }
            | Error::SingularValuePart { .. }
            | Error::DegenerateStructure { .. }
    )
}

fn flag_check<S: Scalar>(name: &str, required: bool, ok: bool, detail: String) -> NamedResidual<S> {
    NamedResidual {
        name: name.to_string(),
        required,
        residual: Ok(Residual::Flag { ok, detail }),
    }
}

/// Which family an identity-suite check belongs to.
fn family_of(name: &str) -> &'static str {
    if name.starts_with("fundamental_form_structure")
        || name.starts_with("ricci_structure")
        || name == "four_form_structure"
    {
        "structure"
    } else {
        "theorem"
    }
}

/// Runs every selected check family at one point.
fn evaluate_point<S: Scalar>(config: &RunConfig, point: &[Rational]) -> Result<PointEvaluation<S>> {
    let frame = QcPointFrame::<S>::build(&config.chart, point, config.jet_order, None)?;
    let mut checks: Vec<NamedResidual<S>> = Vec::new();
    let mut scalars = None;
    let mut classification = None;

    let connection = if config.suites.needs_connection() {
        let connection = connection_forms(&frame)?;
        scalars = Some((connection.s.value(), connection.scal.value()));
        Some(connection)
    } else {
        None
    };

    if let Some(connection) = &connection {
        let torsion = torsion_from_ricci(&frame, connection);

        if config.suites.structure || config.suites.theorem {
            for check in identity_suite(&frame, connection, &torsion) {
                match family_of(&check.name) {
                    "structure" if config.suites.structure => checks.push(check),
                    "theorem" if config.suites.theorem => checks.push(check),
                    _ => {}
                }
            }
        }

        if config.suites.torsion {
            checks.extend(torsion_property_residuals(&frame, &torsion));
            checks.push(route_agreement_check(&frame, &torsion));
        }

        let class = classify(&frame, connection, &torsion)?;
        if config.suites.theorem {
            checks.push(flag_equivalence_check(frame.n, &class));
            checks.push(flag_check(
                "reeb_invariance_symmetric_torsion",
                true,
                class.corollary_consistent,
                "a Reeb field preserves the 4-form, yet the quaternion-symmetric torsion \
                 part is nonzero"
                    .to_string(),
            ));
        }
        classification = Some(class);
    }

    let cone = if config.suites.cone {
        Some(evaluate_cone(config, &frame, connection.as_ref())?)
    } else {
        None
    };

    Ok(PointEvaluation {
        checks,
        scalars,
        classification,
        cone,
    })
}

/// The exact agreement of the two independent torsion computations — or,
/// in dimension seven, the required refusal of the contraction route.
fn route_agreement_check<S: Scalar>(
    frame: &QcPointFrame<S>,
    via_ricci: &TorsionReport<S>,
) -> NamedResidual<S> {
    if frame.n == 1 {
        let refusal = torsion_from_four_form(frame);
        let ok = matches!(refusal, Err(Error::DimensionSevenUnsupported { .. }));
        return flag_check(
            "four_form_route_refused_dim7",
            true,
            ok,
            "the 4-form contraction route must refuse in dimension seven".to_string(),
        );
    }
    let residual = torsion_from_four_form(frame).map(|via_four_form| {
        let mut diff = via_ricci.t0.sub(&via_four_form.t0);
        diff = diff.add(&via_ricci.u.sub(&via_four_form.u));
        for l in 0..3 {
            diff = diff.add(&via_ricci.per_reeb[l].sub(&via_four_form.per_reeb[l]));
        }
        Residual::Matrix(diff)
    });
    NamedResidual {
        name: "torsion_route_agreement".to_string(),
        required: true,
        residual,
    }
}

fn flag_equivalence_check<S: Scalar>(n: usize, class: &Classification<S>) -> NamedResidual<S> {
    let detail = format!(
        "four_form_closed = {}, torsion_zero = {}, reeb_invariant = {}",
        class.four_form_closed, class.torsion_zero, class.reeb_invariant
    );
    if n > 1 {
        flag_check(
            "flag_equivalence",
            true,
            class.four_form_closed == class.torsion_zero
                && class.torsion_zero == class.reeb_invariant,
            detail,
        )
    } else {
        // In dimension seven only one direction is a theorem: vanishing
        // torsion forces the 4-form to be closed.
        flag_check(
            "torsion_implies_closed",
            true,
            !class.torsion_zero || class.four_form_closed,
            detail,
        )
    }
}

fn evaluate_cone<S: Scalar>(
    config: &RunConfig,
    frame: &QcPointFrame<S>,
    connection: Option<&crate::biquard::ConnectionData<S>>,
) -> Result<ConeEvaluation<S>> {
    let report = sasakian_check_frame(frame);
    let mut checks: Vec<NamedResidual<S>> = Vec::new();
    for (sign, residuals) in [
        ("plus", &report.residuals_plus),
        ("minus", &report.residuals_minus),
    ] {
        for (i, residual) in residuals.iter().enumerate() {
            checks.push(NamedResidual {
                name: format!("sasakian_residual_{sign}_{}", i + 1),
                required: false,
                residual: Ok(Residual::Form(residual.clone())),
            });
        }
    }

    let epsilon = report
        .detected_epsilon
        .or(config.chart.epsilon)
        .unwrap_or(1);
    let cone = cone_over_frame(frame, &rat(1, 1), epsilon)?;
    let cone_checks = hyperkahler_check(&cone);
    let all_kahler_closed = cone_checks
        .iter()
        .filter(|c| c.name.starts_with("kahler_form_closed"))
        .all(|c| matches!(&c.residual, Ok(r) if r.is_zero()));
    checks.extend(cone_checks);

    // The sign detection and the closedness of the candidate Kähler forms
    // must tell the same story.
    let detected_used = report.detected_epsilon == Some(epsilon);
    checks.push(flag_check(
        "sasakian_cone_agreement",
        true,
        detected_used == all_kahler_closed,
        format!(
            "detected sign {:?} with cone sign {epsilon}, yet closed Kähler forms = {}",
            report.detected_epsilon, all_kahler_closed
        ),
    ));

    // A detected sign pins the normalized scalar curvature to 2ε.
    if let (Some(eps), Some(connection)) = (report.detected_epsilon, connection) {
        let expected = Jet::constant(
            frame.dim,
            connection.s.order(),
            S::from_int(2 * i64::from(eps)),
        );
        checks.push(NamedResidual {
            name: "sasakian_scalar_value".to_string(),
            required: true,
            residual: Ok(Residual::Scalar(connection.s.sub(&expected))),
        });
    }

    Ok(ConeEvaluation {
        epsilon,
        detected: report.detected_epsilon,
        checks,
    })
}

fn to_record(check: &NamedResidual<Rational>, coords: &[String]) -> CheckRecord {
    match &check.residual {
        Ok(residual) => {
            let witness = residual.witness(coords);
            CheckRecord {
                name: check.name.clone(),
                status: if witness.is_none() {
                    CheckStatus::Zero
                } else {
                    CheckStatus::Nonzero
                },
                required: check.required,
                witness,
            }
        }
        Err(err) => CheckRecord {
            name: check.name.clone(),
            status: CheckStatus::Error,
            required: check.required,
            witness: Some(err.to_string()),
        },
    }
}

fn status_of<S: Scalar>(check: &NamedResidual<S>) -> CheckStatus {
    match &check.residual {
        Ok(residual) if residual.is_zero() => CheckStatus::Zero,
        Ok(_) => CheckStatus::Nonzero,
        Err(_) => CheckStatus::Error,
    }
}

/// Marks every record that is exactly zero over the rationals but nonzero
/// in the prime-field pass — an unsound computation if it ever fires.
fn apply_prescreen(records: &mut [CheckRecord], fp_checks: &[NamedResidual<Fp>]) {
    for record in records.iter_mut() {
        if record.status != CheckStatus::Zero {
            continue;
        }
        if let Some(fp) = fp_checks.iter().find(|c| c.name == record.name) {
            if status_of(fp) == CheckStatus::Nonzero {
                record.status = CheckStatus::Error;
                record.witness = Some(format!(
                    "prescreen mismatch: exact residual is zero but the image modulo \
                     2^61+15 is nonzero — {}",
                    Error::PrescreenMismatch {
                        context: record.name.clone()
                    }
                ));
            }
        }
    }
}

fn point_report(
    config: &RunConfig,
    index: u64,
    point: &[Rational],
    eval: &PointEvaluation<Rational>,
    fp_eval: Option<&PointEvaluation<Fp>>,
) -> PointReport {
    let mut coords: Vec<String> = config.chart.coords.clone();
    let mut checks: Vec<CheckRecord> = eval.checks.iter().map(|c| to_record(c, &coords)).collect();
    if let Some(fp) = fp_eval {
        apply_prescreen(&mut checks, &fp.checks);
    }
    let cone = eval.cone.as_ref().map(|cone_eval| {
        coords.push("t".to_string());
        let mut cone_checks: Vec<CheckRecord> = cone_eval
            .checks
            .iter()
            .map(|c| to_record(c, &coords))
            .collect();
        if let Some(fp) = fp_eval {
            if let Some(fp_cone) = &fp.cone {
                apply_prescreen(&mut cone_checks, &fp_cone.checks);
            }
        }
        ConeSection {
            epsilon: cone_eval.epsilon,
            tvalue: "1".to_string(),
            detected_epsilon: cone_eval.detected,
            checks: cone_checks,
        }
    });
    PointReport {
        index,
        coordinates: point.iter().map(format_rational).collect(),
        scalars: eval
            .scalars
            .as_ref()
            .map(|(s, scal)| ScalarValues {
                s: format_rational(s),
                scal: format_rational(scal),
            }),
        checks,
        classification: eval.classification.as_ref().map(|c| ClassificationRecord {
            four_form_closed: c.four_form_closed,
            torsion_zero: c.torsion_zero,
            reeb_invariant: c.reeb_invariant,
            s: format_rational(&c.s_value),
            corollary_consistent: c.corollary_consistent,
            verdict: c.verdict.clone(),
        }),
        cone,
    }
}

/// Runs the selected suites at `config.points` seeded sample points and
/// assembles the report.  Degenerate sample points are skipped (up to
/// [`MAX_POINT_ATTEMPTS`] per slot); geometric verdict errors abort the
/// run — they mean the chart is not a valid input.
pub fn run(config: &RunConfig) -> Result<Report> {
    if config.points == 0 {
        return Err(Error::InvalidChart {
            context: "a run needs at least one sample point".into(),
        });
    }
    if config.jet_order < 2 {
        return Err(Error::InsufficientJetOrder {
            order: config.jet_order as u8,
            context: "runs need jets of order at least 2".into(),
        });
    }
    if config.suites.needs_connection() && config.jet_order < 3 {
        return Err(Error::InsufficientJetOrder {
            order: config.jet_order as u8,
            context: "the structure/torsion/theorem suites need jets of order at least 3 \
                      so the scalar curvature keeps a derivative"
                .into(),
        });
    }
    config.chart.validate()?;

    let dim = config.chart.dim();
    let points: Vec<PointReport> = (0..config.points)
        .into_par_iter()
        .map(|slot| -> Result<PointReport> {
            let mut last_err = None;
            for attempt in 0..MAX_POINT_ATTEMPTS {
                let stream_index = slot * MAX_POINT_ATTEMPTS + attempt;
                let mut stream =
                    SampleStream::for_point(config.seed, stream_index, config.coeff_bound);
                let point = stream.point(dim);
                match evaluate_point::<Rational>(config, &point) {
                    Ok(eval) => {
                        let fp_eval = if config.prescreen {
                            evaluate_point::<Fp>(config, &point).ok()
                        } else {
                            None
                        };
                        return Ok(point_report(
                            config,
                            stream_index,
                            &point,
                            &eval,
                            fp_eval.as_ref(),
                        ));
                    }
                    Err(err) if is_retryable(&err) => {
                        last_err = Some(err);
                    }
                    Err(err) => return Err(err),
                }
            }
            Err(last_err.expect("retry loop ran at least once"))
        })
        .collect::<Result<Vec<_>>>()?;

    let all_required_zero = points
        .iter()
        .flat_map(|p| {
            p.checks
                .iter()
                .chain(p.cone.iter().flat_map(|c| c.checks.iter()))
        })
        .all(|c| !c.required || c.status == CheckStatus::Zero);

    Ok(Report {
        chart: config.chart.label.clone(),
        n: config.chart.n,
        seed: config.seed,
        jet_order: config.jet_order,
        coeff_bound: config.coeff_bound,
        point_count: config.points,
        suites: config.suites.names(),
        prescreen: config.prescreen,
        points,
        all_required_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas;

    #[test]
    fn suite_selection_parses_subsets_and_rejects_unknown_names() {
        let sel = SuiteSelection::parse("structure, cone").unwrap();
        assert!(sel.structure && sel.cone && !sel.torsion && !sel.theorem);
        assert_eq!(sel.names(), vec!["structure", "cone"]);
        assert!(matches!(
            SuiteSelection::parse("structure,tors"),
            Err(Error::InvalidChart { .. })
        ));
        assert!(matches!(
            SuiteSelection::parse(""),
            Err(Error::InvalidChart { .. })
        ));
    }

    #[test]
    fn flat_chart_run_is_all_zero_and_deterministic() {
        let chart = atlas::heisenberg(1).unwrap();
        let mut config = RunConfig::new(chart);
        config.points = 2;
        config.seed = 7;
        config.prescreen = true;
        let report = run(&config).unwrap();
        assert!(report.all_required_zero);
        assert_eq!(report.points.len(), 2);
        for point in &report.points {
            let class = point.classification.as_ref().unwrap();
            assert!(class.four_form_closed && class.torsion_zero && class.reeb_invariant);
            assert_eq!(class.verdict, "torsion-free, Scal = 0");
            assert_eq!(point.scalars.as_ref().unwrap().s, "0");
            let cone = point.cone.as_ref().unwrap();
            assert_eq!(cone.detected_epsilon, None);
            assert!(cone
                .checks
                .iter()
                .any(|c| c.name == "sasakian_cone_agreement" && c.status == CheckStatus::Zero));
            // The flat chart is not Sasakian-type, so the Kähler forms
            // stay open — informative nonzero, never a failure.
            assert!(cone.checks.iter().any(|c| c.name == "kahler_form_closed_1"
                && c.status == CheckStatus::Nonzero
                && !c.required));
        }
        let again = run(&config).unwrap();
        assert_eq!(again.to_json(), report.to_json(), "byte-identical reruns");
    }

    #[test]
    fn deformed_chart_keeps_required_checks_zero_with_nonzero_flags() {
        let chart =
            atlas::conformal_deform(&atlas::heisenberg(1).unwrap(), "1 + x3^2").unwrap();
        let mut config = RunConfig::new(chart);
        config.points = 1;
        config.seed = 11;
        let report = run(&config).unwrap();
        assert!(report.all_required_zero, "structure equations still hold");
        let point = &report.points[0];
        let class = point.classification.as_ref().unwrap();
        assert!(!class.torsion_zero);
        assert_eq!(class.verdict, "generic (torsion ≠ 0)");
        let four_form = point
            .checks
            .iter()
            .find(|c| c.name == "four_form_closed")
            .unwrap();
        assert_eq!(four_form.status, CheckStatus::Nonzero);
        assert!(!four_form.required);
        assert!(four_form.witness.is_some(), "nonzero checks carry witnesses");
        // Dimension seven: the refusal of the contraction route is itself
        // a required, passing check.
        assert!(point
            .checks
            .iter()
            .any(|c| c.name == "four_form_route_refused_dim7" && c.status == CheckStatus::Zero));
    }

    #[test]
    fn config_validation_rejects_bad_orders_and_empty_runs() {
        let chart = atlas::heisenberg(1).unwrap();
        let mut config = RunConfig::new(chart);
        config.points = 0;
        assert!(matches!(run(&config), Err(Error::InvalidChart { .. })));
        config.points = 1;
        config.jet_order = 2;
        assert!(matches!(
            run(&config),
            Err(Error::InsufficientJetOrder { .. })
        ));
        config.suites = SuiteSelection::parse("cone").unwrap();
        assert!(run(&config).is_ok(), "cone alone runs at order two");
        config.jet_order = 1;
        assert!(matches!(
            run(&config),
            Err(Error::InsufficientJetOrder { .. })
        ));
    }
}
