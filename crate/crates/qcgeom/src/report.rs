//! Serialized run reports.
//!
//! A report captures one deterministic run: the chart, the sampling
//! parameters, and — per sample point — the exact verdict of every check
//! (`zero`, `nonzero` with a witness, or `error` with the failure text),
//! the scalar-curvature values, the classification record, and the cone
//! section when requested.  Serialization is plain serde with a fixed
//! field order, so identical runs produce byte-identical files.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Report {
    /// Chart label (includes the deformation when one was applied).
    pub chart: String,
    pub n: usize,
    pub seed: u64,
    pub jet_order: u32,
    pub coeff_bound: u32,
    /// Number of sample points requested.
    pub point_count: u64,
    /// Which check families ran.
    pub suites: Vec<String>,
    /// Whether the prime-field prescreen ran.
    pub prescreen: bool,
    pub points: Vec<PointReport>,
    /// True when every required check at every point is exactly zero —
    /// the run-level pass/fail bit.
    pub all_required_zero: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct PointReport {
    /// Index of the sample stream that produced this point (equals the
    /// slot index unless degenerate points were skipped).
    pub index: u64,
    /// Exact rational coordinates of the sample point.
    pub coordinates: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scalars: Option<ScalarValues>,
    pub checks: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub classification: Option<ClassificationRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cone: Option<ConeSection>,
}

/// Normalized and raw scalar curvature at the point, as exact rationals.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ScalarValues {
    pub s: String,
    pub scal: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub name: String,
    pub status: CheckStatus,
    /// Whether a nonzero outcome fails the run.
    pub required: bool,
    /// First nonzero component (for `nonzero`) or failure text (for
    /// `error`).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Zero,
    Nonzero,
    Error,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ClassificationRecord {
    pub four_form_closed: bool,
    pub torsion_zero: bool,
    pub reeb_invariant: bool,
    /// Value of the normalized scalar curvature, as an exact rational.
    pub s: String,
    pub corollary_consistent: bool,
    pub verdict: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ConeSection {
    /// Sign the cone was built with.
    pub epsilon: i32,
    /// Sample value of the cone coordinate.
    pub tvalue: String,
    /// Sign detected by the Sasakian-type comparison, if either fits.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detected_epsilon: Option<i32>,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    /// Serializes with a trailing newline; byte-stable across runs.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Json {
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, &e))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, &e))?;
        Self::from_json(&text)
    }

    /// Iterator over every check record, cone section included.
    pub fn all_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.points.iter().flat_map(|p| {
            p.checks
                .iter()
                .chain(p.cone.iter().flat_map(|c| c.checks.iter()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        Report {
            chart: "heisenberg-n1".into(),
            n: 1,
            seed: 42,
            jet_order: 3,
            coeff_bound: 7,
            point_count: 1,
            suites: vec!["structure".into(), "cone".into()],
            prescreen: false,
            points: vec![PointReport {
                index: 0,
                coordinates: vec!["1/2".into(), "-3".into()],
                scalars: Some(ScalarValues {
                    s: "0".into(),
                    scal: "0".into(),
                }),
                checks: vec![CheckRecord {
                    name: "fundamental_form_structure_1".into(),
                    status: CheckStatus::Zero,
                    required: true,
                    witness: None,
                }],
                classification: Some(ClassificationRecord {
                    four_form_closed: true,
                    torsion_zero: true,
                    reeb_invariant: true,
                    s: "0".into(),
                    corollary_consistent: true,
                    verdict: "torsion-free, Scal = 0".into(),
                }),
                cone: Some(ConeSection {
                    epsilon: 1,
                    tvalue: "1".into(),
                    detected_epsilon: None,
                    checks: vec![CheckRecord {
                        name: "kahler_form_closed_1".into(),
                        status: CheckStatus::Nonzero,
                        required: false,
                        witness: Some("[dx1^dx2] 2".into()),
                    }],
                }),
            }],
            all_required_zero: true,
        }
    }

    #[test]
    fn json_round_trip_is_lossless_and_stable() {
        let report = sample_report();
        let text = report.to_json();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), text, "serialization is byte-stable");
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn all_checks_walks_cone_sections_too() {
        let report = sample_report();
        let names: Vec<&str> = report.all_checks().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            vec!["fundamental_form_structure_1", "kahler_form_closed_1"]
        );
    }

    #[test]
    fn malformed_json_is_reported() {
        assert!(matches!(
            Report::from_json("{ not json"),
            Err(Error::Json { .. })
        ));
    }
}
