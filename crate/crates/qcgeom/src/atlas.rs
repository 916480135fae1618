//! Built-in example charts, conformal rescaling, and chart file I/O.
//!
//! Two families are provided in closed form:
//!
//! * the quaternionic Heisenberg group — the flat model, with globally
//!   constant metric and structure maps and vanishing torsion;
//! * the round sphere `S^{4n+3}` in the inverse-stereographic chart, whose
//!   contact triple is the restriction of the standard hyperkähler triple
//!   of `ℍ^{n+1}`; its constructor re-derives the defining comparison
//!   identity at seeded sample points and refuses to hand out a chart that
//!   fails it.
//!
//! `conformal_deform` rescales any chart's triple by a positive function,
//! producing the textbook family of qc structures that are no longer
//! 3-Sasakian.  Charts round-trip through a small JSON document whose
//! serialization is byte-stable, so emitted examples can be diffed.

use crate::qcframe::{cyclic, QcChart, QcPointFrame};
use crate::ratjet::{rat, Expression, Rational, SampleStream};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The 4×4 matrix of left multiplication by `i`, `j`, or `k` (for `l` = 0,
/// 1, 2) on the quaternions, in the basis `(1, i, j, k)` with column-vector
/// convention.  These satisfy the quaternion multiplication table and are
/// antisymmetric; every flat-model structure constant comes from them.
pub fn quaternion_block(l: usize) -> [[i64; 4]; 4] {
    match l {
        0 => [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
        1 => [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
        2 => [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
        _ => panic!("quaternion block index must be 0, 1, or 2"),
    }
}

/// Builds `Σ coeff·coordinate` with subtraction for negative coefficients,
/// so printed charts stay readable.  An empty sum is the zero expression.
fn signed_sum(terms: &[(i64, usize)]) -> Expression {
    let magnitude = |c: i64, index: usize| {
        if c.abs() == 1 {
            Expression::coord(index)
        } else {
            Expression::int(c.abs()) * Expression::coord(index)
        }
    };
    let mut acc: Option<Expression> = None;
    for &(coeff, index) in terms {
        if coeff == 0 {
            continue;
        }
        let term = magnitude(coeff, index);
        acc = Some(match acc {
            None if coeff < 0 => -term,
            None => term,
            Some(prev) if coeff < 0 => prev - term,
            Some(prev) => prev + term,
        });
    }
    acc.unwrap_or_else(|| Expression::int(0))
}

/// The quaternionic Heisenberg group of dimension `4n + 3`, in coordinates
/// `(x1 … x_{4n}, t1, t2, t3)`:
///
/// ```text
/// eta_l = dt_l + Σ_{a,b} (Q_l)_{ba} x^a dx^b
/// ```
///
/// with `Q_l` the block-diagonal copy of [`quaternion_block`]`(l)`.  The
/// derived frame data are constant: `G` is the identity and `J_l` the
/// quaternion blocks themselves, which makes this the canonical flat
/// regression fixture.
pub fn heisenberg(n: usize) -> Result<QcChart> {
    let dim = 4 * n + 3;
    let mut coords: Vec<String> = (1..=4 * n).map(|a| format!("x{a}")).collect();
    coords.extend((1..=3).map(|m| format!("t{m}")));
    let mut eta: [Vec<Expression>; 3] = std::array::from_fn(|_| Vec::with_capacity(dim));
    for (l, row) in eta.iter_mut().enumerate() {
        let block = quaternion_block(l);
        for b in 0..4 * n {
            let base = 4 * (b / 4);
            let terms: Vec<(i64, usize)> =
                (0..4).map(|c| (block[b % 4][c], base + c)).collect();
            row.push(signed_sum(&terms));
        }
        for m in 0..3 {
            row.push(Expression::int(i64::from(m == l)));
        }
    }
    let chart = QcChart {
        label: format!("heisenberg-n{n}"),
        n,
        coords,
        eta,
        epsilon: None,
    };
    chart.validate()?;
    Ok(chart)
}

/// The round sphere `S^{4n+3}` with its standard 3-Sasakian contact
/// triple, pulled back through inverse stereographic projection from the
/// pole `(-1, 0, …, 0)`:
///
/// ```text
/// φ_0 = (1 - |x|²)/B,   φ_{1+μ} = 2 x_μ / B,   B = 1 + |x|²,
/// eta_l = ⟨ Q_l φ, dφ ⟩                       (restricted to the chart)
/// ```
///
/// whose coefficient functions are rational with denominator `B³`.  Only
/// `n ∈ {1, 2}` is offered.  The constructor validates its own output: at
/// seeded sample points it builds the full point frame and requires the
/// comparison identity `dη_i = 2ω_i + 2 η_j ∧ η_k` (sign `+1`) to hold
/// exactly, failing with `ConstructionInvalid` otherwise — a guard against
/// any drift in the structure-constant tables above.
pub fn sphere_3sasakian(n: usize) -> Result<QcChart> {
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidChart {
            context: format!("the round-sphere chart is provided for n in {{1, 2}}, got {n}"),
        });
    }
    let dim = 4 * n + 3;
    let ambient = dim + 1;
    let coords: Vec<String> = (1..=dim).map(|a| format!("x{a}")).collect();

    let x = Expression::coord;
    let norm_sq = (0..dim)
        .map(|mu| x(mu).pow(2))
        .reduce(|a, b| a + b)
        .expect("dim >= 7");
    let b_expr = Expression::int(1) + norm_sq.clone();
    // Numerators of the parametrization: N_P = B · φ_P.
    let nvec: Vec<Expression> = std::iter::once(Expression::int(1) - norm_sq)
        .chain((0..dim).map(|mu| Expression::int(2) * x(mu)))
        .collect();
    // Scaled Jacobian: T_{P,ν} = B² · ∂φ_P/∂x_ν.
    let jacobian = |p: usize, nu: usize| -> Expression {
        if p == 0 {
            Expression::int(-4) * x(nu)
        } else if p - 1 == nu {
            Expression::int(2) * b_expr.clone() - Expression::int(4) * x(nu).pow(2)
        } else {
            Expression::int(-4) * x(p - 1) * x(nu)
        }
    };
    let b_cubed = b_expr.clone().pow(3);
    let mut eta: [Vec<Expression>; 3] = std::array::from_fn(|_| Vec::with_capacity(dim));
    for (l, form) in eta.iter_mut().enumerate() {
        let block = quaternion_block(l);
        for nu in 0..dim {
            // eta_l[ν] = Σ_P (Q_l N)_P T_{P,ν} / B³; each block row of Q_l
            // holds a single ±1, so (Q_l N)_P is one signed N component.
            let mut numer: Option<Expression> = None;
            for p in 0..ambient {
                let base = 4 * (p / 4);
                for c in 0..4 {
                    let coeff = block[p % 4][c];
                    if coeff == 0 {
                        continue;
                    }
                    let component = nvec[base + c].clone();
                    let signed = if coeff == 1 { component } else { -component };
                    let term = signed * jacobian(p, nu);
                    numer = Some(match numer {
                        None => term,
                        Some(prev) => prev + term,
                    });
                }
            }
            form.push(numer.expect("every block row is populated") / b_cubed.clone());
        }
    }
    let chart = QcChart {
        label: format!("sphere-n{n}"),
        n,
        coords,
        eta,
        epsilon: Some(1),
    };
    chart.validate()?;
    validate_unit_sphere_identity(&chart)?;
    Ok(chart)
}

/// Seeded spot-check run by the sphere constructor: builds the point frame
/// at sample points drawn from a fixed stream and requires
/// `dη_i - 2ω_i - 2 η_j∧η_k = 0` exactly.
fn validate_unit_sphere_identity(chart: &QcChart) -> Result<()> {
    const SEED: u64 = 0x51_0e_7e57;
    const POINTS: u32 = 2;
    let two = rat(2, 1);
    let mut checked = 0;
    for index in 1..=40u64 {
        if checked == POINTS {
            return Ok(());
        }
        let mut stream = SampleStream::for_point(SEED, index, 2);
        let point = stream.point(chart.dim());
        let frame = match QcPointFrame::<Rational>::build(chart, &point, 2, None) {
            Ok(frame) => frame,
            Err(
                Error::DegenerateStructure { .. }
                | Error::DivisionByZero { .. }
                | Error::SingularValuePart { .. },
            ) => continue,
            Err(err) => {
                return Err(Error::ConstructionInvalid {
                    context: format!("sphere chart fails frame construction: {err}"),
                })
            }
        };
        for i in 0..3 {
            let (i, j, k) = cyclic(i);
            let residual = frame.deta[i]
                .sub(&frame.omega[i].scale_scalar(&two))
                .sub(&frame.eta[j].wedge(&frame.eta[k]).scale_scalar(&two));
            if !residual.is_zero() {
                return Err(Error::ConstructionInvalid {
                    context: format!(
                        "unit-sphere comparison identity fails for form {} at seeded point {index}",
                        i + 1
                    ),
                });
            }
        }
        checked += 1;
    }
    Err(Error::DegenerateStructure {
        context: "no usable seeded validation point for the sphere chart".into(),
    })
}

/// Rescales the contact triple by a scalar function: `eta_l → μ·eta_l`.
///
/// This is the standard conformal change of a qc structure; wherever
/// `μ ≠ 0` the result is again qc, with the same horizontal distribution.
/// A declared comparison sign no longer applies, so `epsilon` is cleared.
pub fn conformal_deform(chart: &QcChart, factor: &str) -> Result<QcChart> {
    let mu = Expression::parse(factor, &chart.coords)?;
    let eta = std::array::from_fn(|l| {
        chart.eta[l]
            .iter()
            .map(|component| mu.clone() * component.clone())
            .collect()
    });
    let chart = QcChart {
        label: format!("{} deformed by {}", chart.label, mu.print(&chart.coords)),
        n: chart.n,
        coords: chart.coords.clone(),
        eta,
        epsilon: None,
    };
    chart.validate()?;
    Ok(chart)
}

/// On-disk chart document.  Field order is fixed, so serialization is
/// byte-stable and emitted charts can be compared with `diff`.
#[derive(Serialize, Deserialize)]
struct ChartDoc {
    label: String,
    n: usize,
    coordinates: Vec<String>,
    eta: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epsilon: Option<i32>,
}

/// Serializes a chart to its JSON document (trailing newline included).
pub fn chart_to_json(chart: &QcChart) -> String {
    let doc = ChartDoc {
        label: chart.label.clone(),
        n: chart.n,
        coordinates: chart.coords.clone(),
        eta: chart
            .eta
            .iter()
            .map(|row| row.iter().map(|e| e.print(&chart.coords)).collect())
            .collect(),
        epsilon: chart.epsilon,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("chart document serializes");
    text.push('\n');
    text
}

/// Parses and validates a chart from its JSON document.
pub fn chart_from_json(text: &str) -> Result<QcChart> {
    let doc: ChartDoc = serde_json::from_str(text).map_err(|err| Error::Json {
        message: err.to_string(),
    })?;
    if doc.eta.len() != 3 {
        return Err(Error::InvalidChart {
            context: format!("chart must list exactly 3 contact forms, got {}", doc.eta.len()),
        });
    }
    let mut eta: [Vec<Expression>; 3] = std::array::from_fn(|_| Vec::new());
    for (row, sources) in eta.iter_mut().zip(&doc.eta) {
        *row = sources
            .iter()
            .map(|src| Expression::parse(src, &doc.coordinates))
            .collect::<Result<_>>()?;
    }
    let chart = QcChart {
        label: doc.label,
        n: doc.n,
        coords: doc.coordinates,
        eta,
        epsilon: doc.epsilon,
    };
    chart.validate()?;
    Ok(chart)
}

/// Writes a chart document to disk.
pub fn save_chart(chart: &QcChart, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, chart_to_json(chart)).map_err(|err| Error::io(path, &err))
}

/// Reads a chart document from disk.
pub fn load_chart(path: &std::path::Path) -> Result<QcChart> {
    let text = std::fs::read_to_string(path).map_err(|err| Error::io(path, &err))?;
    chart_from_json(&text)
}
