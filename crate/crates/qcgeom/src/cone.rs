//! The one-parameter cone over a qc chart.
//!
//! Adjoining a genuine jet coordinate `t` (always the last variable, with
//! a positive sample value) to a point frame yields, for a sign `ε = ±1`:
//!
//! * the cone metric `G_N = t²g + εt²(η₁² + η₂² + η₃²) + ε dt²`, assembled
//!   as an exact coordinate bilinear form;
//! * three candidate Kähler 2-forms `F_i = t²ω_i + εt²η_j∧η_k − tη_i∧dt`;
//! * the cone 4-form `F = Σ F_i∧F_i`.
//!
//! Their exterior derivatives characterize the distinguished geometries:
//! every `dF_i` vanishes exactly when the contact triple satisfies
//! `dη_i = 2ω_i + 2εη_j∧η_k`, and `dF` vanishes for the closed-4-form,
//! torsion-free structures.  The algebraic split `dF = 2Σ dF_i∧F_i` is
//! checked as an internal consistency identity.

use crate::biquard::{NamedResidual, Residual};
use crate::exterior::FormJet;
use crate::qcframe::{cyclic, QcChart, QcPointFrame};
use crate::ratjet::{symmetric_signature, Jet, JetMatrix, Rational, Scalar};
use crate::{Error, Result};

/// The cone over one sample point of a chart.
pub struct ConeData<S: Scalar> {
    pub epsilon: i32,
    /// Sample value of the cone coordinate (positive).
    pub tvalue: Rational,
    /// Rank of the underlying chart.
    pub n: usize,
    /// Number of jet variables, including the cone coordinate.
    pub dim: usize,
    /// Cone metric as a symmetric coordinate bilinear form.
    pub gn: JetMatrix<S>,
    /// Candidate Kähler 2-forms.
    pub fi: [FormJet<S>; 3],
    /// Cone 4-form `Σ F_i∧F_i`.
    pub f: FormJet<S>,
}

/// Residual report of the Sasakian-type comparison
/// `dη_i − 2ω_i − 2εη_j∧η_k` for both signs of `ε`.
pub struct SasakianReport<S: Scalar> {
    pub residuals_plus: [FormJet<S>; 3],
    pub residuals_minus: [FormJet<S>; 3],
    /// The sign for which all three residuals vanish exactly, if either.
    pub detected_epsilon: Option<i32>,
}

/// Assembles the cone metric and forms over `point` at `t = tvalue`.
pub fn cone_structures<S: Scalar>(
    chart: &QcChart,
    point: &[Rational],
    tvalue: &Rational,
    epsilon: i32,
    order: u32,
) -> Result<ConeData<S>> {
    if epsilon != 1 && epsilon != -1 {
        return Err(Error::ConstructionInvalid {
            context: format!("cone sign must be +1 or -1, got {epsilon}"),
        });
    }
    if tvalue.sign() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::ConstructionInvalid {
            context: "the cone coordinate sample value must be positive".into(),
        });
    }
    let frame = QcPointFrame::<S>::build(chart, point, order, None)?;
    cone_over_frame(&frame, tvalue, epsilon)
}

/// Assembles the cone from an already-built frame.
pub fn cone_over_frame<S: Scalar>(
    frame: &QcPointFrame<S>,
    tvalue: &Rational,
    epsilon: i32,
) -> Result<ConeData<S>> {
    let base_dim = frame.dim;
    let dim = base_dim + 1;
    let hdim = 4 * frame.n;
    let eps = S::from_int(i64::from(epsilon));
    let t = Jet::coordinate(dim, frame.order, base_dim, S::from_rational(tvalue));
    let t_sq = t.mul(&t);

    // Horizontal metric as a coordinate bilinear form: with Θ the rows of
    // the coframe dual to the horizontal frame, g_H = Θᵀ G Θ.
    let theta = JetMatrix::from_fn(hdim, base_dim, |a, mu| frame.coframe.get(a, mu).clone());
    let g_h = theta.transpose().matmul(&frame.metric).matmul(&theta);

    let gn = JetMatrix::from_fn(dim, dim, |mu, nu| {
        let mut entry = if mu < base_dim && nu < base_dim {
            let mut e = g_h.get(mu, nu).extend_dim(dim).mul(&t_sq);
            for l in 0..3 {
                let eta_mu = frame.eta[l].component(1 << mu).extend_dim(dim);
                let eta_nu = frame.eta[l].component(1 << nu).extend_dim(dim);
                e = e.add(&eta_mu.mul(&eta_nu).mul(&t_sq).scale(&eps));
            }
            e
        } else {
            Jet::zero(dim, frame.order)
        };
        if mu == base_dim && nu == base_dim {
            entry = entry.add(&Jet::constant(dim, frame.order, eps.clone()));
        }
        entry
    });

    // Signature sanity on the value part: the horizontal block is always
    // positive; the η ⊕ dt block carries the sign of ε.
    let value = gn.value_matrix();
    let expected = if epsilon == 1 { (dim, 0, 0) } else { (hdim, 4, 0) };
    match symmetric_signature(&value) {
        Some(sig) if sig == expected => {}
        Some(sig) => {
            return Err(Error::ConstructionInvalid {
                context: format!(
                    "cone metric signature is ({}, {}, {}), expected ({}, {}, {})",
                    sig.0, sig.1, sig.2, expected.0, expected.1, expected.2
                ),
            });
        }
        None => {
            return Err(Error::ConstructionInvalid {
                context: "cone metric value part is not symmetric".into(),
            });
        }
    }

    let dt = FormJet::coordinate_differential(dim, frame.order, base_dim);
    let eta_ext: [FormJet<S>; 3] = std::array::from_fn(|l| frame.eta[l].extend_dim(dim));
    let fi: [FormJet<S>; 3] = std::array::from_fn(|i| {
        let (i, j, k) = cyclic(i);
        frame.omega[i]
            .extend_dim(dim)
            .scale(&t_sq)
            .add(&eta_ext[j].wedge(&eta_ext[k]).scale(&t_sq).scale_scalar(&eps))
            .sub(&eta_ext[i].wedge(&dt).scale(&t))
    });
    let f = fi[0]
        .wedge(&fi[0])
        .add(&fi[1].wedge(&fi[1]))
        .add(&fi[2].wedge(&fi[2]));

    Ok(ConeData {
        epsilon,
        tvalue: tvalue.clone(),
        n: frame.n,
        dim,
        gn,
        fi,
        f,
    })
}

/// Compares `dη_i` against `2ω_i + 2εη_j∧η_k` for both signs and reports
/// the residuals and the detected sign, if any.
pub fn sasakian_check<S: Scalar>(
    chart: &QcChart,
    point: &[Rational],
    order: u32,
) -> Result<SasakianReport<S>> {
    let frame = QcPointFrame::<S>::build(chart, point, order, None)?;
    Ok(sasakian_check_frame(&frame))
}

/// The Sasakian-type comparison on an already-built frame.
pub fn sasakian_check_frame<S: Scalar>(frame: &QcPointFrame<S>) -> SasakianReport<S> {
    let two = S::from_int(2);
    let residual_for = |eps: i64| -> [FormJet<S>; 3] {
        let eps_two = S::from_int(2 * eps);
        std::array::from_fn(|i| {
            let (i, j, k) = cyclic(i);
            frame.deta[i]
                .sub(&frame.omega[i].scale_scalar(&two))
                .sub(&frame.eta[j].wedge(&frame.eta[k]).scale_scalar(&eps_two))
        })
    };
    let residuals_plus = residual_for(1);
    let residuals_minus = residual_for(-1);
    let zero_plus = residuals_plus.iter().all(FormJet::is_zero);
    let zero_minus = residuals_minus.iter().all(FormJet::is_zero);
    let detected_epsilon = match (zero_plus, zero_minus) {
        (true, false) => Some(1),
        (false, true) => Some(-1),
        _ => None,
    };
    SasakianReport {
        residuals_plus,
        residuals_minus,
        detected_epsilon,
    }
}

/// Exterior-derivative checks on the cone: closedness of each candidate
/// Kähler form, closedness of the cone 4-form, and the internal split
/// identity `dF = 2Σ dF_i∧F_i` (the only check whose failure would be an
/// engine fault rather than a geometric verdict).
pub fn hyperkahler_check<S: Scalar>(cone: &ConeData<S>) -> Vec<NamedResidual<S>> {
    let mut checks = Vec::new();
    let mut derivatives = Vec::with_capacity(3);
    for i in 0..3 {
        let dfi = cone.fi[i].d();
        checks.push(NamedResidual {
            name: format!("kahler_form_closed_{}", i + 1),
            required: false,
            residual: dfi.clone().map(Residual::Form),
        });
        derivatives.push(dfi);
    }
    let df = cone.f.d();
    checks.push(NamedResidual {
        name: "cone_four_form_closed".into(),
        required: false,
        residual: df.clone().map(Residual::Form),
    });
    let split = (|| {
        let df = df?;
        let mut rhs: Option<FormJet<S>> = None;
        for i in 0..3 {
            let term = derivatives[i].clone()?.wedge(&cone.fi[i]);
            rhs = Some(match rhs {
                None => term,
                Some(prev) => prev.add(&term),
            });
        }
        let rhs = rhs.expect("three terms").scale_scalar(&S::from_int(2));
        Ok(Residual::Form(df.sub(&rhs)))
    })();
    checks.push(NamedResidual {
        name: "cone_derivative_split".into(),
        required: true,
        residual: split,
    });
    checks
}
