//! From a chart to a validated point frame.
//!
//! A chart hands us three 1-forms `eta_1, eta_2, eta_3` in coordinates.  At
//! a sample point this module derives, in exact arithmetic:
//!
//! * the three Reeb fields `xi_l`, characterized by `eta_m(xi_l) = δ_ml`
//!   together with `dη_l(xi_l, ·)|_H = 0`, and validated against the mixed
//!   compatibility equations `dη_k(xi_l, ·)|_H = -dη_l(xi_k, ·)|_H`;
//! * a horizontal frame: a jet basis of the common kernel `H` of the three
//!   forms;
//! * the metric `G` and the triple of almost complex structures `J_l` on
//!   `H`, recovered from the restricted 2-forms `W_l = ½ dη_l|_H` by ratio
//!   matrices `-W_a^{-1} W_b` and a sign search over the eight possible
//!   orientations, exactly one of which satisfies the quaternion relations
//!   with a single symmetric positive compatible metric;
//! * the fundamental 2-forms `omega_l` — the unique global extensions of
//!   `½ dη_l|_H` annihilated by every Reeb field — and the 4-form
//!   `Omega = Σ omega_l ∧ omega_l`.
//!
//! Everything asserted here is checked exactly; a failure is either a
//! precise geometric verdict (`NotQuaternionicContact`,
//! `NotQuaternionCompatible`) or a sample-point degeneracy the caller may
//! retry elsewhere.

use crate::exterior::{FormJet, FrameForm, VectorJet};
use crate::ratjet::{symmetric_signature, Expression, Jet, JetMatrix, Rational, Scalar};
use crate::{Error, Result};

/// A coordinate chart with a candidate quaternionic contact triple.
///
/// `eta[l]` lists the coefficient expressions of `eta_{l+1}` in the chart
/// coframe, one per coordinate.  `epsilon` optionally declares the sign
/// convention the chart is expected to satisfy in the Sasakian comparison
/// (`+1` for the sphere family); the cone suite can also detect it.
#[derive(Clone, Debug)]
pub struct QcChart {
    pub label: String,
    pub n: usize,
    pub coords: Vec<String>,
    pub eta: [Vec<Expression>; 3],
    pub epsilon: Option<i32>,
}

impl QcChart {
    /// Chart dimension `4n + 3`.
    pub fn dim(&self) -> usize {
        4 * self.n + 3
    }

    /// Validates the shape invariants: dimension bookkeeping, coordinate
    /// names, and the capacity bound of the packed jet representation
    /// (the cone construction needs one extra variable).
    pub fn validate(&self) -> Result<()> {
        let fail = |context: String| Err(Error::InvalidChart { context });
        if self.n < 1 {
            return fail("n must be at least 1".into());
        }
        if self.dim() + 1 > crate::ratjet::MAX_VARIABLES {
            return Err(Error::CapacityExceeded {
                context: format!(
                    "dimension {} needs {} jet variables with the cone direction; \
                     the packed representation caps at {} (n <= 3)",
                    self.dim(),
                    self.dim() + 1,
                    crate::ratjet::MAX_VARIABLES
                ),
            });
        }
        if self.coords.len() != self.dim() {
            return fail(format!(
                "{} coordinates listed, dimension is {}",
                self.coords.len(),
                self.dim()
            ));
        }
        for (i, name) in self.coords.iter().enumerate() {
            let mut chars = name.chars();
            let head_ok = chars
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
            if !head_ok || !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return fail(format!("coordinate {i} has invalid name `{name}`"));
            }
            if self.coords[..i].contains(name) {
                return fail(format!("duplicate coordinate name `{name}`"));
            }
        }
        for (l, row) in self.eta.iter().enumerate() {
            if row.len() != self.dim() {
                return fail(format!(
                    "eta_{} has {} components, dimension is {}",
                    l + 1,
                    row.len(),
                    self.dim()
                ));
            }
        }
        if let Some(eps) = self.epsilon {
            if eps != 1 && eps != -1 {
                return fail(format!("epsilon must be +1 or -1, got {eps}"));
            }
        }
        Ok(())
    }

    /// Evaluates the contact triple at a point, in any coefficient field.
    pub fn eta_jets<S: Scalar>(
        &self,
        point: &[Rational],
        order: u32,
    ) -> Result<[FormJet<S>; 3]> {
        assert_eq!(point.len(), self.dim());
        let mut forms = Vec::with_capacity(3);
        for row in &self.eta {
            let comps = row
                .iter()
                .map(|e| e.evaluate::<S>(&self.coords, point, order))
                .collect::<Result<Vec<_>>>()?;
            forms.push(FormJet::one_form(comps));
        }
        Ok(forms.try_into().expect("three forms"))
    }
}

/// Everything the structure determines pointwise, in one bundle.
///
/// All fields satisfy the exact identities listed on [`QcPointFrame::build`];
/// consumers may rely on them without re-checking.
pub struct QcPointFrame<S: Scalar> {
    pub n: usize,
    pub dim: usize,
    pub order: u32,
    pub point: Vec<Rational>,
    pub coords: Vec<String>,
    pub eta: [FormJet<S>; 3],
    pub deta: [FormJet<S>; 3],
    /// `contracted[l][m] = ι_{xi_l} dη_m`, cached for connection assembly.
    pub contracted: Vec<[FormJet<S>; 3]>,
    pub xi: [VectorJet<S>; 3],
    pub hframe: Vec<VectorJet<S>>,
    /// Frame metric `G_{ab} = g(X_a, X_b)`.
    pub metric: JetMatrix<S>,
    pub metric_inv: JetMatrix<S>,
    /// Frame matrices of the almost complex structures: `I_l X_a = Σ_b
    /// (J_l)_{ba} X_b`.
    pub jmats: [JetMatrix<S>; 3],
    /// `W_l = ½ dη_l` restricted to the horizontal frame.
    pub wmats: [JetMatrix<S>; 3],
    pub omega: [FormJet<S>; 3],
    pub big_omega: FormJet<S>,
    /// Inverse of the column basis `[X_1 .. X_{4n}, xi_1, xi_2, xi_3]`;
    /// row `a < 4n` is the coframe element dual to `X_a`, and the last
    /// three rows reproduce `eta` exactly.
    pub coframe: JetMatrix<S>,
}

impl<S: Scalar> std::fmt::Debug for QcPointFrame<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "QcPointFrame(n={}, dim={}, order={})",
            self.n, self.dim, self.order
        )
    }
}

/// Index arithmetic for cyclic triples `(i, j, k)`.
pub fn cyclic(i: usize) -> (usize, usize, usize) {
    (i, (i + 1) % 3, (i + 2) % 3)
}

impl<S: Scalar> QcPointFrame<S> {
    /// Runs the full construction at `point`.  `remix`, when given, is an
    /// invertible rational matrix that replaces the canonical kernel basis
    /// `X_a` by `X'_a = Σ_b R_{ba} X_b`; every derived scalar must be
    /// independent of this choice.
    pub fn build(
        chart: &QcChart,
        point: &[Rational],
        order: u32,
        remix: Option<&[Vec<Rational>]>,
    ) -> Result<Self> {
        chart.validate()?;
        let dim = chart.dim();
        let hdim = 4 * chart.n;
        assert_eq!(point.len(), dim, "sample point has wrong dimension");
        if order < 2 {
            return Err(Error::InsufficientJetOrder {
                order: order as u8,
                context: "frame construction needs jets of order >= 2".into(),
            });
        }

        let eta = chart.eta_jets::<S>(point, order)?;
        let deta = [eta[0].d()?, eta[1].d()?, eta[2].d()?];

        // Horizontal frame: exact kernel of the 3 x D coefficient matrix.
        // The columns are fed in reverse so that pivots prefer the trailing
        // coordinates; charts whose forms are `dt_l + (horizontal part)` then
        // get the natural kernel basis with a unit in each leading slot.
        let eta_matrix = JetMatrix::from_fn(3, dim, |l, mu| eta[l].component(1 << (dim - 1 - mu)));
        let kernel = eta_matrix.kernel_basis()?;
        if kernel.len() != hdim {
            return Err(Error::DegenerateStructure {
                context: format!(
                    "contact forms span rank {} instead of 3 at the sample point",
                    dim - kernel.len()
                ),
            });
        }
        let mut hframe: Vec<VectorJet<S>> = kernel
            .into_iter()
            .rev()
            .map(|v| {
                let mut comps = v;
                comps.reverse();
                VectorJet::new(comps)
            })
            .collect();
        if let Some(r) = remix {
            assert_eq!(r.len(), hdim, "remix matrix has wrong size");
            hframe = (0..hdim)
                .map(|a| {
                    let mut acc = VectorJet::zero(dim, order);
                    for (b, row) in r.iter().enumerate() {
                        acc = acc.add(&hframe[b].scale_scalar(&S::from_rational(&row[a])));
                    }
                    acc
                })
                .collect();
        }
        for (l, form) in eta.iter().enumerate() {
            for (a, x) in hframe.iter().enumerate() {
                if !form.evaluate(&[x]).is_zero() {
                    return Err(Error::InconsistentSystem {
                        witness: format!("kernel vector X_{} fails eta_{}", a + 1, l + 1),
                    });
                }
            }
        }

        // Reeb fields, one exactly-determined linear system each.
        let mut xi: Vec<VectorJet<S>> = Vec::with_capacity(3);
        for l in 0..3 {
            let contractions: Vec<FormJet<S>> =
                hframe.iter().map(|x| deta[l].interior(x)).collect();
            let system = JetMatrix::from_fn(3 + hdim, dim, |row, mu| {
                if row < 3 {
                    eta[row].component(1 << mu)
                } else {
                    // dη_l(xi, X_a) = -(ι_{X_a} dη_l)(xi) = 0
                    contractions[row - 3].component(1 << mu)
                }
            });
            let rhs = JetMatrix::from_fn(3 + hdim, 1, |row, _| {
                if row == l {
                    Jet::one(dim, order)
                } else {
                    Jet::zero(dim, order)
                }
            });
            let solution = system.solve(&rhs).map_err(|err| match err {
                Error::SingularValuePart { .. } => Error::DegenerateStructure {
                    context: format!("Reeb system for xi_{} is singular at the point", l + 1),
                },
                other => other,
            })?;
            xi.push(VectorJet::new(
                (0..dim).map(|mu| solution.get(mu, 0).clone()).collect(),
            ));
        }
        let xi: [VectorJet<S>; 3] = xi.try_into().expect("three Reeb fields");

        // Duality eta_m(xi_l) = δ_ml, and the mixed compatibility equations
        // that make the Reeb triple well-defined.  The first family is
        // enforced by the solve; both are re-verified exactly.
        for (m, form) in eta.iter().enumerate() {
            for (l, v) in xi.iter().enumerate() {
                let mut val = form.evaluate(&[v]);
                if m == l {
                    val = val.sub(&Jet::one(dim, val.order()));
                }
                if !val.is_zero() {
                    return Err(Error::InconsistentSystem {
                        witness: format!("eta_{}(xi_{}) != δ", m + 1, l + 1),
                    });
                }
            }
        }
        let contracted: Vec<[FormJet<S>; 3]> = xi
            .iter()
            .map(|v| [deta[0].interior(v), deta[1].interior(v), deta[2].interior(v)])
            .collect();
        for l in 0..3 {
            for k in (l + 1)..3 {
                let residual = contracted[l][k].add(&contracted[k][l]);
                for (a, x) in hframe.iter().enumerate() {
                    let val = residual.evaluate(&[x]);
                    if !val.is_zero() {
                        return Err(Error::NotQuaternionicContact {
                            witness: format!(
                                "dη_{}(xi_{}, X_{}) + dη_{}(xi_{}, X_{}) = {} at the sample point",
                                k + 1,
                                l + 1,
                                a + 1,
                                l + 1,
                                k + 1,
                                a + 1,
                                val.value()
                            ),
                        });
                    }
                }
            }
        }

        // Restricted 2-forms and the quaternionic structure.
        let wmats: [JetMatrix<S>; 3] = std::array::from_fn(|l| {
            FrameForm::pullback(&deta[l], &hframe)
                .to_matrix()
                .scale_scalar(&S::from_rational(&crate::ratjet::rat(1, 2)))
        });
        let (metric, jmats) = recover_quaternionic_structure(&wmats, hdim)?;
        let metric_inv = metric.invert().map_err(|_| Error::DegenerateStructure {
            context: "candidate metric is singular at the sample point".into(),
        })?;

        // Fundamental forms: 2ω_m = dη_m - Σ_l η_l ∧ (ι_{xi_l} dη_m)
        //                         + Σ_{l<p} dη_m(xi_l, xi_p) η_l ∧ η_p.
        let half = S::from_rational(&crate::ratjet::rat(1, 2));
        let mut omega: Vec<FormJet<S>> = Vec::with_capacity(3);
        for m in 0..3 {
            let mut two_omega = deta[m].clone();
            for l in 0..3 {
                two_omega = two_omega.sub(&eta[l].wedge(&contracted[l][m]));
            }
            for l in 0..3 {
                for p in (l + 1)..3 {
                    let coeff = contracted[l][m].evaluate(&[&xi[p]]);
                    two_omega = two_omega.add(&eta[l].wedge(&eta[p]).scale(&coeff));
                }
            }
            omega.push(two_omega.scale_scalar(&half));
        }
        let omega: [FormJet<S>; 3] = omega.try_into().expect("three fundamental forms");
        for (l, v) in xi.iter().enumerate() {
            for (m, form) in omega.iter().enumerate() {
                if !form.interior(v).is_zero() {
                    return Err(Error::ConstructionInvalid {
                        context: format!("ι_(xi_{})ω_{} != 0", l + 1, m + 1),
                    });
                }
            }
        }
        let big_omega = omega[0]
            .wedge(&omega[0])
            .add(&omega[1].wedge(&omega[1]))
            .add(&omega[2].wedge(&omega[2]));

        // Full-basis coframe; its last three rows must reproduce eta.
        let basis = JetMatrix::from_fn(dim, dim, |mu, col| {
            if col < hdim {
                hframe[col].component(mu).clone()
            } else {
                xi[col - hdim].component(mu).clone()
            }
        });
        let coframe = basis.invert().map_err(|_| Error::DegenerateStructure {
            context: "frame + Reeb basis is singular at the sample point".into(),
        })?;
        for m in 0..3 {
            for mu in 0..dim {
                let expected = eta[m].component(1 << mu).truncate(coframe.get(0, 0).order());
                if !coframe.get(hdim + m, mu).sub(&expected).is_zero() {
                    return Err(Error::InconsistentSystem {
                        witness: format!(
                            "coframe row {} does not reproduce eta_{}",
                            hdim + m,
                            m + 1
                        ),
                    });
                }
            }
        }

        Ok(QcPointFrame {
            n: chart.n,
            dim,
            order,
            point: point.to_vec(),
            coords: chart.coords.clone(),
            eta,
            deta,
            contracted,
            xi,
            hframe,
            metric,
            metric_inv,
            jmats,
            wmats,
            omega,
            big_omega,
            coframe,
        })
    }

    /// `dη_m(xi_j, xi_k)` as a jet.
    pub fn deta_on_reeb(&self, m: usize, j: usize, k: usize) -> Jet<S> {
        self.contracted[j][m].evaluate(&[&self.xi[k]])
    }

    /// The horizontal vector `I_l X_a` expanded in the frame.
    pub fn rotate_frame_vector(&self, l: usize, a: usize) -> VectorJet<S> {
        let mut acc = VectorJet::zero(self.dim, self.order);
        for b in 0..self.hframe.len() {
            acc = acc.add(&self.hframe[b].scale(self.jmats[l].get(b, a)));
        }
        acc
    }

    /// Expands an arbitrary vector in the adapted basis: returns the 4n
    /// horizontal coefficients and the 3 vertical ones.
    pub fn adapted_coefficients(&self, v: &VectorJet<S>) -> (Vec<Jet<S>>, Vec<Jet<S>>) {
        let hdim = self.hframe.len();
        let coeffs = self.coframe.apply(v.components());
        let (h, vert) = coeffs.split_at(hdim);
        (h.to_vec(), vert.to_vec())
    }

    /// Squared norm of a frame 2-tensor in the metric `G`, i.e.
    /// `tr(G^{-1} T G^{-1} T^t)`; frame-independent by construction.
    pub fn tensor_norm_sq(&self, tensor: &JetMatrix<S>) -> Jet<S> {
        self.metric_inv
            .matmul(tensor)
            .matmul(&self.metric_inv)
            .matmul(&tensor.transpose())
            .trace()
    }
}

/// Recovers `(G, [J_1, J_2, J_3])` from the three restricted 2-forms.
///
/// Candidates `K_1 = -W_2^{-1} W_3`, `K_2 = -W_3^{-1} W_1`, `K_3 =
/// -W_1^{-1} W_2` equal the true structures up to sign.  Exactly one of the
/// eight sign assignments satisfies `J_l^2 = -1`, `J_1 J_2 = J_3`,
/// `J_2 J_3 = J_1`, and makes `G_l := -J_l^T W_l` a single symmetric
/// matrix; over an ordered field that matrix must additionally be positive
/// definite.
fn recover_quaternionic_structure<S: Scalar>(
    wmats: &[JetMatrix<S>; 3],
    hdim: usize,
) -> Result<(JetMatrix<S>, [JetMatrix<S>; 3])> {
    let inverses: Vec<JetMatrix<S>> = wmats
        .iter()
        .enumerate()
        .map(|(l, w)| {
            w.invert().map_err(|_| Error::DegenerateStructure {
                context: format!("restricted 2-form W_{} is singular", l + 1),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let candidates = [
        inverses[1].matmul(&wmats[2]).neg(),
        inverses[2].matmul(&wmats[0]).neg(),
        inverses[0].matmul(&wmats[1]).neg(),
    ];
    let jet_dim = wmats[0].jet_dim();
    let order = wmats[0].get(0, 0).order();
    let identity = JetMatrix::identity(hdim, jet_dim, order);

    // Every matrix product the eight sign assignments need, computed once:
    // writing J_l = σ_l K_l with σ_l ∈ {±1},
    //   J_l²    = K_l²                  (sign-independent),
    //   J_1 J_2 = J_3  ⟺  K_1 K_2 = σ_1σ_2σ_3 K_3,
    //   J_2 J_3 = J_1  ⟺  K_2 K_3 = σ_1σ_2σ_3 K_1,
    //   G_l     = -J_l^T W_l = σ_l Ĝ_l  with  Ĝ_l = -K_l^T W_l.
    if !(0..3).all(|l| candidates[l].matmul(&candidates[l]).add(&identity).is_zero()) {
        return Err(Error::NotQuaternionCompatible {
            context: "a ratio of restricted 2-forms fails to square to -1".into(),
        });
    }
    let k12 = candidates[0].matmul(&candidates[1]);
    let k23 = candidates[1].matmul(&candidates[2]);
    let ghat: [JetMatrix<S>; 3] =
        std::array::from_fn(|l| candidates[l].transpose().matmul(&wmats[l]).neg());

    let mut found: Option<(JetMatrix<S>, [JetMatrix<S>; 3])> = None;
    for signs in 0..8u32 {
        let sign = |l: usize| -> bool { signs & (1 << l) != 0 };
        let with_sign = |m: &JetMatrix<S>, flip: bool| if flip { m.neg() } else { m.clone() };
        let odd = sign(0) ^ sign(1) ^ sign(2);
        if !k12.sub(&with_sign(&candidates[2], odd)).is_zero() {
            continue;
        }
        if !k23.sub(&with_sign(&candidates[0], odd)).is_zero() {
            continue;
        }
        let metrics: [JetMatrix<S>; 3] = std::array::from_fn(|l| with_sign(&ghat[l], sign(l)));
        if !metrics[0].sub(&metrics[1]).is_zero() || !metrics[0].sub(&metrics[2]).is_zero() {
            continue;
        }
        let g = metrics[0].clone();
        if !g.sub(&g.transpose()).is_zero() {
            continue;
        }
        // Positive definiteness, decidable only over an ordered field.
        if let Some(signature) = symmetric_signature(&g.value_matrix()) {
            if signature != (hdim, 0, 0) {
                continue;
            }
        }
        if found.is_some() {
            return Err(Error::NotQuaternionCompatible {
                context: "multiple sign assignments satisfy the quaternion relations".into(),
            });
        }
        found = Some((g, std::array::from_fn(|l| with_sign(&candidates[l], sign(l)))));
    }
    found.ok_or_else(|| Error::NotQuaternionCompatible {
        context: "no sign assignment yields a quaternionic structure with a common metric"
            .into(),
    })
}
