//! Exact-arithmetic verification engine for quaternionic contact geometry.
//!
//! A quaternionic contact structure on a `(4n+3)`-manifold is a corank-3
//! distribution `H` carried by a triple of 1-forms `eta = (eta_1, eta_2,
//! eta_3)` whose restricted differentials are the fundamental 2-forms of a
//! quaternion-Hermitian metric on `H`.  Everything this crate derives from a
//! chart — Reeb fields, the sp(1) connection 1-forms, the normalized scalar
//! curvature, Ricci-type 2-forms, the two symmetric torsion tensors, and the
//! metric cone — is computed in exact rational arithmetic on truncated Taylor
//! expansions (jets) at randomly sampled rational points, so every reported
//! "zero" is an algebraic identity of the jet and not a numerical artifact.
//!
//! The crate is layered bottom-up:
//!
//! * [`ratjet`]: exact scalars (arbitrary-precision rationals and a fixed
//!   prime field used for prescreening), truncated multivariate jets, a tiny
//!   expression language for chart data, and jet-valued linear algebra;
//! * [`exterior`]: differential forms and vector fields with jet
//!   coefficients — wedge, exterior derivative, interior product, Lie
//!   derivative, Lie bracket, and pullback onto a frame;
//! * [`qcframe`]: from a chart to a validated point frame — Reeb fields, a
//!   horizontal frame, the metric and the three almost complex structures,
//!   and the fundamental forms;
//! * [`biquard`]: the canonical connection data — sp(1) connection 1-forms,
//!   normalized scalar curvature, Ricci-type 2-forms, and the torsion
//!   tensors computed along two independent routes;
//! * [`cone`]: the metric cone with its fundamental 4-form and the
//!   hyperkähler / Sasakian checks;
//! * [`atlas`]: built-in example charts, conformal deformation, and chart
//!   (de)serialization;
//! * [`suite`] and [`report`]: named identity checks bundled into suites and
//!   serialized into deterministic JSON reports.

pub mod atlas;
pub mod biquard;
pub mod cone;
mod error;
pub mod exterior;
pub mod qcframe;
pub mod ratjet;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
