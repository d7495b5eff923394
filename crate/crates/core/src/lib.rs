//! Positivity calculus for moment sequences, finitely-atomic measures on the
//! nonnegative half-line, and operator-class certificates for unilateral
//! weighted shifts.
//!
//! The crate is organized in five layers:
//!
//! - [`moment`] — Hankel sections, positive-definite / Stieltjes /
//!   conditionally-positive-definite tests, finite differences, and the
//!   kernel polynomials `Q_n`.
//! - [`measure`] — atomic measures: moments, integration, pushforward and
//!   reweighting transforms, and quadrature recovery from moments.
//! - [`shift`] — weighted-shift models and per-class verdicts (subnormal,
//!   quasinormal, normal, CPD, normaloid, m-isometry).
//! - [`triplet`] — per-vector representing triplets `(b, c, F)`, the
//!   subnormality certificate, Berger measures, and the power-transform law.
//! - [`roots`] — nth-root theorem harnesses, the two example families, the
//!   scaling search, and the randomized corpus.
//!
//! Every verdict is a finite certificate: `Refuted` carries an explicit
//! witness, `ConsistentUpTo` records how far the search went and never
//! claims a proof. [`acceptance`] bundles the end-to-end checks used by the
//! CLI selftest and the integration suite.

pub mod acceptance;
pub mod error;
pub mod linalg;
pub mod measure;
pub mod moment;
pub mod roots;
pub mod shift;
pub mod tol;
pub mod triplet;

pub use error::{Error, Result};
pub use measure::{recover_measure, AtomicMeasure};
pub use moment::{
    finite_difference, hankel, is_cpd, is_pd, is_stieltjes, q_poly, second_difference,
    MomentSequence, PositivityStatus, PositivityVerdict, QuadraticWitness,
};
pub use roots::{
    cpd_scaling_witness, random_corpus, stampfli_family, three_isometry_family,
    verify_root_3isometry, verify_root_normal, verify_root_quasinormal, verify_root_subnormal,
    EvidenceStatus, RootEvidence, RootParams, RootTheorem,
};
pub use shift::{
    classify_all, classify_cpd, classify_m_isometry, classify_normal, classify_normaloid,
    classify_quasinormal, classify_subnormal, ClassReport, ClassStatus, ClassVerdict,
    ClassifyParams, ShiftSpec, WeightedShift,
};
pub use tol::ToleranceConfig;
pub use triplet::{
    b_n_identity_check, berger_measure, power_transform, reconstruct_moments, recover_triplet,
    shift_quasinormal_certificate, subnormality_certificate, ScalarTriplet,
    SubnormalityCertificate,
};
