//! Joint-measurement complementarity relations for an EPR-type experiment on
//! two polarisation qubits.
//!
//! The crate simulates a joint estimate of the `X` and `Y` polarisations of
//! one qubit: `X` is estimated from a measurement of an arbitrary binary
//! observable `W` on an entangled partner, `Y` is measured directly after a
//! semiweak probe of `X`. From the probe's statistics the inaccuracy of any
//! estimate `X_est = f(W)` can be reconstructed without knowing `f`, `W` or
//! the state. The reconstructed inaccuracies and spreads feed four
//! complementarity relations (Arthurs–Kelly, Hall, Ozawa and a mixed-spread
//! relation), which are evaluated for simulated and for measured data.
//!
//! Module map:
//!
//! * [`qcore`]: Hermitian operators, density matrices, tensor products,
//!   expectations and spreads.
//! * [`scenario`]: the source state, the semiweak glass-slide probe and the
//!   predicted joint outcome table `p(m, y, w)`.
//! * [`estimate`]: simple and optimal estimators, Margenau–Hill
//!   reconstruction and inaccuracies.
//! * [`relations`]: the four relations, the proof-chain check, the strength
//!   ordering and the measurement–disturbance relation.
//! * [`oracle`]: brute-force ground truth on the full (dilated) Hilbert space.
//! * [`dataio`]: CSV/JSON formats for distributions, states and reports.
//! * [`experiment`] and [`verify`]: end-to-end pipelines used by the CLI.
//!
//! A longer narrative lives in the `book/` directory of the repository; its
//! code listings are compiled and run as doc-tests of this crate.

#![forbid(unsafe_code)]

pub mod dataio;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod oracle;
pub mod qcore;
pub mod random;
pub mod relations;
pub mod scenario;
pub mod tolerance;
pub mod verify;

pub use error::{Error, Result};
pub use estimate::{Estimator, EstimatorKind, Inaccuracy, QuasiDistribution};
pub use qcore::{BlochObservable, ComplexMatrix, DensityMatrix, HermitianOperator, Pauli};
pub use relations::RelationReport;
pub use scenario::{JointDistribution, Outcome, SemiweakSlide, SlideOutcome};
pub use tolerance::Tolerances;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/primitives.md")]
    mod primitives {}
    #[doc = include_str!("../../../book/src/semiweak.md")]
    mod semiweak {}
    #[doc = include_str!("../../../book/src/inaccuracy.md")]
    mod inaccuracy {}
    #[doc = include_str!("../../../book/src/relations.md")]
    mod relations {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/data.md")]
    mod data {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
