//! Kernel-based conditional mean dependence (KCMD) estimation and testing.
//!
//! KCMD measures how strongly the conditional mean of a response `Y` depends
//! on a predictor `X`, where both may live in separable Hilbert spaces:
//! finite-dimensional vectors or curves discretized on a grid. It is the
//! squared Hilbert-Schmidt norm of `E(Y ⊗ K(X,·)) − E(Y) ⊗ E(K(X,·))` for a
//! reproducing kernel `K`; with a characteristic kernel it vanishes exactly
//! when `E(Y|X) = E(Y)` almost surely.
//!
//! The crate provides:
//!
//! - the naive plug-in estimator, a weighted variant whose studentized form
//!   is asymptotically standard normal under conditional mean independence,
//!   and the unbiased U-statistic estimator ([`estimators`]);
//! - the one-sided asymptotic test built on the weighted estimator
//!   ([`inference`]);
//! - weight families with certified regularity constants ([`weights`]);
//! - plug-in diagnostics for the limiting variance ([`diagnostics`]);
//! - seeded scenario generators and a deterministic parallel Monte Carlo
//!   driver ([`simulate`]);
//! - dataset manifests and run configuration ([`io`]).
//!
//! All estimators consume a [`kernels::GramPair`] and run in O(n²); the
//! vector/curve distinction disappears past Gram construction.

pub mod diagnostics;
pub mod error;
pub mod estimators;
pub mod hilbert;
pub mod inference;
pub mod io;
pub mod kernels;
mod numeric;
pub mod simulate;
pub mod weights;

pub use error::{Error, Result};
pub use estimators::EstimateBundle;
pub use hilbert::{Grid, HilbertPoint, Sample};
pub use inference::{run_test, TestResult};
pub use kernels::{GramPair, KernelChoice, KernelSpec};
pub use simulate::{monte_carlo, MonteCarloReport, Scenario, ScenarioKind};
pub use weights::{WeightCertificate, WeightFamily};
