//! Classical analogs of quantum purity and entanglement entropy for linear
//! (and weakly anharmonic) oscillator systems.
//!
//! A classical state is the uniform measure on an invariant torus. Averaging
//! the phase-space map over the angles gives a covariance matrix from which
//! purity, linear entropy and a von Neumann entropy analog follow. The
//! [`quantum`] module holds the Gaussian ground-state closed forms used for
//! cross-checks, and [`anharmonic`] compares perturbation series with a
//! numerical time-average oracle.
// NaN must fail the positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analogs;
pub mod anharmonic;
pub mod covariance;
pub mod error;
pub mod models;
pub mod numeric;
mod par;
pub mod quadrature;
pub mod quantum;
pub mod symplectic;
pub mod types;

pub use analogs::{
    classical_purity, classical_purity_tilde, entropy_kernel, linear_entropy_tilde, report,
    report_all, von_neumann_tilde, EntanglementReport,
};
pub use covariance::{
    covariance_by_quadrature, covariance_normal_form, phase_space_map, subsystem_covariance,
};
pub use error::{Error, Result};
pub use quadrature::{classical_average, FnTorus, McEstimate, TorusFunction};
pub use quantum::HBar;
pub use symplectic::{symplectic_form, williamson_eigenvalues};
pub use types::{
    CovarianceMatrix, NormalModeSystem, PerturbationSeries, QuadratureConfig, QuadratureMethod,
    SubsystemSelector, SymplecticSpectrum, TorusSpec,
};

/// True when the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    par::is_parallel()
}
