//! Classical toolkit for interacting mesonic wave packets in 1+1-dimensional
//! Z2 and U(1) lattice gauge theories with staggered fermions.
//!
//! The crate covers the full desk-scale pipeline:
//!
//! * [`model`] — lattice definition, Gauss-law physical basis, Hamiltonian,
//!   translation symmetry and momentum sectors;
//! * [`ops`] — exact operator algebra (Jordan-Wigner fermions, link
//!   operators) shared by Hamiltonians and creation operators;
//! * [`spectra`] — dense exact diagonalization, momentum eigenstates,
//!   fidelities and mesonic/non-mesonic classification;
//! * [`ansatz`] — interacting meson creation operators, wave-packet
//!   assembly and parameter optimization;
//! * [`circuit`] — gate-level synthesis of the ground-state and
//!   wave-packet preparation circuits with exact CNOT accounting;
//! * [`simulate`] — statevector execution, finite-shot sampling,
//!   symmetry-based mitigation and a depolarizing noise channel;
//! * [`stats`] — staggered density, truncation metrics, rms shot error and
//!   bootstrap uncertainties.

pub mod ansatz;
pub mod circuit;
pub mod model;
pub mod ops;
pub mod optimize;
pub mod simulate;
pub mod spectra;
pub mod stats;

use num_complex::Complex64;

/// Dense complex matrix used throughout (physical-space dimensions are tiny).
pub type CMat = nalgebra::DMatrix<Complex64>;
/// Dense complex vector over a physical basis or qubit register.
pub type CVec = nalgebra::DVector<Complex64>;

pub const I1: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator maps a physical state outside the physical space")]
    LeftPhysicalSpace,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("momentum {0} is not on the Brillouin-zone grid")]
    OffGridMomentum(f64),
    #[error("momentum sector is empty")]
    EmptySector,
    #[error("state norm deviates from 1 by more than the tolerance ({0:e})")]
    NotNormalized(f64),
    #[error("state or operator application has zero norm")]
    ZeroNorm,
    #[error("config parse error: {0}")]
    Config(String),
    #[error("coefficient table is empty after truncation at theta_c = {0}")]
    EmptyTable(f64),
    #[error("no events survive mitigation")]
    EmptyEvents,
    #[error("probability vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("qubit layout mismatch: {0}")]
    Layout(String),
    #[error("classification ambiguous: overlaps differ by less than {0:e}")]
    AmbiguousClassification(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
