//! Dissipative quasi-local stabilization of multipartite pure states.
//!
//! The crate decides whether a target pure state on a finite-dimensional
//! multipartite system can be made the unique attractive fixed point of a
//! purely dissipative Lindblad evolution whose noise operators each act on a
//! single prescribed neighborhood of subsystems. When it can, the crate
//! builds the stabilizing noise operators, a frustration-free parent
//! Hamiltonian, and certifies the resulting dynamics either spectrally or by
//! simulation, including a cyclically switched implementation.
//!
//! Module map:
//!
//! * [`tensor`] - tensor-product spaces, states, partial traces, embeddings.
//! * [`subspace`] - toleranced supports, complements and intersections.
//! * [`analysis`] - the stabilizability decision and parent Hamiltonians.
//! * [`synthesis`] - explicit neighborhood-local noise operators.
//! * [`dynamics`] - Lindblad generators, spectra, integration, switching.
//! * [`instance`], [`matrix_io`], [`cli`] - file formats and the command line.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod instance;
pub mod linalg;
pub mod matrix_io;
pub mod random;
pub mod subspace;
pub mod synthesis;
pub mod tensor;

pub use analysis::{
    check_dqls, factorization_prereduction, is_frustration_free, parent_hamiltonian, DqlsReport,
    NeighborhoodAnalysis, ParentHamiltonian,
};
pub use dynamics::{
    apply_generator, check_invariance, evolve, fme_generator, gas_certificate, simulate_switched,
    switched_map, vectorize, GasCertificate, InvarianceReport, LindbladGenerator, SpectrumReport,
    SwitchingSchedule, Trajectory,
};
pub use error::{DqlsError, Result};
pub use linalg::{CMatrix, CVector};
pub use subspace::Subspace;
pub use synthesis::{
    renormalize_generator, synthesize_block, synthesize_stabilizers, GainsPolicy, StabilizerSet,
};
pub use tensor::{
    apply_local_unitary, embed, make_ghz, make_graph_state, make_psi_t, make_w, partial_trace,
    DensityMatrix, LocalityPattern, Neighborhood, PureState, QLOperator, TensorSpace,
};

/// Numerical tolerances. All are absolute unless stated otherwise.
pub mod tol {
    /// State normalization and density-matrix trace.
    pub const NORM: f64 = 1e-9;
    /// Hermiticity and unitarity checks.
    pub const HERM: f64 = 1e-9;
    /// Smallest admissible eigenvalue of a density matrix is `-PSD`.
    pub const PSD: f64 = 1e-9;
    /// Orthonormality of subspace frames and projector comparisons.
    pub const ORTH: f64 = 1e-9;
    /// Eigenvalue cutoff of the intersection operator.
    pub const INTERSECT: f64 = 1e-8;
    /// Zero / nonzero classification of eigenvalues.
    pub const EIG: f64 = 1e-8;
    /// Default relative support threshold (fraction of the largest eigenvalue).
    pub const SUPPORT: f64 = 1e-10;
    /// Borderline diagnostics cover values within this factor of a cutoff.
    pub const BORDERLINE_FACTOR: f64 = 100.0;
}
