//! Energy-penalty error suppression for Hamiltonian quantum computing,
//! probed numerically under Markovian open-system dynamics.
//!
//! The crate builds stabilizer-encoded Hamiltonians `H = H_bar + eta_p H_p`,
//! assembles Markovian generators (Lindblad form with optional Lamb shift,
//! and the non-RWA double-sided form), and evaluates the initial excitation
//! rate out of the ground subspace both in closed form and by brute-force
//! propagation, together with the polynomial and exponential suppression
//! bounds that govern how the rate falls with the penalty strength.
//!
//! Start from the runnable examples (`cargo run --example encoded_rate`) or
//! the bundled experiment configs under `experiments/` driven by the
//! `penalty-lab` binary.

pub mod analysis;
pub mod bath;
pub mod cli;
pub mod codes;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod generators;
pub mod operators;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector.
pub type CVector = nalgebra::DVector<C64>;
/// Dense real matrix (coupling matrices).
pub type RMatrix = nalgebra::DMatrix<f64>;

pub mod prelude {
    pub use crate::analysis::{
        excitation_rate, penalty_sweep, pure_state_rate_check, rate_bounds, size_scaling_sweep,
        subspace_leak_rate, RateReport, RateSystem,
    };
    pub use crate::bath::BathSpec;
    pub use crate::codes::{
        codespace_projector, detects, encode_logical, penalty_hamiltonian, EncodedSystem,
        LogicalTerm, StabilizerCode,
    };
    pub use crate::dynamics::{
        finite_difference_rate, projector_derivative_check, propagate, Trajectory,
    };
    pub use crate::generators::{
        build_dsame, build_lindblad, decompose_interaction, InteractionSet, Liouvillian,
    };
    pub use crate::operators::{
        pauli_matrix, spectral_decompose, spectral_decompose_default, Operator, PauliLetter,
        PauliString, SpectralDecomposition,
    };
    pub use crate::{C64, CMatrix, CVector, Error, RMatrix, Result};
}
