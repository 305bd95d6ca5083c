//! Interval-valued probability measures on finite-dimensional Hilbert
//! spaces.
//!
//! Instead of assigning each quantum event (projector) a single number,
//! a measure here assigns a closed interval `[lo, hi]` recording how
//! precisely an experiment pins the probability down. The crate provides:
//!
//! - [`interval`]: closed-interval arithmetic and the inclusion order;
//! - [`hilbert`]: dense complex operators, a Jacobi eigensolver, tensor
//!   products and the Born rule;
//! - [`events`]: finite event spaces closed under complements and
//!   commuting products, with simultaneous diagonalization;
//! - [`qivpm`]: the measures themselves — axiom validation,
//!   delta-determinism, count-based and map-composed constructors,
//!   ultramodularity checks;
//! - [`core_solver`]: Dykstra-based feasibility over density matrices
//!   (which states are consistent with a measure?), expectation intervals,
//!   and the width-to-distance bound for blurred Born measures;
//! - [`contextuality`]: the two-qubit parity square, the exhaustive
//!   refutation of near-determinate measures below `delta = 1/3`, and the
//!   sweep around that transition.
//!
//! Everything is deterministic: the solvers draw randomness from explicit
//! 64-bit seeds, and generated event spaces keep insertion order.

pub mod contextuality;
pub mod core_solver;
mod error;
pub mod events;
pub mod hilbert;
pub mod interval;
pub mod qivpm;

pub use error::{Error, Result};

pub use contextuality::{
    build_magic_square, count_parity_assignments, delta_sweep, ks_search,
    refute_delta_deterministic, witness_delta_deterministic, MagicSquare, RefutationReport,
    SweepResult, SweepRow,
};
pub use core_solver::{
    analytic_empty_check, commuting_core_witness, expectation_interval, find_core_member,
    gleason_bound_check, project_to_states, CoreQuery, CoreResult, CoreStatus, GleasonReport,
    SolverParams,
};
pub use events::{complete_basis, EventSpace};
pub use hilbert::{
    born_probability, expectation, hermitian_eigensystem, spectral_norm, tensor, ComplexMatrix,
    DensityMatrix, EigenSystem, Ket, Observable, Projector,
};
pub use interval::{Interval, DEFAULT_TOL};
pub use qivpm::{
    ultramodular_check, ultramodular_counterexample, CountRecord, IntervalMap, Qivpm, Rule,
    Subject, ValidationReport, Violation,
};
