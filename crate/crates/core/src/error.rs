use thiserror::Error;

use crate::core_solver::CoreResult;

/// Errors for construction and interrogation of measures, operators and cores.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("not Hermitian (symmetry defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("not idempotent (defect {defect:.3e})")]
    NotIdempotent { defect: f64 },

    #[error("projector trace {trace} is not an admissible integer rank")]
    FractionalRank { trace: f64 },

    #[error("not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("ket {index} is not normalized (norm {norm})")]
    KetNotNormalized { index: usize, norm: f64 },

    #[error("ket {index} is linearly dependent on the preceding kets")]
    DependentKet { index: usize },

    #[error("vectors {i} and {j} are not orthonormal")]
    NotOrthonormal { i: usize, j: usize },

    #[error("invalid spectral decomposition: {detail}")]
    InvalidSpectrum { detail: String },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("interval [{lo}, {hi}] is not a probability interval")]
    NotProbabilityInterval { lo: f64, hi: f64 },

    #[error("event closure exceeded the cap of {cap} members (reached {reached})")]
    ClosureCapExceeded { reached: usize, cap: usize },

    #[error("projectors {i} and {j} do not commute")]
    NonCommutingPair { i: usize, j: usize },

    #[error("simultaneous diagonalization failed after {attempts} attempts")]
    DiagonalizationFailed { attempts: usize },

    #[error("event space is not closed: {detail}")]
    SpaceNotClosed { detail: String },

    #[error("duplicate projectors at indices {i} and {j}")]
    DuplicateProjector { i: usize, j: usize },

    #[error("assignment is not total: space has {expected} members, got {got}")]
    AssignmentNotTotal { expected: usize, got: usize },

    #[error("assignment at the {which} event must be sharp (got [{lo}, {hi}])")]
    BadBoundaryAssignment { which: &'static str, lo: f64, hi: f64 },

    #[error("projector {index} of the subspace is not a member of the measure's space")]
    ProjectorNotInSpace { index: usize },

    #[error("interval at member {index} has nonzero width; a sharp measure is required")]
    NotSharp { index: usize },

    #[error("count record {index} totals {got}, expected {expected}")]
    InconsistentTotals { index: usize, expected: u64, got: u64 },

    #[error("count record {index} is inconsistent with its complement's record")]
    ComplementMismatch { index: usize },

    #[error("count record {index} has zero total")]
    EmptyRecord { index: usize },

    #[error("delta = {delta} must be below 1/3 for rounding")]
    DeltaTooLarge { delta: f64 },

    #[error("measure is not {delta}-deterministic (member {index})")]
    NotDeltaDeterministic { delta: f64, index: usize },

    #[error("grid step {step} must lie in (0, 0.1]")]
    InvalidStep { step: f64 },

    #[error("clamp width {width} must lie in [0, 1]")]
    InvalidWidth { width: f64 },

    #[error("invalid table map: {detail}")]
    InvalidTable { detail: String },

    #[error("triple ({0}, {1}, {2}) does not violate the ultramodularity inclusion", .triple[0], .triple[1], .triple[2])]
    TripleNotViolating { triple: [f64; 3] },

    #[error("core is unavailable: {0:?}", .result.status)]
    CoreUnavailable { result: Box<CoreResult> },

    #[error("measure fails validation with {violations} violation(s)")]
    MeasureInvalid { violations: usize },

    #[error("dimension {dim} is not supported here (expected {expected})")]
    UnsupportedDimension { dim: usize, expected: usize },

    #[error("delta = {delta} >= 1/3 admits a witness; no refutation exists")]
    DeltaNotRefutable { delta: f64 },

    #[error("grid value {value} lies outside [0, 1]")]
    InvalidGrid { value: f64 },

    #[error("internal integrity failure: {detail}")]
    Integrity { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
