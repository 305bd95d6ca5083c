//! Projectors, density matrices and observables with their construction
//! invariants enforced up front.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::eig::hermitian_eigensystem;
use crate::hilbert::matrix::{ComplexMatrix, Ket};
use crate::hilbert::{inner, ket_norm, HERMITICITY_TOL};

const IDEMPOTENCY_TOL: f64 = 1e-9;
const RANK_FRACTION_TOL: f64 = 1e-6;
const PSD_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;
const SPECTRUM_TOL: f64 = 1e-8;

/// A quantum event: a Hermitian idempotent matrix. `rank` is the dimension
/// of its range, recovered by rounding the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ComplexMatrix", try_from = "ComplexMatrix")]
pub struct Projector {
    matrix: ComplexMatrix,
    rank: usize,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let idem = matrix.matmul(&matrix).max_abs_diff(&matrix);
        if idem > IDEMPOTENCY_TOL {
            return Err(Error::NotIdempotent { defect: idem });
        }
        let trace = matrix.trace().re;
        let rank = trace.round();
        if (trace - rank).abs() > RANK_FRACTION_TOL || rank < 0.0 || rank > matrix.dim() as f64 {
            return Err(Error::FractionalRank { trace });
        }
        Ok(Projector { matrix, rank: rank as usize })
    }

    /// The empty event.
    pub fn zero(dim: usize) -> Self {
        Projector { matrix: ComplexMatrix::zeros(dim), rank: 0 }
    }

    /// The certain event.
    pub fn identity(dim: usize) -> Self {
        Projector { matrix: ComplexMatrix::identity(dim), rank: dim }
    }

    /// Rank-1 projector `|k><k|` onto a single ket.
    pub fn onto_ket(ket: &Ket) -> Result<Self> {
        Self::from_kets(std::slice::from_ref(ket))
    }

    /// Projector onto the span of the given kets. Each ket must be normalized
    /// and the set linearly independent; the offending index is reported
    /// otherwise.
    pub fn from_kets(kets: &[Ket]) -> Result<Self> {
        let dim = match kets.first() {
            Some(k) => k.len(),
            None => return Err(Error::DependentKet { index: 0 }),
        };
        let mut ortho: Vec<Ket> = Vec::with_capacity(kets.len());
        for (index, ket) in kets.iter().enumerate() {
            if ket.len() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: ket.len() });
            }
            let norm = ket_norm(ket);
            if (norm - 1.0).abs() > HERMITICITY_TOL {
                return Err(Error::KetNotNormalized { index, norm });
            }
            let mut v = ket.clone();
            for _ in 0..2 {
                for b in &ortho {
                    let c = inner(b, &v);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= c * bi;
                    }
                }
            }
            let residual = ket_norm(&v);
            if residual < 1e-8 {
                return Err(Error::DependentKet { index });
            }
            for z in v.iter_mut() {
                *z /= residual;
            }
            ortho.push(v);
        }
        let mut matrix = ComplexMatrix::zeros(dim);
        for v in &ortho {
            matrix = matrix.add(&ComplexMatrix::outer(v, v));
        }
        Self::new(matrix)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `1 - P`, the complementary event.
    pub fn complement(&self) -> Projector {
        Projector {
            matrix: ComplexMatrix::identity(self.dim()).sub(&self.matrix),
            rank: self.dim() - self.rank,
        }
    }

    pub fn commutes_with(&self, other: &Projector, tol: f64) -> bool {
        self.matrix.commutator_norm(&other.matrix) <= tol
    }

    pub fn is_orthogonal_to(&self, other: &Projector, tol: f64) -> bool {
        self.matrix.matmul(&other.matrix).max_abs() <= tol
    }

    /// Orthonormal basis of the range (eigenvectors with eigenvalue 1).
    pub fn range_basis(&self) -> Result<Vec<Ket>> {
        let sys = hermitian_eigensystem(&self.matrix)?;
        Ok(sys
            .values
            .iter()
            .zip(sys.vectors)
            .filter(|(v, _)| **v > 0.5)
            .map(|(_, k)| k)
            .collect())
    }
}

impl From<Projector> for ComplexMatrix {
    fn from(p: Projector) -> Self {
        p.matrix
    }
}

impl TryFrom<ComplexMatrix> for Projector {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Projector::new(m)
    }
}

/// A quantum state: Hermitian, positive semidefinite, trace one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ComplexMatrix", try_from = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let sys = hermitian_eigensystem(&matrix)?;
        let min = sys.values.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(DensityMatrix { matrix })
    }

    /// Pure state `|k><k|`.
    pub fn pure(ket: &Ket) -> Result<Self> {
        let norm = ket_norm(ket);
        if (norm - 1.0).abs() > HERMITICITY_TOL {
            return Err(Error::KetNotNormalized { index: 0, norm });
        }
        Ok(DensityMatrix { matrix: ComplexMatrix::outer(ket, ket) })
    }

    /// `1/d`, the state of complete ignorance.
    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    /// Mixture `sum_i w_i |k_i><k_i|` of orthonormal kets with weights
    /// summing to one.
    pub fn mixture(weights: &[f64], kets: &[Ket]) -> Result<Self> {
        if weights.len() != kets.len() {
            return Err(Error::DimensionMismatch { left: weights.len(), right: kets.len() });
        }
        let dim = kets.first().map(|k| k.len()).unwrap_or(0);
        let mut m = ComplexMatrix::zeros(dim);
        for (w, k) in weights.iter().zip(kets) {
            m = m.add(&ComplexMatrix::outer(k, k).scale_re(*w));
        }
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(r: DensityMatrix) -> Self {
        r.matrix
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityMatrix::new(m)
    }
}

/// A Hermitian observable with its spectral decomposition
/// `O = sum_i lambda_i P_i` (eigenvalues ascending, projectors mutually
/// orthogonal and complete).
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: ComplexMatrix,
    spectrum: Vec<(f64, Projector)>,
}

impl Observable {
    pub fn from_spectrum(mut spectrum: Vec<(f64, Projector)>) -> Result<Self> {
        if spectrum.is_empty() {
            return Err(Error::InvalidSpectrum { detail: "empty spectrum".into() });
        }
        let dim = spectrum[0].1.dim();
        for (i, (_, p)) in spectrum.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: p.dim() });
            }
            for (_, q) in spectrum.iter().skip(i + 1) {
                if p.matrix().matmul(q.matrix()).max_abs() > SPECTRUM_TOL {
                    return Err(Error::InvalidSpectrum {
                        detail: "spectral projectors are not mutually orthogonal".into(),
                    });
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(dim);
        for (_, p) in &spectrum {
            sum = sum.add(p.matrix());
        }
        if sum.max_abs_diff(&ComplexMatrix::identity(dim)) > SPECTRUM_TOL {
            return Err(Error::InvalidSpectrum {
                detail: "spectral projectors do not sum to the identity".into(),
            });
        }
        spectrum.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut matrix = ComplexMatrix::zeros(dim);
        for (lambda, p) in &spectrum {
            matrix = matrix.add(&p.matrix().scale_re(*lambda));
        }
        Ok(Observable { matrix, spectrum })
    }

    /// Spectral decomposition of a Hermitian matrix, grouping eigenvalues
    /// that agree to within `1e-8` into a single eigenprojector.
    pub fn from_matrix(matrix: &ComplexMatrix) -> Result<Self> {
        let sys = hermitian_eigensystem(matrix)?;
        let scale = sys.values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let mut spectrum: Vec<(f64, Projector)> = Vec::new();
        let mut i = 0;
        while i < sys.values.len() {
            let mut j = i + 1;
            while j < sys.values.len() && sys.values[j] - sys.values[j - 1] <= SPECTRUM_TOL * scale {
                j += 1;
            }
            let lambda = sys.values[i..j].iter().sum::<f64>() / (j - i) as f64;
            let mut m = ComplexMatrix::zeros(matrix.dim());
            for v in &sys.vectors[i..j] {
                m = m.add(&ComplexMatrix::outer(v, v));
            }
            spectrum.push((lambda, Projector::new(m)?));
            i = j;
        }
        Self::from_spectrum(spectrum)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> &[(f64, Projector)] {
        &self.spectrum
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        self.spectrum.iter().map(|(l, _)| *l)
    }
}
