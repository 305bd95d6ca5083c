//! Dense complex Hermitian linear algebra for small Hilbert spaces:
//! kets, projectors, density matrices, observables, eigensystems, tensor
//! products and the Born rule.

mod eig;
mod matrix;
mod operators;

pub use eig::{hermitian_eigensystem, spectral_norm, EigenSystem};
pub use matrix::{ComplexMatrix, Ket};
pub use num_complex::Complex64;
pub use operators::{DensityMatrix, Observable, Projector};

use crate::error::{Error, Result};

/// Tolerance below which a matrix counts as Hermitian (and a ket as
/// normalized).
pub const HERMITICITY_TOL: f64 = 1e-9;

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner(a: &Ket, b: &Ket) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn ket_norm(k: &Ket) -> f64 {
    k.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// The computational basis ket `|i>` in dimension `dim`.
pub fn basis_ket(dim: usize, i: usize) -> Ket {
    let mut k = vec![Complex64::new(0.0, 0.0); dim];
    k[i] = Complex64::new(1.0, 0.0);
    k
}

/// Normalized superposition of computational basis kets with real weights,
/// e.g. `superposition(3, &[(0, 1.0), (1, 1.0)])` for `(|0> + |1>)/sqrt(2)`.
pub fn superposition(dim: usize, weights: &[(usize, f64)]) -> Ket {
    let mut k = vec![Complex64::new(0.0, 0.0); dim];
    for &(i, w) in weights {
        k[i] += Complex64::new(w, 0.0);
    }
    let n = ket_norm(&k);
    for z in k.iter_mut() {
        *z /= n;
    }
    k
}

/// Kronecker product of two operators.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn pauli_x() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m.set(0, 1, Complex64::new(1.0, 0.0));
    m.set(1, 0, Complex64::new(1.0, 0.0));
    m
}

pub fn pauli_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m.set(0, 1, Complex64::new(0.0, -1.0));
    m.set(1, 0, Complex64::new(0.0, 1.0));
    m
}

pub fn pauli_z() -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(2);
    m.set(1, 1, Complex64::new(-1.0, 0.0));
    m
}

/// Born probability `Tr(rho P)`, clamped into `[0, 1]`.
pub fn born_probability(rho: &DensityMatrix, p: &Projector) -> Result<f64> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: p.dim() });
    }
    let t = rho.matrix().matmul(p.matrix()).trace().re;
    Ok(t.clamp(0.0, 1.0))
}

/// Expectation `sum_i lambda_i Tr(rho P_i)` of an observable in a state.
pub fn expectation(rho: &DensityMatrix, o: &Observable) -> Result<f64> {
    if rho.dim() != o.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: o.dim() });
    }
    let mut acc = 0.0;
    for (lambda, p) in o.spectrum() {
        acc += lambda * born_probability(rho, p)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        // (sz (x) sz)(sx (x) sx) = -(sy (x) sy)
        let zz = tensor(&pauli_z(), &pauli_z());
        let xx = tensor(&pauli_x(), &pauli_x());
        let yy = tensor(&pauli_y(), &pauli_y());
        assert!(zz.matmul(&xx).max_abs_diff(&yy.scale_re(-1.0)) < 1e-15);

        // sz (x) sz = diag(1, -1, -1, 1)
        for (i, want) in [1.0, -1.0, -1.0, 1.0].into_iter().enumerate() {
            assert!((zz.get(i, i).re - want).abs() < 1e-15);
        }
    }

    #[test]
    fn born_rule_on_mixed_and_pure_states() {
        // rho = 1/3 gives n/3 for a rank-n projector
        let rho = DensityMatrix::maximally_mixed(3);
        for n in 0..=3 {
            let kets: Vec<Ket> = (0..n).map(|i| basis_ket(3, i)).collect();
            let p = if n == 0 {
                Projector::zero(3)
            } else {
                Projector::from_kets(&kets).unwrap()
            };
            let got = born_probability(&rho, &p).unwrap();
            assert!((got - n as f64 / 3.0).abs() < 1e-12);
        }

        let zero = DensityMatrix::pure(&basis_ket(2, 0)).unwrap();
        let p0 = Projector::onto_ket(&basis_ket(2, 0)).unwrap();
        let p1 = Projector::onto_ket(&basis_ket(2, 1)).unwrap();
        assert!((born_probability(&zero, &p0).unwrap() - 1.0).abs() < 1e-12);
        assert!(born_probability(&zero, &p1).unwrap().abs() < 1e-12);
    }

    #[test]
    fn expectation_of_pauli_z_in_mixed_state() {
        let rho = DensityMatrix::maximally_mixed(2);
        let o = Observable::from_matrix(&pauli_z()).unwrap();
        assert!(expectation(&rho, &o).unwrap().abs() < 1e-12);
    }

    #[test]
    fn expectation_of_eigenstate_is_eigenvalue() {
        let o = Observable::from_matrix(&pauli_z()).unwrap();
        let up = DensityMatrix::pure(&basis_ket(2, 0)).unwrap();
        assert!((expectation(&up, &o).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityMatrix::maximally_mixed(2);
        let p = Projector::zero(3);
        assert!(matches!(
            born_probability(&rho, &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
