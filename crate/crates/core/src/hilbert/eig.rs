//! Hermitian eigendecomposition via cyclic Jacobi sweeps.
//!
//! A Hermitian `H = A + iB` embeds into the real symmetric `2d x 2d` matrix
//! `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled. Jacobi on the embedding is slow asymptotically but extremely
//! robust at the dimensions used here (d <= 16), and has no dependencies.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::matrix::{ComplexMatrix, Ket};
use crate::hilbert::{inner, ket_norm, HERMITICITY_TOL};

/// Off-diagonal threshold at which sweeps stop.
const SWEEP_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative to scale) are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-8;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Ket>,
}

/// Decompose a Hermitian matrix; rejects non-Hermitian input with the
/// observed symmetry defect.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<EigenSystem> {
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian { defect });
    }
    let d = m.dim();
    if d == 0 {
        return Ok(EigenSystem { values: vec![], vectors: vec![] });
    }

    // Symmetrized real embedding.
    let n = 2 * d;
    let mut a = vec![0.0_f64; n * n];
    for i in 0..d {
        for j in 0..d {
            let z = (m.get(i, j) + m.get(j, i).conj()) * 0.5;
            a[i * n + j] = z.re;
            a[(i + d) * n + (j + d)] = z.re;
            a[i * n + (j + d)] = -z.im;
            a[(i + d) * n + j] = z.im;
        }
    }

    let scale = a.iter().fold(0.0_f64, |acc, x| acc.max(x.abs())).max(1.0);
    let (evals, evecs) = jacobi(&mut a, n, SWEEP_TOL * scale);

    // Sort real eigenpairs ascending, then group into clusters.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| evals[i].total_cmp(&evals[j]));

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &order {
        match clusters.last_mut() {
            Some(cl) if evals[k] - evals[*cl.last().unwrap()] <= CLUSTER_GAP * scale => {
                cl.push(k)
            }
            _ => clusters.push(vec![k]),
        }
    }
    // Each complex eigendirection shows up twice in the embedding, so every
    // cluster must have even real multiplicity; merge forward if rounding
    // split one apart.
    let mut merged: Vec<Vec<usize>> = Vec::new();
    let mut carry: Vec<usize> = Vec::new();
    for cl in clusters {
        carry.extend(cl);
        if carry.len() % 2 == 0 {
            merged.push(std::mem::take(&mut carry));
        }
    }
    if !carry.is_empty() {
        return Err(Error::Integrity {
            detail: "odd eigenvalue multiplicity in the real embedding".into(),
        });
    }

    let mut values = Vec::with_capacity(d);
    let mut vectors: Vec<Ket> = Vec::with_capacity(d);
    for cl in merged {
        let target = cl.len() / 2;
        let mean: f64 = cl.iter().map(|&k| evals[k]).sum::<f64>() / cl.len() as f64;
        // Real eigenvector [x; y] maps to the complex eigenvector x + iy; its
        // partner [-y; x] maps to i(x + iy), the same direction. Pivoted
        // Gram-Schmidt keeps one representative per direction.
        let mut images: Vec<Ket> = cl
            .iter()
            .map(|&k| {
                (0..d)
                    .map(|i| Complex64::new(evecs[i * n + k], evecs[(i + d) * n + k]))
                    .collect()
            })
            .collect();
        for _ in 0..target {
            for img in images.iter_mut() {
                orthogonalize(img, &vectors);
            }
            let (best, norm) = images
                .iter()
                .enumerate()
                .map(|(i, v)| (i, ket_norm(v)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("cluster is non-empty");
            if norm < 1e-3 {
                return Err(Error::Integrity {
                    detail: "eigenvector extraction degenerated".into(),
                });
            }
            let mut v = images.swap_remove(best);
            for z in v.iter_mut() {
                *z /= norm;
            }
            values.push(mean);
            vectors.push(v);
        }
    }

    let sys = EigenSystem { values, vectors };
    verify(m, &sys)?;
    Ok(sys)
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    let sys = hermitian_eigensystem(m)?;
    Ok(sys
        .values
        .iter()
        .fold(0.0_f64, |acc, v| acc.max(v.abs())))
}

fn orthogonalize(v: &mut Ket, basis: &[Ket]) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
    }
}

fn verify(m: &ComplexMatrix, sys: &EigenSystem) -> Result<()> {
    let d = m.dim();
    let mut recon = ComplexMatrix::zeros(d);
    for (lambda, v) in sys.values.iter().zip(&sys.vectors) {
        recon = recon.add(&ComplexMatrix::outer(v, v).scale_re(*lambda));
    }
    let scale = m.max_abs().max(1.0);
    if recon.max_abs_diff(m) > 1e-10 * scale {
        return Err(Error::Integrity {
            detail: format!(
                "eigendecomposition reconstruction error {:.3e}",
                recon.max_abs_diff(m)
            ),
        });
    }
    for (i, vi) in sys.vectors.iter().enumerate() {
        for (j, vj) in sys.vectors.iter().enumerate() {
            let g = inner(vi, vj);
            let target = if i == j { 1.0 } else { 0.0 };
            if (g - Complex64::new(target, 0.0)).norm() > 1e-10 {
                return Err(Error::Integrity {
                    detail: "eigenvectors are not orthonormal".into(),
                });
            }
        }
    }
    Ok(())
}

/// Cyclic Jacobi for a real symmetric matrix stored row-major in `a`.
/// Returns eigenvalues and eigenvectors (column k of the returned matrix).
fn jacobi(a: &mut [f64], n: usize, thresh: f64) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0_f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[p * n + q].abs());
            }
        }
        if off <= thresh {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= thresh * 1e-2 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A <- G^T A G with G the rotation in the (p, q) plane
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let evals = (0..n).map(|i| a[i * n + i]).collect();
    (evals, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_ket, pauli_x};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_input_sorted_ascending() {
        let m = ComplexMatrix::from_fn(3, |i, j| {
            if i == j {
                c([3.0, 1.0, 2.0][i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let sys = hermitian_eigensystem(&m).unwrap();
        assert!((sys.values[0] - 1.0).abs() < 1e-12);
        assert!((sys.values[1] - 2.0).abs() < 1e-12);
        assert!((sys.values[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_spectrum_is_plus_minus_one() {
        let sys = hermitian_eigensystem(&pauli_x()).unwrap();
        assert!((sys.values[0] + 1.0).abs() < 1e-12);
        assert!((sys.values[1] - 1.0).abs() < 1e-12);
        assert!((spectral_norm(&pauli_x()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_projector_eigenspaces_are_extracted() {
        // |0><0| + |1><1| at d = 3 has eigenvalues (0, 1, 1)
        let p = ComplexMatrix::outer(&basis_ket(3, 0), &basis_ket(3, 0))
            .add(&ComplexMatrix::outer(&basis_ket(3, 1), &basis_ket(3, 1)));
        let sys = hermitian_eigensystem(&p).unwrap();
        assert!(sys.values[0].abs() < 1e-12);
        assert!((sys.values[1] - 1.0).abs() < 1e-12);
        assert!((sys.values[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        match hermitian_eigensystem(&m) {
            Err(Error::NotHermitian { defect }) => assert!(defect > 0.5),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn zero_matrix_norm_is_zero() {
        assert_eq!(spectral_norm(&ComplexMatrix::zeros(3)).unwrap(), 0.0);
    }
}
