//! Dense square complex matrices, row-major, sized for small Hilbert spaces.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A ket is a complex column vector.
pub type Ket = Vec<Complex64>;

/// Dense `d x d` complex matrix.
///
/// Serialized in JSON as nested arrays of `[re, im]` pairs, row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<[f64; 2]>>", try_from = "Vec<Vec<[f64; 2]>>")]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        for r in &rows {
            if r.len() != dim {
                return Err(Error::NotSquare { rows: dim, cols: r.len() });
            }
        }
        let data: Vec<Complex64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// `|a><b|`.
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        debug_assert_eq!(a.len(), b.len());
        Self::from_fn(a.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.dim, other.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, x: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * x).collect(),
        }
    }

    pub fn scale_re(&self, x: f64) -> ComplexMatrix {
        self.scale(Complex64::new(x, 0.0))
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise infinity norm `max |m_ij|`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        self.sub(other).max_abs()
    }

    /// `|| M - M^dagger ||_inf`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `|| AB - BA ||_inf`.
    pub fn commutator_norm(&self, other: &ComplexMatrix) -> f64 {
        self.matmul(other).max_abs_diff(&other.matmul(self))
    }

    /// Kronecker (tensor) product; the result has dimension `dim(a) * dim(b)`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.dim, other.dim);
        ComplexMatrix::from_fn(da * db, |i, j| {
            self.get(i / db, j / db) * other.get(i % db, j % db)
        })
    }

    /// `<a| M |b>`.
    pub fn sandwich(&self, a: &Ket, b: &Ket) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += a[i].conj() * self.get(i, j) * b[j];
            }
        }
        acc
    }

    pub fn apply(&self, k: &Ket) -> Ket {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * k[j]).sum())
            .collect()
    }
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix(dim = {})", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl From<ComplexMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(m: ComplexMatrix) -> Self {
        (0..m.dim)
            .map(|i| (0..m.dim).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for ComplexMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        ComplexMatrix::from_rows(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn adjoint_and_trace() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!(m.is_hermitian(1e-15));
        assert_eq!(m.trace(), c(3.0, 0.0));
    }

    #[test]
    fn rejects_ragged_rows() {
        let bad = ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![]]);
        assert!(bad.is_err());
    }

    #[test]
    fn serde_round_trip_row_major() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.5, 0.0), c(0.0, -0.5)],
            vec![c(0.0, 0.5), c(0.5, 0.0)],
        ])
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, "[[[0.5,0.0],[0.0,-0.5]],[[0.0,0.5],[0.5,0.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
