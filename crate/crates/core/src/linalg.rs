//! Dense complex matrices and the handful of Hermitian routines the simulator needs.
//!
//! Everything is backed by `nalgebra::DMatrix<Complex64>`. Eigen-decompositions are
//! always taken of the Hermitian part `(m + m†)/2`, so callers can pass matrices that
//! are Hermitian only up to rounding.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(d: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(d, d)
}

/// Builds a matrix from real row-major entries.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| c(entries[i * cols + j], 0.0))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let d = values.len();
    ComplexMatrix::from_fn(d, d, |i, j| if i == j { c(values[i], 0.0) } else { ZERO })
}

/// `|v⟩⟨v|` for a column vector given as a slice.
pub fn outer(v: &[Complex64]) -> ComplexMatrix {
    let d = v.len();
    ComplexMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj())
}

pub fn projector(d: usize, k: usize) -> ComplexMatrix {
    let mut m = zeros(d);
    m[(k, k)] = ONE;
    m
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::dims("square matrix", format!("{}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

pub fn ensure_shape(m: &ComplexMatrix, d: usize) -> Result<()> {
    if m.shape() != (d, d) {
        return Err(Error::dims(format!("{d}x{d}"), format!("{}x{}", m.nrows(), m.ncols())));
    }
    Ok(())
}

/// Max-norm distance from Hermiticity, `max |m - m†|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `m`.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Rebuilds `V f(Λ) V†` from a Hermitian eigen-decomposition.
pub fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let scaled = ComplexMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| vectors[(i, j)] * f(values[j]));
    &scaled * vectors.adjoint()
}

/// Hermitian PSD square root. Negative rounding noise in the spectrum is clipped to zero.
pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    hermitian_function(m, |x| x.max(0.0).sqrt())
}

/// `m^{-1/2}` for a positive-definite Hermitian `m`.
pub fn inv_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let min = min_eigenvalue(m);
    if min <= SINGULAR_THRESHOLD {
        return Err(Error::SingularOperator { min_singular_value: min.max(0.0) });
    }
    Ok(hermitian_function(m, |x| 1.0 / x.sqrt()))
}

/// Singular values below this are treated as structural zeros.
pub const SINGULAR_THRESHOLD: f64 = 1e-12;

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

pub fn min_singular_value(m: &ComplexMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn max_singular_value(m: &ComplexMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let smin = min_singular_value(m);
    if smin <= SINGULAR_THRESHOLD {
        return Err(Error::SingularOperator { min_singular_value: smin });
    }
    m.clone().try_inverse().ok_or(Error::SingularOperator { min_singular_value: smin })
}

/// `Σ_k m_k† m_k`.
pub fn gram_sum<'a>(ops: impl IntoIterator<Item = &'a ComplexMatrix>, d: usize) -> ComplexMatrix {
    ops.into_iter().fold(zeros(d), |acc, m| acc + m.adjoint() * m)
}

/// Frobenius norm of `Σ_k m_k† m_k - 1`.
pub fn completeness_residual<'a>(ops: impl IntoIterator<Item = &'a ComplexMatrix>, d: usize) -> f64 {
    (gram_sum(ops, d) - identity(d)).norm()
}

/// `m ρ m†`.
pub fn sandwich(m: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    m * rho * m.adjoint()
}

/// Wire form of a matrix: `{"rows": N, "cols": M, "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        MatrixJson { rows: m.nrows(), cols: m.ncols(), data }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.data.len() != j.rows * j.cols {
            return Err(Error::dims(format!("{} entries", j.rows * j.cols), format!("{} entries", j.data.len())));
        }
        Ok(ComplexMatrix::from_fn(j.rows, j.cols, |r, col| {
            let [re, im] = j.data[r * j.cols + col];
            c(re, im)
        }))
    }
}

/// `#[serde(with = "matrix_serde")]` adapter for [`ComplexMatrix`] fields.
pub mod matrix_serde {
    use super::{ComplexMatrix, MatrixJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

pub mod matrix_vec_serde {
    use super::{ComplexMatrix, MatrixJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(ms: &[ComplexMatrix], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(MatrixJson::from).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ComplexMatrix>, D::Error> {
        Vec::<MatrixJson>::deserialize(d)?
            .into_iter()
            .map(|j| ComplexMatrix::try_from(j).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psd_sqrt_squares_back() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64 * 0.3, (i as f64) - (j as f64)));
        let p = a.adjoint() * &a;
        let r = psd_sqrt(&p);
        assert!(max_abs_diff(&(&r * &r), &p) < 1e-12);
        assert!(hermitian_deviation(&r) < 1e-13);
        assert!(min_eigenvalue(&r) > -1e-12);
    }

    #[test]
    fn eigen_is_sorted_and_reconstructs() {
        let m = diag_real(&[3.0, -1.0, 2.0]);
        let (vals, vecs) = hermitian_eigen(&m);
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        let back = hermitian_function(&m, |x| x);
        assert!(max_abs_diff(&back, &m) < 1e-14);
        assert_eq!(vecs.ncols(), 3);
    }

    #[test]
    fn singular_inverse_is_rejected() {
        let p = projector(2, 0);
        assert!(matches!(inverse(&p), Err(Error::SingularOperator { .. })));
        let m = diag_real(&[0.8, 0.6]);
        let inv = inverse(&m).unwrap();
        assert!(max_abs_diff(&(inv * &m), &identity(2)) < 1e-15);
    }

    #[test]
    fn json_layout_is_row_major_pairs() {
        let m = ComplexMatrix::from_row_slice(1, 2, &[c(1.0, 2.0), c(3.0, -4.0)]);
        let s = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"data":[[1.0,2.0],[3.0,-4.0]]}"#);
        let bad = MatrixJson { rows: 2, cols: 2, data: vec![[0.0, 0.0]] };
        assert!(ComplexMatrix::try_from(bad).is_err());
    }
}
