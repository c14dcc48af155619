use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, MatrixJson};

/// Tolerance for the Hermiticity, positivity and unit-trace invariants.
pub const STATE_TOL: f64 = 1e-10;

/// A Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates the density-matrix invariants at [`STATE_TOL`].
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        linalg::ensure_square(&mat).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        if mat.nrows() == 0 {
            return Err(Error::InvalidDensity("empty matrix".into()));
        }
        let deviation = linalg::hermitian_deviation(&mat);
        if deviation > STATE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {deviation:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min = linalg::min_eigenvalue(&mat);
        if min < -STATE_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(DensityMatrix { mat })
    }

    /// Projects floating-point drift back onto the state space: Hermitian part, eigenvalues
    /// in `[-STATE_TOL, 0)` clipped to zero, then trace renormalized. Anything further off
    /// than that is rejected.
    pub fn from_drifted(mat: ComplexMatrix) -> Result<Self> {
        linalg::ensure_square(&mat).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        let deviation = linalg::hermitian_deviation(&mat);
        if deviation > STATE_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian (deviation {deviation:e})")));
        }
        let herm = linalg::hermitian_part(&mat);
        let min = linalg::min_eigenvalue(&herm);
        if min < -STATE_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        let clipped = if min < 0.0 { linalg::hermitian_function(&herm, |x| x.max(0.0)) } else { herm };
        let tr = clipped.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidDensity("zero trace".into()));
        }
        Self::new(clipped.unscale(tr))
    }

    pub fn pure(amplitudes: &[num_complex::Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidDensity("zero vector".into()));
        }
        let v: Vec<_> = amplitudes.iter().map(|z| z / norm).collect();
        Self::new(linalg::outer(&v))
    }

    /// `|k⟩⟨k|` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        DensityMatrix { mat: linalg::projector(d, k) }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix { mat: linalg::identity(d).unscale(d as f64) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(&self.mat).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::try_from(MatrixJson::deserialize(d)?).map_err(serde::de::Error::custom)?;
        DensityMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag_real, real_matrix};

    #[test]
    fn rejects_bad_matrices() {
        assert!(DensityMatrix::new(diag_real(&[0.5, 0.4])).is_err());
        assert!(DensityMatrix::new(diag_real(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(real_matrix(2, 2, &[0.5, 0.1, 0.2, 0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn drift_is_clipped_and_renormalized() {
        let mut m = diag_real(&[1.0 + 1e-12, -1e-12]);
        m[(0, 1)] = c(1e-13, 0.0);
        m[(1, 0)] = c(1e-13, 0.0);
        let rho = DensityMatrix::from_drifted(m).unwrap();
        assert!((rho.as_matrix().trace().re - 1.0).abs() < 1e-15);
        assert!(linalg::min_eigenvalue(rho.as_matrix()) >= -1e-15);
        assert!(DensityMatrix::from_drifted(diag_real(&[1.1, -0.1])).is_err());
    }

    #[test]
    fn pure_state_normalizes() {
        let rho = DensityMatrix::pure(&[c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!((rho.as_matrix()[(1, 1)].re - 0.64).abs() < 1e-14);
    }
}
