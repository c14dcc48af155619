use super::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg;

fn same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(format!("dimension {}", rho.dim()), format!("dimension {}", sigma.dim())));
    }
    Ok(())
}

/// Eigenvalues at or below this fraction of the largest one are treated as zero inside
/// [`fidelity`]. Without the floor, rounding noise of order 1e-16 in a rank-deficient
/// state would contribute its square root (1e-8) to the result.
pub const SPECTRAL_FLOOR: f64 = 1e-13;

fn floored(values: &[f64]) -> impl Fn(f64) -> f64 {
    let top = values.iter().copied().fold(0.0, f64::max);
    let floor = SPECTRAL_FLOOR * top;
    move |x| if x > floor { x } else { 0.0 }
}

/// Uhlmann root fidelity `Tr √(√ρ σ √ρ)`, clamped to `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let (values, _) = linalg::hermitian_eigen(rho.as_matrix());
    let clip = floored(&values);
    let root = linalg::hermitian_function(rho.as_matrix(), |x| clip(x).sqrt());
    let inner = linalg::hermitian_eigenvalues(&(&root * sigma.as_matrix() * &root));
    let clip = floored(&inner);
    let f: f64 = inner.iter().map(|&x| clip(x).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `½ ‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let diff = rho.as_matrix() - sigma.as_matrix();
    let t: f64 = linalg::hermitian_eigenvalues(&diff).into_iter().map(f64::abs).sum::<f64>() * 0.5;
    Ok(t.clamp(0.0, 1.0))
}
