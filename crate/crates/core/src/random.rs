//! Seeded random states and measurement families.
//!
//! Ginibre matrices have i.i.d. complex Gaussian entries with unit variance. Haar unitaries
//! come from the QR decomposition of a Ginibre matrix with the phases of `R`'s diagonal
//! absorbed into `Q`. Mixed states are normalized Wishart matrices `G G† / Tr(G G†)`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::qcore::DensityMatrix;

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * scale, im * scale)
    })
}

pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { linalg::ONE };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let v = ginibre(d, 1, rng);
    let amps: Vec<_> = v.iter().copied().collect();
    DensityMatrix::pure(&amps).expect("Gaussian vector is non-zero with probability one")
}

/// Full-rank mixed state from a square Wishart matrix.
pub fn random_mixed_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::from_drifted(w.unscale(tr)).expect("Wishart matrix is a valid state")
}

/// `n` Ginibre operators normalized as `M_ν = G_ν S^{-1/2}` with `S = Σ G†G`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Vec<ComplexMatrix>> {
    if n == 0 {
        return Err(Error::Config("random_povm needs n >= 1".into()));
    }
    let mut ms: Vec<_> = (0..n).map(|_| ginibre(d, d, rng)).collect();
    // A second pass removes the error the first one leaves on ill-conditioned draws.
    for _ in 0..2 {
        let norm = linalg::inv_sqrt(&linalg::gram_sum(&ms, d))?;
        ms = ms.iter().map(|m| m * &norm).collect();
    }
    Ok(ms)
}

/// Projective measurement whose `n` projectors split an orthonormal basis round-robin.
/// With `rng = None` the computational basis is used, so `M_ν` is diagonal.
pub fn projective_family<R: Rng + ?Sized>(d: usize, n: usize, rng: Option<&mut R>) -> Result<Vec<ComplexMatrix>> {
    if n == 0 || n > d {
        return Err(Error::Config(format!("projective family needs 1 <= n <= d, got n={n}, d={d}")));
    }
    let basis = match rng {
        Some(rng) => haar_unitary(d, rng),
        None => linalg::identity(d),
    };
    let mut out = vec![linalg::zeros(d); n];
    for k in 0..d {
        let v: Vec<_> = basis.column(k).iter().copied().collect();
        out[k % n] += linalg::outer(&v);
    }
    Ok(out)
}

/// `M_ν = U_ν / √n` with independent Haar unitaries; every `M_ν†M_ν = 1/n` is full rank.
pub fn scaled_unitary_family<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<Vec<ComplexMatrix>> {
    if n == 0 {
        return Err(Error::Config("scaled_unitary needs n >= 1".into()));
    }
    let s = 1.0 / (n as f64).sqrt();
    Ok((0..n).map(|_| haar_unitary(d, rng).scale(s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::family_rng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = family_rng(3);
        for d in [1, 2, 5] {
            let u = haar_unitary(d, &mut rng);
            assert!(linalg::max_abs_diff(&(u.adjoint() * &u), &linalg::identity(d)) < 1e-13);
        }
    }

    #[test]
    fn families_are_complete() {
        let mut rng = family_rng(11);
        for (d, n) in [(1, 1), (2, 3), (4, 2), (8, 5)] {
            let m = random_povm(d, n, &mut rng).unwrap();
            assert!(linalg::completeness_residual(&m, d) < 1e-12);
            let u = scaled_unitary_family(d, n, &mut rng).unwrap();
            assert!(linalg::completeness_residual(&u, d) < 1e-12);
        }
        let p = projective_family(4, 3, Some(&mut rng)).unwrap();
        assert!(linalg::completeness_residual(&p, 4) < 1e-12);
        let p = projective_family::<rand_chacha::ChaCha8Rng>(2, 2, None).unwrap();
        assert_eq!(p[0], linalg::projector(2, 0));
        assert!(projective_family::<rand_chacha::ChaCha8Rng>(2, 3, None).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        let mut rng = family_rng(5);
        let pure = random_pure_state(6, &mut rng);
        assert!((pure.purity() - 1.0).abs() < 1e-12);
        let mixed = random_mixed_state(6, &mut rng);
        assert!(mixed.purity() < 1.0 - 1e-3);
    }
}
