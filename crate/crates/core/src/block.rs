//! Operators on `H_d ⊕ H_d⊥` held as four `d×d` blocks.
//!
//! ```text
//!            H_d        H_d⊥
//!   H_d   [ diag_top   off_top ]
//!   H_d⊥  [ off_bot    diag_bot ]
//! ```
//!
//! `A ⊕ B` fills the diagonal blocks and `C ⊞ D` the off-diagonal ones, with `C: H_d⊥ → H_d`
//! in `off_top` and `D: H_d → H_d⊥` in `off_bot`. In the flattened `2d×2d` form indices
//! `0..d` span `H_d` and `d..2d` span `H_d⊥`.
//!
//! A block that is structurally zero is stored as `None`, and every operation propagates
//! that, so products such as `(A ⊕ B)(C ⊞ D)` come out with diagonal blocks that are
//! exactly absent rather than numerically small.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, MatrixJson};

/// Default Hermiticity tolerance (absolute, max-norm).
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlockOperatorJson", into = "BlockOperatorJson")]
pub struct BlockOperator {
    dim: usize,
    diag_top: Option<ComplexMatrix>,
    diag_bot: Option<ComplexMatrix>,
    off_top: Option<ComplexMatrix>,
    off_bot: Option<ComplexMatrix>,
}

/// Sparsity class of a [`BlockOperator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Zero,
    /// Only diagonal blocks (`A ⊕ B`).
    DirectSum,
    /// Only off-diagonal blocks (`C ⊞ D`).
    BoxSum,
    Mixed,
}

fn opt_mul(a: &Option<ComplexMatrix>, b: &Option<ComplexMatrix>) -> Option<ComplexMatrix> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    }
}

fn opt_add(a: Option<ComplexMatrix>, b: Option<ComplexMatrix>) -> Option<ComplexMatrix> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a + b),
        (x, None) | (None, x) => x,
    }
}

fn opt_ref_add(a: &Option<ComplexMatrix>, b: &Option<ComplexMatrix>) -> Option<ComplexMatrix> {
    opt_add(a.clone(), b.clone())
}

fn opt_adjoint(a: &Option<ComplexMatrix>) -> Option<ComplexMatrix> {
    a.as_ref().map(|m| m.adjoint())
}

impl BlockOperator {
    /// Builds an operator from optional blocks; `None` means a structural zero.
    pub fn from_blocks(
        dim: usize,
        diag_top: Option<ComplexMatrix>,
        diag_bot: Option<ComplexMatrix>,
        off_top: Option<ComplexMatrix>,
        off_bot: Option<ComplexMatrix>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dims("d >= 1", "d = 0"));
        }
        for m in [&diag_top, &diag_bot, &off_top, &off_bot].into_iter().flatten() {
            linalg::ensure_shape(m, dim)?;
        }
        Ok(BlockOperator { dim, diag_top, diag_bot, off_top, off_bot })
    }

    /// `A ⊕ B`.
    pub fn direct_sum(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        let d = linalg::ensure_square(&a)?;
        Self::from_blocks(d, Some(a), Some(b), None, None)
    }

    /// `C ⊞ D` with `C: H_d⊥ → H_d` and `D: H_d → H_d⊥`.
    pub fn box_sum(c: ComplexMatrix, d: ComplexMatrix) -> Result<Self> {
        let dim = linalg::ensure_square(&c)?;
        Self::from_blocks(dim, None, None, Some(c), Some(d))
    }

    pub fn zero(dim: usize) -> Self {
        BlockOperator { dim, diag_top: None, diag_bot: None, off_top: None, off_bot: None }
    }

    /// `1 ⊕ 1`.
    pub fn identity(dim: usize) -> Self {
        BlockOperator {
            dim,
            diag_top: Some(linalg::identity(dim)),
            diag_bot: Some(linalg::identity(dim)),
            off_top: None,
            off_bot: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn diag_top(&self) -> Option<&ComplexMatrix> {
        self.diag_top.as_ref()
    }

    pub fn diag_bot(&self) -> Option<&ComplexMatrix> {
        self.diag_bot.as_ref()
    }

    pub fn off_top(&self) -> Option<&ComplexMatrix> {
        self.off_top.as_ref()
    }

    pub fn off_bot(&self) -> Option<&ComplexMatrix> {
        self.off_bot.as_ref()
    }

    /// Block contents with structural zeros materialized.
    pub fn diag_top_dense(&self) -> ComplexMatrix {
        self.diag_top.clone().unwrap_or_else(|| linalg::zeros(self.dim))
    }

    pub fn diag_bot_dense(&self) -> ComplexMatrix {
        self.diag_bot.clone().unwrap_or_else(|| linalg::zeros(self.dim))
    }

    pub fn structure(&self) -> Structure {
        let diag = self.diag_top.is_some() || self.diag_bot.is_some();
        let off = self.off_top.is_some() || self.off_bot.is_some();
        match (diag, off) {
            (false, false) => Structure::Zero,
            (true, false) => Structure::DirectSum,
            (false, true) => Structure::BoxSum,
            (true, true) => Structure::Mixed,
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dims(format!("block dim {}", self.dim), format!("block dim {}", other.dim)));
        }
        Ok(())
    }

    /// Block product. Each output block is the sum of the product-rule terms that can be
    /// non-zero, e.g. `(A ⊞ B)(C ⊞ D) = (AD) ⊕ (BC)`.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        let (x, y) = (self, rhs);
        Ok(BlockOperator {
            dim: self.dim,
            diag_top: opt_add(opt_mul(&x.diag_top, &y.diag_top), opt_mul(&x.off_top, &y.off_bot)),
            off_top: opt_add(opt_mul(&x.diag_top, &y.off_top), opt_mul(&x.off_top, &y.diag_bot)),
            off_bot: opt_add(opt_mul(&x.off_bot, &y.diag_top), opt_mul(&x.diag_bot, &y.off_bot)),
            diag_bot: opt_add(opt_mul(&x.off_bot, &y.off_top), opt_mul(&x.diag_bot, &y.diag_bot)),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.check_dim(rhs)?;
        Ok(BlockOperator {
            dim: self.dim,
            diag_top: opt_ref_add(&self.diag_top, &rhs.diag_top),
            diag_bot: opt_ref_add(&self.diag_bot, &rhs.diag_bot),
            off_top: opt_ref_add(&self.off_top, &rhs.off_top),
            off_bot: opt_ref_add(&self.off_bot, &rhs.off_bot),
        })
    }

    /// `(A ⊕ B)† = A† ⊕ B†` and `(C ⊞ D)† = D† ⊞ C†`.
    pub fn adjoint(&self) -> Self {
        BlockOperator {
            dim: self.dim,
            diag_top: opt_adjoint(&self.diag_top),
            diag_bot: opt_adjoint(&self.diag_bot),
            off_top: opt_adjoint(&self.off_bot),
            off_bot: opt_adjoint(&self.off_top),
        }
    }

    /// `tr(A ⊕ B) = tr A + tr B`; off-diagonal blocks never contribute.
    pub fn trace(&self) -> Complex64 {
        let t = |m: &Option<ComplexMatrix>| m.as_ref().map_or(linalg::ZERO, |m| m.trace());
        t(&self.diag_top) + t(&self.diag_bot)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let f = |m: &Option<ComplexMatrix>| m.as_ref().map(|m| m * s);
        BlockOperator {
            dim: self.dim,
            diag_top: f(&self.diag_top),
            diag_bot: f(&self.diag_bot),
            off_top: f(&self.off_top),
            off_bot: f(&self.off_bot),
        }
    }

    /// `m x m†`.
    pub fn sandwich(m: &Self, x: &Self) -> Result<Self> {
        m.try_mul(x)?.try_mul(&m.adjoint())
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(2 * d, 2 * d);
        let place = |out: &mut ComplexMatrix, m: &Option<ComplexMatrix>, r: usize, c: usize| {
            if let Some(m) = m {
                out.view_mut((r, c), (d, d)).copy_from(m);
            }
        };
        place(&mut out, &self.diag_top, 0, 0);
        place(&mut out, &self.off_top, 0, d);
        place(&mut out, &self.off_bot, d, 0);
        place(&mut out, &self.diag_bot, d, d);
        out
    }

    /// Splits a `2d×2d` matrix into blocks. All four blocks come back present, so the
    /// result is structurally `Mixed` even when some blocks hold only zeros.
    pub fn from_dense(m: &ComplexMatrix, d: usize) -> Result<Self> {
        if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || d == 0 || m.nrows() != 2 * d {
            return Err(Error::NotBlockShaped { rows: m.nrows(), cols: m.ncols() });
        }
        let take = |r: usize, c: usize| Some(m.view((r, c), (d, d)).into_owned());
        Ok(BlockOperator {
            dim: d,
            diag_top: take(0, 0),
            off_top: take(0, d),
            off_bot: take(d, 0),
            diag_bot: take(d, d),
        })
    }

    pub fn hermitian_deviation(&self) -> f64 {
        linalg::hermitian_deviation(&self.to_dense())
    }

    /// Positivity of a Hermitian operator: all eigenvalues `>= -tol`.
    ///
    /// A direct sum is positive iff both diagonal blocks are, so those are checked
    /// blockwise without forming the `2d×2d` matrix.
    pub fn is_positive(&self, tol: f64) -> Result<bool> {
        let deviation = self.hermitian_deviation();
        if deviation > tol.max(HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        let psd = |m: &Option<ComplexMatrix>| m.as_ref().is_none_or(|m| linalg::min_eigenvalue(m) >= -tol);
        match self.structure() {
            Structure::Zero => Ok(true),
            Structure::DirectSum => Ok(psd(&self.diag_top) && psd(&self.diag_bot)),
            _ => Ok(linalg::min_eigenvalue(&self.to_dense()) >= -tol),
        }
    }
}

/// Wire form; absent blocks are zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockOperatorJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag_top: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag_bot: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub off_top: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub off_bot: Option<MatrixJson>,
}

impl From<BlockOperator> for BlockOperatorJson {
    fn from(b: BlockOperator) -> Self {
        let j = |m: &Option<ComplexMatrix>| m.as_ref().map(MatrixJson::from);
        BlockOperatorJson {
            dim: b.dim,
            diag_top: j(&b.diag_top),
            diag_bot: j(&b.diag_bot),
            off_top: j(&b.off_top),
            off_bot: j(&b.off_bot),
        }
    }
}

impl TryFrom<BlockOperatorJson> for BlockOperator {
    type Error = Error;

    fn try_from(j: BlockOperatorJson) -> Result<Self> {
        let m = |x: Option<MatrixJson>| x.map(ComplexMatrix::try_from).transpose();
        BlockOperator::from_blocks(j.dim, m(j.diag_top)?, m(j.diag_bot)?, m(j.off_top)?, m(j.off_bot)?)
    }
}
