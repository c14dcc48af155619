//! Density matrices, quantum instruments and the state metrics used to certify recovery.
//!
//! The instrument machinery is generic over [`Operator`], which is implemented both for
//! dense [`ComplexMatrix`] values and for [`BlockOperator`]. The block engine and the
//! dense oracle therefore share one implementation of `P[x] = Tr[M ρ M†]` and of the
//! post-measurement update.

mod density;
mod instrument;
mod metrics;
mod rng;

pub use density::DensityMatrix;
pub use instrument::{
    apply_channel, apply_outcome, outcome_distribution, sample_outcome, validate_instrument, InstrumentKind,
    InstrumentReport, Labeled, OutcomeDistribution, QuantumInstrument, ZERO_PROBABILITY,
};
pub use metrics::{fidelity, trace_distance};
pub use rng::{family_rng, TrialStream};

use num_complex::Complex64;

use crate::block::BlockOperator;
use crate::error::Result;
use crate::linalg::{self, ComplexMatrix};

/// Algebra needed to run instruments over a representation of operators.
pub trait Operator: Clone + Send + Sync {
    /// Dimension of the full space the operator acts on.
    fn full_dim(&self) -> usize;
    fn op_mul(&self, rhs: &Self) -> Result<Self>;
    fn op_add(&self, rhs: &Self) -> Result<Self>;
    fn op_adjoint(&self) -> Self;
    fn op_trace(&self) -> Complex64;
    fn op_scale(&self, s: f64) -> Self;
    fn to_matrix(&self) -> ComplexMatrix;

    fn is_positive(&self, tol: f64) -> Result<bool> {
        Ok(linalg::min_eigenvalue(&self.to_matrix()) >= -tol)
    }

    /// `self · x · self†`.
    fn sandwich(&self, x: &Self) -> Result<Self> {
        self.op_mul(x)?.op_mul(&self.op_adjoint())
    }
}

impl Operator for ComplexMatrix {
    fn full_dim(&self) -> usize {
        self.nrows()
    }

    fn op_mul(&self, rhs: &Self) -> Result<Self> {
        if self.ncols() != rhs.nrows() {
            return Err(crate::Error::dims(format!("{} rows", self.ncols()), format!("{} rows", rhs.nrows())));
        }
        Ok(self * rhs)
    }

    fn op_add(&self, rhs: &Self) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(crate::Error::dims(format!("{:?}", self.shape()), format!("{:?}", rhs.shape())));
        }
        Ok(self + rhs)
    }

    fn op_adjoint(&self) -> Self {
        self.adjoint()
    }

    fn op_trace(&self) -> Complex64 {
        self.trace()
    }

    fn op_scale(&self, s: f64) -> Self {
        self.scale(s)
    }

    fn to_matrix(&self) -> ComplexMatrix {
        self.clone()
    }
}

impl Operator for BlockOperator {
    fn full_dim(&self) -> usize {
        2 * self.dim()
    }

    fn op_mul(&self, rhs: &Self) -> Result<Self> {
        self.try_mul(rhs)
    }

    fn op_add(&self, rhs: &Self) -> Result<Self> {
        self.try_add(rhs)
    }

    fn op_adjoint(&self) -> Self {
        self.adjoint()
    }

    fn op_trace(&self) -> Complex64 {
        self.trace()
    }

    fn op_scale(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    fn to_matrix(&self) -> ComplexMatrix {
        self.to_dense()
    }

    fn is_positive(&self, tol: f64) -> Result<bool> {
        BlockOperator::is_positive(self, tol)
    }
}
