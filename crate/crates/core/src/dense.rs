//! The same protocol written directly in the `system ⊗ ancilla` tensor-product picture,
//! with the ancilla in the computational basis `{|0⟩, |1⟩}`.
//!
//! This module does not use the block algebra at all; it exists to cross-check it.
//! Flattened index = `system_index · 2 + ancilla_index`. The block picture orders the
//! same basis as `ancilla_index · d + system_index`; [`to_block_layout`] converts.
//!
//! | step       | operators                                                    |
//! |------------|--------------------------------------------------------------|
//! | embed      | `ρ ⊗ |0⟩⟨0|`                                                 |
//! | quasi-copy | `K₀ = cos φ·1⊗|0⟩⟨0| + sin φ·1⊗|0⟩⟨1|`                        |
//! |            | `K₁ = −cos φ·1⊗|1⟩⟨1| + sin φ·1⊗|1⟩⟨0|`                       |
//! | measure    | `(1/√n)·1⊗|0⟩⟨0| + M_ν⊗|1⟩⟨1|`                                |
//! | recover    | `1⊗|0⟩⟨0|`, `1⊗|1⟩⟨1|` (Pauli-Z on the ancilla)               |

use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::qcore::{
    apply_channel, apply_outcome, fidelity, outcome_distribution, DensityMatrix, InstrumentKind, Labeled,
    QuantumInstrument, TrialStream,
};
use crate::trial::{Recovery, TrialRecord};

/// `|a⟩⟨b|` on the ancilla qubit.
fn ancilla(a: usize, b: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(a, b)] = linalg::ONE;
    m
}

/// `sys ⊗ |a⟩⟨b|`.
pub fn with_ancilla(sys: &ComplexMatrix, a: usize, b: usize) -> ComplexMatrix {
    sys.kronecker(&ancilla(a, b))
}

/// `ρ ⊗ |0⟩⟨0|`.
pub fn dense_embed(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new(with_ancilla(rho.as_matrix(), 0, 0)).expect("tensor with a pure ancilla is a state")
}

pub fn dense_quasi_copy(phi: f64, d: usize) -> QuantumInstrument {
    let (c, s) = (phi.cos(), phi.sin());
    let one = linalg::identity(d);
    let k0 = with_ancilla(&one, 0, 0).scale(c) + with_ancilla(&one, 0, 1).scale(s);
    let k1 = with_ancilla(&one, 1, 1).scale(-c) + with_ancilla(&one, 1, 0).scale(s);
    QuantumInstrument::new(InstrumentKind::Channel, vec![Labeled::new("K0", k0), Labeled::new("K1", k1)])
        .expect("equal dimensions")
}

/// Conditional measurement: `M_ν` acts on the system only when the ancilla is `|1⟩`.
pub fn dense_outer_measurement_from(inner: &[ComplexMatrix]) -> Result<QuantumInstrument> {
    let first = inner.first().ok_or(Error::EmptyInstrument)?;
    let d = linalg::ensure_square(first)?;
    let top = linalg::identity(d).unscale((inner.len() as f64).sqrt());
    let ops = inner
        .iter()
        .enumerate()
        .map(|(k, m)| Labeled::new(format!("nu{}", k + 1), with_ancilla(&top, 0, 0) + with_ancilla(m, 1, 1)))
        .collect();
    QuantumInstrument::new(InstrumentKind::Measurement, ops)
}

pub fn dense_outer_measurement(config: &ProtocolConfig) -> Result<QuantumInstrument> {
    dense_outer_measurement_from(config.inner())
}

/// Projective Pauli-Z measurement on the ancilla.
pub fn dense_recovery(d: usize) -> QuantumInstrument {
    let one = linalg::identity(d);
    QuantumInstrument::new(
        InstrumentKind::Measurement,
        vec![Labeled::new("mu0", with_ancilla(&one, 0, 0)), Labeled::new("mu1", with_ancilla(&one, 1, 1))],
    )
    .expect("equal dimensions")
}

/// `Tr_ancilla` of a `2d×2d` operator in tensor order.
pub fn trace_out_ancilla(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::NotBlockShaped { rows: m.nrows(), cols: m.ncols() });
    }
    let d = m.nrows() / 2;
    Ok(ComplexMatrix::from_fn(d, d, |i, j| m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)]))
}

/// `Tr_system`, leaving the 2×2 ancilla state.
pub fn trace_out_system(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::NotBlockShaped { rows: m.nrows(), cols: m.ncols() });
    }
    let d = m.nrows() / 2;
    Ok(ComplexMatrix::from_fn(2, 2, |a, b| (0..d).map(|s| m[(2 * s + a, 2 * s + b)]).sum()))
}

/// Reorders a tensor-ordered `2d×2d` matrix into the block layout (`ancilla · d + system`).
pub fn to_block_layout(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) {
        return Err(Error::NotBlockShaped { rows: m.nrows(), cols: m.ncols() });
    }
    let d = m.nrows() / 2;
    let tensor_index = |k: usize| (k % d) * 2 + k / d;
    Ok(ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| m[(tensor_index(i), tensor_index(j))]))
}

/// Every operator of the protocol in dense tensor form, with the quasi-copied state
/// precomputed through the generic channel.
#[derive(Debug, Clone)]
pub struct DensePipeline {
    config: ProtocolConfig,
    embedded: DensityMatrix,
    channel: QuantumInstrument,
    outer: QuantumInstrument,
    recovery: QuantumInstrument,
    copied: ComplexMatrix,
}

impl DensePipeline {
    pub fn new(config: &ProtocolConfig) -> Result<Self> {
        let d = config.d();
        let embedded = dense_embed(config.rho0());
        let channel = dense_quasi_copy(config.phi(), d);
        let copied = apply_channel(&channel, embedded.as_matrix())?;
        Ok(DensePipeline {
            config: config.clone(),
            embedded,
            channel,
            outer: dense_outer_measurement(config)?,
            recovery: dense_recovery(d),
            copied,
        })
    }

    pub fn dim_total(&self) -> usize {
        2 * self.config.d()
    }

    pub fn embedded(&self) -> &DensityMatrix {
        &self.embedded
    }

    pub fn channel(&self) -> &QuantumInstrument {
        &self.channel
    }

    pub fn outer(&self) -> &QuantumInstrument {
        &self.outer
    }

    pub fn recovery(&self) -> &QuantumInstrument {
        &self.recovery
    }

    pub fn quasi_copied(&self) -> &ComplexMatrix {
        &self.copied
    }

    /// `P[ν]` for every outcome.
    pub fn outcome_probabilities(&self) -> Result<Vec<f64>> {
        Ok(outcome_distribution(&self.outer, &self.copied)?.probs().to_vec())
    }

    /// State after outcome `nu` (1-based), with `P[ν]`.
    pub fn after_measurement(&self, nu: usize) -> Result<(ComplexMatrix, f64)> {
        if nu == 0 || nu > self.config.n() {
            return Err(Error::OutcomeOutOfRange { outcome: nu, count: self.config.n() });
        }
        apply_outcome(&self.outer, &self.copied, nu - 1)
    }

    /// One trial. Consumes uniforms in the same order as the block engine.
    pub fn run(&self, stream: &mut TrialStream) -> Result<TrialRecord> {
        let nu_idx = outcome_distribution(&self.outer, &self.copied)?.sample_with(stream.uniform());
        let (post, p_nu) = apply_outcome(&self.outer, &self.copied, nu_idx)?;
        let rec_dist = outcome_distribution(&self.recovery, &post)?;
        let mu = if rec_dist.sample_with(stream.uniform()) == 0 { Recovery::Mu0 } else { Recovery::Mu1 };
        let (final_state, _) = apply_outcome(&self.recovery, &post, if mu.is_success() { 0 } else { 1 })?;
        let reduced = DensityMatrix::from_drifted(trace_out_ancilla(&final_state)?)?;
        let fid = fidelity(self.config.rho0(), &reduced)?;
        let (recovered, failure_state) = match mu {
            Recovery::Mu0 => (Some(reduced), None),
            Recovery::Mu1 => (None, Some(reduced)),
        };
        Ok(TrialRecord {
            trial: stream.index(),
            nu: nu_idx + 1,
            mu,
            p_nu,
            p_mu0_given_nu: rec_dist.probs()[0],
            recovered,
            failure_state,
            fidelity_to_rho0: fid,
        })
    }
}

pub fn run_dense_pipeline(config: &ProtocolConfig, stream: &mut TrialStream) -> Result<TrialRecord> {
    DensePipeline::new(config)?.run(stream)
}
