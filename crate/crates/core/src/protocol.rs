//! The direct-sum recovery protocol on block operators.
//!
//! 1. Embed `ρ` with an ancilla as `ρ ⊕ 0`.
//! 2. Quasi-copy with the Kraus pair
//!    `K₀ = (cos φ·1) ⊕ 0 + (sin φ·1) ⊞ 0`, `K₁ = 0 ⊕ (−cos φ·1) + 0 ⊞ (sin φ·1)`,
//!    giving `(cos²φ·ρ) ⊕ (sin²φ·ρ)`.
//! 3. Measure only the copy with `{(1/√n)·1 ⊕ M_ν}`.
//! 4. Recover with `{1 ⊕ 0, 0 ⊕ 1}`. This instrument takes no `ν`; post-selecting `μ₀`
//!    returns exactly `ρ ⊕ 0`, which happens with total probability `cos²φ`.

use serde::{Deserialize, Serialize};

use crate::block::{BlockOperator, Structure};
use crate::config::ProtocolConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::qcore::{
    apply_channel, apply_outcome, fidelity, outcome_distribution, DensityMatrix, InstrumentKind, Labeled,
    OutcomeDistribution, QuantumInstrument, TrialStream, ZERO_PROBABILITY,
};
use crate::trial::{Recovery, TrialRecord};

/// `ρ ⊕ 0`; every block but `diag_top` is structurally zero.
pub fn embed_with_ancilla(rho: &DensityMatrix) -> BlockOperator {
    BlockOperator::from_blocks(rho.dim(), Some(rho.as_matrix().clone()), None, None, None)
        .expect("square density matrix")
}

/// Partial trace over the ancilla: `A ⊕ B ↦ A + B` (off-diagonal blocks drop out).
pub fn reduce_ancilla(state: &BlockOperator) -> ComplexMatrix {
    state.diag_top_dense() + state.diag_bot_dense()
}

/// The Kraus pair `{K₀, K₁}` that moves amplitude `sin φ` into the orthogonal complement.
pub fn quasi_copy_channel(phi: f64, d: usize) -> QuantumInstrument<BlockOperator> {
    let (c, s) = (phi.cos(), phi.sin());
    let one = linalg::identity(d);
    let k0 = BlockOperator::from_blocks(d, Some(one.scale(c)), None, Some(one.scale(s)), None);
    // −cos φ on the lower block is the sign K₁ is usually written with; it only ever
    // enters through K₁ ρ K₁†.
    let k1 = BlockOperator::from_blocks(d, None, Some(one.scale(-c)), None, Some(one.scale(s)));
    QuantumInstrument::new(
        InstrumentKind::Channel,
        vec![Labeled::new("K0", k0.expect("d x d blocks")), Labeled::new("K1", k1.expect("d x d blocks"))],
    )
    .expect("two operators of equal dimension")
}

fn is_zero_block(m: Option<&ComplexMatrix>) -> bool {
    m.is_none_or(|m| m.iter().all(|z| *z == linalg::ZERO))
}

/// Closed-form action of the quasi-copy channel on `ρ ⊕ 0`:
/// `(cos²φ·ρ) ⊕ (sin²φ·ρ)`.
pub fn apply_quasi_copy(state: &BlockOperator, phi: f64) -> Result<BlockOperator> {
    if !is_zero_block(state.off_top()) || !is_zero_block(state.off_bot()) {
        return Err(Error::NotEmbeddedState("off-diagonal blocks are non-zero".into()));
    }
    if !is_zero_block(state.diag_bot()) {
        return Err(Error::NotEmbeddedState("lower diagonal block is non-zero".into()));
    }
    let rho = state.diag_top_dense();
    BlockOperator::direct_sum(rho.scale(phi.cos().powi(2)), rho.scale(phi.sin().powi(2)))
}

/// `{(1/√n)·1 ⊕ M_ν}` without checking completeness of the inner family.
pub fn outer_measurement_from(inner: &[ComplexMatrix]) -> Result<QuantumInstrument<BlockOperator>> {
    let first = inner.first().ok_or(Error::EmptyInstrument)?;
    let d = linalg::ensure_square(first)?;
    let top = linalg::identity(d).unscale((inner.len() as f64).sqrt());
    let ops = inner
        .iter()
        .enumerate()
        .map(|(k, m)| Ok(Labeled::new(format!("nu{}", k + 1), BlockOperator::direct_sum(top.clone(), m.clone())?)))
        .collect::<Result<Vec<_>>>()?;
    QuantumInstrument::new(InstrumentKind::Measurement, ops)
}

/// The measurement that touches only the orthogonal complement.
pub fn outer_measurement(config: &ProtocolConfig) -> Result<QuantumInstrument<BlockOperator>> {
    let residual = linalg::completeness_residual(config.inner(), config.d());
    if residual > crate::config::COMPLETENESS_TOL {
        return Err(Error::IncompleteInstrument { residual });
    }
    outer_measurement_from(config.inner())
}

/// Closed form `P[ν] = cos²φ/n + sin²φ·Tr(M_ν ρ M_ν†)`, `ν` 1-based.
pub fn outcome_probability(nu: usize, config: &ProtocolConfig) -> Result<f64> {
    let n = config.n();
    if nu == 0 || nu > n {
        return Err(Error::OutcomeOutOfRange { outcome: nu, count: n });
    }
    let m = &config.inner()[nu - 1];
    let inner = linalg::sandwich(m, config.rho0().as_matrix()).trace().re;
    Ok(config.cos2() / n as f64 + config.sin2() * inner)
}

/// `{R_μ₀ = 1 ⊕ 0, R_μ₁ = 0 ⊕ 1}`. Depends on `d` only.
pub fn recovery_instrument(d: usize) -> QuantumInstrument<BlockOperator> {
    let one = linalg::identity(d);
    let r0 = BlockOperator::from_blocks(d, Some(one.clone()), None, None, None).expect("d x d");
    let r1 = BlockOperator::from_blocks(d, None, Some(one), None, None).expect("d x d");
    QuantumInstrument::new(InstrumentKind::Measurement, vec![Labeled::new("mu0", r0), Labeled::new("mu1", r1)])
        .expect("two operators of equal dimension")
}

/// `P[rev] = cos²φ`.
pub fn reversal_probability(phi: f64) -> f64 {
    phi.cos().powi(2)
}

/// Bayes posterior `P[ν | μ₀] = P[μ₀|ν] P[ν] / P[μ₀]` from the closed-form ingredients,
/// with `P[μ₀|ν] = cos²φ / (n P[ν])`.
pub fn posterior_given_success(config: &ProtocolConfig) -> Result<OutcomeDistribution> {
    let n = config.n() as f64;
    let p_nu = (1..=config.n()).map(|nu| outcome_probability(nu, config)).collect::<Result<Vec<_>>>()?;
    let joint: Vec<f64> =
        p_nu.iter().map(|&p| if p > ZERO_PROBABILITY { (config.cos2() / (n * p)) * p } else { 0.0 }).collect();
    let p_success: f64 = joint.iter().sum();
    if p_success <= ZERO_PROBABILITY {
        return Err(Error::UndefinedPosterior { p_success });
    }
    OutcomeDistribution::new(joint.into_iter().map(|j| j / p_success).collect())
}

/// Outcome statistics computed by pushing the state through the generic instrument
/// machinery (channel, outer measurement, recovery) rather than the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineAnalysis {
    pub p_nu: Vec<f64>,
    /// `P[μ₀|ν]`; zero for outcomes that cannot occur.
    pub p_mu0_given_nu: Vec<f64>,
    pub p_mu0: f64,
    /// `None` when `P[μ₀]` vanishes.
    pub posterior: Option<Vec<f64>>,
}

pub fn analyze_pipeline(config: &ProtocolConfig) -> Result<PipelineAnalysis> {
    let d = config.d();
    let copied = apply_channel(&quasi_copy_channel(config.phi(), d), &embed_with_ancilla(config.rho0()))?;
    let outer = outer_measurement(config)?;
    let recovery = recovery_instrument(d);
    let p_nu = outcome_distribution(&outer, &copied)?.probs().to_vec();
    let mut p_mu0_given_nu = Vec::with_capacity(p_nu.len());
    for (x, &p) in p_nu.iter().enumerate() {
        if p <= ZERO_PROBABILITY {
            p_mu0_given_nu.push(0.0);
            continue;
        }
        let (post, _) = apply_outcome(&outer, &copied, x)?;
        p_mu0_given_nu.push(outcome_distribution(&recovery, &post)?.probs()[0]);
    }
    let joint: Vec<f64> = p_nu.iter().zip(&p_mu0_given_nu).map(|(a, b)| a * b).collect();
    let p_mu0: f64 = joint.iter().sum();
    let posterior = (p_mu0 > ZERO_PROBABILITY).then(|| joint.iter().map(|j| j / p_mu0).collect());
    Ok(PipelineAnalysis { p_nu, p_mu0_given_nu, p_mu0, posterior })
}

/// The protocol with its instruments and the quasi-copied state built once, so that each
/// trial only samples and updates.
#[derive(Debug, Clone)]
pub struct BlockPipeline {
    config: ProtocolConfig,
    copied: BlockOperator,
    outer: QuantumInstrument<BlockOperator>,
    recovery: QuantumInstrument<BlockOperator>,
}

impl BlockPipeline {
    pub fn new(config: &ProtocolConfig) -> Result<Self> {
        let embedded = embed_with_ancilla(config.rho0());
        let copied = apply_quasi_copy(&embedded, config.phi())?;
        Ok(BlockPipeline {
            config: config.clone(),
            copied,
            outer: outer_measurement(config)?,
            recovery: recovery_instrument(config.d()),
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    pub fn quasi_copied(&self) -> &BlockOperator {
        &self.copied
    }

    pub fn outer(&self) -> &QuantumInstrument<BlockOperator> {
        &self.outer
    }

    pub fn recovery(&self) -> &QuantumInstrument<BlockOperator> {
        &self.recovery
    }

    /// State after outcome `nu` (1-based) of the outer measurement, with `P[ν]`.
    pub fn after_measurement(&self, nu: usize) -> Result<(BlockOperator, f64)> {
        if nu == 0 || nu > self.config.n() {
            return Err(Error::OutcomeOutOfRange { outcome: nu, count: self.config.n() });
        }
        apply_outcome(&self.outer, &self.copied, nu - 1)
    }

    /// State after outcome `nu` and recovery outcome `mu`, with `P[μ|ν]`.
    pub fn branch(&self, nu: usize, mu: Recovery) -> Result<(BlockOperator, f64)> {
        let (post, _) = self.after_measurement(nu)?;
        apply_outcome(&self.recovery, &post, mu_index(mu))
    }

    /// One trial. Draws exactly two uniforms: the first selects `ν`, the second `μ`.
    pub fn run(&self, stream: &mut TrialStream) -> Result<TrialRecord> {
        let outer_dist = outcome_distribution(&self.outer, &self.copied)?;
        let nu_idx = outer_dist.sample_with(stream.uniform());
        let (post, p_nu) = apply_outcome(&self.outer, &self.copied, nu_idx)?;

        let rec_dist = outcome_distribution(&self.recovery, &post)?;
        let mu = if rec_dist.sample_with(stream.uniform()) == 0 { Recovery::Mu0 } else { Recovery::Mu1 };
        let (final_state, _) = apply_outcome(&self.recovery, &post, mu_index(mu))?;
        let reduced = DensityMatrix::from_drifted(reduce_ancilla(&final_state))?;
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

fn mu_index(mu: Recovery) -> usize {
    match mu {
        Recovery::Mu0 => 0,
        Recovery::Mu1 => 1,
    }
}

/// Runs one protocol trial end to end.
pub fn run_protocol(config: &ProtocolConfig, stream: &mut TrialStream) -> Result<TrialRecord> {
    BlockPipeline::new(config)?.run(stream)
}

/// True when the state has the shape `A ⊕ 0` with structurally absent other blocks.
pub fn is_embedded(state: &BlockOperator) -> bool {
    state.structure() == Structure::DirectSum && state.diag_bot().is_none()
}
