//! Conventional reversible measurement (QRM) and its trade-off against the direct-sum scheme.
//!
//! After outcome `ν` of a regular measurement `{m_ν}`, QRM applies a recovery measurement
//! whose success operator is `R_ν = λ_min(m_ν)·m_ν⁻¹`. The constant is the largest that
//! keeps `R_ν†R_ν ≤ 1`, so the success probability given `ν` is
//! `λ_min² / P[ν]` and the total is `Σ_ν λ_min(m_ν)²`, independent of the input.

use serde::{Deserialize, Serialize};

use crate::config::{ProtocolConfig, COMPLETENESS_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::qcore::{
    apply_outcome, fidelity, outcome_distribution, DensityMatrix, InstrumentKind, Labeled, QuantumInstrument,
    TrialStream,
};
use crate::trial::{Recovery, TrialRecord};

/// A complete measurement `{m_ν}` acting directly on the system.
#[derive(Debug, Clone, PartialEq)]
pub struct QrmInstrument {
    operators: Vec<ComplexMatrix>,
}

impl QrmInstrument {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyInstrument)?;
        let d = linalg::ensure_square(first)?;
        for m in &operators {
            linalg::ensure_shape(m, d)?;
        }
        let residual = linalg::completeness_residual(&operators, d);
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteInstrument { residual });
        }
        Ok(QrmInstrument { operators })
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn as_instrument(&self) -> QuantumInstrument {
        QuantumInstrument::new(
            InstrumentKind::Measurement,
            self.operators.iter().enumerate().map(|(k, m)| Labeled::new(format!("nu{}", k + 1), m.clone())).collect(),
        )
        .expect("validated on construction")
    }

    /// `λ_min(m_ν)²` for each outcome, i.e. the smallest eigenvalue of `m_ν†m_ν`.
    pub fn min_gram_eigenvalues(&self) -> Vec<f64> {
        self.operators.iter().map(|m| linalg::min_eigenvalue(&(m.adjoint() * m)).max(0.0)).collect()
    }
}

/// `R = λ_min(m)·m⁻¹`; its largest singular value is exactly one.
pub fn qrm_reversal_operator(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    linalg::ensure_square(m)?;
    let smin = linalg::min_singular_value(m);
    if smin <= linalg::SINGULAR_THRESHOLD {
        return Err(Error::SingularOperator { min_singular_value: smin });
    }
    Ok(linalg::inverse(m)?.scale(smin))
}

/// `Σ_ν min-eig(m_ν†m_ν)`.
pub fn qrm_max_reversal_probability(inst: &QrmInstrument) -> f64 {
    inst.min_gram_eigenvalues().iter().sum()
}

/// The QRM measurement with the same statistics as the direct-sum outer measurement:
/// `m_ν = √(cos²φ/n·1 + sin²φ·M_ν†M_ν)`, taking the Hermitian PSD root.
pub fn matched_qrm_instrument(config: &ProtocolConfig) -> Result<QrmInstrument> {
    let d = config.d();
    let base = linalg::identity(d).scale(config.cos2() / config.n() as f64);
    let ops =
        config.inner().iter().map(|m| linalg::psd_sqrt(&(&base + (m.adjoint() * m).scale(config.sin2())))).collect();
    QrmInstrument::new(ops)
}

/// Outcome of comparing QRM and direct-sum reversal probabilities for one `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffReport {
    pub phi: f64,
    pub p_qrm: f64,
    pub p_ours: f64,
    /// `p_qrm − p_ours`.
    pub delta: f64,
    /// `min-eig(M_ν†M_ν)` for each inner operator.
    pub min_eigs: Vec<f64>,
    /// Every `M_ν†M_ν` is rank-deficient, the regime in which the two schemes tie.
    pub condition_holds: bool,
    /// `|delta| ≤ 1e-10` when the condition holds; otherwise `p_qrm` matches
    /// `cos²φ + sin²φ·Σ min-eig` and is at least `p_ours`.
    pub consistent: bool,
}

pub const RANK_DEFICIENT_TOL: f64 = 1e-12;
pub const TRADEOFF_TOL: f64 = 1e-10;

pub fn tradeoff_check(config: &ProtocolConfig) -> Result<TradeoffReport> {
    let p_qrm = qrm_max_reversal_probability(&matched_qrm_instrument(config)?);
    let p_ours = crate::protocol::reversal_probability(config.phi());
    let min_eigs: Vec<f64> =
        config.inner().iter().map(|m| linalg::min_eigenvalue(&(m.adjoint() * m)).max(0.0)).collect();
    let condition_holds = min_eigs.iter().all(|&e| e <= RANK_DEFICIENT_TOL);
    let delta = p_qrm - p_ours;
    let consistent = if condition_holds {
        delta.abs() <= TRADEOFF_TOL
    } else {
        let predicted = config.cos2() + config.sin2() * min_eigs.iter().sum::<f64>();
        (p_qrm - predicted).abs() <= TRADEOFF_TOL && delta >= -TRADEOFF_TOL
    };
    Ok(TradeoffReport { phi: config.phi(), p_qrm, p_ours, delta, min_eigs, condition_holds, consistent })
}

/// Two-outcome recovery for outcome `m`: `{R, √(1 − R†R)}`. Built from `m`, so it differs
/// between outcomes.
pub fn qrm_recovery_instrument(m: &ComplexMatrix) -> Result<QuantumInstrument> {
    let r = qrm_reversal_operator(m)?;
    let d = r.nrows();
    let complement = linalg::psd_sqrt(&(linalg::identity(d) - r.adjoint() * &r));
    QuantumInstrument::new(
        InstrumentKind::Measurement,
        vec![Labeled::new("success", r), Labeled::new("failure", complement)],
    )
}

/// One QRM trial: sample `ν`, build the `ν`-dependent recovery, sample it. Draws two
/// uniforms in the same order as the direct-sum engines.
pub fn run_qrm_protocol(inst: &QrmInstrument, rho: &DensityMatrix, stream: &mut TrialStream) -> Result<TrialRecord> {
    let measurement = inst.as_instrument();
    let dist = outcome_distribution(&measurement, rho.as_matrix())?;
    let nu_idx = dist.sample_with(stream.uniform());
    let (post, p_nu) = apply_outcome(&measurement, rho.as_matrix(), nu_idx)?;

    let recovery = qrm_recovery_instrument(&inst.operators()[nu_idx])?;
    let rec_dist = outcome_distribution(&recovery, &post)?;
    let mu = if rec_dist.sample_with(stream.uniform()) == 0 { Recovery::Mu0 } else { Recovery::Mu1 };
    let (final_state, _) = apply_outcome(&recovery, &post, if mu.is_success() { 0 } else { 1 })?;
    let final_state = DensityMatrix::from_drifted(final_state)?;
    let fid = fidelity(rho, &final_state)?;
    let (recovered, failure_state) = match mu {
        Recovery::Mu0 => (Some(final_state), None),
        Recovery::Mu1 => (None, Some(final_state)),
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
