use serde::{Deserialize, Serialize};

use crate::qcore::DensityMatrix;

/// Outcome of the recovery measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Recovery {
    /// Success branch: the input state is restored.
    Mu0,
    Mu1,
}

impl Recovery {
    pub fn is_success(self) -> bool {
        self == Recovery::Mu0
    }
}

/// One end-to-end run of a recovery protocol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// Sampled measurement outcome, 1-based.
    pub nu: usize,
    pub mu: Recovery,
    /// `P[ν]` of the sampled outcome.
    pub p_nu: f64,
    /// `P[μ₀ | ν]` for the sampled `ν`, whichever recovery outcome was drawn.
    pub p_mu0_given_nu: f64,
    /// Reduced system state after a successful recovery.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovered: Option<DensityMatrix>,
    /// Reduced system state left by the failure branch, kept for diagnostics only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_state: Option<DensityMatrix>,
    /// Fidelity of whichever final state was produced to the input state.
    pub fidelity_to_rho0: f64,
}

impl TrialRecord {
    pub fn final_state(&self) -> Option<&DensityMatrix> {
        self.recovered.as_ref().or(self.failure_state.as_ref())
    }
}
