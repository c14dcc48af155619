use serde::{Deserialize, Serialize};

use crate::batch::Engine;
use crate::config::ConfigSpec;
use crate::qcore::InstrumentReport;
use crate::qrm::TradeoffReport;
use crate::trial::TrialRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Verdict { name: name.to_string(), pass, detail: detail.into() }
    }
}

/// An empirical frequency checked against its closed form with a `k·σ` binomial band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub expected: f64,
    pub observed: f64,
    pub count: u64,
    pub samples: u64,
    pub sigma: f64,
    pub band: f64,
    pub pass: bool,
}

impl Estimate {
    pub fn binomial(expected: f64, count: u64, samples: u64, sigmas: f64) -> Self {
        let observed = if samples == 0 { 0.0 } else { count as f64 / samples as f64 };
        let sigma = if samples == 0 { 0.0 } else { (expected * (1.0 - expected) / samples as f64).max(0.0).sqrt() };
        let band = sigmas * sigma;
        // A degenerate expectation (0 or 1) has σ = 0 and must be matched up to rounding.
        let pass = (observed - expected).abs() <= band + 1e-12;
        Estimate { expected, observed, count, samples, sigma, band, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PosteriorStatus {
    Defined,
    /// No successful trials (or `P[μ₀] = 0`), so `P[ν|μ₀]` has no value.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorEstimate {
    pub status: PosteriorStatus,
    pub entries: Vec<Estimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    pub p_nu: Vec<f64>,
    pub p_rev: f64,
    /// `None` when `P[μ₀] = 0`.
    pub posterior: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub trials: u64,
    pub outcome_mismatches: u64,
    pub max_state_diff: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedCheck {
    pub name: String,
    pub report: InstrumentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub command: String,
    pub d: usize,
    pub n: usize,
    pub phi: f64,
    pub checks: Vec<NamedCheck>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub engine: Engine,
    pub seed: u64,
    pub config: ConfigSpec,
    pub analytic: Analytic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record: Option<TrialRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical: Option<Empirical>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<Agreement>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Empirical {
    pub trials: u64,
    pub successes: u64,
    pub p_mu0: Estimate,
    pub p_nu: Vec<Estimate>,
    pub posterior: PosteriorEstimate,
    pub min_success_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub phi: Vec<f64>,
    pub p_ours: Vec<f64>,
    pub p_qrm: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSweep {
    pub command: String,
    pub config: ConfigSpec,
    pub rows: Vec<TradeoffReport>,
    pub series: Series,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    Validate(ValidateReport),
    Run(Box<RunReport>),
    Tradeoff(TradeoffSweep),
}

impl Report {
    pub fn pass(&self) -> bool {
        match self {
            Report::Validate(r) => r.pass,
            Report::Run(r) => r.pass,
            Report::Tradeoff(r) => r.pass,
        }
    }

    pub fn verdicts(&self) -> &[Verdict] {
        match self {
            Report::Validate(r) => &r.verdicts,
            Report::Run(r) => &r.verdicts,
            Report::Tradeoff(r) => &r.verdicts,
        }
    }

    pub fn set_elapsed(&mut self, ms: f64) {
        match self {
            Report::Validate(r) => r.elapsed_ms = ms,
            Report::Run(r) => r.elapsed_ms = ms,
            Report::Tradeoff(r) => r.elapsed_ms = ms,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        match self {
            Report::Validate(r) => {
                line(format!("validate: d={} n={} phi={}", r.d, r.n, r.phi));
                for c in &r.checks {
                    line(format!(
                        "  {:<22} residual={:.3e} positive={}",
                        c.name,
                        c.report.residual,
                        c.report.positive.iter().all(|&p| p)
                    ));
                }
            }
            Report::Run(r) => {
                line(format!("{}: engine={:?} seed={}", r.command, r.engine, r.seed));
                line(format!("  P[rev] = {:.12}", r.analytic.p_rev));
                for (k, p) in r.analytic.p_nu.iter().enumerate() {
                    line(format!("  P[nu={}] = {:.12}", k + 1, p));
                }
                if let Some(rec) = &r.record {
                    line(format!(
                        "  trial {}: nu={} mu={:?} p_nu={:.6} p_mu0|nu={:.6} fidelity={:.12}",
                        rec.trial, rec.nu, rec.mu, rec.p_nu, rec.p_mu0_given_nu, rec.fidelity_to_rho0
                    ));
                }
                if let Some(e) = &r.empirical {
                    line(format!(
                        "  P[mu0]: observed {:.5} expected {:.5} +/- {:.5} ({} / {})",
                        e.p_mu0.observed, e.p_mu0.expected, e.p_mu0.band, e.successes, e.trials
                    ));
                    match e.posterior.status {
                        PosteriorStatus::Undefined => line("  posterior P[nu|mu0]: undefined (no successes)".into()),
                        PosteriorStatus::Defined => {
                            for (k, est) in e.posterior.entries.iter().enumerate() {
                                line(format!(
                                    "  P[nu={}|mu0]: observed {:.5} expected {:.5} +/- {:.5}",
                                    k + 1,
                                    est.observed,
                                    est.expected,
                                    est.band
                                ));
                            }
                        }
                    }
                }
                if let Some(a) = &r.agreement {
                    line(format!(
                        "  engines: {} mismatches over {} trials, max state diff {:.3e}",
                        a.outcome_mismatches, a.trials, a.max_state_diff
                    ));
                }
            }
            Report::Tradeoff(r) => {
                line("tradeoff:        phi          p_ours           p_qrm           delta  condition".into());
                for row in &r.rows {
                    line(format!(
                        "  {:>16.12} {:>15.12} {:>15.12} {:>15.3e}  {}",
                        row.phi, row.p_ours, row.p_qrm, row.delta, row.condition_holds
                    ));
                }
            }
        }
        for v in self.verdicts() {
            line(format!("  [{}] {}: {}", if v.pass { "PASS" } else { "FAIL" }, v.name, v.detail));
        }
        line(format!("result: {}", if self.pass() { "PASS" } else { "FAIL" }));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_band() {
        let e = Estimate::binomial(0.5, 50_300, 100_000, 3.0);
        assert!((e.sigma - 0.001_581_138_830_084_19).abs() < 1e-12);
        assert!(e.pass);
        assert!(!Estimate::binomial(0.5, 50_600, 100_000, 3.0).pass);
        assert!(Estimate::binomial(1.0, 10, 10, 3.0).pass);
        assert!(!Estimate::binomial(1.0, 9, 10, 3.0).pass);
    }
}
