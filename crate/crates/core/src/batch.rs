//! Parallel trial execution with per-trial random streams.
//!
//! Trial `i` always uses `TrialStream::new(seed, i)` and results are reduced in trial
//! order, so every aggregate is independent of the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ProtocolConfig;
use crate::dense::DensePipeline;
use crate::error::{Error, Result};
use crate::linalg;
use crate::protocol::BlockPipeline;
use crate::qcore::TrialStream;
use crate::trial::TrialRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Block,
    Dense,
    /// Runs both and compares them trial by trial.
    Both,
}

const CHUNK: u64 = 8192;

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        b = b.num_threads(k.max(1));
    }
    b.build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Maps `f` over trial indices `start..start + count`, collecting in index order.
pub fn run_indexed<T, F>(start: u64, count: u64, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    pool(threads)?.install(|| (start..start + count).into_par_iter().map(&f).collect())
}

/// Per-trial result of running one or both engines.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineTrial {
    /// The primary record: block engine unless only the dense engine ran.
    pub record: TrialRecord,
    /// For `Engine::Both`: whether `(ν, μ)` matched and the largest state discrepancy.
    pub comparison: Option<(bool, f64)>,
}

/// Both pipelines built once for a config.
pub struct Engines {
    engine: Engine,
    block: Option<BlockPipeline>,
    dense: Option<DensePipeline>,
}

impl Engines {
    pub fn new(config: &ProtocolConfig, engine: Engine) -> Result<Self> {
        let block = matches!(engine, Engine::Block | Engine::Both).then(|| BlockPipeline::new(config)).transpose()?;
        let dense = matches!(engine, Engine::Dense | Engine::Both).then(|| DensePipeline::new(config)).transpose()?;
        Ok(Engines { engine, block, dense })
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn run(&self, seed: u64, index: u64) -> Result<EngineTrial> {
        let block = self.block.as_ref().map(|p| p.run(&mut TrialStream::new(seed, index))).transpose()?;
        let dense = self.dense.as_ref().map(|p| p.run(&mut TrialStream::new(seed, index))).transpose()?;
        match (block, dense) {
            (Some(b), Some(d)) => {
                let same = b.nu == d.nu && b.mu == d.mu;
                let diff = match (b.final_state(), d.final_state()) {
                    (Some(x), Some(y)) => linalg::max_abs_diff(x.as_matrix(), y.as_matrix()),
                    _ => f64::INFINITY,
                };
                Ok(EngineTrial { record: b, comparison: Some((same, diff)) })
            }
            (Some(r), None) | (None, Some(r)) => Ok(EngineTrial { record: r, comparison: None }),
            (None, None) => unreachable!("at least one engine is always built"),
        }
    }
}

/// Aggregate statistics over a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    pub nu_counts: Vec<u64>,
    pub successes: u64,
    /// `ν` histogram restricted to successful trials.
    pub success_nu_counts: Vec<u64>,
    /// Smallest fidelity to the input over successful trials (1 when there are none).
    pub min_success_fidelity: f64,
    /// Trials where block and dense engines disagreed on `(ν, μ)`.
    pub engine_mismatches: u64,
    pub max_engine_state_diff: f64,
}

impl Tally {
    pub fn new(n: usize) -> Self {
        Tally {
            trials: 0,
            nu_counts: vec![0; n],
            successes: 0,
            success_nu_counts: vec![0; n],
            min_success_fidelity: 1.0,
            engine_mismatches: 0,
            max_engine_state_diff: 0.0,
        }
    }

    pub fn add(&mut self, t: &EngineTrial) {
        let r = &t.record;
        self.trials += 1;
        self.nu_counts[r.nu - 1] += 1;
        if r.mu.is_success() {
            self.successes += 1;
            self.success_nu_counts[r.nu - 1] += 1;
            self.min_success_fidelity = self.min_success_fidelity.min(r.fidelity_to_rho0);
        }
        if let Some((same, diff)) = t.comparison {
            if !same {
                self.engine_mismatches += 1;
            }
            self.max_engine_state_diff = self.max_engine_state_diff.max(diff);
        }
    }
}

/// Runs `trials` trials in chunks, handing every record to `sink` in trial order.
pub fn run_batch(
    config: &ProtocolConfig,
    engine: Engine,
    seed: u64,
    trials: u64,
    threads: Option<usize>,
    mut sink: impl FnMut(&TrialRecord) -> Result<()>,
) -> Result<Tally> {
    let engines = Engines::new(config, engine)?;
    let mut tally = Tally::new(config.n());
    let mut start = 0;
    while start < trials {
        let count = CHUNK.min(trials - start);
        let chunk = run_indexed(start, count, threads, |i| engines.run(seed, i))?;
        for t in &chunk {
            tally.add(t);
            sink(&t.record)?;
        }
        start += count;
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::projector;
    use crate::qcore::DensityMatrix;

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg =
            ProtocolConfig::new(0.8, vec![projector(2, 0), projector(2, 1)], DensityMatrix::maximally_mixed(2), 0)
                .unwrap();
        let a = run_batch(&cfg, Engine::Both, 5, 3000, Some(1), |_| Ok(())).unwrap();
        let b = run_batch(&cfg, Engine::Both, 5, 3000, Some(4), |_| Ok(())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.engine_mismatches, 0);
        assert_eq!(a.trials, 3000);
    }
}
