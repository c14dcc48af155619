//! Command-line front end. `main` returns the process exit code:
//! 0 when every verdict passes, 1 when a verdict fails, 2 for invalid input or errors.

pub mod report;

use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::batch::{run_batch, Engine, Engines};
use crate::config::{ConfigSpec, ProtocolConfig};
use crate::dense::{self, dense_outer_measurement, dense_quasi_copy, dense_recovery};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::protocol::{self, outer_measurement, quasi_copy_channel, recovery_instrument};
use crate::qcore::{validate_instrument, InstrumentKind, Labeled, Operator, QuantumInstrument};
use crate::qrm::tradeoff_check;

pub use report::*;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Block,
    Dense,
    Both,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Block => Engine::Block,
            EngineArg::Dense => Engine::Dense,
            EngineArg::Both => Engine::Both,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "quasicopy",
    version,
    about = "Outcome-independent state recovery after a measurement on a quasi-copy"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// JSON config file: {d, phi, n, inner_measurement, rho0, seed}.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[arg(long, global = true, value_enum, default_value_t = EngineArg::Block)]
    pub engine: EngineArg,

    /// Worker threads for Monte Carlo (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Tolerance for instrument completeness and state recovery.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Tolerance for block vs dense engine agreement.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub cross_tol: f64,

    /// Width of the statistical acceptance band, in standard deviations.
    #[arg(long, global = true, default_value_t = 3.0)]
    pub sigmas: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every instrument of the protocol for positivity and completeness.
    Validate,
    /// Run a single trial.
    Run {
        #[arg(long, default_value_t = 0)]
        trial: u64,
    },
    /// Run many trials and compare frequencies with the closed forms.
    Montecarlo {
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Write one JSON trial record per line to this file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Compare against the outcome-dependent reversal baseline over a grid of angles.
    Tradeoff {
        /// Comma-separated angles, e.g. `0,0.3,1.2`.
        #[arg(long, value_delimiter = ',', conflicts_with = "grid_points")]
        phi_grid: Option<Vec<f64>>,
        /// Evenly spaced angles over [0, π/2], endpoints included.
        #[arg(long, default_value_t = 11)]
        grid_points: usize,
    },
}

/// Parses `args` (including the program name), runs the command and writes the report.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => match emit(&cli.global, &report) {
            Ok(()) if report.pass() => EXIT_PASS,
            Ok(()) => EXIT_FAIL,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

pub fn main() -> i32 {
    run_cli(std::env::args_os())
}

fn emit(g: &GlobalArgs, report: &Report) -> Result<()> {
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Text => report.to_text(),
    };
    match &g.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn warn_phi(phi: f64) {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        eprintln!("warning: phi = {phi} lies outside [0, pi/2]; results are still computed");
    }
}

/// Loads the config, applying `--seed` before any family is expanded.
pub fn load_config(g: &GlobalArgs) -> Result<ProtocolConfig> {
    let path = g.config.as_ref().ok_or_else(|| Error::Config("--config <PATH> is required".into()))?;
    let mut spec = ConfigSpec::load(path)?;
    if let Some(seed) = g.seed {
        spec.seed = seed;
    }
    warn_phi(spec.phi);
    ProtocolConfig::try_from(spec.resolve()?)
}

pub fn execute(cli: &Cli) -> Result<Report> {
    let start = Instant::now();
    let g = &cli.global;
    let config = load_config(g)?;
    let mut report = match &cli.command {
        Command::Validate => Report::Validate(validate(&config, g)?),
        Command::Run { trial } => Report::Run(Box::new(run_one(&config, g, *trial)?)),
        Command::Montecarlo { trials, records } => {
            Report::Run(Box::new(montecarlo(&config, g, *trials, records.as_ref())?))
        }
        Command::Tradeoff { phi_grid, grid_points } => {
            let grid = match phi_grid {
                Some(v) => v.clone(),
                None => even_grid(*grid_points),
            };
            Report::Tradeoff(tradeoff(&config, &grid)?)
        }
    };
    report.set_elapsed(start.elapsed().as_secs_f64() * 1e3);
    Ok(report)
}

/// `points` angles evenly spaced over `[0, π/2]`.
pub fn even_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        k => (0..k).map(|i| FRAC_PI_2 * i as f64 / (k - 1) as f64).collect(),
    }
}

fn check<Op: Operator>(name: &str, inst: &QuantumInstrument<Op>, tol: f64) -> Result<NamedCheck> {
    Ok(NamedCheck { name: name.to_string(), report: validate_instrument(inst, tol)? })
}

fn max_layout_diff(block: &QuantumInstrument<crate::block::BlockOperator>, dense: &QuantumInstrument) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (b, d) in block.operators().iter().zip(dense.operators()) {
        worst = worst.max(linalg::max_abs_diff(&b.op.to_dense(), &dense::to_block_layout(&d.op)?));
    }
    Ok(worst)
}

fn validate(config: &ProtocolConfig, g: &GlobalArgs) -> Result<ValidateReport> {
    let (d, phi, tol) = (config.d(), config.phi(), g.tol);
    let inner_ops: Vec<Labeled<ComplexMatrix>> =
        config.inner().iter().enumerate().map(|(k, m)| Labeled::new(format!("M{}", k + 1), m.clone())).collect();
    let inner = QuantumInstrument::new(InstrumentKind::Measurement, inner_ops)?;
    let (k_block, outer_block, rec_block) =
        (quasi_copy_channel(phi, d), outer_measurement(config)?, recovery_instrument(d));
    let (k_dense, outer_dense, rec_dense) =
        (dense_quasi_copy(phi, d), dense_outer_measurement(config)?, dense_recovery(d));
    let checks = vec![
        check("inner", &inner, tol)?,
        check("quasi_copy.block", &k_block, tol)?,
        check("outer.block", &outer_block, tol)?,
        check("recovery.block", &rec_block, tol)?,
        check("quasi_copy.dense", &k_dense, tol)?,
        check("outer.dense", &outer_dense, tol)?,
        check("recovery.dense", &rec_dense, tol)?,
    ];
    let mut verdicts: Vec<Verdict> = checks
        .iter()
        .map(|c| {
            Verdict::new(
                &c.name,
                c.report.passed,
                format!("residual {:.3e}, min eigenvalue {:.3e}", c.report.residual, min_of(&c.report.min_eigenvalues)),
            )
        })
        .collect();
    let diff = max_layout_diff(&k_block, &k_dense)?
        .max(max_layout_diff(&outer_block, &outer_dense)?)
        .max(max_layout_diff(&rec_block, &rec_dense)?);
    verdicts.push(Verdict::new(
        "block_matches_dense",
        diff <= g.cross_tol,
        format!("max entry difference {diff:.3e} (tol {:e})", g.cross_tol),
    ));
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(ValidateReport { command: "validate".into(), d, n: config.n(), phi, checks, verdicts, pass, elapsed_ms: 0.0 })
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

fn analytic(config: &ProtocolConfig) -> Result<Analytic> {
    let p_nu = (1..=config.n()).map(|nu| protocol::outcome_probability(nu, config)).collect::<Result<Vec<_>>>()?;
    let posterior = match protocol::posterior_given_success(config) {
        Ok(dist) => Some(dist.probs().to_vec()),
        Err(Error::UndefinedPosterior { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Analytic { p_nu, p_rev: protocol::reversal_probability(config.phi()), posterior })
}

fn run_one(config: &ProtocolConfig, g: &GlobalArgs, trial: u64) -> Result<RunReport> {
    let engine: Engine = g.engine.into();
    let out = Engines::new(config, engine)?.run(config.seed(), trial)?;
    let rec = out.record;
    let mut verdicts = vec![];
    if rec.mu.is_success() {
        verdicts.push(Verdict::new(
            "recovered_state",
            1.0 - rec.fidelity_to_rho0 <= g.tol,
            format!("1 - fidelity = {:.3e}", 1.0 - rec.fidelity_to_rho0),
        ));
    }
    let agreement = out.comparison.map(|(same, diff)| {
        let pass = same && diff <= g.cross_tol;
        verdicts.push(Verdict::new("engines_agree", pass, format!("outcomes equal: {same}, state diff {diff:.3e}")));
        Agreement { trials: 1, outcome_mismatches: u64::from(!same), max_state_diff: diff, tol: g.cross_tol, pass }
    });
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(RunReport {
        command: "run".into(),
        engine,
        seed: config.seed(),
        config: config.to_spec(),
        analytic: analytic(config)?,
        record: Some(rec),
        empirical: None,
        agreement,
        verdicts,
        pass,
        elapsed_ms: 0.0,
    })
}

fn montecarlo(config: &ProtocolConfig, g: &GlobalArgs, trials: u64, records: Option<&PathBuf>) -> Result<RunReport> {
    let engine: Engine = g.engine.into();
    let analytic = analytic(config)?;
    let mut writer = records.map(|p| File::create(p).map(BufWriter::new)).transpose()?;
    let tally = run_batch(config, engine, config.seed(), trials, g.threads, |rec| {
        if let Some(w) = writer.as_mut() {
            serde_json::to_writer(&mut *w, rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    if let Some(mut w) = writer {
        w.flush()?;
    }

    let k = g.sigmas;
    let p_mu0 = Estimate::binomial(analytic.p_rev, tally.successes, tally.trials, k);
    let p_nu: Vec<Estimate> =
        analytic.p_nu.iter().zip(&tally.nu_counts).map(|(&p, &c)| Estimate::binomial(p, c, tally.trials, k)).collect();
    let posterior = match (&analytic.posterior, tally.successes) {
        (Some(post), s) if s > 0 => PosteriorEstimate {
            status: PosteriorStatus::Defined,
            entries: post.iter().zip(&tally.success_nu_counts).map(|(&p, &c)| Estimate::binomial(p, c, s, k)).collect(),
        },
        _ => PosteriorEstimate { status: PosteriorStatus::Undefined, entries: vec![] },
    };

    let mut verdicts = vec![Verdict::new(
        "p_mu0",
        p_mu0.pass,
        format!("observed {:.6}, expected {:.6} +/- {:.6}", p_mu0.observed, p_mu0.expected, p_mu0.band),
    )];
    let worst_nu = p_nu.iter().map(|e| (e.observed - e.expected).abs() - e.band).fold(f64::NEG_INFINITY, f64::max);
    verdicts.push(Verdict::new(
        "p_nu",
        p_nu.iter().all(|e| e.pass),
        format!("largest excess over band {worst_nu:.3e}"),
    ));
    match posterior.status {
        PosteriorStatus::Defined => verdicts.push(Verdict::new(
            "posterior_given_mu0",
            posterior.entries.iter().all(|e| e.pass),
            format!("{} successes", tally.successes),
        )),
        // Nothing to test, which is not a failure.
        PosteriorStatus::Undefined => {
            verdicts.push(Verdict::new("posterior_given_mu0", true, "undefined: no successful trials"))
        }
    }
    if tally.successes > 0 {
        verdicts.push(Verdict::new(
            "recovered_state",
            1.0 - tally.min_success_fidelity <= g.tol,
            format!("worst 1 - fidelity = {:.3e}", 1.0 - tally.min_success_fidelity),
        ));
    }
    let agreement = (engine == Engine::Both).then(|| {
        let pass = tally.engine_mismatches == 0 && tally.max_engine_state_diff <= g.cross_tol;
        verdicts.push(Verdict::new(
            "engines_agree",
            pass,
            format!("{} mismatches, max state diff {:.3e}", tally.engine_mismatches, tally.max_engine_state_diff),
        ));
        Agreement {
            trials: tally.trials,
            outcome_mismatches: tally.engine_mismatches,
            max_state_diff: tally.max_engine_state_diff,
            tol: g.cross_tol,
            pass,
        }
    });
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(RunReport {
        command: "montecarlo".into(),
        engine,
        seed: config.seed(),
        config: config.to_spec(),
        analytic,
        record: None,
        empirical: Some(Empirical {
            trials: tally.trials,
            successes: tally.successes,
            p_mu0,
            p_nu,
            posterior,
            min_success_fidelity: tally.min_success_fidelity,
        }),
        agreement,
        verdicts,
        pass,
        elapsed_ms: 0.0,
    })
}

fn tradeoff(config: &ProtocolConfig, grid: &[f64]) -> Result<TradeoffSweep> {
    let mut rows = Vec::with_capacity(grid.len());
    for &phi in grid {
        if phi != config.phi() {
            warn_phi(phi);
        }
        rows.push(tradeoff_check(&config.with_phi(phi))?);
    }
    let series = Series {
        phi: rows.iter().map(|r| r.phi).collect(),
        p_ours: rows.iter().map(|r| r.p_ours).collect(),
        p_qrm: rows.iter().map(|r| r.p_qrm).collect(),
    };
    let inconsistent: Vec<f64> = rows.iter().filter(|r| !r.consistent).map(|r| r.phi).collect();
    let regime = match rows.first() {
        Some(r) if r.condition_holds => "every M^dag M is rank-deficient, expecting p_qrm = p_ours",
        Some(_) => "some M^dag M has full rank, expecting p_qrm >= p_ours",
        None => "empty grid",
    };
    let verdicts = vec![Verdict::new(
        "tradeoff",
        inconsistent.is_empty(),
        if inconsistent.is_empty() {
            regime.to_string()
        } else {
            format!("{regime}; inconsistent at phi = {inconsistent:?}")
        },
    )];
    let pass = verdicts.iter().all(|v| v.pass);
    Ok(TradeoffSweep {
        command: "tradeoff".into(),
        config: config.to_spec(),
        rows,
        series,
        verdicts,
        pass,
        elapsed_ms: 0.0,
    })
}
