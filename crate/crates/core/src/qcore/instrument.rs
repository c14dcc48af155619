use serde::{Deserialize, Serialize};

use super::density::STATE_TOL;
use super::{Operator, TrialStream};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, MatrixJson};

/// Outcomes with probability at or below this are structural zeros and cannot be
/// conditioned on.
pub const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstrumentKind {
    /// Outcome labels are discarded; the instrument acts as `ρ ↦ Σ K ρ K†`.
    Channel,
    Measurement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Labeled<Op> {
    pub label: String,
    pub op: Op,
}

impl<Op> Labeled<Op> {
    pub fn new(label: impl Into<String>, op: Op) -> Self {
        Labeled { label: label.into(), op }
    }
}

/// A labeled family of operators `{M_x}`.
///
/// Construction only checks that the family is non-empty and dimensionally consistent;
/// completeness is reported by [`validate_instrument`] and enforced lazily by the
/// probability routines, which refuse distributions that do not sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumInstrument<Op = ComplexMatrix> {
    kind: InstrumentKind,
    operators: Vec<Labeled<Op>>,
}

impl<Op: Operator> QuantumInstrument<Op> {
    pub fn new(kind: InstrumentKind, operators: Vec<Labeled<Op>>) -> Result<Self> {
        let first = operators.first().ok_or(Error::EmptyInstrument)?;
        let dim = first.op.full_dim();
        for l in &operators {
            let m = l.op.to_matrix();
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::dims(
                    format!("{dim}x{dim} for operator '{}'", l.label),
                    format!("{}x{}", m.nrows(), m.ncols()),
                ));
            }
        }
        Ok(QuantumInstrument { kind, operators })
    }

    pub fn kind(&self) -> InstrumentKind {
        self.kind
    }

    pub fn operators(&self) -> &[Labeled<Op>] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].op.full_dim()
    }

    pub fn op(&self, x: usize) -> Result<&Op> {
        self.operators.get(x).map(|l| &l.op).ok_or(Error::OutcomeOutOfRange { outcome: x + 1, count: self.len() })
    }

    /// Dense copy of the instrument.
    pub fn to_dense(&self) -> QuantumInstrument<ComplexMatrix> {
        QuantumInstrument {
            kind: self.kind,
            operators: self.operators.iter().map(|l| Labeled::new(l.label.clone(), l.op.to_matrix())).collect(),
        }
    }

    fn check_state(&self, rho: &Op) -> Result<()> {
        if rho.full_dim() != self.dim() {
            return Err(Error::dims(
                format!("state of dimension {}", self.dim()),
                format!("dimension {}", rho.full_dim()),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstrumentReport {
    /// Positivity of each `M†M`, in operator order.
    pub positive: Vec<bool>,
    /// Smallest eigenvalue of each `M†M`.
    pub min_eigenvalues: Vec<f64>,
    /// `‖Σ M†M − 1‖_F`.
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Positivity and completeness of an instrument, evaluated in the operators' own algebra.
pub fn validate_instrument<Op: Operator>(inst: &QuantumInstrument<Op>, tol: f64) -> Result<InstrumentReport> {
    let mut positive = Vec::with_capacity(inst.len());
    let mut min_eigenvalues = Vec::with_capacity(inst.len());
    let mut sum: Option<Op> = None;
    for l in inst.operators() {
        let gram = l.op.op_adjoint().op_mul(&l.op)?;
        positive.push(gram.is_positive(tol)?);
        min_eigenvalues.push(linalg::min_eigenvalue(&gram.to_matrix()));
        sum = Some(match sum {
            None => gram,
            Some(acc) => acc.op_add(&gram)?,
        });
    }
    let total = sum.ok_or(Error::EmptyInstrument)?.to_matrix();
    let residual = (total - linalg::identity(inst.dim())).norm();
    let passed = residual <= tol && positive.iter().all(|&p| p);
    Ok(InstrumentReport { positive, min_eigenvalues, residual, tol, passed })
}

/// Non-negative probabilities, one per outcome label, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Accepts values within [`STATE_TOL`] of a distribution; rounding noise below zero
    /// is clipped.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInstrument);
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < -STATE_TOL) {
            return Err(Error::InvalidDensity(format!("invalid outcome probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > STATE_TOL {
            return Err(Error::IncompleteInstrument { residual: (total - 1.0).abs() });
        }
        Ok(OutcomeDistribution { probs: probs.into_iter().map(|p| p.max(0.0)).collect() })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Inverse-CDF lookup for `u ∈ [0, 1)`. Outcomes at or below [`ZERO_PROBABILITY`]
    /// are never returned.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (x, &p) in self.probs.iter().enumerate() {
            if p <= ZERO_PROBABILITY {
                continue;
            }
            last_positive = x;
            acc += p;
            if u < acc {
                return x;
            }
        }
        last_positive
    }
}

/// `P[x] = Tr[M_x ρ M_x†]` for every outcome.
pub fn outcome_distribution<Op: Operator>(inst: &QuantumInstrument<Op>, rho: &Op) -> Result<OutcomeDistribution> {
    inst.check_state(rho)?;
    let probs = inst.operators().iter().map(|l| Ok(l.op.sandwich(rho)?.op_trace().re)).collect::<Result<Vec<_>>>()?;
    OutcomeDistribution::new(probs)
}

/// Post-measurement state `M_x ρ M_x† / P[x]` together with `P[x]`.
pub fn apply_outcome<Op: Operator>(inst: &QuantumInstrument<Op>, rho: &Op, x: usize) -> Result<(Op, f64)> {
    inst.check_state(rho)?;
    let unnormalized = inst.op(x)?.sandwich(rho)?;
    let p = unnormalized.op_trace().re;
    if p <= ZERO_PROBABILITY {
        return Err(Error::ZeroProbabilityOutcome { outcome: x, probability: p });
    }
    Ok((unnormalized.op_scale(1.0 / p), p))
}

/// Draws one outcome index. Consumes exactly one uniform from the stream.
pub fn sample_outcome<Op: Operator>(inst: &QuantumInstrument<Op>, rho: &Op, stream: &mut TrialStream) -> Result<usize> {
    let dist = outcome_distribution(inst, rho)?;
    Ok(dist.sample_with(stream.uniform()))
}

/// `Σ_x K_x ρ K_x†`, checked to preserve trace.
pub fn apply_channel<Op: Operator>(inst: &QuantumInstrument<Op>, rho: &Op) -> Result<Op> {
    inst.check_state(rho)?;
    let mut out: Option<Op> = None;
    for l in inst.operators() {
        let term = l.op.sandwich(rho)?;
        out = Some(match out {
            None => term,
            Some(acc) => acc.op_add(&term)?,
        });
    }
    let out = out.ok_or(Error::EmptyInstrument)?;
    let drift = (out.op_trace() - rho.op_trace()).norm();
    if drift > STATE_TOL {
        return Err(Error::IncompleteInstrument { residual: drift });
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct LabeledJson {
    label: String,
    matrix: MatrixJson,
}

#[derive(Serialize, Deserialize)]
struct InstrumentJson {
    kind: InstrumentKind,
    operators: Vec<LabeledJson>,
}

impl Serialize for QuantumInstrument<ComplexMatrix> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        InstrumentJson {
            kind: self.kind,
            operators: self
                .operators
                .iter()
                .map(|l| LabeledJson { label: l.label.clone(), matrix: MatrixJson::from(&l.op) })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuantumInstrument<ComplexMatrix> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = InstrumentJson::deserialize(d)?;
        let ops = j
            .operators
            .into_iter()
            .map(|l| Ok(Labeled::new(l.label, ComplexMatrix::try_from(l.matrix)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        QuantumInstrument::new(j.kind, ops).map_err(serde::de::Error::custom)
    }
}
