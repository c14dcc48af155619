//! Protocol configuration and its JSON form.
//!
//! ```json
//! {"d": 2, "phi": 0.785, "n": 2,
//!  "inner_measurement": [M, M] | {"family": "random_povm" | "projective" | "scaled_unitary", "seed": 1},
//!  "rho0": M | {"family": "random_pure" | "random_mixed" | "maximally_mixed", "seed": 2},
//!  "seed": 42}
//! ```
//!
//! `M` is the matrix encoding of [`MatrixJson`]. Family seeds default to the top-level
//! seed. A `projective` family without a seed uses the computational basis.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, MatrixJson};
use crate::qcore::{family_rng, DensityMatrix};
use crate::random;

/// Completeness tolerance for the inner measurement family.
pub const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementFamily {
    RandomPovm,
    Projective,
    ScaledUnitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    RandomPure,
    RandomMixed,
    MaximallyMixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasurementSpec {
    Explicit(Vec<MatrixJson>),
    Family {
        family: MeasurementFamily,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Explicit(MatrixJson),
    Family {
        family: StateFamily,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub d: usize,
    pub phi: f64,
    pub n: usize,
    pub inner_measurement: MeasurementSpec,
    pub rho0: StateSpec,
    #[serde(default)]
    pub seed: u64,
}

/// A config with every family expanded to explicit matrices but the completeness of the
/// inner measurement not yet enforced.
#[derive(Debug, Clone)]
pub struct ResolvedSpec {
    pub d: usize,
    pub phi: f64,
    pub n: usize,
    pub inner: Vec<ComplexMatrix>,
    pub rho0: DensityMatrix,
    pub seed: u64,
}

impl ConfigSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn resolve(&self) -> Result<ResolvedSpec> {
        let (d, n) = (self.d, self.n);
        if d == 0 || n == 0 {
            return Err(Error::Config(format!("d and n must be positive (d={d}, n={n})")));
        }
        if !self.phi.is_finite() {
            return Err(Error::Config(format!("phi must be finite, got {}", self.phi)));
        }
        let inner = match &self.inner_measurement {
            MeasurementSpec::Explicit(ms) => {
                ms.iter().cloned().map(ComplexMatrix::try_from).collect::<Result<Vec<_>>>()?
            }
            MeasurementSpec::Family { family, seed } => {
                let mut rng = family_rng(seed.unwrap_or(self.seed));
                match family {
                    MeasurementFamily::RandomPovm => random::random_povm(d, n, &mut rng)?,
                    MeasurementFamily::ScaledUnitary => random::scaled_unitary_family(d, n, &mut rng)?,
                    MeasurementFamily::Projective => match seed {
                        Some(_) => random::projective_family(d, n, Some(&mut rng))?,
                        None => random::projective_family::<rand_chacha::ChaCha8Rng>(d, n, None)?,
                    },
                }
            }
        };
        if inner.len() != n {
            return Err(Error::Config(format!("n = {n} but {} inner operators given", inner.len())));
        }
        for m in &inner {
            linalg::ensure_shape(m, d)?;
        }
        let rho0 = match &self.rho0 {
            StateSpec::Explicit(m) => DensityMatrix::new(ComplexMatrix::try_from(m.clone())?)?,
            StateSpec::Family { family, seed } => {
                let mut rng = family_rng(seed.unwrap_or(self.seed).wrapping_add(0x9e37_79b9));
                match family {
                    StateFamily::RandomPure => random::random_pure_state(d, &mut rng),
                    StateFamily::RandomMixed => random::random_mixed_state(d, &mut rng),
                    StateFamily::MaximallyMixed => DensityMatrix::maximally_mixed(d),
                }
            }
        };
        if rho0.dim() != d {
            return Err(Error::dims(format!("rho0 of dimension {d}"), format!("dimension {}", rho0.dim())));
        }
        Ok(ResolvedSpec { d, phi: self.phi, n, inner, rho0, seed: self.seed })
    }
}

/// Validated protocol parameters: dimension `d`, copy angle `φ`, inner measurement
/// `{M_ν}` (complete on `d` dimensions) and input state `ρ₀`.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    d: usize,
    phi: f64,
    inner: Vec<ComplexMatrix>,
    rho0: DensityMatrix,
    seed: u64,
}

impl ProtocolConfig {
    pub fn new(phi: f64, inner: Vec<ComplexMatrix>, rho0: DensityMatrix, seed: u64) -> Result<Self> {
        let d = rho0.dim();
        let n = inner.len();
        ProtocolConfig::try_from(ResolvedSpec { d, phi, n, inner, rho0, seed })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        ConfigSpec::from_json(text)?.resolve()?.try_into()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn n(&self) -> usize {
        self.inner.len()
    }

    pub fn inner(&self) -> &[ComplexMatrix] {
        &self.inner
    }

    pub fn rho0(&self) -> &DensityMatrix {
        &self.rho0
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cos2(&self) -> f64 {
        self.phi.cos().powi(2)
    }

    pub fn sin2(&self) -> f64 {
        self.phi.sin().powi(2)
    }

    pub fn with_phi(&self, phi: f64) -> Self {
        ProtocolConfig { phi, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        ProtocolConfig { seed, ..self.clone() }
    }

    pub fn with_rho0(&self, rho0: DensityMatrix) -> Result<Self> {
        if rho0.dim() != self.d {
            return Err(Error::dims(format!("dimension {}", self.d), format!("dimension {}", rho0.dim())));
        }
        Ok(ProtocolConfig { rho0, ..self.clone() })
    }

    /// Explicit-matrix JSON form, suitable for echoing in reports.
    pub fn to_spec(&self) -> ConfigSpec {
        ConfigSpec {
            d: self.d,
            phi: self.phi,
            n: self.n(),
            inner_measurement: MeasurementSpec::Explicit(self.inner.iter().map(MatrixJson::from).collect()),
            rho0: StateSpec::Explicit(MatrixJson::from(self.rho0.as_matrix())),
            seed: self.seed,
        }
    }
}

impl TryFrom<ResolvedSpec> for ProtocolConfig {
    type Error = Error;

    fn try_from(r: ResolvedSpec) -> Result<Self> {
        if r.inner.is_empty() || r.inner.len() != r.n {
            return Err(Error::Config(format!("expected {} inner operators, got {}", r.n, r.inner.len())));
        }
        if !r.phi.is_finite() {
            return Err(Error::Config(format!("phi must be finite, got {}", r.phi)));
        }
        for m in &r.inner {
            linalg::ensure_shape(m, r.d)?;
        }
        if r.rho0.dim() != r.d {
            return Err(Error::dims(format!("rho0 of dimension {}", r.d), format!("dimension {}", r.rho0.dim())));
        }
        let residual = linalg::completeness_residual(&r.inner, r.d);
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteInstrument { residual });
        }
        Ok(ProtocolConfig { d: r.d, phi: r.phi, inner: r.inner, rho0: r.rho0, seed: r.seed })
    }
}
