//! JSON run configuration and its translation into model inputs.
//!
//! Complex numbers are written as `[re, im]`. Unknown keys are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bath::{BathSpec, Susceptibility};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::models::{ho_closed_rflow, ho_spectra, qhe_closed_rflow, qhe_spectra, qhe_steady_state, OscillatorSpec, QheSpec, QheSteadyState};
use crate::rflow::RenyiOrder;
use crate::spectrum::LineSpectrum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default = "default_orders")]
    pub orders: Vec<f64>,
    /// Inverse temperature of the probe.
    pub beta: f64,
    #[serde(default)]
    pub xi_grid: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
}

fn default_orders() -> Vec<f64> {
    vec![2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Qhe {
        splitting: f64,
        #[serde(default)]
        probe_chi: ChiConfig,
        #[serde(default)]
        other_baths: Vec<BathConfig>,
        #[serde(default)]
        rabi: f64,
        /// Use these populations and coherence instead of solving for them.
        #[serde(default)]
        steady_state: Option<SteadyStateConfig>,
    },
    Oscillator {
        omega0: f64,
        drive_frequency: f64,
        effective_temperature: f64,
        #[serde(default)]
        drive_plus: [f64; 2],
        #[serde(default)]
        drive_minus: [f64; 2],
        #[serde(default)]
        occupation: Option<f64>,
        #[serde(default)]
        degenerate: bool,
        #[serde(default)]
        probe_chi: ChiConfig,
    },
}

/// Single-channel susceptibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum ChiConfig {
    Constant { value: f64 },
    Ohmic { amplitude: f64, cutoff: f64 },
    Tabulated { omegas: Vec<f64>, values: Vec<f64> },
}

impl Default for ChiConfig {
    fn default() -> Self {
        ChiConfig::Constant { value: 1.0 }
    }
}

impl ChiConfig {
    pub fn build(&self) -> Result<Susceptibility> {
        let one = |v: f64| CMatrix::from_element(1, 1, v.into());
        match self {
            ChiConfig::Constant { value } => Susceptibility::scalar(*value),
            ChiConfig::Ohmic { amplitude, cutoff } => Susceptibility::ohmic(one(*amplitude), *cutoff),
            ChiConfig::Tabulated { omegas, values } => {
                Susceptibility::tabulated(omegas.clone(), values.iter().map(|&v| one(v)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub beta: f64,
    #[serde(default)]
    pub chi: ChiConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyStateConfig {
    pub p1: f64,
    #[serde(default)]
    pub rho01: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// One of [`SWEEP_PARAMETERS`].
    pub name: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

pub const SWEEP_PARAMETERS: [&str; 7] = ["beta", "order", "splitting", "rabi", "omega0", "effective_temperature", "drive_frequency"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_trajectories")]
    pub trajectories: u64,
}

fn default_duration() -> f64 {
    10.0
}

fn default_trajectories() -> u64 {
    100_000
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { duration: default_duration(), trajectories: default_trajectories() }
    }
}

fn c(z: [f64; 2]) -> Complex64 {
    Complex64::new(z[0], z[1])
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

impl RunConfig {
    /// Parse and validate. Parse errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(invalid(format!("config field `beta`: must be positive, got {}", self.beta)));
        }
        if self.orders.is_empty() {
            return Err(invalid("config field `orders`: at least one order is needed"));
        }
        for &m in &self.orders {
            RenyiOrder::new(m).map_err(|e| invalid(format!("config field `orders`: {e}")))?;
        }
        if let Some(grid) = &self.xi_grid {
            if grid.iter().flatten().any(|v| !v.is_finite()) {
                return Err(invalid("config field `xi_grid`: entries must be finite"));
            }
        }
        if let Some(s) = &self.sweep {
            if !SWEEP_PARAMETERS.contains(&s.name.as_str()) {
                return Err(invalid(format!("config field `sweep.name`: unknown parameter `{}`, expected one of {}", s.name, SWEEP_PARAMETERS.join(", "))));
            }
            if s.steps == 0 || !s.from.is_finite() || !s.to.is_finite() {
                return Err(invalid("config field `sweep`: need finite bounds and steps ≥ 1"));
            }
        }
        if let Some(o) = &self.oracle {
            if !(o.duration > 0.0) || o.trajectories == 0 {
                return Err(invalid("config field `oracle`: duration and trajectories must be positive"));
            }
        }
        self.prepare().map(|_| ())
    }

    /// Build the probe bath, spectra and closed form described by the config.
    pub fn prepare(&self) -> Result<Prepared> {
        let err = |field: &str, e: Error| invalid(format!("config field `{field}`: {e}"));
        match &self.model {
            ModelConfig::Qhe { splitting, probe_chi, other_baths, rabi, steady_state } => {
                let probe = BathSpec::new(self.beta, probe_chi.build().map_err(|e| err("model.probe_chi", e))?)
                    .map_err(|e| err("beta", e))?;
                let others = other_baths
                    .iter()
                    .map(|b| BathSpec::new(b.beta, b.chi.build()?))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| err("model.other_baths", e))?;
                let spec = QheSpec::new(*splitting, probe.clone(), others, *rabi).map_err(|e| err("model", e))?;
                let steady = match steady_state {
                    Some(s) => QheSteadyState::new(1.0 - s.p1, s.p1, c(s.rho01)).map_err(|e| err("model.steady_state", e))?,
                    None => qhe_steady_state(&spec).map_err(|e| err("model", e))?,
                };
                let (ycal, ycoh) = qhe_spectra(&spec, &steady)?;
                Ok(Prepared { probe, ycal, ycoh, model: PreparedModel::Qhe { spec, steady } })
            }
            ModelConfig::Oscillator {
                omega0,
                drive_frequency,
                effective_temperature,
                drive_plus,
                drive_minus,
                occupation,
                degenerate,
                probe_chi,
            } => {
                let probe = BathSpec::new(self.beta, probe_chi.build().map_err(|e| err("model.probe_chi", e))?)
                    .map_err(|e| err("beta", e))?;
                let spec = OscillatorSpec {
                    omega0: *omega0,
                    drive_frequency: *drive_frequency,
                    effective_temperature: *effective_temperature,
                    drive_plus: c(*drive_plus),
                    drive_minus: c(*drive_minus),
                    occupation_override: *occupation,
                    degenerate: *degenerate,
                };
                let (ycal, ycoh) = ho_spectra(&spec).map_err(|e| err("model", e))?;
                Ok(Prepared { probe, ycal, ycoh, model: PreparedModel::Oscillator { spec } })
            }
        }
    }

    /// Copy with one sweep parameter set to `value`. "order" replaces the
    /// order list.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        match (name, &mut cfg.model) {
            ("beta", _) => cfg.beta = value,
            ("order", _) => cfg.orders = vec![value],
            ("splitting", ModelConfig::Qhe { splitting, .. }) => *splitting = value,
            ("rabi", ModelConfig::Qhe { rabi, .. }) => *rabi = value,
            ("omega0", ModelConfig::Oscillator { omega0, .. }) => *omega0 = value,
            ("effective_temperature", ModelConfig::Oscillator { effective_temperature, .. }) => *effective_temperature = value,
            ("drive_frequency", ModelConfig::Oscillator { drive_frequency, .. }) => *drive_frequency = value,
            _ => return Err(invalid(format!("sweep parameter `{name}` does not apply to this model"))),
        }
        cfg.sweep = None;
        Ok(cfg)
    }

    /// The sweep axis, endpoints included.
    pub fn sweep_points(&self) -> Option<Vec<f64>> {
        self.sweep.as_ref().map(|s| {
            if s.steps == 1 {
                return vec![s.from];
            }
            (0..s.steps).map(|i| s.from + (s.to - s.from) * i as f64 / (s.steps - 1) as f64).collect()
        })
    }
}

/// Hex SHA-256 of the raw config text.
pub fn config_digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum PreparedModel {
    Qhe { spec: QheSpec, steady: QheSteadyState },
    Oscillator { spec: OscillatorSpec },
}

/// Everything a command needs: probe, both spectra and the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub probe: BathSpec,
    pub ycal: LineSpectrum,
    pub ycoh: LineSpectrum,
    pub model: PreparedModel,
}

impl Prepared {
    pub fn closed_form(&self, order: RenyiOrder) -> Result<f64> {
        match &self.model {
            PreparedModel::Qhe { spec, steady } => qhe_closed_rflow(spec, steady, order),
            PreparedModel::Oscillator { spec } => ho_closed_rflow(spec, &self.probe, order),
        }
    }

    pub fn max_frequency(&self) -> f64 {
        self.ycal.max_frequency().into_iter().chain(self.ycoh.max_frequency()).fold(0.0, f64::max)
    }
}
