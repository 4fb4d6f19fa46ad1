//! Experiment configuration, read from TOML. Every field is optional; the
//! defaults are the reference link of the capacity study.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use swipt_core::channel::OracleQuadrature;
use swipt_core::infotheory::{QuadratureConfig, TransitionModel};
use swipt_core::phys::{db_to_linear, SystemParams};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Ba,
    Gamma,
    Rayleigh,
    Uniform,
    SecondOrder,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Ba, Method::Gamma, Method::Rayleigh, Method::Uniform, Method::SecondOrder];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ba => "ba",
            Method::Gamma => "gamma",
            Method::Rayleigh => "rayleigh",
            Method::Uniform => "uniform",
            Method::SecondOrder => "second-order",
        }
    }
}

/// Link and rectifier parameters; gains and the noise ratio in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub transmit_power_w: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub wavelength_m: f64,
    pub distance_m: f64,
    pub saturation_current_a: f64,
    pub ideality: f64,
    pub thermal_voltage_v: f64,
    pub antenna_impedance_ohm: f64,
    pub bandwidth_hz: f64,
    pub temperature_k: f64,
    pub rec_noise_ratio_db: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            transmit_power_w: 1.0,
            tx_gain_dbi: 20.0,
            rx_gain_dbi: 3.0,
            wavelength_m: 0.1,
            distance_m: 10.0,
            saturation_current_a: 5e-6,
            ideality: 1.05,
            thermal_voltage_v: 25.86e-3,
            antenna_impedance_ohm: 50.0,
            bandwidth_hz: 10e6,
            temperature_k: 300.0,
            rec_noise_ratio_db: 30.0,
        }
    }
}

impl SystemConfig {
    pub fn params(&self, lna_gain_db: f64) -> SystemParams {
        SystemParams {
            transmit_power: self.transmit_power_w,
            tx_gain: db_to_linear(self.tx_gain_dbi),
            rx_gain: db_to_linear(self.rx_gain_dbi),
            wavelength: self.wavelength_m,
            distance: self.distance_m,
            saturation_current: self.saturation_current_a,
            ideality: self.ideality,
            thermal_voltage: self.thermal_voltage_v,
            antenna_impedance: self.antenna_impedance_ohm,
            bandwidth: self.bandwidth_hz,
            temperature: self.temperature_k,
            rec_noise_ratio: db_to_linear(self.rec_noise_ratio_db),
            lna_gain: db_to_linear(lna_gain_db),
        }
    }
}

/// LNA gains to visit: an explicit list, or a start/stop/step range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gains_db: Option<Vec<f64>>,
    pub start_db: f64,
    pub stop_db: f64,
    pub step_db: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { gains_db: None, start_db: 0.0, stop_db: 40.0, step_db: 2.0 }
    }
}

impl SweepConfig {
    pub fn gains(&self) -> Vec<f64> {
        if let Some(list) = &self.gains_db {
            return list.clone();
        }
        if !(self.step_db > 0.0) || self.stop_db < self.start_db {
            return Vec::new();
        }
        let count = ((self.stop_db - self.start_db) / self.step_db + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start_db + i as f64 * self.step_db).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub u_nodes: usize,
    pub y_nodes: usize,
    pub u_max_mult: f64,
    pub rel_tol: f64,
    pub u_per_sigma: f64,
    pub ba_u_per_sigma: f64,
    pub y_per_sigma: f64,
    pub band: f64,
    pub check_refinement: bool,
    /// Blahut–Arimoto stopping gap between the bound and its dual (bits).
    pub ba_tol: f64,
    pub ba_max_iter: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureConfig::default();
        QuadratureSection {
            u_nodes: q.u_nodes,
            y_nodes: q.y_nodes,
            u_max_mult: q.u_max_mult,
            rel_tol: q.rel_tol,
            u_per_sigma: q.u_per_sigma,
            ba_u_per_sigma: q.ba_u_per_sigma,
            y_per_sigma: q.y_per_sigma,
            band: q.band,
            check_refinement: q.check_refinement,
            ba_tol: 1e-3,
            ba_max_iter: 100_000,
        }
    }
}

impl QuadratureSection {
    pub fn core(&self, exact: bool) -> QuadratureConfig {
        QuadratureConfig {
            u_nodes: self.u_nodes,
            y_nodes: self.y_nodes,
            u_max_mult: self.u_max_mult,
            rel_tol: self.rel_tol,
            u_per_sigma: self.u_per_sigma,
            ba_u_per_sigma: self.ba_u_per_sigma,
            y_per_sigma: self.y_per_sigma,
            band: self.band,
            check_refinement: self.check_refinement,
            transition: if exact { TransitionModel::Exact(OracleQuadrature::default()) } else { TransitionModel::Gaussian },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Lemma1Config {
    pub dof: u32,
    pub s_list: Vec<f64>,
}

impl Default for Lemma1Config {
    fn default() -> Self {
        Lemma1Config { dof: 2, s_list: vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidationConfig {
    pub lna_gain_db: f64,
    /// Inputs to check, as multiples of the mean input power.
    pub u_multiples: Vec<f64>,
    pub mc_count: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { lna_gain_db: 20.0, u_multiples: vec![1.0, 100.0], mc_count: 1_000_000 }
    }
}

/// Smallest Monte-Carlo run accepted by the validation harness.
pub const MIN_MC_COUNT: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub methods: Vec<Method>,
    pub system: SystemConfig,
    pub sweep: SweepConfig,
    pub quadrature: QuadratureSection,
    pub lemma1: Lemma1Config,
    pub validation: ValidationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            output_path: None,
            format: Format::Csv,
            methods: Method::ALL.to_vec(),
            system: SystemConfig::default(),
            sweep: SweepConfig::default(),
            quadrature: QuadratureSection::default(),
            lemma1: Lemma1Config::default(),
            validation: ValidationConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.methods.is_empty() {
            return Err(invalid("no methods selected"));
        }
        let gains = self.sweep.gains();
        if gains.is_empty() {
            return Err(invalid("sweep is empty"));
        }
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(invalid("sweep gains must be finite"));
        }
        self.system.params(0.0).validate().map_err(|e| invalid(e.to_string()))?;
        self.quadrature.core(false).validate().map_err(|e| invalid(e.to_string()))?;
        if !(self.quadrature.ba_tol > 0.0) || self.quadrature.ba_max_iter == 0 {
            return Err(invalid("ba_tol and ba_max_iter must be positive"));
        }
        if !(1..=2).contains(&self.lemma1.dof) {
            return Err(invalid("lemma1.dof must be 1 or 2"));
        }
        if self.lemma1.s_list.is_empty() || self.lemma1.s_list.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(invalid("lemma1.s_list must be non-empty and non-negative"));
        }
        if self.validation.mc_count < MIN_MC_COUNT {
            return Err(invalid(format!("validation.mc_count must be at least {MIN_MC_COUNT}")));
        }
        if self.validation.u_multiples.is_empty() || self.validation.u_multiples.iter().any(|u| !(u.is_finite() && *u >= 0.0)) {
            return Err(invalid("validation.u_multiples must be non-empty and non-negative"));
        }
        Ok(())
    }
}
