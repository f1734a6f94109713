//! Experiment configuration: a single JSON document per experiment, with
//! embedded presets overridable by file.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use excitable_core::{linear_grid, log_grid, HhParams, ModelSpec, Tolerances};

/// Inclusive 1-D grid description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            log: false,
        }
    }

    pub fn logarithmic(min: f64, max: f64, count: usize) -> Self {
        Self {
            min,
            max,
            count,
            log: true,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.count < 2 {
            bail!("{name}: grid needs at least 2 points, got {}", self.count);
        }
        if !(self.min < self.max) {
            bail!(
                "{name}: grid bounds must satisfy min < max, got [{}, {}]",
                self.min,
                self.max
            );
        }
        if self.log && !(self.min > 0.0) {
            bail!("{name}: log grid requires min > 0, got {}", self.min);
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            bail!("{name}: grid bounds must be finite");
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.log {
            log_grid(self.min, self.max, self.count)
        } else {
            linear_grid(self.min, self.max, self.count)
        }
    }
}

/// Model section of the configuration. Mirrors the model parameters; the
/// HH leak reversal is optional and calibrated from the rest condition
/// when omitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    LinearRc {
        capacitance: f64,
        resistance: f64,
    },
    CubicRc {
        capacitance: f64,
        v_a: f64,
        v_b: f64,
        v_c: f64,
        k: f64,
    },
    Fhn {
        epsilon: f64,
        gamma: f64,
        v_b: f64,
    },
    Hh {
        capacitance: f64,
        g_na: f64,
        g_k: f64,
        g_leak: f64,
        v_na: f64,
        v_k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v_leak: Option<f64>,
    },
}

impl ModelConfig {
    pub fn resolve(&self) -> Result<ModelSpec> {
        let spec = match *self {
            ModelConfig::LinearRc {
                capacitance,
                resistance,
            } => ModelSpec::LinearRc(excitable_core::LinearRcParams {
                capacitance,
                resistance,
            }),
            ModelConfig::CubicRc {
                capacitance,
                v_a,
                v_b,
                v_c,
                k,
            } => ModelSpec::CubicRc {
                capacitance,
                resistor: excitable_core::CubicResistorParams { v_a, v_b, v_c, k },
            },
            ModelConfig::Fhn {
                epsilon,
                gamma,
                v_b,
            } => ModelSpec::Fhn(excitable_core::FhnParams {
                epsilon,
                gamma,
                v_b,
            }),
            ModelConfig::Hh {
                capacitance,
                g_na,
                g_k,
                g_leak,
                v_na,
                v_k,
                v_leak,
            } => ModelSpec::Hh(match v_leak {
                Some(v_leak) => HhParams {
                    capacitance,
                    g_na,
                    g_k,
                    g_leak,
                    v_na,
                    v_k,
                    v_leak,
                },
                None => HhParams::with_calibrated_leak(capacitance, g_na, g_k, g_leak, v_na, v_k),
            }),
        };
        spec.validate()
            .map_err(|e| anyhow!("invalid model parameters: {e}"))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzFamily {
    Exponential,
    Biexponential,
}

fn default_workers() -> usize {
    0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub ansatz: AnsatzFamily,
    pub a_grid: GridSpec,
    pub alpha_grid: GridSpec,
    /// Hyperpolarizing amplitudes as fractions of the located excitatory
    /// threshold amplitude; required for the biexponential family.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_fraction_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_grid: Option<GridSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Worker threads for the sweep; 0 uses the default pool size.
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default)]
    pub dump_trajectories: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.resolve_model()?;
        self.a_grid.validate("a_grid")?;
        if self.a_grid.min < 0.0 {
            bail!(
                "a_grid: amplitudes must be nonnegative, got min {}",
                self.a_grid.min
            );
        }
        self.alpha_grid.validate("alpha_grid")?;
        if !(self.alpha_grid.min > 0.0) {
            bail!(
                "alpha_grid: rates must be positive, got min {}",
                self.alpha_grid.min
            );
        }
        if self.alpha_grid.count < 8 {
            bail!(
                "alpha_grid: need at least 8 points, got {}",
                self.alpha_grid.count
            );
        }
        match self.ansatz {
            AnsatzFamily::Exponential => {
                if self.b_fraction_grid.is_some() || self.beta_grid.is_some() {
                    bail!("b_fraction_grid/beta_grid are only valid for the biexponential family");
                }
            }
            AnsatzFamily::Biexponential => {
                let b = self
                    .b_fraction_grid
                    .as_ref()
                    .ok_or_else(|| anyhow!("biexponential family requires b_fraction_grid"))?;
                b.validate("b_fraction_grid")?;
                if b.min < 0.0 {
                    bail!("b_fraction_grid: fractions must be nonnegative");
                }
                let beta = self
                    .beta_grid
                    .as_ref()
                    .ok_or_else(|| anyhow!("biexponential family requires beta_grid"))?;
                beta.validate("beta_grid")?;
                if !(beta.min > 0.0) {
                    bail!("beta_grid: rates must be positive");
                }
                if beta.count < 8 {
                    bail!("beta_grid: need at least 8 points, got {}", beta.count);
                }
            }
        }
        self.tolerances
            .validate()
            .map_err(|e| anyhow!("invalid tolerances: {e}"))?;
        Ok(())
    }

    pub fn resolve_model(&self) -> Result<ModelSpec> {
        self.model.resolve()
    }
}

pub const PRESET_NAMES: [&str; 5] = [
    "rc-linear",
    "rc-bistable",
    "fhn",
    "hh-excitatory",
    "hh-inhibitory",
];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let base_tolerances = Tolerances::default();
    let config = match name {
        "rc-linear" => ExperimentConfig {
            model: ModelConfig::LinearRc {
                capacitance: 1.0,
                resistance: 1.0,
            },
            ansatz: AnsatzFamily::Exponential,
            a_grid: GridSpec::linear(0.0, 2.0, 41),
            alpha_grid: GridSpec::logarithmic(0.5, 1000.0, 40),
            b_fraction_grid: None,
            beta_grid: None,
            tolerances: base_tolerances,
            workers: 0,
            dump_trajectories: false,
        },
        "rc-bistable" => ExperimentConfig {
            model: ModelConfig::CubicRc {
                capacitance: 1.0,
                v_a: 0.0,
                v_b: 2.0,
                v_c: 4.0,
                k: 1.0,
            },
            ansatz: AnsatzFamily::Exponential,
            a_grid: GridSpec::linear(0.0, 4.0, 81),
            alpha_grid: GridSpec::logarithmic(1.0, 2000.0, 40),
            b_fraction_grid: None,
            beta_grid: None,
            tolerances: base_tolerances,
            workers: 0,
            dump_trajectories: false,
        },
        "fhn" => ExperimentConfig {
            model: ModelConfig::Fhn {
                epsilon: 0.01,
                gamma: 0.5,
                v_b: 0.4,
            },
            ansatz: AnsatzFamily::Exponential,
            a_grid: GridSpec::linear(0.1, 2.0, 60),
            alpha_grid: GridSpec::logarithmic(1.0, 500.0, 40),
            b_fraction_grid: None,
            beta_grid: None,
            tolerances: base_tolerances,
            workers: 0,
            dump_trajectories: false,
        },
        "hh-excitatory" => ExperimentConfig {
            model: standard_hh_model(),
            ansatz: AnsatzFamily::Exponential,
            a_grid: GridSpec::linear(1.0, 30.0, 60),
            alpha_grid: GridSpec::logarithmic(0.05, 20.0, 40),
            b_fraction_grid: None,
            beta_grid: None,
            tolerances: base_tolerances,
            workers: 0,
            dump_trajectories: false,
        },
        "hh-inhibitory" => ExperimentConfig {
            model: standard_hh_model(),
            ansatz: AnsatzFamily::Biexponential,
            a_grid: GridSpec::linear(1.0, 30.0, 60),
            alpha_grid: GridSpec::logarithmic(0.05, 20.0, 40),
            b_fraction_grid: Some(GridSpec::linear(0.0, 0.9, 31)),
            beta_grid: Some(GridSpec::logarithmic(0.05, 20.0, 40)),
            tolerances: base_tolerances,
            workers: 0,
            dump_trajectories: false,
        },
        _ => return None,
    };
    Some(config)
}

fn standard_hh_model() -> ModelConfig {
    ModelConfig::Hh {
        capacitance: 1.0,
        g_na: 120.0,
        g_k: 36.0,
        g_leak: 0.3,
        v_na: 115.0,
        v_k: -12.0,
        v_leak: None,
    }
}

/// Recursive JSON merge: overlay object fields replace or extend the base;
/// any non-object overlay value replaces the base value outright.
pub fn merge_json(base: Value, overlay: Value) -> Value {
    match (base, overlay) {
        (Value::Object(mut base), Value::Object(overlay)) => {
            for (key, value) in overlay {
                let merged = match base.remove(&key) {
                    Some(existing) => merge_json(existing, value),
                    None => value,
                };
                base.insert(key, merged);
            }
            Value::Object(base)
        }
        (_, overlay) => overlay,
    }
}

/// Loads a configuration from an optional preset and an optional override
/// file; at least one must be given.
pub fn load_config(
    preset_name: Option<&str>,
    file: Option<&std::path::Path>,
) -> Result<ExperimentConfig> {
    let preset_value = match preset_name {
        Some(name) => Some(
            serde_json::to_value(preset(name).ok_or_else(|| {
                anyhow!(
                    "unknown preset '{name}'; available: {}",
                    PRESET_NAMES.join(", ")
                )
            })?)
            .expect("presets serialize"),
        ),
        None => None,
    };
    let file_value = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            Some(
                serde_json::from_str::<Value>(&text)
                    .with_context(|| format!("cannot parse config {}", path.display()))?,
            )
        }
        None => None,
    };
    let merged = match (preset_value, file_value) {
        (Some(p), Some(f)) => merge_json(p, f),
        (Some(p), None) => p,
        (None, Some(f)) => f,
        (None, None) => bail!("either --preset or --config is required"),
    };
    let config: ExperimentConfig =
        serde_json::from_value(merged).context("configuration does not match the schema")?;
    config.validate()?;
    Ok(config)
}

/// FNV-1a hash of the canonical configuration serialization, reported in
/// the JSON artifact for reproducibility.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in canonical.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    format!("{hash:016x}")
}
