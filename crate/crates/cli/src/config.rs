//! Run-configuration file schema.
//!
//! One TOML file drives every subcommand. Unknown keys are rejected so a
//! typo cannot silently fall back to a default. All randomness is behind
//! `simulation.seed`, which `--seed` overrides.

use kdlab_core::{AnalyticDistribution, CoreError};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub distribution: DistributionConfig,
    pub model: ModelConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionConfig {
    /// Currently `bimodal_lorentzian`; custom analytic densities require
    /// caller-supplied evaluators and are library-only.
    pub family: String,
    pub omega0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub k: f64,
    #[serde(default)]
    pub h: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    /// finite_n | galerkin | linearized | oa_oracle
    pub kind: String,
    /// Oscillator count for finite_n.
    pub n: usize,
    /// Frequency-grid size for the continuum simulators.
    pub m: usize,
    /// Harmonic truncation for galerkin.
    pub j_max: usize,
    /// Fixed step; omit for the integrator default.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub seed: u64,
    /// Steps between records; 0 targets ≈ 0.05 time units.
    pub record_stride: usize,
    /// Initial |η₁| perturbation.
    pub init_amplitude: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            kind: "galerkin".into(),
            n: 10_000,
            m: 400,
            j_max: 8,
            dt: None,
            t_end: 400.0,
            seed: 1,
            record_stride: 0,
            init_amplitude: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub transient_fraction: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            transient_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub k_min: f64,
    pub k_max: f64,
    pub k_count: usize,
    pub branch_k_start: f64,
    pub branch_k_end: f64,
    pub branch_steps: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            k_min: 0.5,
            k_max: 11.0,
            k_count: 106,
            branch_k_start: 0.1,
            branch_k_end: 6.0,
            branch_steps: 300,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub k_values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            k_values: vec![4.04, 4.09, 4.16, 4.25],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: String,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: "out".into(),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let config: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), String> {
        if self.model.k <= 0.0 {
            return Err("model.k must be positive".into());
        }
        if !(0.0..1.0).contains(&self.analysis.transient_fraction) {
            return Err("analysis.transient_fraction must lie in [0, 1)".into());
        }
        match self.simulation.kind.as_str() {
            "finite_n" | "galerkin" | "linearized" | "oa_oracle" => {}
            other => {
                return Err(format!(
                    "simulation.kind '{other}' is not one of finite_n | galerkin | linearized | oa_oracle"
                ))
            }
        }
        for format in &self.output.formats {
            if format != "csv" && format != "json" {
                return Err(format!("output format '{format}' is not csv or json"));
            }
        }
        Ok(())
    }

    pub fn distribution(&self) -> Result<AnalyticDistribution, String> {
        match self.distribution.family.as_str() {
            "bimodal_lorentzian" => {
                let omega0 = self
                    .distribution
                    .omega0
                    .ok_or("distribution.omega0 required for bimodal_lorentzian")?;
                AnalyticDistribution::bimodal_lorentzian(omega0).map_err(|e: CoreError| e.to_string())
            }
            other => Err(format!(
                "unknown distribution family '{other}' (expected bimodal_lorentzian)"
            )),
        }
    }
}
