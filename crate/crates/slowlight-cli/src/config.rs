//! Declarative run configuration.
//!
//! One TOML document describes one experiment: grid, medium, probe, the two
//! control pairs, the switching schedule and the propagation plan. Unknown
//! keys are rejected and validation reports every violated constraint at
//! once. Defaults (σ = 10, amplitude = 1) reproduce the canonical
//! vortex-retrieval setup, so a minimal config stays a few lines.

use serde::Deserialize;

use slowlight::beams::BeamSpec;
use slowlight::coupling::ControlPair;
use slowlight::grid::{ComplexField2D, GridSpec};
use slowlight::mixing::MediumParams;
use slowlight::propagator::{PropagationMode, PropagationPlan};
use slowlight::scenario::{Scenario, Schedule};

fn default_amplitude() -> f64 {
    1.0
}

fn default_sigma() -> f64 {
    10.0
}

fn default_gamma() -> f64 {
    1.0
}

fn default_k() -> f64 {
    1.0
}

fn default_recoil() -> f64 {
    1e-3
}

fn default_c_scale() -> f64 {
    1e4
}

fn default_peak_rabi() -> f64 {
    0.01
}

fn default_duration() -> f64 {
    50.0
}

fn default_sample_length() -> f64 {
    500.0
}

fn default_ramp() -> f64 {
    5.0
}

fn default_record_every() -> usize {
    10
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json, OutputFormat::Csv]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: String,
    pub grid: GridConfig,
    pub medium: MediumConfig,
    pub probe: ProbeConfig,
    pub storing: ControlsConfig,
    pub retrieving: ControlsConfig,
    pub schedule: ScheduleConfig,
    pub plan: PlanConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub extent: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub g_sqrt_n: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub omega01: f64,
    #[serde(default)]
    pub omega21: f64,
    #[serde(default)]
    pub omega31: f64,
    #[serde(default = "default_recoil")]
    pub recoil: f64,
    #[serde(default = "default_k")]
    pub k: f64,
    #[serde(default = "default_k")]
    pub k_c: f64,
    #[serde(default = "default_c_scale")]
    pub c_scale: f64,
    /// Medium length in λ, for the loss diagnostics.
    #[serde(default = "default_sample_length")]
    pub sample_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamKindConfig {
    Gaussian,
    Lg,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub kind: BeamKindConfig,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub charge: i32,
}

impl BeamConfig {
    pub fn to_spec(&self, what: &str, errors: &mut Vec<String>) -> Option<BeamSpec> {
        let result = match self.kind {
            BeamKindConfig::Gaussian => {
                if self.charge != 0 {
                    errors.push(format!("{what}: a gaussian beam cannot carry charge"));
                    return None;
                }
                BeamSpec::gaussian(self.amplitude, self.sigma)
            }
            BeamKindConfig::Lg => BeamSpec::laguerre_gauss(self.amplitude, self.sigma, self.charge),
        };
        match result {
            Ok(spec) => Some(spec),
            Err(e) => {
                errors.push(format!("{what}: {e}"));
                None
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(flatten)]
    pub beam: BeamConfig,
    /// Peak probe Rabi frequency g·ℰ₀ in γ units (linearity guard).
    #[serde(default = "default_peak_rabi")]
    pub peak_rabi: f64,
    /// Pulse duration in 1/γ (loss diagnostics).
    #[serde(default = "default_duration")]
    pub duration: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlsConfig {
    pub c2: BeamConfig,
    pub c3: BeamConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub t_store: f64,
    pub t_retrieve: f64,
    #[serde(default = "default_ramp")]
    pub ramp: f64,
    #[serde(default)]
    pub coherence_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanModeConfig {
    FreeSpace,
    InMediumDecoupled,
    InMediumCoupled,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub mode: PlanModeConfig,
    #[serde(default)]
    pub z_start: f64,
    pub z_end: f64,
    pub n_slices: usize,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
    Raster,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            formats: default_formats(),
        }
    }
}

/// A parse failure or the full list of violated constraints.
#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Validation(Vec<String>),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(e) => write!(f, "config parse error: {e}"),
            ConfigError::Validation(v) => {
                writeln!(f, "invalid config:")?;
                for item in v {
                    writeln!(f, "  - {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
}

/// Validated scenario plus non-fatal warnings.
pub struct ValidatedConfig {
    pub scenario: Scenario,
    pub warnings: Vec<String>,
}

/// Check every invariant, returning the executable scenario or all
/// violations at once.
pub fn validate_config(cfg: &RunConfig) -> Result<ValidatedConfig, ConfigError> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();

    let grid = match GridSpec::new(cfg.grid.n, cfg.grid.extent) {
        Ok(g) => Some(g),
        Err(e) => {
            errors.push(format!("grid: {e}"));
            None
        }
    };

    let medium = MediumParams {
        g_sqrt_n: cfg.medium.g_sqrt_n,
        gamma: cfg.medium.gamma,
        omega01: cfg.medium.omega01,
        omega21: cfg.medium.omega21,
        omega31: cfg.medium.omega31,
        recoil: cfg.medium.recoil,
        k: cfg.medium.k,
        k_c: cfg.medium.k_c,
        c_scale: cfg.medium.c_scale,
        potentials: None,
    };
    if let Err(e) = medium.validate() {
        errors.push(format!("medium: {e}"));
    }
    if !(cfg.medium.sample_length > 0.0) {
        errors.push("medium: sample_length must be positive".into());
    }

    let probe = cfg.probe.beam.to_spec("probe", &mut errors);
    if !(cfg.probe.peak_rabi > 0.0) {
        errors.push("probe: peak_rabi must be positive".into());
    }
    if !(cfg.probe.duration > 0.0) {
        errors.push("probe: duration must be positive".into());
    }
    let storing_c2 = cfg.storing.c2.to_spec("storing.c2", &mut errors);
    let storing_c3 = cfg.storing.c3.to_spec("storing.c3", &mut errors);
    let retrieving_c2 = cfg.retrieving.c2.to_spec("retrieving.c2", &mut errors);
    let retrieving_c3 = cfg.retrieving.c3.to_spec("retrieving.c3", &mut errors);

    // width of the regenerated beam must be positive:
    // σ⁻² = σ_p⁻² + σ_r⁻² − σ_s⁻²
    let inv_sq = cfg.probe.beam.sigma.powi(-2) + cfg.retrieving.c2.sigma.powi(-2)
        - cfg.storing.c2.sigma.powi(-2);
    if !(inv_sq > 0.0) {
        errors.push(format!(
            "widths: σ⁻² = σ_p⁻² + σ_r⁻² − σ_s⁻² = {inv_sq:.3e} must be positive"
        ));
    }

    let schedule = Schedule {
        t_store: cfg.schedule.t_store,
        t_retrieve: cfg.schedule.t_retrieve,
        ramp: cfg.schedule.ramp,
        coherence_time: cfg.schedule.coherence_time,
    };
    if let Err(e) = schedule.validate() {
        errors.push(format!("schedule: {e}"));
    }

    let plan = PropagationPlan {
        z_start: cfg.plan.z_start,
        z_end: cfg.plan.z_end,
        n_slices: cfg.plan.n_slices,
        record_every: cfg.plan.record_every,
        mode: match cfg.plan.mode {
            PlanModeConfig::FreeSpace => PropagationMode::FreeSpace,
            PlanModeConfig::InMediumDecoupled => PropagationMode::InMediumDecoupled,
            PlanModeConfig::InMediumCoupled => PropagationMode::InMediumCoupled,
        },
    };
    if let Err(e) = plan.validate() {
        errors.push(format!("plan: {e}"));
    }

    // periodic boundaries need room around the beams
    let widest = [
        cfg.probe.beam.sigma,
        cfg.storing.c2.sigma,
        cfg.storing.c3.sigma,
        cfg.retrieving.c2.sigma,
        cfg.retrieving.c3.sigma,
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    if cfg.grid.extent < 4.0 * widest {
        warnings.push(format!(
            "extent {} is below 4× the widest beam ({widest}); periodic images may leak in",
            cfg.grid.extent
        ));
    }

    if !errors.is_empty() {
        return Err(ConfigError::Validation(errors));
    }
    let (grid, probe, storing_c2, storing_c3, retrieving_c2, retrieving_c3) = (
        grid.unwrap(),
        probe.unwrap(),
        storing_c2.unwrap(),
        storing_c3.unwrap(),
        retrieving_c2.unwrap(),
        retrieving_c3.unwrap(),
    );

    let render = |spec: &BeamSpec| -> ComplexField2D { slowlight::beams::render_beam(spec, &grid) };
    let storing = ControlPair::shared(
        render(&storing_c2),
        render(&storing_c3),
        schedule.storing_envelope(),
    )
    .map_err(|e| ConfigError::Validation(vec![format!("storing controls: {e}")]))?;
    let retrieving = ControlPair::shared(
        render(&retrieving_c2),
        render(&retrieving_c3),
        schedule.retrieving_envelope(),
    )
    .map_err(|e| ConfigError::Validation(vec![format!("retrieving controls: {e}")]))?;

    Ok(ValidatedConfig {
        scenario: Scenario {
            grid,
            medium,
            probe,
            probe_peak_rabi: cfg.probe.peak_rabi,
            probe_duration: cfg.probe.duration,
            sample_length: cfg.medium.sample_length,
            storing,
            retrieving,
            schedule,
            plan,
        },
        warnings,
    })
}
