//! Scenario runner: storage → retrieval → propagation from one TOML config.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use slowlight::coupling::assemble_paraxial_matrices;
use slowlight::mixing::mixing_params;
use slowlight::propagator::{
    propagate_free_space, propagate_polariton_coupled, propagate_polariton_decoupled,
    PolaritonPair, PropagationMode, SliceRecord,
};
use slowlight::scenario::{run_pipeline, Scenario};

use config::{parse_config, validate_config, ConfigError, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(
    name = "slowlight",
    about = "Storage and retrieval of slow-light vortices in tripod media",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write reports, profiles and rasters.
    Run {
        /// Path to the TOML scenario config.
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Validate a config without running it.
    Check {
        /// Path to the TOML scenario config.
        config: PathBuf,
    },
    /// Run the scenario once per value of a swept parameter.
    Sweep {
        /// Path to the TOML scenario config.
        config: PathBuf,
        /// Parameter to vary: b, a, sigma_p, sigma_s, sigma_r.
        #[arg(long)]
        param: String,
        /// Comma-separated list of values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/error text
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run { config, out } => run_command(&config, &out),
        Command::Check { config } => check_command(&config),
        Command::Sweep {
            config,
            param,
            values,
            out,
        } => sweep_command(&config, &param, &values, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Validation(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<slowlight::Error> for CliError {
    fn from(e: slowlight::Error) -> Self {
        CliError::Runtime(anyhow::Error::new(e))
    }
}

fn load(config_path: &Path) -> Result<(RunConfig, config::ValidatedConfig), CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", config_path.display())))?;
    let cfg = parse_config(&text).map_err(|e| CliError::Validation(e.to_string()))?;
    let validated = match validate_config(&cfg) {
        Ok(v) => v,
        Err(e @ ConfigError::Validation(_)) | Err(e @ ConfigError::Parse(_)) => {
            return Err(CliError::Validation(e.to_string()))
        }
    };
    Ok((cfg, validated))
}

fn check_command(config_path: &Path) -> Result<(), CliError> {
    let (_, validated) = load(config_path)?;
    for w in &validated.warnings {
        eprintln!("warning: {w}");
    }
    println!("ok");
    Ok(())
}

fn run_command(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let (cfg, validated) = load(config_path)?;
    for w in &validated.warnings {
        eprintln!("warning: {w}");
    }
    execute(&cfg, &validated.scenario, &validated.warnings, out_dir)?;
    println!(
        "report written to {}",
        out_dir.join("report.json").display()
    );
    Ok(())
}

fn execute(
    cfg: &RunConfig,
    scenario: &Scenario,
    warnings: &[String],
    out_dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Runtime(e.into()))?;
    let outcome = run_pipeline(scenario)?;
    let slices = propagate(scenario, &outcome)?;

    let report = report::build_report(&cfg.name, &outcome, &slices, warnings);
    let formats = &cfg.output.formats;
    if formats.contains(&OutputFormat::Json) {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("report serialization failed: {e}")))?;
        std::fs::write(out_dir.join("report.json"), json)
            .map_err(|e| CliError::Runtime(e.into()))?;
    }
    if formats.contains(&OutputFormat::Csv) {
        report::emit_profile_csv(
            &slices,
            outcome.probe_in.max_abs(),
            &out_dir.join("profile.csv"),
        )?;
    }
    if formats.contains(&OutputFormat::Raster) {
        report::emit_rasters(&slices, &out_dir.join("slices"))?;
        slowlight::io::write_field_raster(&outcome.probe_in, &out_dir.join("probe_in"))?;
        slowlight::io::write_field_raster(&outcome.regenerated, &out_dir.join("regenerated"))?;
    }
    Ok(())
}

/// Propagate the regenerated light (or polariton) according to the plan.
fn propagate(
    scenario: &Scenario,
    outcome: &slowlight::scenario::PipelineOutcome,
) -> Result<Vec<SliceRecord>, CliError> {
    let plan = &scenario.plan;
    match plan.mode {
        PropagationMode::FreeSpace => Ok(propagate_free_space(
            &outcome.regenerated,
            plan,
            scenario.medium.kappa(),
        )?),
        PropagationMode::InMediumDecoupled => {
            let t_ref = scenario.schedule.t_retrieve + scenario.schedule.ramp;
            let (c2, c3) = scenario.retrieving.at(t_ref);
            let mix = mixing_params(&c2, &c3, &scenario.medium)?;
            let mats = assemble_paraxial_matrices(
                &scenario.retrieving,
                &mix,
                &scenario.medium,
                t_ref,
                plan.z_start,
            )?;
            Ok(propagate_polariton_decoupled(
                &outcome.retrieved.d1,
                &mix,
                &scenario.medium,
                &mats,
                plan,
            )?)
        }
        PropagationMode::InMediumCoupled => {
            let t_ref = scenario.schedule.t_retrieve + scenario.schedule.ramp;
            let state = PolaritonPair {
                d1: outcome.retrieved.d1.clone(),
                d2: outcome.retrieved.d2.clone(),
            };
            let records = propagate_polariton_coupled(
                &state,
                &scenario.retrieving,
                &scenario.medium,
                plan,
                t_ref,
            )?;
            // report on the radiative component
            Ok(records
                .into_iter()
                .map(|r| SliceRecord {
                    index: r.index,
                    z: r.z,
                    field: r.d1,
                })
                .collect())
        }
    }
}

#[derive(serde::Serialize)]
struct SweepEntry {
    value: f64,
    out_dir: String,
    vortex_charge: Option<i32>,
    rms_start: Option<f64>,
    rms_end: Option<f64>,
    peak_intensity: f64,
}

fn sweep_command(
    config_path: &Path,
    param: &str,
    values: &[f64],
    out_dir: &Path,
) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Validation(
            "sweep needs at least one value".into(),
        ));
    }
    let (base_cfg, _) = load(config_path)?;
    let mut entries = Vec::new();
    for &value in values {
        let mut cfg = base_cfg.clone();
        apply_sweep_param(&mut cfg, param, value)?;
        let validated = match validate_config(&cfg) {
            Ok(v) => v,
            Err(e) => return Err(CliError::Validation(format!("{param} = {value}: {e}"))),
        };
        let sub_dir = out_dir.join(format!("{param}_{value}"));
        cfg.name = format!("{}-{param}-{value}", cfg.name);
        execute(&cfg, &validated.scenario, &validated.warnings, &sub_dir)?;

        let report_text = std::fs::read_to_string(sub_dir.join("report.json"))
            .map_err(|e| CliError::Runtime(e.into()))?;
        let report: serde_json::Value = serde_json::from_str(&report_text)
            .map_err(|e| CliError::Runtime(anyhow::anyhow!("report parse: {e}")))?;
        let slices = report["slices"].as_array().cloned().unwrap_or_default();
        entries.push(SweepEntry {
            value,
            out_dir: sub_dir.display().to_string(),
            vortex_charge: report["regenerated"]["vortex_charge"]
                .as_i64()
                .map(|c| c as i32),
            rms_start: slices.first().and_then(|s| s["rms_radius"].as_f64()),
            rms_end: slices.last().and_then(|s| s["rms_radius"].as_f64()),
            peak_intensity: report["regenerated"]["peak_intensity"]
                .as_f64()
                .unwrap_or(f64::NAN),
        });
    }
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Runtime(e.into()))?;
    let json = serde_json::to_string_pretty(&entries)
        .map_err(|e| CliError::Runtime(anyhow::anyhow!("sweep summary: {e}")))?;
    std::fs::write(out_dir.join("sweep_summary.json"), json)
        .map_err(|e| CliError::Runtime(e.into()))?;
    println!(
        "sweep summary written to {}",
        out_dir.join("sweep_summary.json").display()
    );
    Ok(())
}

fn apply_sweep_param(cfg: &mut RunConfig, param: &str, value: f64) -> Result<(), CliError> {
    match param {
        // relative strength of the auxiliary storing control
        "b" => cfg.storing.c3.amplitude = value,
        // relative strength of the retrieving control
        "a" => cfg.retrieving.c2.amplitude = value,
        "sigma_p" => cfg.probe.beam.sigma = value,
        "sigma_s" => {
            cfg.storing.c2.sigma = value;
            cfg.storing.c3.sigma = value;
        }
        "sigma_r" => {
            cfg.retrieving.c2.sigma = value;
            cfg.retrieving.c3.sigma = value;
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown sweep parameter '{other}' (supported: b, a, sigma_p, sigma_s, sigma_r)"
            )))
        }
    }
    Ok(())
}
