//! `excitable`: sweep required-supply energy landscapes of excitable
//! circuit models and locate excitability thresholds.

// negated comparisons in config validation deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use excitable_core::{
    find_local_maximum, inhibitory_sweep, supplied_energy, supplied_energy_sampled,
    sweep_landscape, verify_event, Ansatz, EventVerification, ModelSpec, ThresholdReport,
};

use config::{config_hash, load_config, AnsatzFamily, ExperimentConfig, PRESET_NAMES};
use output::{ReportDocument, Trace};

/// Exit status for configuration problems.
const EXIT_VALIDATION: u8 = 2;
/// Exit status for numerical failures.
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "excitable", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a preset and/or a JSON config file.
    Run {
        /// JSON configuration document (full config, or overrides on top
        /// of --preset).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Built-in preset name (see `excitable presets`).
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (default: out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the sweep (0 = default pool).
        #[arg(long)]
        workers: Option<usize>,
        /// Dump the threshold-trajectory CSV and plots.
        #[arg(long)]
        dump_trajectories: bool,
    },
    /// List the built-in presets.
    Presets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            preset,
            out,
            workers,
            dump_trajectories,
        } => {
            let loaded = match load_config(preset.as_deref(), config.as_deref()) {
                Ok(c) => c,
                Err(err) => {
                    eprintln!("configuration error: {err:#}");
                    return ExitCode::from(EXIT_VALIDATION);
                }
            };
            let mut cfg = loaded;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if dump_trajectories {
                cfg.dump_trajectories = true;
            }
            let out_dir = out.unwrap_or_else(|| PathBuf::from("out"));
            match run_experiment(&cfg, &out_dir) {
                Ok(()) => ExitCode::SUCCESS,
                Err(RunError::Numerical(err)) => {
                    eprintln!("numerical failure: {err}");
                    ExitCode::from(EXIT_NUMERICAL)
                }
                Err(RunError::Other(err)) => {
                    eprintln!("error: {err:#}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}

enum RunError {
    Numerical(excitable_core::Error),
    Other(anyhow::Error),
}

impl From<excitable_core::Error> for RunError {
    fn from(err: excitable_core::Error) -> Self {
        RunError::Numerical(err)
    }
}

impl From<anyhow::Error> for RunError {
    fn from(err: anyhow::Error) -> Self {
        RunError::Other(err)
    }
}

fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(), RunError> {
    let spec = cfg.resolve_model().map_err(RunError::Other)?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(RunError::Other)?;

    let compute = || -> Result<_, RunError> {
        let a_grid = cfg.a_grid.values();
        let alpha_grid = cfg.alpha_grid.values();
        let landscape = sweep_landscape(&spec, &a_grid, &alpha_grid, &cfg.tolerances)?;
        let mut report = find_local_maximum(&spec, &landscape)?;
        report.verification = verify_across(&spec, cfg, &report)?;

        let inhibitory = match cfg.ansatz {
            AnsatzFamily::Exponential => None,
            AnsatzFamily::Biexponential => {
                let t = report.threshold.as_ref().ok_or_else(|| {
                    RunError::Other(anyhow!(
                        "the excitatory sweep found no threshold, so the biexponential stage \
                         has no (A*, alpha*) to fix"
                    ))
                })?;
                let b_grid: Vec<f64> = cfg
                    .b_fraction_grid
                    .expect("validated")
                    .values()
                    .into_iter()
                    .map(|f| f * t.amplitude)
                    .collect();
                let beta_grid = cfg.beta_grid.expect("validated").values();
                Some(inhibitory_sweep(
                    &spec,
                    t.amplitude,
                    t.alpha,
                    &b_grid,
                    &beta_grid,
                    &cfg.tolerances,
                )?)
            }
        };
        Ok((a_grid, alpha_grid, landscape, report, inhibitory))
    };

    // the sweep inherits the ambient rayon pool; a nonzero worker count
    // installs a dedicated one
    let (a_grid, alpha_grid, landscape, report, inhibitory) = if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| RunError::Other(anyhow!("cannot build worker pool: {e}")))?;
        pool.install(compute)?
    } else {
        compute()?
    };

    let model_name = model_name(&spec);
    let mut written = Vec::new();

    let csv_path = out_dir.join("landscape.csv");
    output::write_landscape_csv(&csv_path, &landscape).map_err(RunError::Other)?;
    written.push(csv_path);

    let svg_path = out_dir.join("landscape.svg");
    std::fs::write(
        &svg_path,
        output::landscape_plot(&landscape, &report, model_name),
    )
    .with_context(|| format!("writing {}", svg_path.display()))
    .map_err(RunError::Other)?;
    written.push(svg_path);

    let mut inhibitory_report: Option<ThresholdReport> = None;
    if let Some((inh_landscape, inh_report)) = &inhibitory {
        let path = out_dir.join("inhibitory.csv");
        output::write_inhibitory_csv(&path, inh_landscape).map_err(RunError::Other)?;
        written.push(path);
        let path = out_dir.join("inhibitory.svg");
        std::fs::write(&path, output::inhibitory_plot(inh_landscape, model_name))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(RunError::Other)?;
        written.push(path);
        inhibitory_report = Some(inh_report.clone());
    }

    if cfg.dump_trajectories {
        if let Some(t) = &report.threshold {
            let run = supplied_energy_sampled(
                &spec,
                &Ansatz::exponential(t.amplitude, t.alpha),
                &cfg.tolerances,
                4096,
            )?;
            let path = out_dir.join("trajectory_threshold.csv");
            output::write_trajectory_csv(&path, &spec, &run).map_err(RunError::Other)?;
            written.push(path);
            for (trace, name) in [
                (Trace::Voltage, "trajectory_voltage.svg"),
                (Trace::CumulativeSupply, "trajectory_supply.svg"),
            ] {
                let path = out_dir.join(name);
                std::fs::write(&path, output::trajectory_plot(&run, trace, model_name))
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(RunError::Other)?;
                written.push(path);
            }
        }
    }

    let doc = ReportDocument {
        tool_version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(cfg),
        config: cfg,
        model: &spec,
        tolerances: &cfg.tolerances,
        a_grid: &a_grid,
        alpha_grid: &alpha_grid,
        excitatory: &report,
        inhibitory: inhibitory_report.as_ref(),
    };
    let json_path = out_dir.join("threshold.json");
    output::write_report_json(&json_path, &doc).map_err(RunError::Other)?;
    written.push(json_path);

    println!("model: {model_name}");
    println!("excitatory: {}", output::summarize_threshold(&report));
    if let Some(v) = &report.verification {
        println!(
            "event check at +/-{:.3}: above -> {:?}, below -> {:?}",
            v.probe_offset, v.above, v.below
        );
    }
    if let Some(inh) = &inhibitory_report {
        println!("inhibitory: {}", output::summarize_threshold(inh));
    }
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Free-run check one coarse amplitude cell above and below a located
/// threshold; skipped for models without a regenerative branch.
fn verify_across(
    spec: &ModelSpec,
    cfg: &ExperimentConfig,
    report: &ThresholdReport,
) -> Result<Option<EventVerification>, RunError> {
    if matches!(spec, ModelSpec::LinearRc(_)) {
        return Ok(None);
    }
    let Some(t) = &report.threshold else {
        return Ok(None);
    };
    let cell = (cfg.a_grid.max - cfg.a_grid.min) / (cfg.a_grid.count - 1) as f64;
    let horizon = match spec {
        ModelSpec::Hh(_) => 50.0,
        ModelSpec::Fhn(_) => 30.0,
        _ => 60.0,
    };
    let probe = |amplitude: f64| -> Result<_, RunError> {
        let run = supplied_energy(
            spec,
            &Ansatz::exponential(amplitude, t.alpha),
            &cfg.tolerances,
        )?;
        Ok(verify_event(spec, run.final_voltage, &run.final_state, horizon)?.outcome)
    };
    Ok(Some(EventVerification {
        probe_offset: cell,
        above: probe(t.amplitude + cell)?,
        below: probe(t.amplitude - cell)?,
    }))
}

fn model_name(spec: &ModelSpec) -> &'static str {
    match spec {
        ModelSpec::LinearRc(_) => "linear RC",
        ModelSpec::CubicRc { .. } => "bistable RC",
        ModelSpec::Fhn(_) => "FitzHugh-Nagumo",
        ModelSpec::Hh(_) => "Hodgkin-Huxley",
    }
}
