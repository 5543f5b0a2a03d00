use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anseroid::analysis::{cost_ledger, detect_formation, mode_counts, stability_check};
use anseroid::config::{ConfigError, ScenarioFile};
use anseroid::drag::{derive_params, VehicleData};
use anseroid::io::{write_cost_series, write_shape_polylines, write_trajectory_csv};
use anseroid::sim::run_scenario;
use anseroid::SimError;
use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "anseroid", version, about = "Wake-coupled flocking simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write trajectory, summary and plot data.
    Run {
        config: PathBuf,
        /// Override a config value, e.g. `--set controller.kappa=0.3`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Worker threads for the per-tick controller fan-out.
        #[arg(long)]
        threads: Option<usize>,
        /// Seed for randomized initial conditions.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (defaults to `output.dir` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate wake and drag constants from vehicle data.
    Derive {
        /// Weight, N.
        weight: f64,
        /// Full wing span, m.
        span: f64,
        /// Cruise speed assumed drag-optimal, m/s.
        cruise: f64,
        /// Airspeed used for the circulation estimate, m/s.
        wake_speed: f64,
        /// Air density, kg/m^3.
        density: f64,
        /// Core radius as a fraction of the half-span.
        core_fraction: f64,
    },
    /// Run the acceptance suite and print a pass/fail table.
    Verify {
        /// Only run checks for this module or criterion id (e.g. `wake`, `c5`).
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn set_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

#[derive(Serialize)]
struct Manifest {
    config_path: String,
    overrides: Vec<String>,
    config_sha256: String,
    resolved: ScenarioFile,
    output_dir: String,
    timing_seconds: Timing,
}

#[derive(Serialize, Default)]
struct Timing {
    load: f64,
    simulate: f64,
    analyze: f64,
    write: f64,
}

#[derive(Serialize)]
struct Summary {
    scenario: String,
    agents: usize,
    ticks: usize,
    duration: f64,
    ledger: Vec<anseroid::analysis::AgentLedger>,
    stability: anseroid::analysis::StabilityReport,
    formation: anseroid::analysis::FormationMetrics,
    /// Ticks per agent in (constrained, relaxed) mode.
    modes: Vec<(usize, usize)>,
    /// Distance flown by the agent that ends furthest along the global heading, m.
    front_travel: f64,
    stable: bool,
}

enum Failure {
    Config(String),
    Numeric(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn cmd_run(
    config: &Path,
    mut overrides: Vec<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let t0 = Instant::now();
    if let Some(s) = seed {
        overrides.push(format!("scenario.seed={s}"));
    }
    let text = fs::read_to_string(config).map_err(|e| Failure::Config(format!("cannot read {}: {e}", config.display())))?;
    let file = ScenarioFile::from_str_with(&text, &overrides)?;
    let cfg = file.build().map_err(ConfigError::from)?;
    let mut timing = Timing {
        load: t0.elapsed().as_secs_f64(),
        ..Timing::default()
    };

    let t1 = Instant::now();
    let record = run_scenario(&cfg).map_err(|e| match e {
        SimError::NonFinite { .. } => Failure::Numeric(e.to_string()),
        SimError::Param(p) => Failure::Config(p.to_string()),
    })?;
    timing.simulate = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let ctl = &cfg.controller;
    let ranges: Vec<f64> = cfg.agents.iter().map(|a| a.params.bounds.speed_range()).collect();
    let stability = stability_check(&record, file.analysis.stability_window, &ranges, ctl.epsilon, ctl.theta_g);
    let half_span = cfg.agents[0].params.aero.vortex.half_span;
    let thresholds = file.analysis.thresholds();
    let formation = detect_formation(&record, record.duration(), ctl.theta_g, half_span, &thresholds);
    let first = &record.ticks[0];
    let last = record.final_tick();
    let front_travel = (last[formation.front].state.position - first[formation.front].state.position).norm();
    let summary = Summary {
        scenario: cfg.name.clone(),
        agents: record.agent_count,
        ticks: record.ticks.len(),
        duration: record.duration(),
        ledger: cost_ledger(&record),
        stable: stability.stable,
        stability,
        formation,
        modes: mode_counts(&record),
        front_travel,
    };
    timing.analyze = t2.elapsed().as_secs_f64();

    let t3 = Instant::now();
    let dir = out.unwrap_or_else(|| PathBuf::from(&file.output.dir));
    fs::create_dir_all(dir.join("plots"))?;
    write_trajectory_csv(&record, BufWriter::new(File::create(dir.join("trajectory.csv"))?))?;
    write_cost_series(&record, BufWriter::new(File::create(dir.join("plots/cost.csv"))?))?;
    let times = if file.analysis.shape_times.is_empty() {
        vec![0.0, record.duration()]
    } else {
        file.analysis.shape_times.clone()
    };
    write_shape_polylines(
        &record,
        &times,
        ctl.theta_g,
        half_span,
        &thresholds,
        BufWriter::new(File::create(dir.join("plots/shape.csv"))?),
    )?;
    write_json(&dir.join("summary.json"), &summary)?;
    timing.write = t3.elapsed().as_secs_f64();

    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    for o in &overrides {
        hasher.update(b"\n--set ");
        hasher.update(o.as_bytes());
    }
    let manifest = Manifest {
        config_path: config.display().to_string(),
        overrides,
        config_sha256: hex::encode(hasher.finalize()),
        resolved: file,
        output_dir: dir.display().to_string(),
        timing_seconds: timing,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;

    println!(
        "{}: {} agents, {} ticks, stable={}, formation={:?}, front travel {:.2} m -> {}",
        summary.scenario,
        summary.agents,
        summary.ticks,
        summary.stable,
        summary.formation.kind,
        summary.front_travel,
        dir.display()
    );
    for (i, l) in summary.ledger.iter().enumerate() {
        println!("  agent {i}: total cost {:.3}, terminal E {:.4}", l.total, l.terminal);
    }
    Ok(())
}

fn cmd_derive(data: VehicleData<f64>) -> Result<(), Failure> {
    let (vortex, drag) = derive_params(&data).map_err(|e| Failure::Config(e.to_string()))?;
    println!("[vehicle]");
    println!("gamma = {}", vortex.gamma);
    println!("omega = {}", vortex.omega);
    println!("# r_star = {}", vortex.r_star);
    println!("half_span = {}", vortex.half_span);
    println!("lift = {}", drag.lift);
    println!("c1 = {:e}", drag.c1);
    println!("c2 = {}", drag.c2);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Command::Run {
            config,
            set,
            threads,
            seed,
            out,
        } => {
            set_threads(threads);
            cmd_run(&config, set, seed, out)
        }
        Command::Derive {
            weight,
            span,
            cruise,
            wake_speed,
            density,
            core_fraction,
        } => cmd_derive(VehicleData {
            weight,
            span,
            cruise_speed: cruise,
            wake_speed,
            air_density: density,
            core_fraction,
        }),
        Command::Verify { only, seed, threads } => {
            set_threads(threads);
            println!("{}", anseroid_verify::table_header());
            let outcomes = anseroid_verify::run_suite_with(only.as_deref(), seed, |o| {
                println!("{}", anseroid_verify::render_line(o));
            });
            println!("{}", anseroid_verify::table_footer(&outcomes));
            if outcomes.is_empty() {
                eprintln!("no checks matched");
                return ExitCode::from(2);
            }
            return if outcomes.iter().all(|o| o.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("io error: {m}");
            ExitCode::from(1)
        }
    }
}
