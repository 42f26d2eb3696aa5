//! `qperc`: command-line front end for the directed quantum-walk percolation
//! simulator.

mod config;
mod emit;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

use config::{PartialConfig, RunConfig};
use qperc_core::continuum;
use qperc_core::lattice::{sample_edges_padded, Geometry};
use qperc_core::montecarlo::{probability_grid, sweep_padded, zeta_samples, SweepResult};
use qperc_core::observables::{window_exit_probability, ZetaSample};
use qperc_core::reference;
use qperc_core::walk::{init_state_for, StepContext};

#[derive(Parser)]
#[command(name = "qperc", version, about = "Directed quantum-walk percolation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single walk and dump the distribution and exit-probability series.
    Walk(WalkArgs),
    /// Sample per-realization percolation probabilities at a fixed p.
    Zeta(EnsembleArgs),
    /// Ensemble sweep of the mean percolation probability over a p grid.
    Sweep(EnsembleArgs),
    /// Locate the transition point on a p grid.
    Pa(EnsembleArgs),
    /// Closed-form continuum percolation curves and transition point.
    Analytic(AnalyticArgs),
    /// Join a sweep with the analytic curve and reference values.
    Compare(EnsembleArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON config file; command-line flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the fully resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    /// Lattice geometry: square, honeycomb, or nanotube.
    #[arg(long)]
    geometry: Option<String>,
    /// Vertex count per side (sets both dimensions).
    #[arg(long)]
    size: Option<usize>,
    /// Vertex count along x (overrides --size).
    #[arg(long)]
    nx: Option<usize>,
    /// Vertex count along y (overrides --size).
    #[arg(long)]
    ny: Option<usize>,
    /// Coin angle in radians.
    #[arg(long, conflicts_with_all = ["theta_deg", "theta_random"])]
    theta: Option<f64>,
    /// Coin angle in degrees.
    #[arg(long, conflicts_with = "theta_random")]
    theta_deg: Option<f64>,
    /// Draw a fresh uniform [0, pi] angle at every vertex.
    #[arg(long)]
    theta_random: bool,
    /// Seed for the random angle field.
    #[arg(long)]
    coin_seed: Option<u64>,
    /// Directed-coin parameter: 1 is fully directed, r >= 2 adds self-loops.
    #[arg(long)]
    r: Option<u32>,
    /// Initial spinor polar angle (radians).
    #[arg(long)]
    delta: Option<f64>,
    /// Initial spinor relative phase (radians).
    #[arg(long)]
    eta: Option<f64>,
    /// Origin column override (defaults to the center).
    #[arg(long)]
    origin_x: Option<usize>,
    /// Origin row override (defaults to 0).
    #[arg(long)]
    origin_y: Option<usize>,
    /// Fully connected padding columns on each side.
    #[arg(long)]
    pad: Option<usize>,
    /// Master seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Step budget before a run is declared non-converged.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Stationarity tolerance for ensemble runs.
    #[arg(long)]
    eps_stat: Option<f64>,
    /// Worker threads for ensemble runs (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output path (stdout if omitted; `walk` requires it).
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Clone)]
struct WalkArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of walk steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Edge presence probability (omit for a fully connected lattice).
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Edge presence probability (zeta at a single p).
    #[arg(long)]
    p: Option<f64>,
    /// Grid start for sweeps.
    #[arg(long)]
    p_start: Option<f64>,
    /// Grid stop for sweeps.
    #[arg(long)]
    p_stop: Option<f64>,
    /// Grid step (also the reporting resolution of the transition point).
    #[arg(long)]
    p_step: Option<f64>,
    /// Disorder realizations per grid point.
    #[arg(long)]
    trials: Option<u32>,
    /// Percolation threshold defining the transition point.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args, Clone)]
struct AnalyticArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    p_start: Option<f64>,
    #[arg(long)]
    p_stop: Option<f64>,
    #[arg(long)]
    p_step: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", serde_json::json!({ "error": format!("{err:#}") }));
            std::process::ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (name, common) = match &cli.command {
        Command::Walk(a) => ("walk", &a.common),
        Command::Zeta(a) => ("zeta", &a.common),
        Command::Sweep(a) => ("sweep", &a.common),
        Command::Pa(a) => ("pa", &a.common),
        Command::Analytic(a) => ("analytic", &a.common),
        Command::Compare(a) => ("compare", &a.common),
    };
    let mut partial = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config file {}", path.display()))?;
            serde_json::from_str::<PartialConfig>(&text)
                .with_context(|| format!("parsing config file {}", path.display()))?
        }
        None => PartialConfig::default(),
    };
    partial.overlay(&cli.command);
    let config = partial.resolve(name)?;

    if common.dump_config {
        println!("{}", serde_json::to_string_pretty(&config)?);
        return Ok(());
    }
    if let Some(jobs) = config.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }

    match &cli.command {
        Command::Walk(_) => cmd_walk(&config),
        Command::Zeta(_) => cmd_zeta(&config),
        Command::Sweep(_) => cmd_sweep(&config, false),
        Command::Pa(_) => cmd_sweep(&config, true),
        Command::Analytic(_) => cmd_analytic(&config),
        Command::Compare(_) => cmd_compare(&config),
    }
}

fn cmd_walk(config: &RunConfig) -> Result<()> {
    let output = config
        .output
        .as_ref()
        .ok_or_else(|| anyhow!("walk requires --output as the artifact prefix"))?;
    let spec = config.lattice_spec()?;
    let coins = config.coin_params()?;
    let edge = sample_edges_padded(&spec, config.p.unwrap_or(1.0), config.master_seed, config.pad)
        .map_err(|e| anyhow!(e))?;
    let init = config.initial_state(&edge)?;
    let mut state = init_state_for(&edge, &init).map_err(|e| anyhow!(e))?;
    let ctx = StepContext::new(&edge, &coins).map_err(|e| anyhow!(e))?;

    let mut series = Vec::with_capacity(config.steps + 1);
    series.push((0usize, window_exit_probability(&state, &edge)));
    for t in 1..=config.steps {
        ctx.step(&mut state, &edge).map_err(|e| anyhow!(e))?;
        series.push((t, window_exit_probability(&state, &edge)));
    }

    let header = emit::provenance(config);
    // Distribution dump in centered coordinates: x measured from the origin
    // column.
    let mut dist = String::new();
    dist.push_str(&header);
    dist.push_str("x,y,prob\n");
    let center = (state.n_x / 2) as i64;
    for y in 0..state.n_y {
        for x in 0..state.n_x {
            dist.push_str(&format!(
                "{},{},{:.16e}\n",
                x as i64 - center,
                y,
                state.probability(x, y)
            ));
        }
    }
    let mut pt = String::new();
    pt.push_str(&header);
    pt.push_str("t,exit_probability\n");
    for (t, p) in &series {
        pt.push_str(&format!("{},{:.16e}\n", t, p));
    }

    let dist_path = emit::with_suffix(output, "dist.csv");
    let pt_path = emit::with_suffix(output, "pt.csv");
    emit::atomic_write(&dist_path, &dist)?;
    emit::atomic_write(&pt_path, &pt)?;
    println!(
        "wrote {} and {} (P({}) = {:.6})",
        dist_path.display(),
        pt_path.display(),
        config.steps,
        series.last().unwrap().1
    );
    Ok(())
}

fn cmd_zeta(config: &RunConfig) -> Result<()> {
    let p = config.p.ok_or_else(|| anyhow!("zeta requires --p"))?;
    let spec = config.lattice_spec()?;
    let coins = config.coin_params()?;
    let edge = sample_edges_padded(&spec, p, config.master_seed, config.pad)
        .map_err(|e| anyhow!(e))?;
    let init = config.initial_state(&edge)?;
    let policy = config.evolve_policy(&edge);
    let samples = zeta_samples(
        &spec,
        p,
        &coins,
        &init,
        config.trials,
        config.master_seed,
        &policy,
        config.pad,
    )
    .map_err(|e| anyhow!(e))?;

    let mut body = String::new();
    body.push_str(&emit::provenance(config));
    body.push_str(ZetaSample::csv_header());
    body.push('\n');
    for s in &samples {
        body.push_str(&s.csv_row());
        body.push('\n');
    }
    emit::deliver(config, &body)?;
    let mean = samples.iter().map(|s| s.zeta).sum::<f64>() / samples.len() as f64;
    eprintln!("mean zeta({p}) = {mean:.6} over {} realizations", samples.len());
    Ok(())
}

fn run_sweep(config: &RunConfig) -> Result<SweepResult> {
    let spec = config.lattice_spec()?;
    let coins = config.coin_params()?;
    let edge = sample_edges_padded(&spec, 1.0, config.master_seed, config.pad)
        .map_err(|e| anyhow!(e))?;
    let init = config.initial_state(&edge)?;
    let policy = config.evolve_policy(&edge);
    let grid = match config.p {
        Some(p) => vec![p],
        None => probability_grid(config.p_start, config.p_stop, config.p_step),
    };
    sweep_padded(
        &spec,
        &coins,
        &init,
        &grid,
        config.trials,
        config.master_seed,
        &policy,
        config.threshold,
        config.pad,
    )
    .map_err(|e| anyhow!(e))
}

fn cmd_sweep(config: &RunConfig, want_pa: bool) -> Result<()> {
    let result = run_sweep(config)?;
    if config.format_json() {
        let doc = serde_json::json!({
            "provenance": config,
            "result": result,
        });
        emit::deliver(config, &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
    } else {
        let mut body = emit::provenance(config);
        if let Some(pa) = result.p_a {
            body.push_str(&format!("# p_a = {pa:.16e}\n"));
        }
        body.push_str(&result.csv_rows());
        emit::deliver(config, &body)?;
    }
    if want_pa {
        match result.p_a {
            Some(pa) => eprintln!("p_a = {pa:.4} (threshold {})", result.threshold),
            None => bail!("the mean percolation probability never reaches the threshold on the grid"),
        }
    }
    Ok(())
}

fn cmd_analytic(config: &RunConfig) -> Result<()> {
    let n = config.n_y;
    let theta = config.fixed_theta_or_default();
    let grid = probability_grid(config.p_start, config.p_stop, config.p_step);
    let pa = continuum::analytic_pa(n, config.threshold).map_err(|e| anyhow!(e))?;
    let mut body = emit::provenance(config);
    body.push_str(&format!("# p_a = {pa:.16e}\n"));
    body.push_str("p,zeta_y,zeta_x\n");
    for &p in &grid {
        let zy = continuum::zeta_y(p, n).map_err(|e| anyhow!(e))?;
        let zx = if p > 0.0 {
            continuum::zeta_x(p, n, theta).map_err(|e| anyhow!(e))?
        } else {
            0.0
        };
        body.push_str(&format!("{},{:.16e},{:.16e}\n", p, zy, zx));
    }
    emit::deliver(config, &body)?;
    println!("analytic p_a(n = {n}, threshold = {}) = {pa:.4}", config.threshold);
    Ok(())
}

fn cmd_compare(config: &RunConfig) -> Result<()> {
    let result = run_sweep(config)?;
    let geometry = config.geometry()?;
    let reference_pa = reference::reported_transition_point(geometry, config.n_y);
    let classical = reference::classical_threshold(geometry);
    // The analytic curve attenuates per move: 2 n_y amplitude factors on the
    // square lattice; the two-rows-per-step geometries cross in n_y / 2
    // steps of two moves each.
    let exponent_rows = match geometry {
        Geometry::Square => config.n_y,
        Geometry::Honeycomb | Geometry::Nanotube => config.n_y / 2,
    };
    let mut body = emit::provenance(config);
    body.push_str("p,mean_zeta,stderr,analytic_zeta_y,reference_pa,classical_pc\n");
    for k in 0..result.p_grid.len() {
        let p = result.p_grid[k];
        let analytic = continuum::zeta_y(p, exponent_rows).map_err(|e| anyhow!(e))?;
        let reference = reference_pa.map_or("na".to_string(), |v| format!("{v}"));
        body.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{},{}\n",
            p, result.mean_zeta[k], result.stderr_zeta[k], analytic, reference, classical
        ));
    }
    emit::deliver(config, &body)?;
    if let Some(pa) = result.p_a {
        eprintln!(
            "measured p_a = {pa:.4}; reference = {}; classical threshold = {classical}",
            reference_pa.map_or("na".to_string(), |v| format!("{v:.3}"))
        );
    }
    Ok(())
}
