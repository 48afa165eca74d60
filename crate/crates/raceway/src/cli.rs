//! Subcommand dispatch. Exit status: 0 success, 1 computation error, 2 usage
//! or configuration error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use raceway_core::{optimize, simulate as run_layers, FourierShape, LayerSetup};
use serde::Serialize;

use crate::config::{RunConfig, OUTPUT_DIR_ENV};
use crate::error::{Error, Result};
use crate::output::{self, TopographyDump};
use crate::sampler::ShapeSampler;
use crate::sweep;

#[derive(Debug, Parser)]
#[command(
    name = "raceway",
    version,
    about = "Raceway pond topography optimization"
)]
pub struct Cli {
    /// TOML configuration; missing keys take their defaults.
    #[arg(long, short, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving the artifacts.
    #[arg(long, short, global = true, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Number of tracked layers.
    #[arg(long)]
    pub layers: Option<usize>,
    /// Integrator step (s).
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forward solve; writes one trace per layer.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        /// Shape file (`n,a`); flat when absent.
        #[arg(long)]
        shape: Option<PathBuf>,
    },
    /// Gradient ascent from the flat profile or a given shape.
    Optimize {
        #[command(flatten)]
        model: ModelArgs,
        /// Fourier order.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Initial shape file; its length sets the order.
        #[arg(long, conflicts_with = "order")]
        shape: Option<PathBuf>,
    },
    /// Mean objective over random shapes for each layer count.
    NzSweep {
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        n_random: Option<usize>,
        /// Sweep `1..=nz_max`.
        #[arg(long)]
        nz_max: Option<usize>,
        /// Explicit comma-separated layer counts instead of `1..=nz_max`.
        #[arg(long, value_delimiter = ',')]
        nz: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Optimize for each Fourier order.
    OrderSweep {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',')]
        orders: Option<Vec<usize>>,
    },
    /// Compare the adjoint gradient with central differences.
    GradCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        order: Option<usize>,
        /// Finite-difference step.
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Shape file to check at; a seeded random shape otherwise.
        #[arg(long, conflicts_with_all = ["order", "flat"])]
        shape: Option<PathBuf>,
        /// Check at the flat profile.
        #[arg(long)]
        flat: bool,
    },
    /// Sample h, zb, eta and u along the raceway.
    DumpTopography {
        /// Shape file; flat when absent.
        #[arg(long)]
        shape: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        /// Also write this many layer trajectories.
        #[arg(long, default_value_t = 0)]
        trajectories: usize,
        #[arg(long)]
        dt: Option<f64>,
    },
}

impl ModelArgs {
    fn apply(&self, config: &mut RunConfig) {
        if let Some(layers) = self.layers {
            config.layers = layers;
        }
        if let Some(dt) = self.dt {
            config.dt = dt;
        }
    }
}

/// Parses `args` (program name first), runs the command and maps errors to an exit status.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Format { .. } => 2,
                _ => 1,
            })
        }
    }
}

fn load_shape(path: Option<&Path>) -> Result<Option<FourierShape>> {
    path.map(output::read_shape).transpose()
}

#[derive(Serialize)]
struct SimulateRecord<'a> {
    config: &'a RunConfig,
    coeffs: &'a [f64],
    mu: f64,
    layers: usize,
    final_time: f64,
    steps: usize,
}

#[derive(Serialize)]
struct OptimizeRecord<'a> {
    config: &'a RunConfig,
    initial: &'a [f64],
    a_star: &'a [f64],
    mu: f64,
    grad_norm: f64,
    iterations: usize,
    termination: &'static str,
    min_height: f64,
    critical_height: f64,
    mu_history: &'a [f64],
    grad_norm_history: &'a [f64],
    step_history: &'a [f64],
}

#[derive(Serialize)]
struct NzRow {
    nz: usize,
    mean_mu: f64,
}

#[derive(Serialize)]
struct NzSweepRecord<'a> {
    config: &'a RunConfig,
    shapes: Vec<&'a [f64]>,
    rows: Vec<NzRow>,
}

#[derive(Serialize)]
struct OrderRow<'a> {
    order: usize,
    iterations: usize,
    mu: f64,
    log10_grad_norm: Option<f64>,
    termination: &'static str,
    a_star: &'a [f64],
}

#[derive(Serialize)]
struct OrderSweepRecord<'a> {
    config: &'a RunConfig,
    rows: Vec<OrderRow<'a>>,
}

#[derive(Serialize)]
struct GradRow {
    n: usize,
    analytic: f64,
    fd: f64,
    relative_error: f64,
}

#[derive(Serialize)]
struct GradCheckRecord<'a> {
    config: &'a RunConfig,
    coeffs: &'a [f64],
    mu: f64,
    rows: Vec<GradRow>,
    max_relative_error: f64,
}

pub fn execute(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.output_dir {
        config.output_dir = dir.clone();
    }
    match &cli.command {
        Command::Simulate { model, shape } => {
            model.apply(&mut config);
            config.validate()?;
            let shape = load_shape(shape.as_deref())?.unwrap_or_else(|| FourierShape::flat(0));
            cmd_simulate(&config, &shape)
        }
        Command::Optimize {
            model,
            order,
            rho,
            max_iter,
            shape,
        } => {
            model.apply(&mut config);
            let initial = load_shape(shape.as_deref())?;
            if let Some(initial) = &initial {
                config.order = initial.order();
            }
            config.order = order.unwrap_or(config.order);
            config.rho = rho.unwrap_or(config.rho);
            config.max_iter = max_iter.unwrap_or(config.max_iter);
            config.validate()?;
            let initial = initial.unwrap_or_else(|| FourierShape::flat(config.order));
            cmd_optimize(&config, initial)
        }
        Command::NzSweep {
            dt,
            order,
            n_random,
            nz_max,
            nz,
            seed,
        } => {
            config.dt = dt.unwrap_or(config.dt);
            config.order = order.unwrap_or(config.order);
            config.n_random = n_random.unwrap_or(config.n_random);
            config.nz_max = nz_max.unwrap_or(config.nz_max);
            config.seed = seed.unwrap_or(config.seed);
            config.validate()?;
            let counts = nz.clone().unwrap_or_else(|| (1..=config.nz_max).collect());
            if counts.contains(&0) {
                return Err(crate::error::ConfigError::validation(
                    "nz",
                    "layer counts must be at least 1".into(),
                )
                .into());
            }
            cmd_nz_sweep(&config, &counts)
        }
        Command::OrderSweep { model, orders } => {
            model.apply(&mut config);
            if let Some(orders) = orders {
                config.orders = orders.clone();
            }
            config.validate()?;
            cmd_order_sweep(&config)
        }
        Command::GradCheck {
            model,
            order,
            step,
            seed,
            shape,
            flat,
        } => {
            model.apply(&mut config);
            let given = load_shape(shape.as_deref())?;
            if let Some(given) = &given {
                config.order = given.order();
            }
            config.order = order.unwrap_or(config.order);
            config.fd_step = step.unwrap_or(config.fd_step);
            config.seed = seed.unwrap_or(config.seed);
            config.validate()?;
            let shape = match given {
                Some(shape) => shape,
                None if *flat => FourierShape::flat(config.order),
                None => ShapeSampler::new(config.env(), config.order, config.seed).sample(),
            };
            cmd_grad_check(&config, &shape)
        }
        Command::DumpTopography {
            shape,
            samples,
            trajectories,
            dt,
        } => {
            config.samples = samples.unwrap_or(config.samples);
            config.dt = dt.unwrap_or(config.dt);
            config.validate()?;
            let shape = load_shape(shape.as_deref())?.unwrap_or_else(|| FourierShape::flat(0));
            cmd_dump(&config, &shape, *trajectories)
        }
    }
}

fn cmd_simulate(config: &RunConfig, shape: &FourierShape) -> Result<()> {
    let env = config.env();
    let traces = run_layers(
        shape,
        &env,
        &config.han(),
        &LayerSetup::uniform(config.layers),
        config.dt,
    )?;
    let mu = raceway_core::average_growth(&traces);
    let dir = &config.output_dir;
    output::ensure_dir(dir)?;
    for (i, trace) in traces.iter().enumerate() {
        output::write_trace(&dir.join(format!("layer_{:03}.csv", i + 1)), trace)?;
    }
    let first = &traces[0];
    output::write_json(
        &dir.join("simulate.json"),
        &SimulateRecord {
            config,
            coeffs: shape.coeffs(),
            mu,
            layers: traces.len(),
            final_time: first.final_time(),
            steps: first.n_steps(),
        },
    )?;
    println!(
        "mu_bar={mu:e} layers={} T={} steps={}",
        traces.len(),
        first.final_time(),
        first.n_steps()
    );
    Ok(())
}

fn cmd_optimize(config: &RunConfig, initial: FourierShape) -> Result<()> {
    let env = config.env();
    let report = optimize(initial.clone(), &config.settings(), &env, &config.han())?;
    let dir = &config.output_dir;
    output::ensure_dir(dir)?;
    let check = report.a_star.refined_min_height(&env);
    output::write_json(
        &dir.join("report.json"),
        &OptimizeRecord {
            config,
            initial: initial.coeffs(),
            a_star: report.a_star.coeffs(),
            mu: report.mu(),
            grad_norm: report.grad_norm(),
            iterations: report.iterations,
            termination: report.termination.as_str(),
            min_height: check.min_h,
            critical_height: env.critical_height(),
            mu_history: &report.mu_history,
            grad_norm_history: &report.grad_norm_history,
            step_history: &report.step_history,
        },
    )?;
    output::write_history(&dir.join("mu_history.csv"), &report)?;
    output::write_shape(&dir.join("a_star.csv"), &report.a_star)?;
    TopographyDump::sample(&report.a_star, &env, config.samples)?
        .write(&dir.join("topography.csv"))?;
    println!(
        "mu_bar={:e} iterations={} termination={} grad_norm={:e}",
        report.mu(),
        report.iterations,
        report.termination.as_str(),
        report.grad_norm()
    );
    Ok(())
}

fn cmd_nz_sweep(config: &RunConfig, counts: &[usize]) -> Result<()> {
    let env = config.env();
    let shapes = ShapeSampler::new(env, config.order, config.seed).take(config.n_random);
    let rows = sweep::nz_sweep(&shapes, &env, &config.han(), counts, config.dt)?;
    let dir = &config.output_dir;
    output::ensure_dir(dir)?;
    output::write_table(
        &dir.join("nz_sweep.csv"),
        &["nz", "mean_mu"],
        rows.iter()
            .map(|(nz, m)| vec![nz.to_string(), m.to_string()]),
    )?;
    output::write_json(
        &dir.join("nz_sweep.json"),
        &NzSweepRecord {
            config,
            shapes: shapes.iter().map(FourierShape::coeffs).collect(),
            rows: rows
                .iter()
                .map(|&(nz, mean_mu)| NzRow { nz, mean_mu })
                .collect(),
        },
    )?;
    let (nz, last) = rows.last().copied().unwrap_or((0, f64::NAN));
    println!(
        "shapes={} layer_counts={} mean_mu_bar(nz={nz})={last:e}",
        shapes.len(),
        rows.len()
    );
    Ok(())
}

fn cmd_order_sweep(config: &RunConfig) -> Result<()> {
    let rows = sweep::order_sweep(
        &config.env(),
        &config.han(),
        &config.orders,
        &config.settings(),
    )?;
    let dir = &config.output_dir;
    output::ensure_dir(dir)?;
    output::write_table(
        &dir.join("order_sweep.csv"),
        &[
            "order",
            "iterations",
            "mu",
            "log10_grad_norm",
            "termination",
        ],
        rows.iter().map(|r| {
            vec![
                r.order.to_string(),
                r.iterations.to_string(),
                r.mu.to_string(),
                r.log10_grad_norm.map(|g| g.to_string()).unwrap_or_default(),
                r.termination.as_str().to_string(),
            ]
        }),
    )?;
    output::write_json(
        &dir.join("order_sweep.json"),
        &OrderSweepRecord {
            config,
            rows: rows
                .iter()
                .map(|r| OrderRow {
                    order: r.order,
                    iterations: r.iterations,
                    mu: r.mu,
                    log10_grad_norm: r.log10_grad_norm,
                    termination: r.termination.as_str(),
                    a_star: r.a_star.coeffs(),
                })
                .collect(),
        },
    )?;
    println!(
        "{:>5} {:>6} {:>16} {:>12} termination",
        "N", "iter", "mu_bar", "log10|grad|"
    );
    for r in &rows {
        let g = r
            .log10_grad_norm
            .map(|g| format!("{g:.4}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:>5} {:>6} {:>16.9e} {:>12} {}",
            r.order,
            r.iterations,
            r.mu,
            g,
            r.termination.as_str()
        );
    }
    Ok(())
}

fn cmd_grad_check(config: &RunConfig, shape: &FourierShape) -> Result<()> {
    let setup = LayerSetup::uniform(config.layers);
    let (mu, report) = sweep::grad_check(
        shape,
        &config.env(),
        &config.han(),
        &setup,
        config.dt,
        config.fd_step,
    )?;
    let dir = &config.output_dir;
    output::ensure_dir(dir)?;
    output::write_grad_check(&dir.join("grad_check.csv"), &report)?;
    let max = report.max_relative_error().unwrap_or(0.0);
    let rows: Vec<GradRow> = report
        .fd_check
        .iter()
        .flatten()
        .enumerate()
        .map(|(i, c)| GradRow {
            n: i + 1,
            analytic: c.analytic,
            fd: c.finite_difference,
            relative_error: c.relative_error,
        })
        .collect();
    println!(
        "{:>3} {:>24} {:>24} {:>12}",
        "n", "analytic", "fd", "rel_error"
    );
    for r in &rows {
        println!(
            "{:>3} {:>24.15e} {:>24.15e} {:>12.3e}",
            r.n, r.analytic, r.fd, r.relative_error
        );
    }
    output::write_json(
        &dir.join("grad_check.json"),
        &GradCheckRecord {
            config,
            coeffs: shape.coeffs(),
            mu,
            rows,
            max_relative_error: max,
        },
    )?;
    println!(
        "mu_bar={mu:e} order={} layers={} max_relative_error={max:e}",
        shape.order(),
        config.layers
    );
    Ok(())
}

fn cmd_dump(config: &RunConfig, shape: &FourierShape, trajectories: usize) -> Result<()> {
    let env = config.env();
    let dir = &config.output_dir;
    output::ensure_dir(dir)?;
    let dump = TopographyDump::sample(shape, &env, config.samples)?;
    dump.write(&dir.join("topography.csv"))?;
    if trajectories > 0 {
        let traces = run_layers(
            shape,
            &env,
            &config.han(),
            &LayerSetup::uniform(trajectories),
            config.dt,
        )?;
        for (i, trace) in traces.iter().enumerate() {
            output::write_trace(&dir.join(format!("trajectory_{:03}.csv", i + 1)), trace)?;
        }
    }
    let min_h = dump.h.iter().copied().fold(f64::INFINITY, f64::min);
    println!(
        "samples={} trajectories={trajectories} min_h={min_h}",
        dump.len()
    );
    Ok(())
}
