//! Per-step simulation loop and multi-run experiments.
//!
//! One control step is: move every agent one Euler step up the gradient of
//! the current potential, deposit dwell time at the new positions, then
//! refresh the empirical density, the deficit `e = mu - c`, and the
//! potential smoothed from it. The potential is rebuilt from the deficit
//! every step; nothing is carried over, so the field an agent climbs always
//! reflects the full coverage history.
//!
//! Runs are deterministic: one seeded stream drives initial positions and
//! headings, and everything after that is arithmetic. An experiment fans
//! independent runs over a thread pool, deriving run seeds so that run `r`
//! of every method can start from identical positions, which makes
//! per-run method comparisons paired rather than merely averaged.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agents::{self, AgentState, ControlParams};
use crate::coverage::{self, CoverageAccumulator};
use crate::density::TargetDensity;
use crate::diffusion::smc::SmcBasis;
use crate::diffusion::{diffuse_spectrum, hedac_spectrum, DiffusionParams, Method};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::Grid2D;
use crate::spectral::SpectralWorkspace;
use crate::vec2::Vec2;

/// Where agents start.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPositions {
    /// Drawn uniformly over the domain from the run's seed.
    Random,
    /// Staging cluster: drawn uniformly over a disk from the run's seed,
    /// clamped into the domain. Models a team deployed together near the
    /// task instead of scattered over the whole workspace.
    Disk { center: Vec2, radius: f64 },
    /// Fixed list, one entry per agent.
    Explicit(Vec<Vec2>),
}

/// Everything a single run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: Grid2D,
    pub method: Method,
    pub diffusion: DiffusionParams,
    pub control: ControlParams,
    pub n_agents: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub initial_positions: InitialPositions,
    /// Keep every m-th trajectory frame (the first and last are always kept).
    pub trajectory_stride: usize,
}

impl SimConfig {
    /// Defaults on the given grid: the nonlinear method, ten agents,
    /// a thousand steps, and a staging disk at the domain center with
    /// radius 5% of the shorter edge.
    pub fn new(grid: Grid2D) -> Self {
        SimConfig {
            grid,
            method: Method::PeronaMalik,
            diffusion: DiffusionParams::default(),
            control: ControlParams::default(),
            n_agents: 10,
            n_steps: 1000,
            seed: 0,
            initial_positions: InitialPositions::Disk {
                center: Vec2::new(0.5 * grid.lx(), 0.5 * grid.ly()),
                radius: 0.05 * grid.lx().min(grid.ly()),
            },
            trajectory_stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.method.validate()?;
        self.diffusion.validate()?;
        self.control.validate()?;
        if self.n_agents == 0 {
            return Err(Error::config("run.n_agents", "need at least one agent"));
        }
        if self.trajectory_stride == 0 {
            return Err(Error::config("run.trajectory_stride", "stride must be at least 1"));
        }
        match &self.initial_positions {
            InitialPositions::Random => {}
            InitialPositions::Disk { center, radius } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::config(
                        "run.initial_positions",
                        format!("staging radius must be positive, got {radius}"),
                    ));
                }
                if !self.grid.contains(*center) {
                    return Err(Error::config(
                        "run.initial_positions",
                        format!("staging center ({}, {}) is outside the domain", center.x, center.y),
                    ));
                }
            }
            InitialPositions::Explicit(points) => {
                if points.len() != self.n_agents {
                    return Err(Error::config(
                        "run.initial_positions",
                        format!("{} positions for {} agents", points.len(), self.n_agents),
                    ));
                }
                if let Some(p) = points.iter().find(|p| !self.grid.contains(**p)) {
                    return Err(Error::config(
                        "run.initial_positions",
                        format!("({}, {}) is outside the domain", p.x, p.y),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Output of one run.
///
/// `final_potential` is the field whose gradient the agents were climbing,
/// rebuilt from the final deficit; for the cosine-basis method this is the
/// ascent orientation (the negated descent potential), so the steering
/// convention is uniform across methods.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Global coverage error per control step, including the initial state.
    pub error_series: Vec<f64>,
    /// Stored frames as (step, positions per agent).
    pub trajectory: Vec<(usize, Vec<Vec2>)>,
    pub final_coverage: ScalarField,
    pub final_error: ScalarField,
    pub final_potential: ScalarField,
    pub wall_time: Duration,
}

/// Per-run potential evaluator; holds whichever precomputed machinery the
/// method needs so the step loop stays allocation-light.
enum Steering {
    PeronaMalik { params: DiffusionParams, ws: SpectralWorkspace },
    Hedac { beta: f64, tau: f64, ws: SpectralWorkspace },
    Smc { basis: SmcBasis },
}

/// The deficit rescaled to unit peak magnitude.
///
/// Only the gradient direction of the potential reaches the control law,
/// so for the linear smoothers this changes nothing. For the nonlinear
/// one it anchors the edge threshold: K measures gradients relative to
/// the deficit's own scale, so the same K means the same thing on every
/// grid and scenario instead of depending on the density's physical units.
fn unit_peak(e: &ScalarField) -> ScalarField {
    let peak = e.max_abs();
    let mut scaled = e.clone();
    if peak > 0.0 {
        scaled.scale(1.0 / peak);
    }
    scaled
}

impl Steering {
    fn new(method: &Method, diffusion: &DiffusionParams, grid: Grid2D) -> Steering {
        match *method {
            Method::PeronaMalik => {
                Steering::PeronaMalik { params: *diffusion, ws: SpectralWorkspace::new(grid) }
            }
            Method::Hedac { beta } => {
                Steering::Hedac { beta, tau: diffusion.tau, ws: SpectralWorkspace::new(grid) }
            }
            Method::Smc { modes, weight_exponent } => {
                Steering::Smc { basis: SmcBasis::new(grid, modes, weight_exponent) }
            }
        }
    }

    /// Gradient of the potential built from the deficit `e`; errors carry
    /// the control step they occurred in.
    fn gradient(&self, e: &ScalarField, step: usize) -> Result<(ScalarField, ScalarField)> {
        let e = unit_peak(e);
        match self {
            Steering::PeronaMalik { params, ws } => {
                let spec = diffuse_spectrum(&e, params, ws).map_err(|err| at_step(err, step))?;
                Ok(ws.gradient_spectrum(&spec))
            }
            Steering::Hedac { beta, tau, ws } => {
                Ok(ws.gradient_spectrum(&hedac_spectrum(&e, *beta, *tau, ws)))
            }
            Steering::Smc { basis } => Ok(basis.synthesize_gradient(&smc_weights(basis, &e))),
        }
    }

    fn potential(&self, e: &ScalarField, step: usize) -> Result<ScalarField> {
        let e = unit_peak(e);
        match self {
            Steering::PeronaMalik { params, ws } => {
                let spec = diffuse_spectrum(&e, params, ws).map_err(|err| at_step(err, step))?;
                Ok(ws.inverse(&spec))
            }
            Steering::Hedac { beta, tau, ws } => {
                Ok(ws.inverse(&hedac_spectrum(&e, *beta, *tau, ws)))
            }
            Steering::Smc { basis } => Ok(basis.synthesize(&smc_weights(basis, &e))),
        }
    }
}

/// Frequency-weighted deficit coefficients: the ascent potential for the
/// cosine-basis method is the weighted synthesis of `e` itself.
fn smc_weights(basis: &SmcBasis, e: &ScalarField) -> Vec<f64> {
    let m = basis.modes();
    let mut w = basis.project(e);
    for m2 in 0..m {
        for m1 in 0..m {
            w[m2 * m + m1] *= basis.lambda(m1, m2);
        }
    }
    w
}

fn at_step(err: Error, control_step: usize) -> Error {
    match err {
        Error::Instability { step, detail } => Error::Instability {
            step: control_step,
            detail: format!("{detail} (inner step {step})"),
        },
        other => other,
    }
}

/// Execute one simulation run.
pub fn run(config: &SimConfig, mu: &TargetDensity) -> Result<RunResult> {
    config.validate()?;
    if *mu.field().grid() != config.grid {
        return Err(Error::GridMismatch {
            context: "target density grid does not match the run grid".into(),
        });
    }
    let start = Instant::now();
    let grid = config.grid;
    let dt = config.control.dt;
    let steering = Steering::new(&config.method, &config.diffusion, grid);

    // one stream drives positions then headings, so explicit-position runs
    // still agree on headings with random-position runs of the same seed
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let positions: Vec<Vec2> = match &config.initial_positions {
        InitialPositions::Explicit(points) => points.clone(),
        InitialPositions::Random => (0..config.n_agents)
            .map(|_| {
                Vec2::new(rng.random::<f64>() * grid.lx(), rng.random::<f64>() * grid.ly())
            })
            .collect(),
        InitialPositions::Disk { center, radius } => (0..config.n_agents)
            .map(|_| {
                // sqrt of the radial draw keeps the density uniform in area
                let r = radius * rng.random::<f64>().sqrt();
                let a = std::f64::consts::TAU * rng.random::<f64>();
                Vec2::new(
                    (center.x + r * a.cos()).clamp(0.0, grid.lx()),
                    (center.y + r * a.sin()).clamp(0.0, grid.ly()),
                )
            })
            .collect(),
    };
    let mut team: Vec<AgentState> = positions
        .iter()
        .map(|&p| {
            let angle = rng.random::<f64>() * std::f64::consts::TAU;
            AgentState::new(p, Vec2::new(angle.cos(), angle.sin()))
        })
        .collect();

    // the state at t = 0 counts as one dwell interval, which keeps the
    // empirical density well defined before anyone has moved
    let mut acc = CoverageAccumulator::new(grid, config.n_agents);
    acc.deposit(&positions, dt)?;
    let mut trajectory = vec![(0, positions)];
    let mut error_series = Vec::with_capacity(config.n_steps + 1);
    let first = coverage::error_field(&acc.empirical_density()?, mu)?;
    error_series.push(first.global_error());
    let mut deficit = first.into_field();

    for step in 1..=config.n_steps {
        let (gx, gy) = steering.gradient(&deficit, step)?;
        for agent in &mut team {
            let grad = agents::sample_gradient(&gx, &gy, agent.position);
            let u = agents::control(agent, grad, &config.control);
            agents::step(agent, u, dt, &grid);
        }
        let positions: Vec<Vec2> = team.iter().map(|a| a.position).collect();
        acc.deposit(&positions, dt)?;
        if step % config.trajectory_stride == 0 || step == config.n_steps {
            trajectory.push((step, positions));
        }
        let ef = coverage::error_field(&acc.empirical_density()?, mu)?;
        error_series.push(ef.global_error());
        deficit = ef.into_field();
    }

    let final_potential = steering.potential(&deficit, config.n_steps)?;
    Ok(RunResult {
        error_series,
        trajectory,
        final_coverage: acc.empirical_density()?,
        final_error: deficit,
        final_potential,
        wall_time: start.elapsed(),
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `r` under a base seed. Every method reuses the same value
/// for the same `r`, which is what makes shared starting positions work.
pub fn run_seed(base_seed: u64, run_index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(run_index))
}

/// A multi-run, multi-method experiment over one target density.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Template for every run; its method and seed are replaced per job.
    pub base: SimConfig,
    pub methods: Vec<Method>,
    pub n_runs: usize,
    /// When set, run `r` of every method starts from the same positions.
    pub shared_initial_positions: bool,
    /// Worker threads; 0 means use all available parallelism.
    pub workers: usize,
}

/// All runs of one method plus per-step statistics of the error series
/// over the runs that finished (mean and population standard deviation).
#[derive(Debug)]
pub struct MethodOutcome {
    pub method: Method,
    pub runs: Vec<std::result::Result<RunResult, String>>,
    pub mean_e: Vec<f64>,
    pub std_e: Vec<f64>,
}

#[derive(Debug)]
pub struct ExperimentSummary {
    pub outcomes: Vec<MethodOutcome>,
}

/// Run `methods x n_runs` independent simulations and aggregate them.
/// Individual run failures are recorded in the outcome rather than
/// aborting the batch.
pub fn experiment(config: &ExperimentConfig, mu: &TargetDensity) -> Result<ExperimentSummary> {
    if config.n_runs == 0 {
        return Err(Error::config("compare.n_runs", "need at least one run"));
    }
    if config.methods.is_empty() {
        return Err(Error::config("compare.methods", "need at least one method"));
    }
    for method in &config.methods {
        method.validate()?;
    }
    config.base.validate()?;

    let jobs: Vec<(usize, u64)> = (0..config.methods.len())
        .flat_map(|mi| (0..config.n_runs as u64).map(move |r| (mi, r)))
        .collect();
    let run_one = |&(mi, r): &(usize, u64)| -> std::result::Result<RunResult, String> {
        let mut cfg = config.base.clone();
        cfg.method = config.methods[mi];
        let shared = run_seed(config.base.seed, r);
        cfg.seed =
            if config.shared_initial_positions { shared } else { splitmix64(shared ^ (mi as u64 + 1)) };
        run(&cfg, mu).map_err(|err| err.to_string())
    };
    let results: Vec<std::result::Result<RunResult, String>> = if config.workers == 0 {
        jobs.par_iter().map(run_one).collect()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|err| Error::invalid(format!("thread pool: {err}")))?
            .install(|| jobs.par_iter().map(run_one).collect())
    };

    let mut results = results.into_iter();
    let outcomes = config
        .methods
        .iter()
        .map(|method| {
            let runs: Vec<_> = results.by_ref().take(config.n_runs).collect();
            let (mean_e, std_e) = series_stats(&runs);
            MethodOutcome { method: *method, runs, mean_e, std_e }
        })
        .collect();
    Ok(ExperimentSummary { outcomes })
}

fn series_stats(
    runs: &[std::result::Result<RunResult, String>],
) -> (Vec<f64>, Vec<f64>) {
    let series: Vec<&[f64]> = runs
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|r| r.error_series.as_slice())
        .collect();
    let Some(len) = series.first().map(|s| s.len()) else {
        return (Vec::new(), Vec::new());
    };
    let count = series.len() as f64;
    let mut mean = vec![0.0; len];
    let mut std = vec![0.0; len];
    for (t, m) in mean.iter_mut().enumerate() {
        *m = series.iter().map(|s| s[t]).sum::<f64>() / count;
    }
    for (t, out) in std.iter_mut().enumerate() {
        let m = mean[t];
        *out = (series.iter().map(|s| (s[t] - m).powi(2)).sum::<f64>() / count).sqrt();
    }
    (mean, std)
}
