//! Maximization of the averaged LLF over (r, σ_z², k): a real-coded
//! genetic algorithm and a projected finite-difference ascent, plus the
//! moment-based initial estimates both start from.

mod ga;
mod gd;
mod objective;

pub use objective::{LlfObjective, Objective, QuadratureObjective};

use crate::channel::{SampleSet, ShapingParams};
use crate::error::{Error, Result};
use crate::llf::LlfConfig;

/// Box constraints for the fit.
#[derive(Debug, Clone, Copy)]
pub struct FitBounds {
    pub r: (f64, f64),
    pub sigma_z2: (f64, f64),
    pub k: (usize, usize),
}

impl Default for FitBounds {
    /// Covers every channel condition of interest (r up to ~7, σ_z² up
    /// to ~1) with generous margin.
    fn default() -> Self {
        Self { r: (0.0, 30.0), sigma_z2: (1e-3, 2.0), k: (2, 64) }
    }
}

impl FitBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.r.0 >= 0.0 && self.r.0 <= self.r.1 && self.r.1.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad r bounds {:?}", self.r)));
        }
        if !(self.sigma_z2.0 > 0.0 && self.sigma_z2.0 <= self.sigma_z2.1 && self.sigma_z2.1.is_finite())
        {
            return Err(Error::InvalidParameter(format!("bad sigma_z2 bounds {:?}", self.sigma_z2)));
        }
        if self.k.0 < 2 || self.k.0 > self.k.1 {
            return Err(Error::InvalidParameter(format!("bad k bounds {:?}", self.k)));
        }
        Ok(())
    }

    pub fn clamp_params(&self, p: ShapingParams) -> ShapingParams {
        ShapingParams {
            r: p.r.clamp(self.r.0, self.r.1),
            sigma_z2: p.sigma_z2.clamp(self.sigma_z2.0, self.sigma_z2.1),
        }
    }

    pub fn clamp_k(&self, k: usize) -> usize {
        k.clamp(self.k.0, self.k.1)
    }

    pub fn contains(&self, p: &ShapingParams, k: usize) -> bool {
        (self.r.0..=self.r.1).contains(&p.r)
            && (self.sigma_z2.0..=self.sigma_z2.1).contains(&p.sigma_z2)
            && (self.k.0..=self.k.1).contains(&k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    Ga,
    Gd,
}

/// Parent-selection strategy of the GA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Tournament,
}

#[derive(Debug, Clone, Copy)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub selection: Selection,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the box width; decays
    /// linearly to zero over the generations.
    pub mutation_scale: f64,
    pub elitism: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 50,
            selection: Selection::Tournament,
            tournament_size: 3,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_scale: 0.1,
            elitism: 2,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GdConfig {
    /// Initial step sizes per coordinate (r, σ_z²).
    pub step: (f64, f64),
    /// Central finite-difference offsets per coordinate.
    pub fd_eps: (f64, f64),
    pub max_iters: usize,
    /// Also evaluate k ∈ {k-2..k+2} each iteration instead of keeping it
    /// fixed at the configured value.
    pub search_k: bool,
    /// Stop once backtracking has shrunk the step scale below this
    /// fraction of the initial steps.
    pub min_step_scale: f64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            step: (1.0, 0.05),
            fd_eps: (0.05, 0.005),
            max_iters: 40,
            search_k: false,
            min_step_scale: 1e-3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitConfig {
    pub method: FitMethod,
    pub bounds: FitBounds,
    pub ga: GaConfig,
    pub gd: GdConfig,
    pub llf: LlfConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            method: FitMethod::Ga,
            bounds: FitBounds::default(),
            ga: GaConfig::default(),
            gd: GdConfig::default(),
            llf: LlfConfig::default(),
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        self.llf.validate()?;
        if self.ga.population < 2 {
            return Err(Error::InvalidParameter("GA population must be >= 2".into()));
        }
        if self.ga.generations < 1 || self.ga.tournament_size < 1 {
            return Err(Error::InvalidParameter("GA generations and tournament size must be >= 1".into()));
        }
        if self.ga.elitism >= self.ga.population {
            return Err(Error::InvalidParameter("GA elitism must be below the population size".into()));
        }
        if !(self.gd.step.0 > 0.0 && self.gd.step.1 > 0.0 && self.gd.fd_eps.0 > 0.0 && self.gd.fd_eps.1 > 0.0)
        {
            return Err(Error::InvalidParameter("GD steps and offsets must be > 0".into()));
        }
        if self.gd.max_iters < 1 {
            return Err(Error::InvalidParameter("GD max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// One objective evaluation in the optimizer trace.
#[derive(Debug, Clone, Copy)]
pub struct TracePoint {
    pub eval: usize,
    pub r: f64,
    pub sigma_z2: f64,
    pub k: usize,
    /// Objective value; `-inf` marks an empty-overlap candidate.
    pub value: f64,
    /// Seed the objective was evaluated with; re-evaluating the candidate
    /// with it reproduces `value` bit for bit.
    pub seed: u64,
}

/// Outcome of a fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: ShapingParams,
    pub k: usize,
    /// Objective at the returned candidate, as recorded in the trace.
    pub objective: f64,
    pub trace: Vec<TracePoint>,
    pub evaluations: usize,
    pub wall_time: f64,
    /// Index into `trace` of the returned candidate.
    pub best_eval: usize,
}

/// Trace recorder shared by both optimizers. The best entry is the first
/// strictly-greatest finite value, so it never depends on evaluation
/// scheduling.
struct Recorder {
    trace: Vec<TracePoint>,
    best: Option<usize>,
}

impl Recorder {
    fn new() -> Self {
        Self { trace: Vec::new(), best: None }
    }

    fn record(&mut self, p: ShapingParams, k: usize, value: f64, seed: u64) -> usize {
        let eval = self.trace.len();
        self.trace.push(TracePoint { eval, r: p.r, sigma_z2: p.sigma_z2, k, value, seed });
        if value.is_finite() && self.best.map_or(true, |b| value > self.trace[b].value) {
            self.best = Some(eval);
        }
        eval
    }

    fn into_result(self, started: std::time::Instant) -> Result<FitResult> {
        let best = self.best.ok_or(Error::NoOverlap)?;
        let tp = self.trace[best];
        Ok(FitResult {
            params: ShapingParams { r: tp.r, sigma_z2: tp.sigma_z2 },
            k: tp.k,
            objective: tp.value,
            evaluations: self.trace.len(),
            best_eval: best,
            trace: self.trace,
            wall_time: started.elapsed().as_secs_f64(),
        })
    }
}

/// Moment-based starting point for the optimizers.
///
/// `σ_z²⁽⁰⁾ = -(2/K)·Σ ln I[l]`, clamped into the box. The Rician part
/// is recovered from the lognormal-free moment ratio `m₃/m₂³`, which
/// depends on r alone; the ratio is monotone from 3/4 (r = 0) toward 1
/// (r → ∞), so a bisection inverts it, clamping to the box when the
/// empirical ratio falls outside the attainable range.
pub fn initial_estimates(observed: &SampleSet, bounds: &FitBounds) -> Result<ShapingParams> {
    bounds.validate()?;
    let values = observed.values();
    if values.is_empty() {
        return Err(Error::InvalidParameter("observed sample set is empty".into()));
    }
    let n = values.len() as f64;
    let mean_ln = values.iter().map(|v| v.ln()).sum::<f64>() / n;
    let sigma_z2 = (-2.0 * mean_ln).clamp(bounds.sigma_z2.0, bounds.sigma_z2.1);

    let m2 = values.iter().map(|v| v * v).sum::<f64>() / n;
    let m3 = values.iter().map(|v| v * v * v).sum::<f64>() / n;
    let ratio = m3 / (m2 * m2 * m2);
    let r = invert_moment_ratio(ratio, bounds.r).clamp(bounds.r.0, bounds.r.1);
    Ok(ShapingParams { r, sigma_z2 })
}

/// `E[y²]` of the unit-mean Rician intensity.
fn rician_m2(r: f64) -> f64 {
    (r * r + 4.0 * r + 2.0) / ((1.0 + r) * (1.0 + r))
}

/// `E[y³]` of the unit-mean Rician intensity, from the noncentral-χ²
/// moments with λ = 2r.
fn rician_m3(r: f64) -> f64 {
    let l = 2.0 * r;
    let ew3 = (2.0 + l).powi(3) + 6.0 * (2.0 + l) * (2.0 + 2.0 * l) + 8.0 * (2.0 + 3.0 * l);
    ew3 / (2.0 * (1.0 + r)).powi(3)
}

fn moment_ratio(r: f64) -> f64 {
    rician_m3(r) / rician_m2(r).powi(3)
}

fn invert_moment_ratio(target: f64, r_bounds: (f64, f64)) -> f64 {
    let (lo, hi) = r_bounds;
    if !target.is_finite() || target <= moment_ratio(lo) {
        return lo;
    }
    if target >= moment_ratio(hi) {
        return hi;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if moment_ratio(mid) < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// Maximizes the data-generation LLF of `observed` over (r, σ_z², k).
pub fn fit(observed: &SampleSet, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let init = initial_estimates(observed, &cfg.bounds)?;
    let objective = LlfObjective::new(observed, cfg.llf);
    fit_with_objective(&objective, cfg, Some((init, cfg.bounds.clamp_k(cfg.llf.k))))
}

/// Runs the configured optimizer against an arbitrary objective.
///
/// `start` seeds the search (one GA individual; the GD starting point);
/// without it the GD starts at the box center and the GA is fully random.
pub fn fit_with_objective<O: Objective + ?Sized>(
    objective: &O,
    cfg: &FitConfig,
    start: Option<(ShapingParams, usize)>,
) -> Result<FitResult> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let mut recorder = Recorder::new();
    match cfg.method {
        FitMethod::Ga => ga::run(objective, cfg, start, &mut recorder)?,
        FitMethod::Gd => gd::run(objective, cfg, start, &mut recorder)?,
    }
    recorder.into_result(started)
}
