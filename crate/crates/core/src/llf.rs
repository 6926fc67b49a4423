//! Data-generation approximation of the log-likelihood.
//!
//! To score candidate shaping parameters against observed samples without
//! touching the channel integral, generate `L` synthetic samples at the
//! candidate, build a kNN density estimate from them, and average the log
//! of the normalized interpolated density over the observed samples that
//! fall inside the synthetic support. Averaging several independent
//! evaluations tames the Monte Carlo noise of the surface.

use rayon::prelude::*;

use crate::channel::{self, SampleSet, ShapingParams};
use crate::error::{Error, Result};
use crate::knn::DensityEstimate;
use crate::seeding::{derive_seed, STREAM_GRID, STREAM_LLF_RUN};

/// Configuration of one LLF evaluation.
#[derive(Debug, Clone, Copy)]
pub struct LlfConfig {
    /// Number of synthetic samples `L` generated per evaluation.
    pub generated: usize,
    /// Neighbor count of the kNN estimate built from them.
    pub k: usize,
    /// Number of independent evaluations averaged by [`llf_mean`].
    pub n_llf: usize,
    /// Master seed; per-run draw seeds derive from it by counter.
    pub seed: u64,
    /// Add the normalization factor `c` itself instead of `ln c`,
    /// reproducing the literal printed formula. The default (`false`)
    /// adds `ln c`, i.e. averages `ln(c·p̂)`.
    pub literal_c: bool,
}

impl Default for LlfConfig {
    fn default() -> Self {
        Self { generated: 100_000, k: 15, n_llf: 1, seed: 0, literal_c: false }
    }
}

impl LlfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.generated < self.k + 1 {
            return Err(Error::InvalidParameter(format!(
                "generated count L = {} must be at least k + 1 = {}",
                self.generated,
                self.k + 1
            )));
        }
        if self.k < 1 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if self.n_llf < 1 {
            return Err(Error::InvalidParameter("n_llf must be >= 1".into()));
        }
        Ok(())
    }
}

/// An approximate log-likelihood value.
#[derive(Debug, Clone, Copy)]
pub struct LlfValue {
    /// Mean log normalized density over the retained observed samples.
    pub value: f64,
    /// Observed samples inside the synthetic support (`MTemp`); for an
    /// averaged value, the minimum across runs.
    pub retained: usize,
    /// Total observed samples.
    pub total: usize,
}

/// Single LLF evaluation of `candidate` against sorted observed samples.
fn llf_once_sorted(
    observed_sorted: &[f64],
    candidate: ShapingParams,
    cfg: &LlfConfig,
    draw_seed: u64,
) -> Result<LlfValue> {
    let synth = channel::sample(candidate, cfg.generated, draw_seed)?;
    let est = DensityEstimate::from_samples(synth.values(), cfg.k)?;
    let support = est.support();
    let (lo, hi) = (support[0], *support.last().expect("non-empty"));

    let start = observed_sorted.partition_point(|x| *x < lo);
    let stop = observed_sorted.partition_point(|x| *x <= hi);
    let retained = &observed_sorted[start..stop];
    if retained.is_empty() {
        return Err(Error::EmptyOverlap { lo, hi });
    }

    let mut sum = 0.0;
    for &x in retained {
        let p = est.density_at(x, false).expect("retained samples are inside the support");
        sum += p.ln();
    }
    let offset =
        if cfg.literal_c { est.normalization() } else { est.normalization().ln() };
    Ok(LlfValue {
        value: sum / retained.len() as f64 + offset,
        retained: retained.len(),
        total: observed_sorted.len(),
    })
}

/// One LLF evaluation. Observed samples are sorted internally if needed.
pub fn llf_once(
    observed: &SampleSet,
    candidate: ShapingParams,
    cfg: &LlfConfig,
    draw_seed: u64,
) -> Result<LlfValue> {
    candidate.validate()?;
    cfg.validate()?;
    llf_once_sorted(&observed.sorted_values(), candidate, cfg, draw_seed)
}

/// Mean of `cfg.n_llf` independent LLF evaluations, with per-run seeds
/// derived from `cfg.seed`.
///
/// Runs are independent given their seeds and may execute concurrently;
/// the reduction is in run order, so the value is schedule-independent.
/// Any run with empty overlap fails the whole mean — the optimizers map
/// that onto a -inf objective.
pub fn llf_mean(observed: &SampleSet, candidate: ShapingParams, cfg: &LlfConfig) -> Result<LlfValue> {
    candidate.validate()?;
    cfg.validate()?;
    llf_mean_sorted(&observed.sorted_values(), candidate, cfg)
}

pub(crate) fn llf_mean_sorted(
    observed_sorted: &[f64],
    candidate: ShapingParams,
    cfg: &LlfConfig,
) -> Result<LlfValue> {
    let runs: Vec<LlfValue> = (0..cfg.n_llf)
        .into_par_iter()
        .map(|run| {
            let seed = derive_seed(cfg.seed, STREAM_LLF_RUN, run as u64);
            llf_once_sorted(observed_sorted, candidate, cfg, seed)
        })
        .collect::<Result<_>>()?;
    let value = runs.iter().map(|r| r.value).sum::<f64>() / runs.len() as f64;
    let retained = runs.iter().map(|r| r.retained).min().expect("n_llf >= 1");
    Ok(LlfValue { value, retained, total: observed_sorted.len() })
}

/// One cell of an LLF grid scan.
#[derive(Debug, Clone, Copy)]
pub struct GridCell {
    pub r: f64,
    pub sigma_z2: f64,
    pub k: usize,
    /// Averaged LLF; `-inf` when every candidate draw missed the
    /// observed support.
    pub value: f64,
}

/// Rectangular scan specification over (r, σ_z²).
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub s2_min: f64,
    pub s2_max: f64,
    pub s2_step: f64,
}

impl GridSpec {
    fn axis(min: f64, max: f64, step: f64) -> Vec<f64> {
        let n = ((max - min) / step + 0.5).floor() as usize;
        (0..=n).map(|i| min + i as f64 * step).collect()
    }

    pub fn r_values(&self) -> Vec<f64> {
        Self::axis(self.r_min, self.r_max, self.r_step)
    }

    pub fn s2_values(&self) -> Vec<f64> {
        Self::axis(self.s2_min, self.s2_max, self.s2_step)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_step > 0.0 && self.s2_step > 0.0) {
            return Err(Error::InvalidParameter("grid steps must be > 0".into()));
        }
        if self.r_min < 0.0 || self.r_max < self.r_min {
            return Err(Error::InvalidParameter("bad r grid range".into()));
        }
        if self.s2_min <= 0.0 || self.s2_max < self.s2_min {
            return Err(Error::InvalidParameter("bad sigma_z2 grid range".into()));
        }
        Ok(())
    }
}

/// Result of a grid scan: all cells plus the maximizing cell.
#[derive(Debug, Clone)]
pub struct LlfGrid {
    pub cells: Vec<GridCell>,
    pub argmax: GridCell,
}

/// Scans the averaged LLF over a parameter grid.
///
/// Every cell draws fresh synthetic sets, with its own master seed
/// derived from `cfg.seed` by cell index. Cells with empty overlap carry
/// `-inf` and never win the argmax.
pub fn llf_grid(observed: &SampleSet, spec: &GridSpec, cfg: &LlfConfig) -> Result<LlfGrid> {
    spec.validate()?;
    cfg.validate()?;
    let observed_sorted = observed.sorted_values();
    let rs = spec.r_values();
    let s2s = spec.s2_values();
    let coords: Vec<(f64, f64)> =
        rs.iter().flat_map(|&r| s2s.iter().map(move |&s| (r, s))).collect();

    let cells: Vec<GridCell> = coords
        .par_iter()
        .enumerate()
        .map(|(idx, &(r, sigma_z2))| {
            let candidate = ShapingParams { r, sigma_z2 };
            let cell_cfg =
                LlfConfig { seed: derive_seed(cfg.seed, STREAM_GRID, idx as u64), ..*cfg };
            match llf_mean_sorted(&observed_sorted, candidate, &cell_cfg) {
                Ok(v) => Ok(GridCell { r, sigma_z2, k: cfg.k, value: v.value }),
                Err(Error::EmptyOverlap { .. }) => {
                    Ok(GridCell { r, sigma_z2, k: cfg.k, value: f64::NEG_INFINITY })
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let argmax = *cells
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    if argmax.value == f64::NEG_INFINITY {
        return Err(Error::NoOverlap);
    }
    Ok(LlfGrid { cells, argmax })
}
