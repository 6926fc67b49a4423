//! Objective functions the optimizers maximize.

use crate::channel::{self, QuadratureConfig, SampleSet, ShapingParams};
use crate::error::{Error, Result};
use crate::llf::{self, LlfConfig};

/// A maximizable objective over (params, k).
///
/// `seed` pins all randomness of one evaluation: evaluating the same
/// candidate with the same seed must reproduce the value bit for bit.
/// Implementations must be `Sync`; the optimizers evaluate candidates
/// concurrently.
pub trait Objective: Sync {
    fn evaluate(&self, params: &ShapingParams, k: usize, seed: u64) -> Result<f64>;
}

/// The data-generation LLF objective (the estimator itself).
pub struct LlfObjective {
    observed_sorted: Vec<f64>,
    base: LlfConfig,
}

impl LlfObjective {
    pub fn new(observed: &SampleSet, base: LlfConfig) -> Self {
        Self { observed_sorted: observed.sorted_values(), base }
    }
}

impl Objective for LlfObjective {
    fn evaluate(&self, params: &ShapingParams, k: usize, seed: u64) -> Result<f64> {
        let cfg = LlfConfig { k, seed, ..self.base };
        Ok(llf::llf_mean_sorted(&self.observed_sorted, *params, &cfg)?.value)
    }
}

/// Exact log-likelihood through the quadrature reference density.
///
/// Deterministic and smooth; it ignores both `k` and the seed. Useful to
/// exercise the optimizers in isolation from Monte Carlo noise — it is
/// not part of the estimator itself.
pub struct QuadratureObjective {
    observed: Vec<f64>,
    quad: QuadratureConfig,
}

impl QuadratureObjective {
    pub fn new(observed: &SampleSet, quad: QuadratureConfig) -> Self {
        Self { observed: observed.values().to_vec(), quad }
    }
}

impl Objective for QuadratureObjective {
    fn evaluate(&self, params: &ShapingParams, _k: usize, _seed: u64) -> Result<f64> {
        let mut sum = 0.0;
        for &x in &self.observed {
            let p = channel::pdf_reference(*params, x, &self.quad)?;
            if p <= 0.0 {
                return Err(Error::EmptyOverlap { lo: x, hi: x });
            }
            sum += p.ln();
        }
        Ok(sum / self.observed.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample;

    #[test]
    fn llf_objective_is_seed_reproducible() {
        let truth = ShapingParams::new(3.0, 0.3).unwrap();
        let observed = sample(truth, 400, 5).unwrap();
        let obj = LlfObjective::new(
            &observed,
            LlfConfig { generated: 2000, k: 8, n_llf: 2, seed: 0, literal_c: false },
        );
        let a = obj.evaluate(&truth, 8, 99).unwrap();
        let b = obj.evaluate(&truth, 8, 99).unwrap();
        assert_eq!(a, b);
        let c = obj.evaluate(&truth, 8, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn quadrature_objective_prefers_truth_over_distant_candidate() {
        let truth = ShapingParams::new(4.0, 0.25).unwrap();
        let observed = sample(truth, 500, 2).unwrap();
        let obj = QuadratureObjective::new(&observed, QuadratureConfig::default());
        let at_truth = obj.evaluate(&truth, 8, 0).unwrap();
        let far = obj.evaluate(&ShapingParams::new(0.5, 1.5).unwrap(), 8, 0).unwrap();
        assert!(at_truth > far, "{at_truth} <= {far}");
        // seed and k are irrelevant
        assert_eq!(at_truth, obj.evaluate(&truth, 40, 123).unwrap());
    }
}
