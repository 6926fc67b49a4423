//! Kolmogorov-Smirnov validation of the kNN approximation and the
//! optimal-k sweep.

use rayon::prelude::*;

use crate::channel::{self, ShapingParams};
use crate::error::{Error, Result};
use crate::knn::DensityEstimate;
use crate::seeding::{derive_seed, STREAM_KSWEEP};

/// Outcome of a KS test at a given significance level.
#[derive(Debug, Clone, Copy)]
pub struct KsResult {
    /// Two-sided KS statistic `T`.
    pub statistic: f64,
    /// Sample count the statistic was computed from.
    pub n: usize,
    /// Significance level.
    pub alpha: f64,
    /// Critical value `T_max` at that level.
    pub critical: f64,
    /// `statistic < critical`.
    pub pass: bool,
}

/// Two-sided KS statistic between the estimate's CDF and the empirical
/// CDF of `samples`.
///
/// For a continuous model CDF against a step empirical CDF the supremum
/// is attained at a sample point from one side or the other, so
/// `T = max_i max(|F̂(x_(i)) - i/n|, |F̂(x_(i)) - (i-1)/n|)` is exact.
pub fn ks_statistic(est: &DensityEstimate, samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("KS statistic needs at least one sample".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut t: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = est.cdf_at(*x);
        let hi = (f - (i + 1) as f64 / n).abs();
        let lo = (f - i as f64 / n).abs();
        t = t.max(hi).max(lo);
    }
    Ok(t)
}

/// KS statistic packaged with the critical value at `alpha`.
pub fn ks_test(est: &DensityEstimate, samples: &[f64], alpha: f64) -> Result<KsResult> {
    let statistic = ks_statistic(est, samples)?;
    let critical = ks_critical(alpha, samples.len())?;
    Ok(KsResult { statistic, n: samples.len(), alpha, critical, pass: statistic < critical })
}

/// Asymptotic critical value `c(α)/√n` with `c(α) = √(-ln(α/2)/2)`.
///
/// At α = 5% this is 1.3581/√n — 0.0429 and 0.0136 for 10³ and 10⁴
/// samples.
pub fn ks_critical(alpha: f64, n: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    Ok((-(0.5 * alpha).ln() / 2.0).sqrt() / (n as f64).sqrt())
}

/// One row of the optimal-k sweep.
#[derive(Debug, Clone, Copy)]
pub struct KSweepRow {
    pub k: usize,
    pub mean_t: f64,
    pub runs: usize,
}

/// Result of a k sweep: the per-k table and the minimizing k.
#[derive(Debug, Clone)]
pub struct KSweep {
    pub rows: Vec<KSweepRow>,
    pub argmin_k: usize,
}

/// Sweeps integer `k` over `k_range`, averaging the self-test KS
/// statistic over `runs` fresh sample sets per k.
///
/// Each (k, run) cell draws its own sample set from a seed derived from
/// the master seed, estimates the density with that k, and scores it
/// against the same samples it was built from. Cells are independent, so
/// they may run concurrently; the table only depends on the master seed.
pub fn k_sweep(
    params: ShapingParams,
    m: usize,
    k_range: std::ops::RangeInclusive<usize>,
    runs: usize,
    seed: u64,
) -> Result<KSweep> {
    let (k_lo, k_hi) = (*k_range.start(), *k_range.end());
    if k_lo < 2 || k_hi > m.saturating_sub(1) || k_lo > k_hi {
        return Err(Error::InvalidParameter(format!(
            "k range [{k_lo}, {k_hi}] must lie within [2, {}]",
            m.saturating_sub(1)
        )));
    }
    if runs < 1 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }

    let cells: Vec<(usize, usize)> =
        (k_lo..=k_hi).flat_map(|k| (0..runs).map(move |run| (k, run))).collect();
    let stats: Vec<f64> = cells
        .par_iter()
        .map(|&(k, run)| {
            let cell_seed = derive_seed(seed, STREAM_KSWEEP, (k as u64) << 32 | run as u64);
            let samples = channel::sample(params, m, cell_seed)?;
            let est = DensityEstimate::from_samples(samples.values(), k)?;
            ks_statistic(&est, samples.values())
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(k_hi - k_lo + 1);
    for (ki, k) in (k_lo..=k_hi).enumerate() {
        let sum: f64 = stats[ki * runs..(ki + 1) * runs].iter().sum();
        rows.push(KSweepRow { k, mean_t: sum / runs as f64, runs });
    }
    let argmin_k = rows
        .iter()
        .min_by(|a, b| a.mean_t.total_cmp(&b.mean_t))
        .map(|r| r.k)
        .expect("non-empty sweep");
    Ok(KSweep { rows, argmin_k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn critical_values_match_quoted_ones() {
        assert!((ks_critical(0.05, 1_000).unwrap() - 0.0429).abs() < 5e-4);
        assert!((ks_critical(0.05, 10_000).unwrap() - 0.0136).abs() < 5e-4);
        assert_relative_eq!(ks_critical(0.05, 100).unwrap(), 0.1358, epsilon = 5e-5);
        assert!(ks_critical(0.0, 100).is_err());
        assert!(ks_critical(1.0, 100).is_err());
    }

    #[test]
    fn single_sample_statistic() {
        // estimate with cdf(1.5) = 0.5 against the single sample {1.5}:
        // empirical jumps 0 -> 1 there, so T = 0.5.
        let est = DensityEstimate::from_samples(&[0.0, 1.0, 2.0, 3.0], 1).unwrap();
        assert_relative_eq!(est.cdf_at(1.5), 0.5, max_relative = 1e-12);
        let t = ks_statistic(&est, &[1.5]).unwrap();
        assert_relative_eq!(t, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn samples_outside_support_saturate() {
        let est = DensityEstimate::from_samples(&[0.0, 1.0, 2.0, 3.0], 1).unwrap();
        let t = ks_statistic(&est, &[10.0, 11.0, 12.0]).unwrap();
        assert_relative_eq!(t, 1.0, max_relative = 1e-12);
        assert!(ks_statistic(&est, &[]).is_err());
    }

    #[test]
    fn statistic_ignores_sample_order() {
        let est = DensityEstimate::from_samples(&[0.0, 1.0, 2.0, 3.0, 4.5, 6.0], 2).unwrap();
        let a = ks_statistic(&est, &[0.5, 2.2, 1.1, 3.3]).unwrap();
        let b = ks_statistic(&est, &[3.3, 0.5, 1.1, 2.2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ks_test_packages_pass_flag() {
        let est = DensityEstimate::from_samples(&[0.0, 1.0, 2.0, 3.0], 1).unwrap();
        let r = ks_test(&est, &[10.0, 11.0, 12.0], 0.05).unwrap();
        assert_eq!(r.n, 3);
        assert_eq!(r.statistic, 1.0);
        assert!(!r.pass);
        assert_eq!(r.pass, r.statistic < r.critical);
    }

    #[test]
    fn sweep_is_reproducible_and_validated() {
        let p = ShapingParams::new(4.0, 0.25).unwrap();
        let a = k_sweep(p, 200, 2..=6, 3, 11).unwrap();
        let b = k_sweep(p, 200, 2..=6, 3, 11).unwrap();
        assert_eq!(a.argmin_k, b.argmin_k);
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.mean_t, rb.mean_t);
            assert_eq!(ra.runs, 3);
            assert!((0.0..=1.0).contains(&ra.mean_t));
        }
        assert!(k_sweep(p, 200, 1..=6, 3, 11).is_err());
        assert!(k_sweep(p, 200, 2..=400, 3, 11).is_err());
        assert!(k_sweep(p, 200, 2..=6, 0, 11).is_err());
    }
}
