//! Monte Carlo MSE benchmark harness.
//!
//! A campaign repeats the full pipeline — draw observed samples at the
//! truth, fit, record the estimate — over independent trials and
//! aggregates per-parameter MSE as population variance plus squared bias.

use rayon::prelude::*;

use crate::channel::{self, ShapingParams};
use crate::error::{Error, Result};
use crate::fit::{self, FitConfig, FitMethod};
use crate::llf::LlfConfig;
use crate::seeding::{derive_seed, STREAM_DATA, STREAM_TRIAL_FIT};

/// Error decomposition of one estimated parameter.
#[derive(Debug, Clone, Copy)]
pub struct MseStats {
    pub mse: f64,
    pub variance: f64,
    pub bias: f64,
}

/// Population variance plus squared bias of the mean against `truth`.
pub fn mse(estimates: &[f64], truth: f64) -> Result<MseStats> {
    if estimates.len() < 2 {
        return Err(Error::InvalidParameter("MSE needs at least 2 estimates".into()));
    }
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let variance = estimates.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    let bias = mean - truth;
    Ok(MseStats { mse: variance + bias * bias, variance, bias })
}

/// One completed trial of a campaign.
#[derive(Debug, Clone, Copy)]
pub struct TrialRecord {
    pub trial: usize,
    pub r_hat: f64,
    pub sigma_z2_hat: f64,
    pub k_hat: usize,
    pub llf: f64,
    pub seconds: f64,
}

/// Aggregate result of a campaign.
#[derive(Debug, Clone)]
pub struct MseReport {
    pub truth: ShapingParams,
    pub method: FitMethod,
    pub trials_requested: usize,
    pub trials_failed: usize,
    pub r: MseStats,
    pub sigma_z2: MseStats,
    pub m: usize,
    pub l: usize,
    pub n_llf: usize,
    pub seconds_total: f64,
    pub records: Vec<TrialRecord>,
}

/// Runs `trials` independent fit trials at `truth` and aggregates the
/// MSE of both shaping parameters.
///
/// Trial seeds derive from `master_seed` by trial index, so campaigns
/// are reproducible and individual trials can be re-run in isolation.
/// Failed trials (e.g. no-overlap fits) are recorded and excluded; more
/// than 20% failures abort the campaign.
pub fn campaign(
    truth: ShapingParams,
    m: usize,
    cfg: &FitConfig,
    trials: usize,
    master_seed: u64,
) -> Result<MseReport> {
    truth.validate()?;
    cfg.validate()?;
    if trials < 2 {
        return Err(Error::InvalidParameter("campaign needs at least 2 trials".into()));
    }
    if m < 2 {
        return Err(Error::InvalidParameter("campaign needs at least 2 observed samples".into()));
    }
    let started = std::time::Instant::now();

    let outcomes: Vec<Option<TrialRecord>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let data_seed = derive_seed(master_seed, STREAM_DATA, trial as u64);
            let fit_seed = derive_seed(master_seed, STREAM_TRIAL_FIT, trial as u64);
            let trial_cfg = FitConfig {
                llf: LlfConfig { seed: fit_seed, ..cfg.llf },
                ..cfg.clone()
            };
            let observed = match channel::sample(truth, m, data_seed) {
                Ok(s) => s,
                Err(_) => return None,
            };
            match fit::fit(&observed, &trial_cfg) {
                Ok(res) => Some(TrialRecord {
                    trial,
                    r_hat: res.params.r,
                    sigma_z2_hat: res.params.sigma_z2,
                    k_hat: res.k,
                    llf: res.objective,
                    seconds: res.wall_time,
                }),
                Err(_) => None,
            }
        })
        .collect();

    let records: Vec<TrialRecord> = outcomes.iter().flatten().copied().collect();
    let failed = trials - records.len();
    if failed * 5 > trials {
        return Err(Error::CampaignFailure { failed, total: trials });
    }

    let r_hats: Vec<f64> = records.iter().map(|t| t.r_hat).collect();
    let s2_hats: Vec<f64> = records.iter().map(|t| t.sigma_z2_hat).collect();
    Ok(MseReport {
        truth,
        method: cfg.method,
        trials_requested: trials,
        trials_failed: failed,
        r: mse(&r_hats, truth.r)?,
        sigma_z2: mse(&s2_hats, truth.sigma_z2)?,
        m,
        l: cfg.llf.generated,
        n_llf: cfg.llf.n_llf,
        seconds_total: started.elapsed().as_secs_f64(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mse_hand_cases() {
        let t = 3.0;
        let exact = mse(&[t, t, t], t).unwrap();
        assert_eq!(exact.mse, 0.0);
        assert_eq!(exact.variance, 0.0);
        assert_eq!(exact.bias, 0.0);

        let spread = mse(&[t + 1.0, t - 1.0], t).unwrap();
        assert_relative_eq!(spread.variance, 1.0);
        assert_eq!(spread.bias, 0.0);
        assert_relative_eq!(spread.mse, 1.0);

        let biased = mse(&[t + 1.0, t + 1.0], t).unwrap();
        assert_eq!(biased.variance, 0.0);
        assert_relative_eq!(biased.bias, 1.0);
        assert_relative_eq!(biased.mse, 1.0);

        assert!(mse(&[1.0], 1.0).is_err());
    }

    #[test]
    fn mse_identity_holds() {
        let estimates = [0.21, 0.27, 0.31, 0.19, 0.24];
        let s = mse(&estimates, 0.25).unwrap();
        assert_relative_eq!(s.mse, s.variance + s.bias * s.bias, max_relative = 1e-12);
    }

    #[test]
    fn campaign_rejects_bad_arguments() {
        let truth = ShapingParams::new(4.0, 0.25).unwrap();
        let cfg = FitConfig::default();
        assert!(campaign(truth, 100, &cfg, 1, 0).is_err());
        assert!(campaign(truth, 1, &cfg, 5, 0).is_err());
    }

    #[test]
    fn tiny_campaign_is_reproducible() {
        let truth = ShapingParams::new(3.0, 0.4).unwrap();
        let cfg = FitConfig {
            ga: crate::fit::GaConfig { population: 8, generations: 3, ..Default::default() },
            llf: LlfConfig { generated: 500, k: 6, n_llf: 1, seed: 0, literal_c: false },
            ..Default::default()
        };
        let a = campaign(truth, 200, &cfg, 2, 77).unwrap();
        let b = campaign(truth, 200, &cfg, 2, 77).unwrap();
        assert_eq!(a.trials_failed, 0);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.r_hat, rb.r_hat);
            assert_eq!(ra.sigma_z2_hat, rb.sigma_z2_hat);
            assert_eq!(ra.k_hat, rb.k_hat);
            assert_eq!(ra.llf, rb.llf);
        }
        assert_eq!(a.r.mse, b.r.mse);
        assert_relative_eq!(a.r.mse, a.r.variance + a.r.bias * a.r.bias, max_relative = 1e-12);
        assert_relative_eq!(
            a.sigma_z2.mse,
            a.sigma_z2.variance + a.sigma_z2.bias * a.sigma_z2.bias,
            max_relative = 1e-12
        );
    }
}
