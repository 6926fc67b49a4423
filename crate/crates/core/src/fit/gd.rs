//! Projected finite-difference ascent.
//!
//! The objective has no analytic gradient, so each iteration estimates a
//! central difference per coordinate and takes a preconditioned step
//! projected back into the box, with backtracking halving. The + and -
//! probes of a coordinate share one draw seed, as does the accept
//! comparison — common random numbers cancel most of the Monte Carlo
//! noise out of the differences.

use super::{FitConfig, Recorder};
use crate::channel::ShapingParams;
use crate::error::{Error, Result};
use crate::fit::Objective;
use crate::seeding::{derive_seed, STREAM_FIT_EVAL};

pub(super) fn run<O: Objective + ?Sized>(
    objective: &O,
    cfg: &FitConfig,
    start: Option<(ShapingParams, usize)>,
    recorder: &mut Recorder,
) -> Result<()> {
    let bounds = &cfg.bounds;
    let gd = &cfg.gd;
    let master = cfg.llf.seed;
    let mut eval_counter = 0u64;
    let mut next_seed = move || {
        let s = derive_seed(master, STREAM_FIT_EVAL, eval_counter);
        eval_counter += 1;
        s
    };

    let (mut x, mut k) = match start {
        Some((p, k)) => (bounds.clamp_params(p), bounds.clamp_k(k)),
        None => (
            ShapingParams {
                r: 0.5 * (bounds.r.0 + bounds.r.1),
                sigma_z2: 0.5 * (bounds.sigma_z2.0 + bounds.sigma_z2.1),
            },
            bounds.clamp_k(cfg.llf.k),
        ),
    };

    let eval = |p: &ShapingParams, k: usize, seed: u64, recorder: &mut Recorder| -> Result<f64> {
        let v = match objective.evaluate(p, k, seed) {
            Ok(v) => v,
            Err(Error::EmptyOverlap { .. }) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        recorder.record(*p, k, v, seed);
        Ok(v)
    };

    let mut scale = 1.0f64;
    for _ in 0..gd.max_iters {
        // fresh reference value each iteration; reused as the CRN seed
        // for this iteration's accept comparisons
        let iter_seed = next_seed();
        let f_cur = eval(&x, k, iter_seed, recorder)?;

        // central differences, one shared seed per coordinate pair
        let seed_r = next_seed();
        let rp = ShapingParams { r: (x.r + gd.fd_eps.0).min(bounds.r.1), ..x };
        let rm = ShapingParams { r: (x.r - gd.fd_eps.0).max(bounds.r.0), ..x };
        let g_r = if rp.r > rm.r {
            (eval(&rp, k, seed_r, recorder)? - eval(&rm, k, seed_r, recorder)?) / (rp.r - rm.r)
        } else {
            0.0
        };
        let seed_s = next_seed();
        let sp = ShapingParams { sigma_z2: (x.sigma_z2 + gd.fd_eps.1).min(bounds.sigma_z2.1), ..x };
        let sm = ShapingParams { sigma_z2: (x.sigma_z2 - gd.fd_eps.1).max(bounds.sigma_z2.0), ..x };
        let g_s = if sp.sigma_z2 > sm.sigma_z2 {
            (eval(&sp, k, seed_s, recorder)? - eval(&sm, k, seed_s, recorder)?)
                / (sp.sigma_z2 - sm.sigma_z2)
        } else {
            0.0
        };

        // preconditioned direction: per-coordinate moves capped at
        // scale * step_i, proportions set by the gradient in step units
        let u_r = g_r * gd.step.0 * gd.step.0;
        let u_s = g_s * gd.step.1 * gd.step.1;
        let magnitude = (u_r / gd.step.0).abs().max((u_s / gd.step.1).abs());
        if !(magnitude > 0.0) || !magnitude.is_finite() {
            scale *= 0.5;
            if scale < gd.min_step_scale {
                break;
            }
            continue;
        }

        let mut accepted = false;
        let mut trial = scale;
        for _ in 0..4 {
            let candidate = bounds.clamp_params(ShapingParams {
                r: x.r + trial * u_r / magnitude,
                sigma_z2: x.sigma_z2 + trial * u_s / magnitude,
            });
            if candidate == x {
                break;
            }
            let f_new = eval(&candidate, k, iter_seed, recorder)?;
            if f_new > f_cur {
                x = candidate;
                scale = (trial * 1.3).min(1.0);
                accepted = true;
                break;
            }
            trial *= 0.5;
        }
        if !accepted {
            scale *= 0.5;
            if scale < gd.min_step_scale {
                break;
            }
        }

        if gd.search_k {
            let seed_k = next_seed();
            let lo = bounds.clamp_k(k.saturating_sub(2));
            let hi = bounds.clamp_k(k + 2);
            let mut best_k = k;
            let mut best_v = f64::NEG_INFINITY;
            for cand in lo..=hi {
                let v = eval(&x, cand, seed_k, recorder)?;
                if v > best_v {
                    best_v = v;
                    best_k = cand;
                }
            }
            k = best_k;
        }
    }
    Ok(())
}
