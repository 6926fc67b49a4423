//! CSV and flat-text writers for every pipeline artifact.
//!
//! Writers emit the bare format; callers (the CLI) may prepend their own
//! `#`-prefixed provenance lines. Sample dumps carry full double
//! precision (17 significant digits); derived quantities use the
//! shortest round-trip representation.

use std::io::Write;

use crate::bench::MseReport;
use crate::channel::SampleSet;
use crate::error::Result;
use crate::fit::{FitMethod, FitResult};
use crate::gof::KSweep;
use crate::knn::DensityEstimate;
use crate::llf::LlfGrid;

/// One intensity per row under an `intensity` header.
pub fn write_samples_csv<W: Write>(w: &mut W, samples: &SampleSet) -> Result<()> {
    writeln!(w, "intensity")?;
    for v in samples.values() {
        writeln!(w, "{v:.16e}")?;
    }
    Ok(())
}

/// Support points with raw and normalized densities.
pub fn write_density_csv<W: Write>(w: &mut W, est: &DensityEstimate) -> Result<()> {
    writeln!(w, "support,raw_density,normalized_density")?;
    let c = est.normalization();
    for (x, p) in est.support().iter().zip(est.densities()) {
        writeln!(w, "{x:.16e},{p:.16e},{:.16e}", c * p)?;
    }
    Ok(())
}

/// Sweep table plus the trailing argmin comment line.
pub fn write_ksweep_csv<W: Write>(w: &mut W, sweep: &KSweep) -> Result<()> {
    writeln!(w, "k,mean_T,runs")?;
    for row in &sweep.rows {
        writeln!(w, "{},{},{}", row.k, row.mean_t, row.runs)?;
    }
    writeln!(w, "# argmin_k={}", sweep.argmin_k)?;
    Ok(())
}

/// Grid scan rows for surface plotting.
pub fn write_llf_grid_csv<W: Write>(w: &mut W, grid: &LlfGrid) -> Result<()> {
    writeln!(w, "r,sigma_z2,k,llf")?;
    for cell in &grid.cells {
        writeln!(w, "{},{},{},{}", cell.r, cell.sigma_z2, cell.k, cell.value)?;
    }
    Ok(())
}

/// Every objective evaluation of a fit, in evaluation order.
pub fn write_trace_csv<W: Write>(w: &mut W, result: &FitResult) -> Result<()> {
    writeln!(w, "eval_index,r,sigma_z2,k,llf")?;
    for t in &result.trace {
        writeln!(w, "{},{},{},{},{}", t.eval, t.r, t.sigma_z2, t.k, t.value)?;
    }
    Ok(())
}

/// Flat key-value summary of a fit result.
pub fn write_fit_summary<W: Write>(w: &mut W, result: &FitResult) -> Result<()> {
    writeln!(w, "r={}", result.params.r)?;
    writeln!(w, "sigma_z2={}", result.params.sigma_z2)?;
    writeln!(w, "k={}", result.k)?;
    writeln!(w, "llf={}", result.objective)?;
    writeln!(w, "evaluations={}", result.evaluations)?;
    writeln!(w, "seconds={}", result.wall_time)?;
    Ok(())
}

/// Per-trial rows of a benchmark campaign.
pub fn write_campaign_csv<W: Write>(w: &mut W, report: &MseReport) -> Result<()> {
    writeln!(w, "trial,r_hat,sigma_z2_hat,k_hat,llf,seconds")?;
    for t in &report.records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            t.trial, t.r_hat, t.sigma_z2_hat, t.k_hat, t.llf, t.seconds
        )?;
    }
    Ok(())
}

fn method_name(m: FitMethod) -> &'static str {
    match m {
        FitMethod::Ga => "ga",
        FitMethod::Gd => "gd",
    }
}

/// Header of the campaign summary table (one row per (truth, method)
/// cell of a sweep).
pub fn write_campaign_summary_header<W: Write>(w: &mut W) -> Result<()> {
    writeln!(
        w,
        "method,r_true,sigma_z2_true,M,L,n_llf,trials,failed,\
         mse_r,var_r,bias_r,mse_sigma_z2,var_sigma_z2,bias_sigma_z2,seconds"
    )?;
    Ok(())
}

/// One summary row of a campaign.
pub fn write_campaign_summary_row<W: Write>(w: &mut W, report: &MseReport) -> Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        method_name(report.method),
        report.truth.r,
        report.truth.sigma_z2,
        report.m,
        report.l,
        report.n_llf,
        report.trials_requested,
        report.trials_failed,
        report.r.mse,
        report.r.variance,
        report.r.bias,
        report.sigma_z2.mse,
        report.sigma_z2.variance,
        report.sigma_z2.bias,
        report.seconds_total
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample, ShapingParams};

    #[test]
    fn samples_csv_round_trips_exactly() {
        let s = sample(ShapingParams::new(2.0, 0.3).unwrap(), 50, 4).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("intensity"));
        for (line, want) in lines.zip(s.values()) {
            let got: f64 = line.parse().unwrap();
            assert_eq!(got, *want, "17 significant digits must round-trip");
        }
    }

    #[test]
    fn ksweep_csv_has_argmin_comment() {
        let sweep = KSweep {
            rows: vec![
                crate::gof::KSweepRow { k: 2, mean_t: 0.04, runs: 5 },
                crate::gof::KSweepRow { k: 3, mean_t: 0.02, runs: 5 },
            ],
            argmin_k: 3,
        };
        let mut buf = Vec::new();
        write_ksweep_csv(&mut buf, &sweep).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,mean_T,runs\n"));
        assert!(text.trim_end().ends_with("# argmin_k=3"));
    }

    #[test]
    fn density_csv_has_three_columns() {
        let est = crate::knn::DensityEstimate::from_samples(&[0.0, 1.0, 2.0, 3.0], 1).unwrap();
        let mut buf = Vec::new();
        write_density_csv(&mut buf, &est).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 3);
    }
}
