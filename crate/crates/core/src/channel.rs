//! Lognormal-Rician channel: sampler and quadrature reference PDF/CDF.
//!
//! The normalized intensity is `I = z·y` with `ln z ~ N(-σ_z²/2, σ_z²)`
//! (so `E[z] = 1`) and `y` a unit-mean Rician intensity: `y = |μ + g|²`,
//! `μ = √(r/(1+r))`, `g` circular complex Gaussian with total variance
//! `1/(1+r)`. Marginalizing `z` gives the channel density
//!
//! ```text
//! f(I) = (1+r)·e^{-r}/(√(2π)·σ_z) ∫ dz/z² · I₀(2√((1+r)·r·I/z))
//!        · exp(-(1+r)I/z - (ln z + σ_z²/2)²/(2σ_z²))
//! ```
//!
//! which the reference PDF evaluates by adaptive quadrature in `u = ln z`
//! with the Bessel growth folded into the exponent, so nothing overflows.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quad;
use crate::special::{i0e, noncentral_chi2_cdf_2dof};

/// Shaping parameters of the Lognormal-Rician channel.
///
/// `r` is the Rician coherence parameter (power ratio of the coherent to
/// the scattered field component); `sigma_z2` is the variance of `ln z`
/// of the lognormal modulation factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapingParams {
    pub r: f64,
    pub sigma_z2: f64,
}

impl ShapingParams {
    pub fn new(r: f64, sigma_z2: f64) -> Result<Self> {
        let p = Self { r, sigma_z2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coherence parameter r must be finite and >= 0, got {}",
                self.r
            )));
        }
        if !self.sigma_z2.is_finite() || self.sigma_z2 <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma_z2 must be finite and > 0, got {}",
                self.sigma_z2
            )));
        }
        Ok(())
    }
}

/// An ordered batch of intensity samples with its generation record.
#[derive(Debug, Clone)]
pub struct SampleSet {
    values: Vec<f64>,
    seed: Option<u64>,
    origin: Option<ShapingParams>,
}

impl SampleSet {
    /// Wraps externally supplied intensities. Every value must be strictly
    /// positive and finite.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("sample set must not be empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "intensity samples must be finite and > 0, got {bad}"
            )));
        }
        Ok(Self { values, seed: None, origin: None })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Seed used to generate the set, if it came from [`sample`].
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Parameters used to generate the set, if it came from [`sample`].
    pub fn origin(&self) -> Option<ShapingParams> {
        self.origin
    }

    /// Values sorted ascending, as a fresh vector.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_unstable_by(f64::total_cmp);
        v
    }
}

/// Configuration of the reference quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    /// Relative tolerance of the adaptive integration.
    pub rel_tol: f64,
    /// Truncation half-width of the `u = ln z` integral, in units of σ_z
    /// around the mean of `ln z`. Tail mass beyond ±8σ is below 1e-15.
    pub z_range_sigmas: f64,
    /// Cap on adaptive subdivisions before reporting non-convergence.
    pub max_subdivisions: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, z_range_sigmas: 8.0, max_subdivisions: 4000 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rel_tol must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if !(self.z_range_sigmas >= 6.0) {
            return Err(Error::InvalidParameter(format!(
                "z_range_sigmas must be >= 6, got {}",
                self.z_range_sigmas
            )));
        }
        Ok(())
    }
}

/// Draws `n` i.i.d. intensity samples at the given shaping parameters.
///
/// The Rician intensity uses the noncentral-χ² (2 DoF) construction —
/// coherent amplitude plus complex Gaussian — which is exact and needs no
/// special functions. A fixed seed reproduces the set bit for bit.
pub fn sample(params: ShapingParams, n: usize, seed: u64) -> Result<SampleSet> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma_z = params.sigma_z2.sqrt();
    let ln_z_mean = -0.5 * params.sigma_z2;
    let coherent = (params.r / (1.0 + params.r)).sqrt();
    let scatter = (0.5 / (1.0 + params.r)).sqrt();

    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let g: f64 = rng.sample(StandardNormal);
        let z = (ln_z_mean + sigma_z * g).exp();
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let a = coherent + scatter * re;
        let b = scatter * im;
        values.push(z * (a * a + b * b));
    }
    Ok(SampleSet { values, seed: Some(seed), origin: Some(params) })
}

/// Bounds of the truncated `u = ln z` integration range.
fn log_z_range(params: ShapingParams, cfg: &QuadratureConfig) -> (f64, f64) {
    let sigma_z = params.sigma_z2.sqrt();
    let mean = -0.5 * params.sigma_z2;
    (mean - cfg.z_range_sigmas * sigma_z, mean + cfg.z_range_sigmas * sigma_z)
}

/// Channel density at `intensity`, by adaptive quadrature of the defining
/// integral.
///
/// The integrand is evaluated in scaled form: with `t = √((1+r)·I·e^{-u})`
/// the Bessel-exponential product collapses to `i0e(2√r·t)·e^{-(t-√r)²}`,
/// bounded by 1, so the quadrature is overflow-free for any argument.
pub fn pdf_reference(params: ShapingParams, intensity: f64, cfg: &QuadratureConfig) -> Result<f64> {
    params.validate()?;
    cfg.validate()?;
    if !(intensity > 0.0) || !intensity.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "intensity must be finite and > 0, got {intensity}"
        )));
    }
    let sigma_z = params.sigma_z2.sqrt();
    let sqrt_r = params.r.sqrt();
    let one_plus_r = 1.0 + params.r;
    let half_s2 = 0.5 * params.sigma_z2;
    let norm = one_plus_r / ((2.0 * std::f64::consts::PI).sqrt() * sigma_z);
    let (lo, hi) = log_z_range(params, cfg);

    let integrand = |u: f64| {
        let t = (one_plus_r * intensity * (-u).exp()).sqrt();
        let gauss = (u + half_s2) / sigma_z;
        let exponent = -(t - sqrt_r) * (t - sqrt_r) - 0.5 * gauss * gauss - u;
        i0e(2.0 * sqrt_r * t) * exponent.exp()
    };
    let v = quad::integrate(integrand, lo, hi, cfg.rel_tol, cfg.max_subdivisions)?;
    Ok((norm * v).max(0.0))
}

/// Channel CDF at `lambda`.
///
/// Conditioned on `z = e^u` the intensity is a scaled noncentral χ², so
/// the CDF is a single lognormal-weighted quadrature of the exact
/// conditional CDF — no nested integration.
pub fn cdf_reference(params: ShapingParams, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    params.validate()?;
    cfg.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
    }
    let sigma_z = params.sigma_z2.sqrt();
    let half_s2 = 0.5 * params.sigma_z2;
    let noncentrality = 2.0 * params.r;
    let two_one_plus_r = 2.0 * (1.0 + params.r);
    let gauss_norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma_z);
    let (lo, hi) = log_z_range(params, cfg);

    let integrand = |u: f64| {
        let x = two_one_plus_r * lambda * (-u).exp();
        let gauss = (u + half_s2) / sigma_z;
        gauss_norm * (-0.5 * gauss * gauss).exp() * noncentral_chi2_cdf_2dof(x, noncentrality)
    };
    let v = quad::integrate(integrand, lo, hi, cfg.rel_tol, cfg.max_subdivisions)?;
    Ok(v.clamp(0.0, 1.0))
}
