//! Closed-form clipping-distortion statistics.
//!
//! With unit-energy symbols and a unitary IDFT the time samples are
//! approximately CN(0, 1), so `|x(i)|` is Rayleigh with scale
//! `sigma_|x| = 1/sqrt(2)`. Conditioning on a sample being clipped gives a
//! closed form for the mean clip-coefficient energy `E[|c|^2]`; the expected
//! support size is binomial. Together they yield the per-tone variance
//! `sigma_C^2 = E[|c|^2] E[|I_c|]/N` of the clipping distortion in
//! frequency, and `sigma_D^2(k) = sigma_C^2 + sigma_Z^2/|lambda(k)|^2` for
//! the total distortion after equalization.

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::error::{ClipfixError, Result};

/// Rayleigh scale of `|x(i)|` under unit-energy symbols and a unitary IDFT.
pub const SIGMA_ABS_X: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Scaled complementary error function `erfcx(x) = e^{x^2} erfc(x)`.
///
/// The direct product overflows once `x^2` exceeds the exponent range even
/// though the result is O(1/x); the asymptotic series takes over there.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        // erfcx(-x) = 2 e^{x^2} - erfcx(x); overflows for x << 0, as does
        // the true value.
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x <= 15.0 {
        (x * x).exp() * libm::erfc(x)
    } else {
        // erfcx(x) ~ (1/(x sqrt(pi))) sum_n (-1)^n (2n-1)!! / (2x^2)^n
        let ix2 = 1.0 / (2.0 * x * x);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=10u32 {
            term *= -((2 * k - 1) as f64) * ix2;
            sum += term;
        }
        sum / (x * std::f64::consts::PI.sqrt())
    }
}

/// Standard Gaussian tail probability `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / 2f64.sqrt())
}

fn check_rayleigh_args(sigma_abs_x: f64, gamma: f64) -> Result<()> {
    if !(sigma_abs_x > 0.0) || !sigma_abs_x.is_finite() {
        return Err(ClipfixError::InvalidArgument(format!(
            "Rayleigh scale must be positive and finite, got {sigma_abs_x}"
        )));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(ClipfixError::InvalidArgument(format!(
            "clipping threshold must be nonnegative and finite, got {gamma}"
        )));
    }
    Ok(())
}

/// Mean energy of a nonzero clip coefficient,
/// `E[|c|^2] = 2 sigma^2 - 2 sqrt(pi/2) gamma sigma erfcx(gamma/(sqrt(2) sigma))`.
pub fn expected_clip_energy(sigma_abs_x: f64, gamma: f64) -> Result<f64> {
    check_rayleigh_args(sigma_abs_x, gamma)?;
    let s = sigma_abs_x;
    let v = 2.0 * s * s
        - 2.0 * (std::f64::consts::PI / 2.0).sqrt() * gamma * s * erfcx(gamma / (2f64.sqrt() * s));
    // The closed form is positive but can round slightly negative for huge
    // gamma/sigma ratios.
    Ok(v.max(0.0))
}

/// Expected clip-support size `E[|I_c|] = N e^{-gamma^2/(2 sigma^2)}`.
pub fn expected_support(n: usize, sigma_abs_x: f64, gamma: f64) -> Result<f64> {
    check_rayleigh_args(sigma_abs_x, gamma)?;
    Ok(n as f64 * (-gamma * gamma / (2.0 * sigma_abs_x * sigma_abs_x)).exp())
}

/// Binomial variance of the clip-support size, `N p (1-p)`. Diagnostic only.
pub fn support_variance(n: usize, sigma_abs_x: f64, gamma: f64) -> Result<f64> {
    check_rayleigh_args(sigma_abs_x, gamma)?;
    let p = (-gamma * gamma / (2.0 * sigma_abs_x * sigma_abs_x)).exp();
    Ok(n as f64 * p * (1.0 - p))
}

/// Per-tone clipping-distortion variance in frequency,
/// `sigma_C^2 = E[|c|^2] E[|I_c|] / N`.
pub fn sigma_c2(n: usize, sigma_abs_x: f64, gamma: f64) -> Result<f64> {
    Ok(expected_clip_energy(sigma_abs_x, gamma)? * expected_support(n, sigma_abs_x, gamma)?
        / n as f64)
}

/// Total distortion variance at one tone,
/// `sigma_D^2 = sigma_C^2 + sigma_Z^2/|lambda_k|^2`.
pub fn sigma_d2(sigma_c2: f64, sigma_z2: f64, lambda_k: Complex64) -> Result<f64> {
    let g = lambda_k.norm_sqr();
    if g == 0.0 {
        return Err(ClipfixError::Domain("zero channel gain".into()));
    }
    Ok(sigma_c2 + sigma_z2 / g)
}

/// Circularly symmetric Gaussian density with `E[|D|^2] = sigma_d2`,
/// evaluated at `z`.
pub fn density_d(sigma_d2: f64, z: Complex64) -> f64 {
    (1.0 / (std::f64::consts::PI * sigma_d2)) * (-z.norm_sqr() / sigma_d2).exp()
}

/// Radial CDF of the distortion magnitude, `F_|D|(r) = 1 - e^{-r^2/sigma_D^2}`.
pub fn radial_cdf(sigma_d2: f64, r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        -(-r * r / sigma_d2).exp_m1()
    }
}

/// Distortion statistics for one block: the clipping terms are closed-form
/// functions of `gamma`, the per-tone totals fold in the realized channel.
#[derive(Debug, Clone)]
pub struct DistortionStats {
    pub sigma_abs_x: f64,
    pub gamma: f64,
    /// `E[|c|^2]` for an arbitrary nonzero coefficient.
    pub e_c2: f64,
    /// `E[|I_c|]`.
    pub e_supp: f64,
    /// `sigma_C^2`.
    pub sigma_c2: f64,
    /// `sigma_D^2(k)` per tone.
    pub per_tone_sigma_d2: Vec<f64>,
}

impl DistortionStats {
    pub fn for_channel(gamma: f64, ch: &ChannelRealization) -> Result<Self> {
        let n = ch.n();
        let e_c2 = expected_clip_energy(SIGMA_ABS_X, gamma)?;
        let e_supp = expected_support(n, SIGMA_ABS_X, gamma)?;
        let var_c = e_c2 * e_supp / n as f64;
        let per_tone_sigma_d2 = (0..n)
            .map(|k| var_c + ch.equalized_noise_var(k))
            .collect();
        Ok(Self {
            sigma_abs_x: SIGMA_ABS_X,
            gamma,
            e_c2,
            e_supp,
            sigma_c2: var_c,
            per_tone_sigma_d2,
        })
    }

    /// Channel-averaged distortion variance
    /// `sigma_C^2 + sigma_Z^2 mean(1/|lambda|^2)` over the realized block.
    pub fn block_average_sigma_d2(&self) -> f64 {
        self.per_tone_sigma_d2.iter().sum::<f64>() / self.per_tone_sigma_d2.len() as f64
    }
}
