//! Block-fading frequency-selective Rayleigh channel with AWGN and per-tone
//! zero-forcing equalization.
//!
//! Taps are i.i.d. complex Gaussian with a uniform power-delay profile of
//! total power one, so `E[|lambda(k)|^2] = 1` at every tone. A cyclic prefix
//! is assumed long enough that the channel acts as a circular convolution;
//! the frequency-domain model `Y = Lambda X̲ + Z` is applied directly.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ClipfixError, Result};
use crate::ofdm::Dft;

/// One realization of the block-fading channel, known at the receiver.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// Impulse-response taps, length `L_h`.
    pub taps: Vec<Complex64>,
    /// Per-tone gains `lambda(k) = sum_l h(l) e^{-j2pi kl/N}`, length `N`.
    pub gains: Vec<Complex64>,
    /// AWGN variance per frequency-domain component.
    pub noise_var: f64,
}

/// Draw a standard complex Gaussian CN(0, 1) sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = 1.0 / 2f64.sqrt();
    Complex64::new(
        s * rng.sample::<f64, _>(StandardNormal),
        s * rng.sample::<f64, _>(StandardNormal),
    )
}

impl ChannelRealization {
    /// Draw taps with a uniform power-delay profile (`sigma_h^2 = 1/L_h`
    /// each) and compute the `N`-point frequency response.
    pub fn draw<R: Rng + ?Sized>(l_h: usize, n: usize, noise_var: f64, rng: &mut R) -> Result<Self> {
        if l_h == 0 || l_h > n {
            return Err(ClipfixError::InvalidArgument(format!(
                "channel length {l_h} out of range 1..={n}"
            )));
        }
        if noise_var < 0.0 {
            return Err(ClipfixError::InvalidArgument(
                "noise variance must be nonnegative".into(),
            ));
        }
        let scale = 1.0 / (l_h as f64).sqrt();
        let taps: Vec<Complex64> = (0..l_h).map(|_| scale * complex_gaussian(rng)).collect();
        let gains = frequency_response(&taps, n);
        Ok(Self {
            taps,
            gains,
            noise_var,
        })
    }

    /// Redraw until every tone gain is nonzero (a probability-zero event,
    /// but equalization requires invertible gains).
    pub fn draw_invertible<R: Rng + ?Sized>(
        l_h: usize,
        n: usize,
        noise_var: f64,
        rng: &mut R,
    ) -> Result<Self> {
        loop {
            let ch = Self::draw(l_h, n, noise_var, rng)?;
            if ch.gains.iter().all(|g| g.norm_sqr() > 0.0) {
                return Ok(ch);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.gains.len()
    }

    /// Pass a time-domain signal through the channel; returns the
    /// frequency-domain observation `Y(k) = lambda(k) X̲(k) + Z(k)`.
    pub fn transmit<R: Rng + ?Sized>(
        &self,
        x_time: &[Complex64],
        dft: &Dft,
        rng: &mut R,
    ) -> Result<Vec<Complex64>> {
        if x_time.len() != self.n() {
            return Err(ClipfixError::DimensionMismatch {
                expected: self.n(),
                got: x_time.len(),
            });
        }
        let x_freq = dft.dft(x_time)?;
        let sigma = self.noise_var.sqrt();
        Ok(x_freq
            .iter()
            .zip(&self.gains)
            .map(|(x, g)| g * x + sigma * complex_gaussian(rng))
            .collect())
    }

    /// Scalar-wise zero-forcing equalization `X̲̂(k) = Y(k)/lambda(k)`.
    pub fn equalize(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.n() {
            return Err(ClipfixError::DimensionMismatch {
                expected: self.n(),
                got: y.len(),
            });
        }
        let mut out = Vec::with_capacity(y.len());
        for (k, (v, g)) in y.iter().zip(&self.gains).enumerate() {
            if g.norm_sqr() == 0.0 {
                return Err(ClipfixError::SingularChannel { tone: k });
            }
            out.push(v / g);
        }
        Ok(out)
    }

    /// Post-equalization noise variance at tone `k`: `sigma_Z^2/|lambda(k)|^2`.
    pub fn equalized_noise_var(&self, k: usize) -> f64 {
        self.noise_var / self.gains[k].norm_sqr()
    }

    /// Block average of `1/|lambda(k)|^2`, used for channel-averaged
    /// distortion variance.
    pub fn mean_inverse_gain_sq(&self) -> f64 {
        self.gains.iter().map(|g| 1.0 / g.norm_sqr()).sum::<f64>() / self.n() as f64
    }
}

/// Direct evaluation of the `n`-point frequency response of `taps`.
pub fn frequency_response(taps: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, h) in taps.iter().enumerate() {
                let ang = -std::f64::consts::TAU * (k * l) as f64 / n as f64;
                acc += h * Complex64::from_polar(1.0, ang);
            }
            acc
        })
        .collect()
}

/// Noise variance for a target `E_b/N_0` in dB with unit symbol energy:
/// `sigma_Z^2 = 1/(log2(M) * 10^(EbN0/10))`.
pub fn noise_var_from_ebn0_db(ebn0_db: f64, qam_order: usize) -> f64 {
    let bits = (qam_order as f64).log2();
    1.0 / (bits * 10f64.powf(ebn0_db / 10.0))
}
