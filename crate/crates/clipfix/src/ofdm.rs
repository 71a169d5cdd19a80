//! Unitary DFT/IDFT, OFDM block synthesis and amplitude clipping.
//!
//! Transforms are scaled by `N^{-1/2}` in both directions so that
//! `dft(idft(X)) = X` and energies are preserved. Clipping saturates sample
//! magnitudes at `gamma` while preserving phase; the clipping signal `c` is
//! the difference between the clipped and the original time signal and is
//! sparse for typical thresholds.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{ClipfixError, Result};

/// Unitary DFT/IDFT of a fixed size, backed by cached FFT plans.
pub struct Dft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Dft {
    /// Plan transforms of length `n`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ClipfixError::InvalidArgument(
                "transform length must be nonzero".into(),
            ));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check_len(&self, v: &[Complex64]) -> Result<()> {
        if v.len() != self.n {
            return Err(ClipfixError::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Time to frequency: `X(k) = N^{-1/2} sum_l x(l) e^{-j2pi kl/N}`.
    pub fn dft(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x)?;
        let mut buf = x.to_vec();
        self.forward.process(&mut buf);
        let s = 1.0 / (self.n as f64).sqrt();
        for v in &mut buf {
            *v *= s;
        }
        Ok(buf)
    }

    /// Frequency to time: `x(l) = N^{-1/2} sum_k X(k) e^{+j2pi kl/N}`.
    pub fn idft(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x)?;
        let mut buf = x.to_vec();
        self.inverse.process(&mut buf);
        let s = 1.0 / (self.n as f64).sqrt();
        for v in &mut buf {
            *v *= s;
        }
        Ok(buf)
    }
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

/// Result of clipping a time-domain signal at magnitude `gamma`.
#[derive(Debug, Clone)]
pub struct Clipped {
    /// Saturated signal `x̲` with `|x̲(i)| <= gamma`.
    pub clipped: Vec<Complex64>,
    /// Clipping signal `c = x̲ - x`, nonzero exactly on `support`.
    pub clip_signal: Vec<Complex64>,
    /// Sorted indices where `|x(i)| > gamma`.
    pub support: Vec<usize>,
}

/// Saturate sample magnitudes at `gamma`, preserving phase.
pub fn clip(x: &[Complex64], gamma: f64) -> Result<Clipped> {
    if !(gamma > 0.0) {
        return Err(ClipfixError::InvalidArgument(format!(
            "clipping threshold must be positive, got {gamma}"
        )));
    }
    let mut clipped = Vec::with_capacity(x.len());
    let mut clip_signal = vec![Complex64::new(0.0, 0.0); x.len()];
    let mut support = Vec::new();
    for (i, &v) in x.iter().enumerate() {
        let mag = v.norm();
        if mag > gamma {
            // gamma * e^{j theta}, with the phase taken from the sample.
            let sat = v * (gamma / mag);
            clip_signal[i] = sat - v;
            clipped.push(sat);
            support.push(i);
        } else {
            clipped.push(v);
        }
    }
    Ok(Clipped {
        clipped,
        clip_signal,
        support,
    })
}

/// Peak-to-average power ratio `max|x|^2 / mean|x|^2`.
pub fn papr(x: &[Complex64]) -> Result<f64> {
    if x.is_empty() {
        return Err(ClipfixError::InvalidArgument("empty vector".into()));
    }
    let mean: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
    if mean == 0.0 {
        return Err(ClipfixError::InvalidArgument("zero vector".into()));
    }
    let peak = x.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    Ok(peak / mean)
}

/// One OFDM block: frequency-domain data, its time signal and the clipping
/// record produced by the transmitter's magnitude limiter.
#[derive(Debug, Clone)]
pub struct OfdmBlock {
    /// Frequency-domain data vector.
    pub freq_data: Vec<Complex64>,
    /// Unclipped time-domain signal `x = idft(freq_data)`.
    pub time_signal: Vec<Complex64>,
    /// Clipped time signal `x̲ = x + c`.
    pub clipped_time: Vec<Complex64>,
    /// Clipping signal `c`.
    pub clip_signal: Vec<Complex64>,
    /// Sorted support of `c`.
    pub support: Vec<usize>,
    /// Clipping threshold.
    pub gamma: f64,
}

impl OfdmBlock {
    /// Synthesize a block from frequency-domain data and clip at `gamma`.
    pub fn generate(freq_data: Vec<Complex64>, gamma: f64, dft: &Dft) -> Result<Self> {
        let time_signal = dft.idft(&freq_data)?;
        let c = clip(&time_signal, gamma)?;
        Ok(Self {
            freq_data,
            time_signal,
            clipped_time: c.clipped,
            clip_signal: c.clip_signal,
            support: c.support,
            gamma,
        })
    }

    pub fn len(&self) -> usize {
        self.freq_data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freq_data.is_empty()
    }
}
