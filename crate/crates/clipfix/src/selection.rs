//! Measurement-tone selection: order-statistic top-m ranking and the
//! probability bounds that size the tone subset.
//!
//! The disk and square bounds lower-bound the probability that every
//! selected tone was decoded correctly, given that its perturbation stayed
//! inside a safe region of radius (or half-side) `r_o` around the decoded
//! point. Both are stated for the convention `E[|D|^2] = sigma_d2`, i.e.
//! per-axis deviation `sqrt(sigma_d2/2)`.

use crate::error::{ClipfixError, Result};
use crate::stats::q_function;

/// A sorted subset of tone indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToneSet {
    indices: Vec<usize>,
}

impl ToneSet {
    /// Build from arbitrary indices; sorts and rejects duplicates or
    /// out-of-range entries.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ClipfixError::InvalidArgument("duplicate tone index".into()));
        }
        if indices.last().is_some_and(|&i| i >= n) {
            return Err(ClipfixError::InvalidArgument(format!(
                "tone index out of range 0..{n}"
            )));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, tone: usize) -> bool {
        self.indices.binary_search(&tone).is_ok()
    }
}

/// Indices of the `m` largest scores; ties break toward the lower index.
pub fn top_m(scores: &[f64], m: usize) -> Result<ToneSet> {
    if m > scores.len() {
        return Err(ClipfixError::InvalidArgument(format!(
            "cannot select {m} of {} tones",
            scores.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(ClipfixError::InvalidArgument("NaN score".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores are not NaN")
            .then(a.cmp(&b))
    });
    order.truncate(m);
    ToneSet::new(order, scores.len())
}

/// Which safe-region bound to use when sizing the tone subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Disk,
    Square,
}

fn check_bound_args(r_o: f64, d_min: f64, sigma_d2: f64) -> Result<()> {
    if !(d_min > 0.0) || !(sigma_d2 > 0.0) {
        return Err(ClipfixError::InvalidArgument(
            "d_min and sigma_d2 must be positive".into(),
        ));
    }
    if !(r_o > 0.0 && r_o < d_min / 2.0) {
        return Err(ClipfixError::InvalidArgument(format!(
            "safe radius r_o = {r_o} must lie in (0, d_min/2)"
        )));
    }
    Ok(())
}

/// Single-tone disk ratio: probability that a perturbation observed inside
/// the r_o-disk of the decoded point is centered there rather than leaked
/// from a nearest-neighbor disk (sector covering bound).
fn disk_ratio(r_o: f64, d_min: f64, sigma_d2: f64) -> f64 {
    // Rayleigh tail terms with E[|D|^2] = sigma_d2.
    let f = |r: f64| -(-r * r / sigma_d2).exp_m1();
    let centered = f(r_o);
    let sector = (8.0 / std::f64::consts::PI) * (r_o / d_min).asin();
    let annulus = (2.0 * r_o * d_min / sigma_d2).sinh()
        * (-(d_min * d_min + r_o * r_o) / sigma_d2).exp()
        * 2.0;
    let leak = sector * annulus;
    (centered / (centered + leak)).clamp(0.0, 1.0)
}

/// Lower bound on `Pr(all m selected tones decoded correctly)` for
/// disk-confined perturbations, `ratio^m`.
pub fn prob_all_correct_disk(r_o: f64, d_min: f64, sigma_d2: f64, m: usize) -> Result<f64> {
    check_bound_args(r_o, d_min, sigma_d2)?;
    Ok(disk_ratio(r_o, d_min, sigma_d2).powi(m as i32))
}

/// Single-tone square ratio: the complete first-tier mass of the 3x3 grid
/// of safe squares factors per axis, giving `C^2 / (C + 2B)^2` with
/// `C = 1 - 2Q(r_o/s)` and `B = Q((d-r_o)/s) - Q((d+r_o)/s)`.
fn square_ratio(r_o: f64, d_min: f64, sigma_d2: f64) -> f64 {
    let s = (sigma_d2 / 2.0).sqrt(); // per-axis deviation
    let c = 1.0 - 2.0 * q_function(r_o / s);
    let b = q_function((d_min - r_o) / s) - q_function((d_min + r_o) / s);
    let denom = c + 2.0 * b;
    if denom <= 0.0 {
        return 0.0;
    }
    ((c / denom) * (c / denom)).clamp(0.0, 1.0)
}

/// Lower bound on `Pr(all m selected tones decoded correctly)` for
/// square-confined perturbations, `ratio^m`.
pub fn prob_all_correct_square(r_o: f64, d_min: f64, sigma_d2: f64, m: usize) -> Result<f64> {
    check_bound_args(r_o, d_min, sigma_d2)?;
    Ok(square_ratio(r_o, d_min, sigma_d2).powi(m as i32))
}

/// Inputs for sizing the measurement set.
#[derive(Debug, Clone)]
pub struct CardinalityProfile {
    pub n: usize,
    /// Expected clip-support size `E[|I_c|]`.
    pub expected_sparsity: f64,
    /// Constant in the `m >= kappa k ln(N/k)` sample-complexity rule.
    pub kappa: f64,
    /// Safe radius used by the probability bound.
    pub r_o: f64,
    pub d_min: f64,
    /// Representative (channel-averaged) distortion variance.
    pub sigma_d2: f64,
    pub bound: BoundKind,
}

/// Outcome of the cardinality rule `|Omega_m| = max(m_tau, m_gamma)`.
#[derive(Debug, Clone, Copy)]
pub struct CardinalityChoice {
    /// Largest m keeping the all-correct bound above tau; `None` when the
    /// constraint is infeasible (even m = 1 fails) or vacuous (every m up
    /// to N passes), in which case `m` falls back to the CS requirement.
    pub m_tau: Option<usize>,
    /// CS sample-complexity requirement `ceil(kappa k ln(N/k))`.
    pub m_gamma: usize,
    /// Chosen cardinality.
    pub m: usize,
}

/// Pick the number of measurement tones from the probability bound and the
/// sparsity-driven CS requirement.
pub fn choose_cardinality(tau: f64, profile: &CardinalityProfile) -> Result<CardinalityChoice> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(ClipfixError::InvalidArgument(format!(
            "tau must lie in (0, 1), got {tau}"
        )));
    }
    let n = profile.n;
    let k = profile.expected_sparsity;
    let m_gamma = if k <= 0.0 {
        0
    } else if k >= n as f64 {
        n
    } else {
        ((profile.kappa * k * (n as f64 / k).ln()).ceil() as usize).min(n)
    };

    let ratio = match profile.bound {
        BoundKind::Disk => {
            check_bound_args(profile.r_o, profile.d_min, profile.sigma_d2)?;
            disk_ratio(profile.r_o, profile.d_min, profile.sigma_d2)
        }
        BoundKind::Square => {
            check_bound_args(profile.r_o, profile.d_min, profile.sigma_d2)?;
            square_ratio(profile.r_o, profile.d_min, profile.sigma_d2)
        }
    };

    let m_tau = if ratio >= 1.0 {
        None // vacuous: every cardinality passes
    } else if ratio < tau {
        None // infeasible: even a single tone fails the target
    } else {
        let m = (tau.ln() / ratio.ln()).floor() as usize;
        if m >= n {
            None // vacuous at full block length
        } else {
            Some(m.max(1))
        }
    };

    Ok(CardinalityChoice {
        m_tau,
        m_gamma,
        m: m_tau.unwrap_or(0).max(m_gamma).min(n),
    })
}
