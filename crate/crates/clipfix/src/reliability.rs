//! Per-tone decision reliabilities and the convexity-transition analysis.
//!
//! A tone's reliability is the likelihood ratio between the observed
//! perturbation `X̲̂ - <X̲̂>` being pure distortion and it being a decoding
//! error toward some other constellation point. The exact criterion sums
//! over all M-1 competitors; the truncated criterion keeps the first tier
//! of surrounding neighbors; the circle, square and leaf criteria are
//! cheap geometric approximations whose validity regions are governed by
//! the transition radius `r̃` expressed through the Lambert W function.
//!
//! All criteria are computed and compared as natural-log reliabilities:
//! the ratios overflow f64 well inside the parameter range of interest,
//! and only the induced tone ordering matters for selection.

use num_complex::Complex64;

use crate::error::{ClipfixError, Result};
use crate::qam::Constellation;

/// Which reliability function produced a score vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionKind {
    Exact,
    Trunc,
    Circle,
    Square,
    Leaf,
    /// Mild/severe dispatch: the closed-form truncated criterion under
    /// severe clipping, the circle/leaf switch at `r̃` otherwise.
    Auto,
    /// Uniformly random scores; baseline for ranked selection.
    Random,
}

/// One tone's perturbation in polar form, folded into the first quadrant.
#[derive(Debug, Clone, Copy)]
pub struct Perturbation {
    /// Magnitude `|X̲̂ - <X̲̂>|`.
    pub r: f64,
    /// Quadrant-folded phase in `[0, pi/2]`.
    pub theta: f64,
    pub tone: usize,
    pub sigma_d2: f64,
}

impl Perturbation {
    pub fn from_difference(diff: Complex64, tone: usize, sigma_d2: f64) -> Self {
        let (r, theta) = fold(diff);
        Self {
            r,
            theta,
            tone,
            sigma_d2,
        }
    }
}

/// Per-tone log-reliabilities plus the criterion that produced them.
#[derive(Debug, Clone)]
pub struct ReliabilityScores {
    pub criterion: CriterionKind,
    /// Natural-log reliabilities, finite at every tone.
    pub log_scores: Vec<f64>,
    /// Leaf parameter, meaningful for `Leaf` and the `Auto` mild branch.
    pub mu: f64,
}

/// Fold a perturbation into `(r, theta)` with `theta` in `[0, pi/2]`,
/// reflecting about the axes.
pub fn fold(diff: Complex64) -> (f64, f64) {
    (diff.norm(), diff.im.abs().atan2(diff.re.abs()))
}

/// `ln f_D(r)` for the circular distortion density with `E[|D|^2] = sigma_d2`.
fn log_density(sigma_d2: f64, r_sqr: f64) -> f64 {
    -(std::f64::consts::PI * sigma_d2).ln() - r_sqr / sigma_d2
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Exact log-reliability: the observed difference against every other
/// constellation point.
pub fn log_r_exact(c: &Constellation, xhat: Complex64, sigma_d2: f64) -> f64 {
    let (_, idx) = c.nearest(xhat);
    let num = -(xhat - c.point(idx)).norm_sqr() / sigma_d2;
    let terms: Vec<f64> = c
        .points()
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, p)| -(xhat - p).norm_sqr() / sigma_d2)
        .collect();
    num - log_sum_exp(&terms)
}

/// First-tier truncated log-reliability: the denominator keeps only the
/// existing nearest and next-nearest neighbors of the decoded point.
pub fn log_r_trunc_tier(c: &Constellation, xhat: Complex64, sigma_d2: f64) -> f64 {
    let (_, idx) = c.nearest(xhat);
    let (nn, nnn) = c
        .neighbor_frame_indices(idx)
        .expect("decoded index is valid");
    let num = -(xhat - c.point(idx)).norm_sqr() / sigma_d2;
    let terms: Vec<f64> = nn
        .into_iter()
        .chain(nnn)
        .map(|i| -(xhat - c.point(i)).norm_sqr() / sigma_d2)
        .collect();
    num - log_sum_exp(&terms)
}

/// Closed-form truncated log-reliability of an interior four-point frame,
/// `R = (beta [alpha^cos + alpha^sin + beta alpha^(cos+sin)])^{-1}` with
/// `alpha = e^{2 d r / sigma^2}` and `beta = e^{-d^2/sigma^2}`.
pub fn log_r_trunc(r: f64, theta: f64, d_min: f64, sigma_d2: f64) -> f64 {
    let a = 2.0 * d_min * r / sigma_d2; // ln(alpha)
    let log_beta = -d_min * d_min / sigma_d2;
    let (s, c) = theta.sin_cos();
    -log_beta - log_sum_exp(&[a * c, a * s, a * (c + s) + log_beta])
}

/// Closed-form truncated log-reliability with edge awareness: competitors
/// that fall off the grid for the decoded symbol's quadrant are dropped
/// from the denominator.
pub fn log_r_trunc_framed(
    c: &Constellation,
    decoded_index: usize,
    diff: Complex64,
    sigma_d2: f64,
) -> f64 {
    let (r, theta) = fold(diff);
    let a = 2.0 * c.d_min() * r / sigma_d2;
    let log_beta = -c.d_min() * c.d_min() / sigma_d2;
    let (sin, cos) = theta.sin_cos();
    let present = c.quadrant_competitors(decoded_index, diff.re >= 0.0, diff.im >= 0.0);
    let mut terms = Vec::with_capacity(3);
    if present[0].is_some() {
        terms.push(a * cos);
    }
    if present[1].is_some() {
        terms.push(a * sin);
    }
    if present[2].is_some() {
        terms.push(a * (cos + sin) + log_beta);
    }
    if terms.is_empty() {
        // Isolated corner with the perturbation pointing off-grid; no
        // competitor means maximal confidence. Keep scores finite.
        return f64::MAX.ln();
    }
    -log_beta - log_sum_exp(&terms)
}

/// Phase-blind log-reliability `ln f_D(r)`.
pub fn log_r_circle(r: f64, sigma_d2: f64) -> f64 {
    log_density(sigma_d2, r * r)
}

/// Square-region log-reliability: `f_D` of the Chebyshev-style metric
/// `max(r cos theta, r sin theta)` (square of half-side `r`).
pub fn log_r_square(r: f64, theta: f64, sigma_d2: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let m = (r * c).max(r * s);
    log_density(sigma_d2, m * m)
}

/// Leaf-shaped log-reliability
/// `ln(f_D(r) [mu + (1-mu) cos(4 theta + pi)])` for `mu` in `[1/2, 1]`.
pub fn log_r_leaf(r: f64, theta: f64, sigma_d2: f64, mu: f64) -> Result<f64> {
    if !(0.5..=1.0).contains(&mu) {
        return Err(ClipfixError::InvalidArgument(format!(
            "leaf parameter mu must lie in [1/2, 1], got {mu}"
        )));
    }
    let shape = mu + (1.0 - mu) * (4.0 * theta + std::f64::consts::PI).cos();
    Ok(log_density(sigma_d2, r * r) + shape.max(1e-300).ln())
}

/// Primary branch of the Lambert W function on `[-1/e, inf)`.
///
/// Safeguarded Newton iteration on `x e^x - y = 0`: steps that leave the
/// current bracket fall back to bisection. Near the branch point the
/// iteration starts from the series in `p = sqrt(2(e y + 1))`.
pub fn lambert_w0(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(ClipfixError::Domain(format!("non-finite argument {y}")));
    }
    let branch = -(-1.0f64).exp(); // -1/e
    if y < branch - 1e-15 {
        return Err(ClipfixError::Domain(format!(
            "Lambert W0 undefined for {y} < -1/e"
        )));
    }
    if y <= branch {
        return Ok(-1.0);
    }
    if y == 0.0 {
        return Ok(0.0);
    }

    let mut x = if y < branch + 1e-3 {
        let p = (2.0 * (std::f64::consts::E * y + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0
    } else if y < 1.0 {
        // Adequate start for small |y|; Newton does the rest.
        y * (1.0 - y)
    } else {
        let l = y.ln();
        l - l.ln()
    };

    // Bracket [lo, hi] with f(lo) <= 0 <= f(hi); f is increasing on x >= -1.
    let f = |x: f64| x * x.exp() - y;
    let mut lo = -1.0f64;
    let mut hi = if y <= 0.0 { 0.0 } else { (1.0 + y).ln() + 1.0 };
    x = x.clamp(lo, hi);

    for _ in 0..200 {
        let fx = f(x);
        if fx.abs() <= 1e-14 {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let deriv = x.exp() * (1.0 + x);
        let next = if deriv.abs() > 1e-300 {
            x - fx / deriv
        } else {
            f64::NAN
        };
        x = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}

/// Convexity-transition radius of the truncated reliability.
#[derive(Debug, Clone, Copy)]
pub struct RTilde {
    /// Lambert-form root
    /// `r̃ = (-sqrt(2) sigma^2 / (2 d)) (W0(-e^{1 - d^2/sigma^2}) - 1)`.
    pub exact: f64,
    /// Small-distortion approximation `r̃ ~ (sqrt(2)/2) sigma^2/d`.
    pub approx: f64,
}

/// The small-distortion approximation alone; defined for any positive inputs.
pub fn r_tilde_approx(d_min: f64, sigma_d2: f64) -> f64 {
    (2f64.sqrt() / 2.0) * sigma_d2 / d_min
}

/// Both forms of the transition radius. Errors when the W0 argument falls
/// below the branch point, i.e. when `sigma_d2 > d_min^2/2` and the
/// analysis regime no longer applies.
pub fn r_tilde(d_min: f64, sigma_d2: f64) -> Result<RTilde> {
    if !(d_min > 0.0) || !(sigma_d2 > 0.0) {
        return Err(ClipfixError::InvalidArgument(
            "d_min and sigma_d2 must be positive".into(),
        ));
    }
    let arg = -(1.0 - d_min * d_min / sigma_d2).exp();
    let branch = -(-1.0f64).exp();
    if arg < branch {
        return Err(ClipfixError::Domain(format!(
            "distortion too large for the transition analysis: sigma_d2 = {sigma_d2} > d_min^2/2"
        )));
    }
    let w = lambert_w0(arg)?;
    Ok(RTilde {
        exact: -(2f64.sqrt() * sigma_d2 / (2.0 * d_min)) * (w - 1.0),
        approx: r_tilde_approx(d_min, sigma_d2),
    })
}

/// Analytic second partial derivative of the closed-form truncated
/// reliability with respect to theta.
///
/// Evaluated by factoring the largest exponential out of the three-term
/// sum; the sign at `theta = pi/4` flips exactly at `r = r̃`.
pub fn d2_r_trunc_dtheta2(r: f64, theta: f64, d_min: f64, sigma_d2: f64) -> f64 {
    let a = 2.0 * d_min * r / sigma_d2; // ln(alpha)
    let log_beta = -d_min * d_min / sigma_d2;
    let (s, c) = theta.sin_cos();

    let e_c = a * c;
    let e_s = a * s;
    let e_cs = a * (c + s) + log_beta;
    let m = e_c.max(e_s).max(e_cs);
    // u_* carry a factor e^{-m}; beta alpha^(cos+sin) corresponds to u_cs.
    let u_c = (e_c - m).exp();
    let u_s = (e_s - m).exp();
    let u_cs = (e_cs - m).exp();

    let sum = u_c + u_s + u_cs;
    let d1 = a * ((c - s) * u_cs - s * u_c + c * u_s);
    let d2 = a * a * (c - s) * (c - s) * u_cs + a * (-s - c) * u_cs - a * s * u_s - a * c * u_c
        + a * a * c * c * u_s
        + a * a * s * s * u_c;

    // (1/beta) e^{-m} [2 S'^2/S^3 - S''/S^2] with the scaled sums.
    (-log_beta - m).exp() * (2.0 * d1 * d1 / (sum * sum * sum) - d2 / (sum * sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;

    #[test]
    fn fold_maps_all_quadrants() {
        let (r, t) = fold(Complex64::new(-0.3, 0.4));
        assert!((r - 0.5).abs() < 1e-12);
        assert!((t - 0.4f64.atan2(0.3)).abs() < 1e-12);
        let (_, t2) = fold(Complex64::new(0.3, -0.4));
        assert!((t - t2).abs() < 1e-12);
        assert!(t >= 0.0 && t <= std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn exact_on_point_is_huge() {
        let c = Constellation::build(16).unwrap();
        let v = log_r_exact(&c, c.point(5), 1e-4);
        assert!(v > 50.0, "log score {v}");
    }

    #[test]
    fn exact_at_midpoint_tends_to_one() {
        let c = Constellation::build(16).unwrap();
        // Adjacent interior points 5 and 6.
        let mid = (c.point(5) + c.point(6)) / 2.0;
        // Small sigma: only the equidistant competitor matters and the
        // ratio approaches the boundary minimum of one.
        let v = log_r_exact(&c, mid, 1e-3 * c.d_min() * c.d_min());
        assert!(v.abs() < 1e-6, "log score {v}");
    }

    #[test]
    fn exact_matches_direct_summation() {
        let c = Constellation::build(16).unwrap();
        let mut rng = {
            use rand::SeedableRng;
            rand_chacha::ChaCha8Rng::seed_from_u64(12)
        };
        use rand::Rng;
        for _ in 0..200 {
            let z = Complex64::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
            let s2 = rng.gen_range(0.01..0.2);
            let (_, idx) = c.nearest(z);
            let num = crate::stats::density_d(s2, z - c.point(idx));
            let den: f64 = c
                .points()
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, p)| crate::stats::density_d(s2, z - p))
                .sum();
            let direct = (num / den).ln();
            let v = log_r_exact(&c, z, s2);
            assert!(
                (v - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "v={v} direct={direct}"
            );
        }
    }

    #[test]
    fn trunc_closed_form_matches_three_neighbor_oracle() {
        // f_D(r) / sum_i f_D(r_i) with the three competitor distances.
        let d: f64 = 0.5;
        for &s2 in &[0.05 * d * d, 0.1 * d * d, 0.3 * d * d] {
            for &r in &[0.05 * d, 0.2 * d, 0.5 * d, 0.7 * d] {
                for &theta in &[0.0, 0.3, FRAC_PI_4, 1.1, std::f64::consts::FRAC_PI_2] {
                    let r1 = (r * r - 2.0 * r * d * theta.cos() + d * d).sqrt();
                    let r2 =
                        (r * r - 2.0 * r * d * (theta.cos() + theta.sin()) + 2.0 * d * d).sqrt();
                    let r3 = (r * r - 2.0 * r * d * theta.sin() + d * d).sqrt();
                    let num = crate::stats::density_d(s2, Complex64::new(r, 0.0));
                    let den: f64 = [r1, r2, r3]
                        .iter()
                        .map(|ri| crate::stats::density_d(s2, Complex64::new(*ri, 0.0)))
                        .sum();
                    let oracle = (num / den).ln();
                    let v = log_r_trunc(r, theta, d, s2);
                    assert!(
                        (v - oracle).abs() <= 1e-12 * oracle.abs().max(1.0),
                        "r={r} theta={theta} v={v} oracle={oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn trunc_at_zero_radius_is_isotropic() {
        let d = 1.0;
        let s2 = 0.07;
        let beta = (-d * d / s2 as f64).exp();
        let expect = -(beta * (2.0 + beta)).ln();
        for theta in [0.0, 0.5, FRAC_PI_4, 1.4] {
            let v = log_r_trunc(0.0, theta, d, s2);
            assert!((v - expect).abs() < 1e-10, "theta={theta}");
        }
    }

    #[test]
    fn framed_trunc_equals_closed_form_for_interior() {
        let c = Constellation::build(64).unwrap();
        let idx = c.index_at(3, 4).unwrap();
        let diff = Complex64::new(0.3 * c.d_min(), -0.25 * c.d_min());
        let s2 = 0.05 * c.d_min() * c.d_min();
        let (r, theta) = fold(diff);
        let a = log_r_trunc_framed(&c, idx, diff, s2);
        let b = log_r_trunc(r, theta, c.d_min(), s2);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn framed_trunc_drops_missing_competitors() {
        let c = Constellation::build(16).unwrap();
        let s2 = 0.05 * c.d_min() * c.d_min();
        // Corner 0: perturbation pointing away from the grid leaves no
        // first-tier competitor in that quadrant.
        let away = Complex64::new(-0.1, -0.1);
        let v = log_r_trunc_framed(&c, 0, away, s2);
        let interior = log_r_trunc(away.norm(), FRAC_PI_4, c.d_min(), s2);
        assert!(v > interior);
        // Toward the grid the corner sees the full frame.
        let toward = Complex64::new(0.1, 0.1);
        let v = log_r_trunc_framed(&c, 0, toward, s2);
        let (r, theta) = fold(toward);
        assert!((v - log_r_trunc(r, theta, c.d_min(), s2)).abs() < 1e-12);
    }

    #[test]
    fn circle_ignores_phase_square_favors_diagonal() {
        let s2 = 0.1;
        let r = 0.4;
        assert_eq!(log_r_circle(r, s2), log_r_circle(r, s2));
        let a = log_r_square(r, 0.0, s2);
        let b = log_r_square(r, FRAC_PI_4, s2);
        // Along the diagonal the Chebyshev radius shrinks by sqrt(2).
        assert!(b > a);
        let direct = crate::stats::density_d(s2, Complex64::new(r / 2f64.sqrt(), 0.0)).ln();
        assert!((b - direct).abs() < 1e-12);
    }

    #[test]
    fn leaf_endpoints() {
        let s2 = 0.1;
        let r = 0.4;
        for mu in [0.65, 0.95] {
            let diag = log_r_leaf(r, FRAC_PI_4, s2, mu).unwrap();
            assert!((diag - log_r_circle(r, s2)).abs() < 1e-12);
            let axis = log_r_leaf(r, 0.0, s2, mu).unwrap();
            let expect = log_r_circle(r, s2) + (2.0 * mu - 1.0f64).ln();
            assert!((axis - expect).abs() < 1e-12);
        }
        assert!(log_r_leaf(r, 0.0, s2, 0.3).is_err());
        assert!(log_r_leaf(r, 0.0, s2, 1.2).is_err());
    }

    #[test]
    fn leaf_orders_like_trunc_in_concave_regime() {
        let d = Constellation::build(64).unwrap().d_min();
        let s2 = 0.2 * d * d;
        let r = 0.3 * d;
        assert!(r > r_tilde(d, s2).unwrap().exact);
        let trunc_axis = log_r_trunc(r, 0.0, d, s2);
        let trunc_diag = log_r_trunc(r, FRAC_PI_4, d, s2);
        let leaf_axis = log_r_leaf(r, 0.0, s2, 0.95).unwrap();
        let leaf_diag = log_r_leaf(r, FRAC_PI_4, s2, 0.95).unwrap();
        assert_eq!(trunc_diag > trunc_axis, leaf_diag > leaf_axis);
        assert!(trunc_diag > trunc_axis);
    }

    #[test]
    fn lambert_basics() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        let branch = -(-1.0f64).exp();
        assert!((lambert_w0(branch).unwrap() + 1.0).abs() < 1e-10);
        assert!(lambert_w0(branch - 1e-6).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
        // W(1) is the omega constant; W(e) = 1.
        assert!((lambert_w0(1.0).unwrap() - 0.567_143_290_409_783_8).abs() < 1e-12);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambert_residual_grid() {
        let branch = -(-1.0f64).exp();
        for i in 0..=1000 {
            let y = branch * (1.0 - i as f64 / 1000.0);
            let w = lambert_w0(y).unwrap();
            assert!(w >= -1.0 - 1e-12);
            let resid = (w * w.exp() - y).abs();
            assert!(resid < 1e-12, "y={y} w={w} resid={resid}");
        }
    }

    #[test]
    fn r_tilde_small_sigma_matches_approx() {
        let d = 1.0;
        let rt = r_tilde(d, 0.01 * d * d).unwrap();
        assert!((rt.exact / rt.approx - 1.0).abs() < 1e-3);
        // Larger sigma: exact pulls away from the approximation.
        let rt2 = r_tilde(d, 0.4 * d * d).unwrap();
        assert!((rt2.exact / rt2.approx - 1.0).abs() > 0.01);
    }

    #[test]
    fn r_tilde_matches_bisection_of_transition_equation() {
        // sqrt(2) d r / s2 - e^{(sqrt(2) d r - d^2)/s2} - 1 = 0
        let d: f64 = 0.8;
        for &s2 in &[0.05 * d * d, 0.1 * d * d, 0.2 * d * d, 0.35 * d * d] {
            let g = |r: f64| {
                2f64.sqrt() * d * r / s2 - ((2f64.sqrt() * d * r - d * d) / s2).exp() - 1.0
            };
            let (mut lo, mut hi) = (0.0f64, 2f64.sqrt() / 2.0 * d);
            assert!(g(lo) < 0.0 && g(hi) > 0.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            let rt = r_tilde(d, s2).unwrap();
            assert!(
                (rt.exact - root).abs() < 1e-9,
                "s2={s2} exact={} root={root}",
                rt.exact
            );
        }
    }

    #[test]
    fn r_tilde_regime_guard() {
        let d = 1.0;
        assert!(r_tilde(d, 0.51 * d * d).is_err());
        assert!(r_tilde(d, 0.499 * d * d).is_ok());
        assert!(r_tilde(-1.0, 0.1).is_err());
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let d = 1.0;
        let s2 = 0.1;
        let h = 1e-4;
        for &r in &[0.03, 0.07, 0.15, 0.3] {
            for &theta in &[0.4, FRAC_PI_4, 1.0] {
                let f = |t: f64| log_r_trunc(r, t, d, s2).exp();
                let fd = (f(theta + h) - 2.0 * f(theta) + f(theta - h)) / (h * h);
                let an = d2_r_trunc_dtheta2(r, theta, d, s2);
                assert!(
                    (an - fd).abs() <= 1e-5 * fd.abs().max(1e-12),
                    "r={r} theta={theta} an={an} fd={fd}"
                );
            }
        }
    }

    #[test]
    fn second_derivative_sign_brackets_transition() {
        let d = 1.0;
        for &s2 in &[0.05, 0.1, 0.2] {
            let rt = r_tilde(d, s2).unwrap().exact;
            let below = d2_r_trunc_dtheta2(0.5 * rt, FRAC_PI_4, d, s2);
            assert!(below > 0.0, "s2={s2} below={below}");
            let above_r = (2.0 * rt).min(2f64.sqrt() / 2.0 * d * 0.999);
            let above = d2_r_trunc_dtheta2(above_r, FRAC_PI_4, d, s2);
            assert!(above < 0.0, "s2={s2} above={above}");
            // Near-zero at the root itself.
            let at = d2_r_trunc_dtheta2(rt, FRAC_PI_4, d, s2);
            let scale = below.abs().max(above.abs());
            assert!(at.abs() < 1e-6 * scale, "s2={s2} at={at}");
        }
    }

    proptest! {
        #[test]
        fn trunc_symmetric_about_diagonal(
            r in 0.0f64..0.7,
            theta in 0.0f64..std::f64::consts::FRAC_PI_2,
            s2 in 0.02f64..0.4,
        ) {
            let d = 1.0;
            let a = log_r_trunc(r * d, theta, d, s2);
            let b = log_r_trunc(r * d, std::f64::consts::FRAC_PI_2 - theta, d, s2);
            prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn trunc_scale_invariant(
            r in 0.01f64..0.7,
            theta in 0.0f64..std::f64::consts::FRAC_PI_2,
            s2 in 0.02f64..0.4,
            scale in 0.1f64..10.0,
        ) {
            let d = 1.0;
            let a = log_r_trunc(r * d, theta, d, s2);
            let b = log_r_trunc(scale * r * d, theta, scale * d, scale * scale * s2);
            prop_assert!((a - b).abs() < 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn d2_symmetric_about_diagonal(
            delta in 0.0f64..0.7,
            r in 0.02f64..0.6,
        ) {
            let d = 1.0;
            let s2 = 0.1;
            let a = d2_r_trunc_dtheta2(r, FRAC_PI_4 + delta, d, s2);
            let b = d2_r_trunc_dtheta2(r, FRAC_PI_4 - delta, d, s2);
            prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-9));
        }

        #[test]
        fn ranking_invariant_under_exp(
            scores in proptest::collection::vec(-30.0f64..30.0, 8),
        ) {
            // The ordering of log scores matches the ordering of scores.
            let mut by_log: Vec<usize> = (0..scores.len()).collect();
            by_log.sort_by(|a, b| scores[*b].partial_cmp(&scores[*a]).unwrap());
            let lin: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
            let mut by_lin: Vec<usize> = (0..lin.len()).collect();
            by_lin.sort_by(|a, b| lin[*b].partial_cmp(&lin[*a]).unwrap());
            prop_assert_eq!(by_log, by_lin);
        }
    }
}
