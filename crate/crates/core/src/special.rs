//! Pochhammer symbols, the kernel coefficients `γ_k(α)` and Gegenbauer polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// The Pochhammer symbol `(a)_b = Γ(a+b)/Γ(a)`.
///
/// Nonnegative integer `b` uses the rising product `a(a+1)…(a+b-1)`; other `b` use signed
/// log-gamma values and fail on the pole set of `Γ`.
pub fn pochhammer(a: f64, b: f64) -> Result<f64> {
    if b >= 0.0 && b.fract() == 0.0 && b < 1e7 {
        let mut product = 1.0;
        let mut j = 0.0;
        while j < b {
            product *= a + j;
            j += 1.0;
        }
        return Ok(product);
    }
    if is_nonpositive_integer(a) {
        return Err(Error::Pole(a));
    }
    if is_nonpositive_integer(a + b) {
        return Err(Error::Pole(a + b));
    }
    let (top, s_top) = libm::lgamma_r(a + b);
    let (bottom, s_bottom) = libm::lgamma_r(a);
    Ok(f64::from(s_top * s_bottom) * (top - bottom).exp())
}

/// Which of the two closed forms defines `γ_k(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaBranch {
    /// `α > -(1 + n/2)`: `(1 + n/2 + α)_k / (n/2)_k`.
    Rising,
    /// `α ≤ -(1 + n/2)`: `(k!)^2 / ((1 - (n/2 + α))_k (n/2)_k)`.
    Factorial,
}

pub fn gamma_branch(n: usize, alpha: f64) -> GammaBranch {
    if alpha > -(1.0 + 0.5 * n as f64) {
        GammaBranch::Rising
    } else {
        GammaBranch::Factorial
    }
}

/// One factor `(k + shift_top) / (k + shift_bottom)` of the ratio `γ_{k+1} / γ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RatioFactor {
    pub top: f64,
    pub bottom: f64,
}

impl RatioFactor {
    #[inline]
    pub fn at(&self, k: f64) -> f64 {
        (k + self.top) / (k + self.bottom)
    }
}

/// The factors whose product is `γ_{k+1}(α) / γ_k(α)`.
pub(crate) fn gamma_ratio_factors(n: usize, alpha: f64) -> Vec<RatioFactor> {
    let half = 0.5 * n as f64;
    match gamma_branch(n, alpha) {
        GammaBranch::Rising => vec![RatioFactor {
            top: 1.0 + half + alpha,
            bottom: half,
        }],
        GammaBranch::Factorial => vec![
            RatioFactor {
                top: 1.0,
                bottom: 1.0 - (half + alpha),
            },
            RatioFactor { top: 1.0, bottom: half },
        ],
    }
}

/// Coefficients `γ_0(α), …, γ_{k_max}(α)` by accumulated ratio products.
pub fn gamma_sequence(n: usize, alpha: f64, k_max: usize) -> Vec<f64> {
    let factors = gamma_ratio_factors(n, alpha);
    let mut out = Vec::with_capacity(k_max + 1);
    let mut value = 1.0f64;
    let mut log_value = 0.0f64;
    let mut in_log = false;
    out.push(1.0);
    for k in 0..k_max {
        let kf = k as f64;
        let ratio: f64 = factors.iter().map(|f| f.at(kf)).product();
        if !in_log {
            value *= ratio;
            if !value.is_finite() || value < f64::MIN_POSITIVE {
                in_log = true;
                log_value = ln_gamma_k_direct(n, alpha, k + 1);
            }
        } else {
            log_value += ratio.ln();
        }
        out.push(if in_log { log_value.exp() } else { value });
    }
    out
}

fn ln_gamma_k_direct(n: usize, alpha: f64, k: usize) -> f64 {
    let factors = gamma_ratio_factors(n, alpha);
    (0..k)
        .map(|j| factors.iter().map(|f| f.at(j as f64).ln()).sum::<f64>())
        .sum()
}

/// `ln γ_k(α)`, accumulated in log space.
pub fn ln_gamma_k(n: usize, alpha: f64, k: usize) -> f64 {
    ln_gamma_k_direct(n, alpha, k)
}

/// The kernel coefficient `γ_k(α)`.
pub fn gamma_k(n: usize, alpha: f64, k: usize) -> f64 {
    let factors = gamma_ratio_factors(n, alpha);
    let mut value = 1.0f64;
    for j in 0..k {
        value *= factors.iter().map(|f| f.at(j as f64)).product::<f64>();
        if !value.is_finite() || value < f64::MIN_POSITIVE {
            return ln_gamma_k_direct(n, alpha, k).exp();
        }
    }
    value
}

/// `γ_k(α)` bundled with its indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaCoefficient {
    pub k: usize,
    pub alpha: f64,
    pub value: f64,
}

impl GammaCoefficient {
    pub fn new(n: usize, alpha: f64, k: usize) -> Self {
        Self {
            k,
            alpha,
            value: gamma_k(n, alpha, k),
        }
    }
}

/// Least-squares slope of `ln γ_k` against `ln k` over `k ∈ [k_max/2, k_max]`.
pub fn gamma_k_asymptotic_check(n: usize, alpha: f64, k_max: usize) -> Result<f64> {
    if k_max < 64 {
        return Err(Error::InvalidParams(format!("k_max = {k_max} must be at least 64")));
    }
    let seq = gamma_sequence(n, alpha, k_max);
    let pts: Vec<(f64, f64)> = (k_max / 2..=k_max).map(|k| ((k as f64).ln(), seq[k].ln())).collect();
    Ok(least_squares_slope(&pts))
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Gegenbauer polynomial `C_k^λ(t)` by the three-term recurrence.
///
/// For `λ = 0` the renormalised limit `lim C_k^λ / λ = (2/k) T_k` is returned (`1` at `k = 0`).
pub fn gegenbauer(lambda: f64, k: usize, t: f64) -> Result<f64> {
    if !(lambda > -0.5) {
        return Err(Error::GegenbauerIndex(lambda));
    }
    if !(-1.0..=1.0).contains(&t) {
        return Err(Error::Domain(t));
    }
    if k == 0 {
        return Ok(1.0);
    }
    if lambda == 0.0 {
        let (mut p0, mut p1) = (1.0, t);
        for _ in 1..k {
            let p2 = 2.0 * t * p1 - p0;
            p0 = p1;
            p1 = p2;
        }
        return Ok(2.0 * p1 / k as f64);
    }
    let (mut p0, mut p1) = (1.0, 2.0 * lambda * t);
    for j in 1..k {
        let jf = j as f64;
        let p2 = (2.0 * (jf + lambda) * t * p1 - (jf + 2.0 * lambda - 1.0) * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    Ok(p1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(2.7, 0.0).unwrap(), 1.0);
        assert_eq!(pochhammer(3.0, 1.0).unwrap(), 3.0);
        assert_eq!(pochhammer(2.0, 4.0).unwrap(), 120.0);
    }

    #[test]
    fn pochhammer_non_integer_and_poles() {
        let half = pochhammer(0.5, 0.5).unwrap();
        assert!((half - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(pochhammer(-2.0, 0.5), Err(Error::Pole(-2.0)));
        assert_eq!(pochhammer(0.5, -1.5), Err(Error::Pole(-1.0)));
        assert_eq!(pochhammer(-3.0, 2.0).unwrap(), 6.0);
        let neg = pochhammer(-0.5, 0.25).unwrap();
        let expected = libm::tgamma(-0.25) / libm::tgamma(-0.5);
        assert!((neg - expected).abs() < 1e-13 * expected.abs());
    }

    #[test]
    fn gamma_k_examples() {
        for n in 2..6 {
            for alpha in [-7.0, -3.0, -1.0, 0.0, 2.5] {
                assert_eq!(gamma_k(n, alpha, 0), 1.0);
            }
        }
        assert!((gamma_k(4, 0.0, 1) - 1.5).abs() < 1e-15);
        assert!((gamma_k(2, -2.0, 2) - 1.0 / 3.0).abs() < 1e-15);
        for k in 0..50 {
            assert!((gamma_k(3, -1.0, k) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn branch_boundary_uses_factorial_form() {
        assert_eq!(gamma_branch(3, -2.5), GammaBranch::Factorial);
        assert_eq!(gamma_branch(3, -2.4999999), GammaBranch::Rising);
        assert_eq!(gamma_branch(2, -2.0), GammaBranch::Factorial);
    }

    #[test]
    fn gamma_sequence_matches_pointwise_values() {
        for (n, alpha) in [(3usize, 0.3f64), (2, -2.0), (5, -6.2), (4, 40.0)] {
            let seq = gamma_sequence(n, alpha, 300);
            for k in [0usize, 1, 7, 120, 300] {
                let direct = gamma_k(n, alpha, k);
                assert!((seq[k] - direct).abs() <= 1e-12 * direct, "n={n} alpha={alpha} k={k}");
            }
        }
    }

    #[test]
    fn log_space_fallback_for_huge_coefficients() {
        let k = 1000;
        let v = gamma_k(3, 400.0, k);
        assert!(v.is_infinite() || v > 1e300);
        let ln = ln_gamma_k(3, 400.0, k);
        assert!(ln.is_finite() && ln > 800.0);
    }

    #[test]
    fn asymptotic_slopes() {
        assert!((gamma_k_asymptotic_check(3, 0.0, 512).unwrap() - 1.0).abs() < 0.05);
        assert!((gamma_k_asymptotic_check(3, -2.0, 512).unwrap() + 1.0).abs() < 0.05);
        assert!((gamma_k_asymptotic_check(2, 1.0, 512).unwrap() - 2.0).abs() < 0.05);
        assert!(gamma_k_asymptotic_check(2, 1.0, 10).is_err());
    }

    #[test]
    fn gegenbauer_examples() {
        for lambda in [0.0, 0.5, 1.0, 2.5] {
            assert_eq!(gegenbauer(lambda, 0, 0.37).unwrap(), 1.0);
        }
        assert!((gegenbauer(0.5, 1, 0.3).unwrap() - 0.3).abs() < 1e-15);
        let at_one =
            |lambda: f64, k: usize| pochhammer(2.0 * lambda, k as f64).unwrap() / pochhammer(1.0, k as f64).unwrap();
        assert!((gegenbauer(0.5, 2, 1.0).unwrap() - at_one(0.5, 2)).abs() < 1e-15);
        assert!((gegenbauer(1.5, 7, 1.0).unwrap() - at_one(1.5, 7)).abs() < 1e-10);
        assert_eq!(gegenbauer(0.5, 2, 1.5), Err(Error::Domain(1.5)));
        assert_eq!(gegenbauer(-0.5, 2, 0.5), Err(Error::GegenbauerIndex(-0.5)));
    }

    #[test]
    fn gegenbauer_lambda_zero_is_chebyshev_limit() {
        let theta: f64 = 0.7;
        for k in 1..10 {
            let expected = 2.0 * (k as f64 * theta).cos() / k as f64;
            assert!((gegenbauer(0.0, k, theta.cos()).unwrap() - expected).abs() < 1e-14);
            let small = gegenbauer(1e-7, k, theta.cos()).unwrap() / 1e-7;
            assert!((small - expected).abs() < 1e-5);
        }
    }
}
