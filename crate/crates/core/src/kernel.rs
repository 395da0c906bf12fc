//! The Bergman-Besov kernel `R_α(x, y) = Σ_k γ_k(α) Z_k(x, y)` with certified truncation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bracket_polar, dot, BallPoint};
use crate::growth::{fit_growth, log_slope_exponents, Branch, GrowthFit, RadiusLadder, BRANCH_BAND};
use crate::special::{gamma_ratio_factors, gamma_sequence, RatioFactor};
use crate::zonal::ZonalEvaluator;

/// Default largest certified `|x||y|`, i.e. `|x|, |y| ≤ 0.95`.
pub const DEFAULT_RHO_MAX: f64 = 0.9025;
/// Default absolute tail tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
const DEGREE_CAP: usize = 5_000_000;

/// A kernel `R_α` on `B ⊂ R^n` truncated so that the tail is below `tol` for `|x||y| ≤ rho_max`.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub n: usize,
    pub alpha: f64,
    pub tol: f64,
    pub rho_max: f64,
    pub k_max: usize,
    gammas: Vec<f64>,
    zonal: ZonalEvaluator,
    ratio_factors: Vec<RatioFactor>,
}

impl KernelSpec {
    pub fn new(n: usize, alpha: f64, tol: f64, rho_max: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if !(0.0..1.0).contains(&rho_max) {
            return Err(Error::InvalidRho(rho_max));
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidParams(format!("tolerance {tol} must be positive")));
        }
        let mut ratio_factors = gamma_ratio_factors(n, alpha);
        if n > 2 {
            let half = 0.5 * n as f64;
            ratio_factors.push(RatioFactor {
                top: half,
                bottom: half - 1.0,
            });
            ratio_factors.push(RatioFactor {
                top: n as f64 - 2.0,
                bottom: 1.0,
            });
        }
        let mut spec = Self {
            n,
            alpha,
            tol,
            rho_max,
            k_max: 0,
            gammas: vec![1.0],
            zonal: ZonalEvaluator::new(n, 1)?,
            ratio_factors,
        };
        spec.k_max = spec.budget_scan(rho_max)?;
        spec.gammas = gamma_sequence(n, alpha, spec.k_max + 1);
        spec.zonal = ZonalEvaluator::new(n, spec.k_max + 1)?;
        Ok(spec)
    }

    pub fn with_defaults(n: usize, alpha: f64) -> Result<Self> {
        Self::new(n, alpha, DEFAULT_TOL, DEFAULT_RHO_MAX)
    }

    fn budget_scan(&self, rho: f64) -> Result<usize> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::InvalidRho(rho));
        }
        if rho == 0.0 {
            return Ok(0);
        }
        let dim_ratio = |k: f64| -> f64 {
            if self.n == 2 {
                if k == 0.0 {
                    2.0
                } else {
                    1.0
                }
            } else {
                1.0
            }
        };
        let mut term = 1.0;
        for k in 0..DEGREE_CAP {
            let kf = k as f64;
            let step: f64 = self.ratio_factors.iter().map(|f| f.at(kf)).product::<f64>() * dim_ratio(kf);
            term *= step * rho;
            let next = kf + 1.0;
            let sup_ratio = rho
                * self.ratio_factors.iter().map(|f| f.at(next).max(1.0)).product::<f64>()
                * dim_ratio(next).max(1.0);
            if sup_ratio < 1.0 && term / (1.0 - sup_ratio) < self.tol {
                return Ok(k);
            }
        }
        Err(Error::TailNotMet {
            k_max: DEGREE_CAP,
            tail: f64::INFINITY,
            tol: self.tol,
        })
    }

    /// Smallest truncation degree whose certified tail is below `tol` at `ρ`.
    ///
    /// The tail `Σ_{k>K} γ_k dim_k ρ^k` is bounded by its first term over `1 - r`, where `r`
    /// bounds all later term ratios; each ratio factor `(k+a)/(k+b)` is monotone in `k`.
    pub fn tail_budget(&self, rho: f64) -> Result<usize> {
        self.budget_scan(rho)
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn zonal(&self) -> &ZonalEvaluator {
        &self.zonal
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if rho > self.rho_max * (1.0 + 1e-14) {
            return Err(Error::RhoExceeded {
                rho,
                rho_max: self.rho_max,
            });
        }
        Ok(())
    }

    /// `R_α` at `ρ = |x||y|` and `t = cos∠(x, y)`, truncated at `budget` (see [`Self::tail_budget`]).
    #[inline]
    pub fn eval_truncated(&self, rho: f64, t: f64, budget: usize) -> f64 {
        let k = budget.min(self.k_max);
        self.zonal.series(&self.gammas[..=k], rho, t)
    }

    /// [`Self::eval_truncated`] at several `t` sharing `ρ`.
    pub fn eval_many(&self, rho: f64, ts: &[f64], budget: usize, out: &mut [f64]) {
        let k = budget.min(self.k_max);
        self.zonal.series_many(&self.gammas[..=k], rho, ts, out);
    }

    /// `R_α` in polar form.
    pub fn eval_polar(&self, rho: f64, t: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let budget = self.tail_budget(rho.min(self.rho_max))?;
        Ok(self.eval_truncated(rho, t.clamp(-1.0, 1.0), budget))
    }
}

/// Evaluate `R_α(x, y)` by the truncated series.
pub fn kernel_eval(spec: &KernelSpec, x: &BallPoint, y: &BallPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    if x.dim() != spec.n {
        return Err(Error::DimensionMismatch(spec.n, x.dim()));
    }
    let rho = x.norm() * y.norm();
    if rho == 0.0 {
        return Ok(1.0);
    }
    let t = dot(x.coords(), y.coords()) / rho;
    spec.eval_polar(rho, t)
}

/// Closed form of `R_{-1}(x, y) = (1 - |x|^2|y|^2) / [x, y]^n` in polar form.
pub fn extended_poisson(n: usize, rho: f64, t: f64) -> f64 {
    let br = bracket_polar(rho, 1.0 - rho, 1.0 - t);
    (1.0 - rho * rho) / br.powi(n as i32)
}

/// Branch of the dominating kernel `𝓡_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominatingBranch {
    Constant,
    Logarithmic,
    Power,
}

/// `𝓡_a(x, y)`: `1` if `a < -n`, `1 + log(1/[x,y])` if `a = -n`, `[x,y]^{-(n+a)}` if `a > -n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominatingKernel {
    pub n: usize,
    pub a: f64,
    pub branch: DominatingBranch,
}

impl DominatingKernel {
    pub fn new(n: usize, a: f64) -> Self {
        let edge = -(n as f64);
        let branch = if a < edge {
            DominatingBranch::Constant
        } else if a == edge {
            DominatingBranch::Logarithmic
        } else {
            DominatingBranch::Power
        };
        Self { n, a, branch }
    }

    pub fn value(&self, bracket: f64) -> f64 {
        match self.branch {
            DominatingBranch::Constant => 1.0,
            DominatingBranch::Logarithmic => 1.0 + (1.0 / bracket).ln(),
            DominatingBranch::Power => bracket.powf(-(self.n as f64 + self.a)),
        }
    }
}

/// A constant `C` with `𝓡_{a1} ≤ C 𝓡_{a2}` on `0 < [x,y] < 2` whenever `a1 < a2`.
pub fn comparison_constant(n: usize, a1: f64, a2: f64) -> f64 {
    let lo = DominatingKernel::new(n, a1);
    let hi = DominatingKernel::new(n, a2);
    let e2 = n as f64 + a2;
    use DominatingBranch::*;
    match (lo.branch, hi.branch) {
        (Constant, Constant) => 1.0,
        (Constant, Logarithmic) => 1.0 / (1.0 - 2f64.ln()),
        (Constant, Power) => 2f64.powf(e2),
        (Logarithmic, Power) => {
            let star = (1.0 - 1.0 / e2).exp();
            if star <= 2.0 {
                (e2 - 1.0).exp() / e2
            } else {
                (1.0 - 2f64.ln()) * 2f64.powf(e2)
            }
        }
        (Power, Power) => 2f64.powf(a2 - a1),
        _ => f64::NAN,
    }
}

/// Outcome of the pointwise-estimate verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub n: usize,
    pub alpha: f64,
    pub branch: DominatingBranch,
    pub fitted_constant: f64,
    pub fine_max_ratio: f64,
    pub diagonal_ratios: Vec<f64>,
    pub pass: bool,
}

fn sample_polar(rng: &mut ChaCha8Rng, r_max: f64) -> (f64, f64, f64) {
    let rx = r_max * rng.gen::<f64>().powf(0.3);
    let ry = r_max * rng.gen::<f64>().powf(0.3);
    let theta = if rng.gen_bool(0.5) {
        std::f64::consts::PI * rng.gen::<f64>().powi(4)
    } else {
        std::f64::consts::PI * rng.gen::<f64>()
    };
    (rx, ry, theta)
}

/// Check `|R_α| ≤ C 𝓡_α` with `C` fitted on a coarse sample and asserted as `2C` on a finer one.
pub fn verify_pointwise_estimate(n: usize, alpha: f64, sample_count: usize, seed: u64) -> Result<PointwiseReport> {
    let spec = KernelSpec::new(n, alpha, 1e-9, DEFAULT_RHO_MAX)?;
    let dom = DominatingKernel::new(n, alpha);
    let r_max = DEFAULT_RHO_MAX.sqrt();
    let ratio = |rx: f64, ry: f64, theta: f64| -> Result<f64> {
        let rho = rx * ry;
        let omc = 2.0 * (0.5 * theta).sin().powi(2);
        let value = spec.eval_polar(rho, theta.cos())?;
        Ok(value.abs() / dom.value(bracket_polar(rho, 1.0 - rho, omc)))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fitted_constant = 0.0f64;
    for _ in 0..sample_count {
        let (rx, ry, th) = sample_polar(&mut rng, r_max);
        fitted_constant = fitted_constant.max(ratio(rx, ry, th)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut fine_max_ratio = 0.0f64;
    for _ in 0..10 * sample_count {
        let (rx, ry, th) = sample_polar(&mut rng, r_max);
        fine_max_ratio = fine_max_ratio.max(ratio(rx, ry, th)?);
    }
    let diagonal_ratios = RadiusLadder::geometric(0.5, 12)
        .radii()
        .into_iter()
        .filter(|r| *r <= r_max)
        .chain(std::iter::once(r_max))
        .map(|r| ratio(r, r, 0.0))
        .collect::<Result<Vec<_>>>()?;
    for r in &diagonal_ratios {
        fine_max_ratio = fine_max_ratio.max(*r);
    }
    Ok(PointwiseReport {
        n,
        alpha,
        branch: dom.branch,
        fitted_constant,
        fine_max_ratio,
        diagonal_ratios,
        pass: fine_max_ratio <= 2.0 * fitted_constant && fine_max_ratio.is_finite(),
    })
}

/// Growth of `R_α(x, x)` along a radius ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub n: usize,
    pub alpha: f64,
    pub predicted_branch: Branch,
    pub predicted_exponent: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Richardson-extrapolated slope of `log R_α(x,x)` against `log(1/(1-|x|^2))`.
    pub fitted_exponent: f64,
    pub local_slopes: Vec<f64>,
    pub log_ratios: Vec<f64>,
    /// Difference-based fit `C + D u^{-w}`, which separates a bounded limit from slow growth.
    pub fit: GrowthFit,
}

/// Evaluate `R_α(x, x)` on the given radii and fit its boundary growth.
pub fn verify_diagonal(n: usize, alpha: f64, radii: &[f64]) -> Result<DiagonalReport> {
    if radii.len() < 3 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParams(
            "radii must be increasing with at least three entries".into(),
        ));
    }
    let r_top = radii[radii.len() - 1];
    if r_top > 0.95 {
        return Err(Error::OutsideBall(r_top));
    }
    let spec = KernelSpec::new(n, alpha, 1e-12, (r_top * r_top).max(1e-3))?;
    let values = radii
        .iter()
        .map(|r| spec.eval_polar(r * r, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let u: Vec<f64> = radii.iter().map(|r| (1.0 - r) * (1.0 + r)).collect();
    let (local_slopes, fitted_exponent) = log_slope_exponents(&u, &values);
    let fit = fit_growth(&u, &values, BRANCH_BAND);
    let log_ratios = u.iter().zip(&values).map(|(u, v)| v / (1.0 + (1.0 / u).ln())).collect();
    let w = alpha + n as f64;
    Ok(DiagonalReport {
        n,
        alpha,
        predicted_branch: Branch::from_exponent(w),
        predicted_exponent: w.max(0.0),
        radii: radii.to_vec(),
        values,
        fitted_exponent,
        local_slopes,
        log_ratios,
        fit,
    })
}

/// Largest grid-certified `ε` with `R_α(x, y) ≥ 1/2` whenever `|x| ≤ ε`.
///
/// `R_α(x, y)` depends only on `ρ = |x||y| ≤ |x|` and the angle, so the minimum over
/// `|x| ≤ ε, y ∈ B` is the minimum over `ρ ≤ ε` and all angles.
pub fn stay_away_radius(n: usize, alpha: f64) -> Result<f64> {
    let spec = KernelSpec::new(n, alpha, 1e-10, 0.95)?;
    let rho_steps = 380;
    let angles: Vec<f64> = (0..=200)
        .map(|j| (std::f64::consts::PI * j as f64 / 200.0).cos())
        .collect();
    let mut prefix_min = Vec::with_capacity(rho_steps + 1);
    let mut running = f64::INFINITY;
    for i in 0..=rho_steps {
        let rho = 0.95 * i as f64 / rho_steps as f64;
        let budget = spec.tail_budget(rho)?;
        for &t in &angles {
            running = running.min(spec.eval_truncated(rho, t, budget));
        }
        prefix_min.push(running);
    }
    let mut best = None;
    for j in 1..=95usize {
        let eps = j as f64 / 100.0;
        let idx = ((eps / 0.95) * rho_steps as f64).round() as usize;
        if prefix_min[idx.min(rho_steps)] >= 0.5 {
            best = Some(eps);
        } else {
            break;
        }
    }
    best.ok_or(Error::SearchFloor(0.01))
}

/// Minimum of `R_α` over `|x| ≤ ε` sampled on the same grid as [`stay_away_radius`].
pub fn kernel_min_within(n: usize, alpha: f64, eps: f64) -> Result<f64> {
    let spec = KernelSpec::new(n, alpha, 1e-10, eps.clamp(1e-6, 0.95))?;
    let mut m = f64::INFINITY;
    for i in 0..=100 {
        let rho = eps * i as f64 / 100.0;
        for j in 0..=100 {
            let t = (std::f64::consts::PI * j as f64 / 100.0).cos();
            m = m.min(spec.eval_polar(rho, t)?);
        }
    }
    Ok(m)
}

/// Random point of the ball with a given norm and a uniformly distributed direction.
pub fn random_point(rng: &mut impl Rng, n: usize, norm: f64) -> Result<BallPoint> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    BallPoint::from_polar(norm, &v)
}
