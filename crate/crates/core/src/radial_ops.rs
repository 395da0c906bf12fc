//! Radial differential operators `D_s^t` acting on finite zonal expansions.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, euclidean_norm, BallPoint};
use crate::kernel::KernelSpec;
use crate::special::{gamma_k, ln_gamma_k};
use crate::zonal::ZonalEvaluator;

/// `f(x) = Σ_k c_k Z_k(x, η)` for a unit anchor `η`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub n: usize,
    pub anchor: Vec<f64>,
    pub coeffs: Vec<f64>,
}

impl Expansion {
    pub fn new(anchor: Vec<f64>, coeffs: Vec<f64>) -> Result<Self> {
        let n = anchor.len();
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let norm = euclidean_norm(&anchor);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "anchor must be a unit vector, |η| = {norm}"
            )));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParams("expansion needs at least one coefficient".into()));
        }
        Ok(Self { n, anchor, coeffs })
    }

    /// Anchor `e_1` in `R^n`.
    pub fn on_axis(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let mut anchor = vec![0.0; n];
        anchor[0] = 1.0;
        Self::new(anchor, coeffs)
    }

    /// Coefficients uniform in `[-1, 1]` up to `degree`, with a uniformly random anchor.
    pub fn random(n: usize, degree: usize, rng: &mut impl Rng) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let raw: Vec<f64> = loop {
            let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            if euclidean_norm(&v) > 0.1 {
                break v;
            }
        };
        let norm = euclidean_norm(&raw);
        let anchor = raw.iter().map(|c| c / norm).collect();
        let coeffs = (0..=degree).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        Self::new(anchor, coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch(self.n, x.len()));
        }
        let r = euclidean_norm(x);
        if r == 0.0 {
            return Ok(self.coeffs[0]);
        }
        let t = (dot(x, &self.anchor) / r).clamp(-1.0, 1.0);
        let zonal = ZonalEvaluator::new(self.n, self.degree())?;
        Ok(zonal.series(&self.coeffs, r, t))
    }
}

/// `γ_k(s+t) / γ_k(s)`.
pub fn multiplier(n: usize, s: f64, t: f64, k: usize) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let top = gamma_k(n, s + t, k);
    let bottom = gamma_k(n, s, k);
    let ratio = top / bottom;
    if ratio.is_finite() && ratio > 0.0 && top.is_normal() && bottom.is_normal() {
        ratio
    } else {
        (ln_gamma_k(n, s + t, k) - ln_gamma_k(n, s, k)).exp()
    }
}

/// `D_s^t f`: coefficient `k` multiplied by `γ_k(s+t) / γ_k(s)`.
pub fn apply_d(s: f64, t: f64, f: &Expansion) -> Expansion {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * multiplier(f.n, s, t, k))
        .collect();
    Expansion {
        n: f.n,
        anchor: f.anchor.clone(),
        coeffs,
    }
}

/// `I_s^t f(x) = (1 - |x|^2)^t D_s^t f(x)`.
pub fn apply_i(s: f64, t: f64, f: &Expansion, x: &BallPoint) -> Result<f64> {
    Ok(x.defect().powf(t) * apply_d(s, t, f).eval(x.coords())?)
}

fn max_coeff_gap(a: &Expansion, b: &Expansion) -> f64 {
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `max_k |(D_{s+t}^{-t} D_s^t f - f)_k|`, together with the reversed composition.
pub fn verify_inverse(s: f64, t: f64, f: &Expansion) -> f64 {
    let forward = apply_d(s + t, -t, &apply_d(s, t, f));
    let backward = apply_d(s, t, &apply_d(s + t, -t, f));
    max_coeff_gap(&forward, f).max(max_coeff_gap(&backward, f))
}

/// `max_k |(D_{s+t}^z D_s^t f - D_s^{z+t} f)_k|`.
pub fn verify_additivity(s: f64, t: f64, z: f64, f: &Expansion) -> f64 {
    let composed = apply_d(s + t, z, &apply_d(s, t, f));
    let direct = apply_d(s, z + t, f);
    max_coeff_gap(&composed, &direct)
}

/// Result of applying `D_s^t` to `R_s(·, y)` and comparing with `R_{s+t}(·, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelShiftReport {
    pub shifted: f64,
    pub direct: f64,
    pub deviation: f64,
    pub degree: usize,
}

/// `|D_s^t R_s(·, y)(x) - R_{s+t}(x, y)|`, with `R_s(·, y)` expanded about `ŷ`.
pub fn verify_kernel_shift(s: f64, t: f64, x: &BallPoint, y: &BallPoint) -> Result<KernelShiftReport> {
    let n = x.dim();
    if y.dim() != n {
        return Err(Error::DimensionMismatch(n, y.dim()));
    }
    let rho = x.norm() * y.norm();
    let source = KernelSpec::new(n, s, 1e-10, rho.max(1e-3))?;
    let target = KernelSpec::new(n, s + t, 1e-10, rho.max(1e-3))?;
    let direct = target.eval_polar(rho, cos_between(x, y))?;
    if y.norm() == 0.0 {
        return Ok(KernelShiftReport {
            shifted: 1.0,
            direct,
            deviation: (direct - 1.0).abs(),
            degree: 0,
        });
    }
    let degree = source.k_max.max(target.k_max);
    let mut scale = 1.0;
    let coeffs: Vec<f64> = (0..=degree)
        .map(|k| {
            let c = gamma_k(n, s, k) * scale;
            scale *= y.norm();
            c
        })
        .collect();
    let expansion = Expansion::new(y.direction(), coeffs)?;
    let shifted = apply_d(s, t, &expansion).eval(x.coords())?;
    Ok(KernelShiftReport {
        shifted,
        direct,
        deviation: (shifted - direct).abs(),
        degree,
    })
}

fn cos_between(x: &BallPoint, y: &BallPoint) -> f64 {
    let rho = x.norm() * y.norm();
    if rho == 0.0 {
        1.0
    } else {
        (dot(x.coords(), y.coords()) / rho).clamp(-1.0, 1.0)
    }
}
