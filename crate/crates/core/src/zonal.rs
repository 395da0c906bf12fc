//! Zonal harmonics `Z_k(x, y)`, normalised so that `Σ_k Z_k(x, ζ)` is the Poisson kernel.
//!
//! On the sphere `Z_k(ζ, η) = w_k P_k(ζ·η)`, where `P_k` is the Gegenbauer polynomial
//! `C_k^{(n-2)/2}` and `w_k = (n+2k-2)/(n-2)` for `n ≥ 3`, and `P_k = T_k`, `w_k = 2` (`k ≥ 1`)
//! for `n = 2`. The extension to the ball is `|x|^k |y|^k Z_k(x̂, ŷ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, euclidean_norm, ZonalRule};

const LANES: usize = 4;

/// Three-term recurrence `P_{k+1} = a_k t P_k - b_k P_{k-1}` together with the weights `w_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalEvaluator {
    pub n: usize,
    pub k_max: usize,
    pub normalization: String,
    a: Vec<f64>,
    b: Vec<f64>,
    w: Vec<f64>,
    dims: Vec<f64>,
}

impl ZonalEvaluator {
    pub fn new(n: usize, k_max: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let mut a = Vec::with_capacity(k_max + 1);
        let mut b = Vec::with_capacity(k_max + 1);
        let mut w = Vec::with_capacity(k_max + 1);
        let lambda = 0.5 * (n as f64 - 2.0);
        for k in 0..=k_max {
            let kf = k as f64;
            if n == 2 {
                a.push(if k == 0 { 1.0 } else { 2.0 });
                b.push(if k == 0 { 0.0 } else { 1.0 });
                w.push(if k == 0 { 1.0 } else { 2.0 });
            } else {
                a.push(2.0 * (kf + lambda) / (kf + 1.0));
                b.push((kf + 2.0 * lambda - 1.0) / (kf + 1.0));
                w.push((n as f64 + 2.0 * kf - 2.0) / (n as f64 - 2.0));
            }
        }
        let mut dims = Vec::with_capacity(k_max + 1);
        let (mut p0, mut p1) = (0.0, 1.0);
        for k in 0..=k_max {
            dims.push(w[k] * p1);
            let p2 = a[k] * p1 - b[k] * p0;
            p0 = p1;
            p1 = p2;
        }
        Ok(Self {
            n,
            k_max,
            normalization: "sum over k reproduces the Poisson kernel; Z_k(ζ,ζ) = dim H_k".into(),
            a,
            b,
            w,
            dims,
        })
    }

    /// `dim H_k(R^n) = Z_k(ζ, ζ)`.
    pub fn dim(&self, k: usize) -> f64 {
        self.dims[k]
    }

    /// Sphere values `Z_k(ζ, η)` for `k = 0..out.len()` at `t = ζ·η`.
    pub fn sphere_values(&self, t: f64, out: &mut [f64]) {
        let (mut p0, mut p1) = (0.0, 1.0);
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.w[k] * p1;
            let p2 = self.a[k] * t * p1 - self.b[k] * p0;
            p0 = p1;
            p1 = p2;
        }
    }

    /// `Z_k(ζ, η)` for unit vectors with `ζ·η = t`.
    pub fn sphere_value(&self, k: usize, t: f64) -> f64 {
        let (mut p0, mut p1) = (0.0, 1.0);
        for j in 0..k {
            let p2 = self.a[j] * t * p1 - self.b[j] * p0;
            p0 = p1;
            p1 = p2;
        }
        self.w[k] * p1
    }

    /// `Σ_k c_k ρ^k Z_k(ζ, η)` over the supplied coefficients, with `ρ` folded into the recurrence.
    #[inline]
    pub fn series(&self, coeffs: &[f64], rho: f64, t: f64) -> f64 {
        let rt = rho * t;
        let rho_sq = rho * rho;
        let (mut p0, mut p1) = (0.0, 1.0);
        let mut sum = 0.0;
        let mut carry = 0.0;
        for (k, &c) in coeffs.iter().enumerate() {
            let term = c * self.w[k] * p1;
            let s = sum + term;
            carry += if sum.abs() >= term.abs() {
                (sum - s) + term
            } else {
                (term - s) + sum
            };
            sum = s;
            let p2 = self.a[k] * rt * p1 - self.b[k] * rho_sq * p0;
            p0 = p1;
            p1 = p2;
        }
        sum + carry
    }

    /// [`Self::series`] at several `t` sharing `ρ`, evaluated in lockstep groups.
    pub fn series_many(&self, coeffs: &[f64], rho: f64, ts: &[f64], out: &mut [f64]) {
        assert_eq!(ts.len(), out.len());
        let rho_sq = rho * rho;
        let mut chunks = ts.chunks_exact(LANES);
        let mut outs = out.chunks_exact_mut(LANES);
        for (t, o) in (&mut chunks).zip(&mut outs) {
            let mut rt = [0.0; LANES];
            for l in 0..LANES {
                rt[l] = rho * t[l];
            }
            let mut p0 = [0.0; LANES];
            let mut p1 = [1.0; LANES];
            let mut sum = [0.0; LANES];
            let mut carry = [0.0; LANES];
            for (k, &c) in coeffs.iter().enumerate() {
                let cw = c * self.w[k];
                let (ak, bk) = (self.a[k], self.b[k] * rho_sq);
                for l in 0..LANES {
                    let term = cw * p1[l];
                    let s = sum[l] + term;
                    let back = s - sum[l];
                    carry[l] += (sum[l] - (s - back)) + (term - back);
                    sum[l] = s;
                    let p2 = ak * rt[l] * p1[l] - bk * p0[l];
                    p0[l] = p1[l];
                    p1[l] = p2;
                }
            }
            for l in 0..LANES {
                o[l] = sum[l] + carry[l];
            }
        }
        for (t, o) in chunks.remainder().iter().zip(outs.into_remainder()) {
            *o = self.series(coeffs, rho, *t);
        }
    }

    /// `Z_k(x, y)` for arbitrary vectors, by homogeneity.
    pub fn zonal(&self, k: usize, x: &[f64], y: &[f64]) -> f64 {
        let nx = euclidean_norm(x);
        let ny = euclidean_norm(y);
        if nx == 0.0 || ny == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        let t = (dot(x, y) / (nx * ny)).clamp(-1.0, 1.0);
        (nx * ny).powi(k as i32) * self.sphere_value(k, t)
    }
}

/// `dim H_k(R^n)`, the dimension of the degree-`k` spherical harmonics.
pub fn dim_harmonics(n: usize, k: usize) -> f64 {
    if n == 2 {
        return if k == 0 { 1.0 } else { 2.0 };
    }
    let nf = n as f64;
    let mut binom = 1.0;
    for j in 0..k {
        binom *= (nf - 2.0 + j as f64) / (j as f64 + 1.0);
    }
    (nf + 2.0 * k as f64 - 2.0) / (nf - 2.0) * binom
}

/// `dim H_k` for `k = 0..=k_max`, by the ratio recurrence of the binomial factor.
pub fn dim_harmonics_sequence(n: usize, k_max: usize) -> Vec<f64> {
    if n == 2 {
        return (0..=k_max).map(|k| dim_harmonics(2, k)).collect();
    }
    let nf = n as f64;
    let mut binom = 1.0;
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let kf = k as f64;
        out.push((nf + 2.0 * kf - 2.0) / (nf - 2.0) * binom);
        binom *= (nf - 2.0 + kf) / (kf + 1.0);
    }
    out
}

/// `Z_k(x, y)` for points of the ball (or the sphere).
pub fn zonal<P: AsRef<[f64]>, Q: AsRef<[f64]>>(k: usize, x: &P, y: &Q) -> f64 {
    let x = x.as_ref();
    ZonalEvaluator::new(x.len().max(2), k)
        .map(|z| z.zonal(k, x, y.as_ref()))
        .unwrap_or(f64::NAN)
}

/// Tail tolerance used by [`zonal_sum_poisson_check`].
pub const POISSON_TAIL_TOL: f64 = 1e-7;

/// `Σ_{k ≤ k_max} Z_k(x, ζ)`, refused unless the certified tail is below [`POISSON_TAIL_TOL`].
pub fn zonal_sum_poisson_check<P: AsRef<[f64]>>(x: &P, zeta: &[f64], k_max: usize) -> Result<f64> {
    let x = x.as_ref();
    if x.len() != zeta.len() {
        return Err(Error::DimensionMismatch(x.len(), zeta.len()));
    }
    let n = x.len();
    let rho = euclidean_norm(x);
    if rho > 0.9 + 1e-15 {
        return Err(Error::OutsideBall(rho));
    }
    let eval = ZonalEvaluator::new(n, k_max + 2)?;
    let next = k_max + 1;
    let ratio = rho * (eval.dim(next + 1) / eval.dim(next)).max(1.0);
    let tail = eval.dim(next) * rho.powi(next as i32) / (1.0 - ratio);
    if !(ratio < 1.0) || tail > POISSON_TAIL_TOL {
        return Err(Error::TailNotMet {
            k_max,
            tail,
            tol: POISSON_TAIL_TOL,
        });
    }
    if rho == 0.0 {
        return Ok(1.0);
    }
    let t = (dot(x, zeta) / (rho * euclidean_norm(zeta))).clamp(-1.0, 1.0);
    Ok(eval.series(&vec![1.0; k_max + 1], rho, t))
}

/// `⟨g, Z_m(·, e_1)⟩_{L^2(σ)}` for a zonal function `g` given through `ζ·e_1`.
pub fn sphere_mode_projection<G: Fn(f64) -> f64>(n: usize, g: G, m: usize) -> Result<f64> {
    let rule = ZonalRule::new(n, 2 * m + 160)?;
    let eval = ZonalEvaluator::new(n, m)?;
    Ok(rule.integrate(|a| g(a.cos) * eval.sphere_value(m, a.cos)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zonal_examples() {
        let x = [0.3, 0.1, -0.2];
        let y = [0.0, 0.5, 0.4];
        assert_eq!(zonal(0, &x, &y), 1.0);
        assert_eq!(zonal(3, &[0.0, 0.0, 0.0], &y), 0.0);
        let zeta = [0.6, 0.8, 0.0];
        assert!((zonal(2, &zeta, &zeta) - 5.0).abs() < 1e-13);
    }

    #[test]
    fn dimension_sequence_matches_pointwise() {
        for n in 2..=5 {
            let seq = dim_harmonics_sequence(n, 40);
            for (k, d) in seq.iter().enumerate() {
                assert!((d - dim_harmonics(n, k)).abs() <= 1e-12 * d.max(1.0));
            }
        }
    }

    #[test]
    fn dimensions_match_closed_forms() {
        let eval = ZonalEvaluator::new(3, 20).unwrap();
        for k in 0..=20 {
            assert!((eval.dim(k) - (2 * k + 1) as f64).abs() < 1e-12);
        }
        let eval = ZonalEvaluator::new(4, 20).unwrap();
        for k in 0..=20 {
            assert!((eval.dim(k) - ((k + 1) * (k + 1)) as f64).abs() < 1e-10);
            assert!((dim_harmonics(4, k) - eval.dim(k)).abs() < 1e-10);
        }
        let eval = ZonalEvaluator::new(2, 5).unwrap();
        assert_eq!(eval.dim(0), 1.0);
        assert_eq!(eval.dim(4), 2.0);
    }

    #[test]
    fn batched_series_matches_single_evaluations() {
        let eval = ZonalEvaluator::new(4, 300).unwrap();
        let coeffs: Vec<f64> = (0..=300).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let ts: Vec<f64> = (0..11).map(|j| -1.0 + 0.2 * j as f64).collect();
        let mut out = vec![0.0; ts.len()];
        eval.series_many(&coeffs, 0.93, &ts, &mut out);
        for (t, o) in ts.iter().zip(&out) {
            let single = eval.series(&coeffs, 0.93, *t);
            assert!((o - single).abs() <= 1e-13 * single.abs().max(1.0));
        }
    }

    #[test]
    fn two_dimensional_zonals_are_cosines() {
        let eval = ZonalEvaluator::new(2, 10).unwrap();
        let theta: f64 = 1.1;
        for k in 1..=10 {
            let expected = 2.0 * (k as f64 * theta).cos();
            assert!((eval.sphere_value(k, theta.cos()) - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn poisson_examples() {
        let zeta = [1.0, 0.0, 0.0];
        assert_eq!(zonal_sum_poisson_check(&[0.0, 0.0, 0.0], &zeta, 0).unwrap(), 1.0);
        let x = [0.5, 0.0, 0.0];
        assert!((zonal_sum_poisson_check(&x, &zeta, 200).unwrap() - 6.0).abs() < 1e-6);
        let anti = [-1.0, 0.0, 0.0];
        let expected = 0.75 / 1.5f64.powi(3);
        assert!((zonal_sum_poisson_check(&x, &anti, 200).unwrap() - expected).abs() < 1e-6);
        assert!(matches!(
            zonal_sum_poisson_check(&x, &zeta, 5),
            Err(Error::TailNotMet { .. })
        ));
    }

    #[test]
    fn mode_projection_examples() {
        assert!((sphere_mode_projection(3, |_| 1.0, 0).unwrap() - 1.0).abs() < 1e-12);
        let eval = ZonalEvaluator::new(3, 4).unwrap();
        let z2 = |t: f64| eval.sphere_value(2, t);
        assert!(sphere_mode_projection(3, z2, 3).unwrap().abs() < 1e-10);
        assert!((sphere_mode_projection(3, z2, 2).unwrap() - 5.0).abs() < 1e-8);
    }
}
