//! Points of the unit ball, the bracket `[x, y]`, weighted measures and quadrature grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{composite_gauss, tanh_sinh_unit};

/// Points closer than this to the sphere are rejected by interior operations.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// A point of the open unit ball of `R^n` with its Euclidean norm cached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    coords: Vec<f64>,
    norm: f64,
}

impl BallPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Dimension(coords.len()));
        }
        let norm = euclidean_norm(&coords);
        if !(norm < 1.0 - BOUNDARY_GUARD) {
            return Err(Error::OutsideBall(norm));
        }
        Ok(Self { coords, norm })
    }

    /// The point `r e_1`.
    pub fn on_axis(n: usize, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let mut coords = vec![0.0; n];
        coords[0] = r;
        Self::new(coords)
    }

    pub fn origin(n: usize) -> Result<Self> {
        Self::on_axis(n, 0.0)
    }

    /// The point `r ζ` for a direction `ζ` (normalised internally).
    pub fn from_polar(r: f64, direction: &[f64]) -> Result<Self> {
        let len = euclidean_norm(direction);
        if len == 0.0 {
            return Err(Error::InvalidParams("zero direction".into()));
        }
        Self::new(direction.iter().map(|c| r * c / len).collect())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// `1 - |x|^2`, evaluated as `(1 - |x|)(1 + |x|)`.
    pub fn defect(&self) -> f64 {
        (1.0 - self.norm) * (1.0 + self.norm)
    }

    /// Unit vector in the direction of the point, or `e_1` at the origin.
    pub fn direction(&self) -> Vec<f64> {
        if self.norm == 0.0 {
            let mut e = vec![0.0; self.dim()];
            e[0] = 1.0;
            e
        } else {
            self.coords.iter().map(|c| c / self.norm).collect()
        }
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.coords.iter().map(|c| c * t).collect())
    }
}

impl AsRef<[f64]> for BallPoint {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

pub fn euclidean_norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|c| (c / scale).powi(2)).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `[x, y] = sqrt(1 - 2 x·y + |x|^2 |y|^2)` for points of the open ball.
pub fn bracket(x: &BallPoint, y: &BallPoint) -> Result<f64> {
    bracket_closed(x.coords(), y.coords())
}

/// The bracket for points of the closed ball, e.g. when `y` lies on the sphere.
///
/// Evaluated as `| |y| x - y/|y| |`, which avoids the cancellation of the expanded form.
pub fn bracket_closed(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    let nx = euclidean_norm(x);
    let ny = euclidean_norm(y);
    for r in [nx, ny] {
        if r > 1.0 + BOUNDARY_GUARD {
            return Err(Error::OutsideBall(r));
        }
    }
    if ny == 0.0 || nx == 0.0 {
        return Ok(1.0);
    }
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| ny * a - b / ny).collect();
    Ok(euclidean_norm(&diff))
}

/// The bracket expressed through `ρ = |x||y|` and the angle between `x` and `y`.
///
/// `gap` is `1 - ρ` and `one_minus_cos` is `1 - cos θ`, both supplied to full precision.
#[inline]
pub fn bracket_polar(rho: f64, gap: f64, one_minus_cos: f64) -> f64 {
    (gap * gap + 2.0 * rho * one_minus_cos).sqrt()
}

/// Normalised weighted measure `dν_α = (1-|x|^2)^α dν / V_α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedMeasure {
    pub alpha: f64,
    pub v_alpha: f64,
}

impl WeightedMeasure {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            v_alpha: v_alpha(n, alpha)?,
        })
    }
}

/// `V_α = ∫_B (1-|x|^2)^α dν` for `α > -1`, and `1` otherwise.
pub fn v_alpha(n: usize, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if alpha <= -1.0 {
        return Ok(1.0);
    }
    let grid = radial_rule(n, alpha, 161)?;
    Ok(grid.integrate(|_| 1.0))
}

/// A node of a radial rule: radius `r`, its defect `u = 1 - r^2`, and the weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialNode {
    pub r: f64,
    pub u: f64,
    pub weight: f64,
}

impl RadialNode {
    /// `1 - r`, recovered from `u` without cancellation.
    #[inline]
    pub fn gap(&self) -> f64 {
        self.u / (1.0 + self.r)
    }
}

/// Quadrature for `∫_0^1 n r^{n-1} (1-r^2)^w g(r) dr`, with the Jacobi factor absorbed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub n: usize,
    pub jacobi_exponent: f64,
    pub nodes: Vec<RadialNode>,
}

impl RadialGrid {
    pub fn radii(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.r).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.weight).collect()
    }

    pub fn integrate<F: FnMut(&RadialNode) -> f64>(&self, mut g: F) -> f64 {
        self.nodes.iter().map(|node| node.weight * g(node)).sum()
    }

    /// Rule resolving boundary structure of width `scale` in `u = 1 - r^2`.
    ///
    /// The interval is split into a core panel in `r`, dyadic panels in `log u` down to
    /// `scale / 64`, and a last panel where the singular weight is removed by the
    /// substitution `u ∝ v^{1/(w+1)}`. Every panel sees a smooth integrand whenever `g`
    /// varies on the scale `scale` or slower.
    pub fn graded(n: usize, weight_exponent: f64, scale: f64, per_panel: usize) -> Result<Self> {
        check_radial_args(n, weight_exponent, per_panel)?;
        let w = weight_exponent;
        let half_n = 0.5 * n as f64;
        let mut nodes = Vec::new();

        let r_core = 0.5f64.sqrt();
        for (r, len_w) in composite_gauss(&[0.0, 0.5 * r_core, r_core], per_panel) {
            let u = (1.0 - r) * (1.0 + r);
            let weight = len_w * n as f64 * r.powi(n as i32 - 1) * u.powf(w);
            nodes.push(RadialNode { r, u, weight });
        }

        let u_floor = (scale.abs() / 64.0).clamp(1e-300, 0.25);
        let mut breaks = vec![0.5f64.ln()];
        let mut u_lo = 0.5;
        while u_lo > u_floor {
            u_lo *= 0.5;
            breaks.push(u_lo.ln());
        }
        breaks.reverse();
        for (tau, len_w) in composite_gauss(&breaks, per_panel) {
            let u = tau.exp();
            let r = (1.0 - u).sqrt();
            let weight = len_w * half_n * (1.0 - u).powf(half_n - 1.0) * u.powf(w + 1.0);
            nodes.push(RadialNode { r, u, weight });
        }

        let u_min = u_lo;
        let a = 1.0 / (w + 1.0);
        let prefactor = half_n * u_min.powf(w + 1.0) * a;
        for node in tanh_sinh_unit(per_panel) {
            let u = u_min * node.x.powf(a);
            let r = (1.0 - u).sqrt();
            let weight = node.weight * prefactor * (1.0 - u).powf(half_n - 1.0);
            if u > 0.0 && weight > 0.0 {
                nodes.push(RadialNode { r, u, weight });
            }
        }
        Ok(Self {
            n,
            jacobi_exponent: w,
            nodes,
        })
    }
}

fn check_radial_args(n: usize, w: f64, points: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    if !(w > -1.0) {
        return Err(Error::NonIntegrableWeight(w));
    }
    if points < 8 {
        return Err(Error::TooFewPoints { min: 8, got: points });
    }
    Ok(())
}

/// Double-exponential radial rule for `∫_0^1 n r^{n-1} (1-r^2)^w g(r) dr`, `w > -1`.
///
/// With `u = 1 - r^2 = v^{1/(w+1)}` the weight becomes `dv / (w+1)` and tanh-sinh is applied
/// in `v`. The rule uses `2 ⌊points/2⌋ + 1` nodes, none of them at `r = 1`.
pub fn radial_rule(n: usize, weight_exponent: f64, points: usize) -> Result<RadialGrid> {
    check_radial_args(n, weight_exponent, points)?;
    let w = weight_exponent;
    let a = 1.0 / (w + 1.0);
    let half_n = 0.5 * n as f64;
    let nodes = tanh_sinh_unit(points / 2)
        .into_iter()
        .filter_map(|node| {
            let u = (node.x.ln() * a).exp();
            let r_sq = if u < 0.5 {
                1.0 - u
            } else {
                -((-node.complement).ln_1p() * a).exp_m1()
            };
            if !(u > 0.0 && r_sq > 0.0) {
                return None;
            }
            let weight = node.weight * half_n * a * r_sq.powf(half_n - 1.0);
            Some(RadialNode {
                r: r_sq.sqrt(),
                u,
                weight,
            })
        })
        .collect();
    Ok(RadialGrid {
        n,
        jacobi_exponent: w,
        nodes,
    })
}

/// A node of a polar-angle rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleNode {
    pub theta: f64,
    pub cos: f64,
    pub one_minus_cos: f64,
    pub weight: f64,
}

impl AngleNode {
    fn at(theta: f64, raw_weight: f64) -> Self {
        let half = 0.5 * theta;
        let s = half.sin();
        let cos = if theta <= 0.5 * PI {
            theta.cos()
        } else {
            -(PI - theta).cos()
        };
        Self {
            theta,
            cos,
            one_minus_cos: 2.0 * s * s,
            weight: raw_weight,
        }
    }
}

/// Normalised quadrature for `∫_S f(ζ·e) dσ(ζ)`, i.e. polar angle with weight `sin^{n-2} θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalRule {
    pub n: usize,
    pub nodes: Vec<AngleNode>,
}

impl ZonalRule {
    /// Tanh-sinh rule in `θ ∈ (0, π)`, symmetric under `θ ↦ π - θ`.
    pub fn new(n: usize, points: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let nodes = tanh_sinh_unit(points.max(2) / 2)
            .into_iter()
            .map(|node| {
                let theta = PI * node.x;
                let sin = if node.x <= 0.5 {
                    theta.sin()
                } else {
                    (PI * node.complement).sin()
                };
                AngleNode::at(theta, node.weight * PI * sin.powi(n as i32 - 2))
            })
            .collect();
        Ok(Self::normalised(n, nodes))
    }

    /// Composite Gauss rule resolving a peak of angular width `width` at `θ = 0`.
    pub fn peaked(n: usize, width: f64, per_panel: usize) -> Result<Self> {
        Self::with_breaks(n, &Self::peaked_breaks(width), per_panel)
    }

    /// Panel ends of [`Self::peaked`]: geometric from `width/4`, then quarters of `π`.
    pub fn peaked_breaks(width: f64) -> Vec<f64> {
        let mut breaks = vec![0.0];
        let mut h = (0.25 * width).max(1e-300);
        while h < 0.25 * PI {
            breaks.push(h);
            h *= 2.0;
        }
        breaks.extend([0.25 * PI, 0.5 * PI, 0.75 * PI, PI]);
        breaks
    }

    /// Composite Gauss rule on `[0, π]` with the given increasing panel ends.
    pub fn with_breaks(n: usize, breaks: &[f64], per_panel: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        let nodes = composite_gauss(breaks, per_panel)
            .into_iter()
            .map(|(theta, w)| AngleNode::at(theta, w * theta.sin().powi(n as i32 - 2)))
            .collect();
        Ok(Self::normalised(n, nodes))
    }

    /// Rule for the distribution of `ω·e` with `ω` uniform on the equatorial sphere `S^{n-2}`.
    pub fn section(n: usize, points: usize) -> Result<Self> {
        match n {
            0 | 1 => Err(Error::Dimension(n)),
            2 => Ok(Self {
                n: 1,
                nodes: vec![AngleNode::at(0.0, 0.5), AngleNode::at(PI, 0.5)],
            }),
            _ => {
                let nodes = composite_gauss(&[0.0, 0.5 * PI, PI], points.max(2).div_ceil(2))
                    .into_iter()
                    .map(|(phi, w)| AngleNode::at(phi, w * phi.sin().powi(n as i32 - 3)))
                    .collect();
                Ok(Self::normalised(n - 1, nodes))
            }
        }
    }

    fn normalised(n: usize, mut nodes: Vec<AngleNode>) -> Self {
        let total: f64 = nodes.iter().map(|a| a.weight).sum();
        for node in &mut nodes {
            node.weight /= total;
        }
        Self { n, nodes }
    }

    pub fn integrate<F: FnMut(&AngleNode) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().map(|node| node.weight * f(node)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Polar-angle rule with default resolution, as a free function.
pub fn zonal_rule(n: usize, points: usize) -> Result<ZonalRule> {
    ZonalRule::new(n, points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bracket_examples() {
        let o = BallPoint::origin(3).unwrap();
        let y = BallPoint::new(vec![0.3, -0.2, 0.5]).unwrap();
        assert_eq!(bracket(&o, &y).unwrap(), 1.0);
        let h = BallPoint::on_axis(3, 0.5).unwrap();
        assert!((bracket(&h, &h).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn bracket_rejects_mismatched_dimensions() {
        assert_eq!(
            bracket_closed(&[0.1, 0.2], &[0.1, 0.2, 0.3]),
            Err(Error::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn ball_point_rejects_degenerate_inputs() {
        assert!(BallPoint::new(vec![0.5]).is_err());
        assert!(BallPoint::new(vec![1.0, 0.0]).is_err());
        assert!(BallPoint::new(vec![1.0 - 1e-13, 0.0]).is_err());
        assert!(BallPoint::new(vec![0.6, 0.7]).is_ok());
    }

    #[test]
    fn polar_bracket_matches_vector_form() {
        let x = BallPoint::on_axis(3, 0.8).unwrap();
        let theta: f64 = 0.3;
        let y = BallPoint::new(vec![0.9 * theta.cos(), 0.9 * theta.sin(), 0.0]).unwrap();
        let rho = 0.72;
        let got = bracket_polar(rho, 1.0 - rho, 1.0 - theta.cos());
        assert!((got - bracket(&x, &y).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn v_alpha_examples() {
        assert!((v_alpha(3, 0.0).unwrap() - 1.0).abs() < 1e-13);
        assert_eq!(v_alpha(3, -2.0).unwrap(), 1.0);
        assert_eq!(v_alpha(5, -1.0).unwrap(), 1.0);
        assert!((v_alpha(2, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn radial_rule_examples() {
        let g = radial_rule(3, 0.0, 64).unwrap();
        assert!((g.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
        let g = radial_rule(2, 1.0, 64).unwrap();
        assert!((g.integrate(|_| 1.0) - 0.5).abs() < 1e-10);
        let g = radial_rule(2, 0.0, 64).unwrap();
        assert!((g.integrate(|node| node.r * node.r) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn radial_rule_rejects_bad_arguments() {
        assert_eq!(radial_rule(3, -1.0, 64).unwrap_err(), Error::NonIntegrableWeight(-1.0));
        assert!(matches!(radial_rule(3, 0.0, 4), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn radial_nodes_stay_inside_the_interval() {
        for w in [-0.9, -0.5, 0.0, 3.0] {
            for grid in [
                radial_rule(4, w, 80).unwrap(),
                RadialGrid::graded(4, w, 1e-3, 10).unwrap(),
            ] {
                for node in &grid.nodes {
                    assert!(node.r > 0.0 && node.r <= 1.0 && node.weight > 0.0 && node.u > 0.0);
                    assert!((node.u - (1.0 - node.r * node.r)).abs() < 1e-14);
                    assert!(node.gap() > 0.0 && (node.gap() * (1.0 + node.r) - node.u).abs() <= 1e-15 * node.u);
                }
            }
        }
    }

    #[test]
    fn graded_rule_agrees_with_double_exponential_rule() {
        for (n, w) in [(2usize, -0.7f64), (3, 0.0), (4, 1.5), (5, -0.2)] {
            let f = |node: &RadialNode| node.r.powi(3) + (1.0 + node.u).ln();
            let a = radial_rule(n, w, 120).unwrap().integrate(f);
            let b = RadialGrid::graded(n, w, 1e-4, 12).unwrap().integrate(f);
            assert!((a - b).abs() < 1e-11 * a.abs().max(1.0), "n={n} w={w}: {a} vs {b}");
        }
    }

    #[test]
    fn zonal_rule_examples() {
        for n in 2..7 {
            let rule = zonal_rule(n, 64).unwrap();
            assert!((rule.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
            assert!(rule.integrate(|a| a.cos).abs() < 1e-12);
        }
        let rule = zonal_rule(3, 64).unwrap();
        assert!((rule.integrate(|a| a.cos * a.cos) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn peaked_rule_resolves_poisson_kernel() {
        for n in [2usize, 3, 4] {
            for r in [0.9, 0.99, 0.9999] {
                let rule = ZonalRule::peaked(n, 1.0 - r, 12).unwrap();
                let mean = rule.integrate(|a| {
                    let br = bracket_polar(r, 1.0 - r, a.one_minus_cos);
                    (1.0 - r * r) / br.powi(n as i32)
                });
                assert!((mean - 1.0).abs() < 1e-10, "n={n} r={r} mean={mean}");
            }
        }
    }

    #[test]
    fn section_rule_is_a_probability_measure() {
        for n in 2..6 {
            let rule = ZonalRule::section(n, 32).unwrap();
            assert!((rule.integrate(|_| 1.0) - 1.0).abs() < 1e-13);
            assert!(rule.integrate(|a| a.cos).abs() < 1e-13);
        }
    }
}
