//! The integral operators `T_bc`, `S_bc`, the projection `Q_s` and Forelli-Rudin growth.
//!
//! Every ball integral here has a zonal structure, so it reduces to a radial rule times a
//! polar-angle rule about `x̂`, plus an equatorial rule when a second pole is involved.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bracket_polar, dot, euclidean_norm, v_alpha, BallPoint, RadialGrid, RadialNode, ZonalRule};
use crate::growth::{fit_growth, Branch, GrowthFit, RadiusLadder, BRANCH_BAND};
use crate::kernel::KernelSpec;
use crate::quadrature::tanh_sinh_unit;
use crate::radial_ops::{apply_d, Expansion};
use crate::special::gamma_k;
use crate::zonal::ZonalEvaluator;

/// Largest `|x|` accepted by the pointwise operators.
pub const POINTWISE_RADIUS_MAX: f64 = 0.95;
const KERNEL_TOL: f64 = 1e-12;

/// `f_uv(x) = (1-|x|^2)^u (1 + log(1/(1-|x|^2)))^{-v}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub u: f64,
    pub v: f64,
}

impl TestFunction {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    /// Value at a point with defect `1 - |x|^2 = defect`.
    pub fn at_defect(&self, defect: f64) -> f64 {
        defect.powf(self.u) * log_factor(defect).powf(-self.v)
    }

    pub fn eval(&self, x: &BallPoint) -> f64 {
        self.at_defect(x.defect())
    }
}

fn log_factor(defect: f64) -> f64 {
    1.0 - defect.ln()
}

/// Radial profile `g(t) = t^power (1-t^2)^u (1 + log(1/(1-t^2)))^{-v}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub power: f64,
    pub u: f64,
    pub v: f64,
}

impl RadialProfile {
    pub fn constant() -> Self {
        Self {
            power: 0.0,
            u: 0.0,
            v: 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let defect = (1.0 - t) * (1.0 + t);
        t.powf(self.power) * defect.powf(self.u) * log_factor(defect).powf(-self.v)
    }
}

/// `f(y) = g(|y|) Z_m(y/|y|, η)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZonalModeInput {
    pub m: usize,
    pub anchor: Vec<f64>,
    pub profile: RadialProfile,
}

impl ZonalModeInput {
    pub fn new(m: usize, anchor: Vec<f64>, profile: RadialProfile) -> Result<Self> {
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
        Ok(Self { m, anchor, profile })
    }

    pub fn radial(n: usize, profile: RadialProfile) -> Result<Self> {
        Self::new(0, axis(n)?, profile)
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    pub fn eval(&self, y: &BallPoint) -> Result<f64> {
        let r = y.norm();
        let eval = ZonalEvaluator::new(self.dim(), self.m)?;
        if r == 0.0 {
            let z = if self.m == 0 { 1.0 } else { 0.0 };
            return Ok(self.profile.eval(0.0) * z);
        }
        let t = (dot(y.coords(), &self.anchor) / r).clamp(-1.0, 1.0);
        Ok(self.profile.eval(r) * eval.sphere_value(self.m, t))
    }
}

fn axis(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Dimension(n));
    }
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    Ok(e)
}

/// Dimension `n` and the exponents `b` (weight) and `c` (kernel) of `T_bc`, `S_bc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    pub n: usize,
    pub b: f64,
    pub c: f64,
}

impl OperatorParams {
    pub fn new(n: usize, b: f64, c: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(n));
        }
        if !b.is_finite() || !c.is_finite() {
            return Err(Error::InvalidParams(format!("b = {b} and c = {c} must be finite")));
        }
        Ok(Self { n, b, c })
    }
}

/// A ball integral that is either finite or certified divergent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integral {
    Finite(f64),
    Divergent,
}

impl Integral {
    pub fn value(&self) -> Option<f64> {
        match self {
            Integral::Finite(v) => Some(*v),
            Integral::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, Integral::Divergent)
    }
}

/// Whether `f_uv ∈ L^p_α`; `p = f64::INFINITY` selects the weighted sup norm.
pub fn membership_fuv(p: f64, alpha: f64, u: f64, v: f64) -> Result<bool> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParams(format!("p = {p} must lie in [1, ∞]")));
    }
    if p.is_infinite() {
        let e = alpha + u;
        return Ok(e > 0.0 || (e == 0.0 && v >= 0.0));
    }
    let e = alpha + p * u;
    Ok(e > -1.0 || (e == -1.0 && p * v > 1.0))
}

/// Whether `∫_0^1 t^{n-1} (1-t^2)^w (1 + log(1/(1-t^2)))^{-v} dt` converges.
pub fn radial_integrable(w: f64, v: f64) -> bool {
    w > -1.0 || (w == -1.0 && v > 1.0)
}

/// Resolution of the nested rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadLevel {
    pub per_panel: usize,
    pub section_points: usize,
}

impl QuadLevel {
    pub const COARSE: Self = Self {
        per_panel: 8,
        section_points: 24,
    };
    pub const MEDIUM: Self = Self {
        per_panel: 12,
        section_points: 36,
    };
    pub const FINE: Self = Self {
        per_panel: 16,
        section_points: 48,
    };
    pub const LADDER: [Self; 3] = [Self::COARSE, Self::MEDIUM, Self::FINE];
}

/// Nodes with `Σ w h(r) ≈ ∫_0^1 n r^{n-1} (1-r^2)^w (1 + log(1/(1-r^2)))^{-v} h(r) dr`.
///
/// The grid is graded toward `r = 1` on the scale `scale`. For `w = -1` the substitution
/// `z = (1+s)^{1-v}`, `s = log(1/(1-r^2))` turns the weight into `dz` times
/// `n r^{n-2} / (2(v-1))`; there `u` may underflow to `0`, meaning `r = 1` to working precision.
/// Returns `None` when the integral diverges.
pub fn weighted_radial_nodes(
    n: usize,
    w: f64,
    v: f64,
    scale: f64,
    per_panel: usize,
) -> Result<Option<Vec<RadialNode>>> {
    if !radial_integrable(w, v) {
        return Ok(None);
    }
    if w > -1.0 {
        let mut grid = RadialGrid::graded(n, w, scale, per_panel)?;
        if v != 0.0 {
            for node in &mut grid.nodes {
                node.weight *= log_factor(node.u).powf(-v);
            }
        }
        return Ok(Some(grid.nodes));
    }
    let k = v - 1.0;
    let prefactor = n as f64 / (2.0 * k);
    let nodes = tanh_sinh_unit(6 * per_panel)
        .into_iter()
        .map(|node| {
            let ln_z = if node.x > 0.5 {
                (-node.complement).ln_1p()
            } else {
                node.x.ln()
            };
            let s = (-ln_z / k).exp_m1();
            let u = (-s).exp();
            let r = (-(-s).exp_m1()).sqrt();
            RadialNode {
                r,
                u,
                weight: node.weight * prefactor * r.powi(n as i32 - 2),
            }
        })
        .filter(|node| node.weight > 0.0)
        .collect();
    Ok(Some(nodes))
}

/// `T_bc f_uv`, a constant function: `∫_0^1 n t^{n-1} (1-t^2)^{b+u} (1+log(1/(1-t^2)))^{-v} dt`.
pub fn apply_t_radial(params: OperatorParams, u: f64, v: f64) -> Result<Integral> {
    radial_moment(params.n, params.b + u, v, 0.0)
}

/// `∫_0^1 n t^{n-1+power} (1-t^2)^w (1+log(1/(1-t^2)))^{-v} dt`.
pub fn radial_moment(n: usize, w: f64, v: f64, power: f64) -> Result<Integral> {
    let run = |per_panel: usize| -> Result<Option<f64>> {
        Ok(weighted_radial_nodes(n, w, v, 0.5, per_panel)?
            .map(|nodes| nodes.iter().map(|node| node.weight * node.r.powf(power)).sum()))
    };
    let Some(fine) = run(QuadLevel::FINE.per_panel)? else {
        return Ok(Integral::Divergent);
    };
    let medium = run(QuadLevel::MEDIUM.per_panel)?.unwrap_or(f64::NAN);
    if !((fine - medium).abs() <= 1e-9 * fine.abs().max(1e-300)) {
        return Err(Error::NonConvergence(format!("radial moment {medium} vs {fine}")));
    }
    Ok(Integral::Finite(fine))
}

fn check_pointwise_radius(x: &BallPoint) -> Result<()> {
    if x.norm() > POINTWISE_RADIUS_MAX + 1e-15 {
        return Err(Error::OutsideBall(x.norm()));
    }
    Ok(())
}

fn kernel_for(n: usize, c: f64, radius: f64) -> Result<KernelSpec> {
    KernelSpec::new(n, c, KERNEL_TOL, radius.clamp(1e-3, 1.0 - 1e-15))
}

/// `∫_S φ(R_c(x, rζ)) dσ(ζ)` for a radial node, on the angle rule adapted to `ρ = |x| r`.
///
/// With `kinked` set, panel ends are added at the sign changes of `R_c` in the polar angle so
/// that integrands such as `|R_c|^p` stay smooth on every panel.
fn sphere_mean<F: Fn(f64, f64) -> f64>(
    spec: &KernelSpec,
    radius: f64,
    node: &RadialNode,
    per_panel: usize,
    kinked: bool,
    phi: F,
) -> Result<f64> {
    let rho = radius * node.r;
    if rho == 0.0 {
        let rule = ZonalRule::new(spec.n, 4 * per_panel)?;
        return Ok(rule.integrate(|a| phi(1.0, a.cos)));
    }
    let gap = 1.0 - radius + radius * node.gap();
    let budget = spec.tail_budget(rho.min(spec.rho_max))?;
    let mut breaks = ZonalRule::peaked_breaks(gap);
    if kinked {
        breaks = split_at_sign_changes(&breaks, |ts, out| {
            let cosines: Vec<f64> = ts.iter().map(|t| t.cos()).collect();
            spec.eval_many(rho, &cosines, budget, out);
        });
    }
    let rule = ZonalRule::with_breaks(spec.n, &breaks, per_panel)?;
    let cosines: Vec<f64> = rule.nodes.iter().map(|a| a.cos).collect();
    let mut values = vec![0.0; cosines.len()];
    spec.eval_many(rho, &cosines, budget, &mut values);
    Ok(rule
        .nodes
        .iter()
        .zip(&values)
        .map(|(a, k)| a.weight * phi(*k, a.cos))
        .sum())
}

const SIGN_SCAN: usize = 4;

/// Refine `breaks` with the zeros of `g` found by scanning each panel and bracketing.
///
/// `g` evaluates a batch of angles into its output slice.
fn split_at_sign_changes<G: Fn(&[f64], &mut [f64])>(breaks: &[f64], g: G) -> Vec<f64> {
    let mut ts = vec![breaks[0]];
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        ts.extend((1..=SIGN_SCAN).map(|j| a + (b - a) * j as f64 / SIGN_SCAN as f64));
    }
    let mut gs = vec![0.0; ts.len()];
    g(&ts, &mut gs);
    let single = |t: f64| {
        let mut out = [0.0];
        g(&[t], &mut out);
        out[0]
    };
    let mut out = Vec::with_capacity(breaks.len() + 4);
    out.push(breaks[0]);
    for j in 1..ts.len() {
        if gs[j - 1] * gs[j] < 0.0 {
            let root = illinois(&single, ts[j - 1], gs[j - 1], ts[j], gs[j]);
            if root > *out.last().unwrap() && root < ts[j] {
                out.push(root);
            }
        }
        if j % SIGN_SCAN == 0 && ts[j] > *out.last().unwrap() {
            out.push(ts[j]);
        }
    }
    out
}

fn illinois<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut ga: f64, mut b: f64, mut gb: f64) -> f64 {
    for _ in 0..100 {
        if (b - a).abs() <= 1e-14 * (1.0 + b.abs()) {
            break;
        }
        let c = (a * gb - b * ga) / (gb - ga);
        let gc = g(c);
        if gc == 0.0 {
            return c;
        }
        if gc * gb < 0.0 {
            a = b;
            ga = gb;
        } else {
            ga *= 0.5;
        }
        b = c;
        gb = gc;
    }
    b
}

/// `S_bc f_uv(x) = ∫ |R_c(x,y)| f_uv(y) (1-|y|^2)^b dν(y)`.
///
/// Divergence is decided by the radial criterion: the angular mean of `|R_c(x, ·)|` over each
/// sphere is at least `1`, and `|R_c(x, ·)|` is bounded for fixed `x`.
pub fn apply_s_pointwise(params: OperatorParams, f: TestFunction, x: &BallPoint) -> Result<Integral> {
    if x.dim() != params.n {
        return Err(Error::DimensionMismatch(params.n, x.dim()));
    }
    check_pointwise_radius(x)?;
    let w = params.b + f.u;
    if !radial_integrable(w, f.v) {
        return Ok(Integral::Divergent);
    }
    let spec = kernel_for(params.n, params.c, x.norm())?;
    let mut levels = Vec::new();
    for level in QuadLevel::LADDER {
        let nodes = weighted_radial_nodes(params.n, w, f.v, 1.0 - x.norm(), level.per_panel)?
            .expect("integrability checked above");
        let mut total = 0.0;
        for node in &nodes {
            total += node.weight * sphere_mean(&spec, x.norm(), node, level.per_panel, true, |k, _| k.abs())?;
        }
        levels.push(total);
    }
    settle(&levels, 1e-7, "S_bc")
}

fn settle(levels: &[f64], rel: f64, what: &str) -> Result<Integral> {
    let fine = levels[levels.len() - 1];
    let medium = levels[levels.len() - 2];
    if !fine.is_finite() || (fine - medium).abs() > rel * fine.abs().max(1e-300) {
        return Err(Error::NonConvergence(format!("{what}: refinement levels {levels:?}")));
    }
    Ok(Integral::Finite(fine))
}

/// `T_bc f(x) = γ_m(c) Z_m(x, η) ∫_0^1 n t^{n-1+m} g(t) (1-t^2)^b dt` for a single mode.
pub fn apply_t_zonal_mode(params: OperatorParams, f: &ZonalModeInput, x: &BallPoint) -> Result<f64> {
    let n = params.n;
    if f.dim() != n || x.dim() != n {
        return Err(Error::DimensionMismatch(n, x.dim().min(f.dim())));
    }
    check_pointwise_radius(x)?;
    let radial = mode_radial_integral(params.b, f)?;
    let zonal = ZonalEvaluator::new(n, f.m)?;
    Ok(gamma_k(n, params.c, f.m) * zonal.zonal(f.m, x.coords(), &f.anchor) * radial)
}

fn mode_radial_integral(b: f64, f: &ZonalModeInput) -> Result<f64> {
    let w = b + f.profile.u;
    match radial_moment(f.dim(), w, f.profile.v, f.m as f64 + f.profile.power)? {
        Integral::Finite(v) => Ok(v),
        Integral::Divergent => Err(Error::NonIntegrableWeight(w)),
    }
}

/// Full quadrature of `∫ R_c(x,y) (1-|y|^2)^w L(y)^{-v} h(|y|, ŷ·η) dν(y)`, where
/// `L = 1 + log(1/(1-|y|^2))`; the sphere is split by the polar angle about `x̂` and the
/// equatorial angle that locates `η`.
pub fn kernel_integral<H: Fn(f64, f64) -> f64>(
    params: OperatorParams,
    x: &BallPoint,
    anchor: &[f64],
    w: f64,
    v: f64,
    h: H,
    level: QuadLevel,
) -> Result<Integral> {
    let n = params.n;
    if x.dim() != n || anchor.len() != n {
        return Err(Error::DimensionMismatch(n, x.dim()));
    }
    let Some(nodes) = weighted_radial_nodes(n, w, v, 1.0 - x.norm(), level.per_panel)? else {
        return Ok(Integral::Divergent);
    };
    let pole = if x.norm() > 0.0 { x.direction() } else { axis(n)? };
    let a = dot(&pole, anchor).clamp(-1.0, 1.0);
    let bperp = ((1.0 - a) * (1.0 + a)).max(0.0).sqrt();
    let section = ZonalRule::section(n, level.section_points)?;
    let spec = kernel_for(n, params.c, x.norm())?;
    let mut total = 0.0;
    for node in &nodes {
        let inner = sphere_mean(&spec, x.norm(), node, level.per_panel, false, |k, cos| {
            let sin = (1.0 - cos * cos).max(0.0).sqrt();
            k * section.integrate(|phi| h(node.r, (a * cos + bperp * sin * phi.cos).clamp(-1.0, 1.0)))
        })?;
        total += node.weight * inner;
    }
    Ok(Integral::Finite(total))
}

/// `T_bc f(x)` for a single zonal mode by full quadrature on three refinement levels.
pub fn t_zonal_mode_quadrature(params: OperatorParams, f: &ZonalModeInput, x: &BallPoint) -> Result<f64> {
    check_pointwise_radius(x)?;
    let zonal = ZonalEvaluator::new(params.n, f.m)?;
    let w = params.b + f.profile.u;
    let mut levels = Vec::new();
    for level in QuadLevel::LADDER {
        let h = |r: f64, t: f64| r.powf(f.profile.power) * zonal.sphere_value(f.m, t);
        match kernel_integral(params, x, &f.anchor, w, f.profile.v, h, level)? {
            Integral::Finite(v) => levels.push(v),
            Integral::Divergent => return Err(Error::NonIntegrableWeight(w)),
        }
    }
    let fine = levels[2];
    let scale = levels.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
    if (fine - levels[1]).abs() > 1e-8 * scale {
        return Err(Error::NonConvergence(format!("T_bc mode quadrature levels {levels:?}")));
    }
    Ok(fine)
}

/// Projections of `x ↦ T_bc f(x)` on the sphere `|x| = radius` onto the modes `Z_k(·, η)`.
///
/// Returns `(k, ⟨T_bc f, Z_k(·,η)⟩ / ⟨Z_k, Z_k⟩)` so that the own mode reports the amplitude and
/// every other mode should vanish.
pub fn mode_leakage(
    params: OperatorParams,
    f: &ZonalModeInput,
    radius: f64,
    modes: &[usize],
) -> Result<Vec<(usize, f64)>> {
    let n = params.n;
    let k_top = modes.iter().copied().max().unwrap_or(0);
    let zonal = ZonalEvaluator::new(n, k_top)?;
    let rule = ZonalRule::new(n, 128)?;
    let samples: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .map(|a| {
            let mut coords: Vec<f64> = f.anchor.iter().map(|e| radius * a.cos * e).collect();
            let perp = perpendicular(&f.anchor);
            let sin = a.theta.sin();
            for (c, p) in coords.iter_mut().zip(&perp) {
                *c += radius * sin * p;
            }
            let x = BallPoint::new(coords)?;
            Ok((a.weight, t_zonal_mode_quadrature(params, f, &x)?))
        })
        .collect::<Result<_>>()?;
    Ok(modes
        .iter()
        .map(|&k| {
            let proj: f64 = samples
                .iter()
                .zip(&rule.nodes)
                .map(|((w, value), a)| w * value * zonal.sphere_value(k, a.cos))
                .sum();
            (k, proj / zonal.dim(k))
        })
        .collect())
}

fn perpendicular(e: &[f64]) -> Vec<f64> {
    let j = e
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if v.abs() < e[best].abs() { i } else { best });
    let mut p = vec![0.0; e.len()];
    p[j] = 1.0;
    let d = dot(&p, e);
    for (pi, ei) in p.iter_mut().zip(e) {
        *pi -= d * ei;
    }
    let norm = euclidean_norm(&p);
    p.iter().map(|v| v / norm).collect()
}

/// Two sides of the adjoint identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointReport {
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
}

/// `[T_bc f, g]_β` against `[f, (1-|x|^2)^{b-α} T_βc g]_α` for finite sums of zonal modes.
///
/// The pairings are `[φ, ψ]_γ = ∫_B φ ψ (1-|x|^2)^γ dν`, without normalising constants.
pub fn adjoint_check(
    params: OperatorParams,
    p: f64,
    q: f64,
    alpha: f64,
    beta: f64,
    f: &[ZonalModeInput],
    g: &[ZonalModeInput],
) -> Result<AdjointReport> {
    if !(p >= 1.0 && p.is_finite() && q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "adjoint check needs finite p, q ≥ 1, got p = {p}, q = {q}"
        )));
    }
    let n = params.n;
    let dual = OperatorParams { b: beta, ..params };
    let lhs = paired_modes(n, params, f, g, beta, 0.0)?;
    let rhs = paired_modes(n, dual, g, f, alpha, params.b - alpha)?;
    Ok(AdjointReport {
        lhs,
        rhs,
        deviation: (lhs - rhs).abs(),
    })
}

/// `∫ (T f)(x) g(x) (1-|x|^2)^{weight + extra} dν(x)` with `T f` from the mode formula.
fn paired_modes(
    n: usize,
    params: OperatorParams,
    f: &[ZonalModeInput],
    g: &[ZonalModeInput],
    weight: f64,
    extra: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for fi in f {
        let amplitude = gamma_k(n, params.c, fi.m) * mode_radial_integral(params.b, fi)?;
        for gj in g {
            let w = weight + extra + gj.profile.u;
            let radial = match radial_moment(n, w, gj.profile.v, (fi.m as f64) + gj.profile.power)? {
                Integral::Finite(v) => v,
                Integral::Divergent => return Err(Error::NonIntegrableWeight(w)),
            };
            total += amplitude * radial * sphere_pair_integral(n, fi.m, &fi.anchor, gj.m, &gj.anchor)?;
        }
    }
    Ok(total)
}

/// `∫_S Z_j(ζ, η1) Z_k(ζ, η2) dσ(ζ)` by polar and equatorial rules about `η1`.
pub fn sphere_pair_integral(n: usize, j: usize, eta1: &[f64], k: usize, eta2: &[f64]) -> Result<f64> {
    let zonal = ZonalEvaluator::new(n, j.max(k))?;
    let a = dot(eta1, eta2).clamp(-1.0, 1.0);
    let bperp = ((1.0 - a) * (1.0 + a)).max(0.0).sqrt();
    let polar = ZonalRule::new(n, 2 * (j + k) + 64)?;
    let section = ZonalRule::section(n, 2 * (j + k) + 48)?;
    Ok(polar.integrate(|t| {
        let sin = t.theta.sin();
        zonal.sphere_value(j, t.cos)
            * section.integrate(|phi| zonal.sphere_value(k, (a * t.cos + bperp * sin * phi.cos).clamp(-1.0, 1.0)))
    }))
}

/// Growth of a ball integral along a radius ladder, with the predicted branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub predicted_branch: Branch,
    pub predicted_exponent: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub fit: GrowthFit,
}

impl GrowthReport {
    /// Branch agrees, and in the power branch the exponent is within `tol`.
    pub fn agrees(&self, tol: f64) -> bool {
        self.fit.branch == self.predicted_branch
            && (self.predicted_branch != Branch::Power || (self.fit.exponent - self.predicted_exponent).abs() <= tol)
    }
}

fn check_ladder(radii: &[f64]) -> Result<()> {
    if radii.len() < 4 || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
        return Err(Error::InvalidParams(
            "radii must be increasing with at least four entries".into(),
        ));
    }
    let top = radii[radii.len() - 1];
    if top >= 1.0 - 1e-9 {
        return Err(Error::OutsideBall(top));
    }
    Ok(())
}

fn ladder_report(radii: &[f64], values: Vec<f64>, predicted: f64) -> GrowthReport {
    let u: Vec<f64> = radii.iter().map(|r| (1.0 - r) * (1.0 + r)).collect();
    GrowthReport {
        predicted_branch: Branch::from_exponent(predicted),
        predicted_exponent: predicted,
        radii: radii.to_vec(),
        fit: fit_growth(&u, &values, BRANCH_BAND),
        values,
    }
}

/// `∫_B |R_α(x,y)|^p (1-|y|^2)^d dν(y)` at `x = r e_1`.
pub fn kernel_power_integral(n: usize, alpha: f64, p: f64, d: f64, r: f64, per_panel: usize) -> Result<f64> {
    if !(d > -1.0) {
        return Err(Error::NonIntegrableWeight(d));
    }
    let spec = kernel_for(n, alpha, r)?;
    let grid = RadialGrid::graded(n, d, 1.0 - r, per_panel)?;
    let mut total = 0.0;
    for node in &grid.nodes {
        total += node.weight * sphere_mean(&spec, r, node, per_panel, true, |k, _| k.abs().powf(p))?;
    }
    Ok(total)
}

/// `∫_B (1-|y|^2)^d / [x,y]^{n+d+s} dν(y)` at `|x| = r`.
pub fn bracket_power_integral(n: usize, d: f64, s: f64, r: f64, per_panel: usize) -> Result<f64> {
    if !(d > -1.0) {
        return Err(Error::NonIntegrableWeight(d));
    }
    let e = n as f64 + d + s;
    let grid = RadialGrid::graded(n, d, 1.0 - r, per_panel)?;
    let mut total = 0.0;
    for node in &grid.nodes {
        let rho = r * node.r;
        let gap = 1.0 - r + r * node.gap();
        let rule = ZonalRule::peaked(n, gap, per_panel)?;
        total += node.weight * rule.integrate(|a| bracket_polar(rho, gap, a.one_minus_cos).powf(-e));
    }
    Ok(total)
}

/// Forelli-Rudin growth of `∫ |R_α(x,y)|^p (1-|y|^2)^d dν(y)`: branch of `w = p(n+α) - (n+d)`.
pub fn forelli_rudin_kernel_growth(n: usize, alpha: f64, p: f64, d: f64, radii: &[f64]) -> Result<GrowthReport> {
    check_ladder(radii)?;
    let values = radii
        .iter()
        .map(|&r| kernel_power_integral(n, alpha, p, d, r, QuadLevel::MEDIUM.per_panel))
        .collect::<Result<Vec<_>>>()?;
    Ok(ladder_report(radii, values, p * (n as f64 + alpha) - (n as f64 + d)))
}

/// Forelli-Rudin growth of `∫ (1-|y|^2)^d / [x,y]^{n+d+s} dν(y)`: branch of `s`.
pub fn forelli_rudin_bracket_growth(n: usize, d: f64, s: f64, radii: &[f64]) -> Result<GrowthReport> {
    check_ladder(radii)?;
    let values = radii
        .iter()
        .map(|&r| bracket_power_integral(n, d, s, r, QuadLevel::MEDIUM.per_panel))
        .collect::<Result<Vec<_>>>()?;
    Ok(ladder_report(radii, values, s))
}

/// Clearance of a sampled growth exponent from the logarithmic seam.
pub const FORELLI_SEAM_MARGIN: f64 = 0.5;

/// One Forelli-Rudin growth experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "integral", rename_all = "snake_case")]
pub enum ForelliDraw {
    Kernel { n: usize, alpha: f64, p: f64, d: f64 },
    Bracket { n: usize, d: f64, s: f64 },
}

impl ForelliDraw {
    /// A random kernel or bracket integral on `B ⊂ R^n` whose growth exponent lies in `branch`, at least
    /// [`FORELLI_SEAM_MARGIN`] away from zero unless it is exactly zero. Kernel weights stay in
    /// `[-3/4, 3]`; heavier weights approach the logarithmic branch too slowly for [`Self::ladder`].
    pub fn sample(kernel: bool, branch: Branch, n: usize, rng: &mut impl Rng) -> Self {
        loop {
            let target = match branch {
                Branch::Bounded => -rng.gen_range(FORELLI_SEAM_MARGIN..2.0),
                Branch::Logarithmic => 0.0,
                Branch::Power => rng.gen_range(FORELLI_SEAM_MARGIN..3.0),
            };
            if kernel {
                let alpha = rng.gen_range(-1.0..2.0);
                let p = rng.gen_range(1.0..2.5);
                let d = p * (n as f64 + alpha) - n as f64 - target;
                if (-0.75..=3.0).contains(&d) {
                    return ForelliDraw::Kernel { n, alpha, p, d };
                }
            } else {
                let d = rng.gen_range(-0.75..3.0);
                return ForelliDraw::Bracket { n, d, s: target };
            }
        }
    }

    pub fn predicted_exponent(&self) -> f64 {
        match *self {
            ForelliDraw::Kernel { n, alpha, p, d } => p * (n as f64 + alpha) - (n as f64 + d),
            ForelliDraw::Bracket { s, .. } => s,
        }
    }

    /// Geometric ladder from `r = 1/2`: eight rungs for kernel integrals, whose series
    /// lengthen as `|x| → 1`, and twelve for the closed-form bracket integrals.
    pub fn ladder(&self) -> Vec<f64> {
        let rungs = match self {
            ForelliDraw::Kernel { .. } => 8,
            ForelliDraw::Bracket { .. } => 12,
        };
        RadiusLadder::geometric(0.5, rungs).radii()
    }

    pub fn growth(&self, radii: &[f64]) -> Result<GrowthReport> {
        match *self {
            ForelliDraw::Kernel { n, alpha, p, d } => forelli_rudin_kernel_growth(n, alpha, p, d, radii),
            ForelliDraw::Bracket { n, d, s } => forelli_rudin_bracket_growth(n, d, s, radii),
        }
    }
}

/// `Q_s f(x) = T_ss f(x) / V_s` for a single zonal mode.
pub fn project(s: f64, f: &ZonalModeInput, x: &BallPoint) -> Result<f64> {
    if !(s > -1.0) {
        return Err(Error::NonIntegrableWeight(s));
    }
    let params = OperatorParams::new(f.dim(), s, s)?;
    Ok(apply_t_zonal_mode(params, f, x)? / v_alpha(f.dim(), s)?)
}

/// `T_bc (I_b^t h)(x)` by full quadrature against `V_{b+t} D_b^{c-b} h(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub quadrature: f64,
    pub coefficient: f64,
    pub deviation: f64,
}

pub fn composition_check(params: OperatorParams, t: f64, h: &Expansion, x: &BallPoint) -> Result<CompositionReport> {
    let OperatorParams { n, b, c } = params;
    if !(b + t > -1.0) {
        return Err(Error::NonIntegrableWeight(b + t));
    }
    let shifted = apply_d(b, t, h);
    let zonal = ZonalEvaluator::new(n, h.degree())?;
    let mut levels = Vec::new();
    for level in QuadLevel::LADDER {
        let integrand = |r: f64, cos: f64| zonal.series(&shifted.coeffs, r, cos);
        match kernel_integral(params, x, &h.anchor, b + t, 0.0, integrand, level)? {
            Integral::Finite(v) => levels.push(v),
            Integral::Divergent => return Err(Error::NonIntegrableWeight(b + t)),
        }
    }
    let quadrature = match settle(&levels, 1e-8, "composition")? {
        Integral::Finite(v) => v,
        Integral::Divergent => unreachable!(),
    };
    let coefficient = v_alpha(n, b + t)? * apply_d(b, c - b, h).eval(x.coords())?;
    Ok(CompositionReport {
        quadrature,
        coefficient,
        deviation: (quadrature - coefficient).abs(),
    })
}

/// `D_b^t T_bb f(x)` against `T_{b,b+t} f(x)` by full quadrature, for a single mode.
pub fn push_through_check(n: usize, b: f64, t: f64, f: &ZonalModeInput, x: &BallPoint) -> Result<CompositionReport> {
    let base = OperatorParams::new(n, b, b)?;
    let amplitude = gamma_k(n, b, f.m) * mode_radial_integral(b, f)?;
    let mut coeffs = vec![0.0; f.m + 1];
    coeffs[f.m] = amplitude;
    let image = Expansion::new(f.anchor.clone(), coeffs)?;
    let coefficient = apply_d(b, t, &image).eval(x.coords())?;
    let quadrature = t_zonal_mode_quadrature(OperatorParams { c: b + t, ..base }, f, x)?;
    Ok(CompositionReport {
        quadrature,
        coefficient,
        deviation: (quadrature - coefficient).abs(),
    })
}

/// `∫ |R_β(x,y)| (1-|y|^2)^β dν(y) / V_β` along the radii, compared with `1 + log(1/(1-|x|^2))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupProbe {
    pub n: usize,
    pub beta: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub ratio_min: f64,
    pub ratio_max: f64,
}

pub fn log_blowup_probe(n: usize, beta: f64, radii: &[f64]) -> Result<BlowupProbe> {
    if !(beta > -1.0) {
        return Err(Error::NonIntegrableWeight(beta));
    }
    if let Some(&bad) = radii
        .iter()
        .find(|r| !(0.0..=POINTWISE_RADIUS_MAX + 1e-15).contains(*r))
    {
        return Err(Error::OutsideBall(bad));
    }
    let v = v_alpha(n, beta)?;
    let values = radii
        .iter()
        .map(|&r| Ok(kernel_power_integral(n, beta, 1.0, beta, r, QuadLevel::MEDIUM.per_panel)? / v))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = radii
        .iter()
        .zip(&values)
        .map(|(r, v)| v / log_factor((1.0 - r) * (1.0 + r)))
        .collect();
    let ratio_min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio_max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(BlowupProbe {
        n,
        beta,
        radii: radii.to_vec(),
        values,
        ratios,
        ratio_min,
        ratio_max,
    })
}
