//! One-dimensional quadrature primitives shared by the radial and angular rules.

use std::f64::consts::{FRAC_PI_2, PI};

/// A node of a rule on `(0, 1)` carrying both `x` and `1 - x` to full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitNode {
    pub x: f64,
    pub complement: f64,
    pub weight: f64,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration on `P_m`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        dp = if d.is_finite() { d } else { dp };
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to `(0, 1)`, with complements computed from the symmetric node.
pub fn gauss_legendre_unit(m: usize) -> Vec<UnitNode> {
    let (z, w) = gauss_legendre(m);
    (0..m)
        .map(|i| UnitNode {
            x: 0.5 * (1.0 + z[i]),
            complement: 0.5 * (1.0 - z[i]),
            weight: 0.5 * w[i],
        })
        .collect()
}

const TANH_SINH_HALF_WIDTH: f64 = 4.0;

/// Tanh-sinh rule on `(0, 1)` with `2 * half + 1` nodes.
///
/// The substitution `x = (1 + tanh(π/2 · sinh t)) / 2` clusters nodes doubly exponentially
/// at both endpoints, so integrands with algebraic or logarithmic endpoint singularities
/// converge at the same rate as smooth ones. Nodes never coincide with an endpoint.
pub fn tanh_sinh_unit(half: usize) -> Vec<UnitNode> {
    assert!(half >= 1, "tanh-sinh rule needs at least one step");
    let h = TANH_SINH_HALF_WIDTH / half as f64;
    let mut out = Vec::with_capacity(2 * half + 1);
    for k in -(half as i64)..=(half as i64) {
        let t = k as f64 * h;
        let s = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * s.abs()).exp();
        let small = e / (1.0 + e);
        let large = 1.0 / (1.0 + e);
        let (x, complement) = if s >= 0.0 { (large, small) } else { (small, large) };
        let weight = h * 2.0 * x * complement * FRAC_PI_2 * t.cosh();
        if weight > 0.0 && x > 0.0 && complement > 0.0 {
            out.push(UnitNode { x, complement, weight });
        }
    }
    out
}

/// Composite Gauss-Legendre rule on `[a, b]` split at the given interior breakpoints.
pub fn composite_gauss(breaks: &[f64], per_panel: usize) -> Vec<(f64, f64)> {
    let base = gauss_legendre_unit(per_panel);
    let mut out = Vec::with_capacity(base.len() * breaks.len().saturating_sub(1));
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let len = b - a;
        for node in &base {
            out.push((a + len * node.x, len * node.weight));
        }
    }
    out
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
