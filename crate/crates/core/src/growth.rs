//! Boundary-growth estimation along geometric radius ladders.
//!
//! Quantities of the form `v(x) ≈ C (1-|x|^2)^{-w}`, `C log(1/(1-|x|^2))` or
//! `C + D (1-|x|^2)^{s}` are classified from their values on a ladder approaching the sphere.

use serde::{Deserialize, Serialize};

/// Radii `r_j = 1 - (1 - r_0) 2^{-j}`, stored through their gaps `1 - r_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusLadder {
    gaps: Vec<f64>,
}

impl RadiusLadder {
    pub fn geometric(r0: f64, rungs: usize) -> Self {
        let g0 = 1.0 - r0;
        Self {
            gaps: (0..rungs).map(|j| g0 * 0.5f64.powi(j as i32)).collect(),
        }
    }

    pub fn from_radii(radii: &[f64]) -> Self {
        Self {
            gaps: radii.iter().map(|r| 1.0 - r).collect(),
        }
    }

    /// The last `count` rungs.
    pub fn tail(&self, count: usize) -> Self {
        let start = self.gaps.len().saturating_sub(count);
        Self {
            gaps: self.gaps[start..].to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn radii(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| 1.0 - g).collect()
    }

    /// `u_j = 1 - r_j^2 = g_j (2 - g_j)`.
    pub fn defects(&self) -> Vec<f64> {
        self.gaps.iter().map(|g| g * (2.0 - g)).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.gaps.iter().fold(1.0f64, |m, g| m.min(*g)).mul_add(-1.0, 1.0)
    }
}

/// The boundary behaviour of a weighted integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Bounded,
    Logarithmic,
    Power,
}

impl Branch {
    /// The branch predicted by the sign of a growth exponent.
    pub fn from_exponent(w: f64) -> Self {
        if w < 0.0 {
            Branch::Bounded
        } else if w == 0.0 {
            Branch::Logarithmic
        } else {
            Branch::Power
        }
    }
}

/// Default half-width of the logarithmic band for fitted exponents.
pub const BRANCH_BAND: f64 = 0.15;

/// Result of a growth fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub branch: Branch,
    /// Extrapolated exponent `ŵ`: `-s` for `C + D u^s`, `0` for logarithmic, `w` for `u^{-w}`.
    pub exponent: f64,
    pub local_exponents: Vec<f64>,
    /// Range of `v / (1 + log(1/u))` over the ladder.
    pub log_ratio_min: f64,
    pub log_ratio_max: f64,
}

/// Differences below this fraction of the value are treated as a settled limit.
pub const SETTLED_REL: f64 = 1e-10;

/// Richardson-extrapolated exponent of successive differences of `v` against `u`.
///
/// Local exponents `λ_j = log(D_{j+1}/D_j) / log(u_j/u_{j+1})` of the differences
/// `D_j = v_{j+1} - v_j` approach the growth exponent with an `O(u)` bias; the last two are
/// combined linearly in `u` to cancel it. Non-monotone or negligible differences (a settled
/// limit blurred by round-off) are reported as strongly negative.
pub fn difference_exponents(u: &[f64], v: &[f64]) -> (Vec<f64>, f64) {
    assert_eq!(u.len(), v.len());
    assert!(u.len() >= 4, "growth fit needs at least four rungs");
    let d: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let local: Vec<f64> = (0..d.len() - 1)
        .map(|j| {
            let ratio = d[j + 1] / d[j];
            if d[j + 1].abs() <= SETTLED_REL * v[j + 2].abs() {
                f64::NEG_INFINITY
            } else if ratio > 0.0 {
                ratio.ln() / (u[j] / u[j + 1]).ln()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    let m = local.len();
    let (prev, last) = (local[m - 2], local[m - 1]);
    let (ua, ub) = (u[m - 1], u[m]);
    let exponent = if prev.is_finite() && last.is_finite() {
        (ua * last - ub * prev) / (ua - ub)
    } else {
        last.min(prev)
    };
    (local, exponent)
}

/// Richardson-extrapolated slope of `log v` against `log(1/u)`.
pub fn log_slope_exponents(u: &[f64], v: &[f64]) -> (Vec<f64>, f64) {
    assert_eq!(u.len(), v.len());
    assert!(u.len() >= 3, "slope fit needs at least three rungs");
    let local: Vec<f64> = v
        .windows(2)
        .zip(u.windows(2))
        .map(|(w, uu)| (w[1] / w[0]).ln() / (uu[0] / uu[1]).ln())
        .collect();
    let m = local.len();
    let (prev, last) = (local[m - 2], local[m - 1]);
    let (ua, ub) = (u[m - 2], u[m - 1]);
    let exponent = (ua * last - ub * prev) / (ua - ub);
    (local, exponent)
}

fn log_ratio_range(u: &[f64], v: &[f64]) -> (f64, f64) {
    let ratios = u.iter().zip(v).map(|(u, v)| v / (1.0 + (1.0 / u).ln()));
    ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
}

/// Fit and classify the growth of `v` along defects `u` (decreasing toward `0`).
pub fn fit_growth(u: &[f64], v: &[f64], band: f64) -> GrowthFit {
    let (local_exponents, exponent) = difference_exponents(u, v);
    let branch = if exponent > band {
        Branch::Power
    } else if exponent >= -band {
        Branch::Logarithmic
    } else {
        Branch::Bounded
    };
    let (log_ratio_min, log_ratio_max) = log_ratio_range(u, v);
    GrowthFit {
        branch,
        exponent,
        local_exponents,
        log_ratio_min,
        log_ratio_max,
    }
}

/// How a supremum along a ladder was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stabilization {
    /// The running supremum stopped moving.
    Plateau,
    /// Increments contract geometrically and the Aitken limits agree.
    Extrapolated,
    /// Increments contract, the implied geometric tails `|ΔJ| q/(1-q)` shrink by the same
    /// factor, and the last tail is smaller than the running supremum.
    GeometricTail,
    /// Neither criterion met.
    Unstable,
}

/// Certificate that a sequence along a ladder has a finite supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupCertificate {
    pub observed_sup: f64,
    pub extrapolated_sup: f64,
    pub mode: Stabilization,
    pub contraction: Vec<f64>,
}

impl SupCertificate {
    pub fn stabilized(&self) -> bool {
        self.mode != Stabilization::Unstable
    }
}

/// Largest admissible increment ratio for the extrapolated criterion.
pub const MAX_CONTRACTION: f64 = 0.985;

/// Aitken's delta-squared transform; a vanishing second difference passes the last term through.
fn aitken(values: &[f64]) -> Vec<f64> {
    values
        .windows(3)
        .map(|w| {
            let (d0, d1) = (w[1] - w[0], w[2] - w[1]);
            let dd = d1 - d0;
            if dd == 0.0 {
                w[2]
            } else {
                w[2] - d1 * d1 / dd
            }
        })
        .collect()
}

/// Certify `sup_k J_k < ∞` from the last `window` rungs with relative tolerance `rel_tol`.
///
/// The running supremum is accepted when its last `window` increments are below
/// `rel_tol` times its value. Otherwise the raw increments must contract with ratio below
/// [`MAX_CONTRACTION`], and the twice-iterated Aitken limits of the last
/// `window` steps must agree within `rel_tol` of the supremum; failing that, contracting increments
/// whose implied tails `|ΔJ_k| q_k/(1-q_k)` themselves contract certify `sup + tail`.
pub fn certify_sup(values: &[f64], rel_tol: f64, window: usize) -> SupCertificate {
    let m = values.len();
    assert!(m >= window + 3, "ladder too short for sup certification");
    let mut running = Vec::with_capacity(m);
    let mut sup = f64::NEG_INFINITY;
    for v in values {
        sup = sup.max(*v);
        running.push(sup);
    }
    let plateau = (m - window..m).all(|k| running[k] - running[k - 1] <= rel_tol * running[k].abs());

    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let q: Vec<f64> = d.windows(2).map(|w| w[1] / w[0]).collect();
    let once = aitken(values);
    let twice = aitken(&once);
    let limits = if twice.len() >= window && twice[twice.len() - window..].iter().all(|l| l.is_finite()) {
        twice
    } else {
        once
    };
    let lq = q.len();
    let ll = limits.len();
    let scale = limits[ll - window..]
        .iter()
        .fold(running[m - 1].abs(), |a, l| a.max(l.abs()));
    let contracting = q[lq - window..]
        .iter()
        .all(|qj| qj.abs() < MAX_CONTRACTION && qj.is_finite());
    let settled = limits[ll - window..]
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() <= rel_tol * scale);
    let tails: Vec<f64> = (lq - window..lq)
        .map(|j| (d[j + 1] * q[j] / (1.0 - q[j])).abs())
        .collect();
    let tail = tails[window - 1];
    let shrinking = tails.windows(2).all(|w| w[1] <= MAX_CONTRACTION * w[0]);
    let geometric = contracting && shrinking && tail <= running[m - 1].abs();
    let (mode, extrapolated_sup) = if plateau {
        (Stabilization::Plateau, running[m - 1])
    } else if contracting && settled {
        (Stabilization::Extrapolated, running[m - 1].max(limits[ll - 1]))
    } else if geometric {
        (Stabilization::GeometricTail, running[m - 1] + tail)
    } else {
        (Stabilization::Unstable, running[m - 1])
    };
    SupCertificate {
        observed_sup: running[m - 1],
        extrapolated_sup,
        mode,
        contraction: q,
    }
}
