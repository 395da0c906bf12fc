//! Sufficiency machinery: Schur-test certificates and single-function (`J`) routes.
//!
//! A certificate fixes the free choices of the Schur test (the test-function exponents `A`,
//! `B`, the splitting `γ + δ = 1` and the slack `ε`), re-derives every inequality the test
//! needs in the arithmetic of the inputs, and can then be confirmed numerically by fitting
//! the growth of the two (or three) weighted bracket integrals along a radius ladder.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::classifier::{classify, critical_c, Arithmetic, Case, Condition, Exponent, Params, Real};
use crate::error::{Error, Result};
use crate::growth::{certify_sup, Branch, GrowthFit, RadiusLadder, SupCertificate};
use crate::integral_ops::{bracket_power_integral, forelli_rudin_bracket_growth, GrowthReport, QuadLevel};
use crate::kernel::DominatingKernel;
use crate::quadrature::{composite_gauss, Compensated};
use crate::special::gamma_sequence;
use crate::zonal::dim_harmonics_sequence;

/// Rungs of the geometric ladder `1 - r = 2^{-j-1}` used by every verification.
pub const SCHUR_RUNGS: usize = 16;
/// Tolerance on fitted power-branch exponents.
pub const FIT_TOL: f64 = 0.1;
/// Relative tolerance of sup certification.
pub const SUP_REL_TOL: f64 = 1e-3;
/// Number of trailing rungs the sup certification looks at.
pub const SUP_WINDOW: usize = 3;
const OUTER_NODES: usize = 10;
const CORNER_DEPTH: i32 = 50;

/// Radii of the verification ladder.
pub fn verification_radii() -> Vec<f64> {
    RadiusLadder::geometric(0.5, SCHUR_RUNGS).radii()
}

fn finite_exponent<R: Real>(e: &Exponent<R>, name: &str) -> Result<R> {
    match e {
        Exponent::Finite(v) => Ok(v.clone()),
        Exponent::Infinity => Err(Error::OutsideRegion(format!("{name} must be finite on this route"))),
    }
}

fn min_of<R: Real>(a: R, b: R) -> R {
    if a <= b {
        a
    } else {
        b
    }
}

fn check(description: &str, holds: bool) -> Condition {
    Condition {
        description: description.to_string(),
        holds,
    }
}

fn require_region<R: Real>(params: &Params<R>, case: Case) -> Result<()> {
    let verdict = classify(params)?;
    if verdict.theorem != case {
        return Err(Error::OutsideRegion(format!(
            "tuple belongs to case {}, not {case}",
            verdict.theorem
        )));
    }
    if !verdict.bounded {
        let failed: Vec<&str> = verdict
            .conditions
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.description.as_str())
            .collect();
        let reason = if verdict.prerequisite_ok {
            failed.join("; ")
        } else {
            "beta prerequisite fails".to_string()
        };
        return Err(Error::OutsideRegion(format!("case {case} conditions fail: {reason}")));
    }
    Ok(())
}

/// Explicit Schur-test data for the two `1 < p, q < ∞` routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurCertificate {
    pub route: Case,
    pub n: usize,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    /// Exponent of `φ(x) = (1-|x|^2)^A`.
    #[serde(rename = "A")]
    pub a_exp: f64,
    /// Exponent of `ψ(y) = (1-|y|^2)^B`.
    #[serde(rename = "B")]
    pub b_exp: f64,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: f64,
    pub c_effective: f64,
    pub checks: Vec<Condition>,
    pub arithmetic: Arithmetic,
}

impl SchurCertificate {
    /// Every attached check holds.
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn p_conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn q_conjugate(&self) -> f64 {
        self.q / (self.q - 1.0)
    }
}

/// Certificate for `1 < p ≤ q < ∞` at the largest admissible `c`.
///
/// `B` is the midpoint of `(-(1+β)/q, 0)` and `ε` half of `min(b + 1 - (α+1)/p, n - 1)`.
pub fn build_certificate_11<R: Real>(params: &Params<R>) -> Result<SchurCertificate> {
    require_region(params, Case::PLeQ)?;
    let int = R::from_int;
    let (one, two, zero) = (int(1), int(2), int(0));
    let n = int(params.n as i64);
    let (b, alpha, beta) = (params.b.clone(), params.alpha.clone(), params.beta.clone());
    let p = finite_exponent(&params.p, "p")?;
    let q = finite_exponent(&params.q, "q")?;
    let pc = p.clone() / (p.clone() - one.clone());
    let c = b.clone() + (n.clone() + beta.clone()) / q.clone() - (n.clone() + alpha.clone()) / p.clone();
    let nc = n.clone() + c.clone();
    let bb = -(one.clone() + beta.clone()) / (two.clone() * q.clone());
    let first = b.clone() + one.clone() - (alpha.clone() + one.clone()) / p.clone();
    let eps = min_of(first.clone(), n.clone() - one.clone()) / two;
    let delta = (bb.clone() + (n.clone() + beta.clone()) / q.clone() + eps.clone()) / nc.clone();
    let gamma =
        (-bb.clone() + n.clone() + b.clone() - (n.clone() + alpha.clone()) / p.clone() - eps.clone()) / nc.clone();
    let ba = b.clone() - alpha.clone();
    let a = ba.clone() * delta.clone() - eps.clone();

    let f1 = ba.clone() * gamma.clone() * pc.clone() + a.clone() * pc.clone() + alpha.clone();
    let f2 = nc.clone() * gamma.clone() * pc.clone()
        - n.clone()
        - ba.clone() * gamma.clone() * pc.clone()
        - a.clone() * pc.clone()
        - alpha.clone();
    let second = bb.clone() * q.clone() + beta.clone();
    let fourth = nc.clone() * delta.clone() * q.clone() - n.clone() - bb.clone() * q.clone() - beta.clone();

    let checks = vec![
        check("gamma + delta = 1", (gamma.clone() + delta.clone()).agrees(&one)),
        check("n + c > 0", nc > zero),
        check(
            "-(1 + beta)/q < B < 0",
            -(one.clone() + beta.clone()) / q.clone() < bb && bb < zero,
        ),
        check("0 < epsilon < b + 1 - (alpha + 1)/p", zero < eps && eps < first),
        check(
            "F1 = (b - alpha) gamma p' + A p' + alpha > -1",
            f1.clone() > -one.clone(),
        ),
        check("B q + beta > -1", second > -one.clone()),
        check(
            "F2 = (n + c) gamma p' - n - (b - alpha) gamma p' - A p' - alpha > 0",
            f2 > zero,
        ),
        check("(n + c) delta q - n - B q - beta > 0", fourth.clone() > zero),
        check("-B p' = F2", (-bb.clone() * pc.clone()).agrees(&f2)),
        check(
            "-A q = (n + c) delta q - n - B q - beta - (b - alpha) delta q",
            (-a.clone() * q.clone()).agrees(&(fourth - ba.clone() * delta.clone() * q.clone())),
        ),
        check(
            "F1 + 1 = p' (b + 1 - (alpha + 1)/p - epsilon)",
            (f1 + one).agrees(&(pc * (first - eps.clone()))),
        ),
    ];
    Ok(SchurCertificate {
        route: Case::PLeQ,
        n: params.n,
        b: b.to_f64(),
        alpha: alpha.to_f64(),
        beta: beta.to_f64(),
        p: p.to_f64(),
        q: q.to_f64(),
        a_exp: a.to_f64(),
        b_exp: bb.to_f64(),
        gamma: Some(gamma.to_f64()),
        delta: Some(delta.to_f64()),
        epsilon: eps.to_f64(),
        c_effective: c.to_f64(),
        checks,
        arithmetic: R::ARITHMETIC,
    })
}

/// Certificate for `1 < q < p < ∞` at `c = b + (1+β)/q - (1+α)/p - ε`.
///
/// `ε` is half of `min(n - 1, (1/q - 1/p)(1+β), p/(p-1) (1/q - 1/p)(b + 1 - (1+α)/p))`.
pub fn build_certificate_13<R: Real>(params: &Params<R>) -> Result<SchurCertificate> {
    require_region(params, Case::QLtP)?;
    let int = R::from_int;
    let (one, two, zero) = (int(1), int(2), int(0));
    let n = int(params.n as i64);
    let (b, alpha, beta) = (params.b.clone(), params.alpha.clone(), params.beta.clone());
    let p = finite_exponent(&params.p, "p")?;
    let q = finite_exponent(&params.q, "q")?;
    if !(q > one) {
        return Err(Error::OutsideRegion("q = 1 is handled by the J route".into()));
    }
    let pc = p.clone() / (p.clone() - one.clone());
    let qc = q.clone() / (q.clone() - one.clone());
    let gap = one.clone() / q.clone() - one.clone() / p.clone();
    let first = b.clone() + one.clone() - (one.clone() + alpha.clone()) / p.clone();
    let bound = min_of(
        min_of(n.clone() - one.clone(), gap.clone() * (one.clone() + beta.clone())),
        pc.clone() * gap.clone() * first.clone(),
    );
    let eps = bound.clone() / two;
    let c =
        b.clone() + (one.clone() + beta.clone()) / q.clone() - (one.clone() + alpha.clone()) / p.clone() - eps.clone();
    let pq = p.clone() - q.clone();
    let a = (p.clone() - one.clone()) / p.clone()
        * (-(one.clone() + alpha.clone()) / p.clone() + eps.clone() * q.clone() / pq.clone());
    let bb = (q.clone() - one.clone()) / q.clone()
        * (-(one.clone() + beta.clone()) / q.clone() + eps.clone() * p.clone() / pq.clone());

    let cb = c.clone() - b.clone();
    let eq1_lhs =
        p.clone() * (q.clone() - one.clone()) * a.clone() - q.clone() * (p.clone() - one.clone()) * bb.clone();
    let eq1_rhs = cb.clone() * (p.clone() - one.clone()) * (q.clone() - one.clone());
    let eq2_lhs = -p.clone() * a.clone() + q.clone() * bb.clone();
    let eq2_rhs = cb.clone() + alpha.clone() - beta.clone();
    let general_a = (p.clone() - one.clone()) * (q.clone() * cb.clone() + alpha.clone() - beta.clone())
        / (p.clone() * (q.clone() - p.clone()));
    let general_b = (q.clone() - one.clone()) * (p.clone() * cb.clone() + alpha.clone() - beta.clone())
        / (q.clone() * (q.clone() - p.clone()));
    let x_weight = b.clone() + a.clone() * pc.clone();
    let y_weight = bb.clone() * q.clone() + beta.clone();
    let double = y_weight.clone() - (c.clone() - x_weight.clone());
    let double_expected = -one.clone() + eps.clone() * p.clone() * q.clone() / pq.clone();

    let checks = vec![
        check(
            "0 < epsilon < min(n - 1, (1/q - 1/p)(1 + beta), p'(1/q - 1/p)(b + 1 - (1 + alpha)/p))",
            zero < eps && eps < bound,
        ),
        check("n + c > 0", n.clone() + c.clone() > zero),
        check(
            "p(q - 1) A - q(p - 1) B = (c - b)(p - 1)(q - 1)",
            eq1_lhs.agrees(&eq1_rhs),
        ),
        check("-p A + q B = c - b + alpha - beta", eq2_lhs.agrees(&eq2_rhs)),
        check(
            "A, B agree with the general solution of the linear system",
            a.agrees(&general_a) && bb.agrees(&general_b),
        ),
        check(
            "-B q' = c - (b + A p')",
            (-bb.clone() * qc).agrees(&(c.clone() - x_weight.clone())),
        ),
        check(
            "-A p = c - (B q + beta) - (b - alpha)",
            (-a.clone() * p.clone()).agrees(&(c.clone() - y_weight.clone() - (b.clone() - alpha.clone()))),
        ),
        check("b + A p' > -1", x_weight.clone() > -one.clone()),
        check("B q + beta > -1", y_weight.clone() > -one.clone()),
        check("c - (b + A p') > 0", c.clone() - x_weight > zero),
        check("c - (B q + beta) > 0", c.clone() - y_weight > zero),
        check(
            "double-integral exponent B q + beta - c + b + A p' = -1 + epsilon p q/(p - q)",
            double.agrees(&double_expected),
        ),
        check("double-integral exponent > -1", double > -one),
    ];
    Ok(SchurCertificate {
        route: Case::QLtP,
        n: params.n,
        b: b.to_f64(),
        alpha: alpha.to_f64(),
        beta: beta.to_f64(),
        p: p.to_f64(),
        q: q.to_f64(),
        a_exp: a.to_f64(),
        b_exp: bb.to_f64(),
        gamma: None,
        delta: None,
        epsilon: eps.to_f64(),
        c_effective: c.to_f64(),
        checks,
        arithmetic: R::ARITHMETIC,
    })
}

/// One numerically confirmed Schur inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurBound {
    pub label: String,
    /// Weight exponent of the bracket integral.
    pub d: f64,
    /// Growth exponent the bracket integral should show.
    pub s: f64,
    pub growth: GrowthReport,
    /// Left side over right side along the ladder (or partial integrals for the double integral).
    pub ratios: Vec<f64>,
    pub sup: SupCertificate,
    /// Fitted constant: the certified supremum.
    pub constant: f64,
    pub passed: bool,
}

/// Numerical confirmation of a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurVerification {
    pub route: Case,
    pub c_effective: f64,
    pub bounds: Vec<SchurBound>,
    pub passed: bool,
}

fn defect(r: f64) -> f64 {
    (1.0 - r) * (1.0 + r)
}

fn single_bound(label: &str, n: usize, d: f64, s: f64, shift: f64, radii: &[f64]) -> Result<SchurBound> {
    let growth = forelli_rudin_bracket_growth(n, d, s, radii)?;
    let ratios: Vec<f64> = growth
        .values
        .iter()
        .zip(radii)
        .map(|(v, &r)| v * defect(r).powf(shift))
        .collect();
    let sup = certify_sup(&ratios, SUP_REL_TOL, SUP_WINDOW);
    let passed = growth.agrees(FIT_TOL) && sup.stabilized();
    Ok(SchurBound {
        label: label.to_string(),
        d,
        s,
        constant: sup.extrapolated_sup,
        ratios,
        sup,
        growth,
        passed,
    })
}

/// `∫_{|x| < r_k} g(|x|) dν(x)` for every ladder radius, by Gauss panels between rungs.
fn partial_ball_integrals(n: usize, radii: &[f64], g: impl Fn(f64) -> Result<f64>) -> Result<Vec<f64>> {
    let mut breaks = Vec::with_capacity(radii.len() + 1);
    breaks.push(0.0);
    breaks.extend_from_slice(radii);
    let mut acc = Compensated::new();
    let mut out = Vec::with_capacity(radii.len());
    for pair in breaks.windows(2) {
        for (r, w) in composite_gauss(pair, OUTER_NODES) {
            acc.add(w * n as f64 * r.powi(n as i32 - 1) * g(r)?);
        }
        out.push(acc.value());
    }
    Ok(out)
}

/// Confirm the two Schur inequalities of a `1 < p ≤ q < ∞` certificate along the ladder.
pub fn verify_certificate_11(cert: &SchurCertificate) -> Result<SchurVerification> {
    let (gamma, delta) = match (cert.route, cert.gamma, cert.delta) {
        (Case::PLeQ, Some(g), Some(d)) => (g, d),
        _ => return Err(Error::InvalidParams("not a certificate of the p <= q route".into())),
    };
    let n = cert.n as f64;
    let nc = n + cert.c_effective;
    let (pc, q) = (cert.p_conjugate(), cert.q);
    let ba = cert.b - cert.alpha;
    let (a, bb) = (cert.a_exp, cert.b_exp);
    let radii = verification_radii();
    let f1 = ba * gamma * pc + a * pc + cert.alpha;
    let s1 = nc * gamma * pc - n - f1;
    let x_bound = single_bound("x-integral", cert.n, f1, s1, -bb * pc, &radii)?;
    let d2 = bb * q + cert.beta;
    let s2 = nc * delta * q - n - d2;
    let y_bound = single_bound("y-integral", cert.n, d2, s2, ba * delta * q - a * q, &radii)?;
    let bounds = vec![x_bound, y_bound];
    Ok(SchurVerification {
        route: Case::PLeQ,
        c_effective: cert.c_effective,
        passed: bounds.iter().all(|b| b.passed),
        bounds,
    })
}

/// Confirm the two single and the double Schur integrals of a `1 < q < p < ∞` certificate.
pub fn verify_certificate_13(cert: &SchurCertificate) -> Result<SchurVerification> {
    if cert.route != Case::QLtP {
        return Err(Error::InvalidParams("not a certificate of the q < p route".into()));
    }
    let c = cert.c_effective;
    let (p, q) = (cert.p, cert.q);
    let (pc, qc) = (cert.p_conjugate(), cert.q_conjugate());
    let (a, bb) = (cert.a_exp, cert.b_exp);
    let radii = verification_radii();
    let dx = cert.b + a * pc;
    let x_bound = single_bound("x-integral", cert.n, dx, c - dx, -bb * qc, &radii)?;
    let dy = bb * q + cert.beta;
    let y_bound = single_bound("y-integral", cert.n, dy, c - dy, cert.b - cert.alpha - a * p, &radii)?;

    let per_panel = QuadLevel::MEDIUM.per_panel;
    let partial = partial_ball_integrals(cert.n, &radii, |r| {
        Ok(defect(r).powf(dy) * bracket_power_integral(cert.n, dx, c - dx, r, per_panel)?)
    })?;
    let sup = certify_sup(&partial, SUP_REL_TOL, SUP_WINDOW);
    let inner = x_bound.growth.clone();
    let outer_exponent = dy - inner.fit.exponent.max(0.0);
    let passed = inner.agrees(FIT_TOL) && sup.stabilized() && outer_exponent > -1.0;
    let double = SchurBound {
        label: "double integral".into(),
        d: dx,
        s: c - dx,
        growth: inner,
        constant: sup.extrapolated_sup,
        ratios: partial,
        sup,
        passed,
    };
    let bounds = vec![x_bound, y_bound, double];
    Ok(SchurVerification {
        route: Case::QLtP,
        c_effective: c,
        passed: bounds.iter().all(|b| b.passed),
        bounds,
    })
}

/// Cases whose sufficiency goes through a single function `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub enum JRoute {
    #[serde(rename = "1.2")]
    POneQFinite,
    #[serde(rename = "1.3q1")]
    QOne,
    #[serde(rename = "1.4")]
    PFiniteQInf,
    #[serde(rename = "1.5")]
    POneQInf,
    #[serde(rename = "1.6")]
    PInfQFinite,
    #[serde(rename = "1.7")]
    BothInf,
}

impl JRoute {
    pub const ALL: [JRoute; 6] = [
        JRoute::POneQFinite,
        JRoute::QOne,
        JRoute::PFiniteQInf,
        JRoute::POneQInf,
        JRoute::PInfQFinite,
        JRoute::BothInf,
    ];

    pub fn label(self) -> &'static str {
        match self {
            JRoute::POneQFinite => "1.2",
            JRoute::QOne => "1.3q1",
            JRoute::PFiniteQInf => "1.4",
            JRoute::POneQInf => "1.5",
            JRoute::PInfQFinite => "1.6",
            JRoute::BothInf => "1.7",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        JRoute::ALL
            .into_iter()
            .find(|r| r.label() == label.trim())
            .ok_or_else(|| Error::Parse(format!("unknown J route {label:?}")))
    }

    pub fn case(self) -> Case {
        match self {
            JRoute::POneQFinite => Case::POneQFinite,
            JRoute::QOne => Case::QLtP,
            JRoute::PFiniteQInf => Case::PFiniteQInf,
            JRoute::POneQInf => Case::POneQInf,
            JRoute::PInfQFinite => Case::PInfQFinite,
            JRoute::BothInf => Case::BothInf,
        }
    }
}

impl fmt::Display for JRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for JRoute {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Shape of a route's `J`: `J(x) = (1-|x|^2)^e I(x)^pow` with the bracket integral
/// `I(x) = ∫ (1-|y|^2)^d / [x,y]^{n+d+s} dν(y)`, either pointwise or integrated over the ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JProfile {
    /// The quantity whose sign selects the branch of `I`.
    pub variable: f64,
    pub d: f64,
    pub s: f64,
    pub e: f64,
    pub pow: f64,
    pub integrated: bool,
    pub c_used: f64,
}

/// How the `p = 1, q = ∞` route bounds `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CornerMode {
    /// `α = b`, `β = 0`, `c < -n`: `sup |R_c| ≤ Σ |γ_k(c)| dim H_k`.
    BoundedKernel,
    /// `J(x) = sup_y (1-|y|^2)^β (1-|x|^2)^{b-α} 𝓡_c(x,y)`, the supremum over a deep
    /// radial ladder of `y` aligned with `x`.
    Bracket,
}

fn lift_c<R: Real>(params: &Params<R>) -> Result<R> {
    let minus_n = -R::from_int(params.n as i64);
    if params.c > minus_n {
        return Ok(params.c.clone());
    }
    let (critical, _) = critical_c(params)?;
    if !(critical > minus_n) {
        return Err(Error::OutsideRegion("no admissible c above -n".into()));
    }
    Ok((critical + minus_n) / R::from_int(2))
}

/// Profile of `J` for a route; `c` is lifted above `-n` when needed, which keeps the tuple
/// in the region because the region is a half-line in `c`.
pub fn j_profile<R: Real>(route: JRoute, params: &Params<R>) -> Result<JProfile> {
    if route == JRoute::POneQInf {
        return Err(Error::InvalidParams(
            "the p = 1, q = inf route has no single bracket profile".into(),
        ));
    }
    let int = R::from_int;
    let one = int(1);
    let n = int(params.n as i64);
    let c = lift_c(params)?;
    let (b, alpha, beta) = (params.b.clone(), params.alpha.clone(), params.beta.clone());
    let ba = b.clone() - alpha.clone();
    let (variable, d, s, e, pow, integrated) = match route {
        JRoute::POneQFinite => {
            let q = finite_exponent(&params.q, "q")?;
            let s = (n.clone() + c.clone()) * q.clone() - n - beta.clone();
            (s.clone(), beta, s, ba, one / q, false)
        }
        JRoute::QOne => {
            let p = finite_exponent(&params.p, "p")?;
            let pc = p.clone() / (p.clone() - one.clone());
            let s = c - beta.clone();
            (s.clone(), beta, s, (b - alpha / p) * pc.clone(), pc, true)
        }
        JRoute::PFiniteQInf => {
            let p = finite_exponent(&params.p, "p")?;
            let pc = p.clone() / (p.clone() - one.clone());
            let d = ba.clone() * pc.clone() + alpha.clone();
            let s = pc.clone() * (c - b + (n + alpha) / p);
            (s.clone(), d, s, beta, one / pc, false)
        }
        JRoute::PInfQFinite => {
            let q = finite_exponent(&params.q, "q")?;
            if q == one {
                let s = c - beta.clone();
                (s.clone(), beta, s, ba, one, true)
            } else {
                let s = c - b + alpha;
                (s.clone(), ba, s, beta, q, true)
            }
        }
        JRoute::BothInf => {
            let s = c - b + alpha;
            (s.clone(), ba, s, beta, one, false)
        }
        JRoute::POneQInf => unreachable!(),
    };
    Ok(JProfile {
        variable: variable.to_f64(),
        d: d.to_f64(),
        s: s.to_f64(),
        e: e.to_f64(),
        pow: pow.to_f64(),
        integrated,
        c_used: lift_c(params)?.to_f64(),
    })
}

/// Outcome of a `J` route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JFunctionReport {
    pub route: JRoute,
    pub c_used: f64,
    /// Value of the trichotomy variable (`c - β`, `ρ` or `c - b + α`; `n + c` at `p = 1, q = ∞`).
    pub variable: f64,
    /// Branch selected by the exact sign of the variable.
    pub branch: Branch,
    /// Branch of the fitted growth of the inner integral, when there is one.
    pub fitted_branch: Option<Branch>,
    pub branch_agrees: bool,
    pub corner_mode: Option<CornerMode>,
    pub inner_fit: Option<GrowthFit>,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub sup: SupCertificate,
    pub bounded: bool,
}

fn branch_of_sign<R: Real>(v: &R) -> Branch {
    let zero = R::from_int(0);
    if *v < zero {
        Branch::Bounded
    } else if *v == zero {
        Branch::Logarithmic
    } else {
        Branch::Power
    }
}

fn route_variable<R: Real>(route: JRoute, params: &Params<R>) -> Result<R> {
    let int = R::from_int;
    let n = int(params.n as i64);
    if route == JRoute::POneQInf {
        return Ok(params.c.clone() + n);
    }
    let c = lift_c(params)?;
    Ok(match route {
        JRoute::POneQFinite => {
            let q = finite_exponent(&params.q, "q")?;
            (n.clone() + c) * q - n - params.beta.clone()
        }
        JRoute::QOne => c - params.beta.clone(),
        JRoute::PFiniteQInf => {
            let p = finite_exponent(&params.p, "p")?;
            c - params.b.clone() + (n + params.alpha.clone()) / p
        }
        JRoute::PInfQFinite => {
            if finite_exponent(&params.q, "q")? == int(1) {
                c - params.beta.clone()
            } else {
                c - params.b.clone() + params.alpha.clone()
            }
        }
        JRoute::BothInf => c - params.b.clone() + params.alpha.clone(),
        JRoute::POneQInf => unreachable!(),
    })
}

/// Certify `sup J < ∞` along the ladder for a tuple inside the route's region.
pub fn verify_j_route<R: Real>(route: JRoute, params: &Params<R>) -> Result<JFunctionReport> {
    require_region(params, route.case())?;
    if route == JRoute::QOne && finite_exponent(&params.q, "q")? != R::from_int(1) {
        return Err(Error::OutsideRegion("the q = 1 route needs q = 1".into()));
    }
    let variable = route_variable(route, params)?;
    let branch = branch_of_sign(&variable);
    let radii = verification_radii();
    if route == JRoute::POneQInf {
        return corner_route(params, branch, variable.to_f64(), radii);
    }
    let profile = j_profile(route, params)?;
    let n = params.n;
    let growth = forelli_rudin_bracket_growth(n, profile.d, profile.s, &radii)?;
    let values = if profile.integrated {
        let per_panel = QuadLevel::COARSE.per_panel;
        partial_ball_integrals(n, &radii, |r| {
            let inner = bracket_power_integral(n, profile.d, profile.s, r, per_panel)?;
            Ok(defect(r).powf(profile.e) * inner.powf(profile.pow))
        })?
    } else {
        growth
            .values
            .iter()
            .zip(&radii)
            .map(|(v, &r)| defect(r).powf(profile.e) * v.powf(profile.pow))
            .collect()
    };
    let sup = certify_sup(&values, SUP_REL_TOL, SUP_WINDOW);
    let fitted = growth.fit.branch;
    Ok(JFunctionReport {
        route,
        c_used: profile.c_used,
        variable: profile.variable,
        branch,
        fitted_branch: Some(fitted),
        branch_agrees: fitted == branch,
        corner_mode: None,
        inner_fit: Some(growth.fit),
        radii,
        bounded: sup.stabilized(),
        values,
        sup,
    })
}

fn corner_route<R: Real>(
    params: &Params<R>,
    branch: Branch,
    variable: f64,
    radii: Vec<f64>,
) -> Result<JFunctionReport> {
    let f = params.as_float();
    let bounded_kernel = params.alpha == params.b && params.beta.is_zero_value();
    let (mode, values, radii) = if bounded_kernel {
        let k_top = 1usize << (SCHUR_RUNGS + 1);
        let gammas = gamma_sequence(f.n, f.c, k_top);
        let dims = dim_harmonics_sequence(f.n, k_top);
        let mut acc = Compensated::new();
        let mut values = Vec::with_capacity(SCHUR_RUNGS);
        let mut next = 4usize;
        for (k, g) in gammas.iter().enumerate() {
            acc.add(g.abs() * dims[k]);
            if k + 1 == next {
                values.push(acc.value());
                next *= 2;
            }
        }
        let cutoffs = (0..values.len()).map(|j| (4usize << j) as f64).collect();
        (CornerMode::BoundedKernel, values, cutoffs)
    } else {
        let kernel = DominatingKernel::new(f.n, f.c);
        let partners: Vec<f64> = std::iter::once(0.0)
            .chain((1..=CORNER_DEPTH).map(|j| 1.0 - 0.5f64.powi(j)))
            .collect();
        let mut values = Vec::with_capacity(radii.len());
        let mut sup = 0.0f64;
        for &rx in &radii {
            let weight = defect(rx).powf(f.b - f.alpha);
            for &ry in &partners {
                sup = sup.max(defect(ry).powf(f.beta) * weight * kernel.value(1.0 - rx * ry));
            }
            values.push(sup);
        }
        (CornerMode::Bracket, values, radii)
    };
    let sup = certify_sup(&values, SUP_REL_TOL, SUP_WINDOW);
    Ok(JFunctionReport {
        route: JRoute::POneQInf,
        c_used: f.c,
        variable,
        branch,
        fitted_branch: None,
        branch_agrees: true,
        corner_mode: Some(mode),
        inner_fit: None,
        radii,
        bounded: sup.stabilized(),
        values,
        sup,
    })
}

/// Smallest exponent gap a randomized draw keeps from every trichotomy seam it does not sit on.
pub const DRAW_MARGIN: f64 = 0.25;

fn grid_value(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(rng.gen_range(lo..=hi)), BigInt::from(den))
}

fn int_value(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn clear_of_seam(x: f64, lo: f64) -> bool {
    x == 0.0 || x.abs() >= lo
}

fn certificate_rates_ok(cert: &SchurCertificate) -> bool {
    let pc = cert.p_conjugate();
    let n = cert.n as f64;
    let growth_ok = |d: f64, s: f64| d >= -0.9 && (DRAW_MARGIN..=6.0).contains(&s);
    match cert.route {
        Case::PLeQ => {
            let (gamma, delta) = (cert.gamma.unwrap_or(0.0), cert.delta.unwrap_or(0.0));
            let f1 = (cert.b - cert.alpha) * gamma * pc + cert.a_exp * pc + cert.alpha;
            let s1 = (n + cert.c_effective) * gamma * pc - n - f1;
            let d2 = cert.b_exp * cert.q + cert.beta;
            let s2 = (n + cert.c_effective) * delta * cert.q - n - d2;
            growth_ok(f1, s1) && growth_ok(d2, s2)
        }
        _ => {
            let dx = cert.b + cert.a_exp * pc;
            let dy = cert.b_exp * cert.q + cert.beta;
            let kappa = dy - (cert.c_effective - dx) + 1.0;
            growth_ok(dx, cert.c_effective - dx) && growth_ok(dy, cert.c_effective - dy) && kappa >= DRAW_MARGIN
        }
    }
}

fn draw_common(rng: &mut impl Rng) -> (usize, BigRational, BigRational) {
    let n = rng.gen_range(2..=4usize);
    let alpha = grid_value(rng, -20, 20, 10);
    let beta = grid_value(rng, -8, 20, 10);
    (n, alpha, beta)
}

/// A random in-region tuple for the `1 < p ≤ q < ∞` certificate, exact, with ladder-resolvable rates.
pub fn sample_certificate_11(rng: &mut impl Rng) -> Params<BigRational> {
    loop {
        let (n, alpha, beta) = draw_common(rng);
        let p = grid_value(rng, 5, 16, 4);
        let q = p.clone() + grid_value(rng, 0, 12, 4);
        let one = int_value(1);
        let b = (alpha.clone() + one.clone()) / p.clone() - one + grid_value(rng, 1, 30, 20);
        let params = Params {
            n,
            b,
            c: int_value(0),
            alpha,
            beta,
            p: Exponent::Finite(p),
            q: Exponent::Finite(q),
        };
        let Ok((critical, _)) = critical_c(&params) else {
            continue;
        };
        let params = params.with_c(critical - grid_value(rng, 0, 10, 5));
        if let Ok(cert) = build_certificate_11(&params) {
            if cert.holds() && certificate_rates_ok(&cert) {
                return params;
            }
        }
    }
}

/// A random in-region tuple for the `1 < q < p < ∞` certificate.
pub fn sample_certificate_13(rng: &mut impl Rng) -> Params<BigRational> {
    loop {
        let (n, alpha, beta) = draw_common(rng);
        let q = grid_value(rng, 5, 12, 4);
        let p = q.clone() + grid_value(rng, 1, 12, 4);
        let one = int_value(1);
        let b = (alpha.clone() + one.clone()) / p.clone() - one + grid_value(rng, 1, 30, 20);
        let params = Params {
            n,
            b,
            c: int_value(0),
            alpha,
            beta,
            p: Exponent::Finite(p),
            q: Exponent::Finite(q),
        };
        let Ok((critical, _)) = critical_c(&params) else {
            continue;
        };
        let params = params.with_c(critical - grid_value(rng, 1, 10, 5));
        if let Ok(cert) = build_certificate_13(&params) {
            if cert.holds() && certificate_rates_ok(&cert) {
                return params;
            }
        }
    }
}

/// A random tuple in the `(p, q)` region of `case` that the classifier rejects.
pub fn sample_outside(case: Case, rng: &mut impl Rng) -> Params<BigRational> {
    loop {
        let (n, alpha, beta) = draw_common(rng);
        let beta = if rng.gen_bool(0.2) { beta - int_value(2) } else { beta };
        let (p, q) = match case {
            Case::PLeQ => {
                let p = grid_value(rng, 5, 16, 4);
                let q = p.clone() + grid_value(rng, 0, 12, 4);
                (p, q)
            }
            _ => {
                let q = grid_value(rng, 5, 12, 4);
                (q.clone() + grid_value(rng, 1, 12, 4), q)
            }
        };
        let b = grid_value(rng, -30, 20, 10);
        let params = Params {
            n,
            b,
            c: int_value(0),
            alpha,
            beta,
            p: Exponent::Finite(p),
            q: Exponent::Finite(q),
        };
        let Ok((critical, _)) = critical_c(&params) else {
            continue;
        };
        let shift = if rng.gen_bool(0.3) {
            int_value(0)
        } else {
            grid_value(rng, -10, 10, 5)
        };
        let params = params.with_c(critical + shift);
        match classify(&params) {
            Ok(v) if !v.bounded && v.theorem == case => return params,
            _ => continue,
        }
    }
}

fn j_rates_ok(route: JRoute, params: &Params<BigRational>) -> bool {
    let f = params.as_float();
    let n = f.n as f64;
    if route == JRoute::POneQInf {
        if params.alpha == params.b && params.beta.is_zero_value() {
            return f.c + n <= -0.3;
        }
        let g = f.beta + f.b - f.alpha - (n + f.c);
        return clear_of_seam(g, DRAW_MARGIN) && g <= 6.0;
    }
    let Ok(pr) = j_profile(route, params) else {
        return false;
    };
    if pr.d < -0.9 || pr.s.abs() > 5.0 || pr.e > 6.0 || !clear_of_seam(pr.s, DRAW_MARGIN) {
        return false;
    }
    let decay = if pr.s > 0.0 { pr.e - pr.s * pr.pow } else { pr.e };
    if pr.integrated && pr.s == 0.0 {
        decay + 1.0 >= DRAW_MARGIN * (1.0 + pr.pow)
    } else if pr.integrated {
        decay + 1.0 >= DRAW_MARGIN
    } else if pr.s == 0.0 {
        pr.e >= 0.3
    } else {
        clear_of_seam(decay, DRAW_MARGIN)
    }
}

/// A random exact tuple inside a route's region; draws put `c` on the critical line, on the
/// trichotomy seam `variable = 0`, or strictly inside, and otherwise keep [`DRAW_MARGIN`].
pub fn sample_j_route(route: JRoute, rng: &mut impl Rng) -> Params<BigRational> {
    let exps = [ratio(3, 2), int_value(2), ratio(5, 2), int_value(3), int_value(4)];
    loop {
        let (n, alpha, beta) = draw_common(rng);
        let nn = int_value(n as i64);
        let one = int_value(1);
        let pick = |rng: &mut _| exps[Rng::gen_range(rng, 0..exps.len())].clone();
        let q_finite = |rng: &mut _| {
            if Rng::gen_bool(rng, 0.5) {
                one.clone()
            } else {
                pick(rng)
            }
        };
        let (p, q) = match route {
            JRoute::POneQFinite => (Exponent::Finite(one.clone()), Exponent::Finite(q_finite(rng))),
            JRoute::QOne => (Exponent::Finite(pick(rng)), Exponent::Finite(one.clone())),
            JRoute::PFiniteQInf => (Exponent::Finite(pick(rng)), Exponent::Infinity),
            JRoute::POneQInf => (Exponent::Finite(one.clone()), Exponent::Infinity),
            JRoute::PInfQFinite => (Exponent::Infinity, Exponent::Finite(q_finite(rng))),
            JRoute::BothInf => (Exponent::Infinity, Exponent::Infinity),
        };
        let beta = if route.case().target_is_infinite() {
            if rng.gen_bool(0.3) {
                int_value(0)
            } else {
                grid_value(rng, 1, 20, 10)
            }
        } else {
            beta
        };
        let b = match route {
            JRoute::POneQFinite | JRoute::POneQInf => {
                if rng.gen_bool(0.3) {
                    alpha.clone()
                } else {
                    alpha.clone() + grid_value(rng, 1, 20, 10)
                }
            }
            JRoute::PInfQFinite | JRoute::BothInf => alpha.clone() - one.clone() + grid_value(rng, 1, 30, 10),
            _ => {
                let p = match &p {
                    Exponent::Finite(p) => p.clone(),
                    Exponent::Infinity => unreachable!(),
                };
                (alpha.clone() + one.clone()) / p - one.clone() + grid_value(rng, 1, 30, 20)
            }
        };
        let params = Params {
            n,
            b,
            c: int_value(0),
            alpha,
            beta,
            p,
            q,
        };
        let Ok((critical, included)) = critical_c(&params) else {
            continue;
        };
        let choice = rng.gen_range(0..3);
        let c = match choice {
            0 if included => critical,
            1 => {
                let seam = seam_c(route, &params, &nn);
                match seam {
                    Some(c) => c,
                    None => continue,
                }
            }
            _ => critical - grid_value(rng, 1, 15, 10),
        };
        let params = params.with_c(c);
        if require_region(&params, route.case()).is_ok() && j_rates_ok(route, &params) {
            return params;
        }
    }
}

fn seam_c(route: JRoute, params: &Params<BigRational>, n: &BigRational) -> Option<BigRational> {
    let one = int_value(1);
    Some(match route {
        JRoute::POneQFinite => match &params.q {
            Exponent::Finite(q) => (n.clone() + params.beta.clone()) / q.clone() - n.clone(),
            Exponent::Infinity => return None,
        },
        JRoute::QOne => params.beta.clone(),
        JRoute::PFiniteQInf => match &params.p {
            Exponent::Finite(p) => params.b.clone() - (n.clone() + params.alpha.clone()) / p.clone(),
            Exponent::Infinity => return None,
        },
        JRoute::POneQInf => {
            if params.alpha == params.b && params.beta.is_zero_value() {
                -n.clone() - one - int_value(1) / int_value(2)
            } else {
                -n.clone()
            }
        }
        JRoute::PInfQFinite => match &params.q {
            Exponent::Finite(q) if *q == one => params.beta.clone(),
            _ => params.b.clone() - params.alpha.clone(),
        },
        JRoute::BothInf => params.b.clone() - params.alpha.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::Value;

    fn exact(n: usize, b: &str, c: &str, alpha: &str, beta: &str, p: &str, q: &str) -> Params<BigRational> {
        Params {
            n,
            b: Value::parse(b).unwrap(),
            c: Value::parse(c).unwrap(),
            alpha: Value::parse(alpha).unwrap(),
            beta: Value::parse(beta).unwrap(),
            p: Exponent::parse(p).unwrap(),
            q: Exponent::parse(q).unwrap(),
        }
        .to_exact()
        .unwrap()
    }

    #[test]
    fn certificate_11_worked_example() {
        let cert = build_certificate_11(&exact(3, "0", "0", "0", "0", "2", "2")).unwrap();
        assert!(cert.holds(), "{:?}", cert.checks);
        assert_eq!(cert.arithmetic, Arithmetic::Exact);
        assert_eq!((cert.c_effective, cert.b_exp, cert.epsilon), (0.0, -0.25, 0.25));
        assert_eq!((cert.delta, cert.gamma, cert.a_exp), (Some(0.5), Some(0.5), -0.25));
        let shifted = build_certificate_11(&exact(3, "0", "-1/4", "1/2", "0", "2", "2")).unwrap();
        assert_eq!(shifted.epsilon, 0.125);
        assert!(build_certificate_11(&exact(3, "0", "1/10", "0", "0", "2", "2")).is_err());
        assert!(build_certificate_11(&exact(3, "0", "0", "0", "0", "3", "2")).is_err());
    }

    #[test]
    fn certificate_13_worked_example() {
        let cert = build_certificate_13(&exact(3, "0", "0", "0", "0", "4", "2")).unwrap();
        assert!(cert.holds(), "{:?}", cert.checks);
        assert_eq!(cert.epsilon, 0.125);
        assert_eq!(cert.c_effective, 0.125);
        assert_eq!((cert.a_exp, cert.b_exp), (-3.0 / 32.0, -0.125));
        assert!(build_certificate_13(&exact(3, "0", "1/4", "0", "0", "4", "2")).is_err());
        assert!(build_certificate_13(&exact(3, "0", "0", "0", "0", "4", "1")).is_err());
    }

    #[test]
    fn float_certificates_use_tolerant_identities() {
        let cert = build_certificate_11(&Params::float(3, 0.3, -0.7, 0.1, 0.2, 2.5, 3.5)).unwrap();
        assert!(cert.holds(), "{:?}", cert.checks);
        assert_eq!(cert.arithmetic, Arithmetic::Float);
    }

    #[test]
    fn route_labels_round_trip() {
        for route in JRoute::ALL {
            assert_eq!(JRoute::from_label(route.label()).unwrap(), route);
        }
        assert!(JRoute::from_label("1.1").is_err());
    }
}
