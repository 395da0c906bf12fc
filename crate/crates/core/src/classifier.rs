//! Six-parameter boundedness classifier for `T_bc` and `S_bc` from `L^p_α` to `L^q_β`.
//!
//! Every comparison is carried out in the arithmetic of the inputs. Exact rationals give
//! exact verdicts on the critical line, and binary floats are compared with zero tolerance.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which arithmetic a verdict was computed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Exact,
    Float,
}

impl fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arithmetic::Exact => "exact",
            Arithmetic::Float => "float",
        })
    }
}

/// Ordered field the conditions are evaluated in.
pub trait Real:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const ARITHMETIC: Arithmetic;

    fn from_int(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn is_zero_value(&self) -> bool {
        *self == Self::from_int(0)
    }

    /// Equality for derived identities; floats allow a few ulps of rounding.
    fn agrees(&self, other: &Self) -> bool {
        self == other
    }
}

impl Real for f64 {
    const ARITHMETIC: Arithmetic = Arithmetic::Float;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn agrees(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12 * self.abs().max(other.abs()).max(1.0)
    }
}

impl Real for BigRational {
    const ARITHMETIC: Arithmetic = Arithmetic::Exact;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Parse an exact rational from an integer, `a/b`, or a plain decimal such as `-1.25`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(Error::Parse(format!("not a rational number: {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let num =
        BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|e| Error::Parse(e.to_string()))?;
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(num, den);
    Ok(if negative { -value } else { value })
}

/// A scalar as typed by the user: exact when written as an integer, fraction or plain
/// decimal, binary floating point when written in scientific notation.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.contains(['e', 'E']) {
            let v: f64 = s.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!("not a finite number: {s:?}")));
            }
            return Ok(Value::Float(v));
        }
        parse_rational(s).map(Value::Exact)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => Real::to_f64(r),
            Value::Float(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    fn exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Value::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Value::Float(v) => write!(f, "{v:e}"),
        }
    }
}

impl FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Value::parse(s)
    }
}

/// A Lebesgue exponent in `[1, ∞]`; `∞` compares exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Exponent<R> {
    Finite(R),
    Infinity,
}

impl<R> Exponent<R> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn map<S>(&self, f: impl FnOnce(&R) -> S) -> Exponent<S> {
        match self {
            Exponent::Finite(v) => Exponent::Finite(f(v)),
            Exponent::Infinity => Exponent::Infinity,
        }
    }
}

impl Exponent<Value> {
    /// Accepts `inf`, `infinity` or `∞` besides any [`Value`].
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" | "∞" => Ok(Exponent::Infinity),
            s => Value::parse(s).map(Exponent::Finite),
        }
    }
}

impl fmt::Display for Exponent<Value> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => v.fmt(f),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl From<f64> for Exponent<f64> {
    fn from(v: f64) -> Self {
        if v == f64::INFINITY {
            Exponent::Infinity
        } else {
            Exponent::Finite(v)
        }
    }
}

/// `(n, b, c, α, β, p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Params<R = f64> {
    pub n: usize,
    pub b: R,
    pub c: R,
    pub alpha: R,
    pub beta: R,
    pub p: Exponent<R>,
    pub q: Exponent<R>,
}

impl Params<f64> {
    /// Float parameters; `f64::INFINITY` stands for an infinite exponent.
    pub fn float(n: usize, b: f64, c: f64, alpha: f64, beta: f64, p: f64, q: f64) -> Self {
        Params {
            n,
            b,
            c,
            alpha,
            beta,
            p: p.into(),
            q: q.into(),
        }
    }
}

impl<R: Clone> Params<R> {
    pub fn with_c(&self, c: R) -> Self {
        Params { c, ..self.clone() }
    }
}

impl<R: Real> Params<R> {
    pub fn as_float(&self) -> Params<f64> {
        Params {
            n: self.n,
            b: self.b.to_f64(),
            c: self.c.to_f64(),
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            p: self.p.map(R::to_f64),
            q: self.q.map(R::to_f64),
        }
    }
}

impl Params<Value> {
    /// All seven entries exact.
    pub fn is_exact(&self) -> bool {
        [&self.b, &self.c, &self.alpha, &self.beta].iter().all(|v| v.is_exact())
            && [&self.p, &self.q].iter().all(|e| match e {
                Exponent::Finite(v) => v.is_exact(),
                Exponent::Infinity => true,
            })
    }

    pub fn to_float(&self) -> Params<f64> {
        Params {
            n: self.n,
            b: self.b.to_f64(),
            c: self.c.to_f64(),
            alpha: self.alpha.to_f64(),
            beta: self.beta.to_f64(),
            p: self.p.map(Value::to_f64),
            q: self.q.map(Value::to_f64),
        }
    }

    pub fn to_exact(&self) -> Option<Params<BigRational>> {
        let exp = |e: &Exponent<Value>| match e {
            Exponent::Finite(v) => v.exact().cloned().map(Exponent::Finite),
            Exponent::Infinity => Some(Exponent::Infinity),
        };
        Some(Params {
            n: self.n,
            b: self.b.exact()?.clone(),
            c: self.c.exact()?.clone(),
            alpha: self.alpha.exact()?.clone(),
            beta: self.beta.exact()?.clone(),
            p: exp(&self.p)?,
            q: exp(&self.q)?,
        })
    }
}

/// The seven `(p, q)` regions of `[1, ∞]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
pub enum Case {
    /// `1 < p ≤ q < ∞`
    #[serde(rename = "1.1")]
    PLeQ,
    /// `1 = p ≤ q < ∞`
    #[serde(rename = "1.2")]
    POneQFinite,
    /// `1 ≤ q < p < ∞`
    #[serde(rename = "1.3")]
    QLtP,
    /// `1 < p < ∞ = q`
    #[serde(rename = "1.4")]
    PFiniteQInf,
    /// `p = 1, q = ∞`
    #[serde(rename = "1.5")]
    POneQInf,
    /// `p = ∞ > q`
    #[serde(rename = "1.6")]
    PInfQFinite,
    /// `p = q = ∞`
    #[serde(rename = "1.7")]
    BothInf,
}

impl Case {
    pub const ALL: [Case; 7] = [
        Case::PLeQ,
        Case::POneQFinite,
        Case::QLtP,
        Case::PFiniteQInf,
        Case::POneQInf,
        Case::PInfQFinite,
        Case::BothInf,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Case::PLeQ => "1.1",
            Case::POneQFinite => "1.2",
            Case::QLtP => "1.3",
            Case::PFiniteQInf => "1.4",
            Case::POneQInf => "1.5",
            Case::PInfQFinite => "1.6",
            Case::BothInf => "1.7",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Case::ALL
            .into_iter()
            .find(|c| c.label() == label.trim())
            .ok_or_else(|| Error::Parse(format!("unknown case label {label:?}")))
    }

    /// Locate `(p, q)`; both must already be `≥ 1`.
    pub fn locate<R: Real>(p: &Exponent<R>, q: &Exponent<R>) -> Case {
        let one = R::from_int(1);
        match (p, q) {
            (Exponent::Infinity, Exponent::Infinity) => Case::BothInf,
            (Exponent::Infinity, Exponent::Finite(_)) => Case::PInfQFinite,
            (Exponent::Finite(p), Exponent::Infinity) => {
                if *p == one {
                    Case::POneQInf
                } else {
                    Case::PFiniteQInf
                }
            }
            (Exponent::Finite(p), Exponent::Finite(q)) => {
                if q < p {
                    Case::QLtP
                } else if *p == one {
                    Case::POneQFinite
                } else {
                    Case::PLeQ
                }
            }
        }
    }

    pub fn target_is_infinite(self) -> bool {
        matches!(self, Case::PFiniteQInf | Case::POneQInf | Case::BothInf)
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Case {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// One named inequality and whether it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub description: String,
    pub holds: bool,
}

impl Condition {
    fn new(description: impl Into<String>, holds: bool) -> Self {
        Self {
            description: description.into(),
            holds,
        }
    }
}

/// Classifier output; `bounded` is `prerequisite_ok` and every condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub bounded: bool,
    pub theorem: Case,
    pub prerequisite_ok: bool,
    pub conditions: Vec<Condition>,
    /// Largest admissible `c` (or the supremum when the boundary is excluded).
    pub critical_c: f64,
    pub boundary_included: bool,
    /// `critical_c - c`; positive strictly inside the region.
    pub margin: f64,
    pub arithmetic: Arithmetic,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seam_flags: Vec<String>,
}

/// Distance below which a float exponent is flagged as sitting on a case seam.
pub const SEAM_FLAG_DISTANCE: f64 = 1e-12;

fn check_exponent<R: Real>(name: &str, e: &Exponent<R>) -> Result<()> {
    if let Exponent::Finite(v) = e {
        if !(*v >= R::from_int(1)) {
            return Err(Error::InvalidParams(format!(
                "{name} must lie in [1, ∞], got {}",
                v.to_f64()
            )));
        }
    }
    Ok(())
}

fn validate<R: Real>(params: &Params<R>) -> Result<()> {
    if params.n < 2 {
        return Err(Error::Dimension(params.n));
    }
    for (name, v) in [
        ("b", &params.b),
        ("c", &params.c),
        ("alpha", &params.alpha),
        ("beta", &params.beta),
    ] {
        if !v.to_f64().is_finite() {
            return Err(Error::InvalidParams(format!("{name} must be finite")));
        }
    }
    check_exponent("p", &params.p)?;
    check_exponent("q", &params.q)
}

fn finite<R: Clone>(e: &Exponent<R>) -> R {
    match e {
        Exponent::Finite(v) => v.clone(),
        Exponent::Infinity => unreachable!("finite exponent expected in this case"),
    }
}

/// Critical value of `c` for the governing case and whether it is itself admissible.
///
/// For the two `p = 1` cases the boundary is admissible exactly when `α < b`; for the two
/// `q = ∞` cases with `1 < p` it is admissible exactly when `β ≠ 0`.
pub fn critical_c<R: Real>(params: &Params<R>) -> Result<(R, bool)> {
    validate(params)?;
    let n = R::from_int(params.n as i64);
    let one = R::from_int(1);
    let (b, alpha, beta) = (params.b.clone(), params.alpha.clone(), params.beta.clone());
    let case = Case::locate(&params.p, &params.q);
    Ok(match case {
        Case::PLeQ => {
            let (p, q) = (finite(&params.p), finite(&params.q));
            (b + (n.clone() + beta) / q - (n + alpha) / p, true)
        }
        Case::POneQFinite => {
            let q = finite(&params.q);
            let included = alpha < b;
            (b + (n.clone() + beta) / q - (n + alpha), included)
        }
        Case::QLtP => {
            let (p, q) = (finite(&params.p), finite(&params.q));
            (b + (one.clone() + beta) / q - (one + alpha) / p, false)
        }
        Case::PFiniteQInf => {
            let p = finite(&params.p);
            let included = !beta.is_zero_value();
            (b + beta - (n + alpha) / p, included)
        }
        Case::POneQInf => {
            let included = alpha < b;
            (b + beta - (n + alpha), included)
        }
        Case::PInfQFinite => {
            let q = finite(&params.q);
            (b + (beta + one) / q - alpha, false)
        }
        Case::BothInf => {
            let included = !beta.is_zero_value();
            (b + beta - alpha, included)
        }
    })
}

/// `β > -1` for finite `q`, `β ≥ 0` for `q = ∞`.
pub fn prerequisite<R: Real>(params: &Params<R>) -> bool {
    if params.q.is_infinite() {
        params.beta >= R::from_int(0)
    } else {
        params.beta > R::from_int(-1)
    }
}

fn seam_flags<R: Real>(params: &Params<R>) -> Vec<String> {
    if R::ARITHMETIC == Arithmetic::Exact {
        return Vec::new();
    }
    let near = |a: f64, b: f64| a != b && (a - b).abs() < SEAM_FLAG_DISTANCE;
    let mut flags = Vec::new();
    if let Exponent::Finite(p) = &params.p {
        if near(p.to_f64(), 1.0) {
            flags.push("p within 1e-12 of 1".to_string());
        }
    }
    if let Exponent::Finite(q) = &params.q {
        if near(q.to_f64(), 1.0) {
            flags.push("q within 1e-12 of 1".to_string());
        }
    }
    if let (Exponent::Finite(p), Exponent::Finite(q)) = (&params.p, &params.q) {
        if near(p.to_f64(), q.to_f64()) {
            flags.push("p within 1e-12 of q".to_string());
        }
    }
    if near(params.beta.to_f64(), 0.0) && params.q.is_infinite() {
        flags.push("beta within 1e-12 of 0".to_string());
    }
    flags
}

/// Decide boundedness of `T_bc` (equivalently `S_bc`) for the given tuple.
pub fn classify<R: Real>(params: &Params<R>) -> Result<Verdict> {
    validate(params)?;
    let case = Case::locate(&params.p, &params.q);
    let (critical, boundary_included) = critical_c(params)?;
    let one = R::from_int(1);
    let (b, c, alpha, beta) = (&params.b, &params.c, &params.alpha, &params.beta);
    let first_p = |p: &R| alpha.clone() + one.clone() < p.clone() * (b.clone() + one.clone());
    let at_most = *c <= critical;
    let below = *c < critical;
    let beta_zero = beta.is_zero_value();

    let conditions = match case {
        Case::PLeQ | Case::QLtP | Case::PFiniteQInf => {
            let p = finite(&params.p);
            let mut list = vec![Condition::new("alpha + 1 < p (b + 1)", first_p(&p))];
            match case {
                Case::PLeQ => list.push(Condition::new("c <= b + (n + beta)/q - (n + alpha)/p", at_most)),
                Case::QLtP => list.push(Condition::new("c < b + (1 + beta)/q - (1 + alpha)/p", below)),
                _ => {
                    list.push(Condition::new("c <= b + beta - (n + alpha)/p", at_most));
                    list.push(Condition::new(
                        "c < b + beta - (n + alpha)/p when beta = 0",
                        !beta_zero || below,
                    ));
                }
            }
            list
        }
        Case::POneQFinite | Case::POneQInf => {
            let strict_alpha = alpha < b;
            let weak_alpha = alpha <= b;
            let critical_text = if case == Case::POneQFinite {
                "b + (n + beta)/q - (n + alpha)"
            } else {
                "b + beta - (n + alpha)"
            };
            vec![Condition::new(
                format!("alpha < b and c <= {critical_text}, or alpha <= b and c < {critical_text}"),
                (strict_alpha && at_most) || (weak_alpha && below),
            )]
        }
        Case::PInfQFinite | Case::BothInf => {
            let first = alpha.clone() - one.clone() < b.clone();
            let mut list = vec![Condition::new("alpha - 1 < b", first)];
            if case == Case::PInfQFinite {
                list.push(Condition::new("c < b + (beta + 1)/q - alpha", below));
            } else {
                list.push(Condition::new("c <= b + beta - alpha", at_most));
                list.push(Condition::new(
                    "c < b + beta - alpha when beta = 0",
                    !beta_zero || below,
                ));
            }
            list
        }
    };
    let prerequisite_ok = prerequisite(params);
    let bounded = prerequisite_ok && conditions.iter().all(|c| c.holds);
    let critical_f = critical.to_f64();
    Ok(Verdict {
        bounded,
        theorem: case,
        prerequisite_ok,
        conditions,
        critical_c: critical_f,
        boundary_included,
        margin: (critical - c.clone()).to_f64(),
        arithmetic: R::ARITHMETIC,
        seam_flags: seam_flags(params),
    })
}

/// Classify user-typed parameters, exactly when every entry is exact.
pub fn classify_values(params: &Params<Value>) -> Result<Verdict> {
    match params.to_exact() {
        Some(exact) => classify(&exact),
        None => classify(&params.to_float()),
    }
}

/// `bounded at c ⇒ bounded at c_smaller`; the implication's truth.
pub fn monotone_in_c_check<R: Real>(params: &Params<R>, c_smaller: R) -> Result<bool> {
    if !(c_smaller < params.c) {
        return Err(Error::InvalidParams("c_smaller must be below c".into()));
    }
    let upper = classify(params)?;
    if !upper.bounded {
        return Ok(true);
    }
    Ok(classify(&params.with_c(c_smaller))?.bounded)
}

/// One row of a phase diagram over `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtlasRow<R> {
    pub params: Params<R>,
    pub verdict: Verdict,
}

/// Verdicts with critical values and margins for every tuple of a grid.
pub fn boundary_atlas<R: Real>(grid: &[Params<R>]) -> Result<Vec<AtlasRow<R>>> {
    grid.iter()
        .map(|params| {
            Ok(AtlasRow {
                params: params.clone(),
                verdict: classify(params)?,
            })
        })
        .collect()
}

/// The first necessary condition of boundedness, independent of the classifier's cases.
///
/// `α ≤ b` for `p = 1`, `α - 1 < b` for `p = ∞`, and `α + 1 < p(b + 1)` otherwise.
pub fn first_necessary_condition<R: Real>(params: &Params<R>) -> Result<bool> {
    validate(params)?;
    let one = R::from_int(1);
    Ok(match &params.p {
        Exponent::Infinity => params.alpha.clone() - one < params.b,
        Exponent::Finite(p) if *p == one => params.alpha <= params.b,
        Exponent::Finite(p) => params.alpha.clone() + one.clone() < p.clone() * (params.b.clone() + one),
    })
}

/// The second necessary condition of boundedness: the inequality on `c` with its strictness.
pub fn second_necessary_condition<R: Real>(params: &Params<R>) -> Result<bool> {
    validate(params)?;
    let n = R::from_int(params.n as i64);
    let one = R::from_int(1);
    let (b, c, alpha, beta) = (
        params.b.clone(),
        params.c.clone(),
        params.alpha.clone(),
        params.beta.clone(),
    );
    Ok(match (&params.p, &params.q) {
        (Exponent::Finite(p), Exponent::Finite(q)) if p <= q => {
            c <= b + (n.clone() + beta) / q.clone() - (n + alpha) / p.clone()
        }
        (Exponent::Finite(p), Exponent::Finite(q)) => {
            c < b + (one.clone() + beta) / q.clone() - (one + alpha) / p.clone()
        }
        (Exponent::Finite(p), Exponent::Infinity) => {
            let bound = b + beta.clone() - (n + alpha) / p.clone();
            if beta.is_zero_value() && *p != one {
                c < bound
            } else {
                c <= bound
            }
        }
        (Exponent::Infinity, Exponent::Finite(q)) => c < b + (one + beta) / q.clone() - alpha,
        (Exponent::Infinity, Exponent::Infinity) => {
            let bound = b + beta.clone() - alpha;
            if beta.is_zero_value() {
                c < bound
            } else {
                c <= bound
            }
        }
    })
}

/// For `p = 1`: equality cannot hold in both `α ≤ b` and the `c` inequality at once.
pub fn strict_equality_exclusion<R: Real>(params: &Params<R>) -> Result<bool> {
    let (critical, _) = critical_c(params)?;
    let case = Case::locate(&params.p, &params.q);
    if !matches!(case, Case::POneQFinite | Case::POneQInf) {
        return Ok(true);
    }
    Ok(!(params.alpha == params.b && params.c == critical))
}

/// Exact rational from a float, for mirroring float parameters into exact arithmetic.
pub fn rational_from_f64(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

/// Parameters converted to exact rationals, preserving every float bit.
pub fn exact_params(params: &Params<f64>) -> Option<Params<BigRational>> {
    let exp = |e: &Exponent<f64>| match e {
        Exponent::Finite(v) => rational_from_f64(*v).map(Exponent::Finite),
        Exponent::Infinity => Some(Exponent::Infinity),
    };
    Some(Params {
        n: params.n,
        b: rational_from_f64(params.b)?,
        c: rational_from_f64(params.c)?,
        alpha: rational_from_f64(params.alpha)?,
        beta: rational_from_f64(params.beta)?,
        p: exp(&params.p)?,
        q: exp(&params.q)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(n: usize, b: &str, c: &str, alpha: &str, beta: &str, p: &str, q: &str) -> Params<Value> {
        Params {
            n,
            b: Value::parse(b).unwrap(),
            c: Value::parse(c).unwrap(),
            alpha: Value::parse(alpha).unwrap(),
            beta: Value::parse(beta).unwrap(),
            p: Exponent::parse(p).unwrap(),
            q: Exponent::parse(q).unwrap(),
        }
    }

    #[test]
    fn parses_rationals_decimals_and_floats() {
        assert_eq!(parse_rational("-3/4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert_eq!(parse_rational("1.25").unwrap(), BigRational::new(5.into(), 4.into()));
        assert_eq!(parse_rational(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("-").is_err());
        assert_eq!(Value::parse("1e-3").unwrap(), Value::Float(1e-3));
        assert!(matches!(Exponent::parse("inf").unwrap(), Exponent::Infinity));
        assert_eq!(Value::parse("6/4").unwrap().to_string(), "3/2");
        assert_eq!(Value::parse("-2").unwrap().to_string(), "-2");
    }

    #[test]
    fn case_tiling() {
        let e = |s: &str| Exponent::parse(s).unwrap().map(Value::to_f64);
        let cases = [
            ("2", "2", Case::PLeQ),
            ("1", "1", Case::POneQFinite),
            ("1", "3", Case::POneQFinite),
            ("3", "1", Case::QLtP),
            ("3", "2", Case::QLtP),
            ("2", "inf", Case::PFiniteQInf),
            ("1", "inf", Case::POneQInf),
            ("inf", "1", Case::PInfQFinite),
            ("inf", "inf", Case::BothInf),
        ];
        for (p, q, want) in cases {
            assert_eq!(Case::locate(&e(p), &e(q)), want, "p={p} q={q}");
        }
    }

    #[test]
    fn worked_verdicts() {
        let v = classify_values(&exact(3, "0", "0", "0", "0", "2", "2")).unwrap();
        assert!(v.bounded && v.theorem == Case::PLeQ && v.boundary_included && v.margin == 0.0);
        let v = classify_values(&exact(3, "0", "0", "0", "0", "1", "1")).unwrap();
        assert!(!v.bounded && v.theorem == Case::POneQFinite);
        let v = classify_values(&exact(3, "0", "0", "0", "-1", "2", "2")).unwrap();
        assert!(!v.bounded && !v.prerequisite_ok);
        let v = classify_values(&exact(3, "0", "-3.2", "0", "0", "inf", "1")).unwrap();
        assert!(v.bounded && v.theorem == Case::PInfQFinite && !v.boundary_included);
        let v = classify_values(&exact(3, "0", "0", "0", "0", "inf", "inf")).unwrap();
        assert!(!v.bounded && v.theorem == Case::BothInf);
        assert_eq!(v.arithmetic, Arithmetic::Exact);
    }

    #[test]
    fn invalid_exponents_are_rejected() {
        assert!(classify(&Params::float(3, 0.0, 0.0, 0.0, 0.0, 0.5, 2.0)).is_err());
        assert!(classify(&Params::float(3, 0.0, 0.0, 0.0, 0.0, 2.0, 0.9)).is_err());
        assert!(classify(&Params::float(1, 0.0, 0.0, 0.0, 0.0, 2.0, 2.0)).is_err());
        assert!(classify(&Params::float(3, f64::NAN, 0.0, 0.0, 0.0, 2.0, 2.0)).is_err());
    }

    #[test]
    fn float_seams_are_flagged() {
        let v = classify(&Params::float(3, 0.0, -5.0, 0.0, 0.0, 1.0 + 1e-13, 2.0)).unwrap();
        assert!(v.seam_flags.iter().any(|f| f.starts_with("p within")));
        assert_eq!(v.theorem, Case::PLeQ);
    }
}
