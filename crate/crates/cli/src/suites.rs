//! Verification suites behind `bbk verify`, each a list of named pass/fail checks.

use anyhow::{bail, Result};
use bbk_core::classifier::{classify, Case, Params};
use bbk_core::geometry::dot;
use bbk_core::growth::{Branch, RadiusLadder};
use bbk_core::integral_ops::{log_blowup_probe, ForelliDraw};
use bbk_core::kernel::{extended_poisson, kernel_eval, random_point, verify_diagonal, KernelSpec};
use bbk_core::radial_ops::{verify_additivity, verify_inverse, verify_kernel_shift, Expansion};
use bbk_core::schur::{
    build_certificate_11, build_certificate_13, sample_certificate_11, sample_certificate_13, sample_j_route,
    sample_outside, verify_certificate_11, verify_certificate_13, verify_j_route, JRoute,
};
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value as Json};

/// Relative agreement of the truncated `α = -1` series with the closed form.
pub const POISSON_TOL: f64 = 1e-6;
/// Largest `|x|`, `|y|` of the Poisson comparison.
pub const POISSON_RADIUS: f64 = 0.9;
/// Fitted power-branch exponents must lie this close to the prediction.
pub const EXPONENT_TOL: f64 = 0.1;
/// Largest spread `max/min` of `R_α(x,x) / (1 + log(1/(1-|x|^2)))` on the logarithmic branch.
pub const LOG_RATIO_SPREAD: f64 = 4.0;
/// Coefficient deviation allowed in the exact radial identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Degree of the random expansions fed to the radial identities.
pub const IDENTITY_DEGREE: usize = 16;
/// Deviation of `D_s^t R_s` from `R_{s+t}`, relative to `max(1, |R_{s+t}|)`.
pub const KERNEL_SHIFT_TOL: f64 = 1e-6;
/// The blow-up ratio must stay inside `[1/PROBE_BAND, PROBE_BAND]`.
pub const PROBE_BAND: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Kernel,
    Radial,
    Forelli,
    Schur,
    Jroute,
    Probes,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Radial => "radial",
            Suite::Forelli => "forelli",
            Suite::Schur => "schur",
            Suite::Jroute => "jroute",
            Suite::Probes => "probes",
        }
    }

    fn default_samples(self) -> usize {
        match self {
            Suite::Kernel => 1000,
            Suite::Radial | Suite::Forelli | Suite::Jroute => 20,
            Suite::Schur => 100,
            Suite::Probes => 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    pub n: Option<usize>,
    pub samples: Option<usize>,
    /// Theorem label (`1.1`, ...) or `J` route label (`1.3q1`, ...) restricting the suite.
    pub theorem: Option<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Json,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: Json) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn run_suite(suite: Suite, options: &SuiteOptions, pool: &rayon::ThreadPool) -> Result<SuiteReport> {
    if let Some(n) = options.n {
        anyhow::ensure!(n >= 2, "dimension must be at least 2, got {n}");
    }
    let samples = options.samples.unwrap_or(suite.default_samples());
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let checks = pool.install(|| match suite {
        Suite::Kernel => kernel_suite(options.n, samples, &mut rng),
        Suite::Radial => radial_suite(options.n, samples, &mut rng),
        Suite::Forelli => forelli_suite(options.n, samples, &mut rng),
        Suite::Schur => schur_suite(options.theorem.as_deref(), samples, &mut rng),
        Suite::Jroute => jroute_suite(options.theorem.as_deref(), samples, &mut rng),
        Suite::Probes => probe_suite(options.n.unwrap_or(3)),
    })?;
    Ok(SuiteReport {
        suite: suite.name().to_string(),
        seed: options.seed,
        samples,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

fn dimensions(n: Option<usize>, default: &[usize]) -> Vec<usize> {
    n.map_or_else(|| default.to_vec(), |n| vec![n])
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Ladder `1 - 2^{-j-1}` below `0.95`, closed off by `0.95`.
pub fn diagonal_radii() -> Vec<f64> {
    let mut radii: Vec<f64> = RadiusLadder::geometric(0.5, 12)
        .radii()
        .into_iter()
        .filter(|r| *r < 0.95)
        .collect();
    radii.push(0.95);
    radii
}

fn kernel_suite(n: Option<usize>, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = vec![poisson_check(&dimensions(n, &[2, 3, 4]), samples, rng)?];
    checks.extend(diagonal_checks(n.unwrap_or(3))?);
    Ok(checks)
}

/// Truncated `R_{-1}` series against the closed form on random pairs with `|x|, |y| ≤ 0.9`.
pub fn poisson_check(dims: &[usize], samples: usize, rng: &mut impl Rng) -> Result<Check> {
    let mut pairs = Vec::with_capacity(samples);
    for i in 0..samples {
        let n = dims[i % dims.len()];
        let rx = rng.gen_range(0.0..=POISSON_RADIUS);
        let x = random_point(rng, n, rx)?;
        let ry = rng.gen_range(0.0..=POISSON_RADIUS);
        let y = random_point(rng, n, ry)?;
        pairs.push((x, y));
    }
    let specs = dims
        .iter()
        .map(|&n| Ok((n, KernelSpec::with_defaults(n, -1.0)?)))
        .collect::<Result<Vec<_>>>()?;
    let deviations = pairs
        .par_iter()
        .map(|(x, y)| {
            let spec = &specs.iter().find(|(n, _)| *n == x.dim()).expect("dimension listed").1;
            let series = kernel_eval(spec, x, y)?;
            let rho = x.norm() * y.norm();
            let t = if rho == 0.0 {
                1.0
            } else {
                dot(x.coords(), y.coords()) / rho
            };
            let closed = extended_poisson(x.dim(), rho, t);
            Ok((series - closed).abs() / closed.abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = max_of(deviations.iter().copied());
    Ok(Check::new(
        "poisson_closed_form",
        worst < POISSON_TOL,
        json!({ "pairs": samples, "dimensions": dims, "max_relative_deviation": worst, "tolerance": POISSON_TOL }),
    ))
}

/// Growth of `R_α(x,x)` on the power (`α ∈ {0, 1, -3/2}`), logarithmic (`α = -n`) and
/// bounded (`α = -n-1`) branches.
pub fn diagonal_checks(n: usize) -> Result<Vec<Check>> {
    let nf = n as f64;
    let radii = diagonal_radii();
    let mut checks = Vec::new();
    for alpha in [0.0, 1.0, -1.5] {
        let report = verify_diagonal(n, alpha, &radii)?;
        let error = (report.fitted_exponent - report.predicted_exponent).abs();
        checks.push(Check::new(
            format!("diagonal_power_alpha_{alpha}"),
            report.predicted_branch == Branch::Power && error < EXPONENT_TOL,
            json!({ "n": n, "alpha": alpha, "predicted": report.predicted_exponent, "fitted": report.fitted_exponent }),
        ));
    }
    let log = verify_diagonal(n, -nf, &radii)?;
    let lo = log.log_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = max_of(log.log_ratios.iter().copied());
    checks.push(Check::new(
        format!("diagonal_log_alpha_{}", -nf),
        log.predicted_branch == Branch::Logarithmic && lo > 0.0 && hi <= LOG_RATIO_SPREAD * lo,
        json!({ "n": n, "ratio_min": lo, "ratio_max": hi, "allowed_spread": LOG_RATIO_SPREAD }),
    ));
    let bounded = verify_diagonal(n, -nf - 1.0, &radii)?;
    checks.push(Check::new(
        format!("diagonal_bounded_alpha_{}", -nf - 1.0),
        bounded.predicted_branch == Branch::Bounded && bounded.fit.branch == Branch::Bounded,
        json!({ "n": n, "fitted_branch": bounded.fit.branch, "fitted_exponent": bounded.fit.exponent }),
    ));
    Ok(checks)
}

fn radial_suite(n: Option<usize>, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let dims = dimensions(n, &[2, 3, 5]);
    let mut worst_identity: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for i in 0..samples {
        let n = dims[i % dims.len()];
        let f = Expansion::random(n, IDENTITY_DEGREE, rng)?;
        let s = rng.gen_range(-0.9..2.0);
        let t = rng.gen_range(-0.5..2.0);
        let z = rng.gen_range(-0.5..2.0);
        worst_identity = worst_identity
            .max(verify_inverse(s, t, &f))
            .max(verify_additivity(s, t, z, &f));

        let rx = rng.gen_range(0.0..0.8);
        let x = random_point(rng, n, rx)?;
        let ry = rng.gen_range(0.0..0.8);
        let y = random_point(rng, n, ry)?;
        let report = verify_kernel_shift(s, t, &x, &y)?;
        worst_shift = worst_shift.max(report.deviation / report.direct.abs().max(1.0));
    }
    Ok(vec![
        Check::new(
            "inverse_and_additivity",
            worst_identity < IDENTITY_TOL,
            json!({ "expansions": samples, "degree": IDENTITY_DEGREE, "max_deviation": worst_identity, "tolerance": IDENTITY_TOL }),
        ),
        Check::new(
            "kernel_shift",
            worst_shift < KERNEL_SHIFT_TOL,
            json!({ "pairs": samples, "max_relative_deviation": worst_shift, "tolerance": KERNEL_SHIFT_TOL }),
        ),
    ])
}

fn forelli_suite(n: Option<usize>, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kernel in [true, false] {
        for branch in [Branch::Bounded, Branch::Logarithmic, Branch::Power] {
            let draws: Vec<ForelliDraw> = (0..samples)
                .map(|_| {
                    let dim = n.unwrap_or_else(|| rng.gen_range(2..=4));
                    ForelliDraw::sample(kernel, branch, dim, rng)
                })
                .collect();
            let reports = draws
                .par_iter()
                .map(|d| Ok(d.growth(&d.ladder())?))
                .collect::<Result<Vec<_>>>()?;
            let failures: Vec<Json> = draws
                .iter()
                .zip(&reports)
                .filter(|(_, r)| !r.agrees(EXPONENT_TOL))
                .map(|(d, r)| json!({ "draw": d, "predicted": r.predicted_exponent, "fitted_branch": r.fit.branch, "fitted": r.fit.exponent }))
                .collect();
            let worst = max_of(
                reports
                    .iter()
                    .filter(|r| r.predicted_branch == Branch::Power)
                    .map(|r| (r.fit.exponent - r.predicted_exponent).abs()),
            );
            let integral = if kernel { "kernel" } else { "bracket" };
            let branch_name = match branch {
                Branch::Bounded => "bounded",
                Branch::Logarithmic => "logarithmic",
                Branch::Power => "power",
            };
            checks.push(Check::new(
                format!("{integral}_{branch_name}"),
                failures.is_empty(),
                json!({ "draws": samples, "max_exponent_error": worst, "tolerance": EXPONENT_TOL, "failures": failures }),
            ));
        }
    }
    Ok(checks)
}

fn schur_suite(theorem: Option<&str>, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let cases = match theorem {
        None => vec![Case::PLeQ, Case::QLtP],
        Some(label) => match Case::from_label(label)? {
            case @ (Case::PLeQ | Case::QLtP) => vec![case],
            _ => bail!("Schur certificates exist for theorems 1.1 and 1.3, not {label}"),
        },
    };
    let mut checks = Vec::new();
    for case in cases {
        let inside: Vec<Params<_>> = (0..samples)
            .map(|_| match case {
                Case::PLeQ => sample_certificate_11(rng),
                _ => sample_certificate_13(rng),
            })
            .collect();
        let outcomes = inside
            .par_iter()
            .map(|params| {
                let (cert, verification) = match case {
                    Case::PLeQ => {
                        let cert = build_certificate_11(params)?;
                        let v = verify_certificate_11(&cert)?;
                        (cert, v)
                    }
                    _ => {
                        let cert = build_certificate_13(params)?;
                        let v = verify_certificate_13(&cert)?;
                        (cert, v)
                    }
                };
                let exact = cert.arithmetic == bbk_core::classifier::Arithmetic::Exact;
                Ok((cert.holds() && exact, verification.passed, cert.c_effective))
            })
            .collect::<Result<Vec<_>>>()?;
        let symbolic = outcomes.iter().filter(|o| o.0).count();
        let numeric = outcomes.iter().filter(|o| o.1).count();
        checks.push(Check::new(
            format!("certificates_{}", case.label()),
            symbolic == samples && numeric == samples,
            json!({ "samples": samples, "symbolic_pass": symbolic, "numeric_pass": numeric }),
        ));

        let outside: Vec<Params<_>> = (0..samples).map(|_| sample_outside(case, rng)).collect();
        let refused = outside
            .iter()
            .filter(|params| match case {
                Case::PLeQ => build_certificate_11(*params).is_err(),
                _ => build_certificate_13(*params).is_err(),
            })
            .count();
        let classified_unbounded = outside
            .iter()
            .filter(|params| classify(*params).map(|v| !v.bounded).unwrap_or(false))
            .count();
        checks.push(Check::new(
            format!("outside_refused_{}", case.label()),
            refused == samples && classified_unbounded == samples,
            json!({ "samples": samples, "refused": refused, "classified_unbounded": classified_unbounded }),
        ));
    }
    Ok(checks)
}

fn jroute_suite(theorem: Option<&str>, samples: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let routes: Vec<JRoute> = match theorem {
        None => JRoute::ALL.to_vec(),
        Some(label) => {
            let routes: Vec<JRoute> = JRoute::ALL
                .into_iter()
                .filter(|r| r.label() == label || r.case().label() == label)
                .collect();
            anyhow::ensure!(!routes.is_empty(), "no J route for {label:?}");
            routes
        }
    };
    let mut checks = Vec::new();
    for route in routes {
        let tuples: Vec<Params<_>> = (0..samples).map(|_| sample_j_route(route, rng)).collect();
        let reports = tuples
            .par_iter()
            .map(|params| Ok(verify_j_route(route, params)?))
            .collect::<Result<Vec<_>>>()?;
        let bounded = reports.iter().filter(|r| r.bounded).count();
        let branches = reports.iter().filter(|r| r.branch_agrees).count();
        let mut by_branch = [0usize; 3];
        for r in &reports {
            by_branch[r.branch as usize] += 1;
        }
        checks.push(Check::new(
            format!("route_{}", route.label()),
            bounded == samples && branches == samples,
            json!({
                "samples": samples,
                "sup_certified": bounded,
                "branch_agrees": branches,
                "branches": { "bounded": by_branch[0], "logarithmic": by_branch[1], "power": by_branch[2] },
            }),
        ));
    }
    Ok(checks)
}

/// `0.5, 0.55, ..., 0.95`.
pub fn probe_radii() -> Vec<f64> {
    (0..=9).map(|k| 0.5 + 0.05 * k as f64).collect()
}

fn probe_suite(n: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for beta in [0.0, 1.0] {
        let probe = log_blowup_probe(n, beta, &probe_radii())?;
        let increasing = probe.values.windows(2).all(|w| w[1] > w[0]);
        let growth = probe.values[probe.values.len() - 1] / probe.values[0];
        let excluded = !classify(&Params::float(n, beta, beta, beta, beta, 1.0, 1.0))?.bounded;
        checks.push(Check::new(
            format!("blowup_beta_{beta}"),
            probe.ratio_min > 1.0 / PROBE_BAND && probe.ratio_max < PROBE_BAND && increasing && excluded,
            json!({
                "n": n,
                "ratio_min": probe.ratio_min,
                "ratio_max": probe.ratio_max,
                "band": [1.0 / PROBE_BAND, PROBE_BAND],
                "values_increasing": increasing,
                "growth_factor": growth,
                "classifier_excludes": excluded,
                "values": probe.values,
            }),
        ));
    }
    Ok(checks)
}

/// Sample points for `bbk probe diagonal`.
pub fn diagonal_probe(n: usize, alpha: f64, radii: &[f64]) -> Result<Json> {
    let report = verify_diagonal(n, alpha, radii)?;
    Ok(serde_json::to_value(report)?)
}

/// Sample points for `bbk probe blowup`.
pub fn blowup_probe(n: usize, beta: f64, radii: &[f64]) -> Result<Json> {
    Ok(serde_json::to_value(log_blowup_probe(n, beta, radii)?)?)
}
