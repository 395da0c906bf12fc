//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit status on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use anyhow::{ensure, Result};
use bbk_cli::suites::{diagonal_checks, poisson_check, run_suite, Check, Suite, SuiteOptions};
use bbk_cli::thread_pool;
use bbk_core::classifier::{classify, monotone_in_c_check, Case, Exponent, Params};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const TRUTH_TABLE_MIN: usize = 28;
const TRUTH_TABLE_PER_CASE: usize = 4;
const POISSON_PAIRS: usize = 1000;
const FORELLI_DRAWS: usize = 20;
const IDENTITY_EXPANSIONS: usize = 30;
const SCHUR_SAMPLES: usize = 100;
const J_SAMPLES: usize = 20;
const MONOTONE_TUPLES: usize = 10_000;

const LIMIT_TRUTH_TABLE: Duration = Duration::from_secs(1);
const LIMIT_POISSON: Duration = Duration::from_secs(30);
const LIMIT_DIAGONAL: Duration = Duration::from_secs(60);
const LIMIT_FORELLI: Duration = Duration::from_secs(300);
const LIMIT_SCHUR: Duration = Duration::from_secs(300);

struct Outcome {
    passed: bool,
    summary: String,
}

fn criterion(number: u32, title: &str, limit: Option<Duration>, run: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let outcome = run().unwrap_or_else(|e| Outcome {
        passed: false,
        summary: format!("error: {e:#}"),
    });
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let passed = outcome.passed && in_time;
    let budget = limit.map(|l| format!(" of {l:?}")).unwrap_or_default();
    println!(
        "criterion {number:>2} {}: {title}: {} [{elapsed:.2?}{budget}]",
        if passed { "PASS" } else { "FAIL" },
        outcome.summary
    );
    passed
}

fn from_checks(checks: &[Check]) -> Outcome {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    Outcome {
        passed: failed.is_empty(),
        summary: if failed.is_empty() {
            format!("{} checks passed", checks.len())
        } else {
            format!("failed checks: {}", failed.join(", "))
        },
    }
}

fn suite(suite: Suite, samples: usize, theorem: Option<&str>) -> Result<Outcome> {
    let options = SuiteOptions {
        n: None,
        samples: Some(samples),
        theorem: theorem.map(str::to_string),
        seed: SEED,
    };
    let report = run_suite(suite, &options, &thread_pool()?)?;
    let mut outcome = from_checks(&report.checks);
    let details: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{}={}", c.name, c.detail))
        .collect();
    outcome.summary = format!("{}; {}", outcome.summary, details.join("; "));
    Ok(outcome)
}

fn rational(text: &str) -> BigRational {
    bbk_core::classifier::parse_rational(text).expect("valid rational")
}

fn exponent(text: &str) -> Exponent<BigRational> {
    if text == "inf" {
        Exponent::Infinity
    } else {
        Exponent::Finite(rational(text))
    }
}

/// `(n, b, c, α, β, p, q, bounded)` with verdicts worked out by hand from the case conditions.
type Row = (
    usize,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    bool,
);

const TRUTH_TABLE: [Row; 36] = [
    // 1 < p ≤ q < ∞: α + 1 < p(b + 1) and c ≤ b + (n+β)/q - (n+α)/p
    (3, "0", "0", "0", "0", "2", "2", true),
    (3, "0", "1/10", "0", "0", "2", "2", false),
    (3, "0", "-1", "1", "0", "2", "2", false),
    (2, "1", "3/4", "0", "1", "2", "4", true),
    (3, "0", "-5", "0", "-1", "2", "2", false),
    // p = 1 ≤ q < ∞: α < b and c ≤ b + (n+β)/q - (n+α), or α ≤ b and c < that value
    (3, "0", "0", "0", "0", "1", "1", false),
    (3, "0", "-1/2", "0", "0", "1", "1", true),
    (3, "1", "1", "0", "0", "1", "1", true),
    (3, "0", "-10", "1/2", "0", "1", "2", false),
    (3, "0", "-3/2", "0", "0", "1", "2", false),
    (3, "0", "-2", "0", "0", "1", "2", true),
    // 1 ≤ q < p < ∞: α + 1 < p(b + 1) and c < b + (1+β)/q - (1+α)/p
    (3, "0", "1/4", "0", "0", "4", "2", false),
    (3, "0", "0", "0", "0", "4", "2", true),
    (3, "0", "0", "0", "0", "2", "1", true),
    (3, "0", "-10", "1", "0", "2", "1", false),
    // 1 < p < q = ∞: α + 1 < p(b + 1) and c ≤ b + β - (n+α)/p, strictly when β = 0
    (3, "1/2", "-1", "0", "0", "2", "inf", false),
    (3, "1/2", "-3/2", "0", "0", "2", "inf", true),
    (3, "1/2", "0", "0", "1", "2", "inf", true),
    (3, "1/2", "1/10", "0", "1", "2", "inf", false),
    (3, "1/2", "-10", "0", "-1/2", "2", "inf", false),
    // p = 1, q = ∞: α < b and c ≤ b + β - (n+α), or α ≤ b and c < that value
    (3, "0", "-3", "0", "0", "1", "inf", false),
    (3, "0", "-4", "0", "0", "1", "inf", true),
    (3, "1", "-2", "0", "0", "1", "inf", true),
    (3, "0", "-10", "1", "0", "1", "inf", false),
    // p = ∞ > q: α - 1 < b and c < b + (β+1)/q - α
    (3, "0", "1/2", "0", "0", "inf", "2", false),
    (3, "0", "0", "0", "0", "inf", "2", true),
    (3, "0", "-10", "1", "0", "inf", "2", false),
    (3, "0", "1", "0", "1", "inf", "1", true),
    (3, "0", "-10", "0", "-1", "inf", "1", false),
    // p = q = ∞: α - 1 < b and c ≤ b + β - α, strictly when β = 0
    (3, "0", "0", "0", "0", "inf", "inf", false),
    (3, "0", "-1/10", "0", "0", "inf", "inf", true),
    (3, "0", "1", "0", "1", "inf", "inf", true),
    (3, "0", "11/10", "0", "1", "inf", "inf", false),
    (3, "0", "-5", "1", "1", "inf", "inf", false),
    (3, "0", "-5", "0", "-1/2", "inf", "inf", false),
    (4, "2", "3/2", "0", "1/2", "inf", "inf", true),
];

fn truth_table() -> Result<Outcome> {
    let mut per_case = std::collections::BTreeMap::<Case, usize>::new();
    let mut mismatches = Vec::new();
    for (i, &(n, b, c, alpha, beta, p, q, expected)) in TRUTH_TABLE.iter().enumerate() {
        let params = Params {
            n,
            b: rational(b),
            c: rational(c),
            alpha: rational(alpha),
            beta: rational(beta),
            p: exponent(p),
            q: exponent(q),
        };
        let verdict = classify(&params)?;
        *per_case.entry(verdict.theorem).or_default() += 1;
        if verdict.bounded != expected {
            mismatches.push(i);
        }
    }
    let covered = Case::ALL
        .iter()
        .all(|c| per_case.get(c).copied().unwrap_or(0) >= TRUTH_TABLE_PER_CASE);
    Ok(Outcome {
        passed: mismatches.is_empty() && covered && TRUTH_TABLE.len() >= TRUTH_TABLE_MIN,
        summary: format!(
            "{} tuples, {} mismatches {mismatches:?}, every case covered at least {TRUTH_TABLE_PER_CASE} times: {covered}",
            TRUTH_TABLE.len(),
            mismatches.len()
        ),
    })
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let den = [1i64, 2, 3, 4, 6][rng.gen_range(0..5)];
    BigRational::new(BigInt::from(rng.gen_range(-12 * den..=12 * den)), BigInt::from(den))
}

fn random_exponent(rng: &mut ChaCha8Rng) -> Exponent<BigRational> {
    match rng.gen_range(0..4) {
        0 => Exponent::Finite(BigRational::from_integer(1.into())),
        1 => Exponent::Infinity,
        _ => Exponent::Finite(BigRational::new(BigInt::from(rng.gen_range(4..=32)), BigInt::from(4))),
    }
}

fn monotonicity() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut violations, mut bounded) = (0, 0);
    for _ in 0..MONOTONE_TUPLES {
        let params = Params {
            n: rng.gen_range(2..=8),
            b: random_rational(&mut rng),
            c: random_rational(&mut rng),
            alpha: random_rational(&mut rng),
            beta: random_rational(&mut rng),
            p: random_exponent(&mut rng),
            q: random_exponent(&mut rng),
        };
        let (critical, _) = bbk_core::classifier::critical_c(&params)?;
        let params = if rng.gen_bool(0.5) {
            params.with_c(critical + BigRational::new(BigInt::from(rng.gen_range(-4..=1)), BigInt::from(8)))
        } else {
            params
        };
        bounded += usize::from(classify(&params)?.bounded);
        let lower = params.c.clone() - BigRational::new(BigInt::from(rng.gen_range(1..=80)), BigInt::from(8));
        if !monotone_in_c_check(&params, lower)? {
            violations += 1;
        }
    }
    ensure!(
        bounded > MONOTONE_TUPLES / 10,
        "only {bounded} bounded tuples; the sweep is nearly vacuous"
    );
    Ok(Outcome {
        passed: violations == 0,
        summary: format!("{MONOTONE_TUPLES} tuples ({bounded} bounded), {violations} violations"),
    })
}

fn scan_output(threads: Option<&str>, config: &std::path::Path) -> Result<Vec<u8>> {
    let mut command = Command::new(env!("CARGO_BIN_EXE_bbk"));
    command.args(["scan", "--config", config.to_str().expect("utf-8 path")]);
    if let Some(threads) = threads {
        command.env("BBK_THREADS", threads);
    }
    let output = command.output()?;
    ensure!(
        output.status.success(),
        "scan failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    Ok(output.stdout)
}

fn determinism() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("bbk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let config = dir.join("scan.cfg");
    std::fs::write(
        &config,
        "n = 2:4\nb = -1:1:1/2\nc = -4:2:1/4\nalpha = -1/2,0,1\nbeta = 0,1/2\np = 1,3/2,2,4,inf\nq = 1,2,inf\nseed = 7\n",
    )?;
    let runs = [
        scan_output(None, &config)?,
        scan_output(None, &config)?,
        scan_output(Some("1"), &config)?,
    ];
    std::fs::remove_dir_all(&dir)?;
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    let rows = runs[0].iter().filter(|b| **b == b'\n').count() - 1;
    Ok(Outcome {
        passed: identical && rows > 0,
        summary: format!("{rows} rows over three runs (one single-threaded), byte-identical: {identical}"),
    })
}

fn main() -> ExitCode {
    let results = [
        criterion(1, "classifier truth table", Some(LIMIT_TRUTH_TABLE), truth_table),
        criterion(
            2,
            "kernel series against the extended Poisson kernel",
            Some(LIMIT_POISSON),
            || {
                let mut rng = ChaCha8Rng::seed_from_u64(SEED);
                Ok(from_checks(&[poisson_check(&[2, 3, 4], POISSON_PAIRS, &mut rng)?]))
            },
        ),
        criterion(3, "diagonal growth of the kernel", Some(LIMIT_DIAGONAL), || {
            Ok(from_checks(&diagonal_checks(3)?))
        }),
        criterion(4, "Forelli-Rudin branches and exponents", Some(LIMIT_FORELLI), || {
            suite(Suite::Forelli, FORELLI_DRAWS, None)
        }),
        criterion(5, "radial operator identities and kernel shift", None, || {
            suite(Suite::Radial, IDENTITY_EXPANSIONS, None)
        }),
        criterion(6, "Schur certificates and refusals", Some(LIMIT_SCHUR), || {
            suite(Suite::Schur, SCHUR_SAMPLES, None)
        }),
        criterion(7, "J-function routes", None, || suite(Suite::Jroute, J_SAMPLES, None)),
        criterion(8, "logarithmic blow-up probe", None, || suite(Suite::Probes, 0, None)),
        criterion(9, "monotonicity in c", None, monotonicity),
        criterion(10, "scan determinism", None, determinism),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
