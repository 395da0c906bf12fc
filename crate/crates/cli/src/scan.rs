//! Phase-diagram scans written as versioned CSV.

use std::io::Write;

use anyhow::{Context, Result};
use bbk_core::classifier::{classify, classify_values, Params, Value, Verdict};
use rayon::prelude::*;

use crate::grid::Grid;

pub const SCHEMA: &str = "v1";

pub const HEADER: [&str; 16] = [
    "schema",
    "n",
    "b",
    "c",
    "alpha",
    "beta",
    "p",
    "q",
    "bounded",
    "theorem",
    "prerequisite_ok",
    "critical_c",
    "boundary_included",
    "margin",
    "arithmetic",
    "seed",
];

/// Arithmetic label of rows from a grid mixing exact and floating-point entries.
pub const MIXED_ARITHMETIC: &str = "float_mixed_input";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanSummary {
    pub rows: usize,
    pub bounded: usize,
    pub downgraded: bool,
}

fn verdict(params: &Params<Value>, downgraded: bool) -> Result<Verdict> {
    let result = if downgraded {
        classify(&params.to_float())
    } else {
        classify_values(params)
    };
    result.with_context(|| {
        format!(
            "tuple n={} b={} c={} alpha={} beta={} p={} q={}",
            params.n, params.b, params.c, params.alpha, params.beta, params.p, params.q
        )
    })
}

/// Classify every tuple of the grid in parallel and write rows in grid order.
pub fn run_scan(grid: &Grid, seed: u64, pool: &rayon::ThreadPool, out: impl Write) -> Result<ScanSummary> {
    anyhow::ensure!(!grid.is_empty(), "empty grid");
    let downgraded = grid.is_mixed();
    let tuples = grid.tuples();
    let verdicts: Vec<Verdict> =
        pool.install(|| tuples.par_iter().map(|t| verdict(t, downgraded)).collect::<Result<_>>())?;

    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;
    let seed = seed.to_string();
    let mut bounded = 0;
    for (t, v) in tuples.iter().zip(&verdicts) {
        bounded += usize::from(v.bounded);
        let arithmetic = if downgraded {
            MIXED_ARITHMETIC.to_string()
        } else {
            v.arithmetic.to_string()
        };
        writer.write_record([
            SCHEMA.to_string(),
            t.n.to_string(),
            t.b.to_string(),
            t.c.to_string(),
            t.alpha.to_string(),
            t.beta.to_string(),
            t.p.to_string(),
            t.q.to_string(),
            v.bounded.to_string(),
            v.theorem.label().to_string(),
            v.prerequisite_ok.to_string(),
            v.critical_c.to_string(),
            v.boundary_included.to_string(),
            v.margin.to_string(),
            arithmetic,
            seed.clone(),
        ])?;
    }
    writer.flush()?;
    Ok(ScanSummary {
        rows: tuples.len(),
        bounded,
        downgraded,
    })
}
