//! Axis specifications for scans: a single value, a comma list, or `start:stop:step`.

use anyhow::{bail, ensure, Context, Result};
use bbk_core::classifier::{Exponent, Params, Value};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Largest number of tuples a scan will enumerate.
pub const MAX_TUPLES: usize = 2_000_000;

fn value_range(start: Value, stop: Value, step: Value) -> Result<Vec<Value>> {
    match (&start, &stop, &step) {
        (Value::Exact(a), Value::Exact(b), Value::Exact(h)) => {
            ensure!(!h.is_zero(), "range step must be nonzero");
            let count = ((b - a) / h).floor();
            if count.is_negative() {
                return Ok(Vec::new());
            }
            let count: usize = count
                .to_integer()
                .try_into()
                .ok()
                .filter(|c| *c < MAX_TUPLES)
                .context("range has too many points")?;
            Ok((0..=count)
                .map(|i| Value::Exact(a + h * BigRational::from_integer(i.into())))
                .collect())
        }
        _ => {
            let (a, b, h) = (start.to_f64(), stop.to_f64(), step.to_f64());
            ensure!(h != 0.0, "range step must be nonzero");
            let span = (b - a) / h;
            if span < -1e-9 {
                return Ok(Vec::new());
            }
            let count = (span + 1e-9).floor();
            ensure!(count < MAX_TUPLES as f64, "range has too many points");
            Ok((0..=count as usize).map(|i| Value::Float(a + h * i as f64)).collect())
        }
    }
}

/// Values of one real axis; `inf` is accepted only when `exponent` is set.
pub fn parse_axis(text: &str, exponent: bool) -> Result<Vec<Exponent<Value>>> {
    let text = text.trim();
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        ensure!(parts.len() == 3, "range {text:?} must read start:stop:step");
        let parse = |s: &str| Value::parse(s).with_context(|| format!("in range {text:?}"));
        value_range(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)?
            .into_iter()
            .map(Exponent::Finite)
            .collect()
    } else {
        text.split(',')
            .map(|item| {
                if exponent {
                    Exponent::parse(item)
                } else {
                    Value::parse(item).map(Exponent::Finite)
                }
                .with_context(|| format!("bad value {item:?}"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    ensure!(!values.is_empty(), "axis {text:?} is empty");
    Ok(values)
}

fn finite_axis(text: &str) -> Result<Vec<Value>> {
    parse_axis(text, false)?
        .into_iter()
        .map(|e| match e {
            Exponent::Finite(v) => Ok(v),
            Exponent::Infinity => bail!("infinite value in {text:?}"),
        })
        .collect()
}

/// Dimensions: a list of integers or an integer range `start:stop[:step]`.
pub fn parse_dimensions(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    let dims: Vec<usize> = if text.contains(':') {
        let parts = text
            .split(':')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad dimension range {text:?}"))
            })
            .collect::<Result<Vec<_>>>()?;
        match parts[..] {
            [a, b] => (a..=b).collect(),
            [a, b, h] if h > 0 => (a..=b).step_by(h).collect(),
            _ => bail!("dimension range {text:?} must read start:stop[:step] with a positive step"),
        }
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .with_context(|| format!("bad dimension {s:?}"))
            })
            .collect::<Result<Vec<_>>>()?
    };
    ensure!(!dims.is_empty(), "dimension axis {text:?} is empty");
    ensure!(dims.iter().all(|n| *n >= 2), "dimensions must be at least 2");
    Ok(dims)
}

/// A rectangular grid in `(n, b, c, α, β, p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub b: Vec<Value>,
    pub c: Vec<Value>,
    pub alpha: Vec<Value>,
    pub beta: Vec<Value>,
    pub p: Vec<Exponent<Value>>,
    pub q: Vec<Exponent<Value>>,
}

/// Axis texts in the order `n, b, c, alpha, beta, p, q`.
pub struct AxisTexts<'a> {
    pub n: &'a str,
    pub b: &'a str,
    pub c: &'a str,
    pub alpha: &'a str,
    pub beta: &'a str,
    pub p: &'a str,
    pub q: &'a str,
}

impl Grid {
    pub fn parse(axes: AxisTexts<'_>) -> Result<Self> {
        let grid = Grid {
            n: parse_dimensions(axes.n).context("axis n")?,
            b: finite_axis(axes.b).context("axis b")?,
            c: finite_axis(axes.c).context("axis c")?,
            alpha: finite_axis(axes.alpha).context("axis alpha")?,
            beta: finite_axis(axes.beta).context("axis beta")?,
            p: parse_axis(axes.p, true).context("axis p")?,
            q: parse_axis(axes.q, true).context("axis q")?,
        };
        let total = grid.len();
        ensure!(total <= MAX_TUPLES, "grid has {total} tuples, more than {MAX_TUPLES}");
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        [
            self.n.len(),
            self.b.len(),
            self.c.len(),
            self.alpha.len(),
            self.beta.len(),
            self.p.len(),
            self.q.len(),
        ]
        .iter()
        .fold(1usize, |acc, k| acc.saturating_mul(*k))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Some but not all entries exact.
    pub fn is_mixed(&self) -> bool {
        let finite = |axis: &[Exponent<Value>]| {
            axis.iter()
                .filter_map(|e| match e {
                    Exponent::Finite(v) => Some(v.is_exact()),
                    Exponent::Infinity => None,
                })
                .collect::<Vec<_>>()
        };
        let flags: Vec<bool> = [&self.b, &self.c, &self.alpha, &self.beta]
            .iter()
            .flat_map(|axis| axis.iter().map(Value::is_exact))
            .chain(finite(&self.p))
            .chain(finite(&self.q))
            .collect();
        flags.iter().any(|e| *e) && flags.iter().any(|e| !*e)
    }

    /// Tuples with `c` varying fastest, then `q`, `p`, `β`, `α`, `b`, `n`.
    pub fn tuples(&self) -> Vec<Params<Value>> {
        let mut out = Vec::with_capacity(self.len());
        for &n in &self.n {
            for b in &self.b {
                for alpha in &self.alpha {
                    for beta in &self.beta {
                        for p in &self.p {
                            for q in &self.q {
                                for c in &self.c {
                                    out.push(Params {
                                        n,
                                        b: b.clone(),
                                        c: c.clone(),
                                        alpha: alpha.clone(),
                                        beta: beta.clone(),
                                        p: p.clone(),
                                        q: q.clone(),
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(values: &[Exponent<Value>]) -> Vec<String> {
        values.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn exact_ranges_hit_their_endpoints() {
        let axis = parse_axis("-1:1:1/2", false).unwrap();
        assert_eq!(texts(&axis), ["-1", "-1/2", "0", "1/2", "1"]);
        let axis = parse_axis("1:0:-1/4", false).unwrap();
        assert_eq!(axis.len(), 5);
        assert!(parse_axis("1:0:1/4", false).is_err());
        assert!(parse_axis("0:1:0", false).is_err());
    }

    #[test]
    fn lists_exponents_and_floats() {
        assert_eq!(texts(&parse_axis("1, 2, inf", true).unwrap()), ["1", "2", "inf"]);
        assert!(finite_axis("inf").is_err());
        let axis = parse_axis("0:1e0:2.5e-1", false).unwrap();
        assert_eq!(axis.len(), 5);
        assert!(matches!(axis[4], Exponent::Finite(Value::Float(v)) if (v - 1.0).abs() < 1e-15));
        assert_eq!(parse_dimensions("2:6:2").unwrap(), vec![2, 4, 6]);
        assert!(parse_dimensions("1,2").is_err());
    }

    #[test]
    fn grid_order_and_mixing() {
        let grid = Grid::parse(AxisTexts {
            n: "3",
            b: "0",
            c: "0,1",
            alpha: "0",
            beta: "0",
            p: "1,2",
            q: "inf",
        })
        .unwrap();
        let tuples = grid.tuples();
        assert_eq!(tuples.len(), 4);
        assert_eq!(tuples[1].c.to_string(), "1");
        assert_eq!(tuples[2].p.to_string(), "2");
        assert!(!grid.is_mixed());
        let mixed = Grid {
            c: vec![Value::Float(0.5)],
            ..grid
        };
        assert!(mixed.is_mixed());
    }
}
