//! Text field files and named weight presets.
//!
//! A field file is a header line `torus L=<float> N=<int>` followed by `N`
//! lines of `N` whitespace-separated values in row-major order.

use std::fmt::Write as _;
use std::path::Path;

use super::{ScalarField, TorusGrid, WeightField};
use crate::error::{Error, Result};

pub fn format_field(field: &ScalarField) -> String {
    let grid = field.grid();
    let n = grid.n();
    let mut out = String::with_capacity(n * n * 25 + 32);
    writeln!(out, "torus L={} N={}", grid.side_length(), n).unwrap();
    for row in field.values().chunks(n) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_field(text: &str) -> Result<ScalarField> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty field file"))?;
    let (l, n) = parse_header(header)?;
    let grid = TorusGrid::new(l, n).map_err(|e| parse_err(1, &e.to_string()))?;

    let mut values = Vec::with_capacity(grid.len());
    let mut rows = 0;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if rows == n {
            return Err(parse_err(lineno, "more than N data rows"));
        }
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(lineno, &format!("not a number: {tok:?}")))?;
            values.push(v);
        }
        if values.len() - before != n {
            return Err(parse_err(
                lineno,
                &format!("expected {n} values, found {}", values.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != n {
        return Err(parse_err(
            text.lines().count(),
            &format!("expected {n} data rows, found {rows}"),
        ));
    }
    ScalarField::new(grid, values)
}

fn parse_header(header: &str) -> Result<(f64, usize)> {
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("torus") {
        return Err(parse_err(1, "header must start with `torus`"));
    }
    let mut l = None;
    let mut n = None;
    for tok in tokens {
        if let Some(v) = tok.strip_prefix("L=") {
            l = Some(v.parse::<f64>().map_err(|_| parse_err(1, "bad L"))?);
        } else if let Some(v) = tok.strip_prefix("N=") {
            n = Some(v.parse::<usize>().map_err(|_| parse_err(1, "bad N"))?);
        } else {
            return Err(parse_err(1, &format!("unexpected header token {tok:?}")));
        }
    }
    match (l, n) {
        (Some(l), Some(n)) => Ok((l, n)),
        _ => Err(parse_err(1, "header needs both L= and N=")),
    }
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::Parse {
        line,
        message: message.to_string(),
    }
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    parse_field(&std::fs::read_to_string(path)?)
}

pub fn write_field(path: impl AsRef<Path>, field: &ScalarField) -> Result<()> {
    std::fs::write(path, format_field(field))?;
    Ok(())
}

/// Named weight families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightPreset {
    /// `ρ ≡ c`, `c > 0`.
    Constant(f64),
    /// `ρ = 1 + a·cos(2πx/L)·cos(2πy/L)`, `|a| < 1`.
    Cosine(f64),
    /// `ρ = 1 + a·exp(−d²/s²)` with `d` the periodic distance to the torus
    /// midpoint; `a > −1`, `s > 0`.
    Bump { amplitude: f64, width: f64 },
}

impl WeightPreset {
    /// Parses `const:<c>`, `cosine:<a>` or `bump:<a>:<s>`. Returns `Ok(None)`
    /// when the string is not a preset name at all (it may be a file path).
    pub fn parse(spec: &str) -> Result<Option<Self>> {
        let mut parts = spec.split(':');
        let kind = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidArgument(format!("bad number {s:?} in {spec:?}")))
        };
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{kind} preset takes {k} argument(s): {spec:?}"
                )))
            }
        };
        let preset = match kind {
            "const" => {
                arity(1)?;
                let c = num(args[0])?;
                if c <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "const weight must be > 0: {spec:?}"
                    )));
                }
                Self::Constant(c)
            }
            "cosine" => {
                arity(1)?;
                let a = num(args[0])?;
                if a.abs() >= 1.0 {
                    return Err(Error::InvalidArgument(format!(
                        "cosine needs |a| < 1: {spec:?}"
                    )));
                }
                Self::Cosine(a)
            }
            "bump" => {
                arity(2)?;
                let (a, s) = (num(args[0])?, num(args[1])?);
                if a <= -1.0 || s <= 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "bump needs a > -1 and s > 0: {spec:?}"
                    )));
                }
                Self::Bump {
                    amplitude: a,
                    width: s,
                }
            }
            _ => return Ok(None),
        };
        Ok(Some(preset))
    }

    pub fn build(&self, grid: TorusGrid) -> Result<WeightField> {
        let l = grid.side_length();
        let tau = 2.0 * std::f64::consts::PI / l;
        let field = match *self {
            Self::Constant(c) => ScalarField::constant(grid, c),
            Self::Cosine(a) => {
                ScalarField::from_fn(grid, |x, y| 1.0 + a * (tau * x).cos() * (tau * y).cos())?
            }
            Self::Bump { amplitude, width } => {
                let mid = (0.5 * l, 0.5 * l);
                ScalarField::from_fn(grid, |x, y| {
                    let d = grid.periodic_distance((x, y), mid);
                    1.0 + amplitude * (-(d * d) / (width * width)).exp()
                })?
            }
        };
        WeightField::new(field)
    }
}

impl std::str::FromStr for WeightPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)?
            .ok_or_else(|| Error::InvalidArgument(format!("unknown weight preset {s:?}")))
    }
}
