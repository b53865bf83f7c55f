//! Text format for a single polynomial.
//!
//! ```text
//! # (1 - x)^2
//! degree: 2
//! 0x1p0
//! -0x1p1
//! 0x1p0
//! ```
//!
//! One coefficient per line in ascending degree, `#` starts a comment, and the
//! optional `degree:` header must match the coefficient count. Decimal
//! literals are accepted on input; output is always hexadecimal.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hexfloat::{format_hex, parse_float};
use crate::polyval::Polynomial;

pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    let mut declared: Option<(usize, usize)> = None;
    let mut coeffs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("degree:") {
            if declared.is_some() || !coeffs.is_empty() {
                return Err(Error::Parse { line: line_no, message: "degree header must come first".into() });
            }
            let n = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid degree {:?}", rest.trim()),
            })?;
            declared = Some((n, line_no));
            continue;
        }
        let v = parse_float(line).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("invalid coefficient {line:?}"),
        })?;
        coeffs.push(v);
    }
    if let Some((n, line)) = declared {
        if coeffs.len() != n + 1 {
            return Err(Error::Parse {
                line,
                message: format!("degree {n} needs {} coefficients, found {}", n + 1, coeffs.len()),
            });
        }
    }
    Polynomial::new(coeffs).map_err(|e| Error::Parse { line: 0, message: e.to_string() })
}

pub fn format_polynomial(p: &Polynomial) -> String {
    let mut out = format!("degree: {}\n", p.degree());
    for &c in p.coeffs() {
        let _ = writeln!(out, "{}", format_hex(c));
    }
    out
}
