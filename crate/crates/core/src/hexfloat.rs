//! Lowercase hexadecimal floating point literals (`0x1.8p1`), the bit-exact
//! text form used by every file this crate writes.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::oracle::ExactScalar;

/// Formats a finite value as `[-]0x1.<hex>p<exp>` (normal) or
/// `[-]0x0.<hex>p-1022` (subnormal). Zero is `0x0p0`.
pub fn format_hex(v: f64) -> String {
    assert!(v.is_finite(), "hex literals are only emitted for finite values");
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if biased == 0 && frac == 0 {
        return format!("{sign}0x0p0");
    }
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    if digits.is_empty() {
        format!("{sign}0x{lead}p{exp}")
    } else {
        format!("{sign}0x{lead}.{digits}p{exp}")
    }
}

/// Parses a hexadecimal literal such as `0x1.8p1`, `-0X.4P-3` or `0x10`.
/// Values that need more than 53 bits are rounded to nearest-even.
pub fn parse_hex(s: &str) -> Option<f64> {
    let (negative, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let body = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X"))?;
    let (mantissa, exponent) = match body.find(['p', 'P']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut m = BigInt::zero();
    for ch in int_part.chars().chain(frac_part.chars()) {
        m = m * 16 + ch.to_digit(16)?;
    }
    // Far outside the binary64 range either way; avoid huge shifts.
    if !(-5000..=5000).contains(&exponent) {
        return if m.is_zero() || exponent < 0 {
            Some(if negative { -0.0 } else { 0.0 })
        } else {
            None
        };
    }
    let e = exponent - 4 * frac_part.len() as i64;
    let f = ExactScalar::from_dyadic(m, e).to_f64();
    if !f.is_finite() {
        return None;
    }
    Some(if negative { -f } else { f })
}

/// Parses either a hexadecimal literal or a decimal float literal
/// (correctly rounded). Non-finite values are rejected.
pub fn parse_float(s: &str) -> Option<f64> {
    let t = s.trim();
    let lower = t.trim_start_matches(['-', '+']);
    let v = if lower.starts_with("0x") || lower.starts_with("0X") {
        parse_hex(t)?
    } else {
        t.parse::<f64>().ok()?
    };
    v.is_finite().then_some(v)
}
