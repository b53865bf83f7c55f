//! Error-free transformations of binary64 addition and multiplication.
//!
//! Every kernel here is a fixed sequence of round-to-nearest operations.
//! Rust never contracts `a * b + c` into a fused multiply-add, so the
//! sequences execute exactly as written; [`arithmetic_self_test`] checks the
//! rounding assumptions at runtime.

use crate::error::{Error, Result};

/// Unit roundoff of binary64, 2^-53.
pub const UNIT_ROUNDOFF: f64 = 1.0 / 9_007_199_254_740_992.0;

/// 2^27 + 1, the Veltkamp splitting constant for a 53-bit significand.
const SPLITTER: f64 = 134_217_729.0;

/// Products smaller than this (2^-969 = 2^-1022 * 2^53) may lose the exact
/// representability of their rounding error.
pub const TWO_PROD_UNDERFLOW: f64 = f64::from_bits(0x0360_0000_0000_0000);

/// Largest magnitude that [`split`] accepts without the scaling product
/// overflowing.
pub const SPLIT_LIMIT: f64 = f64::from_bits(0x7e3f_ffff_fbff_ffff);

/// `hi + lo` equals the exact result of one floating point operation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EftPair {
    pub hi: f64,
    pub lo: f64,
}

impl EftPair {
    #[inline]
    pub fn is_finite(&self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }
}

/// Whether the exactness of a product EFT is guaranteed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    NotGuaranteed,
}

/// Knuth's branch-free TwoSum (6 flops).
#[inline(always)]
pub fn two_sum(a: f64, b: f64) -> EftPair {
    let hi = a + b;
    let z = hi - a;
    let lo = (a - (hi - z)) + (b - z);
    EftPair { hi, lo }
}

/// Dekker's FastTwoSum (3 flops); exact when `a == 0` or `|a| >= |b|`.
#[inline(always)]
pub fn fast_two_sum(a: f64, b: f64) -> EftPair {
    let hi = a + b;
    let lo = b - (hi - a);
    EftPair { hi, lo }
}

/// Veltkamp splitting: `a = hi + lo` with both halves fitting in 26 bits.
#[inline(always)]
pub fn split(a: f64) -> EftPair {
    let z = a * SPLITTER;
    let hi = z - (z - a);
    let lo = a - hi;
    EftPair { hi, lo }
}

/// Dekker's TwoProd (17 flops).
#[inline(always)]
pub fn two_prod(a: f64, b: f64) -> EftPair {
    two_prod_presplit(a, b, split(b))
}

/// TwoProd with the second factor already split. Horner loops multiply by the
/// same `x` at every step, so its split is hoisted out of the loop.
#[inline(always)]
pub fn two_prod_presplit(a: f64, b: f64, b_parts: EftPair) -> EftPair {
    let hi = a * b;
    let EftPair { hi: ah, lo: al } = split(a);
    let EftPair { hi: bh, lo: bl } = b_parts;
    let lo = al * bl - (((hi - ah * bh) - al * bh) - ah * bl);
    EftPair { hi, lo }
}

/// True when the product `a * b` (rounded to `hi`) is nonzero but too small
/// for TwoProd to be exact.
#[inline(always)]
pub fn product_may_underflow(a: f64, b: f64, hi: f64) -> bool {
    (hi.abs() < TWO_PROD_UNDERFLOW) & (a != 0.0) & (b != 0.0)
}

/// [`two_sum`] that reports an overflowing sum as an error.
pub fn try_two_sum(a: f64, b: f64) -> Result<EftPair> {
    let r = two_sum(a, b);
    if r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Overflow)
    }
}

/// [`split`] that rejects inputs whose scaling product overflows.
pub fn try_split(a: f64) -> Result<EftPair> {
    if a.is_nan() || a.abs() > SPLIT_LIMIT {
        return Err(Error::Overflow);
    }
    Ok(split(a))
}

/// [`two_prod`] with overflow reported as an error and underflow flagged.
pub fn try_two_prod(a: f64, b: f64) -> Result<(EftPair, Exactness)> {
    try_split(a)?;
    try_split(b)?;
    let r = two_prod(a, b);
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    let exactness = if product_may_underflow(a, b, r.hi) {
        Exactness::NotGuaranteed
    } else {
        Exactness::Exact
    };
    Ok((r, exactness))
}

/// Checks that the hardware rounds to nearest-even and that the EFT kernels
/// produce their reference bit patterns.
pub fn arithmetic_self_test() -> Result<()> {
    use std::hint::black_box;

    let one = black_box(1.0_f64);
    let half_ulp = black_box(UNIT_ROUNDOFF);
    if one + half_ulp != 1.0 {
        return Err(Error::SelfTest("1 + 2^-53 must round down to 1 (ties to even)"));
    }
    let odd = black_box(1.0 + 2.0 * UNIT_ROUNDOFF);
    if odd + half_ulp != 1.0 + 4.0 * UNIT_ROUNDOFF {
        return Err(Error::SelfTest("(1 + 2^-52) + 2^-53 must round up to even"));
    }
    if one + black_box(3.0 * UNIT_ROUNDOFF / 2.0) != 1.0 + 2.0 * UNIT_ROUNDOFF {
        return Err(Error::SelfTest("1 + 3*2^-54 must round to nearest, not toward zero"));
    }
    if -one - half_ulp != -1.0 {
        return Err(Error::SelfTest("-1 - 2^-53 must round to -1"));
    }

    let a = black_box(1.0 + 2.0_f64.powi(-27));
    let p = two_prod(a, a);
    if p.hi.to_bits() != 0x3ff0_0000_0400_0000 || p.lo.to_bits() != 0x3c90_0000_0000_0000 {
        return Err(Error::SelfTest("two_prod((1+2^-27)^2) bit pattern (contraction?)"));
    }
    let s = two_sum(black_box(1.0), black_box(UNIT_ROUNDOFF));
    if s.hi != 1.0 || s.lo != UNIT_ROUNDOFF {
        return Err(Error::SelfTest("two_sum(1, 2^-53) bit pattern"));
    }
    Ok(())
}
