//! Exact-arithmetic ground truth.
//!
//! Every finite binary64 value is a dyadic rational `m * 2^e`, so polynomial
//! values with binary64 data are dyadic too and can be computed exactly with
//! big integers. Ratios (condition numbers, ulp errors) fall back to general
//! rationals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polyval::Polynomial;

/// Splits a finite binary64 value into `(negative, significand, exponent)`
/// with `|v| = significand * 2^exponent` and an odd significand (or zero).
fn decompose(v: f64) -> (bool, u64, i64) {
    debug_assert!(v.is_finite());
    let bits = v.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    if m == 0 {
        return (negative, 0, 0);
    }
    let tz = m.trailing_zeros();
    m >>= tz;
    e += i64::from(tz);
    (negative, m, e)
}

/// Exact value `mant * 2^exp`. Used on the hot paths of the oracle, where
/// general rationals would spend most of their time in gcd computations.
#[derive(Clone, Debug)]
pub(crate) struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub(crate) fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub(crate) fn from_f64(v: f64) -> Self {
        let (negative, m, exp) = decompose(v);
        let mant = if negative { -BigInt::from(m) } else { BigInt::from(m) };
        Dyadic { mant, exp }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub(crate) fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub(crate) fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as usize;
        let b = &other.mant << (other.exp - exp) as usize;
        Dyadic { mant: a + b, exp }
    }

    pub(crate) fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub(crate) fn to_exact(&self) -> ExactScalar {
        if self.mant.is_zero() {
            return ExactScalar::zero();
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        let mant = &self.mant >> tz as usize;
        let exp = self.exp + tz as i64;
        if exp >= 0 {
            ExactScalar(BigRational::from_integer(mant << exp as usize))
        } else {
            ExactScalar(BigRational::new_raw(mant, BigInt::one() << (-exp) as usize))
        }
    }
}

/// Horner recurrence over dyadic rationals.
pub(crate) fn horner_dyadic(coeffs: &[f64], x: &Dyadic, absolute: bool) -> Dyadic {
    let lift = |c: f64| {
        let d = Dyadic::from_f64(c);
        if absolute {
            d.abs()
        } else {
            d
        }
    };
    let mut iter = coeffs.iter().rev();
    let mut acc = match iter.next() {
        Some(&c) => lift(c),
        None => return Dyadic::zero(),
    };
    for &c in iter {
        acc = acc.mul(x).add(&lift(c));
    }
    acc
}

/// Rounding direction for rational-to-binary64 conversion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    NearestEven,
    TowardZero,
}

fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// `q * 2^e` for a significand `q <= 2^53` whose result is representable.
fn scale(q: u64, e: i64) -> f64 {
    let e1 = e / 2;
    (q as f64) * pow2(e1) * pow2(e - e1)
}

fn round_ratio(numer: &BigInt, denom: &BigInt, mode: Rounding) -> f64 {
    debug_assert!(denom.is_positive());
    if numer.is_zero() {
        return 0.0;
    }
    let negative = numer.is_negative();
    let n = numer.abs();
    let d = denom;
    let quotient = |s: i64| -> (BigInt, BigInt, BigInt) {
        let (num, den) = if s >= 0 {
            (&n << s as usize, d.clone())
        } else {
            (n.clone(), d << (-s) as usize)
        };
        let (q, r) = num.div_rem(&den);
        (q, r, den)
    };
    let mut s = 53 - (n.bits() as i64 - d.bits() as i64);
    let (mut q, mut r, mut den) = quotient(s);
    if q.bits() > 53 {
        s -= 1;
        (q, r, den) = quotient(s);
    }
    if -s < -1074 {
        s = 1074;
        (q, r, den) = quotient(s);
    }
    let mut q = q.to_u64().expect("significand fits in 53 bits");
    let round_up = match mode {
        Rounding::TowardZero => false,
        Rounding::NearestEven => {
            let twice: BigInt = r << 1usize;
            match twice.cmp(&den) {
                Ordering::Greater => true,
                Ordering::Equal => q & 1 == 1,
                Ordering::Less => false,
            }
        }
    };
    if round_up {
        q += 1;
    }
    let e = -s;
    let top = e + 63 - i64::from(q.leading_zeros());
    let magnitude = if q == 0 {
        0.0
    } else if top > 1023 {
        match mode {
            Rounding::NearestEven => f64::INFINITY,
            Rounding::TowardZero => f64::MAX,
        }
    } else {
        scale(q, e)
    };
    if negative {
        -magnitude
    } else {
        magnitude
    }
}

/// An arbitrary-precision rational number.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar(BigRational::one())
    }

    pub fn from_integer(v: i64) -> Self {
        ExactScalar(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        ExactScalar(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        if e >= 0 {
            ExactScalar(BigRational::from_integer(BigInt::one() << e as usize))
        } else {
            ExactScalar(BigRational::new_raw(BigInt::one(), BigInt::one() << (-e) as usize))
        }
    }

    /// `mant * 2^exp`.
    pub fn from_dyadic(mant: BigInt, exp: i64) -> Self {
        Dyadic { mant, exp }.to_exact()
    }

    /// Exact value of a finite binary64 number.
    ///
    /// # Panics
    /// If `v` is NaN or infinite.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite value has no exact rational");
        Dyadic::from_f64(v).to_exact()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExactScalar(self.0.abs())
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn round(&self, mode: Rounding) -> f64 {
        round_ratio(self.0.numer(), self.0.denom(), mode)
    }

    /// Correctly rounded binary64 value (ties to even).
    pub fn to_f64(&self) -> f64 {
        self.round(Rounding::NearestEven)
    }

    /// Whether this value equals a binary64 number exactly.
    pub fn equals_f64(&self, v: f64) -> bool {
        v.is_finite() && *self == ExactScalar::from_f64(v)
    }

    pub fn cmp_f64(&self, v: f64) -> Ordering {
        self.cmp(&ExactScalar::from_f64(v))
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                ExactScalar($trait::$method(&self.0, &rhs.0))
            }
        }
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar($trait::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

/// Exact value of `sum(a_i x^i)` for raw coefficients (ascending degree).
/// An empty slice is the zero polynomial.
pub fn eval_coeffs_exact(coeffs: &[f64], x: f64) -> ExactScalar {
    horner_dyadic(coeffs, &Dyadic::from_f64(x), false).to_exact()
}

/// Exact value of `p(x)`.
pub fn eval_exact(p: &Polynomial, x: f64) -> ExactScalar {
    eval_coeffs_exact(p.coeffs(), x)
}

/// Exact value of the absolute polynomial `sum(|a_i| |x|^i)`.
pub fn eval_abs_exact(p: &Polynomial, x: f64) -> ExactScalar {
    horner_dyadic(p.coeffs(), &Dyadic::from_f64(x.abs()), true).to_exact()
}

/// Condition number `sum(|a_i||x|^i) / |p(x)|`.
pub fn cond(p: &Polynomial, x: f64) -> Result<ExactScalar> {
    let value = eval_exact(p, x);
    if value.is_zero() {
        return Err(Error::InfiniteCondition);
    }
    Ok(eval_abs_exact(p, x) / value.abs())
}

/// Condition number rounded to the nearest binary64, `inf` when `p(x) = 0`.
pub fn cond_f64(p: &Polynomial, x: f64) -> f64 {
    cond(p, x).map(|c| c.to_f64()).unwrap_or(f64::INFINITY)
}

/// Smallest binary64 value strictly greater than `f`.
pub fn succ(f: f64) -> Result<f64> {
    if !f.is_finite() || f == f64::MAX {
        return Err(Error::NoNeighbour(f));
    }
    if f == 0.0 {
        return Ok(f64::from_bits(1));
    }
    let bits = f.to_bits();
    Ok(if f > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    })
}

/// Largest binary64 value strictly smaller than `f`.
pub fn pred(f: f64) -> Result<f64> {
    if !f.is_finite() || f == f64::MIN {
        return Err(Error::NoNeighbour(f));
    }
    succ(-f).map(|s| -s)
}

/// Exact upper neighbour of `f`; past `f64::MAX` this is `2^1024`.
fn upper_neighbour(f: f64) -> ExactScalar {
    match succ(f) {
        Ok(s) => ExactScalar::from_f64(s),
        Err(_) => ExactScalar::pow2(1024),
    }
}

fn lower_neighbour(f: f64) -> ExactScalar {
    -upper_neighbour(-f)
}

/// Spacing `succ(|f|) - |f|`.
pub fn ulp(f: f64) -> ExactScalar {
    let a = f.abs();
    upper_neighbour(a) - ExactScalar::from_f64(a)
}

/// `|computed - exact| / |exact|`; `None` when `exact` is zero and the
/// computed value is not.
pub fn relative_error(computed: f64, exact: &ExactScalar) -> Option<ExactScalar> {
    let diff = (&ExactScalar::from_f64(computed) - exact).abs();
    if exact.is_zero() {
        return if diff.is_zero() { Some(ExactScalar::zero()) } else { None };
    }
    Some(diff / exact.abs())
}

/// `relative_error` rounded to binary64 (`inf` for a nonzero result of an
/// exact zero).
pub fn relative_error_f64(computed: f64, exact: &ExactScalar) -> f64 {
    relative_error(computed, exact).map(|r| r.to_f64()).unwrap_or(f64::INFINITY)
}

/// The oracle's judgement of one computed value.
#[derive(Clone, Debug, PartialEq)]
pub struct FaithfulVerdict {
    pub exact_value: ExactScalar,
    pub computed: f64,
    pub faithful: bool,
    /// `|exact - computed| / ulp(computed)`.
    pub ulp_error: ExactScalar,
}

/// Decides whether `computed` is a faithful rounding of `exact`, i.e.
/// `pred(computed) < exact < succ(computed)`.
///
/// # Panics
/// If `computed` is not finite.
pub fn is_faithful(computed: f64, exact: &ExactScalar) -> FaithfulVerdict {
    let c = ExactScalar::from_f64(computed);
    let faithful = *exact == c || (lower_neighbour(computed) < *exact && *exact < upper_neighbour(computed));
    let ulp_error = (exact - &c).abs() / ulp(computed);
    FaithfulVerdict { exact_value: exact.clone(), computed, faithful, ulp_error }
}
