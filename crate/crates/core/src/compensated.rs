//! Compensated Horner evaluation with an a priori faithfulness criterion and a
//! runtime, validated error bound.
//!
//! The kernels below fuse the EFT Horner loop with the evaluation of the
//! correcting term, as a C implementation would, but perform exactly the
//! operation sequence of the unfused composition
//! `eft_horner -> horner_sum -> two_sum`; the tests check bit equality
//! against that composition.

use crate::eft::{product_may_underflow, split, two_prod_presplit, two_sum, UNIT_ROUNDOFF};
use crate::error::{Error, Result};
use crate::oracle::{ExactScalar, Rounding};
use crate::polyval::Polynomial;

/// Reliability of a certified evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalStatus {
    Ok,
    /// A TwoProd fell into the underflow range; the certificate is withheld.
    UnderflowUnverified,
    Overflow,
}

impl EvalStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            EvalStatus::Ok => "ok",
            EvalStatus::UnderflowUnverified => "underflow_unverified",
            EvalStatus::Overflow => "overflow",
        }
    }
}

/// Compensated value with its validated error bound and faithfulness flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifiedEval {
    /// Compensated result `r̄`.
    pub value: f64,
    /// Validated bound on `|value - p(x)|`.
    pub err_bound: f64,
    /// Validated bound on the error of the correcting term.
    pub alpha_hat: f64,
    /// `true` only when `value` is proven to be a faithful rounding of `p(x)`.
    pub is_faithful: bool,
    pub status: EvalStatus,
}

/// `fl(k u) / fl(1 - k u)`, a float surrogate with `gamma_k <= (1+u) * gamma_hat(k)`.
pub fn gamma_hat(k: u64) -> Result<f64> {
    if k >= 1 << 53 {
        return Err(Error::GammaOutOfRange { k });
    }
    let ku = k as f64 * UNIT_ROUNDOFF;
    Ok(ku / (1.0 - ku))
}

/// Compensated Horner: `Horner(p, x) ⊕ Horner(p_pi ⊕ p_sigma, x)`.
///
/// Accurate as if evaluated in twice the working precision. Overflow
/// appears as a non-finite result; use [`comp_horner_with_status`] to learn
/// whether underflow weakened the guarantee.
pub fn comp_horner(p: &Polynomial, x: f64) -> f64 {
    let a = p.coeffs();
    let n = a.len() - 1;
    if n == 0 {
        return a[0];
    }
    let xs = split(x);
    let prod = two_prod_presplit(a[n], x, xs);
    let sum = two_sum(prod.hi, a[n - 1]);
    let mut s = sum.hi;
    let mut c = prod.lo + sum.lo;
    for &ai in a[..n - 1].iter().rev() {
        let prod = two_prod_presplit(s, x, xs);
        let sum = two_sum(prod.hi, ai);
        s = sum.hi;
        c = c * x + (prod.lo + sum.lo);
    }
    s + c
}

/// [`comp_horner`] plus the exactness status of its error-free stage.
pub fn comp_horner_with_status(p: &Polynomial, x: f64) -> (f64, EvalStatus) {
    let a = p.coeffs();
    let n = a.len() - 1;
    if n == 0 {
        return (a[0], EvalStatus::Ok);
    }
    let xs = split(x);
    let prod = two_prod_presplit(a[n], x, xs);
    let mut underflow = product_may_underflow(a[n], x, prod.hi);
    let sum = two_sum(prod.hi, a[n - 1]);
    let mut s = sum.hi;
    let mut c = prod.lo + sum.lo;
    let mut b = prod.lo.abs() + sum.lo.abs();
    let ax = x.abs();
    for &ai in a[..n - 1].iter().rev() {
        let prod = two_prod_presplit(s, x, xs);
        underflow |= product_may_underflow(s, x, prod.hi);
        let sum = two_sum(prod.hi, ai);
        s = sum.hi;
        c = c * x + (prod.lo + sum.lo);
        b = b * ax + (prod.lo.abs() + sum.lo.abs());
    }
    let value = s + c;
    let status = classify(s, c, b, value, underflow);
    (value, status)
}

#[inline]
fn classify(r_hat: f64, c_hat: f64, b_hat: f64, value: f64, underflow: bool) -> EvalStatus {
    // A NaN in any error term reaches b_hat through the absolute values.
    if !(r_hat.is_finite() && c_hat.is_finite() && b_hat.is_finite() && value.is_finite()) {
        EvalStatus::Overflow
    } else if underflow {
        EvalStatus::UnderflowUnverified
    } else {
        EvalStatus::Ok
    }
}

/// Compensated Horner with a validated error bound and a check of faithful
/// rounding.
///
/// With `n = deg p >= 1`:
/// * `alpha_hat = (γ̂(2n-1) ⊗ b̂) ⊘ (1 ⊖ 2(n+1) ⊗ u)`, where
///   `b̂ = Horner(|p_pi| ⊕ |p_sigma|, |x|)`;
/// * `[r̄, e] = TwoSum(r̂, ĉ)` and `err_bound = (alpha_hat ⊕ |e|) ⊘ (1 ⊖ 2 ⊗ u)`;
/// * `is_faithful = alpha_hat < (u/2) ⊗ |r̄|`.
///
/// The certificate is forced to `false` when the status is not `Ok` or when
/// `r̄` is subnormal. A constant polynomial is exact.
pub fn comp_horner_is_faithful(p: &Polynomial, x: f64) -> CertifiedEval {
    let a = p.coeffs();
    let n = a.len() - 1;
    if n == 0 {
        return CertifiedEval {
            value: a[0],
            err_bound: 0.0,
            alpha_hat: 0.0,
            is_faithful: true,
            status: EvalStatus::Ok,
        };
    }

    let xs = split(x);
    let ax = x.abs();
    let prod = two_prod_presplit(a[n], x, xs);
    let mut underflow = product_may_underflow(a[n], x, prod.hi);
    let sum = two_sum(prod.hi, a[n - 1]);
    let mut s = sum.hi;
    let mut c = prod.lo + sum.lo;
    let mut b = prod.lo.abs() + sum.lo.abs();
    for &ai in a[..n - 1].iter().rev() {
        let prod = two_prod_presplit(s, x, xs);
        underflow |= product_may_underflow(s, x, prod.hi);
        let sum = two_sum(prod.hi, ai);
        s = sum.hi;
        c = c * x + (prod.lo + sum.lo);
        b = b * ax + (prod.lo.abs() + sum.lo.abs());
    }
    certify(n, s, c, b, underflow)
}

/// Final stage shared by the fused kernel and the reference composition.
pub(crate) fn certify(n: usize, r_hat: f64, c_hat: f64, b_hat: f64, underflow: bool) -> CertifiedEval {
    let u = UNIT_ROUNDOFF;
    let rounded = two_sum(r_hat, c_hat);
    let gamma = gamma_hat(2 * n as u64 - 1).unwrap_or(f64::INFINITY);
    let alpha_hat = (gamma * b_hat) / (1.0 - (2.0 * (n as f64 + 1.0)) * u);
    let err_bound = (alpha_hat + rounded.lo.abs()) / (1.0 - 2.0 * u);
    let mut status = classify(r_hat, c_hat, b_hat, rounded.hi, underflow);
    if !(alpha_hat.is_finite() && err_bound.is_finite()) {
        status = EvalStatus::Overflow;
    }
    let normal = rounded.hi.abs() >= f64::MIN_POSITIVE;
    let is_faithful = status == EvalStatus::Ok && normal && alpha_hat < (u / 2.0) * rounded.hi.abs();
    CertifiedEval { value: rounded.hi, err_bound, alpha_hat, is_faithful, status }
}

/// `gamma_k = k u / (1 - k u)` as an exact rational.
pub fn gamma_exact(k: u64) -> Result<ExactScalar> {
    if k >= 1 << 53 {
        return Err(Error::GammaOutOfRange { k });
    }
    let ku = ExactScalar::from_integer(k as i64) * ExactScalar::pow2(-53);
    Ok(&ku / &(ExactScalar::one() - ku.clone()))
}

/// Exact value of `(1-u)/(2+u) * u / gamma_{2n}^2`.
pub fn apriori_threshold_exact(n: u64) -> Result<ExactScalar> {
    if n == 0 {
        return Err(Error::InvalidSpec("the a priori threshold needs degree >= 1".into()));
    }
    let k = n.saturating_mul(2);
    let u = ExactScalar::pow2(-53);
    let one = ExactScalar::one();
    let gamma = gamma_exact(k)?;
    let factor = (&one - &u) / (ExactScalar::from_integer(2) + u.clone());
    Ok(&(&factor * &u) / &(&gamma * &gamma))
}

/// Condition number below which compensated Horner is guaranteed to return a
/// faithful rounding at degree `n`. Rounded toward zero, so the returned
/// value never exceeds the exact threshold.
pub fn apriori_threshold(n: u64) -> Result<f64> {
    Ok(apriori_threshold_exact(n)?.round(Rounding::TowardZero))
}
