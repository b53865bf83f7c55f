//! Classic Horner evaluation and its error-free transformation.

use crate::eft::{product_may_underflow, split, two_prod_presplit, two_sum};
use crate::error::{Error, Result};

/// A polynomial with binary64 coefficients, stored by ascending degree:
/// `coeffs[i]` multiplies `x^i`.
///
/// The degree is structural (`len - 1`); a zero leading coefficient is kept.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Rejects empty coefficient vectors and non-finite coefficients.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyPolynomial);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoefficient { index });
        }
        Ok(Polynomial { coeffs })
    }

    /// Builds from coefficients listed highest degree first.
    pub fn from_descending(mut coeffs: Vec<f64>) -> Result<Self> {
        coeffs.reverse();
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// The polynomial with coefficients `|a_i|`.
    pub fn abs(&self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| c.abs()).collect() }
    }
}

/// Outcome of the exactness preconditions of [`eft_horner`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EftStatus {
    /// `p(x) = value + (p_pi + p_sigma)(x)` holds exactly.
    Exact,
    /// A product fell below the TwoProd underflow threshold; the identity may
    /// fail.
    UnderflowUnverified,
    /// Some intermediate value overflowed.
    Overflow,
}

/// `Horner(p, x)` together with the polynomials of its rounding errors.
#[derive(Clone, Debug, PartialEq)]
pub struct EftHornerOutput {
    pub value: f64,
    /// Product errors `pi_i`, ascending degree, length `n`.
    pub p_pi: Vec<f64>,
    /// Sum errors `sigma_i`, ascending degree, length `n`.
    pub p_sigma: Vec<f64>,
    pub status: EftStatus,
}

/// Classic Horner: `r = r * x + a_i` from the leading coefficient down.
/// Overflow shows up as a non-finite result.
pub fn horner(p: &Polynomial, x: f64) -> f64 {
    horner_coeffs(p.coeffs(), x)
}

#[inline]
pub(crate) fn horner_coeffs(coeffs: &[f64], x: f64) -> f64 {
    let mut iter = coeffs.iter().rev();
    let mut r = match iter.next() {
        Some(&c) => c,
        None => return 0.0,
    };
    for &a in iter {
        r = r * x + a;
    }
    r
}

/// Horner's rule with every rounding error captured by TwoProd and TwoSum.
pub fn eft_horner(p: &Polynomial, x: f64) -> EftHornerOutput {
    let a = p.coeffs();
    let n = p.degree();
    let mut p_pi = vec![0.0; n];
    let mut p_sigma = vec![0.0; n];
    let xs = split(x);
    let mut s = a[n];
    let mut underflow = false;
    for i in (0..n).rev() {
        let prod = two_prod_presplit(s, x, xs);
        underflow |= product_may_underflow(s, x, prod.hi);
        let sum = two_sum(prod.hi, a[i]);
        p_pi[i] = prod.lo;
        p_sigma[i] = sum.lo;
        s = sum.hi;
    }
    let finite = s.is_finite() && p_pi.iter().chain(&p_sigma).all(|v| v.is_finite());
    let status = if !finite {
        EftStatus::Overflow
    } else if underflow {
        EftStatus::UnderflowUnverified
    } else {
        EftStatus::Exact
    };
    EftHornerOutput { value: s, p_pi, p_sigma, status }
}

fn check_lengths(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    Ok(())
}

/// `Horner(p ⊕ q, x)`: coefficients added in floating point, then Horner.
/// Empty inputs evaluate to zero.
pub fn horner_sum(p: &[f64], q: &[f64], x: f64) -> Result<f64> {
    check_lengths(p, q)?;
    let mut terms = p.iter().zip(q).rev();
    let mut r = match terms.next() {
        Some((a, b)) => a + b,
        None => return Ok(0.0),
    };
    for (a, b) in terms {
        r = r * x + (a + b);
    }
    Ok(r)
}

/// `Horner(|p| ⊕ |q|, |x|)`, a computable upper estimate of the absolute
/// error polynomial.
pub fn abs_horner_sum(p: &[f64], q: &[f64], x: f64) -> Result<f64> {
    check_lengths(p, q)?;
    let ax = x.abs();
    let mut terms = p.iter().zip(q).rev();
    let mut r = match terms.next() {
        Some((a, b)) => a.abs() + b.abs(),
        None => return Ok(0.0),
    };
    for (a, b) in terms {
        r = r * ax + (a.abs() + b.abs());
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{eval_abs_exact, eval_coeffs_exact, eval_exact, ExactScalar};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gamma(k: i64) -> ExactScalar {
        let ku = ExactScalar::from_integer(k) * ExactScalar::pow2(-53);
        &ku / &(ExactScalar::one() - ku.clone())
    }

    fn binomial5() -> Polynomial {
        Polynomial::new(vec![1.0, -5.0, 10.0, -10.0, 5.0, -1.0]).unwrap()
    }

    fn random_poly(rng: &mut impl Rng, n: usize) -> Polynomial {
        Polynomial::new((0..=n).map(|_| rng.gen_range(-1.0..1.0) * 2f64.powi(rng.gen_range(-10..10))).collect()).unwrap()
    }

    #[test]
    fn construction() {
        assert_eq!(Polynomial::new(vec![]), Err(Error::EmptyPolynomial));
        assert_eq!(
            Polynomial::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteCoefficient { index: 1 })
        );
        let p = Polynomial::from_descending(vec![3.0, 2.0, 1.0]).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 2.0, 3.0]);
        assert_eq!(p.degree(), 2);
        assert_eq!(Polynomial::new(vec![0.0, 0.0]).unwrap().degree(), 1);
    }

    #[test]
    fn horner_constant() {
        let p = Polynomial::new(vec![5.0]).unwrap();
        for x in [0.0, -3.0, 1e300] {
            assert_eq!(horner(&p, x), 5.0);
        }
    }

    #[test]
    fn horner_binomial_at_root() {
        assert_eq!(horner(&binomial5(), 1.0), 0.0);
        assert!(eval_exact(&binomial5(), 1.0).is_zero());
    }

    #[test]
    fn horner_overflow_is_non_finite() {
        let p = Polynomial::new(vec![1.0, 1e300]).unwrap();
        assert!(!horner(&p, 1e10).is_finite());
    }

    #[test]
    fn horner_within_classic_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = gamma(40);
        for _ in 0..500 {
            let p = random_poly(&mut rng, 20);
            let x = rng.gen_range(-2.0..2.0);
            let err = (ExactScalar::from_f64(horner(&p, x)) - eval_exact(&p, x)).abs();
            assert!(err <= &g * &eval_abs_exact(&p, x));
        }
    }

    #[test]
    fn eft_horner_constant() {
        let out = eft_horner(&Polynomial::new(vec![-2.5]).unwrap(), 7.0);
        assert_eq!(out.value, -2.5);
        assert!(out.p_pi.is_empty() && out.p_sigma.is_empty());
        assert_eq!(out.status, EftStatus::Exact);
    }

    fn identity_holds(p: &Polynomial, x: f64, out: &EftHornerOutput) -> bool {
        let c = eval_coeffs_exact(&out.p_pi, x) + eval_coeffs_exact(&out.p_sigma, x);
        ExactScalar::from_f64(out.value) + c == eval_exact(p, x)
    }

    #[test]
    fn eft_horner_binomial_identity() {
        let x = 1.0 + 2f64.powi(-20);
        let p = binomial5();
        let out = eft_horner(&p, x);
        assert_eq!(out.status, EftStatus::Exact);
        assert_eq!(out.value.to_bits(), horner(&p, x).to_bits());
        assert!(identity_holds(&p, x, &out));
    }

    #[test]
    fn eft_horner_identity_and_error_bound_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..2_000 {
            let n = 1 + case % 50;
            let p = random_poly(&mut rng, n);
            let x = rng.gen_range(-2.0..2.0);
            let out = eft_horner(&p, x);
            assert_eq!(out.status, EftStatus::Exact);
            assert_eq!(out.value.to_bits(), horner(&p, x).to_bits());
            assert!(identity_holds(&p, x, &out));
            let abs_err = eval_coeffs_exact(&out.p_pi.iter().map(|v| v.abs()).collect::<Vec<_>>(), x.abs())
                + eval_coeffs_exact(&out.p_sigma.iter().map(|v| v.abs()).collect::<Vec<_>>(), x.abs());
            assert!(abs_err <= &gamma(2 * n as i64) * &eval_abs_exact(&p, x));
        }
    }

    #[test]
    fn eft_horner_flags_underflow() {
        let p = Polynomial::new(vec![0.0, 1e-200]).unwrap();
        assert_eq!(eft_horner(&p, 1e-200).status, EftStatus::UnderflowUnverified);
        let p = Polynomial::new(vec![1.0, 1e300, 1e300]).unwrap();
        assert_eq!(eft_horner(&p, 1e300).status, EftStatus::Overflow);
    }

    #[test]
    fn horner_sum_with_zero_is_horner() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let p = random_poly(&mut rng, 15);
            let zeros = vec![0.0; p.coeffs().len()];
            let x = rng.gen_range(-2.0..2.0);
            assert_eq!(horner_sum(p.coeffs(), &zeros, x).unwrap().to_bits(), horner(&p, x).to_bits());
        }
    }

    #[test]
    fn horner_sum_rejects_mismatch_and_handles_empty() {
        assert_eq!(
            horner_sum(&[1.0], &[1.0, 2.0], 1.0),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        );
        assert_eq!(horner_sum(&[], &[], 3.0), Ok(0.0));
        assert_eq!(abs_horner_sum(&[], &[], 3.0), Ok(0.0));
    }

    #[test]
    fn horner_sum_bound_on_error_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..300 {
            let n = 10;
            let p = random_poly(&mut rng, n);
            let x = rng.gen_range(-2.0..2.0);
            let out = eft_horner(&p, x);
            let computed = horner_sum(&out.p_pi, &out.p_sigma, x).unwrap();
            let exact = eval_coeffs_exact(&out.p_pi, x) + eval_coeffs_exact(&out.p_sigma, x);
            let abs_pi: Vec<f64> = out.p_pi.iter().map(|v| v.abs()).collect();
            let abs_sigma: Vec<f64> = out.p_sigma.iter().map(|v| v.abs()).collect();
            let abs_exact = eval_coeffs_exact(&abs_pi, x.abs()) + eval_coeffs_exact(&abs_sigma, x.abs());
            // The error polynomials have degree n-1.
            let bound = &gamma(2 * (n as i64 - 1) + 1) * &abs_exact;
            assert!((ExactScalar::from_f64(computed) - exact).abs() <= bound);
        }
    }

    #[test]
    fn horner_sum_nonnegative_computable_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..30);
            let p: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..4.0)).collect();
            let q: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.0..4.0)).collect();
            let x = rng.gen_range(0.0..2.0);
            let computed = horner_sum(&p, &q, x).unwrap();
            let exact = eval_coeffs_exact(&p, x) + eval_coeffs_exact(&q, x);
            let mut factor = ExactScalar::one();
            let one_plus_u = ExactScalar::one() + ExactScalar::pow2(-53);
            for _ in 0..(2 * n + 1) {
                factor = &factor * &one_plus_u;
            }
            assert!(exact <= &factor * &ExactScalar::from_f64(computed));
        }
    }

    #[test]
    fn abs_horner_sum_examples() {
        assert_eq!(abs_horner_sum(&[0.0, 0.0], &[0.0, 0.0], 5.0), Ok(0.0));
        assert_eq!(abs_horner_sum(&[1.0, -1.0], &[0.0, 0.0], -2.0), Ok(3.0));
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..1_000 {
            let p: Vec<f64> = (0..8).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let q: Vec<f64> = (0..8).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let x = rng.gen_range(-2.0..2.0);
            let a = abs_horner_sum(&p, &q, x).unwrap();
            assert!(a >= 0.0);
            assert!(a >= horner_sum(&p, &q, x).unwrap().abs());
            let ap: Vec<f64> = p.iter().map(|v| v.abs()).collect();
            let aq: Vec<f64> = q.iter().map(|v| v.abs()).collect();
            assert_eq!(a.to_bits(), horner_sum(&ap, &aq, x.abs()).unwrap().to_bits());
        }
    }
}
