//! Test-case factories: expanded binomials `(1 - x)^n` and polynomials with
//! a prescribed condition number at a given point.
//!
//! The conditioned generator splits the coefficients by parity. Even indices
//! get random terms `a_i x^i` of magnitude about `C / (number of even
//! indices)` with random signs, so that `p~(x)` is close to `C`. Odd indices,
//! in ascending order, are then chosen with exact arithmetic to cancel the
//! random part and steer `p(x)` to 1. With `|p(x)| ~ 1` the condition number
//! lands in `[C, 2C + 1]`.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hexfloat::{format_hex, parse_float};
use crate::oracle::{cond, eval_coeffs_exact, Dyadic, ExactScalar};
use crate::polyval::Polynomial;

/// Largest `n` for which every `C(n, i)` is a binary64 value; `C(57, 28)`
/// is not.
pub const MAX_BINOMIAL_DEGREE: usize = 56;

/// The corrective loop stops once `|1 - p(x)|` drops below this.
const RESIDUAL_TOLERANCE_LOG2: i64 = -40;

/// Coefficients of `(1 - x)^n`, ascending.
pub fn binomial_expand(n: usize) -> Result<Polynomial> {
    if n > MAX_BINOMIAL_DEGREE {
        return Err(Error::DegreeTooLarge { degree: n, max: MAX_BINOMIAL_DEGREE });
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut c: u64 = 1;
    for i in 0..=n {
        let signed = if i % 2 == 0 { c as f64 } else { -(c as f64) };
        coeffs.push(signed);
        // C(n, i+1) = C(n, i) (n - i) / (i + 1); exact in u128.
        c = ((c as u128 * (n - i) as u128) / (i as u128 + 1)) as u64;
    }
    Polynomial::new(coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub degree: usize,
    pub target_cond: f64,
    pub x: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(degree: usize, target_cond: f64, x: f64, seed: u64) -> Self {
        GeneratorSpec { degree, target_cond, x, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 2 {
            return Err(Error::InvalidSpec(format!("degree must be at least 2, got {}", self.degree)));
        }
        if !self.target_cond.is_finite() || self.target_cond < 1.0 {
            return Err(Error::InvalidSpec(format!("target condition number must be >= 1, got {}", self.target_cond)));
        }
        if !self.x.is_finite() || self.x == 0.0 {
            return Err(Error::InvalidSpec(format!("x must be finite and nonzero, got {}", self.x)));
        }
        let top = self.x.abs().powi(self.degree as i32);
        if !top.is_finite() || top < 1e-250 {
            return Err(Error::InvalidSpec(format!(
                "|x|^{} = {top:e} is outside the representable range",
                self.degree
            )));
        }
        Ok(())
    }
}

/// Builds a polynomial with `p(x) ~ 1` and `cond(p, x) ~ target_cond`.
/// Deterministic in `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<Polynomial> {
    spec.validate()?;
    let n = spec.degree;
    let x = spec.x;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coeffs = vec![0.0; n + 1];

    let even: Vec<usize> = (0..=n).step_by(2).collect();
    let weights: Vec<f64> = even.iter().map(|_| 10f64.powf(rng.gen_range(-0.5..0.5))).collect();
    let total: f64 = weights.iter().sum();
    let ax = x.abs();
    let mut power = 1.0;
    let mut next = 0;
    for (k, &i) in even.iter().enumerate() {
        while next < i {
            power *= ax;
            next += 1;
        }
        let magnitude = spec.target_cond * weights[k] / total / power;
        coeffs[i] = if rng.gen::<bool>() { magnitude } else { -magnitude };
    }

    let xd = Dyadic::from_f64(x);
    let mut residual = ExactScalar::one() - eval_coeffs_exact(&coeffs, x);
    let tolerance = ExactScalar::pow2(RESIDUAL_TOLERANCE_LOG2);
    let mut x_power = xd.clone();
    for i in (1..=n).step_by(2) {
        if residual.abs() <= tolerance {
            break;
        }
        let xi = x_power.to_exact();
        let a = (&residual / &xi).to_f64();
        if !a.is_finite() {
            return Err(Error::Unreachable(format!("corrective coefficient {i} overflows")));
        }
        coeffs[i] = a;
        residual = residual - ExactScalar::from_f64(a) * xi;
        x_power = x_power.mul(&xd).mul(&xd);
    }

    if let Some(i) = coeffs.iter().position(|c| !c.is_finite() || c.is_subnormal()) {
        return Err(Error::Unreachable(format!("coefficient {i} is not a normal binary64 value")));
    }
    let p = Polynomial::new(coeffs)?;
    let value = ExactScalar::one() - residual;
    let half = ExactScalar::from_ratio(1, 2);
    if value < half || value > ExactScalar::from_integer(2) {
        return Err(Error::Unreachable(format!(
            "p(x) = {:e} after correction, outside [1/2, 2]",
            value.to_f64()
        )));
    }
    Ok(p)
}

/// One generated polynomial together with the parameters that made it.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusRecord {
    pub seed: u64,
    pub degree: usize,
    pub target_cond: f64,
    pub x: f64,
    pub measured_cond: f64,
    pub poly: Polynomial,
}

impl CorpusRecord {
    /// Generates the polynomial for `spec` and measures its condition number
    /// with the oracle.
    pub fn generate(spec: &GeneratorSpec) -> Result<Self> {
        let poly = generate(spec)?;
        let measured_cond = cond(&poly, spec.x)?.to_f64();
        Ok(CorpusRecord {
            seed: spec.seed,
            degree: spec.degree,
            target_cond: spec.target_cond,
            x: spec.x,
            measured_cond,
            poly,
        })
    }
}

pub const CORPUS_HEADER: [&str; 6] = ["seed", "degree", "target_cond", "x", "measured_cond", "coefficients"];

/// Writes records as CSV. Floats are hexadecimal literals; `coefficients` is
/// a space-separated list in ascending degree.
pub fn write_corpus<W: Write>(out: W, records: &[CorpusRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CORPUS_HEADER)?;
    for r in records {
        let coeffs: Vec<String> = r.poly.coeffs().iter().map(|&c| format_hex(c)).collect();
        w.write_record([
            r.seed.to_string(),
            r.degree.to_string(),
            format_hex(r.target_cond),
            format_hex(r.x),
            format_hex(r.measured_cond),
            coeffs.join(" "),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))
}

pub fn read_corpus<R: Read>(input: R) -> Result<Vec<CorpusRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CORPUS_HEADER) {
        return Err(Error::Parse { line: 1, message: format!("unexpected corpus header {header:?}") });
    }
    let mut out = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let line = idx + 2;
        let row = row?;
        let bad = |what: &str| Error::Parse { line, message: format!("invalid {what}") };
        let float = |i: usize, what: &str| row.get(i).and_then(parse_float).ok_or_else(|| bad(what));
        let seed = row.get(0).and_then(|s| s.parse().ok()).ok_or_else(|| bad("seed"))?;
        let degree: usize = row.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| bad("degree"))?;
        let target_cond = float(2, "target_cond")?;
        let x = float(3, "x")?;
        let measured_cond = float(4, "measured_cond")?;
        let coeffs = row
            .get(5)
            .ok_or_else(|| bad("coefficients"))?
            .split_whitespace()
            .map(|s| parse_float(s).ok_or_else(|| bad("coefficient")))
            .collect::<Result<Vec<f64>>>()?;
        let poly = Polynomial::new(coeffs).map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if poly.degree() != degree {
            return Err(Error::Parse { line, message: format!("degree {degree} but {} coefficients", poly.coeffs().len()) });
        }
        out.push(CorpusRecord { seed, degree, target_cond, x, measured_cond, poly });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::eval_exact;

    #[test]
    fn binomial_rows() {
        assert_eq!(binomial_expand(0).unwrap().coeffs(), &[1.0]);
        assert_eq!(binomial_expand(2).unwrap().coeffs(), &[1.0, -2.0, 1.0]);
        assert_eq!(binomial_expand(5).unwrap().coeffs(), &[1.0, -5.0, 10.0, -10.0, 5.0, -1.0]);
        let p = binomial_expand(12).unwrap();
        assert!(p.coeffs().iter().all(|c| c.fract() == 0.0 && c.abs() < 2f64.powi(53)));
        assert!(eval_exact(&p, 1.0).is_zero());
        assert!(matches!(binomial_expand(57), Err(Error::DegreeTooLarge { degree: 57, max: 56 })));
    }

    #[test]
    fn binomial_56_is_exact() {
        let p = binomial_expand(56).unwrap();
        // C(56, 28)
        assert_eq!(p.coeffs()[28], 7_648_690_600_760_440.0);
        assert!(eval_exact(&p, 1.0).is_zero());
        assert_eq!(eval_exact(&p, 2.0), ExactScalar::one());
    }

    #[test]
    fn rejects_invalid_specs() {
        for spec in [
            GeneratorSpec::new(1, 1e3, 1.5, 0),
            GeneratorSpec::new(10, 0.5, 1.5, 0),
            GeneratorSpec::new(10, f64::NAN, 1.5, 0),
            GeneratorSpec::new(10, 1e3, 0.0, 0),
            GeneratorSpec::new(10, 1e3, f64::INFINITY, 0),
            GeneratorSpec::new(400, 1e3, 1e10, 0),
        ] {
            assert!(matches!(generate(&spec), Err(Error::InvalidSpec(_))), "{spec:?}");
        }
    }

    #[test]
    fn hits_targets_within_a_decade() {
        for (k, &target) in [1e2, 1e8, 1e16, 1e24, 1e30, 1e35].iter().enumerate() {
            for x in [4.0 / 3.0, -0.8, 1.1] {
                let spec = GeneratorSpec::new(50, target, x, k as u64);
                let r = CorpusRecord::generate(&spec).unwrap();
                let value = eval_exact(&r.poly, x);
                assert!(value >= ExactScalar::from_ratio(1, 2) && value <= ExactScalar::from_integer(2));
                assert!(r.measured_cond >= target / 10.0 && r.measured_cond <= target * 10.0, "{target:e}: {:e}", r.measured_cond);
            }
        }
    }

    #[test]
    fn small_degrees_work() {
        for n in [2, 3, 10] {
            let r = CorpusRecord::generate(&GeneratorSpec::new(n, 1e12, 0.9, 7)).unwrap();
            assert!(r.measured_cond >= 1e11 && r.measured_cond <= 1e13);
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let spec = GeneratorSpec::new(50, 1e20, 4.0 / 3.0, 99);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        let bits = |p: &Polynomial| p.coeffs().iter().map(|c| c.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        let c = generate(&GeneratorSpec { seed: 100, ..spec }).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn corpus_round_trip() {
        let records: Vec<CorpusRecord> = (0..5)
            .map(|s| CorpusRecord::generate(&GeneratorSpec::new(20, 10f64.powi(3 * s as i32 + 2), -1.25, s)).unwrap())
            .collect();
        let mut buf = Vec::new();
        write_corpus(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("seed,degree,target_cond,x,measured_cond,coefficients\n"));
        assert_eq!(read_corpus(&buf[..]).unwrap(), records);
    }

    #[test]
    fn corpus_rejects_garbage() {
        let text = "seed,degree,target_cond,x,measured_cond,coefficients\n1,2,0x1p0,0x1p0,0x1p0,0x1p0 0x1p0\n";
        assert!(matches!(read_corpus(text.as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(read_corpus("a,b\n".as_bytes()).is_err());
    }
}
