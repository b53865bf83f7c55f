use comphorner::compensated::{apriori_threshold, comp_horner_with_status};
use comphorner::generator::{binomial_expand, generate, CorpusRecord, GeneratorSpec};
use comphorner::oracle::{cond, eval_exact, is_faithful, relative_error};
use comphorner::polyfile::{format_polynomial, parse_polynomial};
use comphorner::{comp_horner, comp_horner_is_faithful, dd_horner, EvalStatus, ExactScalar, Polynomial, UNIT_ROUNDOFF};

fn ulps_apart(a: f64, b: f64) -> u64 {
    let key = |v: f64| {
        let bits = v.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(a).abs_diff(key(b))
}

#[test]
fn certified_value_matches_comp_horner_on_generated_cases() {
    for seed in 0..200u64 {
        let target = 10f64.powf(2.0 + (seed % 34) as f64);
        let spec = GeneratorSpec::new(50, target, if seed % 2 == 0 { 1.125 } else { -0.875 }, seed);
        let p = generate(&spec).unwrap();
        let c = comp_horner_is_faithful(&p, spec.x);
        assert_eq!(c.value.to_bits(), comp_horner(&p, spec.x).to_bits());
        assert_eq!(comp_horner_with_status(&p, spec.x), (c.value, c.status));
        if c.is_faithful {
            assert!(is_faithful(c.value, &eval_exact(&p, spec.x)).faithful);
        }
    }
}

#[test]
fn full_precision_below_1e10() {
    for seed in 0..100u64 {
        let spec = GeneratorSpec::new(50, 1e10 / 2.5, 4.0 / 3.0, seed);
        let r = CorpusRecord::generate(&spec).unwrap();
        assert!(r.measured_cond <= 1e10);
        let got = comp_horner(&r.poly, spec.x);
        let rel = relative_error(got, &eval_exact(&r.poly, spec.x)).unwrap();
        assert!(rel <= ExactScalar::pow2(-52), "seed {seed}: {}", rel.to_f64());
    }
}

#[test]
fn dd_and_comp_agree_up_to_cond_one_over_u() {
    for seed in 0..300u64 {
        let target = 10f64.powf(2.0 + 14.0 * (seed as f64 / 300.0));
        let spec = GeneratorSpec::new(50, target, 0.9375, seed);
        let r = CorpusRecord::generate(&spec).unwrap();
        if r.measured_cond > 1.0 / UNIT_ROUNDOFF {
            continue;
        }
        let dd = dd_horner(&r.poly, spec.x);
        let comp = comp_horner(&r.poly, spec.x);
        assert!(ulps_apart(dd, comp) <= 2, "seed {seed}: {dd:e} vs {comp:e}");
    }
}

#[test]
fn binomial_evaluation_near_the_root() {
    let p = binomial_expand(5).unwrap();
    let x = 1.0 + 2f64.powi(-6) + 2f64.powi(-30);
    let exact = eval_exact(&p, x);
    let c = comp_horner_is_faithful(&p, x);
    assert_eq!(c.status, EvalStatus::Ok);
    let err = (ExactScalar::from_f64(c.value) - exact.clone()).abs();
    assert!(err <= ExactScalar::from_f64(c.err_bound));
    let cnd = cond(&p, x).unwrap().to_f64();
    assert!(cnd < apriori_threshold(5).unwrap());
    assert!(is_faithful(c.value, &exact).faithful);
}

#[test]
fn polynomial_files_survive_a_round_trip_through_disk_text() {
    let p = generate(&GeneratorSpec::new(30, 1e25, -1.5, 5)).unwrap();
    let text = format_polynomial(&p);
    let back: Polynomial = parse_polynomial(&text).unwrap();
    assert_eq!(back, p);
    assert_eq!(comp_horner(&back, -1.5).to_bits(), comp_horner(&p, -1.5).to_bits());
}
