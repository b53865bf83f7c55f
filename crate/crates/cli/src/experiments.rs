//! The accuracy and timing experiments, as plain row producers plus CSV
//! writers. Every row carries the oracle checks it needs so that the
//! acceptance suite and the plots read the same data.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use comphorner::bench::{run_ratios, RatioReport};
use comphorner::compensated::{apriori_threshold, apriori_threshold_exact, gamma_exact};
use comphorner::generator::{binomial_expand, CorpusRecord, GeneratorSpec};
use comphorner::hexfloat::format_hex;
use comphorner::oracle::{eval_abs_exact, eval_exact, is_faithful, relative_error};
use comphorner::{comp_horner, comp_horner_is_faithful, horner, CertifiedEval, ExactScalar, Polynomial};

pub const DEFAULT_SEED: u64 = 20_061_003;
pub const FIG1_DEGREES: [usize; 4] = [6, 8, 10, 12];
pub const FIG1_POINTS: usize = 2048;
pub const FIG2_DEGREE: usize = 50;
pub const FIG2_COUNT: usize = 5000;
pub const FIG3_DEGREE: usize = 5;
pub const FIG3_POINTS: usize = 400;
pub const TABLE1_DEGREES: [u64; 6] = [10, 100, 200, 300, 400, 500];
pub const TABLE2_REPETITIONS: usize = 5000;

/// Condition numbers of the random corpus are drawn log-uniformly from
/// `10^FIG2_LOG_COND_MIN ..= 10^FIG2_LOG_COND_MAX`.
pub const FIG2_LOG_COND_MIN: f64 = 2.0;
pub const FIG2_LOG_COND_MAX: f64 = 35.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateClass {
    CertifiedFaithful,
    FaithfulUndetected,
    Unfaithful,
}

impl CertificateClass {
    /// Classification by certificate first: a certified result is reported
    /// as such even if the oracle disagrees, so false positives stay visible
    /// through the separate oracle column.
    pub fn of(certified: bool, oracle_faithful: bool) -> Self {
        if certified {
            CertificateClass::CertifiedFaithful
        } else if oracle_faithful {
            CertificateClass::FaithfulUndetected
        } else {
            CertificateClass::Unfaithful
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CertificateClass::CertifiedFaithful => "certified_faithful",
            CertificateClass::FaithfulUndetected => "faithful_undetected",
            CertificateClass::Unfaithful => "unfaithful",
        }
    }
}

fn rel_f64(computed: f64, exact: &ExactScalar) -> f64 {
    relative_error(computed, exact).map_or(f64::INFINITY, |r| r.to_f64())
}

fn u() -> ExactScalar {
    ExactScalar::pow2(-53)
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Row {
    pub n: usize,
    pub x_hex: String,
    pub x: f64,
    pub cond: f64,
    pub horner_rel_err: f64,
    pub comp_rel_err: f64,
    pub is_faithful: bool,
    pub oracle_faithful: bool,
    pub class: CertificateClass,
    /// `cond < apriori_threshold(n)`, exactly.
    pub below_apriori: bool,
    /// `cond > 1 / gamma_2n`, exactly.
    pub above_inv_gamma: bool,
    /// Classic Horner relative error exceeds 1, exactly.
    pub horner_no_digits: bool,
}

/// Half-width of the grid around 1 for `(1 - x)^n`, in units of 2^-7,
/// chosen so that the condition number at the lower edge is about 10^4.
pub fn fig1_half_width_units(n: usize) -> u32 {
    let ratio = 10f64.powf(4.0 / n as f64);
    (256.0 / (1.0 + ratio)).ceil() as u32
}

/// `points` equally spaced values from `1 - h` to `1 + h`, both included.
/// The step is not a power of two, so the points carry full 53-bit
/// significands; an even `points` never hits `x = 1`.
pub fn fig1_grid(n: usize, points: usize) -> Vec<f64> {
    let h = fig1_half_width_units(n) as f64 / 128.0;
    let step = 2.0 * h / (points - 1) as f64;
    (0..points).map(|j| (1.0 - h) + j as f64 * step).collect()
}

pub fn fig1(points: usize) -> Result<Vec<Fig1Row>> {
    let mut rows = Vec::new();
    for n in FIG1_DEGREES {
        let p = binomial_expand(n)?;
        let threshold = apriori_threshold_exact(n as u64)?;
        let inv_gamma = ExactScalar::one() / gamma_exact(2 * n as u64)?;
        let grid = fig1_grid(n, points);
        let mut part: Vec<Fig1Row> = grid
            .par_iter()
            .map(|&x| {
                let exact = eval_exact(&p, x);
                let cond = eval_abs_exact(&p, x) / exact.abs();
                let h = horner(&p, x);
                let c = comp_horner_is_faithful(&p, x);
                let oracle = is_faithful(c.value, &exact).faithful;
                let h_rel = relative_error(h, &exact);
                Fig1Row {
                    n,
                    x_hex: format_hex(x),
                    x,
                    cond: cond.to_f64(),
                    horner_rel_err: rel_f64(h, &exact),
                    comp_rel_err: rel_f64(c.value, &exact),
                    is_faithful: c.is_faithful,
                    oracle_faithful: oracle,
                    class: CertificateClass::of(c.is_faithful, oracle),
                    below_apriori: cond < threshold,
                    above_inv_gamma: cond > inv_gamma,
                    horner_no_digits: h_rel.is_none_or(|r| r > ExactScalar::one()),
                }
            })
            .collect();
        part.sort_by(|a, b| a.x.total_cmp(&b.x));
        rows.extend(part);
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig2Row {
    pub index: usize,
    pub seed: u64,
    pub x_hex: String,
    pub target_cond: f64,
    pub measured_cond: f64,
    pub value_hex: String,
    pub relative_error: f64,
    pub err_bound: f64,
    pub alpha_hat: f64,
    pub is_faithful: bool,
    pub status: &'static str,
    pub oracle_faithful: bool,
    pub class: CertificateClass,
    /// `|value - p(x)| <= err_bound`, exactly.
    pub bound_holds: bool,
    /// `relative_error <= u + gamma_2n^2 cond`, exactly.
    pub envelope_holds: bool,
    /// `relative_error <= 2u`, exactly.
    pub full_precision: bool,
}

/// The generator inputs of the random corpus: log-uniform targets and
/// `|x|` uniform in `[0.75, 1.5]` with a random sign.
pub fn fig2_specs(seed: u64, count: usize, degree: usize) -> Vec<GeneratorSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let target = 10f64.powf(rng.gen_range(FIG2_LOG_COND_MIN..=FIG2_LOG_COND_MAX));
            let ax: f64 = rng.gen_range(0.75..=1.5);
            let x = if rng.gen() { ax } else { -ax };
            GeneratorSpec::new(degree, target, x, rng.gen())
        })
        .collect()
}

pub fn fig2_corpus(seed: u64, count: usize, degree: usize) -> Result<Vec<CorpusRecord>> {
    fig2_specs(seed, count, degree)
        .par_iter()
        .map(|s| CorpusRecord::generate(s).with_context(|| format!("generating {s:?}")))
        .collect()
}

pub fn evaluate_record(index: usize, r: &CorpusRecord) -> Result<Fig2Row> {
    let x = r.x;
    let c: CertifiedEval = comp_horner_is_faithful(&r.poly, x);
    let exact = eval_exact(&r.poly, x);
    let abs = eval_abs_exact(&r.poly, x);
    let rel = relative_error(c.value, &exact).context("p(x) = 0 in a generated polynomial")?;
    let n = r.poly.degree() as u64;
    let gamma = gamma_exact(2 * n)?;
    let cond = &abs / &exact.abs();
    let envelope = u() + &(&gamma * &gamma) * &cond;
    let oracle = is_faithful(c.value, &exact).faithful;
    let bound_holds = c.err_bound.is_finite()
        && (ExactScalar::from_f64(c.value) - exact.clone()).abs() <= ExactScalar::from_f64(c.err_bound);
    Ok(Fig2Row {
        index,
        seed: r.seed,
        x_hex: format_hex(x),
        target_cond: r.target_cond,
        measured_cond: r.measured_cond,
        value_hex: format_hex(c.value),
        relative_error: rel.to_f64(),
        err_bound: c.err_bound,
        alpha_hat: c.alpha_hat,
        is_faithful: c.is_faithful,
        status: c.status.as_str(),
        oracle_faithful: oracle,
        class: CertificateClass::of(c.is_faithful, oracle),
        bound_holds,
        envelope_holds: rel <= envelope,
        full_precision: rel <= ExactScalar::pow2(-52),
    })
}

pub fn fig2(seed: u64, count: usize, degree: usize) -> Result<Vec<Fig2Row>> {
    let corpus = fig2_corpus(seed, count, degree)?;
    let mut rows: Vec<Fig2Row> =
        corpus.par_iter().enumerate().map(|(i, r)| evaluate_record(i, r)).collect::<Result<_>>()?;
    rows.sort_by_key(|r| r.index);
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig3Row {
    pub x_hex: String,
    pub x: f64,
    pub cond: f64,
    pub abs_error: f64,
    pub err_bound: f64,
    pub apriori_bound: f64,
    pub is_faithful: bool,
    /// `err_bound <= apriori_bound`, exactly.
    pub dynamic_le_apriori: bool,
    /// `abs_error <= err_bound`, exactly.
    pub dynamic_dominates: bool,
    /// `abs_error <= apriori_bound`, exactly.
    pub apriori_dominates: bool,
}

/// `points` values evenly spread over `[1 - 2^-4, 1 + 2^-4]`, offset by half
/// a step so that `x = 1` is excluded.
pub fn fig3_grid(points: usize) -> Vec<f64> {
    let h = 0.0625;
    (0..points).map(|j| 1.0 - h + (2 * j + 1) as f64 * h / points as f64).collect()
}

pub fn fig3(points: usize) -> Result<Vec<Fig3Row>> {
    let p: Polynomial = binomial_expand(FIG3_DEGREE)?;
    let gamma = gamma_exact(2 * FIG3_DEGREE as u64)?;
    let gamma2 = &gamma * &gamma;
    let mut rows: Vec<Fig3Row> = fig3_grid(points)
        .par_iter()
        .map(|&x| {
            let exact = eval_exact(&p, x);
            let abs = eval_abs_exact(&p, x);
            let c = comp_horner_is_faithful(&p, x);
            let err = (ExactScalar::from_f64(c.value) - exact.clone()).abs();
            let apriori = &u() * &exact.abs() + &gamma2 * &abs;
            let dynamic = ExactScalar::from_f64(c.err_bound);
            Fig3Row {
                x_hex: format_hex(x),
                x,
                cond: (&abs / &exact.abs()).to_f64(),
                abs_error: err.to_f64(),
                err_bound: c.err_bound,
                apriori_bound: apriori.to_f64(),
                is_faithful: c.is_faithful,
                dynamic_le_apriori: dynamic <= apriori,
                dynamic_dominates: err <= dynamic,
                apriori_dominates: err <= apriori,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub n: u64,
    pub threshold: f64,
    pub threshold_hex: String,
}

pub fn table1() -> Result<Vec<Table1Row>> {
    TABLE1_DEGREES
        .iter()
        .map(|&n| {
            let t = apriori_threshold(n)?;
            Ok(Table1Row { n, threshold: t, threshold_hex: format_hex(t) })
        })
        .collect()
}

pub fn table2_degrees() -> Vec<usize> {
    (5..=200).step_by(5).collect()
}

pub fn table2(repetitions: usize) -> Result<RatioReport> {
    Ok(run_ratios(&table2_degrees(), repetitions)?)
}

/// Bits of `comp_horner` and of the certified evaluation over a corpus, for
/// determinism checks.
pub fn evaluation_bits(corpus: &[CorpusRecord]) -> Vec<(u64, u64, u64, bool)> {
    corpus
        .par_iter()
        .map(|r| {
            let c = comp_horner_is_faithful(&r.poly, r.x);
            (comp_horner(&r.poly, r.x).to_bits(), c.value.to_bits(), c.err_bound.to_bits(), c.is_faithful)
        })
        .collect()
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Table1,
    Table2,
}

#[derive(Clone, Debug)]
pub struct ExperimentOptions {
    pub seed: u64,
    pub points: Option<usize>,
    pub degree: Option<usize>,
    pub repetitions: usize,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { seed: DEFAULT_SEED, points: None, degree: None, repetitions: TABLE2_REPETITIONS }
    }
}

/// Runs one experiment and writes its CSV files into `out`. Returns the
/// paths written.
pub fn run(which: Experiment, out: &Path, opts: &ExperimentOptions) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut written = Vec::new();
    match which {
        Experiment::Fig1 => {
            let path = out.join("fig1.csv");
            write_rows(&path, &fig1(opts.points.unwrap_or(FIG1_POINTS))?)?;
            written.push(path);
        }
        Experiment::Fig2 => {
            let count = opts.points.unwrap_or(FIG2_COUNT);
            let degree = opts.degree.unwrap_or(FIG2_DEGREE);
            let corpus = fig2_corpus(opts.seed, count, degree)?;
            let corpus_path = out.join("fig2_corpus.csv");
            let file = File::create(&corpus_path).with_context(|| format!("creating {}", corpus_path.display()))?;
            comphorner::generator::write_corpus(BufWriter::new(file), &corpus)?;
            written.push(corpus_path);
            let rows: Vec<Fig2Row> =
                corpus.par_iter().enumerate().map(|(i, r)| evaluate_record(i, r)).collect::<Result<_>>()?;
            let path = out.join("fig2.csv");
            write_rows(&path, &rows)?;
            written.push(path);
        }
        Experiment::Fig3 => {
            let path = out.join("fig3.csv");
            write_rows(&path, &fig3(opts.points.unwrap_or(FIG3_POINTS))?)?;
            written.push(path);
        }
        Experiment::Table1 => {
            let path = out.join("table1.csv");
            write_rows(&path, &table1()?)?;
            written.push(path);
        }
        Experiment::Table2 => {
            let report = table2(opts.repetitions)?;
            let path = out.join("table2.csv");
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            report.write_csv(BufWriter::new(file))?;
            written.push(path);
            let summary = out.join("table2_summary.csv");
            let mut w = csv::Writer::from_path(&summary)?;
            w.write_record(["statistic", "comp", "cert", "dd"])?;
            for (name, r) in [("mean", report.mean), ("median", report.median)] {
                w.write_record([name.to_string(), format!("{:.4}", r.comp), format!("{:.4}", r.cert), format!("{:.4}", r.dd)])?;
            }
            let env = &report.environment;
            w.write_record(["cpu", &env.cpu, "", ""])?;
            w.write_record(["build", &env.build, "", ""])?;
            w.write_record(["timestamp", &env.timestamp.to_string(), "", ""])?;
            w.write_record(["repetitions", &report.repetitions.to_string(), "", ""])?;
            w.write_record(["checksum", &format!("{:016x}", report.checksum), "", ""])?;
            w.flush()?;
            written.push(summary);
        }
    }
    Ok(written)
}
