//! Timing harness for the ratio of each evaluation scheme to classic Horner.
//!
//! For every degree a random polynomial is timed in several interleaved
//! batches after a warm-up of 10% of the repetitions. The per-degree time is
//! the median batch time divided by the repetition count. Measurement is
//! single-threaded; running other work concurrently invalidates the report.

use std::hint::black_box;
use std::io::Write;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compensated::{comp_horner, comp_horner_is_faithful};
use crate::ddarith::dd_horner;
use crate::error::{Error, Result};
use crate::polyval::{horner, Polynomial};

pub const BATCHES: usize = 5;
/// A batch must last at least this many timer ticks.
pub const RESOLUTION_FACTOR: u128 = 100;
pub const RATIO_CSV_HEADER: [&str; 8] =
    ["degree", "t_horner_ns", "t_comp_ns", "t_cert_ns", "t_dd_ns", "ratio_comp", "ratio_cert", "ratio_dd"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Horner,
    Comp,
    Certified,
    DoubleDouble,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Horner, Algorithm::Comp, Algorithm::Certified, Algorithm::DoubleDouble];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Horner => "horner",
            Algorithm::Comp => "comp_horner",
            Algorithm::Certified => "comp_horner_is_faithful",
            Algorithm::DoubleDouble => "dd_horner",
        }
    }
}

/// Nanoseconds per evaluation at one degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeTiming {
    pub degree: usize,
    pub t_horner_ns: f64,
    pub t_comp_ns: f64,
    pub t_cert_ns: f64,
    pub t_dd_ns: f64,
}

impl DegreeTiming {
    pub fn ratios(&self) -> Ratios {
        Ratios {
            comp: self.t_comp_ns / self.t_horner_ns,
            cert: self.t_cert_ns / self.t_horner_ns,
            dd: self.t_dd_ns / self.t_horner_ns,
        }
    }

    pub fn time(&self, alg: Algorithm) -> f64 {
        match alg {
            Algorithm::Horner => self.t_horner_ns,
            Algorithm::Comp => self.t_comp_ns,
            Algorithm::Certified => self.t_cert_ns,
            Algorithm::DoubleDouble => self.t_dd_ns,
        }
    }
}

/// Time ratios against classic Horner.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ratios {
    pub comp: f64,
    pub cert: f64,
    pub dd: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    pub cpu: String,
    pub build: String,
    pub timestamp: u64,
    pub timer_resolution_ns: u128,
}

impl Environment {
    pub fn detect(timer_resolution_ns: u128) -> Self {
        let cpu = std::fs::read_to_string("/proc/cpuinfo")
            .ok()
            .and_then(|s| {
                s.lines()
                    .find(|l| l.starts_with("model name"))
                    .and_then(|l| l.split(':').nth(1))
                    .map(|m| m.trim().to_string())
            })
            .unwrap_or_else(|| std::env::consts::ARCH.to_string());
        let profile = if cfg!(debug_assertions) { "debug" } else { "release" };
        let build = format!(
            "arch={} profile={profile} fma_feature={}",
            std::env::consts::ARCH,
            cfg!(target_feature = "fma")
        );
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Environment { cpu, build, timestamp, timer_resolution_ns }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub rows: Vec<DegreeTiming>,
    /// Mean over degrees of the per-degree ratios.
    pub mean: Ratios,
    /// Median over degrees of the per-degree ratios.
    pub median: Ratios,
    /// Folded output bits of every timed evaluation.
    pub checksum: u64,
    pub repetitions: usize,
    pub environment: Environment,
}

impl RatioReport {
    /// Degrees at which `alg` ran more than `tolerance` (relative) faster
    /// than at the previous degree.
    pub fn monotonicity_violations(&self, alg: Algorithm, tolerance: f64) -> Vec<usize> {
        self.rows
            .windows(2)
            .filter(|w| w[1].time(alg) < w[0].time(alg) * (1.0 - tolerance))
            .map(|w| w[1].degree)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RATIO_CSV_HEADER)?;
        for row in &self.rows {
            let r = row.ratios();
            w.write_record([
                row.degree.to_string(),
                format!("{:.3}", row.t_horner_ns),
                format!("{:.3}", row.t_comp_ns),
                format!("{:.3}", row.t_cert_ns),
                format!("{:.3}", row.t_dd_ns),
                format!("{:.4}", r.comp),
                format!("{:.4}", r.cert),
                format!("{:.4}", r.dd),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }
}

/// Smallest observable step of `Instant`, in nanoseconds.
pub fn timer_resolution_ns() -> u128 {
    let mut best = u128::MAX;
    for _ in 0..50 {
        let start = Instant::now();
        let mut now = Instant::now();
        while now == start {
            now = Instant::now();
        }
        best = best.min((now - start).as_nanos());
    }
    best.max(1)
}

/// The polynomial and point timed at `degree`.
pub fn bench_case(degree: usize) -> (Polynomial, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a11e ^ degree as u64);
    let coeffs = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (Polynomial::new(coeffs).expect("finite random coefficients"), 0.9)
}

#[inline(always)]
fn eval_bits(alg: Algorithm, p: &Polynomial, x: f64) -> u64 {
    match alg {
        Algorithm::Horner => horner(p, x).to_bits(),
        Algorithm::Comp => comp_horner(p, x).to_bits(),
        Algorithm::Certified => {
            let c = comp_horner_is_faithful(p, x);
            c.value.to_bits() ^ c.is_faithful as u64
        }
        Algorithm::DoubleDouble => dd_horner(p, x).to_bits(),
    }
}

fn run_batch(alg: Algorithm, p: &Polynomial, x: f64, reps: usize) -> (Duration, u64) {
    let mut sum = 0u64;
    let start = Instant::now();
    for _ in 0..reps {
        sum = sum.wrapping_add(eval_bits(alg, black_box(p), black_box(x)));
    }
    (start.elapsed(), black_box(sum))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

/// Times every algorithm at every degree with `repetitions` evaluations per
/// batch.
pub fn run_ratios(degrees: &[usize], repetitions: usize) -> Result<RatioReport> {
    if degrees.is_empty() || repetitions == 0 {
        return Err(Error::InvalidSpec("need at least one degree and one repetition".into()));
    }
    let resolution = timer_resolution_ns();
    let required = resolution * RESOLUTION_FACTOR;
    let warmup = (repetitions / 10).max(1);
    let mut checksum = 0u64;
    let mut rows = Vec::with_capacity(degrees.len());

    for &degree in degrees {
        let (p, x) = bench_case(degree);
        for alg in Algorithm::ALL {
            run_batch(alg, &p, x, warmup);
        }
        let mut times: [Vec<f64>; 4] = Default::default();
        let mut sums: [Option<u64>; 4] = [None; 4];
        for _ in 0..BATCHES {
            for (k, alg) in Algorithm::ALL.into_iter().enumerate() {
                let (elapsed, sum) = run_batch(alg, &p, x, repetitions);
                if elapsed.as_nanos() < required {
                    return Err(Error::TimerResolution { batch_ns: elapsed.as_nanos(), required_ns: required });
                }
                match sums[k] {
                    Some(prev) if prev != sum => {
                        return Err(Error::Nondeterministic { algorithm: alg.name(), degree });
                    }
                    _ => sums[k] = Some(sum),
                }
                times[k].push(elapsed.as_nanos() as f64 / repetitions as f64);
            }
        }
        for s in sums.iter().flatten() {
            checksum = checksum.rotate_left(7) ^ s;
        }
        let [h, c, z, d] = &mut times;
        rows.push(DegreeTiming {
            degree,
            t_horner_ns: median(h),
            t_comp_ns: median(c),
            t_cert_ns: median(z),
            t_dd_ns: median(d),
        });
    }

    let ratios: Vec<Ratios> = rows.iter().map(DegreeTiming::ratios).collect();
    let n = ratios.len() as f64;
    let mean = Ratios {
        comp: ratios.iter().map(|r| r.comp).sum::<f64>() / n,
        cert: ratios.iter().map(|r| r.cert).sum::<f64>() / n,
        dd: ratios.iter().map(|r| r.dd).sum::<f64>() / n,
    };
    let pick = |f: fn(&Ratios) -> f64| median(&mut ratios.iter().map(f).collect::<Vec<_>>());
    let median_ratios = Ratios { comp: pick(|r| r.comp), cert: pick(|r| r.cert), dd: pick(|r| r.dd) };

    Ok(RatioReport {
        rows,
        mean,
        median: median_ratios,
        checksum,
        repetitions,
        environment: Environment::detect(resolution),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_odd_and_even() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn rejects_empty_requests() {
        assert!(run_ratios(&[], 10).is_err());
        assert!(run_ratios(&[5], 0).is_err());
    }

    #[test]
    fn too_few_repetitions_is_reported() {
        match run_ratios(&[5], 1) {
            Err(Error::TimerResolution { batch_ns, required_ns }) => assert!(batch_ns < required_ns),
            // A very coarse clock can make even one evaluation look long.
            Ok(_) => {}
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn report_is_consistent() {
        let report = run_ratios(&[5, 10, 20], 4000).unwrap();
        assert_eq!(report.rows.len(), 3);
        for row in &report.rows {
            for alg in Algorithm::ALL {
                assert!(row.time(alg) > 0.0);
            }
        }
        let mean_comp = report.rows.iter().map(|r| r.ratios().comp).sum::<f64>() / 3.0;
        assert!((report.mean.comp - mean_comp).abs() <= 1e-12 * mean_comp);
        let again = run_ratios(&[5, 10, 20], 4000).unwrap();
        assert_eq!(report.checksum, again.checksum);

        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("degree,t_horner_ns,t_comp_ns,t_cert_ns,t_dd_ns,ratio_comp,ratio_cert,ratio_dd"));
        assert_eq!(lines.count(), 3);
    }
}
