use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use comphorner::eft::arithmetic_self_test;
use comphorner::generator::{write_corpus, CorpusRecord, GeneratorSpec};
use comphorner::hexfloat::{format_hex, parse_float};
use comphorner::oracle::eval_exact;
use comphorner::polyfile::parse_polynomial;
use comphorner::{comp_horner_is_faithful, dd_horner, horner, EvalStatus, Polynomial};

use crate::experiments::{self, Experiment, ExperimentOptions, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "comphorner", version, about = "Compensated Horner evaluation with faithful-rounding certificates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the polynomial in POLY_FILE at X.
    Eval {
        poly_file: PathBuf,
        /// Hexadecimal (0x1.8p1) or decimal literal.
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value_t = Method::Certified)]
        method: Method,
    },
    /// Generate polynomials with a prescribed condition number and write them
    /// as a corpus CSV.
    Generate {
        #[arg(long, default_value_t = 50)]
        degree: usize,
        #[arg(long, default_value_t = 1e16)]
        cond: f64,
        #[arg(long, default_value = "0x1.5555555555555p0", allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the experiments and write its CSV files into --out.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Grid size (fig1, fig3) or corpus size (fig2).
        #[arg(long)]
        points: Option<usize>,
        /// Degree of the fig2 corpus.
        #[arg(long)]
        degree: Option<usize>,
        /// Evaluations per timing batch (table2).
        #[arg(long, default_value_t = experiments::TABLE2_REPETITIONS)]
        repetitions: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Horner,
    Comp,
    Certified,
    Dd,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Fig1,
    Fig2,
    Fig3,
    Table1,
    Table2,
}

impl From<ExperimentName> for Experiment {
    fn from(e: ExperimentName) -> Self {
        match e {
            ExperimentName::Fig1 => Experiment::Fig1,
            ExperimentName::Fig2 => Experiment::Fig2,
            ExperimentName::Fig3 => Experiment::Fig3,
            ExperimentName::Table1 => Experiment::Table1,
            ExperimentName::Table2 => Experiment::Table2,
        }
    }
}

/// A failed command: message for stderr plus exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

fn show(v: f64) -> String {
    if v.is_finite() {
        format!("{} ({v:?})", format_hex(v))
    } else {
        format!("{v}")
    }
}

/// Report printed by `eval` and whether the evaluation hit a numeric problem.
pub fn eval_report(p: &Polynomial, x: f64, method: Method) -> (String, bool) {
    let mut out = String::new();
    let numeric_problem;
    match method {
        Method::Horner | Method::Dd => {
            let v = if method == Method::Horner { horner(p, x) } else { dd_horner(p, x) };
            numeric_problem = !v.is_finite();
            out.push_str(&format!("value: {}\n", show(v)));
        }
        Method::Comp => {
            let (v, status) = comphorner::compensated::comp_horner_with_status(p, x);
            numeric_problem = status != EvalStatus::Ok;
            out.push_str(&format!("value: {}\nstatus: {}\n", show(v), status.as_str()));
        }
        Method::Certified => {
            let c = comp_horner_is_faithful(p, x);
            numeric_problem = c.status != EvalStatus::Ok;
            out.push_str(&format!(
                "value: {}\nerr_bound: {}\nalpha_hat: {}\nis_faithful: {}\nstatus: {}\n",
                show(c.value),
                show(c.err_bound),
                show(c.alpha_hat),
                c.is_faithful,
                c.status.as_str()
            ));
        }
        Method::Exact => {
            let e = eval_exact(p, x);
            let v = e.to_f64();
            numeric_problem = !v.is_finite();
            let rounded = if v.is_finite() { format_hex(v) } else { format!("{v}") };
            out.push_str(&format!("value: {}\nexact: {e} = {rounded}\n", show(v)));
        }
    }
    (out, numeric_problem)
}

fn cmd_eval(poly_file: &PathBuf, x: &str, method: Method, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let x = parse_float(x).ok_or_else(|| Failure::usage(format!("invalid evaluation point {x:?}")))?;
    let text = std::fs::read_to_string(poly_file)
        .map_err(|e| Failure::io(format!("reading {}: {e}", poly_file.display())))?;
    let p = parse_polynomial(&text).map_err(|e| Failure::usage(format!("{}: {e}", poly_file.display())))?;
    let (report, numeric_problem) = eval_report(&p, x, method);
    stdout.write_all(report.as_bytes()).map_err(|e| Failure::io(e.to_string()))?;
    Ok(if numeric_problem { EXIT_NUMERIC } else { EXIT_OK })
}

fn cmd_generate(
    degree: usize,
    cond: f64,
    x: &str,
    seed: u64,
    count: usize,
    out: Option<&PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let x = parse_float(x).ok_or_else(|| Failure::usage(format!("invalid --x {x:?}")))?;
    let records = (0..count as u64)
        .map(|i| CorpusRecord::generate(&GeneratorSpec::new(degree, cond, x, seed.wrapping_add(i))))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let written = match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Failure::io(format!("creating {}: {e}", path.display())))?;
            write_corpus(BufWriter::new(file), &records)
        }
        None => write_corpus(&mut *stdout, &records),
    };
    written.map_err(|e| Failure::io(e.to_string()))?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<i32, Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(stdout, "{e}").map_err(|e| Failure::io(e.to_string()))?;
            return Ok(EXIT_OK);
        }
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    arithmetic_self_test().map_err(|e| Failure { code: EXIT_NUMERIC, message: e.to_string() })?;
    match &cli.command {
        Command::Eval { poly_file, x, method } => cmd_eval(poly_file, x, *method, stdout),
        Command::Generate { degree, cond, x, seed, count, out } => {
            cmd_generate(*degree, *cond, x, *seed, *count, out.as_ref(), stdout)
        }
        Command::Experiment { name, out, seed, points, degree, repetitions } => {
            let opts = ExperimentOptions { seed: *seed, points: *points, degree: *degree, repetitions: *repetitions };
            let paths = experiments::run((*name).into(), out, &opts).map_err(|e| {
                let io = e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some());
                Failure { code: if io { EXIT_IO } else { EXIT_USAGE }, message: format!("{e:#}") }
            })?;
            for p in paths {
                writeln!(stdout, "wrote {}", p.display()).map_err(|e| Failure::io(e.to_string()))?;
            }
            Ok(EXIT_OK)
        }
    }
}
