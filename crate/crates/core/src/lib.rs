//! Compensated Horner evaluation in binary64.
//!
//! `comp_horner` evaluates a polynomial as if in twice the working precision
//! and `comp_horner_is_faithful` additionally returns a validated error bound
//! and a certificate that the result is a faithful rounding of the exact
//! value. The `oracle` module computes the exact values used to check all of
//! this; `generator`, `bench` and the text formats support the experiments.
//!
//! All kernels assume IEEE-754 round-to-nearest-even and no contraction of
//! `a * b + c` into fused multiply-adds, which Rust guarantees for plain
//! `f64` arithmetic. [`eft::arithmetic_self_test`] checks both at run time.

pub mod bench;
pub mod compensated;
pub mod ddarith;
pub mod eft;
pub mod error;
pub mod generator;
pub mod hexfloat;
pub mod oracle;
pub mod polyfile;
pub mod polyval;

pub use compensated::{comp_horner, comp_horner_is_faithful, CertifiedEval, EvalStatus};
pub use ddarith::{dd_horner, DoubleDouble};
pub use eft::{two_prod, two_sum, EftPair, UNIT_ROUNDOFF};
pub use error::{Error, Result};
pub use oracle::ExactScalar;
pub use polyval::{eft_horner, horner, EftHornerOutput, Polynomial};
