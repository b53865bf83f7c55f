//! Command-line driver for `comphorner`.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 overflow or underflow in
//! the evaluation, 3 I/O failure.

pub mod commands;
pub mod experiments;
