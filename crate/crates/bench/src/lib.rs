//! Benchmark harness for the Toda lattice time steppers.
//!
//! [`run_benchmark`] evaluates a (method x dt x T x initial data x region)
//! matrix against reference solutions and returns a [`BenchTable`];
//! [`emit_table`] serialises it as CSV, Markdown or JSON. [`observed_order`]
//! estimates convergence orders and [`emit_profile`] writes whole-window
//! solution profiles for plotting.

mod error;
mod matrix;
mod order;
mod profile;
mod table;

pub use error::{BenchError, Result};
pub use matrix::{run_benchmark, BenchmarkMatrix, ReferencePolicy, DEFAULT_REFERENCE_TOLERANCE};
pub use order::{convergence_errors, fit_order, observed_order, ConvergencePoint};
pub use profile::{emit_profile, profile_to_csv, simulate};
pub use table::{emit_table, BenchTable, TableFormat};
