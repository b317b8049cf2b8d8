//! Seeded generation of well-typed programs, shrinking, and differential
//! testing of the transformations.

mod diff;
mod gen;
mod shrink;

pub use diff::{check_case, differential_run, Counterexample, DiffCfg, Outcome, Pass, Report};
pub use gen::{gen_case, gen_open, gen_typed, GenCfg, Generator};
pub use shrink::{shrink, shrink_candidates};
