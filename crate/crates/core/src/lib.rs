//! Non-adaptive sublinear-query testers for the gap edit distance problem.
//!
//! Given strings `X, Y` of length `n` and thresholds `α ≥ β`, a gap tester
//! answers YES when `ED(X, Y) ≤ β` and NO when `ED(X, Y) > α`, while reading
//! only a small random sample of positions chosen before any symbol is seen.
//!
//! - [`strings`]: exact and shifted edit distance, the ground truth.
//! - [`access`]: metered string access, seeded randomness, and the
//!   non-adaptivity certificate.
//! - [`reductions`]: the block-sampling and offset-grid reductions.
//! - [`testers`]: end-to-end testers built from the reductions.
//! - [`harness`]: instance generators, experiment grids and CSV records.
//! - [`exec`]: sequential or rayon-parallel evaluation of independent trials.

pub mod access;
pub mod error;
pub mod exec;
pub mod harness;
pub mod params;
pub mod reductions;
pub mod strings;
pub mod testers;

pub use access::{certify_non_adaptive, Certificate, MeteredString, MeteredView, RandomStream};
pub use error::{HarnessError, ParamError, TesterError};
pub use params::Constants;
pub use strings::{GapInstance, ShiftedInstance, Symbol, Truth, Verdict};
