//! Experiment harness: instance families with certified distances, named
//! testers, grids of trials, CSV records and error-rate adjudication.

pub mod grid;
pub mod instances;
pub mod record;
pub mod report;
pub mod tester;

pub use grid::{run_grid, run_trial, trial_seed, Cell, GridConfig, GridOutcome};
pub use instances::{generate, DistanceBounds, Family, Generated, InstanceSpec, Side};
pub use record::{read_csv, write_csv, Record, RecordKind, Status};
pub use report::{adjudicate, wilson_interval, write_report, CellReport};
pub use tester::{exact_gap_leaf, exact_shifted_leaf, run_tester, RunParams, RunOutcome, TesterKind};
