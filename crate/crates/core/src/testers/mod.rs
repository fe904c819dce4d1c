//! End-to-end gap and shifted-gap testers.
//!
//! Every tester fixes its sample plan from `(n, parameters, seed)` before it
//! reads anything. Randomness is split by label: a stage draws its plan from
//! `rs.child(0)` and gives oracle call `j` the stream `rs.child(j + 1)`;
//! majority amplification gives repetition `r` the stream `rs.child(r)`.
//! Nothing short-circuits, so the read sequence never depends on answers.

mod baseline;
mod batched;
mod dispatch;
pub mod equality;
pub mod trie;

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::access::{MeteredView, RandomStream};
use crate::error::{ParamError, TesterError};
use crate::params::Constants;
use crate::strings::Verdict;

pub use equality::{equality_sample_size, equality_test, equality_test_shared};
pub use trie::FingerprintTrie;

/// How the bottom `GapED(α, 0)` calls are answered.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leaf {
    /// Read both substrings completely and compare them.
    LvExact,
    /// Compare a random sample of positions.
    #[default]
    EqualitySampler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterConfig {
    /// Recursion depth; `None` picks the smallest admissible one.
    pub h: Option<u32>,
    /// Target error probability, in `(0, 1)`.
    pub delta: f64,
    pub leaf: Leaf,
    /// Largest depth ever tried.
    pub h_max: u32,
}

impl Default for TesterConfig {
    fn default() -> Self {
        TesterConfig {
            h: None,
            delta: 0.1,
            leaf: Leaf::default(),
            h_max: 6,
        }
    }
}

impl TesterConfig {
    pub fn validate(&self) -> Result<(), ParamError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(ParamError::violated(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if let Some(h) = self.h {
            if h > self.h_max {
                return Err(ParamError::violated(format!("h = {h} exceeds h_max = {}", self.h_max)));
            }
        }
        Ok(())
    }
}

/// Error budget of one unamplified stage; its oracles share half of it.
pub const STAGE_DELTA: f64 = 1.0 / 16.0;

/// Error bound of one unamplified multi-level stage: the reduction's own
/// `1/e` plus the oracles' union bound `STAGE_DELTA / 2`.
pub fn single_run_error() -> f64 {
    (-1.0f64).exp() + STAGE_DELTA / 2.0
}

/// Odd repetition count `R` for which a majority of `R` runs, each wrong
/// with probability at most `p < 1/2`, is wrong with probability at most
/// `delta` (Hoeffding: `R ≥ ln(1/δ) / (2 (1/2 − p)²)`). One run suffices
/// when `delta ≥ p`.
///
/// At `p = 1/3` this is `⌈18 ln(1/δ)⌉` rounded up to odd.
pub fn majority_reps(delta: f64, p: f64) -> usize {
    assert!(p < 0.5, "majority needs per-run error below 1/2");
    if delta >= p {
        return 1;
    }
    let gap = 0.5 - p;
    let r = ((1.0 / delta).ln() / (2.0 * gap * gap)).ceil() as usize;
    r.max(1) | 1
}

/// Majority over `reps` runs; run `r` gets `rs.child(r)`.
pub fn majority<E>(
    reps: usize,
    rs: &RandomStream,
    mut once: impl FnMut(&mut RandomStream) -> Result<Verdict, E>,
) -> Result<Verdict, E> {
    let mut yes = 0;
    for r in 0..reps {
        yes += usize::from(once(&mut rs.child(r as u64))?.is_yes());
    }
    Ok(Verdict::from_bool(2 * yes > reps))
}

/// Per-instance majority for batched runs.
pub fn majority_batch<E>(
    reps: usize,
    q: usize,
    rs: &RandomStream,
    mut once: impl FnMut(&mut RandomStream) -> Result<Vec<Verdict>, E>,
) -> Result<Vec<Verdict>, E> {
    let mut yes = vec![0usize; q];
    for r in 0..reps {
        for (count, v) in yes.iter_mut().zip(once(&mut rs.child(r as u64))?) {
            *count += usize::from(v.is_yes());
        }
    }
    Ok(yes.into_iter().map(|c| Verdict::from_bool(2 * c > reps)).collect())
}

/// The tester family under one configuration.
///
/// Also counts leaf oracle invocations (bottom equality checks and batched
/// fingerprint lookups, one per instance) for reporting.
#[derive(Debug)]
pub struct Testers {
    pub config: TesterConfig,
    pub constants: Constants,
    leaf_calls: Cell<u64>,
}

impl Testers {
    pub fn new(config: TesterConfig) -> Result<Self, ParamError> {
        Self::with_constants(config, Constants::default())
    }

    pub fn with_constants(config: TesterConfig, constants: Constants) -> Result<Self, ParamError> {
        config.validate()?;
        Ok(Testers {
            config,
            constants,
            leaf_calls: Cell::new(0),
        })
    }

    pub fn leaf_calls(&self) -> u64 {
        self.leaf_calls.get()
    }

    pub fn reset_leaf_calls(&self) {
        self.leaf_calls.set(0);
    }

    fn count_leaf(&self, k: usize) {
        self.leaf_calls.set(self.leaf_calls.get() + k as u64);
    }

    /// Repetitions for an outer amplification to `delta`.
    fn reps(&self, delta: f64) -> usize {
        majority_reps(delta, single_run_error())
    }

    /// `GapED(α, 0)` with the configured leaf.
    pub fn gap_zero(&self, x: MeteredView<'_>, y: MeteredView<'_>, alpha: usize, delta: f64, rs: &mut RandomStream) -> Verdict {
        self.count_leaf(1);
        match self.config.leaf {
            Leaf::EqualitySampler => equality_test(x, y, alpha, delta, rs),
            Leaf::LvExact => Verdict::from_bool(x.fetch() == y.fetch()),
        }
    }

    /// [`Testers::gap_zero`] for a batch sharing `x`.
    pub fn gap_zero_shared(
        &self,
        x: MeteredView<'_>,
        ys: &[MeteredView<'_>],
        alpha: usize,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Vec<Verdict> {
        self.count_leaf(ys.len());
        match self.config.leaf {
            Leaf::EqualitySampler => equality_test_shared(x, ys, alpha, delta, rs),
            Leaf::LvExact => {
                let common = x.fetch();
                ys.iter().map(|y| Verdict::from_bool(y.fetch() == common)).collect()
            }
        }
    }
}

/// Collects the first error raised inside an oracle closure, which must
/// itself return a plain verdict.
#[derive(Default)]
struct FirstError(Option<TesterError>);

impl FirstError {
    fn take<T>(&mut self, r: Result<T, TesterError>, fallback: T) -> T {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.0.get_or_insert(e);
                fallback
            }
        }
    }

    fn into_result<T>(self, value: T) -> Result<T, TesterError> {
        match self.0 {
            Some(e) => Err(e),
            None => Ok(value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reps_formula() {
        assert_eq!(majority_reps(0.5, 1.0 / 3.0), 1);
        // ⌈18 ln 10⌉ = 42, made odd.
        assert_eq!(majority_reps(0.1, 1.0 / 3.0), 43);
        assert!(majority_reps(0.05, single_run_error()) % 2 == 1);
    }

    #[test]
    fn majority_amplifies() {
        let delta = 0.1;
        let reps = majority_reps(delta, 1.0 / 3.0);
        let trials = 2000;
        let mut wrong = 0;
        for t in 0..trials {
            let rs = RandomStream::new(t);
            let v = majority::<()>(reps, &rs, |rs| Ok(Verdict::from_bool(rs.unit() >= 1.0 / 3.0))).unwrap();
            wrong += usize::from(v == Verdict::No);
        }
        assert!((wrong as f64 / trials as f64) <= delta + 0.03, "wrong {wrong}");
    }

    #[test]
    fn config_validation() {
        assert!(TesterConfig::default().validate().is_ok());
        let bad = TesterConfig {
            delta: 1.0,
            ..TesterConfig::default()
        };
        assert!(bad.validate().is_err());
        let deep = TesterConfig {
            h: Some(7),
            ..TesterConfig::default()
        };
        assert!(deep.validate().is_err());
    }
}
