//! Named testers as the harness runs them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::access::{MeteredString, MeteredView, RandomStream};
use crate::error::{HarnessError, TesterError};
use crate::params::Constants;
use crate::reductions::{ao_reduce, gap_to_shifted, multilevel_reduce, ReductionOutcome};
use crate::strings::{gap_ed_lv, shifted_ed_lv, GapInstance, ShiftedInstance, Verdict};
use crate::testers::{equality_test, TesterConfig, Testers};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TesterKind {
    /// Position sampling for `β = 0`.
    Equality,
    /// Single-scale reduction, one run, exact leaf oracle.
    Ao,
    /// Multi-level reduction, one run, exact leaf oracle.
    Multilevel,
    /// Gap-to-shifted stage, one run, exact shifted leaf oracle.
    GapToShifted,
    /// Plain recursion, amplified.
    Baseline,
    /// Top-level tester, amplified.
    Main,
    /// Reads everything and runs Landau–Vishkin.
    Lv,
}

impl TesterKind {
    pub const ALL: [TesterKind; 7] = [
        TesterKind::Equality,
        TesterKind::Ao,
        TesterKind::Multilevel,
        TesterKind::GapToShifted,
        TesterKind::Baseline,
        TesterKind::Main,
        TesterKind::Lv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TesterKind::Equality => "equality",
            TesterKind::Ao => "ao",
            TesterKind::Multilevel => "multilevel",
            TesterKind::GapToShifted => "gap-to-shifted",
            TesterKind::Baseline => "baseline",
            TesterKind::Main => "main",
            TesterKind::Lv => "lv",
        }
    }
}

impl fmt::Display for TesterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TesterKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TesterKind::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown tester {s:?}")))
    }
}

/// Exact `GapED(α, β)` leaf: reads both windows, YES iff `ED ≤ β`.
pub fn exact_gap_leaf(sub: GapInstance<MeteredView<'_>>) -> Verdict {
    let (a, b) = (sub.x.fetch(), sub.y.fetch());
    Verdict::from_bool(gap_ed_lv(&a, &b, sub.beta).is_some())
}

/// Exact `SGED(α, β, γ)` leaf: reads both windows, YES iff `ED_β ≤ γ`.
pub fn exact_shifted_leaf(sub: ShiftedInstance<MeteredView<'_>>) -> Verdict {
    let (a, b) = (sub.x.fetch(), sub.y.fetch());
    Verdict::from_bool(shifted_ed_lv(&a, &b, sub.beta, sub.gamma).is_some())
}

/// Parameters of one tester invocation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunParams {
    pub alpha: usize,
    pub beta: usize,
    pub h: Option<u32>,
    pub delta: f64,
    pub constants: Constants,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    /// Leaf oracle calls for the end-to-end testers, top-level reduction
    /// calls for the single-stage ones.
    pub oracle_calls: u64,
}

fn stage(out: ReductionOutcome) -> RunOutcome {
    RunOutcome {
        verdict: out.verdict,
        oracle_calls: out.calls.len() as u64,
    }
}

/// Run `kind` on `(x, y)`. The single-stage reductions use `φ = β`.
pub fn run_tester(
    kind: TesterKind,
    x: &MeteredString,
    y: &MeteredString,
    p: &RunParams,
    rs: &mut RandomStream,
) -> Result<RunOutcome, TesterError> {
    let inst = GapInstance::new(x.view(), y.view(), p.alpha, p.beta)?;
    let config = TesterConfig {
        h: p.h,
        delta: p.delta,
        ..TesterConfig::default()
    };
    let testers = Testers::with_constants(config, p.constants)?;
    let end_to_end = |verdict| RunOutcome {
        verdict,
        oracle_calls: testers.leaf_calls(),
    };
    match kind {
        TesterKind::Equality => {
            if p.beta != 0 {
                return Err(TesterError::UnsupportedRegime {
                    beta: p.beta,
                    h_max: 0,
                    max_beta: 1.0,
                });
            }
            let v = equality_test(inst.x, inst.y, p.alpha, p.delta, rs);
            Ok(RunOutcome {
                verdict: v,
                oracle_calls: 1,
            })
        }
        TesterKind::Ao => Ok(stage(ao_reduce(&inst, p.beta, rs, |_, sub| exact_gap_leaf(sub))?)),
        TesterKind::Multilevel => Ok(stage(multilevel_reduce(&inst, p.beta, rs, |_, sub| exact_gap_leaf(sub))?)),
        TesterKind::GapToShifted => Ok(stage(gap_to_shifted(&inst, p.beta, &p.constants, rs, |_, sub| {
            exact_shifted_leaf(sub)
        })?)),
        TesterKind::Baseline => {
            let h = testers.gap_depth(x.len(), p.alpha, p.beta)?;
            let v = testers.baseline_gap(&inst, h, p.delta, rs)?;
            Ok(end_to_end(v))
        }
        TesterKind::Main => {
            let v = testers.main_gap(&inst, rs)?;
            Ok(end_to_end(v))
        }
        TesterKind::Lv => Ok(RunOutcome {
            verdict: exact_gap_leaf(inst),
            oracle_calls: 1,
        }),
    }
}
