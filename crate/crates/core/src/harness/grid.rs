//! Experiment grids: configuration, trial execution and summaries.
//!
//! A cell fixes `(family, tester, n, k, c, h, δ)` and runs with `β = k` and
//! `α = round(k^c)` unless `alpha` is given. Even trials are built on the
//! YES side (`ED ≤ β`), odd trials on the NO side with `α + margin` planted
//! edits, `margin = 1 + ⌊α/16⌋`; families without a YES side are always on
//! the NO side.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Deserializer};

use crate::access::{MeteredString, RandomStream};
use crate::error::{HarnessError, TesterError};
use crate::exec::Execution;
use crate::params::Constants;
use crate::strings::Truth;

use super::instances::{generate, Family, InstanceSpec, Side};
use super::record::{Fixed, Record, RecordKind, Status, SCHEMA};
use super::tester::{run_tester, RunParams, TesterKind};

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(t) => vec![t],
        OneOrMany::Many(v) => v,
    })
}

fn default_trials() -> usize {
    200
}

fn default_c() -> Vec<f64> {
    vec![2.0]
}

fn default_delta() -> Vec<f64> {
    vec![0.1]
}

fn default_tester() -> Vec<TesterKind> {
    vec![TesterKind::Main]
}

fn default_family() -> Vec<Family> {
    vec![Family::RandomEdits]
}

fn default_alphabet() -> u32 {
    4
}

/// A grid description. Every list key also accepts a single value; the grid
/// is the cartesian product of all lists.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default, deserialize_with = "one_or_many")]
    pub n: Vec<usize>,
    #[serde(default, deserialize_with = "one_or_many")]
    pub k: Vec<usize>,
    #[serde(default = "default_c", deserialize_with = "one_or_many")]
    pub c: Vec<f64>,
    /// Overrides `α = round(k^c)`; `c` is then only recorded.
    #[serde(default, deserialize_with = "one_or_many")]
    pub alpha: Vec<usize>,
    /// Empty means automatic depth selection.
    #[serde(default, deserialize_with = "one_or_many")]
    pub h: Vec<u32>,
    #[serde(default = "default_delta", deserialize_with = "one_or_many")]
    pub delta: Vec<f64>,
    #[serde(default = "default_tester", deserialize_with = "one_or_many")]
    pub tester: Vec<TesterKind>,
    #[serde(default = "default_family", deserialize_with = "one_or_many")]
    pub family: Vec<Family>,
    #[serde(default = "default_alphabet")]
    pub alphabet: u32,
    /// Use [`Constants::scaled`] with this base instead of the defaults.
    #[serde(default)]
    pub scale: Option<u64>,
    #[serde(default)]
    pub execution: Execution,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            seed: 0,
            trials: default_trials(),
            n: Vec::new(),
            k: Vec::new(),
            c: default_c(),
            alpha: Vec::new(),
            h: Vec::new(),
            delta: default_delta(),
            tester: default_tester(),
            family: default_family(),
            alphabet: default_alphabet(),
            scale: None,
            execution: Execution::default(),
        }
    }
}

impl GridConfig {
    /// The standard ladder: `n ∈ {2^14, 2^16, 2^18, 2^20}`,
    /// `c ∈ {1.5, 2}`, `k ∈ {16, 64, 256}`, 200 trials.
    pub fn ladder() -> Self {
        GridConfig {
            n: vec![1 << 14, 1 << 16, 1 << 18, 1 << 20],
            k: vec![16, 64, 256],
            c: vec![1.5, 2.0],
            ..GridConfig::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let config: GridConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if let Some(d) = self.delta.iter().find(|d| !(**d > 0.0 && **d < 1.0)) {
            return bad(format!("delta must lie in (0, 1), got {d}"));
        }
        if let Some(c) = self.c.iter().find(|c| !(c.is_finite() && **c >= 1.0)) {
            return bad(format!("c must be at least 1, got {c}"));
        }
        if self.alphabet < 2 {
            return bad(format!("alphabet must be at least 2, got {}", self.alphabet));
        }
        if self.scale == Some(0) {
            return bad("scale must be at least 1".into());
        }
        Ok(())
    }

    pub fn constants(&self) -> Constants {
        self.scale.map_or_else(Constants::default, Constants::scaled)
    }

    /// All cells, family-major then tester, n, k, c, alpha, h, δ.
    pub fn cells(&self) -> Vec<Cell> {
        let alphas: Vec<Option<usize>> = if self.alpha.is_empty() {
            vec![None]
        } else {
            self.alpha.iter().copied().map(Some).collect()
        };
        let hs: Vec<Option<u32>> = if self.h.is_empty() {
            vec![None]
        } else {
            self.h.iter().copied().map(Some).collect()
        };
        let mut cells = Vec::new();
        for &family in &self.family {
            for &tester in &self.tester {
                for &n in &self.n {
                    for &k in &self.k {
                        for &c in &self.c {
                            for &alpha in &alphas {
                                for &h in &hs {
                                    for &delta in &self.delta {
                                        cells.push(Cell {
                                            index: cells.len(),
                                            family,
                                            tester,
                                            n,
                                            k,
                                            c,
                                            alpha: alpha.unwrap_or_else(|| alpha_of(k, c)),
                                            beta: k,
                                            h,
                                            delta,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        cells
    }
}

/// `round(k^c)`.
pub fn alpha_of(k: usize, c: f64) -> usize {
    (k as f64).powf(c).round() as usize
}

/// Extra planted edits on the NO side.
pub fn no_margin(alpha: usize) -> usize {
    1 + alpha / 16
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub family: Family,
    pub tester: TesterKind,
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub alpha: usize,
    pub beta: usize,
    pub h: Option<u32>,
    pub delta: f64,
}

impl Cell {
    /// Instance spec for trial `trial` with instance seed `seed`.
    pub fn instance(&self, trial: usize, seed: u64, alphabet: u32) -> InstanceSpec {
        let near = self.family.has_yes_side() && trial.is_multiple_of(2);
        let far_k = self.alpha + no_margin(self.alpha);
        let (side, k) = match (self.family, near) {
            (Family::Rotation, true) => (Side::Near, self.beta / 2),
            (Family::Rotation, false) => (Side::Far, far_k.div_ceil(2)),
            (_, true) => (Side::Near, self.beta),
            (_, false) => (Side::Far, far_k),
        };
        let alphabet_size = if self.family == Family::Rotation {
            alphabet.max(self.n as u32)
        } else {
            alphabet
        };
        InstanceSpec {
            family: self.family,
            side,
            n: self.n,
            k,
            alphabet_size,
            core_scale: self.alpha,
            seed,
        }
    }

    /// The instance spec [`run_trial`] uses for trial `trial` of a grid
    /// with seed `seed`.
    pub fn trial_instance(&self, seed: u64, trial: usize, alphabet: u32) -> InstanceSpec {
        let rs = RandomStream::new(trial_seed(seed, self.index, trial));
        self.instance(trial, rs.child(0).seed(), alphabet)
    }

    fn detail(&self) -> String {
        format!(
            "alpha={} beta={} margin={}",
            self.alpha,
            self.beta,
            no_margin(self.alpha)
        )
    }

    fn base_record(&self, kind: RecordKind, seed: u64) -> Record {
        Record {
            schema: SCHEMA.into(),
            kind,
            cell: self.index,
            trial: None,
            family: self.family.as_str().into(),
            tester: self.tester.as_str().into(),
            n: self.n,
            k: self.k,
            c: Fixed(self.c),
            h: self.h,
            delta: Fixed(self.delta),
            seed,
            verdict: None,
            truth: None,
            queries_total: None,
            queries_distinct: None,
            oracle_calls: None,
            wall_time_ns: None,
            yes_error: None,
            no_error: None,
            mean_queries: None,
            median_queries: None,
            mean_wall_ns: None,
            status: Status::Ok,
            detail: String::new(),
        }
    }
}

/// Seed of trial `trial` in cell `cell`.
pub fn trial_seed(seed: u64, cell: usize, trial: usize) -> u64 {
    RandomStream::new(seed).child(cell as u64).child(trial as u64).seed()
}

/// Why a cell produced no trial rows.
#[derive(Clone, Debug, PartialEq)]
pub struct CellFailure {
    pub status: Status,
    pub detail: String,
}

impl From<TesterError> for CellFailure {
    fn from(e: TesterError) -> Self {
        CellFailure {
            status: Status::Unsupported,
            detail: e.to_string(),
        }
    }
}

/// Run one trial: generate, adjudicate, test.
pub fn run_trial(cell: &Cell, trial: usize, seed: u64, alphabet: u32, constants: Constants) -> Result<Record, CellFailure> {
    let rs = RandomStream::new(trial_seed(seed, cell.index, trial));
    let spec = cell.trial_instance(seed, trial, alphabet);
    let g = generate(&spec).map_err(|e| CellFailure {
        status: Status::Unsatisfiable,
        detail: e.to_string(),
    })?;
    let truth = g.bounds.truth(cell.alpha, cell.beta);
    let (x, y) = (MeteredString::new(g.x), MeteredString::new(g.y));
    let params = RunParams {
        alpha: cell.alpha,
        beta: cell.beta,
        h: cell.h,
        delta: cell.delta,
        constants,
    };
    let start = Instant::now();
    let out = run_tester(cell.tester, &x, &y, &params, &mut rs.child(1))?;
    let wall = start.elapsed().as_nanos() as u64;
    let mut r = cell.base_record(RecordKind::Trial, rs.seed());
    r.trial = Some(trial);
    r.verdict = Some(out.verdict);
    r.truth = Some(truth);
    r.queries_total = Some(x.reads() + y.reads());
    r.queries_distinct = Some(x.distinct_reads() + y.distinct_reads());
    r.oracle_calls = Some(out.oracle_calls);
    r.wall_time_ns = Some(wall);
    Ok(r)
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn median(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    Some(if s.len() % 2 == 1 { s[m] } else { (s[m - 1] + s[m]) / 2.0 })
}

/// Fraction of trials with truth `truth` whose verdict is illegal.
fn error_rate(trials: &[Record], truth: Truth) -> Option<f64> {
    let scored: Vec<_> = trials.iter().filter(|r| r.truth == Some(truth)).collect();
    let wrong = scored.iter().filter(|r| r.verdict.is_some_and(|v| !truth.accepts(v))).count();
    (!scored.is_empty()).then(|| wrong as f64 / scored.len() as f64)
}

/// Summary row of a cell.
pub fn summarize(cell: &Cell, seed: u64, trials: &[Record]) -> Record {
    let queries: Vec<f64> = trials.iter().filter_map(|r| r.queries_total).map(|q| q as f64).collect();
    let walls: Vec<f64> = trials.iter().filter_map(|r| r.wall_time_ns).map(|w| w as f64).collect();
    let mut s = cell.base_record(RecordKind::Summary, seed);
    s.yes_error = error_rate(trials, Truth::Yes).map(Fixed);
    s.no_error = error_rate(trials, Truth::No).map(Fixed);
    s.mean_queries = mean(&queries).map(Fixed);
    s.median_queries = median(&queries).map(Fixed);
    s.mean_wall_ns = mean(&walls).map(Fixed);
    s.detail = cell.detail();
    s
}

/// Records of a finished grid, ordered by cell, then trial, with each
/// cell's summary after its trials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GridOutcome {
    pub records: Vec<Record>,
    pub cells: usize,
}

impl GridOutcome {
    pub fn summaries(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.kind == RecordKind::Summary)
    }

    /// True when the grid has cells and none of them could run.
    pub fn all_unsupported(&self) -> bool {
        self.cells > 0 && self.summaries().all(|s| s.status == Status::Unsupported)
    }
}

/// Run every cell of `config`.
///
/// Trial 0 of each cell runs first; cells whose parameters the tester
/// rejects stop there. The remaining trials run as one flat batch, so the
/// output does not depend on scheduling.
pub fn run_grid(config: &GridConfig) -> Result<GridOutcome, HarnessError> {
    config.validate()?;
    let cells = config.cells();
    let constants = config.constants();
    let exec = config.execution;
    let (seed, alphabet) = (config.seed, config.alphabet);
    let trials = config.trials;

    let probes: Vec<Option<Result<Record, CellFailure>>> = exec.map_indexed(cells.len(), |i| {
        (trials > 0).then(|| run_trial(&cells[i], 0, seed, alphabet, constants))
    });
    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .zip(&probes)
        .filter(|(_, p)| matches!(p, Some(Ok(_))))
        .flat_map(|(c, _)| (1..trials).map(move |t| (c.index, t)))
        .collect();
    let rest = exec.map_indexed(jobs.len(), |j| {
        let (c, t) = jobs[j];
        run_trial(&cells[c], t, seed, alphabet, constants)
    });

    let mut rest = jobs.iter().zip(rest).peekable();
    let mut records = Vec::new();
    for (cell, probe) in cells.iter().zip(probes) {
        let mut rows = Vec::new();
        let mut failure = None;
        match probe {
            Some(Ok(r)) => rows.push(r),
            Some(Err(f)) => failure = Some(f),
            None => {}
        }
        while let Some(((_, _), r)) = rest.next_if(|((c, _), _)| *c == cell.index) {
            match r {
                Ok(r) => rows.push(r),
                Err(f) => {
                    failure.get_or_insert(f);
                }
            }
        }
        match failure {
            Some(f) => {
                let mut s = cell.base_record(RecordKind::Summary, seed);
                s.status = f.status;
                s.detail = format!("{}; {}", cell.detail(), f.detail);
                records.push(s);
            }
            None => {
                let s = summarize(cell, seed, &rows);
                records.extend(rows);
                records.push(s);
            }
        }
    }
    Ok(GridOutcome {
        records,
        cells: cells.len(),
    })
}
