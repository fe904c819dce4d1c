//! Error rates per cell from trial records.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;

use crate::error::HarnessError;
use crate::strings::Truth;

use super::record::{Fixed, Record, RecordKind};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRate {
    pub errors: usize,
    pub trials: usize,
}

impl ErrorRate {
    pub fn estimate(&self) -> Option<f64> {
        (self.trials > 0).then(|| self.errors as f64 / self.trials as f64)
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        (self.trials > 0).then(|| wilson_interval(self.errors, self.trials))
    }
}

/// YES-error `P[NO | truth = YES]` and NO-error `P[YES | truth = NO]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellReport {
    pub cell: usize,
    pub family: String,
    pub tester: String,
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub yes: ErrorRate,
    pub no: ErrorRate,
    /// Trials with `truth = GAP`, which are not scored.
    pub gap: usize,
}

/// Score all trial rows, one report per cell in cell order. Summary rows
/// are ignored.
pub fn adjudicate(records: &[Record]) -> Vec<CellReport> {
    let mut cells: BTreeMap<usize, CellReport> = BTreeMap::new();
    for r in records.iter().filter(|r| r.kind == RecordKind::Trial) {
        let rep = cells.entry(r.cell).or_insert_with(|| CellReport {
            cell: r.cell,
            family: r.family.clone(),
            tester: r.tester.clone(),
            n: r.n,
            k: r.k,
            c: r.c.0,
            yes: ErrorRate { errors: 0, trials: 0 },
            no: ErrorRate { errors: 0, trials: 0 },
            gap: 0,
        });
        let (Some(truth), Some(verdict)) = (r.truth, r.verdict) else {
            continue;
        };
        let rate = match truth {
            Truth::Yes => &mut rep.yes,
            Truth::No => &mut rep.no,
            Truth::Gap => {
                rep.gap += 1;
                continue;
            }
        };
        rate.trials += 1;
        rate.errors += usize::from(!truth.accepts(verdict));
    }
    cells.into_values().collect()
}

#[derive(Serialize)]
struct ReportRow<'a> {
    cell: usize,
    family: &'a str,
    tester: &'a str,
    n: usize,
    k: usize,
    c: Fixed,
    yes_trials: usize,
    yes_errors: usize,
    yes_error: Option<Fixed>,
    yes_lo: Option<Fixed>,
    yes_hi: Option<Fixed>,
    no_trials: usize,
    no_errors: usize,
    no_error: Option<Fixed>,
    no_lo: Option<Fixed>,
    no_hi: Option<Fixed>,
    gap_trials: usize,
}

/// Write the reports as CSV with Wilson bounds.
pub fn write_report<W: io::Write>(reports: &[CellReport], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for r in reports {
        let lo = |e: &ErrorRate| e.interval().map(|i| Fixed(i.0));
        let hi = |e: &ErrorRate| e.interval().map(|i| Fixed(i.1));
        w.serialize(ReportRow {
            cell: r.cell,
            family: &r.family,
            tester: &r.tester,
            n: r.n,
            k: r.k,
            c: Fixed(r.c),
            yes_trials: r.yes.trials,
            yes_errors: r.yes.errors,
            yes_error: r.yes.estimate().map(Fixed),
            yes_lo: lo(&r.yes),
            yes_hi: hi(&r.yes),
            no_trials: r.no.trials,
            no_errors: r.no.errors,
            no_error: r.no.estimate().map(Fixed),
            no_lo: lo(&r.no),
            no_hi: hi(&r.no),
            gap_trials: r.gap,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::record::{Status, SCHEMA};
    use crate::strings::Verdict;

    fn row(cell: usize, truth: Truth, verdict: Verdict) -> Record {
        Record {
            schema: SCHEMA.into(),
            kind: RecordKind::Trial,
            cell,
            trial: Some(0),
            family: "random-edits".into(),
            tester: "lv".into(),
            n: 8,
            k: 1,
            c: Fixed(2.0),
            h: None,
            delta: Fixed(0.1),
            seed: 0,
            verdict: Some(verdict),
            truth: Some(truth),
            queries_total: Some(16),
            queries_distinct: Some(16),
            oracle_calls: Some(1),
            wall_time_ns: Some(1),
            yes_error: None,
            no_error: None,
            mean_queries: None,
            median_queries: None,
            mean_wall_ns: None,
            status: Status::Ok,
            detail: String::new(),
        }
    }

    #[test]
    fn all_correct_is_zero_error() {
        let recs = vec![
            row(0, Truth::Yes, Verdict::Yes),
            row(0, Truth::No, Verdict::No),
            row(0, Truth::Gap, Verdict::No),
        ];
        let r = &adjudicate(&recs)[0];
        assert_eq!(r.yes.estimate(), Some(0.0));
        assert_eq!(r.no.estimate(), Some(0.0));
        assert_eq!(r.gap, 1);
    }

    #[test]
    fn one_wrong_in_a_hundred() {
        let mut recs: Vec<Record> = (0..99).map(|_| row(2, Truth::No, Verdict::No)).collect();
        recs.push(row(2, Truth::No, Verdict::Yes));
        let r = &adjudicate(&recs)[0];
        assert_eq!(r.no.estimate(), Some(0.01));
        assert_eq!(r.yes.estimate(), None);
        let (lo, hi) = r.no.interval().unwrap();
        // Closed form: (p + z²/2n ∓ z √(p(1−p)/n + z²/4n²)) / (1 + z²/n).
        assert!((lo - 0.001_767).abs() < 1e-5, "{lo}");
        assert!((hi - 0.054_486).abs() < 1e-5, "{hi}");
    }

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_532).abs() < 1e-5);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }
}
