//! CSV rows: one per trial, one summary per cell.

use std::io;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::HarnessError;
use crate::strings::{Truth, Verdict};

pub const SCHEMA: &str = "v1";

pub const HEADER: [&str; 25] = [
    "schema",
    "kind",
    "cell",
    "trial",
    "family",
    "tester",
    "n",
    "k",
    "c",
    "h",
    "delta",
    "seed",
    "verdict",
    "truth",
    "queries_total",
    "queries_distinct",
    "oracle_calls",
    "wall_time_ns",
    "yes_error",
    "no_error",
    "mean_queries",
    "median_queries",
    "mean_wall_ns",
    "status",
    "detail",
];

/// A float written with six decimals, so output never depends on the
/// shortest-representation printer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:.6}", self.0))
    }
}

impl<'de> Deserialize<'de> for Fixed {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map(Fixed).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Trial,
    Summary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// No tester configuration admits the cell's parameters.
    Unsupported,
    /// The instance family cannot produce the requested pair.
    Unsatisfiable,
}

/// One CSV row. Trial rows leave the summary columns empty and vice versa;
/// an empty `h` means the depth was chosen automatically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub schema: String,
    pub kind: RecordKind,
    pub cell: usize,
    pub trial: Option<usize>,
    pub family: String,
    pub tester: String,
    pub n: usize,
    pub k: usize,
    pub c: Fixed,
    pub h: Option<u32>,
    pub delta: Fixed,
    pub seed: u64,
    pub verdict: Option<Verdict>,
    pub truth: Option<Truth>,
    pub queries_total: Option<u64>,
    pub queries_distinct: Option<u64>,
    pub oracle_calls: Option<u64>,
    pub wall_time_ns: Option<u64>,
    pub yes_error: Option<Fixed>,
    pub no_error: Option<Fixed>,
    pub mean_queries: Option<Fixed>,
    pub median_queries: Option<Fixed>,
    pub mean_wall_ns: Option<Fixed>,
    pub status: Status,
    pub detail: String,
}

impl Record {
    /// Blank the timing columns, the only ones that vary between runs.
    pub fn without_timing(mut self) -> Self {
        self.wall_time_ns = self.wall_time_ns.map(|_| 0);
        self.mean_wall_ns = self.mean_wall_ns.map(|_| Fixed(0.0));
        self
    }
}

/// Write the header and all records.
pub fn write_csv<W: io::Write>(records: &[Record], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Read records written by [`write_csv`], checking the header.
pub fn read_csv<R: io::Read>(input: R) -> Result<Vec<Record>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != HEADER {
        return Err(HarnessError::Config(format!(
            "unexpected CSV header (expected schema {SCHEMA}): {}",
            header.join(",")
        )));
    }
    let records: Vec<Record> = r.deserialize().collect::<Result<_, _>>()?;
    if let Some(bad) = records.iter().find(|r| r.schema != SCHEMA) {
        return Err(HarnessError::Config(format!("unsupported schema {:?}", bad.schema)));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial() -> Record {
        Record {
            schema: SCHEMA.into(),
            kind: RecordKind::Trial,
            cell: 3,
            trial: Some(7),
            family: "random-edits".into(),
            tester: "main".into(),
            n: 1024,
            k: 4,
            c: Fixed(1.5),
            h: None,
            delta: Fixed(0.1),
            seed: 99,
            verdict: Some(Verdict::Yes),
            truth: Some(Truth::Gap),
            queries_total: Some(10),
            queries_distinct: Some(8),
            oracle_calls: Some(2),
            wall_time_ns: Some(1234),
            yes_error: None,
            no_error: None,
            mean_queries: None,
            median_queries: None,
            mean_wall_ns: None,
            status: Status::Ok,
            detail: "alpha=8, beta=4".into(),
        }
    }

    #[test]
    fn round_trip_and_format() {
        let mut buf = Vec::new();
        write_csv(&[trial()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], HEADER.join(","));
        assert_eq!(
            lines[1],
            "v1,trial,3,7,random-edits,main,1024,4,1.500000,,0.100000,99,YES,GAP,10,8,2,1234,,,,,,ok,\"alpha=8, beta=4\""
        );
        assert!(!text.contains('\r'));
        assert_eq!(read_csv(&buf[..]).unwrap(), vec![trial()]);
    }

    #[test]
    fn header_only_for_no_records() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", HEADER.join(",")));
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
