use gapedit::exec::Execution;
use gapedit::harness::{read_csv, run_grid, write_csv, Family, GridConfig, Record, RecordKind, TesterKind};
use proptest::prelude::*;

fn config(seed: u64, execution: Execution) -> GridConfig {
    GridConfig {
        seed,
        trials: 6,
        n: vec![300, 1024],
        k: vec![1, 2],
        c: vec![3.0],
        tester: vec![TesterKind::Lv, TesterKind::Multilevel, TesterKind::Ao],
        family: vec![Family::RandomEdits, Family::Rotation],
        alphabet: 8,
        execution,
        ..GridConfig::default()
    }
}

fn csv(config: &GridConfig) -> Vec<u8> {
    let records: Vec<Record> = run_grid(config)
        .unwrap()
        .records
        .into_iter()
        .map(Record::without_timing)
        .collect();
    let mut out = Vec::new();
    write_csv(&records, &mut out).unwrap();
    out
}

#[test]
fn sequential_and_parallel_write_the_same_bytes() {
    assert_eq!(csv(&config(4, Execution::Sequential)), csv(&config(4, Execution::Parallel)));
}

#[test]
fn rows_are_ordered_by_cell_then_trial() {
    let out = run_grid(&config(5, Execution::Parallel)).unwrap();
    let keys: Vec<(usize, Option<usize>, bool)> = out
        .records
        .iter()
        .map(|r| (r.cell, r.trial, r.kind == RecordKind::Summary))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by_key(|&(cell, trial, summary)| (cell, summary, trial));
    assert_eq!(keys, sorted);
}

#[test]
fn csv_round_trip() {
    let bytes = csv(&config(6, Execution::Parallel));
    let records = read_csv(&bytes[..]).unwrap();
    let mut again = Vec::new();
    write_csv(&records, &mut again).unwrap();
    assert_eq!(bytes, again);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn same_seed_same_csv(seed in any::<u64>()) {
        let cfg = GridConfig { trials: 3, ..config(seed, Execution::Parallel) };
        prop_assert_eq!(csv(&cfg), csv(&cfg));
    }
}
