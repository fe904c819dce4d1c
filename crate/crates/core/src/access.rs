//! Query-metered access to input strings, seeded randomness, and the
//! non-adaptivity certificate.
//!
//! Testers never touch symbol vectors directly: they read through a
//! [`MeteredView`], so every character access is charged to the owning
//! [`MeteredString`]. Reads are charged individually with no deduplication;
//! the number of distinct positions touched is tracked alongside.

use std::cell::{Cell, RefCell};
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::strings::{Extent, Symbol, Window};

/// Which of the two input strings an access addressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StringId {
    X,
    Y,
}

/// A read-only symbol source that counts (and optionally logs) every access.
///
/// Single-owner state: it may be moved across threads but not shared.
#[derive(Debug)]
pub struct MeteredString {
    symbols: Vec<Symbol>,
    reads: Cell<u64>,
    distinct: Cell<u64>,
    touched: RefCell<Vec<u64>>,
    log: RefCell<Option<Vec<usize>>>,
}

impl MeteredString {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        let words = symbols.len().div_ceil(64);
        MeteredString {
            symbols,
            reads: Cell::new(0),
            distinct: Cell::new(0),
            touched: RefCell::new(vec![0; words]),
            log: RefCell::new(None),
        }
    }

    /// Like [`MeteredString::new`] with position logging switched on.
    pub fn logged(symbols: Vec<Symbol>) -> Self {
        let s = Self::new(symbols);
        s.set_logging(true);
        s
    }

    pub fn set_logging(&self, on: bool) {
        let mut log = self.log.borrow_mut();
        match (on, log.is_some()) {
            (true, false) => *log = Some(Vec::new()),
            (false, true) => *log = None,
            _ => {}
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Read one symbol, charging one query.
    ///
    /// # Panics
    /// On an out-of-bounds position; that is a caller bug, not an input error.
    pub fn read(&self, i: usize) -> Symbol {
        assert!(
            i < self.symbols.len(),
            "read at {i} outside string of length {}",
            self.symbols.len()
        );
        self.reads.set(self.reads.get() + 1);
        let mut touched = self.touched.borrow_mut();
        let (word, bit) = (i / 64, 1u64 << (i % 64));
        if touched[word] & bit == 0 {
            touched[word] |= bit;
            self.distinct.set(self.distinct.get() + 1);
        }
        if let Some(log) = self.log.borrow_mut().as_mut() {
            log.push(i);
        }
        self.symbols[i]
    }

    /// Total reads since construction or the last reset.
    pub fn reads(&self) -> u64 {
        self.reads.get()
    }

    /// Number of distinct positions read since construction or the last reset.
    pub fn distinct_reads(&self) -> u64 {
        self.distinct.get()
    }

    /// The logged access positions, if logging is on.
    pub fn log(&self) -> Option<Vec<usize>> {
        self.log.borrow().clone()
    }

    pub fn reset(&self) {
        self.reads.set(0);
        self.distinct.set(0);
        self.touched.borrow_mut().iter_mut().for_each(|w| *w = 0);
        if let Some(log) = self.log.borrow_mut().as_mut() {
            log.clear();
        }
    }

    /// A view of the whole string.
    pub fn view(&self) -> MeteredView<'_> {
        MeteredView {
            src: self,
            start: 0,
            len: self.symbols.len(),
        }
    }

    /// Unmetered access for adjudication code that is not under test.
    pub fn symbols_unmetered(&self) -> &[Symbol] {
        &self.symbols
    }
}

/// A window `[start, start + len)` into a [`MeteredString`].
#[derive(Clone, Copy)]
pub struct MeteredView<'a> {
    src: &'a MeteredString,
    start: usize,
    len: usize,
}

impl fmt::Debug for MeteredView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeteredView")
            .field("start", &self.start)
            .field("len", &self.len)
            .finish()
    }
}

impl<'a> MeteredView<'a> {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Offset of this window in the underlying string.
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn source(&self) -> &'a MeteredString {
        self.src
    }

    pub fn read(&self, i: usize) -> Symbol {
        assert!(i < self.len, "read at {i} outside view of length {}", self.len);
        self.src.read(self.start + i)
    }

    /// Sub-window relative to this one; windows compose additively.
    pub fn window(&self, start: usize, len: usize) -> MeteredView<'a> {
        assert!(
            start + len <= self.len,
            "window [{start}, {}) outside view of length {}",
            start + len,
            self.len
        );
        MeteredView {
            src: self.src,
            start: self.start + start,
            len,
        }
    }

    /// Read every symbol of the window in order.
    pub fn fetch(&self) -> Vec<Symbol> {
        (0..self.len).map(|i| self.read(i)).collect()
    }

    /// Read the symbols at the given (window-relative) positions, in order.
    pub fn fetch_at(&self, positions: &[usize]) -> Vec<Symbol> {
        positions.iter().map(|&i| self.read(i)).collect()
    }

    /// Whether two windows cover the same range of the same string.
    pub fn same_range(&self, other: &MeteredView<'_>) -> bool {
        std::ptr::eq(self.src, other.src) && self.start == other.start && self.len == other.len
    }
}

impl Extent for MeteredView<'_> {
    fn extent(&self) -> usize {
        self.len
    }
}

impl Window for MeteredView<'_> {
    fn window(&self, start: usize, len: usize) -> Self {
        MeteredView::window(self, start, len)
    }

    fn fetch(&self) -> Vec<Symbol> {
        MeteredView::fetch(self)
    }
}

/// SplitMix64 finalizer; used only to derive child seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A seeded, platform-independent random stream with label-based splitting.
///
/// A child stream depends only on the parent's seed and the label, never on
/// how many values the parent (or any sibling) has drawn.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        RandomStream {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn child(&self, label: u64) -> RandomStream {
        RandomStream::new(mix64(self.seed ^ mix64(label)))
    }

    /// Uniform draw from `[0, m)`.
    ///
    /// # Panics
    /// If `m == 0`.
    pub fn uniform_index(&mut self, m: usize) -> usize {
        assert!(m > 0, "uniform_index over an empty range");
        self.rng.gen_range(0..m as u64) as usize
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform draw from `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// `amount` distinct positions from `[0, length)`, sorted ascending.
    pub fn sample_distinct(&mut self, length: usize, amount: usize) -> Vec<usize> {
        if amount >= length {
            return (0..length).collect();
        }
        let mut picked = rand::seq::index::sample(&mut self.rng, length, amount).into_vec();
        picked.sort_unstable();
        picked
    }
}

/// The ordered list of accesses a tester made, tagged by string.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SamplePlan {
    pub entries: Vec<(StringId, usize)>,
}

impl SamplePlan {
    /// Combine the position logs of the two inputs (X accesses, then Y).
    pub fn from_logs(x: &MeteredString, y: &MeteredString) -> Self {
        let tag = |id, s: &MeteredString| {
            s.log()
                .unwrap_or_default()
                .into_iter()
                .map(move |p| (id, p))
        };
        SamplePlan {
            entries: tag(StringId::X, x).chain(tag(StringId::Y, y)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Outcome of [`certify_non_adaptive`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Pass {
        plan_len: usize,
    },
    Fail {
        trial: usize,
        expected: SamplePlan,
        observed: SamplePlan,
    },
}

impl Certificate {
    pub fn passed(&self) -> bool {
        matches!(self, Certificate::Pass { .. })
    }
}

/// Content pair number `trial` for certification: a rotating mix of equal,
/// near-equal, shifted, unrelated and low-entropy strings of length `n`.
pub fn certification_pair(n: usize, trial: usize, rs: &mut RandomStream) -> (Vec<Symbol>, Vec<Symbol>) {
    let random = |rs: &mut RandomStream, alphabet: usize| -> Vec<Symbol> {
        (0..n).map(|_| rs.uniform_index(alphabet) as Symbol).collect()
    };
    match trial % 5 {
        0 => {
            let x = random(rs, 2);
            (x.clone(), x)
        }
        1 => {
            let x = random(rs, 4);
            let mut y = x.clone();
            for _ in 0..n.div_ceil(16) {
                let i = rs.uniform_index(n.max(1));
                if i < n {
                    y[i] = 4 + rs.uniform_index(4) as Symbol;
                }
            }
            (x, y)
        }
        2 => (random(rs, 1 << 16), random(rs, 1 << 16)),
        3 => {
            let x = random(rs, 8);
            let s = if n == 0 { 0 } else { rs.uniform_index(n / 2 + 1) };
            let mut y = x[n - s..].to_vec();
            y.extend_from_slice(&x[..n - s]);
            (x, y)
        }
        _ => (vec![0; n], random(rs, 2)),
    }
}

/// Run `tester` with the same seed on `trials` different content pairs of
/// length `n` and check that the logged access sequences never change.
///
/// A tester passes when its sample plan is a function of `(n, parameters,
/// seed)` alone. Position sequences (not multisets) are compared.
pub fn certify_non_adaptive<F>(mut tester: F, n: usize, seed: u64, trials: usize) -> Certificate
where
    F: FnMut(&MeteredString, &MeteredString, &mut RandomStream),
{
    let contents = RandomStream::new(seed ^ 0x00c0_ffee_d00d_f00d);
    let mut reference: Option<SamplePlan> = None;
    for trial in 0..trials {
        let (xs, ys) = certification_pair(n, trial, &mut contents.child(trial as u64));
        let x = MeteredString::logged(xs);
        let y = MeteredString::logged(ys);
        let mut rs = RandomStream::new(seed);
        tester(&x, &y, &mut rs);
        let plan = SamplePlan::from_logs(&x, &y);
        match &reference {
            None => reference = Some(plan),
            Some(expected) if *expected != plan => {
                return Certificate::Fail {
                    trial,
                    expected: expected.clone(),
                    observed: plan,
                }
            }
            Some(_) => {}
        }
    }
    Certificate::Pass {
        plan_len: reference.map_or(0, |p| p.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counters_and_log() {
        let s = MeteredString::new((0..10).collect());
        assert_eq!(s.reads(), 0);
        s.read(3);
        s.read(3);
        assert_eq!(s.reads(), 2);
        assert_eq!(s.distinct_reads(), 1);
        assert_eq!(s.log(), None);

        let t = MeteredString::logged((0..10).collect());
        for i in [5, 1, 5] {
            t.read(i);
        }
        assert_eq!(t.log(), Some(vec![5, 1, 5]));
        assert_eq!(t.reads(), 3);
        t.reset();
        assert_eq!(t.reads(), 0);
        assert_eq!(t.log(), Some(vec![]));
    }

    #[test]
    #[should_panic]
    fn out_of_bounds_read_panics() {
        MeteredString::new(vec![1, 2]).read(2);
    }

    #[test]
    fn views_compose() {
        let s = MeteredString::new((0..100).collect());
        let v = s.view().window(10, 50).window(5, 20);
        assert_eq!(v.start(), 15);
        assert_eq!(v.read(0), 15);
        assert_eq!(v.fetch().len(), 20);
        assert!(v.same_range(&s.view().window(15, 20)));
    }

    #[test]
    fn counters_add_across_testers() {
        let run_a = |s: &MeteredString| {
            for i in 0..7 {
                s.read(i);
            }
        };
        let run_b = |s: &MeteredString| {
            for i in (0..20).step_by(3) {
                s.read(i);
            }
        };
        let fresh_a = MeteredString::new(vec![0; 20]);
        run_a(&fresh_a);
        let fresh_b = MeteredString::new(vec![0; 20]);
        run_b(&fresh_b);
        let both = MeteredString::new(vec![0; 20]);
        run_a(&both);
        run_b(&both);
        assert_eq!(both.reads(), fresh_a.reads() + fresh_b.reads());
    }

    #[test]
    fn uniform_index_is_deterministic() {
        let mut rs = RandomStream::new(7);
        assert_eq!(rs.uniform_index(1), 0);
        let a: Vec<usize> = {
            let mut r = RandomStream::new(99);
            (0..3).map(|_| r.uniform_index(10)).collect()
        };
        let b: Vec<usize> = {
            let mut r = RandomStream::new(99);
            (0..3).map(|_| r.uniform_index(10)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_index_is_uniform() {
        let mut rs = RandomStream::new(2024);
        let mut buckets = [0usize; 4];
        let draws = 100_000;
        for _ in 0..draws {
            buckets[rs.uniform_index(4)] += 1;
        }
        for b in buckets {
            let freq = b as f64 / draws as f64;
            assert!((freq - 0.25).abs() <= 0.02, "bucket frequency {freq}");
        }
    }

    #[test]
    fn children_ignore_sibling_draws() {
        let parent = RandomStream::new(11);
        let mut first = parent.child(3);
        let mut busy = parent.clone();
        for _ in 0..100 {
            busy.next_u64();
        }
        let _ = busy.child(4).next_u64();
        let mut again = busy.child(3);
        assert_eq!(first.next_u64(), again.next_u64());
        assert_ne!(parent.child(3).next_u64(), parent.child(4).next_u64());
    }

    #[test]
    #[should_panic]
    fn empty_range_panics() {
        RandomStream::new(0).uniform_index(0);
    }

    #[test]
    fn adaptive_probe_is_caught() {
        let cert = certify_non_adaptive(
            |x, _y, _rs| {
                let first = x.read(0) as usize;
                x.read(1 + first % (x.len() - 1));
            },
            64,
            5,
            5,
        );
        assert!(!cert.passed());
    }

    #[test]
    fn fixed_probe_passes() {
        let cert = certify_non_adaptive(
            |x, y, rs| {
                for _ in 0..10 {
                    let i = rs.uniform_index(x.len());
                    x.read(i);
                    y.read(i);
                }
            },
            64,
            5,
            5,
        );
        assert_eq!(cert, Certificate::Pass { plan_len: 20 });
    }
}
