//! Exact edit distance computations.
//!
//! Everything here is a pure function of its inputs. These routines are the
//! ground truth the testers are scored against, and the leaf oracles that the
//! reductions eventually call on short substrings.
//!
//! Three independent routes to `ED` exist on purpose:
//! - [`ed_exact`]: the full Wagner–Fischer table, two rows at a time.
//! - [`ed_at_most`]: a banded table with a doubling band (Ukkonen's cut-off).
//! - [`gap_ed_lv`]: diagonal furthest-reaching points (Landau–Vishkin).

use serde::{Deserialize, Serialize};

use crate::error::ParamError;

/// An opaque alphabet symbol. Equality is the only operation ever used on it.
pub type Symbol = u32;

/// Answer of a decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Yes,
    No,
}

impl Verdict {
    pub fn from_bool(yes: bool) -> Self {
        if yes {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Verdict::Yes
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "YES",
            Verdict::No => "NO",
        }
    }
}

/// True classification of a gap instance.
///
/// `Gap` marks instances with `beta < ED <= alpha`, where either answer is
/// legal; those are excluded from error statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Truth {
    Yes,
    No,
    Gap,
}

impl Truth {
    /// Whether `verdict` is a legal answer for an instance with this truth.
    pub fn accepts(self, verdict: Verdict) -> bool {
        match self {
            Truth::Yes => verdict == Verdict::Yes,
            Truth::No => verdict == Verdict::No,
            Truth::Gap => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Truth::Yes => "YES",
            Truth::No => "NO",
            Truth::Gap => "GAP",
        }
    }
}

/// Anything with a length: plain slices and metered views alike.
pub trait Extent {
    fn extent(&self) -> usize;
}

impl<T> Extent for &[T] {
    fn extent(&self) -> usize {
        self.len()
    }
}

impl<T> Extent for Vec<T> {
    fn extent(&self) -> usize {
        self.len()
    }
}

/// A string that can be cut into windows and read out.
///
/// Reductions are written against this trait so that the same code runs on
/// plain slices (ground-truth checks) and on metered views (testers).
pub trait Window: Extent + Copy {
    /// The sub-window `[start, start + len)`, relative to `self`.
    fn window(&self, start: usize, len: usize) -> Self;
    /// All symbols of the window, in order.
    fn fetch(&self) -> Vec<Symbol>;
}

impl Window for &[Symbol] {
    fn window(&self, start: usize, len: usize) -> Self {
        &self[start..start + len]
    }

    fn fetch(&self) -> Vec<Symbol> {
        self.to_vec()
    }
}

/// A `GapED(alpha, beta)` instance: YES if `ED <= beta`, NO if `ED > alpha`.
#[derive(Clone, Copy, Debug)]
pub struct GapInstance<V> {
    pub x: V,
    pub y: V,
    pub alpha: usize,
    pub beta: usize,
}

impl<V: Extent> GapInstance<V> {
    pub fn new(x: V, y: V, alpha: usize, beta: usize) -> Result<Self, ParamError> {
        if x.extent() != y.extent() {
            return Err(ParamError::LengthMismatch {
                x: x.extent(),
                y: y.extent(),
            });
        }
        if alpha < beta {
            return Err(ParamError::violated(format!(
                "gap thresholds need alpha >= beta, got alpha={alpha} beta={beta}"
            )));
        }
        Ok(GapInstance { x, y, alpha, beta })
    }

    pub fn n(&self) -> usize {
        self.x.extent()
    }
}

/// A shifted gap instance: YES if `ED_beta <= gamma`, NO if `ED > 3 alpha`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftedInstance<V> {
    pub x: V,
    pub y: V,
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
}

impl<V: Extent> ShiftedInstance<V> {
    pub fn new(x: V, y: V, alpha: usize, beta: usize, gamma: usize) -> Result<Self, ParamError> {
        if x.extent() != y.extent() {
            return Err(ParamError::LengthMismatch {
                x: x.extent(),
                y: y.extent(),
            });
        }
        if !(alpha >= beta && beta >= gamma) {
            return Err(ParamError::violated(format!(
                "shifted thresholds need alpha >= beta >= gamma, got {alpha}, {beta}, {gamma}"
            )));
        }
        Ok(ShiftedInstance {
            x,
            y,
            alpha,
            beta,
            gamma,
        })
    }

    pub fn n(&self) -> usize {
        self.x.extent()
    }
}

/// Edit distance by the textbook quadratic dynamic program.
pub fn ed_exact<T: PartialEq>(x: &[T], y: &[T]) -> usize {
    if x.is_empty() {
        return y.len();
    }
    if y.is_empty() {
        return x.len();
    }
    let mut prev: Vec<usize> = (0..=y.len()).collect();
    let mut cur = vec![0usize; y.len() + 1];
    for (i, a) in x.iter().enumerate() {
        cur[0] = i + 1;
        for (j, b) in y.iter().enumerate() {
            let sub = prev[j] + usize::from(a != b);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

/// Banded dynamic program restricted to cells with `|i - j| <= band`.
///
/// Returns `Some(d)` iff `ED(x, y) = d <= band`. Any alignment of cost at most
/// `band` stays inside the band, so the returned value is exact.
pub fn ed_within<T: PartialEq>(x: &[T], y: &[T], band: usize) -> Option<usize> {
    let (n, m) = (x.len(), y.len());
    if n.abs_diff(m) > band {
        return None;
    }
    const INF: usize = usize::MAX / 4;
    let mut prev = vec![INF; m + 2];
    let mut cur = vec![INF; m + 2];
    for (j, cell) in prev.iter_mut().enumerate().take(band.min(m) + 1) {
        *cell = j;
    }
    for i in 1..=n {
        let lo = i.saturating_sub(band);
        let hi = (i + band).min(m);
        if lo > 0 {
            cur[lo - 1] = INF;
        }
        for j in lo..=hi {
            let v = if j == 0 {
                i
            } else {
                let sub = prev[j - 1] + usize::from(x[i - 1] != y[j - 1]);
                sub.min(prev[j] + 1).min(cur[j - 1] + 1)
            };
            cur[j] = v;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let d = prev[m];
    (d <= band).then_some(d)
}

/// Exact `ED(x, y)` if it is at most `limit`, found by doubling the band.
pub fn ed_at_most<T: PartialEq>(x: &[T], y: &[T], limit: usize) -> Option<usize> {
    let mut band = x.len().abs_diff(y.len()).max(1);
    loop {
        let k = band.min(limit);
        if let Some(d) = ed_within(x, y, k) {
            return Some(d);
        }
        if k == limit {
            return None;
        }
        band = band.saturating_mul(2);
    }
}

/// Landau–Vishkin k-differences: `Some(ED(x, y))` if it is at most `beta`,
/// otherwise `None` (the threshold was exceeded).
///
/// Tracks, for every edit budget `d` and diagonal `k = j - i`, the furthest
/// row reachable with `d` edits, extending along runs of matching symbols.
/// The lengths may differ.
pub fn gap_ed_lv<T: PartialEq>(x: &[T], y: &[T], beta: usize) -> Option<usize> {
    let (n, m) = (x.len() as isize, y.len() as isize);
    let target = m - n;
    if target.unsigned_abs() > beta {
        return None;
    }
    const UNSET: isize = isize::MIN / 4;
    let off = beta as isize + 1;
    let width = 2 * beta + 3;
    let mut prev = vec![UNSET; width];
    let mut cur = vec![UNSET; width];

    let slide = |mut i: isize, k: isize| -> isize {
        let mut j = i + k;
        while i < n && j < m && x[i as usize] == y[j as usize] {
            i += 1;
            j += 1;
        }
        i
    };

    for d in 0..=beta as isize {
        for k in -d..=d {
            let idx = (k + off) as usize;
            let lower = 0.max(-k);
            let upper = n.min(m - k);
            let reach = if d == 0 {
                0
            } else {
                let sub = prev[idx] + 1;
                let del = prev[idx + 1] + 1;
                let ins = prev[idx - 1];
                sub.max(del).max(ins)
            };
            if upper < lower || reach < lower {
                cur[idx] = UNSET;
                continue;
            }
            let row = slide(reach.min(upper), k);
            cur[idx] = row;
            if k == target && row >= n {
                return Some(d as usize);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    None
}

/// The pairs of truncated strings whose distances `ED_beta` minimizes over.
///
/// For each shift `delta` in `[0..=min(|x|, |y|, beta)]` this yields the
/// pair that drops `delta` leading symbols of `x` and trailing symbols of `y`,
/// and the mirrored pair.
fn shift_candidates<'a, T>(
    x: &'a [T],
    y: &'a [T],
    beta: usize,
) -> impl Iterator<Item = (&'a [T], &'a [T])> + 'a {
    let max_shift = x.len().min(y.len()).min(beta);
    (0..=max_shift).flat_map(move |delta| {
        let forward = (&x[delta..], &y[..y.len() - delta]);
        let backward = (&x[..x.len() - delta], &y[delta..]);
        [forward, backward]
    })
}

/// `ED_beta(x, y)`: the minimum edit distance over all shifts of at most
/// `beta` positions, computed with an exact (banded) table per shift.
pub fn shifted_ed_exact<T: PartialEq>(x: &[T], y: &[T], beta: usize) -> usize {
    if shift_candidates(x, y, beta).any(|(a, b)| a == b) {
        return 0;
    }
    let mut best = x.len().max(y.len());
    for (a, b) in shift_candidates(x, y, beta) {
        if best == 0 {
            break;
        }
        if let Some(d) = ed_at_most(a, b, best - 1) {
            best = d;
        }
    }
    best
}

/// `Some(ED_beta(x, y))` if it is at most `bound`, computed with one
/// Landau–Vishkin run per shift.
pub fn shifted_ed_lv<T: PartialEq>(x: &[T], y: &[T], beta: usize, bound: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (a, b) in shift_candidates(x, y, beta) {
        let limit = match best {
            Some(0) => break,
            Some(d) => d - 1,
            None => bound,
        };
        if let Some(d) = gap_ed_lv(a, b, limit) {
            best = Some(d);
        }
    }
    best
}

/// The true classification of a gap instance.
///
/// Uses a Landau–Vishkin run capped at `alpha`, which decides `ED <= alpha`
/// exactly and yields `ED` itself when it does not exceed the cap.
pub fn ed_solve_gap<T: PartialEq>(inst: &GapInstance<&[T]>) -> Truth {
    classify(gap_ed_lv(inst.x, inst.y, inst.alpha), inst.alpha, inst.beta)
}

/// Classify a known distance (or "more than `alpha`") against thresholds.
pub fn classify(distance: Option<usize>, alpha: usize, beta: usize) -> Truth {
    match distance {
        Some(d) if d <= beta => Truth::Yes,
        Some(d) if d <= alpha => Truth::Gap,
        _ => Truth::No,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(text: &str) -> Vec<u8> {
        text.as_bytes().to_vec()
    }

    #[test]
    fn textbook_examples() {
        assert_eq!(ed_exact(&s("abc"), &s("abc")), 0);
        assert_eq!(ed_exact(&s("abcd"), &s("bcda")), 2);
        assert_eq!(ed_exact(&s("kitten"), &s("sitting")), 3);
        assert_eq!(ed_exact(&s(""), &s("abc")), 3);
        assert_eq!(ed_exact(&s("abc"), &s("")), 3);
    }

    #[test]
    fn lv_examples() {
        let x = s("abracadabra");
        assert_eq!(gap_ed_lv(&x, &x, 0), Some(0));
        assert_eq!(gap_ed_lv(&s("abcd"), &s("bcda"), 1), None);
        assert_eq!(gap_ed_lv(&s("abcd"), &s("bcda"), 2), Some(2));
        assert_eq!(gap_ed_lv(&s("kitten"), &s("sitting"), 3), Some(3));
        assert_eq!(gap_ed_lv(&s("kitten"), &s("sitting"), 2), None);
        assert_eq!(gap_ed_lv(&s(""), &s(""), 0), Some(0));
        assert_eq!(gap_ed_lv(&s(""), &s("ab"), 1), None);
        assert_eq!(gap_ed_lv(&s(""), &s("ab"), 2), Some(2));
    }

    #[test]
    fn shifted_examples() {
        let x: Vec<u32> = (0..10).collect();
        assert_eq!(shifted_ed_exact(&x, &x, 5), 0);
        assert_eq!(shifted_ed_exact(&s("abcd"), &s("bcda"), 0), 2);
        // Move the last two symbols to the front.
        let mut y = x[8..].to_vec();
        y.extend_from_slice(&x[..8]);
        assert_eq!(ed_exact(&x, &y), 4);
        assert_eq!(shifted_ed_exact(&x, &y, 2), 0);
        assert_eq!(shifted_ed_exact(&x, &y, 1), 2);
        assert_eq!(shifted_ed_lv(&x, &y, 2, 0), Some(0));
        assert_eq!(shifted_ed_lv(&x, &y, 1, 1), None);
    }

    #[test]
    fn gap_adjudication() {
        let abcd = s("abcd");
        let bcda = s("bcda");
        let same = GapInstance::new(&abcd[..], &abcd[..], 5, 0).unwrap();
        assert_eq!(ed_solve_gap(&same), Truth::Yes);
        let no = GapInstance::new(&abcd[..], &bcda[..], 1, 0).unwrap();
        assert_eq!(ed_solve_gap(&no), Truth::No);
        let gap = GapInstance::new(&abcd[..], &bcda[..], 3, 1).unwrap();
        assert_eq!(ed_solve_gap(&gap), Truth::Gap);
    }

    #[test]
    fn instance_validation() {
        let a = s("ab");
        let b = s("abc");
        assert!(GapInstance::new(&a[..], &b[..], 1, 0).is_err());
        assert!(GapInstance::new(&a[..], &a[..], 0, 1).is_err());
        assert!(ShiftedInstance::new(&a[..], &a[..], 3, 1, 2).is_err());
        assert!(ShiftedInstance::new(&a[..], &a[..], 3, 2, 1).is_ok());
    }

    fn binary(max_len: usize) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..2, 0..=max_len)
    }

    fn small_alpha(len: usize) -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..4, len)
    }

    proptest! {
        #[test]
        fn banded_and_lv_match_full_table(x in binary(24), y in binary(24)) {
            let d = ed_exact(&x, &y);
            prop_assert_eq!(ed_at_most(&x, &y, 64), Some(d));
            prop_assert_eq!(gap_ed_lv(&x, &y, d), Some(d));
            if d > 0 {
                prop_assert_eq!(gap_ed_lv(&x, &y, d - 1), None);
                prop_assert_eq!(ed_within(&x, &y, d - 1), None);
            }
        }

        #[test]
        fn symmetric_and_triangle(x in binary(16), y in binary(16), z in binary(16)) {
            let xy = ed_exact(&x, &y);
            prop_assert_eq!(xy, ed_exact(&y, &x));
            prop_assert!(xy <= ed_exact(&x, &z) + ed_exact(&z, &y));
        }

        #[test]
        fn hereditary((x, y, i, j) in (0usize..=48).prop_flat_map(|n| {
            (small_alpha(n), small_alpha(n), 0..=n, 0..=n)
        })) {
            let (i, j) = (i.min(j), i.max(j));
            prop_assert!(ed_exact(&x[i..j], &y[i..j]) <= ed_exact(&x, &y));
        }

        #[test]
        fn subadditive(x1 in binary(12), x2 in binary(12), y1 in binary(12), y2 in binary(12)) {
            let x: Vec<u8> = x1.iter().chain(&x2).copied().collect();
            let y: Vec<u8> = y1.iter().chain(&y2).copied().collect();
            prop_assert!(ed_exact(&x, &y) <= ed_exact(&x1, &y1) + ed_exact(&x2, &y2));
        }

        #[test]
        fn shifted_sandwich_and_monotone(x in binary(20), y in binary(20), beta in 0usize..8) {
            let ed = ed_exact(&x, &y);
            let shifted = shifted_ed_exact(&x, &y, beta);
            prop_assert!(shifted <= ed);
            prop_assert!(ed <= shifted + 2 * beta);
            prop_assert!(shifted_ed_exact(&x, &y, beta + 1) <= shifted);
            prop_assert_eq!(shifted_ed_exact(&x, &y, 0), ed);
            prop_assert_eq!(shifted_ed_lv(&x, &y, beta, shifted), Some(shifted));
            if shifted > 0 {
                prop_assert_eq!(shifted_ed_lv(&x, &y, beta, shifted - 1), None);
            }
        }
    }
}
