//! The zero-gap tester: sample positions, compare symbols.

use crate::access::{MeteredView, RandomStream};
use crate::strings::Verdict;

/// Sample size `⌈(n / (1+α)) · ln(1/δ')⌉` with `δ' = min(δ, 1/3)`, capped at
/// `n`.
///
/// If `ED > α` then the Hamming distance exceeds `α` as well, so each uniform
/// position misses every mismatch with probability below `1 − (α+1)/n`, and
/// `m` draws all miss with probability at most `δ'`.
pub fn equality_sample_size(n: usize, alpha: usize, delta: f64) -> usize {
    if n == 0 || alpha >= n {
        return 0;
    }
    let d = delta.min(1.0 / 3.0);
    let m = (n as f64 / (1.0 + alpha as f64) * (1.0 / d).ln()).ceil();
    if m >= n as f64 {
        n
    } else {
        m as usize
    }
}

/// Positions to compare. When the sample would cover the string anyway the
/// whole string is scanned in order, which is never worse.
pub fn equality_positions(n: usize, alpha: usize, delta: f64, rs: &mut RandomStream) -> Vec<usize> {
    let m = equality_sample_size(n, alpha, delta);
    if m >= n {
        (0..m).collect()
    } else {
        (0..m).map(|_| rs.uniform_index(n)).collect()
    }
}

/// `GapED(α, 0)`: YES iff `x` and `y` agree on every sampled position.
///
/// Equal strings always get YES. For `α ≥ n` the answer is YES without any
/// reads, since `ED ≤ n` rules out the NO case.
pub fn equality_test(x: MeteredView<'_>, y: MeteredView<'_>, alpha: usize, delta: f64, rs: &mut RandomStream) -> Verdict {
    assert_eq!(x.len(), y.len(), "equality test needs equal lengths");
    let positions = equality_positions(x.len(), alpha, delta, rs);
    let mut agree = true;
    for &p in &positions {
        agree &= x.read(p) == y.read(p);
    }
    Verdict::from_bool(agree)
}

/// [`equality_test`] against several `y`s sharing one sample; the common `x`
/// is read once per sampled position.
pub fn equality_test_shared(
    x: MeteredView<'_>,
    ys: &[MeteredView<'_>],
    alpha: usize,
    delta: f64,
    rs: &mut RandomStream,
) -> Vec<Verdict> {
    let positions = equality_positions(x.len(), alpha, delta, rs);
    let common = x.fetch_at(&positions);
    ys.iter()
        .map(|y| {
            assert_eq!(y.len(), x.len(), "equality test needs equal lengths");
            Verdict::from_bool(y.fetch_at(&positions) == common)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{certify_non_adaptive, MeteredString};

    #[test]
    fn sample_size() {
        assert_eq!(equality_sample_size(100, 100, 0.1), 0);
        assert_eq!(equality_sample_size(100, 0, 0.1), 100);
        // ⌈(1000/10) ln 3⌉ = ⌈109.86⌉
        assert_eq!(equality_sample_size(1000, 9, 0.5), 110);
    }

    #[test]
    fn equal_strings_always_pass() {
        let x = MeteredString::new((0..500).collect());
        let y = MeteredString::new((0..500).collect());
        for seed in 0..20 {
            let v = equality_test(x.view(), y.view(), 10, 0.1, &mut RandomStream::new(seed));
            assert_eq!(v, Verdict::Yes);
        }
    }

    #[test]
    fn huge_alpha_reads_nothing() {
        let x = MeteredString::new(vec![0; 50]);
        let y = MeteredString::new(vec![1; 50]);
        let v = equality_test(x.view(), y.view(), 50, 0.01, &mut RandomStream::new(1));
        assert_eq!(v, Verdict::Yes);
        assert_eq!(x.reads() + y.reads(), 0);
    }

    #[test]
    fn planted_mismatches_are_caught() {
        let n = 2000;
        let alpha = 20;
        let mut caught = 0;
        let trials = 1000;
        let mut content = RandomStream::new(99);
        for t in 0..trials {
            let xs: Vec<u32> = (0..n as u32).collect();
            let mut ys = xs.clone();
            for p in content.sample_distinct(n, 2 * alpha) {
                ys[p] = u32::MAX;
            }
            let (x, y) = (MeteredString::new(xs), MeteredString::new(ys));
            let v = equality_test(x.view(), y.view(), alpha, 1.0 / 3.0, &mut RandomStream::new(t));
            caught += usize::from(v == Verdict::No);
        }
        assert!(caught as f64 / trials as f64 >= 0.60, "caught {caught}");
    }

    #[test]
    fn non_adaptive() {
        for alpha in [0, 3, 40] {
            let cert = certify_non_adaptive(
                |x: &MeteredString, y: &MeteredString, rs| {
                    equality_test(x.view(), y.view(), alpha, 0.1, rs);
                },
                256,
                3,
                5,
            );
            assert!(cert.passed());
        }
    }
}
