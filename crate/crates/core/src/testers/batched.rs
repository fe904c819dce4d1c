//! Batched testers: many instances sharing one first string `X`.
//!
//! Because every plan is fixed before reading, instances in a batch that use
//! the same stream sample the same blocks of `X`, so those reads can be
//! shared.

use crate::access::{MeteredView, RandomStream};
use crate::error::{ParamError, TesterError};
use crate::params::isqrt;
use crate::reductions::{gap_to_shifted_plan, gap_to_shifted_psi, shifted_short_fallback, ShiftGrid, GAP_TO_SHIFTED_NO_LIMIT};
use crate::strings::{ShiftedInstance, Verdict};

use super::{majority_batch, FingerprintTrie, Testers, STAGE_DELTA};

fn same_lengths(x: MeteredView<'_>, ys: &[MeteredView<'_>]) -> Result<(), ParamError> {
    match ys.iter().find(|y| y.len() != x.len()) {
        Some(y) => Err(ParamError::LengthMismatch { x: x.len(), y: y.len() }),
        None => Ok(()),
    }
}

fn thresholds(alpha: usize, beta: usize, gamma: usize) -> Result<(), ParamError> {
    if alpha >= beta && beta >= gamma {
        Ok(())
    } else {
        Err(ParamError::violated(format!(
            "need alpha >= beta >= gamma, got {alpha}, {beta}, {gamma}"
        )))
    }
}

fn gate_error(what: &str) -> TesterError {
    TesterError::Params(ParamError::violated(format!("{what} gate does not hold")))
}

/// `ξ` for the zero-threshold batch: `1 + ξ = ⌈√((q + β) / q)⌉`, at most `β`.
pub fn batched_h0_xi(q: usize, beta: usize) -> usize {
    let (q, target) = (q as u128, (q + beta) as u128);
    let mut s = isqrt(((q + beta as u128) / q) as u64) as u128;
    while s * s * q < target {
        s += 1;
    }
    (s as usize - 1).min(beta)
}

/// Fingerprint sample size
/// `min(n', ⌈(n' / (1 + α)) · ln((c_x c_y q + 1) / δ)⌉)`.
pub fn fingerprint_sample_size(n_prime: usize, alpha: usize, c_x: usize, c_y: usize, q: usize, delta: f64) -> usize {
    let events = (c_x * c_y * q + 1) as f64;
    let m = (n_prime as f64 / (1.0 + alpha as f64) * (events / delta).ln()).ceil();
    if m >= n_prime as f64 {
        n_prime
    } else {
        m.max(0.0) as usize
    }
}

/// Sub-batches of the offset grid grouped by `x` offset: the common string
/// is `X[x..x+n')` and the `q · |ys|` second strings are
/// `Y_j[y..y+n')`, instance-major.
fn grid_sub_batch<'a>(grid: &ShiftGrid, ys: &[MeteredView<'a>]) -> Vec<MeteredView<'a>> {
    ys.iter()
        .flat_map(|y| grid.ys.iter().map(move |&yo| y.window(yo, grid.n_prime)))
        .collect()
}

/// Instance `j` is YES iff any of its `per` answers in `answers` is YES.
fn any_per_instance(answers: &[Verdict], per: usize, into: &mut [bool]) {
    for (j, chunk) in answers.chunks(per).enumerate() {
        into[j] |= chunk.iter().any(|v| v.is_yes());
    }
}

impl Testers {
    /// Shifted tester with zero shifted threshold for a batch
    /// `(X, Y_1), …, (X, Y_q)` of `SGED(α, β, 0)` instances.
    ///
    /// One sample `S` is shared by everything; the fingerprints `X'[S]` for
    /// all `x` offsets go into a trie and each instance is YES iff some
    /// `Y'[S]` is a member. Each answer errs with probability at most `delta`.
    pub fn batched_shifted_h0(
        &self,
        x: MeteredView<'_>,
        ys: &[MeteredView<'_>],
        alpha: usize,
        beta: usize,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Vec<Verdict>, TesterError> {
        same_lengths(x, ys)?;
        thresholds(alpha, beta, 0)?;
        let (n, q) = (x.len(), ys.len());
        self.count_leaf(q);
        if q == 0 {
            return Ok(Vec::new());
        }
        if n <= beta {
            return Ok(ys.iter().map(|&y| shifted_short_fallback(x, y, alpha)).collect());
        }
        let grid = ShiftGrid::new(n, beta, 0, batched_h0_xi(q, beta));
        let m = fingerprint_sample_size(grid.n_prime, alpha, grid.xs.len(), grid.ys.len(), q, delta);
        let sample = rs.sample_distinct(grid.n_prime, m);
        let trie: FingerprintTrie = grid
            .xs
            .iter()
            .map(|&xo| x.window(xo, grid.n_prime).fetch_at(&sample))
            .collect();
        Ok(ys
            .iter()
            .map(|y| {
                let mut found = false;
                for &yo in &grid.ys {
                    found |= trie.contains(&y.window(yo, grid.n_prime).fetch_at(&sample));
                }
                Verdict::from_bool(found)
            })
            .collect())
    }

    /// Gap tester at depth 1 for a batch sharing `X`; requires
    /// `β² ≤ α / (336 ⌈log n⌉)`.
    pub fn batched_gap_h1(
        &self,
        x: MeteredView<'_>,
        ys: &[MeteredView<'_>],
        alpha: usize,
        beta: usize,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Vec<Verdict>, TesterError> {
        same_lengths(x, ys)?;
        thresholds(alpha, beta, 0)?;
        let n = x.len();
        if !self.constants.batched_gap_h1_admits(n, alpha, beta) {
            return Err(gate_error("depth-1 batched gap"));
        }
        if beta == 0 {
            return Ok(self.gap_zero_shared(x, ys, alpha, delta, rs));
        }
        let psi = gap_to_shifted_psi(n, alpha, beta, beta, &self.constants)?;
        debug_assert_eq!(psi, 0);
        majority_batch(self.reps(delta), ys.len(), rs, |rs| {
            self.batched_gap_stage(x, ys, alpha, beta, rs, |t, xb, ybs, d, rs| {
                t.batched_shifted_h0(xb, ybs, beta, beta, d, rs)
            })
        })
    }

    /// One unamplified gap-to-shifted stage over a batch: the block plan is
    /// shared, each planned block becomes one batched shifted call, and an
    /// instance is YES iff at most five of its calls answer NO.
    fn batched_gap_stage<'a>(
        &self,
        x: MeteredView<'a>,
        ys: &[MeteredView<'a>],
        alpha: usize,
        phi: usize,
        rs: &mut RandomStream,
        shifted: impl Fn(&Self, MeteredView<'a>, &[MeteredView<'a>], f64, &mut RandomStream) -> Result<Vec<Verdict>, TesterError>,
    ) -> Result<Vec<Verdict>, TesterError> {
        let plan = gap_to_shifted_plan(x.len(), alpha, phi, &self.constants, &mut rs.child(0));
        let leaf_delta = STAGE_DELTA / (2 * plan.len().max(1)) as f64;
        let mut no = vec![0usize; ys.len()];
        for (j, b) in plan.iter().enumerate() {
            let xb = x.window(b.start, b.len);
            let ybs: Vec<_> = ys.iter().map(|y| y.window(b.start, b.len)).collect();
            let answers = shifted(self, xb, &ybs, leaf_delta, &mut rs.child(j as u64 + 1))?;
            for (count, v) in no.iter_mut().zip(answers) {
                *count += usize::from(!v.is_yes());
            }
        }
        Ok(no
            .into_iter()
            .map(|c| Verdict::from_bool(c <= GAP_TO_SHIFTED_NO_LIMIT))
            .collect())
    }

    /// Shifted tester at depth 1 for a batch sharing `X`; requires
    /// `γ² ≤ α / (3024 ⌈log n⌉)`.
    ///
    /// The shifted threshold is raised to
    /// `γ̄ = min(β, ⌊√(α / (3024 ⌈log n⌉))⌋)` and the grid uses
    /// `ξ = max(γ̄, min(β, ⌊γ̄ √β / √q⌋))`; calls are grouped by `x` offset
    /// into batches for [`Testers::batched_gap_h1`].
    #[allow(clippy::too_many_arguments)]
    pub fn batched_shifted_h1(
        &self,
        x: MeteredView<'_>,
        ys: &[MeteredView<'_>],
        alpha: usize,
        beta: usize,
        gamma: usize,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Vec<Verdict>, TesterError> {
        same_lengths(x, ys)?;
        thresholds(alpha, beta, gamma)?;
        let (n, q) = (x.len(), ys.len());
        if !self.constants.batched_shifted_h1_admits(n, alpha, gamma) {
            return Err(gate_error("depth-1 batched shifted"));
        }
        if gamma == 0 {
            return self.batched_shifted_h0(x, ys, alpha, beta, delta, rs);
        }
        if q == 0 {
            return Ok(Vec::new());
        }
        if n <= beta {
            return Ok(ys.iter().map(|&y| shifted_short_fallback(x, y, alpha)).collect());
        }
        let gamma_bar = beta.min(self.constants.h1_gamma_cap(n, alpha));
        let spread = isqrt((gamma_bar * gamma_bar * beta / q) as u64) as usize;
        let xi = gamma_bar.max(beta.min(spread));
        let grid = ShiftGrid::new(n, beta, gamma_bar, xi);
        let call_delta = delta / (2 * grid.calls()) as f64;
        let per = grid.ys.len();
        let sub_ys = grid_sub_batch(&grid, ys);
        let mut yes = vec![false; q];
        for (k, &xo) in grid.xs.iter().enumerate() {
            let xb = x.window(xo, grid.n_prime);
            let answers = self.batched_gap_h1(xb, &sub_ys, alpha, 3 * gamma_bar, call_delta, &mut rs.child(k as u64 + 1))?;
            any_per_instance(&answers, per, &mut yes);
        }
        Ok(yes.into_iter().map(Verdict::from_bool).collect())
    }

    /// Gap tester at depth 2 for a batch sharing `X`; requires
    /// `β ≤ α^(2/3) / (336 ⌈log n⌉)`.
    pub fn batched_gap_h2(
        &self,
        x: MeteredView<'_>,
        ys: &[MeteredView<'_>],
        alpha: usize,
        beta: usize,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Vec<Verdict>, TesterError> {
        same_lengths(x, ys)?;
        thresholds(alpha, beta, 0)?;
        let n = x.len();
        if !self.constants.batched_gap_h2_admits(n, alpha, beta) {
            return Err(gate_error("depth-2 batched gap"));
        }
        if self.constants.batched_gap_h1_admits(n, alpha, beta) {
            return self.batched_gap_h1(x, ys, alpha, beta, delta, rs);
        }
        let phi = self.constants.h2_phi(n, alpha, beta);
        assert!(phi >= beta, "depth-2 block threshold {phi} below beta {beta}");
        let psi = gap_to_shifted_psi(n, alpha, beta, phi, &self.constants)?;
        majority_batch(self.reps(delta), ys.len(), rs, |rs| {
            self.batched_gap_stage(x, ys, alpha, phi, rs, |t, xb, ybs, d, rs| {
                t.batched_shifted_h1(xb, ybs, phi, beta, psi, d, rs)
            })
        })
    }

    /// Shifted tester at depth 2 for one instance; requires
    /// `γ ≤ α^(2/3) / (1008 ⌈log n⌉)`.
    pub fn shifted_h2(
        &self,
        inst: &ShiftedInstance<MeteredView<'_>>,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Verdict, TesterError> {
        let (n, alpha, beta, gamma) = (inst.n(), inst.alpha, inst.beta, inst.gamma);
        if !self.constants.shifted_h2_admits(n, alpha, gamma) {
            return Err(gate_error("depth-2 shifted"));
        }
        if self.constants.batched_shifted_h1_admits(n, alpha, gamma) {
            return Ok(self.batched_shifted_h1(inst.x, &[inst.y], alpha, beta, gamma, delta, rs)?[0]);
        }
        if n <= beta {
            return Ok(shifted_short_fallback(inst.x, inst.y, alpha));
        }
        let xi = beta.min(isqrt((gamma * gamma * beta) as u64) as usize);
        let grid = ShiftGrid::new(n, beta, gamma, xi);
        let call_delta = delta / (2 * grid.calls()) as f64;
        let sub_ys = grid_sub_batch(&grid, &[inst.y]);
        let mut yes = [false];
        for (k, &xo) in grid.xs.iter().enumerate() {
            let xb = inst.x.window(xo, grid.n_prime);
            let answers = self.batched_gap_h2(xb, &sub_ys, alpha, 3 * gamma, call_delta, &mut rs.child(k as u64 + 1))?;
            any_per_instance(&answers, sub_ys.len(), &mut yes);
        }
        Ok(Verdict::from_bool(yes[0]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{certify_non_adaptive, MeteredString};
    use crate::params::Constants;
    use crate::reductions::shifted_to_gap;
    use crate::testers::{equality_test, TesterConfig};

    fn testers() -> Testers {
        Testers::new(TesterConfig::default()).unwrap()
    }

    #[test]
    fn xi_formula() {
        assert_eq!(batched_h0_xi(1, 0), 0);
        // q = 1: 1 + ξ = ⌈√(1 + β)⌉.
        for beta in 0..200 {
            let s = ((1 + beta) as f64).sqrt().ceil() as usize;
            assert_eq!(batched_h0_xi(1, beta), (s - 1).min(beta), "beta {beta}");
        }
        assert_eq!(batched_h0_xi(64, 8), 1);
        assert_eq!(batched_h0_xi(1000, 5), 1);
    }

    #[test]
    fn identical_batch_is_all_yes() {
        let xs: Vec<u32> = (0..3000).collect();
        let x = MeteredString::new(xs.clone());
        let copies: Vec<MeteredString> = (0..10).map(|_| MeteredString::new(xs.clone())).collect();
        let views: Vec<_> = copies.iter().map(|c| c.view()).collect();
        let t = testers();
        let v = t.batched_shifted_h0(x.view(), &views, 50, 7, 0.1, &mut RandomStream::new(4)).unwrap();
        assert!(v.iter().all(|v| v.is_yes()));
    }

    #[test]
    fn far_batch_is_rejected() {
        let n = 3000;
        let x = MeteredString::new((0..n as u32).collect());
        let t = testers();
        let trials = 300;
        let mut correct = 0;
        for s in 0..trials {
            let mut rs = RandomStream::new(1000 + s);
            let far = MeteredString::new((0..n).map(|_| 10_000 + rs.uniform_index(1 << 20) as u32).collect());
            let v = t.batched_shifted_h0(x.view(), &[far.view()], 100, 5, 0.1, &mut RandomStream::new(s)).unwrap();
            correct += usize::from(v[0] == Verdict::No);
        }
        assert!(correct as f64 / trials as f64 >= 1.0 - 0.1 - 0.05);
    }

    #[test]
    fn single_instance_matches_unbatched_pipeline_on_rotations() {
        let n = 500;
        let xs: Vec<u32> = (0..n as u32).collect();
        let t = testers();
        let beta = 8;
        for s in 0..=beta {
            let mut ys = xs[n - s..].to_vec();
            ys.extend_from_slice(&xs[..n - s]);
            let (x, y) = (MeteredString::new(xs.clone()), MeteredString::new(ys));
            let batched = t.batched_shifted_h0(x.view(), &[y.view()], 40, beta, 0.1, &mut RandomStream::new(9)).unwrap()[0];
            let inst = ShiftedInstance::new(x.view(), y.view(), 40, beta, 0).unwrap();
            let plain = shifted_to_gap(&inst, |j, sub| {
                equality_test(sub.x, sub.y, sub.alpha, 0.1, &mut RandomStream::new(j as u64))
            })
            .unwrap()
            .verdict;
            assert_eq!(batched, Verdict::Yes);
            assert_eq!(plain, Verdict::Yes);
        }
    }

    #[test]
    fn h1_gamma_zero_delegates_exactly() {
        let xs: Vec<u32> = (0..600).collect();
        let run = |depth1: bool| {
            let x = MeteredString::logged(xs.clone());
            let y = MeteredString::logged(xs.iter().map(|v| v % 7).collect());
            let t = testers();
            let mut rs = RandomStream::new(21);
            let v = if depth1 {
                t.batched_shifted_h1(x.view(), &[y.view()], 30, 4, 0, 0.1, &mut rs).unwrap()
            } else {
                t.batched_shifted_h0(x.view(), &[y.view()], 30, 4, 0.1, &mut rs).unwrap()
            };
            (v, x.log(), y.log())
        };
        assert_eq!(run(true), run(false));
    }

    #[test]
    fn gates_are_enforced() {
        let x = MeteredString::new(vec![0; 1024]);
        let t = testers();
        assert!(t.batched_gap_h1(x.view(), &[x.view()], 1000, 1, 0.1, &mut RandomStream::new(0)).is_err());
        assert!(t.batched_shifted_h1(x.view(), &[x.view()], 1000, 2, 1, 0.1, &mut RandomStream::new(0)).is_err());
        assert!(t.batched_gap_h2(x.view(), &[x.view()], 1000, 1, 0.1, &mut RandomStream::new(0)).is_err());
    }

    #[test]
    fn depth_one_gap_with_paper_constants() {
        // β = 1 needs α ≥ 336 ⌈log n⌉ = 3360 at n = 1024.
        let n = 1024;
        let xs: Vec<u32> = (0..n as u32).collect();
        let x = MeteredString::new(xs.clone());
        let same = MeteredString::new(xs.clone());
        let t = testers();
        let v = t.batched_gap_h1(x.view(), &[same.view()], 3360, 1, 0.2, &mut RandomStream::new(2)).unwrap();
        assert_eq!(v, vec![Verdict::Yes]);
    }

    #[test]
    fn deep_paths_with_scaled_constants() {
        // With base 1 the gates use 3, 9 and 27 in place of 336, 1008, 3024.
        let t = Testers::with_constants(TesterConfig::default(), Constants::scaled(1)).unwrap();
        let n = 4096;
        let xs: Vec<u32> = (0..n as u32).collect();
        let x = MeteredString::new(xs.clone());
        let y = MeteredString::new(xs.clone());
        let far = MeteredString::new(xs.iter().map(|v| v + 5000).collect());
        // Depth-1 shifted with a raised threshold; ED(x, far) = n > 3α.
        let v = t
            .batched_shifted_h1(x.view(), &[y.view(), far.view()], 400, 6, 1, 0.2, &mut RandomStream::new(8))
            .unwrap();
        assert_eq!(v, vec![Verdict::Yes, Verdict::No]);
        // Depth 2 proper needs β > 3 ⌈log n⌉ and α ≈ (3 ⌈log n⌉ β)^1.5 > n.
        let (alpha, beta) = (55_000, 40);
        assert!(!t.constants.batched_gap_h1_admits(n, alpha, beta));
        assert!(t.constants.batched_gap_h2_admits(n, alpha, beta));
        let v = t
            .batched_gap_h2(x.view(), &[y.view()], alpha, beta, 0.3, &mut RandomStream::new(8))
            .unwrap();
        assert_eq!(v, vec![Verdict::Yes]);
    }

    #[test]
    fn batched_paths_are_non_adaptive() {
        let t = testers();
        let cert = certify_non_adaptive(
            |x: &MeteredString, y: &MeteredString, rs| {
                t.batched_shifted_h0(x.view(), &[y.view(), x.view()], 20, 6, 0.1, rs).unwrap();
            },
            512,
            11,
            5,
        );
        assert!(cert.passed(), "{cert:?}");
        let scaled = Testers::with_constants(TesterConfig::default(), Constants::scaled(1)).unwrap();
        let cert = certify_non_adaptive(
            |x: &MeteredString, y: &MeteredString, rs| {
                scaled.batched_gap_h2(x.view(), &[y.view()], 55_000, 40, 0.3, rs).unwrap();
            },
            4096,
            11,
            5,
        );
        assert!(cert.passed(), "{cert:?}");
    }
}
