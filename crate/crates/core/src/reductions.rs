//! Reductions from gap problems to oracle calls on substrings.
//!
//! Each randomized reduction is split into a *plan* (which blocks to query,
//! drawn from a [`RandomStream`] without looking at the input) and an
//! *execution* that hands every planned block pair to the oracle. All planned
//! calls are always made, so the positions an oracle reads never depend on
//! earlier answers.

use std::collections::BTreeSet;
use std::ops::Range;

use crate::access::RandomStream;
use crate::error::ParamError;
use crate::params::{ceil_div, ceil_log2, floor_log2, isqrt, Constants};
use crate::strings::{ed_exact, gap_ed_lv, GapInstance, ShiftedInstance, Verdict, Window};

/// The level-`p` partition of `[0, n)` into blocks of length `2^p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockGrid {
    pub n: usize,
    pub p: u32,
}

impl BlockGrid {
    pub fn new(n: usize, p: u32) -> Self {
        assert!(p < usize::BITS, "level {p} too large");
        BlockGrid { n, p }
    }

    pub fn block_len(&self) -> usize {
        1 << self.p
    }

    /// `m_p = ⌈n / 2^p⌉`.
    pub fn count(&self) -> usize {
        self.n.div_ceil(self.block_len())
    }

    /// Block `i` is `[i 2^p, min(n, (i + 1) 2^p))`.
    pub fn block(&self, i: usize) -> Range<usize> {
        assert!(i < self.count(), "block {i} of {}", self.count());
        let start = i << self.p;
        start..self.n.min(start + self.block_len())
    }
}

/// One planned block: the same range is taken from both strings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    /// Grid level, or `None` for the single-scale partition.
    pub level: Option<u32>,
    pub index: usize,
    pub start: usize,
    pub len: usize,
}

/// What a call asks the oracle to decide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CallKind {
    Gap { alpha: usize, beta: usize },
    Shifted { alpha: usize, beta: usize, gamma: usize },
}

/// One oracle call on `(X[x_start..x_start+len), Y[y_start..y_start+len))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCall {
    pub x_start: usize,
    pub y_start: usize,
    pub len: usize,
    pub kind: CallKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub verdict: Verdict,
    pub calls: Vec<(OracleCall, Verdict)>,
    /// Number of NO answers among `calls`.
    pub no_count: usize,
}

impl ReductionOutcome {
    fn new(calls: Vec<(OracleCall, Verdict)>, decide: impl FnOnce(usize) -> bool) -> Self {
        let no_count = calls.iter().filter(|(_, v)| !v.is_yes()).count();
        ReductionOutcome {
            verdict: Verdict::from_bool(decide(no_count)),
            calls,
            no_count,
        }
    }
}

/// Block length, block count and iteration count of the single-scale
/// reduction: `b = ⌈3φn/α⌉`, `m = ⌈n/b⌉`, `⌈m b² / (φ n)⌉`.
pub fn ao_params(n: usize, alpha: usize, phi: usize) -> (usize, usize, usize) {
    if n == 0 {
        return (0, 0, 0);
    }
    let b = ceil_div(3 * phi as u128 * n as u128, alpha as u128) as usize;
    let m = n.div_ceil(b);
    let iters = ceil_div(m as u128 * (b as u128).pow(2), phi as u128 * n as u128) as usize;
    (b, m, iters)
}

pub fn ao_plan(n: usize, alpha: usize, phi: usize, rs: &mut RandomStream) -> Vec<Block> {
    let (b, m, iters) = ao_params(n, alpha, phi);
    (0..iters)
        .map(|_| {
            let i = rs.uniform_index(m);
            let start = i * b;
            Block {
                level: None,
                index: i,
                start,
                len: n.min(start + b) - start,
            }
        })
        .collect()
}

/// Levels `[⌈log lo⌉ .. ⌊log(rate · n)⌋]` for `rate = rate_num / alpha`,
/// capped at `⌈log n⌉` (coarser levels have a single block, already covered).
fn level_range(n: usize, alpha: usize, lo: usize, rate_num: u128) -> Option<(u32, u32)> {
    let scaled = rate_num * n as u128 / alpha as u128;
    let top = floor_log2(scaled.min(u64::MAX as u128) as u64)?;
    let hi = top.min(ceil_log2(n as u64));
    let lo = ceil_log2(lo as u64);
    (lo <= hi).then_some((lo, hi))
}

/// Level-major, iteration-minor sampling: `⌈rate · m_p⌉` uniform blocks per
/// level.
fn level_plan(
    n: usize,
    levels: Option<(u32, u32)>,
    rate_num: u128,
    alpha: usize,
    rs: &mut RandomStream,
) -> Vec<Block> {
    let Some((lo, hi)) = levels else {
        return Vec::new();
    };
    let mut plan = Vec::new();
    for p in lo..=hi {
        let grid = BlockGrid::new(n, p);
        let m = grid.count();
        let iters = ceil_div(rate_num * m as u128, alpha as u128) as usize;
        for _ in 0..iters {
            let i = rs.uniform_index(m);
            let r = grid.block(i);
            plan.push(Block {
                level: Some(p),
                index: i,
                start: r.start,
                len: r.len(),
            });
        }
    }
    plan
}

/// Levels visited by the multi-level reduction (`ρ = 10φ/α`).
pub fn multilevel_levels(n: usize, alpha: usize, phi: usize) -> Option<(u32, u32)> {
    level_range(n, alpha, phi, 10 * phi as u128)
}

pub fn multilevel_plan(n: usize, alpha: usize, phi: usize, rs: &mut RandomStream) -> Vec<Block> {
    level_plan(n, multilevel_levels(n, alpha, phi), 10 * phi as u128, alpha, rs)
}

/// Levels visited by the gap-to-shifted reduction (`ρ = 84φ/α`, `τ = 3φ`).
pub fn gap_to_shifted_levels(n: usize, alpha: usize, phi: usize, c: &Constants) -> Option<(u32, u32)> {
    level_range(n, alpha, 3 * phi, u128::from(c.rho) * phi as u128)
}

pub fn gap_to_shifted_plan(
    n: usize,
    alpha: usize,
    phi: usize,
    c: &Constants,
    rs: &mut RandomStream,
) -> Vec<Block> {
    let levels = gap_to_shifted_levels(n, alpha, phi, c);
    level_plan(n, levels, u128::from(c.rho) * phi as u128, alpha, rs)
}

/// Number of calls a [`gap_to_shifted`] plan makes; known before sampling.
pub fn gap_to_shifted_call_count(n: usize, alpha: usize, phi: usize, c: &Constants) -> usize {
    let rate = u128::from(c.rho) * phi as u128;
    let Some((lo, hi)) = gap_to_shifted_levels(n, alpha, phi, c) else {
        return 0;
    };
    (lo..=hi)
        .map(|p| ceil_div(rate * BlockGrid::new(n, p).count() as u128, alpha as u128) as usize)
        .sum()
}

/// Hand every planned block pair to a gap oracle, in plan order.
fn run_gap_calls<V: Window>(
    x: V,
    y: V,
    plan: &[Block],
    alpha: usize,
    beta: usize,
    mut oracle: impl FnMut(usize, GapInstance<V>) -> Verdict,
) -> Vec<(OracleCall, Verdict)> {
    plan.iter()
        .enumerate()
        .map(|(j, b)| {
            let sub = GapInstance {
                x: x.window(b.start, b.len),
                y: y.window(b.start, b.len),
                alpha,
                beta,
            };
            let call = OracleCall {
                x_start: b.start,
                y_start: b.start,
                len: b.len,
                kind: CallKind::Gap { alpha, beta },
            };
            (call, oracle(j, sub))
        })
        .collect()
}

fn check_gap_reduction(inst_beta: usize, alpha: usize, phi: usize, factor: usize) -> Result<(), ParamError> {
    if !(alpha >= factor * phi && phi >= inst_beta && inst_beta >= 1) {
        return Err(ParamError::violated(format!(
            "need alpha/{factor} >= phi >= beta >= 1, got alpha={alpha} phi={phi} beta={inst_beta}"
        )));
    }
    Ok(())
}

/// Single-scale sampling reduction to `GapED(φ, β)` on blocks of length
/// `⌈3φn/α⌉`. YES iff every sampled call answers YES.
///
/// `oracle` receives the call index and the block instance.
pub fn ao_reduce<V: Window>(
    inst: &GapInstance<V>,
    phi: usize,
    rs: &mut RandomStream,
    oracle: impl FnMut(usize, GapInstance<V>) -> Verdict,
) -> Result<ReductionOutcome, ParamError> {
    check_gap_reduction(inst.beta, inst.alpha, phi, 3)?;
    let plan = ao_plan(inst.n(), inst.alpha, phi, rs);
    let calls = run_gap_calls(inst.x, inst.y, &plan, phi, inst.beta, oracle);
    Ok(ReductionOutcome::new(calls, |no| no == 0))
}

/// Multi-level sampling reduction to `GapED(φ, β)`: at every level
/// `p ∈ [⌈log φ⌉ .. ⌊log(ρn)⌋]` sample `⌈ρ m_p⌉` blocks, `ρ = 10φ/α`.
/// YES iff every call answers YES; an empty level range gives YES.
pub fn multilevel_reduce<V: Window>(
    inst: &GapInstance<V>,
    phi: usize,
    rs: &mut RandomStream,
    oracle: impl FnMut(usize, GapInstance<V>) -> Verdict,
) -> Result<ReductionOutcome, ParamError> {
    check_gap_reduction(inst.beta, inst.alpha, phi, 10)?;
    let plan = multilevel_plan(inst.n(), inst.alpha, phi, rs);
    let calls = run_gap_calls(inst.x, inst.y, &plan, phi, inst.beta, oracle);
    Ok(ReductionOutcome::new(calls, |no| no == 0))
}

/// Largest NO count at which [`gap_to_shifted`] still answers YES.
pub const GAP_TO_SHIFTED_NO_LIMIT: usize = 5;

/// Validate `φ ≥ β ≥ ψ` and return `ψ`.
pub fn gap_to_shifted_psi(n: usize, alpha: usize, beta: usize, phi: usize, c: &Constants) -> Result<usize, ParamError> {
    let psi = c.psi_of(n, alpha, beta, phi);
    if !(phi >= beta && beta >= psi) {
        return Err(ParamError::violated(format!(
            "need phi >= beta >= psi, got phi={phi} beta={beta} psi={psi} (n={n}, alpha={alpha})"
        )));
    }
    Ok(psi)
}

/// Multi-level reduction from `GapED(α, β)` to `SGED(φ, β, ψ)` on sampled
/// block pairs (`ρ = 84φ/α`, levels from `⌈log 3φ⌉`). YES iff at most
/// [`GAP_TO_SHIFTED_NO_LIMIT`] calls answer NO.
pub fn gap_to_shifted<V: Window>(
    inst: &GapInstance<V>,
    phi: usize,
    c: &Constants,
    rs: &mut RandomStream,
    mut oracle: impl FnMut(usize, ShiftedInstance<V>) -> Verdict,
) -> Result<ReductionOutcome, ParamError> {
    let n = inst.n();
    let psi = gap_to_shifted_psi(n, inst.alpha, inst.beta, phi, c)?;
    let plan = gap_to_shifted_plan(n, inst.alpha, phi, c, rs);
    let kind = CallKind::Shifted {
        alpha: phi,
        beta: inst.beta,
        gamma: psi,
    };
    let calls = plan
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let sub = ShiftedInstance {
                x: inst.x.window(b.start, b.len),
                y: inst.y.window(b.start, b.len),
                alpha: phi,
                beta: inst.beta,
                gamma: psi,
            };
            let call = OracleCall {
                x_start: b.start,
                y_start: b.start,
                len: b.len,
                kind,
            };
            (call, oracle(j, sub))
        })
        .collect();
    Ok(ReductionOutcome::new(calls, |no| no <= GAP_TO_SHIFTED_NO_LIMIT))
}

/// The offset grid of the shifted-to-gap reduction.
///
/// Calls compare `X[x..x+n')` with `Y[y..y+n')` for every `x` in `xs` and
/// `y` in `ys`, where `n' = n − β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftGrid {
    pub n_prime: usize,
    pub beta: usize,
    pub gamma: usize,
    pub xi: usize,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
}

impl ShiftGrid {
    /// `ξ` with `1 + ξ = ⌊√((1+β)(1+γ))⌋`, clamped to `[γ, β]`.
    pub fn balanced_xi(beta: usize, gamma: usize) -> usize {
        let s = isqrt(((1 + beta) as u64).saturating_mul((1 + gamma) as u64)) as usize;
        s.saturating_sub(1).clamp(gamma, beta)
    }

    /// Build the grid for `n > β` and `γ ≤ ξ ≤ β`.
    ///
    /// # Panics
    /// If the call or distinct-substring counts exceed their proven bounds.
    pub fn new(n: usize, beta: usize, gamma: usize, xi: usize) -> Self {
        assert!(n > beta, "grid needs n > beta (n={n}, beta={beta})");
        assert!(gamma <= xi && xi <= beta, "need gamma <= xi <= beta");
        let (mx, my) = (1 + xi, 1 + gamma);
        let xs: Vec<usize> = (0..=beta)
            .filter(|x| x % mx == 0 || x % mx == beta % mx)
            .collect();
        let ys: BTreeSet<usize> = (0..=xi)
            .filter(|y| y % my == 0)
            .chain((beta - xi..=beta).filter(|y| y % my == beta % my))
            .collect();
        let grid = ShiftGrid {
            n_prime: n - beta,
            beta,
            gamma,
            xi,
            xs,
            ys: ys.into_iter().collect(),
        };
        assert!(
            grid.calls() * (1 + gamma) <= 16 * (1 + beta),
            "grid makes {} calls for beta={beta} gamma={gamma}",
            grid.calls()
        );
        assert!(
            grid.distinct() <= 2 * (1 + beta).div_ceil(mx) + 2 * mx.div_ceil(my),
            "grid touches {} distinct substrings",
            grid.distinct()
        );
        grid
    }

    pub fn calls(&self) -> usize {
        self.xs.len() * self.ys.len()
    }

    /// Number of distinct substrings the calls involve.
    pub fn distinct(&self) -> usize {
        self.xs.len() + self.ys.len()
    }

    /// All `(x, y)` pairs, `x`-major.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.xs
            .iter()
            .flat_map(move |&x| self.ys.iter().map(move |&y| (x, y)))
    }
}

/// Answer a shifted instance with `n ≤ β` directly: read both strings and
/// run Landau–Vishkin at threshold `3α`.
pub fn shifted_short_fallback<V: Window>(x: V, y: V, alpha: usize) -> Verdict {
    let (xs, ys) = (x.fetch(), y.fetch());
    Verdict::from_bool(gap_ed_lv(&xs, &ys, alpha.saturating_mul(3)).is_some())
}

/// Deterministic reduction from `SGED(α, β, γ)` to `GapED(α, 3γ)` on the
/// offset grid. YES iff any call answers YES.
pub fn shifted_to_gap<V: Window>(
    inst: &ShiftedInstance<V>,
    mut oracle: impl FnMut(usize, GapInstance<V>) -> Verdict,
) -> Result<ReductionOutcome, ParamError> {
    if inst.alpha < 3 * inst.gamma {
        return Err(ParamError::violated(format!(
            "need alpha >= 3 gamma, got alpha={} gamma={}",
            inst.alpha, inst.gamma
        )));
    }
    let n = inst.n();
    if n <= inst.beta {
        let verdict = shifted_short_fallback(inst.x, inst.y, inst.alpha);
        return Ok(ReductionOutcome {
            verdict,
            calls: Vec::new(),
            no_count: 0,
        });
    }
    let grid = ShiftGrid::new(n, inst.beta, inst.gamma, ShiftGrid::balanced_xi(inst.beta, inst.gamma));
    let (alpha, beta) = (inst.alpha, 3 * inst.gamma);
    let calls: Vec<_> = grid
        .pairs()
        .enumerate()
        .map(|(j, (xo, yo))| {
            let sub = GapInstance {
                x: inst.x.window(xo, grid.n_prime),
                y: inst.y.window(yo, grid.n_prime),
                alpha,
                beta,
            };
            let call = OracleCall {
                x_start: xo,
                y_start: yo,
                len: grid.n_prime,
                kind: CallKind::Gap { alpha, beta },
            };
            (call, oracle(j, sub))
        })
        .collect();
    let total = calls.len();
    Ok(ReductionOutcome::new(calls, |no| no < total))
}

/// Result of checking the multi-scale counting lemma on one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeyLemma {
    /// `ED(x, y) ≤ τ`; the lemma says nothing.
    NotApplicable { ed: usize },
    Checked {
        /// Whether `Σ_{p ≥ ⌈log τ⌉} |B_p| ≥ ED / (2τ)`.
        holds: bool,
        ed: usize,
        /// `|B_p|` for `p = 0 ..= ⌈log n⌉`.
        bad_per_level: Vec<usize>,
        /// The sum over `p ≥ ⌈log τ⌉`.
        counted: usize,
    },
}

impl KeyLemma {
    pub fn holds(&self) -> Option<bool> {
        match self {
            KeyLemma::NotApplicable { .. } => None,
            KeyLemma::Checked { holds, .. } => Some(*holds),
        }
    }
}

/// Brute-force check of the counting lemma: if `ED(x, y) > τ`, the blocks
/// with `ED > τ` at levels `⌈log τ⌉ ..= ⌈log n⌉` number at least `ED/(2τ)`.
///
/// The bound is not strict: `ab` against `ba` with `τ = 1` has one such
/// block and `ED/(2τ) = 1`.
pub fn key_lemma_check<T: PartialEq>(x: &[T], y: &[T], tau: usize) -> Result<KeyLemma, ParamError> {
    if x.len() != y.len() {
        return Err(ParamError::LengthMismatch { x: x.len(), y: y.len() });
    }
    if tau == 0 {
        return Err(ParamError::violated("tau must be at least 1"));
    }
    let ed = ed_exact(x, y);
    if ed <= tau {
        return Ok(KeyLemma::NotApplicable { ed });
    }
    let n = x.len();
    let top = ceil_log2(n as u64);
    let bad_per_level: Vec<usize> = (0..=top)
        .map(|p| {
            let grid = BlockGrid::new(n, p);
            (0..grid.count())
                .filter(|&i| {
                    let r = grid.block(i);
                    ed_exact(&x[r.clone()], &y[r]) > tau
                })
                .count()
        })
        .collect();
    let from = ceil_log2(tau as u64) as usize;
    let counted: usize = bad_per_level.iter().skip(from).sum();
    Ok(KeyLemma::Checked {
        holds: 2 * tau * counted >= ed,
        ed,
        bad_per_level,
        counted,
    })
}
