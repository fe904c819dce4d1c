//! Integer logarithms, gate formulas and the constants they use.
//!
//! All logarithms are base 2 and computed on integers, so every derived
//! parameter is bit-stable across platforms.

use serde::{Deserialize, Serialize};

/// `⌈log2 n⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// `⌊log2 n⌋` for `n >= 1`; `None` for zero.
pub fn floor_log2(n: u64) -> Option<u32> {
    (n > 0).then(|| 63 - n.leading_zeros())
}

/// `⌊√n⌋`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `⌈a / b⌉` on 128-bit integers.
pub fn ceil_div(a: u128, b: u128) -> u128 {
    assert!(b > 0, "division by zero");
    a.div_ceil(b)
}

/// The `⌈log n⌉` factor used by the gate formulas, floored at 1 so that the
/// formulas stay finite on single-symbol strings.
pub fn log_factor(n: usize) -> u64 {
    u64::from(ceil_log2(n as u64).max(1))
}

/// Multiplicative constants of the reductions and gates.
///
/// The defaults are the values the correctness proofs need. The gate
/// constants relate to `psi` as `gate = 3 psi`, `shifted_h2 = 9 psi` and
/// `shifted_h1 = 27 psi`, which is what makes each recursive call land inside
/// the next routine's gate. [`Constants::scaled`] keeps those ratios while
/// shrinking the base so that small inputs reach deep code paths; it keeps
/// the sampling rate `rho`, so NO instances are still rejected, but the
/// YES-side error bound of the gap-to-shifted stage no longer applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    /// Numerator of `psi = ⌊c β φ ⌈log n⌉ / α⌋` (112).
    pub psi: u64,
    /// Numerator of the sampling rate `ρ = c φ / α` in the gap-to-shifted
    /// reduction (84).
    pub rho: u64,
    /// The `336` in every gap-side gate.
    pub gate: u64,
    /// The `1008` in the depth-2 shifted gate.
    pub shifted_h2: u64,
    /// The `3024` in the depth-1 shifted gate.
    pub shifted_h1: u64,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            psi: 112,
            rho: 84,
            gate: 336,
            shifted_h2: 1008,
            shifted_h1: 3024,
        }
    }
}

impl Constants {
    /// Constants with `psi = base`, the gates in the default ratios and the
    /// default sampling rate.
    pub fn scaled(base: u64) -> Self {
        assert!(base >= 1);
        Constants {
            psi: base,
            rho: 84,
            gate: 3 * base,
            shifted_h2: 9 * base,
            shifted_h1: 27 * base,
        }
    }

    /// `ψ = ⌊psi · β · φ · ⌈log n⌉ / α⌋`.
    pub fn psi_of(&self, n: usize, alpha: usize, beta: usize, phi: usize) -> usize {
        if alpha == 0 {
            return usize::MAX;
        }
        let num = u128::from(self.psi) * beta as u128 * phi as u128 * u128::from(log_factor(n));
        (num / alpha as u128).min(usize::MAX as u128) as usize
    }

    /// The largest gap-side `β` bound at depth `h`:
    /// `(gate · ⌈log n⌉)^(-h/2) · α^(h/(h+1))`. The gate is `β < bound`.
    pub fn gap_bound(&self, n: usize, alpha: usize, h: u32) -> f64 {
        let l = (self.gate * log_factor(n)) as f64;
        let h = f64::from(h);
        l.powf(-h / 2.0) * (alpha as f64).powf(h / (h + 1.0))
    }

    pub fn gap_admits(&self, n: usize, alpha: usize, beta: usize, h: u32) -> bool {
        (beta as f64) < self.gap_bound(n, alpha, h)
    }

    /// Shifted-side gate at depth `h`: `γ < bound / 3`.
    pub fn shifted_admits(&self, n: usize, alpha: usize, gamma: usize, h: u32) -> bool {
        (gamma as f64) < self.gap_bound(n, alpha, h) / 3.0
    }

    /// Depth-1 batched gap gate `β² ≤ α / (gate ⌈log n⌉)`.
    pub fn batched_gap_h1_admits(&self, n: usize, alpha: usize, beta: usize) -> bool {
        let b = beta as u128;
        b * b * u128::from(self.gate) * u128::from(log_factor(n)) <= alpha as u128
    }

    /// Depth-1 batched shifted gate `γ² ≤ α / (shifted_h1 ⌈log n⌉)`.
    pub fn batched_shifted_h1_admits(&self, n: usize, alpha: usize, gamma: usize) -> bool {
        let g = gamma as u128;
        g * g * u128::from(self.shifted_h1) * u128::from(log_factor(n)) <= alpha as u128
    }

    /// Depth-2 batched gap gate `β ≤ α^(2/3) / (gate ⌈log n⌉)`.
    pub fn batched_gap_h2_admits(&self, n: usize, alpha: usize, beta: usize) -> bool {
        cube_le_square(beta as u128 * u128::from(self.gate) * u128::from(log_factor(n)), alpha)
    }

    /// Depth-2 shifted gate `γ ≤ α^(2/3) / (shifted_h2 ⌈log n⌉)`.
    pub fn shifted_h2_admits(&self, n: usize, alpha: usize, gamma: usize) -> bool {
        cube_le_square(
            gamma as u128 * u128::from(self.shifted_h2) * u128::from(log_factor(n)),
            alpha,
        )
    }

    /// `⌊α² / (β² (gate ⌈log n⌉)³)⌋`, the block threshold of the depth-2
    /// gap routine.
    pub fn h2_phi(&self, n: usize, alpha: usize, beta: usize) -> usize {
        let l = u128::from(self.gate) * u128::from(log_factor(n));
        let den = (beta as u128).pow(2).saturating_mul(l.saturating_pow(3));
        ((alpha as u128).pow(2) / den).min(usize::MAX as u128) as usize
    }

    /// `⌊√(α / (shifted_h1 ⌈log n⌉))⌋`, the raised shifted threshold cap of
    /// the depth-1 shifted routine.
    pub fn h1_gamma_cap(&self, n: usize, alpha: usize) -> usize {
        isqrt(alpha as u64 / (self.shifted_h1 * log_factor(n))) as usize
    }
}

/// `a³ ≤ b²`, saturating.
fn cube_le_square(a: u128, b: usize) -> bool {
    let b = b as u128;
    a.saturating_pow(3) <= b.saturating_mul(b)
}
