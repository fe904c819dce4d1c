//! Instance families with certified distance bounds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::access::RandomStream;
use crate::error::HarnessError;
use crate::strings::{ed_at_most, Symbol, Truth};

/// Pairs up to this length get their distance confirmed by dynamic
/// programming; longer ones rely on the construction alone.
pub const EXACT_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Random `X`; `Y` is `X` with mixed edits (YES side) or with
    /// substitutions by symbols absent from `X` (NO side).
    RandomEdits,
    /// `X` has distinct symbols and `Y` moves its last `k` symbols to the
    /// front, so `ED = 2k`.
    Rotation,
    /// A core pair of length `6 · core_scale` embedded at a random aligned
    /// offset in constant padding.
    PaddedHard,
    /// `X` and `Y` over disjoint alphabets, so `ED = n`.
    Unrelated,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::RandomEdits, Family::Rotation, Family::PaddedHard, Family::Unrelated];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::RandomEdits => "random-edits",
            Family::Rotation => "rotation",
            Family::PaddedHard => "padded-hard",
            Family::Unrelated => "unrelated",
        }
    }

    /// Whether the family has instances close enough to be YES.
    pub fn has_yes_side(self) -> bool {
        self != Family::Unrelated
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown family {s:?}")))
    }
}

/// Which side of the gap an instance is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// Distance at most `k`.
    Near,
    /// Distance at least `k` (exactly `k` for the planted families).
    Far,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub side: Side,
    pub n: usize,
    /// Edit budget (near side), planted distance (far side) or rotation
    /// shift.
    pub k: usize,
    pub alphabet_size: u32,
    /// Padded-hard core length is `6 · core_scale` (capped at `n`); ignored
    /// by the other families.
    pub core_scale: usize,
    pub seed: u64,
}

/// `lower ≤ ED(X, Y) ≤ upper`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub lower: usize,
    pub upper: usize,
    /// Confirmed by dynamic programming rather than by construction.
    pub verified: bool,
}

impl DistanceBounds {
    fn exact(d: usize) -> Self {
        DistanceBounds {
            lower: d,
            upper: d,
            verified: false,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// Truth for `GapED(α, β)`. Bounds that straddle a threshold are scored
    /// as `Gap`, which removes the trial from error statistics.
    pub fn truth(&self, alpha: usize, beta: usize) -> Truth {
        if self.upper <= beta {
            Truth::Yes
        } else if self.lower > alpha {
            Truth::No
        } else {
            Truth::Gap
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub x: Vec<Symbol>,
    pub y: Vec<Symbol>,
    pub bounds: DistanceBounds,
}

fn unsatisfiable(msg: String) -> HarnessError {
    HarnessError::Unsatisfiable(msg)
}

fn random_string(n: usize, lo: Symbol, size: u32, rs: &mut RandomStream) -> Vec<Symbol> {
    (0..n).map(|_| lo + rs.uniform_index(size as usize) as Symbol).collect()
}

/// Apply random edits of total cost at most `budget` to `s[from..to)`,
/// keeping its length: substitutions (cost 1) and a deletion paired with an
/// insertion (cost 2). New symbols come from `[lo, lo + size)`. Returns the
/// cost spent.
fn mixed_edits(s: &mut Vec<Symbol>, from: usize, to: usize, budget: usize, lo: Symbol, size: u32, rs: &mut RandomStream) -> usize {
    let len = to - from;
    if len == 0 || size < 2 {
        return 0;
    }
    let mut cost = 0;
    while cost < budget {
        if budget - cost >= 2 && len >= 2 && rs.unit() < 0.5 {
            s.remove(from + rs.uniform_index(len));
            let at = from + rs.uniform_index(len);
            s.insert(at, lo + rs.uniform_index(size as usize) as Symbol);
            cost += 2;
        } else {
            let at = from + rs.uniform_index(len);
            let step = 1 + rs.uniform_index(size as usize - 1) as Symbol;
            s[at] = lo + (s[at] - lo + step) % size;
            cost += 1;
        }
    }
    cost
}

/// Substitute `k` distinct positions of `s[from..to)` with fresh symbols
/// `fresh, fresh + 1, …`. If no fresh symbol occurs in the other string,
/// every alignment pays for each one, so the distance is exactly `k`.
fn plant(s: &mut [Symbol], from: usize, to: usize, k: usize, fresh: Symbol, rs: &mut RandomStream) {
    for (j, p) in rs.sample_distinct(to - from, k).into_iter().enumerate() {
        s[from + p] = fresh + j as Symbol;
    }
}

/// Build the pair described by `spec` together with its distance bounds.
pub fn generate(spec: &InstanceSpec) -> Result<Generated, HarnessError> {
    let InstanceSpec {
        family,
        side,
        n,
        k,
        alphabet_size: a,
        core_scale,
        seed,
    } = *spec;
    let mut rs = RandomStream::new(seed);
    if a < 2 {
        return Err(unsatisfiable(format!("alphabet size {a} < 2")));
    }
    let (x, y, bounds) = match family {
        Family::RandomEdits => {
            let x = random_string(n, 0, a, &mut rs);
            let mut y = x.clone();
            match side {
                Side::Near => {
                    let cost = mixed_edits(&mut y, 0, n, k, 0, a, &mut rs);
                    (x, y, DistanceBounds { lower: 0, upper: cost, verified: false })
                }
                Side::Far => {
                    if k > n {
                        return Err(unsatisfiable(format!("cannot plant {k} edits in length {n}")));
                    }
                    plant(&mut y, 0, n, k, a, &mut rs);
                    (x, y, DistanceBounds::exact(k))
                }
            }
        }
        Family::Rotation => {
            if (a as usize) < n {
                return Err(unsatisfiable(format!("rotation needs alphabet size >= n = {n}, got {a}")));
            }
            if 2 * k > n {
                return Err(unsatisfiable(format!("rotation shift {k} exceeds n/2 for n = {n}")));
            }
            let x: Vec<Symbol> = rs.sample_distinct(a as usize, n).into_iter().map(|s| s as Symbol).collect();
            let mut y = x[n - k..].to_vec();
            y.extend_from_slice(&x[..n - k]);
            (x, y, DistanceBounds::exact(2 * k))
        }
        Family::PaddedHard => {
            let core = (6 * core_scale.max(1)).min(n);
            if core == 0 {
                return Err(unsatisfiable("padded-hard needs n >= 1".into()));
            }
            let slot = rs.uniform_index(n / core);
            let (from, to) = (slot * core, slot * core + core);
            // Padding is symbol 0; the core uses [1, a].
            let mut x = vec![0; n];
            x[from..to].copy_from_slice(&random_string(core, 1, a, &mut rs));
            let mut y = x.clone();
            match side {
                Side::Near => {
                    let cost = mixed_edits(&mut y, from, to, k, 1, a, &mut rs);
                    (x, y, DistanceBounds { lower: 0, upper: cost, verified: false })
                }
                Side::Far => {
                    if k > core {
                        return Err(unsatisfiable(format!("cannot plant {k} edits in a core of length {core}")));
                    }
                    plant(&mut y, from, to, k, a + 1, &mut rs);
                    (x, y, DistanceBounds::exact(k))
                }
            }
        }
        Family::Unrelated => {
            let x = random_string(n, 0, a, &mut rs);
            let y = random_string(n, a, a, &mut rs);
            (x, y, DistanceBounds::exact(n))
        }
    };
    Ok(Generated {
        bounds: verify(&x, &y, bounds),
        x,
        y,
    })
}

/// Replace construction bounds by the exact distance for short strings.
fn verify(x: &[Symbol], y: &[Symbol], bounds: DistanceBounds) -> DistanceBounds {
    if x.len() > EXACT_LIMIT {
        return bounds;
    }
    let d = ed_at_most(x, y, bounds.upper).expect("construction upper bound is sound");
    debug_assert!(d >= bounds.lower, "construction lower bound is sound");
    DistanceBounds {
        lower: d,
        upper: d,
        verified: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strings::ed_exact;
    use proptest::prelude::*;

    fn spec(family: Family, side: Side, n: usize, k: usize, a: u32) -> InstanceSpec {
        InstanceSpec {
            family,
            side,
            n,
            k,
            alphabet_size: a,
            core_scale: 4,
            seed: 7,
        }
    }

    #[test]
    fn rotation_distance_is_twice_the_shift() {
        let g = generate(&spec(Family::Rotation, Side::Near, 10, 2, 10)).unwrap();
        assert_eq!(ed_exact(&g.x, &g.y), 4);
        assert_eq!((g.bounds.lower, g.bounds.upper), (4, 4));
        assert_eq!(&g.y[..2], &g.x[8..]);
    }

    #[test]
    fn zero_budget_gives_equal_strings() {
        let g = generate(&spec(Family::RandomEdits, Side::Near, 300, 0, 4)).unwrap();
        assert_eq!(g.x, g.y);
        assert_eq!(g.bounds.upper, 0);
    }

    #[test]
    fn unrelated_strings_are_fully_apart() {
        for n in [1, 17, 512] {
            let g = generate(&spec(Family::Unrelated, Side::Far, n, 0, 3)).unwrap();
            assert_eq!(ed_exact(&g.x, &g.y), n);
        }
    }

    #[test]
    fn padded_hard_keeps_padding() {
        let g = generate(&spec(Family::PaddedHard, Side::Far, 200, 5, 4)).unwrap();
        assert_eq!(ed_exact(&g.x, &g.y), 5);
        assert!(g.x.iter().filter(|&&s| s == 0).count() >= 200 - 24);
    }

    #[test]
    fn unsatisfiable_specs() {
        assert!(generate(&spec(Family::Rotation, Side::Near, 10, 2, 4)).is_err());
        assert!(generate(&spec(Family::Rotation, Side::Near, 10, 6, 10)).is_err());
        assert!(generate(&spec(Family::RandomEdits, Side::Far, 10, 11, 4)).is_err());
        assert!(generate(&spec(Family::RandomEdits, Side::Near, 10, 1, 1)).is_err());
    }

    #[test]
    fn long_pairs_keep_construction_bounds() {
        let g = generate(&spec(Family::RandomEdits, Side::Far, EXACT_LIMIT + 1, 30, 4)).unwrap();
        assert_eq!((g.bounds.lower, g.bounds.upper, g.bounds.verified), (30, 30, false));
    }

    #[test]
    fn truth_from_bounds() {
        let b = DistanceBounds { lower: 3, upper: 9, verified: false };
        assert_eq!(b.truth(20, 9), Truth::Yes);
        assert_eq!(b.truth(2, 1), Truth::No);
        assert_eq!(b.truth(20, 5), Truth::Gap);
    }

    proptest! {
        #[test]
        fn certificates_match_exact_distance(
            family in prop::sample::select(Family::ALL.to_vec()),
            far in any::<bool>(),
            n in 12usize..80,
            k in 0usize..12,
            a in 2u32..6,
            seed in any::<u64>(),
        ) {
            let side = if far { Side::Far } else { Side::Near };
            let a = if family == Family::Rotation { n as u32 } else { a };
            let k = if family == Family::Rotation { k.min(n / 2) } else { k };
            let s = InstanceSpec { family, side, n, k, alphabet_size: a, core_scale: 2, seed };
            let g = generate(&s).unwrap();
            let d = ed_exact(&g.x, &g.y);
            prop_assert!(g.bounds.verified);
            prop_assert_eq!(g.bounds.lower, d);
            prop_assert_eq!(g.bounds.upper, d);
            if family != Family::Unrelated {
                match side {
                    Side::Near if family != Family::Rotation => prop_assert!(d <= k),
                    _ => prop_assert!(d == k || family == Family::Rotation && d == 2 * k),
                }
            }
        }
    }
}
