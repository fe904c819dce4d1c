//! The plain recursion: gap-to-shifted at depth `h` calls shifted testers
//! at depth `h - 1`, which go back through the offset grid to gap testers.

use crate::access::{MeteredView, RandomStream};
use crate::error::TesterError;
use crate::reductions::{gap_to_shifted, gap_to_shifted_call_count, shifted_short_fallback, shifted_to_gap, ShiftGrid};
use crate::strings::{GapInstance, ShiftedInstance, Verdict};

use super::{majority, FirstError, Testers, STAGE_DELTA};

impl Testers {
    /// Gap tester by the plain recursion at depth `h`, error at most `delta`.
    ///
    /// Requires `β < (336 ⌈log n⌉)^(-h/2) · α^(h/(h+1))`.
    pub fn baseline_gap(
        &self,
        inst: &GapInstance<MeteredView<'_>>,
        h: u32,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Verdict, TesterError> {
        let n = inst.n();
        if !self.constants.gap_admits(n, inst.alpha, inst.beta, h) {
            return Err(TesterError::UnsupportedRegime {
                beta: inst.beta,
                h_max: h,
                max_beta: self.constants.gap_bound(n, inst.alpha, h),
            });
        }
        if inst.beta == 0 {
            return Ok(self.gap_zero(inst.x, inst.y, inst.alpha, delta, rs));
        }
        majority(self.reps(delta), rs, |rs| self.baseline_gap_once(inst, h, rs))
    }

    fn baseline_gap_once(&self, inst: &GapInstance<MeteredView<'_>>, h: u32, rs: &mut RandomStream) -> Result<Verdict, TesterError> {
        let phi = inst.beta;
        let calls = gap_to_shifted_call_count(inst.n(), inst.alpha, phi, &self.constants);
        let leaf_delta = STAGE_DELTA / (2 * calls.max(1)) as f64;
        let mut err = FirstError::default();
        let parent = rs.clone();
        let out = gap_to_shifted(inst, phi, &self.constants, &mut rs.child(0), |j, sub| {
            let r = self.baseline_shifted(&sub, h - 1, leaf_delta, &mut parent.child(j as u64 + 1));
            err.take(r, Verdict::No)
        })?;
        err.into_result(out.verdict)
    }

    /// Shifted tester by the plain recursion at depth `h`: the offset grid
    /// with gap testers at the same depth as oracles.
    ///
    /// Requires `γ < (1/3)(336 ⌈log n⌉)^(-h/2) · α^(h/(h+1))`.
    pub fn baseline_shifted(
        &self,
        inst: &ShiftedInstance<MeteredView<'_>>,
        h: u32,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Verdict, TesterError> {
        let n = inst.n();
        if !self.constants.shifted_admits(n, inst.alpha, inst.gamma, h) {
            return Err(TesterError::UnsupportedRegime {
                beta: inst.gamma,
                h_max: h,
                max_beta: self.constants.gap_bound(n, inst.alpha, h) / 3.0,
            });
        }
        if n <= inst.beta {
            return Ok(shifted_short_fallback(inst.x, inst.y, inst.alpha));
        }
        let calls = ShiftGrid::new(n, inst.beta, inst.gamma, ShiftGrid::balanced_xi(inst.beta, inst.gamma)).calls();
        let call_delta = delta / (2 * calls) as f64;
        let mut err = FirstError::default();
        let parent = rs.clone();
        let out = shifted_to_gap(inst, |j, sub| {
            let r = self.baseline_gap(&sub, h, call_delta, &mut parent.child(j as u64 + 1));
            err.take(r, Verdict::No)
        })?;
        err.into_result(out.verdict)
    }
}
