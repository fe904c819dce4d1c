//! Top-level gap and shifted testers: pick a depth, use the specialized
//! routines when their gates hold, recurse otherwise.

use crate::access::{MeteredView, RandomStream};
use crate::error::{ParamError, TesterError};
use crate::reductions::{gap_to_shifted, gap_to_shifted_call_count, shifted_short_fallback, shifted_to_gap, ShiftGrid};
use crate::strings::{GapInstance, ShiftedInstance, Verdict};

use super::{majority, FirstError, Testers, STAGE_DELTA};

impl Testers {
    /// Smallest `h ≤ h_max` whose gap gate admits `β`.
    pub fn admissible_depth(&self, n: usize, alpha: usize, beta: usize) -> Option<u32> {
        (0..=self.config.h_max).find(|&h| self.constants.gap_admits(n, alpha, beta, h))
    }

    /// Largest `β` bound over all depths up to `h_max` (the gate is strict).
    pub fn max_admissible_beta(&self, n: usize, alpha: usize) -> f64 {
        (0..=self.config.h_max)
            .map(|h| self.constants.gap_bound(n, alpha, h))
            .fold(0.0, f64::max)
    }

    fn unsupported(&self, n: usize, alpha: usize, beta: usize) -> TesterError {
        TesterError::UnsupportedRegime {
            beta,
            h_max: self.config.h_max,
            max_beta: self.max_admissible_beta(n, alpha),
        }
    }

    /// The depth a gap instance runs at: the configured one if its gate
    /// holds, otherwise (when unconfigured) the smallest admissible one.
    pub fn gap_depth(&self, n: usize, alpha: usize, beta: usize) -> Result<u32, TesterError> {
        match self.config.h {
            Some(h) if self.constants.gap_admits(n, alpha, beta, h) => Ok(h),
            Some(_) => Err(self.unsupported(n, alpha, beta)),
            None => self.admissible_depth(n, alpha, beta).ok_or_else(|| self.unsupported(n, alpha, beta)),
        }
    }

    /// Gap tester with error at most `config.delta`.
    pub fn main_gap(&self, inst: &GapInstance<MeteredView<'_>>, rs: &mut RandomStream) -> Result<Verdict, TesterError> {
        let h = self.gap_depth(inst.n(), inst.alpha, inst.beta)?;
        self.main_gap_at(inst, h, self.config.delta, rs)
    }

    /// Gap tester at depth `h` (whose gate must hold) with error at most
    /// `delta`.
    pub fn main_gap_at(
        &self,
        inst: &GapInstance<MeteredView<'_>>,
        h: u32,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Verdict, TesterError> {
        let (n, alpha, beta) = (inst.n(), inst.alpha, inst.beta);
        if beta == 0 {
            return Ok(self.gap_zero(inst.x, inst.y, alpha, delta, rs));
        }
        if self.constants.batched_gap_h1_admits(n, alpha, beta) {
            return Ok(self.batched_gap_h1(inst.x, &[inst.y], alpha, beta, delta, rs)?[0]);
        }
        if self.constants.batched_gap_h2_admits(n, alpha, beta) {
            return Ok(self.batched_gap_h2(inst.x, &[inst.y], alpha, beta, delta, rs)?[0]);
        }
        if h < 3 || !self.constants.gap_admits(n, alpha, beta, h) {
            return Err(self.unsupported(n, alpha, beta));
        }
        majority(self.reps(delta), rs, |rs| self.main_gap_once(inst, h, rs))
    }

    fn main_gap_once(&self, inst: &GapInstance<MeteredView<'_>>, h: u32, rs: &mut RandomStream) -> Result<Verdict, TesterError> {
        let phi = inst.beta;
        let calls = gap_to_shifted_call_count(inst.n(), inst.alpha, phi, &self.constants);
        let leaf_delta = STAGE_DELTA / (2 * calls.max(1)) as f64;
        let mut err = FirstError::default();
        let parent = rs.clone();
        let out = gap_to_shifted(inst, phi, &self.constants, &mut rs.child(0), |j, sub| {
            let r = self.main_shifted_at(&sub, h - 1, leaf_delta, &mut parent.child(j as u64 + 1));
            err.take(r, Verdict::No)
        })?;
        err.into_result(out.verdict)
    }

    /// Shifted tester with error at most `config.delta`, at the configured
    /// depth or the smallest admissible `h ≥ 2`.
    pub fn main_shifted(&self, inst: &ShiftedInstance<MeteredView<'_>>, rs: &mut RandomStream) -> Result<Verdict, TesterError> {
        let (n, alpha, gamma) = (inst.n(), inst.alpha, inst.gamma);
        let admits = |h: u32| self.constants.shifted_admits(n, alpha, gamma, h);
        let h = match self.config.h {
            Some(h) if h >= 2 && admits(h) => Some(h),
            Some(_) => None,
            None => (2..=self.config.h_max.max(2)).find(|&h| admits(h)),
        };
        let Some(h) = h else {
            return Err(TesterError::UnsupportedRegime {
                beta: gamma,
                h_max: self.config.h_max,
                max_beta: self.max_admissible_beta(n, alpha) / 3.0,
            });
        };
        self.main_shifted_at(inst, h, self.config.delta, rs)
    }

    /// Shifted tester at depth `h ≥ 2` with error at most `delta`.
    pub fn main_shifted_at(
        &self,
        inst: &ShiftedInstance<MeteredView<'_>>,
        h: u32,
        delta: f64,
        rs: &mut RandomStream,
    ) -> Result<Verdict, TesterError> {
        let (n, alpha, beta, gamma) = (inst.n(), inst.alpha, inst.beta, inst.gamma);
        if self.constants.shifted_h2_admits(n, alpha, gamma) {
            return self.shifted_h2(inst, delta, rs);
        }
        if h < 2 {
            return Err(TesterError::Params(ParamError::violated(format!(
                "shifted tester at depth {h} outside the depth-2 gate"
            ))));
        }
        if n <= beta {
            return Ok(shifted_short_fallback(inst.x, inst.y, alpha));
        }
        let calls = ShiftGrid::new(n, beta, gamma, ShiftGrid::balanced_xi(beta, gamma)).calls();
        let call_delta = delta / (2 * calls) as f64;
        let mut err = FirstError::default();
        let parent = rs.clone();
        let out = shifted_to_gap(inst, |j, sub| {
            let r = self.main_gap_at(&sub, h, call_delta, &mut parent.child(j as u64 + 1));
            err.take(r, Verdict::No)
        })?;
        err.into_result(out.verdict)
    }
}
