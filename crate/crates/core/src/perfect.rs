//! Alternating optimization under perfect CSI.

use crate::solver::{self, BeamState, Mode, Problem, SolveReport, StepInfo};
use crate::Result;

/// One JBV half-step on `cols`. With `select`, the selection vector is reset
/// to the N_a largest reweighted entries.
pub fn jbv_step(prob: &Problem, cols: &[usize], state: &mut BeamState, select: bool) -> Result<StepInfo> {
    solver::jbv_step(prob, &Mode::Perfect, cols, state, select).map(|(info, _)| info)
}

/// One PSM half-step on `cols`.
pub fn psm_step(prob: &Problem, cols: &[usize], state: &mut BeamState) -> Result<StepInfo> {
    solver::psm_step(prob, &Mode::Perfect, cols, state)
}

/// Full solve with compressive-sensing antenna selection.
pub fn solve_perfect(prob: &Problem) -> Result<(BeamState, SolveReport)> {
    prob.cfg.validate(prob.n())?;
    solver::solve(prob, Mode::Perfect, None, None)
}

/// Solve with the antennas frozen on `support`.
pub fn solve_on_support(prob: &Problem, support: &[usize]) -> Result<(BeamState, SolveReport)> {
    solver::solve(prob, Mode::Perfect, Some(support), None)
}
