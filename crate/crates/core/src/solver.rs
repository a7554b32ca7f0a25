//! Alternating-optimization engine shared by the perfect-CSI and robust
//! solvers.
//!
//! One iteration runs a JBV step (transmit beamformer and Bob's amplitude for
//! a fixed PSM) followed by a PSM step (RIS coefficients for a fixed
//! beamformer, then Eve's amplitude). The objective t_u − τ·t_e is evaluated
//! right after the JBV step, where beamformer and PSM are consistent. An
//! iteration is kept only if it does not lower the objective, so the reported
//! trace is non-decreasing.
//!
//! A solve with antenna selection has two phases. Phase one runs on every
//! candidate position and picks the N_a largest entries of the reweighted
//! beamformer each iteration. Phase two restarts on the chosen support only,
//! which is exactly the fixed-support solve used by the baselines.

use crate::channels::{AggregateError, ChannelSet};
use crate::numerics::{jbv_root, norm_inf, norm_sqr, pinv2, psm_root, reweight, select_top, QuadCoeffs};
use crate::robust::{bob_phase, eve_phase, SafetyMargins};
use crate::scenario::{MuPolicy, SolverConfig};
use crate::signal::{interference_power, secrecy_rate, tau, Constellation, NoiseModel};
use crate::{Error, Result, C64};
use std::time::Instant;

/// Retries after halving an amplitude whose power root is infeasible.
pub const MAX_RETRIES: usize = 10;

/// Everything a solve reads.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub ch: &'a ChannelSet,
    /// Estimation error added to the aggregates the solver designs on.
    pub error: Option<&'a AggregateError>,
    pub noise: NoiseModel,
    pub constellation: Constellation,
    pub eta: f64,
    pub cfg: SolverConfig,
}

impl<'a> Problem<'a> {
    pub fn with_error(self, error: &'a AggregateError) -> Self {
        Problem { error: Some(error), ..self }
    }

    pub fn n(&self) -> usize {
        self.ch.n()
    }

    pub fn m(&self) -> usize {
        self.ch.m()
    }

    fn kappa(&self, varpi: &[C64]) -> f64 {
        interference_power(&self.ch.f_u, varpi, self.noise.ris, self.noise.bob)
    }

    fn varsigma(&self, varpi: &[C64]) -> f64 {
        interference_power(&self.ch.f_e, varpi, self.noise.ris, self.noise.eve)
    }

    /// SR of (w, ϖ) on the true channels.
    pub fn true_rate(&self, w: &[C64], varpi: &[C64]) -> f64 {
        let agg = self.ch.aggregates(varpi);
        let t_u = agg.q_u.iter().zip(w).map(|(q, x)| q * x).sum::<C64>().norm();
        let t_e = agg.q_e.iter().zip(w).map(|(q, x)| q * x).sum::<C64>().norm();
        secrecy_rate(t_u, t_e, self.kappa(varpi), self.varsigma(varpi))
    }
}

/// Solver iterate. Vectors over candidate positions have length N and are
/// zero outside the active columns.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamState {
    pub w: Vec<C64>,
    pub w_hat: Vec<C64>,
    pub delta: Vec<f64>,
    pub varpi: Vec<C64>,
    pub p: Vec<bool>,
    pub t_u: f64,
    pub t_e: f64,
    pub phase_u: f64,
    pub phase_e: f64,
    pub objective: f64,
}

impl BeamState {
    /// Uniform beamformer on `cols` at full power, PSM at η with zero phase.
    pub fn initial(prob: &Problem, cols: &[usize], t_e: f64) -> Self {
        let n = prob.n();
        let amp = (prob.cfg.p0 / cols.len() as f64).sqrt();
        let mut w = vec![C64::new(0.0, 0.0); n];
        let mut p = vec![false; n];
        for &c in cols {
            w[c] = C64::new(amp, 0.0);
            p[c] = true;
        }
        BeamState {
            w_hat: w.clone(),
            w,
            delta: vec![0.0; n],
            varpi: vec![C64::new(prob.eta, 0.0); prob.m()],
            p,
            t_u: 0.0,
            t_e,
            phase_u: 0.0,
            phase_e: 0.0,
            objective: f64::NEG_INFINITY,
        }
    }

    /// The symbol pair rotated by the current received-phase offsets.
    pub fn rotated_symbols(&self, c: &Constellation) -> [C64; 2] {
        let base = c.symbol_pair();
        [base[0] * C64::from_polar(1.0, self.phase_u), base[1] * C64::from_polar(1.0, self.phase_e)]
    }

    pub fn support(&self) -> Vec<usize> {
        self.p.iter().enumerate().filter(|(_, &on)| on).map(|(i, _)| i).collect()
    }
}

/// Diagnostics of one half-step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepInfo {
    /// ‖Q̂ŵ − t·c‖∞/‖t·c‖∞ after a JBV step, or the collinearity residual
    /// of Zϖ against t·c after a PSM step.
    pub residual: f64,
    pub rank_deficient: bool,
    pub retries: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Relative objective change fell below the tolerance.
    Converged,
    /// The next iterate would have lowered the objective; the previous one
    /// was kept.
    Stalled,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Objective after each accepted iteration of the final phase.
    pub objective_trace: Vec<f64>,
    /// Design-channel SR after each accepted iteration of the final phase.
    pub sr_trace: Vec<f64>,
    /// Objective trace of the selection phase (empty when N_a = N or the
    /// support was fixed).
    pub selection_trace: Vec<f64>,
    pub selection_iterations: usize,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// SR of the returned state on the true channels.
    pub sr: f64,
    /// SR on the channels the solver designed on.
    pub sr_design: f64,
    pub tau: f64,
    pub max_jbv_residual: f64,
    pub max_psm_residual: f64,
    pub rank_deficient_steps: usize,
    pub retries: usize,
    pub margins: Option<SafetyMargins>,
    /// Bob's amplitude fell short of the robust cone requirement.
    pub margin_infeasible: bool,
    pub wall_ms: f64,
}

/// How the received-phase offsets and Eve's amplitude floor are set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Mode {
    Perfect,
    Robust { margins: SafetyMargins, delta_tu: f64 },
}

impl Mode {
    fn te_floor(&self, rho: f64) -> f64 {
        match self {
            Mode::Perfect => 0.0,
            Mode::Robust { margins, .. } => margins.theta_e / rho.tan(),
        }
    }

    /// Largest admissible |phase| for Bob and Eve at the given amplitudes.
    fn phase_bounds(&self, t_u: f64, t_e: f64, rho: f64) -> (f64, f64, bool) {
        match *self {
            Mode::Perfect => (0.0, 0.0, false),
            Mode::Robust { margins, delta_tu } => {
                let tan = rho.tan();
                let bob_margin = delta_tu * tan + margins.theta_u;
                let (xu, bad_u) = if t_u * tan >= bob_margin {
                    (bob_phase(t_u, delta_tu, margins.theta_u, rho).unwrap_or(0.0), false)
                } else {
                    (0.0, true)
                };
                let xe = if t_e * tan >= margins.theta_e {
                    eve_phase(t_e, margins.theta_e, rho).map(f64::abs).unwrap_or(0.0)
                } else {
                    0.0
                };
                (xu.abs(), xe, bad_u)
            }
        }
    }
}

/// Candidate phase differences ν ∈ [−span, span] at which the cross term
/// 2Re(e^{−jν}γ) is extremal.
fn nu_candidates(span: f64, gamma: C64) -> Vec<f64> {
    let mut out = vec![0.0];
    if span <= 0.0 {
        return out;
    }
    out.push(span);
    out.push(-span);
    let g = gamma.arg();
    for k in -3..=3 {
        let nu = g + k as f64 * std::f64::consts::PI;
        if nu.abs() < span {
            out.push(nu);
        }
    }
    out
}

/// Pick ν maximizing `score(b(ν))`, then split it into (phase_u, phase_e).
fn choose_phases(xu: f64, xe: f64, gamma: C64, mut score: impl FnMut(f64) -> Option<f64>) -> Option<(f64, f64)> {
    let span = xu + xe;
    let mut best: Option<(f64, f64)> = None;
    for nu in nu_candidates(span, gamma) {
        let b = 2.0 * (C64::from_polar(1.0, -nu) * gamma).re;
        if let Some(v) = score(b) {
            if best.is_none_or(|(bv, _)| v > bv) {
                best = Some((v, nu));
            }
        }
    }
    best.map(|(_, nu)| if span > 0.0 { (nu * xu / span, -nu * xe / span) } else { (0.0, 0.0) })
}

/// Reweighted solution operator W = diag(δ)·pinv(Q·diag(δ)) on `cols`.
struct Operator {
    delta: Vec<f64>,
    pinv: crate::numerics::Pinv2,
    w1: Vec<C64>,
    w2: Vec<C64>,
    rows: [Vec<C64>; 2],
}

fn operator(prob: &Problem, varpi: &[C64], cols: &[usize], w: &[C64]) -> Operator {
    let agg = prob.ch.aggregates_on(varpi, cols, prob.error);
    let w_cols: Vec<C64> = cols.iter().map(|&c| w[c]).collect();
    let delta = reweight(&w_cols);
    let r1: Vec<C64> = agg.q_u.iter().zip(&delta).map(|(q, d)| q * d).collect();
    let r2: Vec<C64> = agg.q_e.iter().zip(&delta).map(|(q, d)| q * d).collect();
    let pinv = pinv2(&r1, &r2);
    let w1 = pinv.cols[0].iter().zip(&delta).map(|(x, d)| x * d).collect();
    let w2 = pinv.cols[1].iter().zip(&delta).map(|(x, d)| x * d).collect();
    Operator { delta, pinv, w1, w2, rows: [r1, r2] }
}

/// JBV half-step: reweighted minimum-norm beamformer meeting both symbol
/// constraints with the whole power budget.
pub(crate) fn jbv_step(
    prob: &Problem,
    mode: &Mode,
    cols: &[usize],
    state: &mut BeamState,
    select: bool,
) -> Result<(StepInfo, bool)> {
    let p0 = prob.cfg.p0;
    let rho = prob.constellation.rho();
    let base = prob.constellation.symbol_pair();
    let op = operator(prob, &state.varpi, cols, &state.w);
    let cross = base[0].conj() * base[1] * crate::numerics::dot(&op.w1, &op.w2);
    let q0 = QuadCoeffs::from_columns(&op.w1, &op.w2, base);

    let mut t_e = state.t_e;
    let mut retries = 0;
    let (t_u, phases, bad_u) = loop {
        let (xu, xe, bad_u) = mode.phase_bounds(state.t_u, t_e, rho);
        let root = |b: f64| {
            let q = QuadCoeffs { b, ..q0 };
            jbv_root(t_e, &q, p0).ok().filter(|e| t_e + e > 0.0)
        };
        match choose_phases(xu, xe, cross, root) {
            Some((pu, pe)) => {
                let sym = [base[0] * C64::from_polar(1.0, pu), base[1] * C64::from_polar(1.0, pe)];
                let q = QuadCoeffs::from_columns(&op.w1, &op.w2, sym);
                break (t_e + jbv_root(t_e, &q, p0)?, (pu, pe), bad_u);
            }
            None if retries < MAX_RETRIES => {
                t_e *= 0.5;
                retries += 1;
            }
            None => {
                let q = q0;
                let disc = t_e * t_e * (q.b * q.b - 4.0 * q.a * q.c) + 4.0 * q.a * p0;
                return Err(Error::InfeasiblePower { discriminant: disc });
            }
        }
    };

    state.phase_u = phases.0;
    state.phase_e = phases.1;
    let sym = state.rotated_symbols(&prob.constellation);
    let tc = [sym[0] * t_u, sym[1] * t_e];
    let w_hat = op.pinv.apply(tc);
    let scale = tc[0].norm().max(tc[1].norm());
    let mut residual: f64 = 0.0;
    for (row, target) in op.rows.iter().zip(tc) {
        let y: C64 = row.iter().zip(&w_hat).map(|(a, b)| a * b).sum();
        residual = residual.max((y - target).norm() / scale);
    }

    let n = prob.n();
    let zero = C64::new(0.0, 0.0);
    state.w = vec![zero; n];
    state.w_hat = vec![zero; n];
    state.delta = vec![0.0; n];
    for (k, &c) in cols.iter().enumerate() {
        state.w_hat[c] = w_hat[k];
        state.w[c] = w_hat[k] * op.delta[k];
        state.delta[c] = op.delta[k];
    }
    if select {
        let mags: Vec<f64> = state.w_hat.iter().map(|x| x.norm()).collect();
        state.p = select_top(&mags, prob.cfg.n_a);
    } else {
        state.p = vec![false; n];
        cols.iter().for_each(|&c| state.p[c] = true);
    }
    state.t_u = t_u;
    state.t_e = t_e;
    Ok((StepInfo { residual, rank_deficient: op.pinv.rank_deficient(), retries }, bad_u))
}

/// PSM half-step: RIS coefficients steering both users' symbols for the
/// current beamformer, normalized to max |ϖ_m| = η, then Eve's amplitude from
/// the power root on the updated aggregates.
pub(crate) fn psm_step(prob: &Problem, mode: &Mode, cols: &[usize], state: &mut BeamState) -> Result<StepInfo> {
    let ch = prob.ch;
    let gw = ch.g_times(&state.w);
    let z1: Vec<C64> = ch.f_u.iter().zip(&gw).map(|(f, g)| f.conj() * g).collect();
    let z2: Vec<C64> = ch.f_e.iter().zip(&gw).map(|(f, g)| f.conj() * g).collect();
    let pz = pinv2(&z1, &z2);
    let sym = state.rotated_symbols(&prob.constellation);
    let tc = [sym[0] * state.t_u, sym[1] * state.t_e];
    let x = pz.apply(tc);
    let xm = norm_inf(&x);
    if xm == 0.0 {
        return Err(Error::DegenerateChannel("RIS cascade carries no signal".into()));
    }
    let lambda = prob.eta / xm;
    state.varpi = x.iter().map(|v| v * lambda).collect();
    let scale = lambda * tc[0].norm().max(tc[1].norm());
    let mut residual: f64 = 0.0;
    if scale > 0.0 {
        for (row, target) in [&z1, &z2].into_iter().zip(tc) {
            let y: C64 = row.iter().zip(&state.varpi).map(|(a, b)| a * b).sum();
            residual = residual.max((y - target * lambda).norm() / scale);
        }
    }

    let p0 = prob.cfg.p0;
    let rho = prob.constellation.rho();
    let base = prob.constellation.symbol_pair();
    let op = operator(prob, &state.varpi, cols, &state.w);
    let cross = base[0].conj() * base[1] * crate::numerics::dot(&op.w1, &op.w2);
    let q0 = QuadCoeffs::hatted(&op.w1, &op.w2, base);
    let mut t_u = state.t_u;
    let mut retries = 0;
    let (eps, phases) = loop {
        let (xu, xe, _) = mode.phase_bounds(t_u, state.t_e, rho);
        let root = |b: f64| psm_root(t_u, &QuadCoeffs { b, ..q0 }, p0).ok();
        match choose_phases(xu, xe, cross, root) {
            Some((pu, pe)) => {
                let b = 2.0 * (C64::from_polar(1.0, pe - pu) * cross).re;
                break (psm_root(t_u, &QuadCoeffs { b, ..q0 }, p0)?, (pu, pe));
            }
            None if retries < MAX_RETRIES => {
                t_u *= 0.5;
                retries += 1;
            }
            None => return Err(Error::InfeasiblePower { discriminant: f64::NAN }),
        }
    };
    state.t_u = t_u;
    state.phase_u = phases.0;
    state.phase_e = phases.1;
    state.t_e = (t_u - eps).max(mode.te_floor(rho));
    Ok(StepInfo { residual, rank_deficient: pz.rank_deficient() || op.pinv.rank_deficient(), retries })
}

struct PhaseOutcome {
    state: BeamState,
    trace: Vec<f64>,
    sr_trace: Vec<f64>,
    termination: Termination,
    tau: f64,
    max_jbv: f64,
    max_psm: f64,
    rank_deficient: usize,
    retries: usize,
    margin_infeasible: bool,
}

fn run_phase(prob: &Problem, mode: &Mode, cols: &[usize], select: bool, mu: f64) -> Result<PhaseOutcome> {
    let cfg = prob.cfg;
    let rho = prob.constellation.rho();
    let mut state = BeamState::initial(prob, cols, 0.0);
    let q_e = prob.ch.aggregates_on(&state.varpi, cols, prob.error).q_e;
    state.t_e = (cfg.te_init_frac * cfg.p0.sqrt() * norm_sqr(&q_e).sqrt().min(1.0)).max(mode.te_floor(rho));
    let mut out = PhaseOutcome {
        state: state.clone(),
        trace: Vec::new(),
        sr_trace: Vec::new(),
        termination: Termination::MaxIterations,
        tau: 0.0,
        max_jbv: 0.0,
        max_psm: 0.0,
        rank_deficient: 0,
        retries: 0,
        margin_infeasible: false,
    };
    let mut best: Option<f64> = None;
    for _ in 0..cfg.max_iters {
        let mut cand = state.clone();
        let (info, bad_u) = jbv_step(prob, mode, cols, &mut cand, select)?;
        let kappa = prob.kappa(&cand.varpi);
        let varsigma = prob.varsigma(&cand.varpi);
        if best.is_none() {
            out.tau = tau(mu, kappa, varsigma);
        }
        cand.objective = cand.t_u - out.tau * cand.t_e;
        if let Some(prev) = best {
            if cand.objective < prev {
                out.termination = Termination::Stalled;
                break;
            }
        }
        out.max_jbv = out.max_jbv.max(info.residual);
        out.rank_deficient += info.rank_deficient as usize;
        out.retries += info.retries;
        out.margin_infeasible = bad_u;
        out.trace.push(cand.objective);
        out.sr_trace.push(secrecy_rate(cand.t_u, cand.t_e, kappa, varsigma));
        out.state = cand.clone();
        let done = best.is_some_and(|prev| (cand.objective - prev).abs() <= cfg.tol * prev.abs());
        best = Some(cand.objective);
        if done {
            out.termination = Termination::Converged;
            break;
        }
        let info = psm_step(prob, mode, cols, &mut cand)?;
        out.max_psm = out.max_psm.max(info.residual);
        out.rank_deficient += info.rank_deficient as usize;
        out.retries += info.retries;
        state = cand;
    }
    Ok(out)
}

/// Two-phase solve: selection over all candidates (skipped when N_a = N or a
/// support is given), then a restart on the support.
pub(crate) fn solve(
    prob: &Problem,
    mode: Mode,
    support: Option<&[usize]>,
    margins: Option<SafetyMargins>,
) -> Result<(BeamState, SolveReport)> {
    let start = Instant::now();
    let n = prob.n();
    let all: Vec<usize> = (0..n).collect();
    let mu_for = |prev_sr: Option<f64>| match prob.cfg.mu {
        MuPolicy::Fixed(v) => v,
        MuPolicy::Running { floor } => prev_sr.unwrap_or(floor).max(floor),
    };

    let (cols, selection) = match support {
        Some(s) => {
            if s.is_empty() || s.iter().any(|&c| c >= n) {
                return Err(Error::param("support", "indices must be valid and non-empty"));
            }
            (s.to_vec(), None)
        }
        None if prob.cfg.n_a == n => (all.clone(), None),
        None => {
            let sel = run_phase(prob, &mode, &all, true, mu_for(None))?;
            (sel.state.support(), Some(sel))
        }
    };
    let prev_sr = selection.as_ref().and_then(|s| s.sr_trace.last().copied());
    let fin = run_phase(prob, &mode, &cols, false, mu_for(prev_sr))?;

    let mut state = fin.state;
    // Mask to the support and restore the exact power budget.
    let power: f64 = state.w.iter().zip(&state.p).filter(|(_, &on)| on).map(|(x, _)| x.norm_sqr()).sum();
    let gain = if power > 0.0 { (prob.cfg.p0 / power).sqrt() } else { 0.0 };
    for (x, &on) in state.w.iter_mut().zip(&state.p) {
        *x = if on { *x * gain } else { C64::new(0.0, 0.0) };
    }
    let sr = prob.true_rate(&state.w, &state.varpi);
    let sr_design = fin.sr_trace.last().copied().unwrap_or(0.0);
    let iterations = fin.trace.len();
    let (sel_trace, sel_iters, sel_rank, sel_retries, sel_jbv, sel_psm) = match &selection {
        Some(s) => (s.trace.clone(), s.trace.len(), s.rank_deficient, s.retries, s.max_jbv, s.max_psm),
        None => (Vec::new(), 0, 0, 0, 0.0, 0.0),
    };
    let report = SolveReport {
        objective_trace: fin.trace,
        sr_trace: fin.sr_trace,
        selection_trace: sel_trace,
        selection_iterations: sel_iters,
        iterations,
        converged: fin.termination != Termination::MaxIterations,
        termination: fin.termination,
        sr,
        sr_design,
        tau: fin.tau,
        max_jbv_residual: fin.max_jbv.max(sel_jbv),
        max_psm_residual: fin.max_psm.max(sel_psm),
        rank_deficient_steps: fin.rank_deficient + sel_rank,
        retries: fin.retries + sel_retries,
        margins,
        margin_infeasible: fin.margin_infeasible,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    debug_assert!(norm_sqr(&state.w) <= prob.cfg.p0 * (1.0 + 1e-8));
    Ok((state, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_candidates_cover_extremes() {
        let c = nu_candidates(1.0, C64::from_polar(1.0, 0.4));
        assert!(c.contains(&0.0) && c.contains(&1.0) && c.contains(&-1.0));
        assert!(c.iter().any(|&v| (v - 0.4).abs() < 1e-15));
        assert_eq!(nu_candidates(0.0, C64::new(1.0, 0.0)), vec![0.0]);
    }

    #[test]
    fn phase_split_stays_inside_bounds() {
        let (pu, pe) = choose_phases(0.5, 0.25, C64::from_polar(2.0, 2.0), |b| Some(-b)).unwrap();
        assert!(pu.abs() <= 0.5 + 1e-15 && pe.abs() <= 0.25 + 1e-15);
        assert!(pu >= 0.0 && pe <= 0.0 || pu <= 0.0 && pe >= 0.0);
    }

    proptest::proptest! {
        /// ε₁ at the chosen ν is at least ε₁ at random feasible ν.
        #[test]
        fn chosen_nu_maximizes_the_root(
            xu in 0.0f64..0.8,
            xe in 0.0f64..0.8,
            g_abs in 0.01f64..2.0,
            g_arg in -3.1f64..3.1,
            a in 0.1f64..3.0,
            c in 0.1f64..3.0,
            t_e in 0.01f64..0.5,
            samples in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let gamma = C64::from_polar(g_abs, g_arg);
            let eps = |nu: f64| {
                let b = 2.0 * (C64::from_polar(1.0, -nu) * gamma).re;
                jbv_root(t_e, &QuadCoeffs { a, b, c }, 1.0).ok()
            };
            let (pu, pe) = choose_phases(xu, xe, gamma, |b| jbv_root(t_e, &QuadCoeffs { a, b, c }, 1.0).ok()).unwrap();
            let best = eps(pu - pe).unwrap();
            for f in samples {
                if let Some(e) = eps(f * (xu + xe)) {
                    proptest::prop_assert!(best >= e - 1e-12 * e.abs().max(1.0));
                }
            }
        }
    }
}
