//! Robust alternating optimization under imperfect CSI.
//!
//! The chance constraints "Bob's symbol stays inside its demodulation cone"
//! and "Eve's symbol stays inside the cone of the rotated symbol s_e" are
//! turned into deterministic cone constraints with safety margins Θ_u and
//! Θ_e, built from the Gaussian quantile of Γ. The received phases of both
//! users are then free within the cone boundaries, and the solver places them
//! where the power root is largest.

use crate::channels::standard_complex_normals;
use crate::numerics::inv_norm_cdf;
use crate::scenario::RobustConfig;
use crate::solver::{self, BeamState, Mode, Problem, SolveReport, StepInfo};
use crate::{Error, Execution, Result, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Slack absorbed when clamping a cosine into [−1, 1].
const COS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyMargins {
    pub theta_u: f64,
    pub theta_e: f64,
}

/// Quantities entering the margin formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginInputs {
    pub gamma: f64,
    pub n_a: usize,
    pub var_u: f64,
    pub var_e: f64,
    pub p0: f64,
    pub m: usize,
    pub sigma_r2: f64,
    pub eta: f64,
    pub noise_bob: f64,
    pub noise_eve: f64,
    pub rho: f64,
}

impl MarginInputs {
    pub fn new(prob: &Problem, cfg: &RobustConfig) -> Self {
        MarginInputs {
            gamma: cfg.gamma,
            n_a: prob.cfg.n_a,
            var_u: cfg.var_u,
            var_e: cfg.var_e(),
            p0: prob.cfg.p0,
            m: prob.m(),
            sigma_r2: prob.noise.ris,
            eta: prob.eta,
            noise_bob: prob.noise.bob,
            noise_eve: prob.noise.eve,
            rho: prob.constellation.rho(),
        }
    }
}

/// Θ = Φ⁻¹(Γ)·√(N_a σ_ε² P₀ + M σ_r² η + σ_n²)/(√2 cos ϱ) for each user.
pub fn compute_margins(x: &MarginInputs) -> Result<SafetyMargins> {
    let q = inv_norm_cdf(x.gamma)?;
    let denom = std::f64::consts::SQRT_2 * x.rho.cos();
    let common = x.m as f64 * x.sigma_r2 * x.eta;
    let theta = |var: f64, noise: f64| q * (x.n_a as f64 * var * x.p0 + common + noise).sqrt() / denom;
    Ok(SafetyMargins { theta_u: theta(x.var_u, x.noise_bob), theta_e: theta(x.var_e, x.noise_eve) })
}

/// Root of t² sin²x = (t cos x tan ϱ − Θ)² on the "+" branch.
fn cone_boundary(t: f64, theta: f64, rho: f64) -> Result<f64> {
    let tan = rho.tan();
    let sec2 = 1.0 + tan * tan;
    let disc = t * t * sec2 - theta * theta;
    if !(t > 0.0) || disc < 0.0 {
        return Err(Error::PhaseInfeasible { amplitude: t, margin: theta });
    }
    let cos = (theta * tan + disc.sqrt()) / (t * sec2);
    if cos.abs() > 1.0 + COS_SLACK {
        return Err(Error::PhaseInfeasible { amplitude: t, margin: theta });
    }
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Eve's received-phase offset on the cone boundary around s_e (≤ 0).
pub fn eve_phase(t_e: f64, theta_e: f64, rho: f64) -> Result<f64> {
    cone_boundary(t_e, theta_e, rho).map(|x| -x)
}

/// Bob's received-phase offset on the boundary of his margin-shrunk cone (≥ 0).
pub fn bob_phase(t_u: f64, delta_tu: f64, theta_u: f64, rho: f64) -> Result<f64> {
    cone_boundary(t_u, delta_tu * rho.tan() + theta_u, rho)
}

/// Parameters fixed for a robust solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustParams {
    pub margins: SafetyMargins,
    pub delta_tu: f64,
}

impl RobustParams {
    pub fn new(prob: &Problem, cfg: &RobustConfig) -> Result<Self> {
        Ok(RobustParams {
            margins: compute_margins(&MarginInputs::new(prob, cfg))?,
            delta_tu: cfg.delta_tu(prob.cfg.p0),
        })
    }

    fn mode(&self) -> Mode {
        Mode::Robust { margins: self.margins, delta_tu: self.delta_tu }
    }
}

pub fn robust_jbv_step(
    prob: &Problem,
    params: &RobustParams,
    cols: &[usize],
    state: &mut BeamState,
    select: bool,
) -> Result<StepInfo> {
    solver::jbv_step(prob, &params.mode(), cols, state, select).map(|(info, _)| info)
}

pub fn robust_psm_step(
    prob: &Problem,
    params: &RobustParams,
    cols: &[usize],
    state: &mut BeamState,
) -> Result<StepInfo> {
    solver::psm_step(prob, &params.mode(), cols, state)
}

/// Full robust solve with antenna selection, designing on `prob`'s (possibly
/// erroneous) aggregates and reporting SR on the true channels.
pub fn solve_robust(prob: &Problem, cfg: &RobustConfig) -> Result<(BeamState, SolveReport)> {
    prob.cfg.validate(prob.n())?;
    let params = RobustParams::new(prob, cfg)?;
    solver::solve(prob, params.mode(), None, Some(params.margins))
}

pub fn solve_robust_on_support(
    prob: &Problem,
    cfg: &RobustConfig,
    support: &[usize],
) -> Result<(BeamState, SolveReport)> {
    let params = RobustParams::new(prob, cfg)?;
    solver::solve(prob, params.mode(), Some(support), Some(params.margins))
}

/// Monte-Carlo check of the cone constraints around the design channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConeCheck {
    pub draws: usize,
    /// Bob's derotated symbol inside his Δt_u-shifted cone.
    pub bob_inside: usize,
    /// Eve's derotated symbol outside Bob's demodulation cone.
    pub eve_outside: usize,
}

impl ConeCheck {
    pub fn bob_frequency(&self) -> f64 {
        self.bob_inside as f64 / self.draws as f64
    }

    pub fn eve_outside_frequency(&self) -> f64 {
        self.eve_outside as f64 / self.draws as f64
    }
}

const CHUNK: usize = 8192;

/// Draw channel errors (ε on the active antennas), RIS noise and receiver
/// noise, and count how often each user's symbol lands where the design puts
/// it. The RIS noise enters through fᴴΦn_r, which is drawn directly as a
/// scalar with variance σ_r²Σ|f_mϖ_m|².
pub fn monte_carlo_cones(
    prob: &Problem,
    state: &BeamState,
    cfg: &RobustConfig,
    draws: usize,
    seed: u64,
    exec: Execution,
) -> ConeCheck {
    let support = state.support();
    let agg = prob.ch.aggregates_on(&state.varpi, &support, prob.error);
    let w: Vec<C64> = support.iter().map(|&c| state.w[c]).collect();
    let y_u: C64 = agg.q_u.iter().zip(&w).map(|(q, x)| q * x).sum();
    let y_e: C64 = agg.q_e.iter().zip(&w).map(|(q, x)| q * x).sum();
    let ris_var = |f: &[C64]| -> f64 {
        prob.noise.ris * f.iter().zip(&state.varpi).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum::<f64>()
    };
    let (ris_u, ris_e) = (ris_var(&prob.ch.f_u).sqrt(), ris_var(&prob.ch.f_e).sqrt());
    let (eps_u, eps_e) = (cfg.var_u.sqrt(), cfg.var_e().sqrt());
    let (nu, ne) = (prob.noise.bob.sqrt(), prob.noise.eve.sqrt());
    let s = prob.constellation.s;
    let tan = prob.constellation.rho().tan();
    let delta_tu = cfg.delta_tu(prob.cfg.p0);

    let chunks = draws.div_ceil(CHUNK);
    let counts = exec.map_range(chunks, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let len = CHUNK.min(draws - k * CHUNK);
        let (mut bob, mut eve) = (0usize, 0usize);
        for _ in 0..len {
            let z = standard_complex_normals(&mut rng, 2 * w.len() + 4);
            let (zu, rest) = z.split_at(w.len());
            let (ze, rest) = rest.split_at(w.len());
            let err_u: C64 = zu.iter().zip(&w).map(|(a, b)| a * b).sum::<C64>() * eps_u;
            let err_e: C64 = ze.iter().zip(&w).map(|(a, b)| a * b).sum::<C64>() * eps_e;
            let rx_u = (y_u + err_u) * s + rest[0] * ris_u + rest[1] * nu;
            let rx_e = (y_e + err_e) * s + rest[2] * ris_e + rest[3] * ne;
            let d = rx_u * s.conj();
            if d.im.abs() <= (d.re - delta_tu) * tan {
                bob += 1;
            }
            let d = rx_e * s.conj();
            if d.im.abs() > d.re * tan {
                eve += 1;
            }
        }
        (bob, eve)
    });
    let (bob_inside, eve_outside) = counts.into_iter().fold((0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    ConeCheck { draws, bob_inside, eve_outside }
}
