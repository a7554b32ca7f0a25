//! Immutable description of one simulated system.

use crate::channels::{build_channels, ChannelSet, GridSpec, LinkGains, RisSpec, SteeringConvention};
use crate::geometry::{derive_angles, NodeLayout};
use crate::signal::{Constellation, NoiseModel};
use crate::solver::Problem;
use crate::{Error, Result};

/// P[W] = 10^((dBm − 30)/10)
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Target rate μ inside τ = √(2^μ κ/ς).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuPolicy {
    /// SR reached by the previous solve phase, never below `floor`.
    Running {
        floor: f64,
    },
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Transmit power budget in watts.
    pub p0: f64,
    pub n_a: usize,
    pub max_iters: usize,
    pub tol: f64,
    /// Initial Eve amplitude as a fraction of √P₀·min(1, ‖q_e‖), so weak
    /// links start proportionally lower.
    pub te_init_frac: f64,
    pub mu: MuPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            p0: dbm_to_watts(20.0),
            n_a: 36,
            max_iters: 50,
            tol: 1e-6,
            te_init_frac: 0.01,
            mu: MuPolicy::Running { floor: 0.5 },
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.p0 > 0.0 && self.p0.is_finite()) {
            return Err(Error::param("p0", "must be positive"));
        }
        if self.n_a == 0 || self.n_a > n {
            return Err(Error::param("num_antennas", format!("must lie in 1..={n}")));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::param("tol", "must be non-negative"));
        }
        if !(self.te_init_frac >= 0.0) {
            return Err(Error::param("te_init_frac", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustConfig {
    /// Demodulation-probability threshold Γ.
    pub gamma: f64,
    /// Bob's amplitude margin Δt_u as a fraction of √P₀.
    pub delta_frac: f64,
    /// Per-entry error variance on Bob's aggregate channel.
    pub var_u: f64,
    /// Per-entry error variance on Eve's; `None` ties it to `var_u`.
    pub var_e: Option<f64>,
}

impl Default for RobustConfig {
    fn default() -> Self {
        RobustConfig { gamma: 0.95, delta_frac: 0.1, var_u: 1e-4, var_e: None }
    }
}

impl RobustConfig {
    pub fn var_e(&self) -> f64 {
        self.var_e.unwrap_or(self.var_u)
    }

    pub fn delta_tu(&self, p0: f64) -> f64 {
        self.delta_frac * p0.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.5 && self.gamma < 1.0) {
            return Err(Error::param("gamma", "must lie in (0.5, 1)"));
        }
        if !(self.delta_frac >= 0.0) {
            return Err(Error::param("delta_frac", "must be non-negative"));
        }
        if !(self.var_u >= 0.0 && self.var_e() >= 0.0) {
            return Err(Error::param("error_var", "must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub layout: NodeLayout,
    pub grid: GridSpec,
    pub ris: RisSpec,
    pub convention: SteeringConvention,
    pub gains: LinkGains,
    pub noise: NoiseModel,
    pub constellation: Constellation,
    pub solver: SolverConfig,
    pub robust: RobustConfig,
    /// Random supports drawn by the worst-position baseline.
    pub worst_trials: usize,
}

impl Default for Scenario {
    /// BS at the origin, RIS at (−100, 1000, −10) m, Bob at (500, 1200, −50) m,
    /// Eve at (400, 900, −50) m, 25 GHz carrier, a 9×9 grid at λ/2 (movable
    /// range 8d×8d), a 64×64 RIS with η = 1.5, −80 dBm noise everywhere and
    /// P₀ = 20 dBm.
    fn default() -> Self {
        let layout = NodeLayout {
            bs: [0.0, 0.0, 0.0],
            ris: [-100.0, 1000.0, -10.0],
            bob: [500.0, 1200.0, -50.0],
            eve: [400.0, 900.0, -50.0],
            carrier_freq: 25e9,
        };
        let lam = layout.wavelength();
        let noise = dbm_to_watts(-80.0);
        Scenario {
            id: "default".into(),
            layout,
            grid: GridSpec { nx: 9, nz: 9, spacing: lam / 2.0 },
            ris: RisSpec { my: 64, mz: 64, eta: 1.5 },
            convention: SteeringConvention::Corrected,
            gains: LinkGains::default(),
            noise: NoiseModel { ris: noise, bob: noise, eve: noise },
            constellation: Constellation::default(),
            solver: SolverConfig::default(),
            robust: RobustConfig::default(),
            worst_trials: 500,
        }
    }
}

impl Scenario {
    pub fn wavelength(&self) -> f64 {
        self.layout.wavelength()
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        self.grid.validate()?;
        self.ris.validate()?;
        self.noise.validate()?;
        self.solver.validate(self.grid.len())?;
        Ok(())
    }

    pub fn channels(&self) -> Result<ChannelSet> {
        self.validate()?;
        let angles = derive_angles(&self.layout)?;
        build_channels(&angles, &self.grid, &self.ris, self.wavelength(), self.convention, &self.gains)
    }

    /// Solver inputs with perfect CSI.
    pub fn problem<'a>(&self, ch: &'a ChannelSet) -> Problem<'a> {
        Problem {
            ch,
            error: None,
            noise: self.noise,
            constellation: self.constellation,
            eta: self.ris.eta,
            cfg: self.solver,
        }
    }
}
