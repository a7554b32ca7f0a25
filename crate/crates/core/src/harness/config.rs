//! Experiment configuration files.
//!
//! The format is TOML restricted to flat keys under a handful of sections,
//! e.g. `scenario.p0_dbm = 20` or a `[sweep]` table. Unknown keys are
//! rejected. Powers are given in dBm and converted to watts here.

use super::{Axis, ExperimentSpec, Layout, Method};
use crate::baselines::SchemeKind;
use crate::channels::{LinkGains, SteeringConvention};
use crate::scenario::{dbm_to_watts, MuPolicy, Scenario};
use crate::signal::Constellation;
use crate::{Error, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<RawScenario>,
    solver: Option<RawSolver>,
    robust: Option<RawRobust>,
    sweep: Option<RawSweep>,
    baselines: Option<RawBaselines>,
    run: Option<RawRun>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: Option<String>,
    bs: Option<[f64; 3]>,
    ris: Option<[f64; 3]>,
    bob: Option<[f64; 3]>,
    eve: Option<[f64; 3]>,
    carrier_freq_hz: Option<f64>,
    grid_nx: Option<usize>,
    grid_nz: Option<usize>,
    spacing_m: Option<f64>,
    spacing_wavelengths: Option<f64>,
    ris_my: Option<usize>,
    ris_mz: Option<usize>,
    eta: Option<f64>,
    p0_dbm: Option<f64>,
    noise_ris_dbm: Option<f64>,
    noise_bob_dbm: Option<f64>,
    noise_eve_dbm: Option<f64>,
    num_antennas: Option<usize>,
    steering: Option<SteeringConvention>,
    constellation_size: Option<usize>,
    eve_rotation_rad: Option<f64>,
    gain_bs_ris: Option<f64>,
    gain_ris_bob: Option<f64>,
    gain_ris_eve: Option<f64>,
    gain_bs_bob: Option<f64>,
    gain_bs_eve: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawMu {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    max_iters: Option<usize>,
    tol: Option<f64>,
    te_init_frac: Option<f64>,
    mu: Option<RawMu>,
    mu_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRobust {
    gamma: Option<f64>,
    delta_frac: Option<f64>,
    error_var_bob: Option<f64>,
    error_var_eve: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: Option<Axis>,
    values: Option<Vec<f64>>,
    scheme: Option<SchemeKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBaselines {
    worst_trials: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    methods: Option<Vec<Method>>,
    seeds: Option<Vec<u64>>,
    out: Option<PathBuf>,
    record_timing: Option<bool>,
    layout: Option<Layout>,
}

/// Noise powers above this level (dBm) are almost certainly a unit mistake.
const NOISE_WARN_DBM: f64 = 0.0;

pub fn parse_config_str(text: &str) -> Result<ExperimentSpec> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let mut s = Scenario::default();

    let sc = raw.scenario.unwrap_or_default();
    if let Some(id) = sc.id {
        s.id = id;
    }
    s.layout.bs = sc.bs.unwrap_or(s.layout.bs);
    s.layout.ris = sc.ris.unwrap_or(s.layout.ris);
    s.layout.bob = sc.bob.unwrap_or(s.layout.bob);
    s.layout.eve = sc.eve.unwrap_or(s.layout.eve);
    s.layout.carrier_freq = sc.carrier_freq_hz.unwrap_or(s.layout.carrier_freq);
    s.grid.nx = sc.grid_nx.unwrap_or(s.grid.nx);
    s.grid.nz = sc.grid_nz.unwrap_or(s.grid.nz);
    s.grid.spacing = match (sc.spacing_m, sc.spacing_wavelengths) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("set only one of scenario.spacing_m and scenario.spacing_wavelengths".into()))
        }
        (Some(d), None) => d,
        (None, Some(k)) => k * s.layout.wavelength(),
        (None, None) => s.layout.wavelength() / 2.0,
    };
    s.ris.my = sc.ris_my.unwrap_or(s.ris.my);
    s.ris.mz = sc.ris_mz.unwrap_or(s.ris.mz);
    s.ris.eta = sc.eta.unwrap_or(s.ris.eta);
    if let Some(p) = sc.p0_dbm {
        s.solver.p0 = dbm_to_watts(p);
    }
    for (name, v, slot) in [
        ("scenario.noise_ris_dbm", sc.noise_ris_dbm, &mut s.noise.ris),
        ("scenario.noise_bob_dbm", sc.noise_bob_dbm, &mut s.noise.bob),
        ("scenario.noise_eve_dbm", sc.noise_eve_dbm, &mut s.noise.eve),
    ] {
        if let Some(dbm) = v {
            if dbm > NOISE_WARN_DBM {
                log::warn!("{name} = {dbm} dBm is above {NOISE_WARN_DBM} dBm; check the units");
            }
            *slot = dbm_to_watts(dbm);
        }
    }
    s.solver.n_a = sc.num_antennas.unwrap_or(s.solver.n_a);
    s.convention = sc.steering.unwrap_or(s.convention);
    if sc.constellation_size.is_some() || sc.eve_rotation_rad.is_some() {
        s.constellation = Constellation::psk(
            sc.constellation_size.unwrap_or(4),
            sc.eve_rotation_rad.unwrap_or(std::f64::consts::PI),
        )?;
    }
    let d = LinkGains::default();
    s.gains = LinkGains {
        bs_ris: sc.gain_bs_ris.unwrap_or(d.bs_ris),
        ris_bob: sc.gain_ris_bob.unwrap_or(d.ris_bob),
        ris_eve: sc.gain_ris_eve.unwrap_or(d.ris_eve),
        bs_bob: sc.gain_bs_bob.unwrap_or(d.bs_bob),
        bs_eve: sc.gain_bs_eve.unwrap_or(d.bs_eve),
    };

    let so = raw.solver.unwrap_or_default();
    s.solver.max_iters = so.max_iters.unwrap_or(s.solver.max_iters);
    s.solver.tol = so.tol.unwrap_or(s.solver.tol);
    s.solver.te_init_frac = so.te_init_frac.unwrap_or(s.solver.te_init_frac);
    let floor = so.mu_floor.unwrap_or(0.5);
    s.solver.mu = match so.mu {
        None => MuPolicy::Running { floor },
        Some(RawMu::Fixed(v)) => MuPolicy::Fixed(v),
        Some(RawMu::Named(n)) if n == "running" => MuPolicy::Running { floor },
        Some(RawMu::Named(n)) => {
            return Err(Error::Config(format!("solver.mu: expected \"running\" or a number, got \"{n}\"")))
        }
    };

    let ro = raw.robust.unwrap_or_default();
    s.robust.gamma = ro.gamma.unwrap_or(s.robust.gamma);
    s.robust.delta_frac = ro.delta_frac.unwrap_or(s.robust.delta_frac);
    s.robust.var_u = ro.error_var_bob.unwrap_or(s.robust.var_u);
    s.robust.var_e = ro.error_var_eve.or(s.robust.var_e);

    s.worst_trials = raw.baselines.and_then(|b| b.worst_trials).unwrap_or(s.worst_trials);

    let sw = raw.sweep.unwrap_or_default();
    let axis = sw.axis.unwrap_or(Axis::P0Dbm);
    let values = match (sw.axis, sw.values) {
        (_, Some(v)) => v,
        (None, None) => vec![super::axis_default(&s, Axis::P0Dbm)],
        (Some(_), None) => return Err(Error::Validation(vec!["sweep.values: required when sweep.axis is set".into()])),
    };

    let run = raw.run.unwrap_or_default();
    let spec = ExperimentSpec {
        scenario: s,
        axis,
        values,
        scheme: sw.scheme,
        methods: run.methods.unwrap_or_else(|| vec![Method::MaCs]),
        seeds: run.seeds.unwrap_or_else(|| vec![1]),
        out: run.out,
        record_timing: run.record_timing.unwrap_or(false),
        layout: run.layout.unwrap_or_default(),
    };
    Ok(spec)
}

/// Read and parse a config file. The spec is not validated here.
pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}
