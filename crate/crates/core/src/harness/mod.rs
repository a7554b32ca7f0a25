//! Experiment driver: a scenario, one sweep axis, a list of methods and a
//! list of seeds. Every (method, axis value, seed) triple is an independent
//! task producing one [`SweepRow`].

mod config;
mod csv;

pub use self::config::{parse_config, parse_config_str};
pub use self::csv::{format_float, parse_csv, render_csv, write_csv_atomic};

use crate::baselines::{
    exhaustive_best, place_random, place_side_by_side, scheme_grid, solve_fixed_p, worst_position, SchemeKind,
};
use crate::channels::CsiError;
use crate::perfect::solve_perfect;
use crate::robust::solve_robust;
use crate::scenario::{dbm_to_watts, watts_to_dbm, Scenario};
use crate::signal::mrt_an_decompose;
use crate::solver::{BeamState, Problem, SolveReport};
use crate::{Error, Execution, Result, C64};
use serde::Deserialize;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Transmit power budget in dBm.
    P0Dbm,
    /// RIS amplification bound.
    Eta,
    /// Total RIS elements; must be a perfect square (square surface).
    RisElements,
    NumAntennas,
    /// Candidate spacing d in meters. With a scheme set, the grid follows it.
    SpacingM,
    /// Per-entry error variance on Bob's aggregate channel.
    CsiErrorVar,
    /// Artificial-noise power in dBm, imposed after the solve.
    AnPowerDbm,
}

impl Axis {
    pub const ALL: [Axis; 7] = [
        Axis::P0Dbm,
        Axis::Eta,
        Axis::RisElements,
        Axis::NumAntennas,
        Axis::SpacingM,
        Axis::CsiErrorVar,
        Axis::AnPowerDbm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axis::P0Dbm => "p0_dbm",
            Axis::Eta => "eta",
            Axis::RisElements => "ris_elements",
            Axis::NumAntennas => "num_antennas",
            Axis::SpacingM => "spacing_m",
            Axis::CsiErrorVar => "csi_error_var",
            Axis::AnPowerDbm => "an_power_dbm",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Validation(vec![format!("sweep.axis: unknown axis \"{s}\"")]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Movable antennas with compressed-sensing selection, perfect CSI.
    MaCs,
    FpaSide,
    FpaRandom,
    FpaWorst,
    /// Best support by enumeration.
    Exhaustive,
    /// Robust solver on erroneous CSI.
    Robust,
    /// Perfect-CSI solver run on erroneous CSI.
    Nonrobust,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::MaCs,
        Method::FpaSide,
        Method::FpaRandom,
        Method::FpaWorst,
        Method::Exhaustive,
        Method::Robust,
        Method::Nonrobust,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MaCs => "ma-cs",
            Method::FpaSide => "fpa-side",
            Method::FpaRandom => "fpa-random",
            Method::FpaWorst => "fpa-worst",
            Method::Exhaustive => "exhaustive",
            Method::Robust => "robust",
            Method::Nonrobust => "nonrobust",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Validation(vec![format!("run.methods: unknown method \"{s}\"")]))
    }
}

/// CSV shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    /// One row per (method, axis value, seed).
    #[default]
    Long,
    /// One row per (axis value, seed) with an SR column per method.
    Wide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub axis: Axis,
    pub values: Vec<f64>,
    /// Grid scheme followed by a spacing sweep.
    pub scheme: Option<SchemeKind>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub out: Option<PathBuf>,
    /// Write measured wall time instead of 0.
    pub record_timing: bool,
    pub layout: Layout,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let scenario = Scenario::default();
        ExperimentSpec {
            values: vec![axis_default(&scenario, Axis::P0Dbm)],
            scenario,
            axis: Axis::P0Dbm,
            scheme: None,
            methods: vec![Method::MaCs],
            seeds: vec![1],
            out: None,
            record_timing: false,
            layout: Layout::Long,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario_id: String,
    pub axis: Axis,
    pub axis_value: f64,
    pub method: Method,
    pub seed: u64,
    /// Secrecy rate in bits/s/Hz on the true channels.
    pub sr: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_ms: f64,
}

/// Value of `axis` in an unswept scenario.
pub fn axis_default(s: &Scenario, axis: Axis) -> f64 {
    match axis {
        Axis::P0Dbm => watts_to_dbm(s.solver.p0),
        Axis::Eta => s.ris.eta,
        Axis::RisElements => s.ris.len() as f64,
        Axis::NumAntennas => s.solver.n_a as f64,
        Axis::SpacingM => s.grid.spacing,
        Axis::CsiErrorVar => s.robust.var_u,
        Axis::AnPowerDbm => watts_to_dbm(s.solver.p0),
    }
}

fn exact_count(axis: Axis, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < u32::MAX as f64 {
        Ok(v as usize)
    } else {
        Err(Error::param(axis.name(), format!("{v} is not a positive integer")))
    }
}

/// Scenario at one sweep point.
pub fn apply_axis(base: &Scenario, axis: Axis, scheme: Option<SchemeKind>, v: f64) -> Result<Scenario> {
    let mut s = base.clone();
    match axis {
        Axis::P0Dbm => s.solver.p0 = dbm_to_watts(v),
        Axis::Eta => s.ris.eta = v,
        Axis::RisElements => {
            let total = exact_count(axis, v)?;
            let side = (total as f64).sqrt().round() as usize;
            if side * side != total {
                return Err(Error::param(axis.name(), format!("{total} is not a perfect square")));
            }
            s.ris.my = side;
            s.ris.mz = side;
        }
        Axis::NumAntennas => s.solver.n_a = exact_count(axis, v)?,
        Axis::SpacingM => s.grid.spacing = v,
        Axis::CsiErrorVar => s.robust.var_u = v,
        Axis::AnPowerDbm => {
            if !v.is_finite() {
                return Err(Error::param(axis.name(), "must be finite"));
            }
        }
    }
    if let Some(kind) = scheme {
        s.grid = scheme_grid(kind, s.grid.spacing, s.solver.n_a)?;
    }
    s.validate()?;
    s.robust.validate()?;
    Ok(s)
}

impl ExperimentSpec {
    /// Check every field and sweep point, reporting all problems at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.values.is_empty() {
            errs.push("sweep.values: must not be empty".to_string());
        }
        if self.methods.is_empty() {
            errs.push("run.methods: must not be empty".to_string());
        }
        if self.seeds.is_empty() {
            errs.push("run.seeds: must not be empty".to_string());
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            errs.push("run.seeds: seeds must be distinct".to_string());
        }
        let mut methods = self.methods.clone();
        methods.sort_unstable();
        if methods.windows(2).any(|w| w[0] == w[1]) {
            errs.push("run.methods: methods must be distinct".to_string());
        }
        if self.scheme.is_some() && self.axis != Axis::SpacingM {
            errs.push("sweep.scheme: requires sweep.axis = \"spacing_m\"".to_string());
        }
        if self.scenario.worst_trials == 0 {
            errs.push("baselines.worst_trials: must be at least 1".to_string());
        }
        let mut seen = self.values.clone();
        seen.sort_by(f64::total_cmp);
        if seen.windows(2).any(|w| w[0] == w[1]) {
            errs.push("sweep.values: values must be distinct".to_string());
        }
        if let Err(e) = self.scenario.robust.validate() {
            errs.push(e.to_string());
        }
        for &v in &self.values {
            if let Err(e) = apply_axis(&self.scenario, self.axis, self.scheme, v) {
                errs.push(format!("sweep.values: {} = {v}: {e}", self.axis));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

fn run_method(s: &Scenario, method: Method, seed: u64, exec: Execution) -> Result<(BeamState, SolveReport)> {
    let ch = s.channels()?;
    let prob = s.problem(&ch);
    let grid = &s.grid;
    let n_a = s.solver.n_a;
    match method {
        Method::MaCs => solve_perfect(&prob),
        Method::FpaSide => solve_fixed_p(&prob, &place_side_by_side(grid, n_a)?),
        Method::FpaRandom => solve_fixed_p(&prob, &place_random(grid, n_a, seed)?),
        Method::FpaWorst => solve_fixed_p(&prob, &worst_position(&prob, s.worst_trials, seed, exec)?.0),
        Method::Exhaustive => solve_fixed_p(&prob, &exhaustive_best(&prob, exec)?.0),
        Method::Robust | Method::Nonrobust => {
            let err = CsiError { var_u: s.robust.var_u, var_e: s.robust.var_e(), seed };
            err.validate()?;
            let draw = err.draw(prob.n());
            let noisy = prob.with_error(&draw);
            if method == Method::Robust {
                solve_robust(&noisy, &s.robust)
            } else {
                solve_perfect(&noisy)
            }
        }
    }
}

/// Rescale the artificial-noise part of the solution to `p_an` watts, then
/// restore the total power, and return the resulting SR on the true channels.
pub fn sr_with_an_power(prob: &Problem, state: &BeamState, p_an: f64) -> Result<f64> {
    let agg = prob.ch.aggregates(&state.varpi);
    let (v_c, v_a) = mrt_an_decompose(&state.w, &agg.q_u, &state.p, state.t_u, prob.constellation.s)?;
    let an: f64 = v_a.iter().map(|x| x.norm_sqr()).sum();
    let g = if an > 0.0 { (p_an / an).sqrt() } else { 0.0 };
    let mut w: Vec<C64> = v_c.iter().zip(&v_a).map(|(c, a)| c + a * g).collect();
    let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateChannel("beamformer vanished after AN rescaling".into()));
    }
    let scale = prob.cfg.p0.sqrt() / norm;
    w.iter_mut().for_each(|x| *x *= scale);
    Ok(prob.true_rate(&w, &state.varpi))
}

fn run_task(spec: &ExperimentSpec, v: f64, method: Method, seed: u64, exec: Execution) -> Result<SweepRow> {
    let start = Instant::now();
    let s = apply_axis(&spec.scenario, spec.axis, spec.scheme, v)?;
    let (state, rep) = run_method(&s, method, seed, exec)?;
    let sr = if spec.axis == Axis::AnPowerDbm {
        let ch = s.channels()?;
        sr_with_an_power(&s.problem(&ch), &state, dbm_to_watts(v))?
    } else {
        rep.sr
    };
    let wall_ms = if spec.record_timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    Ok(SweepRow {
        scenario_id: s.id.clone(),
        axis: spec.axis,
        axis_value: v,
        method,
        seed,
        sr,
        iterations: rep.iterations,
        converged: rep.converged,
        wall_ms,
    })
}

/// Run every (method, axis value, seed) task, sorted by that key, and write
/// the CSV when the experiment names an output path.
pub fn run_spec(spec: &ExperimentSpec, exec: Execution) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut tasks = Vec::new();
    for &m in &spec.methods {
        for &v in &spec.values {
            for &seed in &spec.seeds {
                tasks.push((m, v, seed));
            }
        }
    }
    tasks.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
    log::info!("running {} tasks on scenario {}", tasks.len(), spec.scenario.id);
    let rows = exec
        .map(&tasks, |&(m, v, seed)| {
            let r = run_task(spec, v, m, seed, exec);
            if let Ok(row) = &r {
                log::debug!("{} {}={} seed {}: SR {}", m, spec.axis, v, seed, row.sr);
            }
            r
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    if let Some(path) = &spec.out {
        write_csv_atomic(path, &render_csv(&rows, spec.layout)?)?;
    }
    Ok(rows)
}
