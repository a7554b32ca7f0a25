//! Fixed-position placements and the exhaustive selection oracle.

use crate::channels::GridSpec;
use crate::perfect::{solve_on_support, solve_perfect};
use crate::scenario::Scenario;
use crate::solver::{BeamState, Problem, SolveReport};
use crate::{Error, Execution, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Largest number of supports the exhaustive search will enumerate.
pub const EXHAUSTIVE_BUDGET: u128 = 100_000;

/// Side of the fixed movable range used by Scheme 1, in meters.
pub const SCHEME1_RANGE: f64 = 0.144;

/// Grid side used by Scheme 2 (8×8 = 64 candidates).
pub const SCHEME2_SIDE: usize = 8;

fn check_count(n: usize, n_a: usize) -> Result<()> {
    if n_a == 0 || n_a > n {
        return Err(Error::param("num_antennas", format!("{n_a} antennas do not fit {n} positions")));
    }
    Ok(())
}

pub fn mask(n: usize, support: &[usize]) -> Vec<bool> {
    let mut p = vec![false; n];
    support.iter().for_each(|&i| p[i] = true);
    p
}

pub fn support_of(p: &[bool]) -> Vec<usize> {
    p.iter().enumerate().filter(|(_, &on)| on).map(|(i, _)| i).collect()
}

/// Contiguous indices from 0 in row-major order.
pub fn place_side_by_side(grid: &GridSpec, n_a: usize) -> Result<Vec<bool>> {
    check_count(grid.len(), n_a)?;
    Ok(mask(grid.len(), &(0..n_a).collect::<Vec<_>>()))
}

/// Uniform draw without replacement.
pub fn place_random(grid: &GridSpec, n_a: usize, seed: u64) -> Result<Vec<bool>> {
    check_count(grid.len(), n_a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(random_mask(grid.len(), n_a, &mut rng))
}

fn random_mask(n: usize, n_a: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let picked = rand::seq::index::sample(rng, n, n_a);
    mask(n, &picked.into_vec())
}

/// Solve with the selection frozen to `p`.
pub fn solve_fixed_p(prob: &Problem, p: &[bool]) -> Result<(BeamState, SolveReport)> {
    if p.len() != prob.n() {
        return Err(Error::param("p", "length must equal the number of candidates"));
    }
    if p.iter().filter(|&&x| x).count() != prob.cfg.n_a {
        return Err(Error::param("p", format!("must select exactly {} positions", prob.cfg.n_a)));
    }
    solve_on_support(prob, &support_of(p))
}

fn fixed_sr(prob: &Problem, support: &[usize]) -> Result<f64> {
    solve_on_support(prob, support).map(|(_, r)| r.sr)
}

/// Minimum SR over `trials` random supports (ties go to the earliest trial).
pub fn worst_position(prob: &Problem, trials: usize, seed: u64, exec: Execution) -> Result<(Vec<bool>, f64)> {
    check_count(prob.n(), prob.cfg.n_a)?;
    if trials == 0 {
        return Err(Error::param("worst_trials", "must be at least 1"));
    }
    let results = exec.map_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let p = random_mask(prob.n(), prob.cfg.n_a, &mut rng);
        fixed_sr(prob, &support_of(&p)).map(|sr| (p, sr))
    });
    let mut worst: Option<(Vec<bool>, f64)> = None;
    for r in results {
        let (p, sr) = r?;
        if worst.as_ref().is_none_or(|(_, w)| sr < *w) {
            worst = Some((p, sr));
        }
    }
    Ok(worst.expect("at least one trial"))
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Best support over all C(N, N_a) selections (ties go to the first in
/// lexicographic order).
pub fn exhaustive_best(prob: &Problem, exec: Execution) -> Result<(Vec<bool>, f64)> {
    let (n, k) = (prob.n(), prob.cfg.n_a);
    check_count(n, k)?;
    let count = binomial(n, k);
    if count > EXHAUSTIVE_BUDGET {
        return Err(Error::CombinatorialBudget { n, k, count, limit: EXHAUSTIVE_BUDGET });
    }
    let supports = combinations(n, k);
    let srs = exec.map(&supports, |s| fixed_sr(prob, s));
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in srs.into_iter().enumerate() {
        let sr = r?;
        if best.is_none_or(|(_, b)| sr > b) {
            best = Some((i, sr));
        }
    }
    let (i, sr) = best.expect("non-empty enumeration");
    Ok((mask(n, &supports[i]), sr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Fixed movable range; spacing sets the candidate count.
    Scheme1,
    /// Fixed 8×8 candidate grid; spacing sets the movable range.
    Scheme2,
}

pub fn scheme_grid(kind: SchemeKind, d: f64, n_a: usize) -> Result<GridSpec> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::param("spacing", "must be positive"));
    }
    let side = match kind {
        SchemeKind::Scheme1 => (SCHEME1_RANGE / d * (1.0 + 1e-9)).floor() as usize + 1,
        SchemeKind::Scheme2 => SCHEME2_SIDE,
    };
    if side * side < n_a {
        return Err(Error::param("spacing", format!("d = {d} leaves {} candidates for {n_a} antennas", side * side)));
    }
    Ok(GridSpec { nx: side, nz: side, spacing: d })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemePoint {
    pub spacing: f64,
    pub grid: GridSpec,
    pub sr: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// CS-selected SR at each spacing under the given scheme.
pub fn scheme_sweep(
    kind: SchemeKind,
    d_values: &[f64],
    scenario: &Scenario,
    exec: Execution,
) -> Result<Vec<SchemePoint>> {
    let points = exec.map(d_values, |&d| -> Result<SchemePoint> {
        let grid = scheme_grid(kind, d, scenario.solver.n_a)?;
        let s = Scenario { grid, ..scenario.clone() };
        let ch = s.channels()?;
        let (_, rep) = solve_perfect(&s.problem(&ch))?;
        Ok(SchemePoint { spacing: d, grid, sr: rep.sr, iterations: rep.iterations, converged: rep.converged })
    });
    points.into_iter().collect()
}
