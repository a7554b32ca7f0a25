//! Steering vectors, the channel set and imperfect-CSI draws.
//!
//! Planar arrays are indexed row-major: entry `n = n_h·N_v + n_v` is the
//! product of the horizontal entry `n_h` and the vertical entry `n_v`
//! (Kronecker order). The BS→RIS matrix is rank one, `G = g·bᵀ`, and is kept
//! in that factored form.

use crate::geometry::{AngleSet, Direction};
use crate::{Error, Result, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

/// Which argument the vertical steering factor uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SteeringConvention {
    /// cos(elevation), every link with its own angles.
    #[default]
    Corrected,
    /// cos(azimuth), with the RIS→Eve vertical factor reusing Bob's azimuth.
    Printed,
}

/// Candidate positions of the movable antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub nz: usize,
    pub spacing: f64,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.nx * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.nz == 0 {
            return Err(Error::param("grid", "needs at least one position per axis"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::param("spacing", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisSpec {
    pub my: usize,
    pub mz: usize,
    /// Maximum amplification factor.
    pub eta: f64,
}

impl RisSpec {
    pub fn len(&self) -> usize {
        self.my * self.mz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.my == 0 || self.mz == 0 {
            return Err(Error::param("ris", "needs at least one element per axis"));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::param("eta", "must be non-negative"));
        }
        Ok(())
    }
}

/// Optional per-link amplitude gains; all default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub bs_ris: f64,
    pub ris_bob: f64,
    pub ris_eve: f64,
    pub bs_bob: f64,
    pub bs_eve: f64,
}

impl Default for LinkGains {
    fn default() -> Self {
        LinkGains { bs_ris: 1.0, ris_bob: 1.0, ris_eve: 1.0, bs_bob: 1.0, bs_eve: 1.0 }
    }
}

/// Entry k is exp(j·2π·k·spacing·phase_arg/λ).
pub fn steering_1d(count: usize, spacing: f64, phase_arg: f64, wavelength: f64) -> Vec<C64> {
    let step = 2.0 * PI * spacing * phase_arg / wavelength;
    (0..count).map(|k| C64::from_polar(1.0, step * k as f64)).collect()
}

pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[derive(Debug, Clone, Copy)]
struct ArrayShape {
    horizontal: usize,
    vertical: usize,
    spacing: f64,
}

fn planar(
    shape: ArrayShape,
    dir: Direction,
    vertical_azimuth: f64,
    convention: SteeringConvention,
    wavelength: f64,
) -> Vec<C64> {
    let h_arg = dir.azimuth.sin() * dir.elevation.sin();
    let v_arg = match convention {
        SteeringConvention::Corrected => dir.elevation.cos(),
        SteeringConvention::Printed => vertical_azimuth.cos(),
    };
    kron(
        &steering_1d(shape.horizontal, shape.spacing, h_arg, wavelength),
        &steering_1d(shape.vertical, shape.spacing, v_arg, wavelength),
    )
}

/// All links of the system.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// RIS-side factor of G (M entries).
    pub g: Vec<C64>,
    /// BS-side factor of G (N entries).
    pub bs_ris: Vec<C64>,
    pub f_u: Vec<C64>,
    pub f_e: Vec<C64>,
    pub h_u: Vec<C64>,
    pub h_e: Vec<C64>,
}

/// Additive estimation error on the aggregated channels.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateError {
    pub eps_u: Vec<C64>,
    pub eps_e: Vec<C64>,
}

/// Aggregated channels restricted to a set of candidate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub q_u: Vec<C64>,
    pub q_e: Vec<C64>,
}

impl ChannelSet {
    pub fn m(&self) -> usize {
        self.g.len()
    }

    pub fn n(&self) -> usize {
        self.bs_ris.len()
    }

    /// Dense M×N matrix G in row-major order.
    pub fn g_matrix(&self) -> Vec<C64> {
        self.g.iter().flat_map(|gm| self.bs_ris.iter().map(move |b| gm * b)).collect()
    }

    /// (f_uᴴ Φ g, f_eᴴ Φ g): the scalar cascade gains through the RIS.
    pub fn cascade(&self, varpi: &[C64]) -> (C64, C64) {
        let mut au = C64::new(0.0, 0.0);
        let mut ae = C64::new(0.0, 0.0);
        for (((v, g), fu), fe) in varpi.iter().zip(&self.g).zip(&self.f_u).zip(&self.f_e) {
            let vg = v * g;
            au += fu.conj() * vg;
            ae += fe.conj() * vg;
        }
        (au, ae)
    }

    /// q = fᴴΦG + hᵀ on the given columns, plus an optional estimation error.
    pub fn aggregates_on(&self, varpi: &[C64], cols: &[usize], error: Option<&AggregateError>) -> Aggregates {
        let (au, ae) = self.cascade(varpi);
        let mut q_u: Vec<C64> = cols.iter().map(|&n| au * self.bs_ris[n] + self.h_u[n]).collect();
        let mut q_e: Vec<C64> = cols.iter().map(|&n| ae * self.bs_ris[n] + self.h_e[n]).collect();
        if let Some(err) = error {
            for (k, &n) in cols.iter().enumerate() {
                q_u[k] += err.eps_u[n];
                q_e[k] += err.eps_e[n];
            }
        }
        Aggregates { q_u, q_e }
    }

    /// Full-length aggregates (all N columns).
    pub fn aggregates(&self, varpi: &[C64]) -> Aggregates {
        let cols: Vec<usize> = (0..self.n()).collect();
        self.aggregates_on(varpi, &cols, None)
    }

    /// G·w for a full-length w.
    pub fn g_times(&self, w: &[C64]) -> Vec<C64> {
        let beta: C64 = self.bs_ris.iter().zip(w).map(|(b, x)| b * x).sum();
        self.g.iter().map(|gm| gm * beta).collect()
    }
}

pub fn build_channels(
    angles: &AngleSet,
    grid: &GridSpec,
    ris: &RisSpec,
    wavelength: f64,
    convention: SteeringConvention,
    gains: &LinkGains,
) -> Result<ChannelSet> {
    grid.validate()?;
    ris.validate()?;
    if !(wavelength > 0.0) {
        return Err(Error::param("wavelength", "must be positive"));
    }
    let bs = ArrayShape { horizontal: grid.nx, vertical: grid.nz, spacing: grid.spacing };
    let surface = ArrayShape { horizontal: ris.my, vertical: ris.mz, spacing: wavelength / 2.0 };
    let steer = |shape, dir: Direction, v_az: f64, gain: f64| -> Vec<C64> {
        let mut v = planar(shape, dir, v_az, convention, wavelength);
        if gain != 1.0 {
            v.iter_mut().for_each(|x| *x *= gain);
        }
        v
    };
    let a = angles;
    Ok(ChannelSet {
        g: steer(surface, a.ris_aoa, a.ris_aoa.azimuth, gains.bs_ris),
        bs_ris: steer(bs, a.bs_to_ris, a.bs_to_ris.azimuth, 1.0),
        f_u: steer(surface, a.ris_to_bob, a.ris_to_bob.azimuth, gains.ris_bob),
        f_e: steer(surface, a.ris_to_eve, a.ris_to_bob.azimuth, gains.ris_eve),
        h_u: steer(bs, a.bs_to_bob, a.bs_to_bob.azimuth, gains.bs_bob),
        h_e: steer(bs, a.bs_to_eve, a.bs_to_eve.azimuth, gains.bs_eve),
    })
}

/// Per-entry circularly-symmetric complex Gaussian error model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsiError {
    pub var_u: f64,
    pub var_e: f64,
    pub seed: u64,
}

/// `count` draws of CN(0, 1).
pub fn standard_complex_normals(rng: &mut ChaCha8Rng, count: usize) -> Vec<C64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..count)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * scale, im * scale)
        })
        .collect()
}

impl CsiError {
    pub fn validate(&self) -> Result<()> {
        if !(self.var_u >= 0.0 && self.var_e >= 0.0) {
            return Err(Error::param("csi_error_var", "variances must be non-negative"));
        }
        Ok(())
    }

    /// Draw the error vectors for N candidate positions. The same seed gives
    /// the same standard-normal realization for every variance.
    pub fn draw(&self, n: usize) -> AggregateError {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let zu = standard_complex_normals(&mut rng, n);
        let ze = standard_complex_normals(&mut rng, n);
        let (su, se) = (self.var_u.sqrt(), self.var_e.sqrt());
        AggregateError {
            eps_u: zu.into_iter().map(|z| z * su).collect(),
            eps_e: ze.into_iter().map(|z| z * se).collect(),
        }
    }
}

/// Estimated aggregates q̂ = q + ε for a given PSM.
pub fn perturb_csi(ch: &ChannelSet, varpi: &[C64], err: &CsiError) -> Result<(Vec<C64>, Vec<C64>)> {
    err.validate()?;
    let cols: Vec<usize> = (0..ch.n()).collect();
    let draw = err.draw(ch.n());
    let agg = ch.aggregates_on(varpi, &cols, Some(&draw));
    Ok((agg.q_u, agg.q_e))
}
