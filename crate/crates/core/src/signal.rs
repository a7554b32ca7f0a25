//! Constellation, received-signal quantities and the secrecy rate.

use crate::{Error, Result, C64};
use std::f64::consts::PI;

/// PSK constellation with the symbol Bob should see (`s`) and the rotated
/// symbol imposed on Eve (`s_e`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    pub size: usize,
    pub s: C64,
    pub s_e: C64,
}

impl Constellation {
    /// B-PSK with s = e^{jπ/B} and s_e = s·e^{j·rotation}.
    pub fn psk(size: usize, eve_rotation: f64) -> Result<Self> {
        if size < 3 {
            return Err(Error::param("constellation_size", "must be at least 3 so that ϱ < π/2"));
        }
        let s = C64::from_polar(1.0, PI / size as f64);
        Ok(Constellation { size, s, s_e: s * C64::from_polar(1.0, eve_rotation) })
    }

    /// Half-angle of the demodulation cone, π/B.
    pub fn rho(&self) -> f64 {
        PI / self.size as f64
    }

    /// The symbol pair c = [s, s_e]ᵀ sᴴ.
    pub fn symbol_pair(&self) -> [C64; 2] {
        [self.s * self.s.conj(), self.s_e * self.s.conj()]
    }
}

impl Default for Constellation {
    fn default() -> Self {
        Constellation::psk(4, PI).expect("QPSK is valid")
    }
}

/// Noise powers in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub ris: f64,
    pub bob: f64,
    pub eve: f64,
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("noise_ris", self.ris), ("noise_bob", self.bob), ("noise_eve", self.eve)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be non-negative"));
            }
        }
        Ok(())
    }
}

/// σ_r²·Σ|ϖ_m|²|f_m|² + σ_node²: amplified RIS noise plus receiver noise.
pub fn interference_power(f: &[C64], varpi: &[C64], sigma_r2: f64, sigma_node2: f64) -> f64 {
    let amp: f64 = f.iter().zip(varpi).map(|(a, b)| a.norm_sqr() * b.norm_sqr()).sum();
    sigma_r2 * amp + sigma_node2
}

/// [log₂((κς + ς t_u²)/(κς + κ t_e²))]⁺.
pub fn secrecy_rate(t_u: f64, t_e: f64, kappa: f64, varsigma: f64) -> f64 {
    let num = kappa * varsigma + varsigma * t_u * t_u;
    let den = kappa * varsigma + kappa * t_e * t_e;
    (num / den).log2().max(0.0)
}

/// τ = √(2^μ κ/ς), the weight on Eve's amplitude in the objective.
pub fn tau(mu: f64, kappa: f64, varsigma: f64) -> f64 {
    (mu.exp2() * kappa / varsigma).sqrt()
}

/// ρ = t_u + τ t_e; a diagnostic, not used by the solvers.
pub fn proportionality_factor(t_u: f64, t_e: f64, tau: f64) -> f64 {
    t_u + tau * t_e
}

/// Split w into an MRT signal part steered to deliver t_u·s at Bob and an
/// artificial-noise remainder, so that w = v̂_c + v̂_a.
pub fn mrt_an_decompose(w: &[C64], q_u: &[C64], p: &[bool], t_u: f64, s: C64) -> Result<(Vec<C64>, Vec<C64>)> {
    let v_c: Vec<C64> = q_u.iter().zip(p).map(|(q, &on)| if on { q.conj() } else { C64::new(0.0, 0.0) }).collect();
    let y: C64 = q_u.iter().zip(&v_c).map(|(q, v)| q * v).sum();
    if y.norm() == 0.0 {
        return Err(Error::DegenerateChannel("zero MRT projection onto Bob".into()));
    }
    let scale = C64::from_polar(1.0, -y.arg()) * t_u * s / y.norm();
    let v_c_hat: Vec<C64> = v_c.iter().map(|v| v * scale).collect();
    let v_a_hat: Vec<C64> = w.iter().zip(&v_c_hat).map(|(a, b)| a - b).collect();
    Ok((v_c_hat, v_a_hat))
}
