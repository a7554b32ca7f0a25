//! Power-allocation roots for the two-user symbol constraints.
//!
//! With x = W·(t∘c) the transmit power is a quadratic form in the two
//! amplitudes, a·t_u² + b·t_u·t_e + c·t_e². Fixing one amplitude and spending
//! the whole budget P₀ fixes the other.

use super::{dot, norm_sqr};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadCoeffs {
    /// Coefficients of ‖W(t∘c)‖² = a t_u² + b t_u t_e + c t_e² for the
    /// columns `w1`, `w2` of W.
    pub fn from_columns(w1: &[C64], w2: &[C64], sym: [C64; 2]) -> Self {
        QuadCoeffs {
            a: norm_sqr(w1) * sym[0].norm_sqr(),
            b: 2.0 * (sym[0].conj() * sym[1] * dot(w1, w2)).re,
            c: norm_sqr(w2) * sym[1].norm_sqr(),
        }
    }

    /// The same power form with the leading coefficient on Eve's amplitude:
    /// a t_e² + b t_u t_e + c t_u².
    pub fn hatted(w1: &[C64], w2: &[C64], sym: [C64; 2]) -> Self {
        let q = Self::from_columns(w1, w2, sym);
        QuadCoeffs { a: q.c, b: q.b, c: q.a }
    }

    /// Evaluate a·x² + b·x·y + c·y².
    pub fn power(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }
}

/// Larger root ε₁ of the gap t_u − t_e that spends exactly `p0` for a given t_e.
pub fn jbv_root(t_e: f64, q: &QuadCoeffs, p0: f64) -> Result<f64> {
    if !(q.a > 0.0) {
        return Err(Error::DegenerateQuadratic(q.a));
    }
    let disc = t_e * t_e * (q.b * q.b - 4.0 * q.a * q.c) + 4.0 * q.a * p0;
    if disc < 0.0 {
        return Err(Error::InfeasiblePower { discriminant: disc });
    }
    Ok((-t_e * (2.0 * q.a + q.b) + disc.sqrt()) / (2.0 * q.a))
}

/// Larger root ε̂₁ for a given t_u with hatted coefficients; t_e = t_u − ε̂₁
/// spends exactly `p0`.
pub fn psm_root(t_u: f64, q: &QuadCoeffs, p0: f64) -> Result<f64> {
    if !(q.a > 0.0) {
        return Err(Error::DegenerateQuadratic(q.a));
    }
    let disc = t_u * t_u * (q.b * q.b - 4.0 * q.a * q.c) + 4.0 * q.a * p0;
    if disc < 0.0 {
        return Err(Error::InfeasiblePower { discriminant: disc });
    }
    Ok((t_u * (2.0 * q.a + q.b) + disc.sqrt()) / (2.0 * q.a))
}
