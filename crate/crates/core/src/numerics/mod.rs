//! Shared numerics for the alternating solvers.

mod normal;
mod pinv;
mod roots;
mod sparse;

pub use normal::{inv_norm_cdf, norm_cdf};
pub use pinv::{pinv2, Pinv2, RANK_TOL};
pub use roots::{jbv_root, psm_root, QuadCoeffs};
pub use sparse::{reweight, select_top};

use crate::C64;

/// xᴴy
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum()
}

pub fn norm_inf(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm()).fold(0.0, f64::max)
}
