//! Secrecy-rate maximization for a movable-antenna base station aided by an
//! active reconfigurable intelligent surface (RIS), with directional
//! modulation towards a legitimate user (Bob) and away from an eavesdropper
//! (Eve).
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: node layout and far-field angles.
//! - [`channels`]: steering vectors, the channel set and imperfect-CSI draws.
//! - [`signal`]: constellation, interference powers, secrecy rate and the
//!   MRT/artificial-noise split.
//! - [`numerics`]: two-row pseudo-inverse, power-allocation roots,
//!   reweighting, top-k selection and the Gaussian quantile.
//! - [`perfect`] and [`robust`]: the alternating solvers for perfect and
//!   imperfect CSI.
//! - [`baselines`]: fixed-position placements and the exhaustive oracle.
//! - [`harness`]: experiment specs, sweeps and CSV output.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channels;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod harness;
pub mod numerics;
pub mod perfect;
pub mod robust;
pub mod scenario;
pub mod signal;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Execution;
pub use num_complex::Complex64 as C64;
