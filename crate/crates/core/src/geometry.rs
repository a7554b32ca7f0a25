//! Node layout and far-field angles.
//!
//! Directions use azimuth = atan2(y, x) in (−π, π] and elevation =
//! arccos(z/‖v‖) in [0, π], both taken on the difference vector between two
//! nodes.

use crate::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Point = [f64; 3];

/// Positions of the four nodes plus the carrier frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    pub bs: Point,
    pub ris: Point,
    pub bob: Point,
    pub eve: Point,
    pub carrier_freq: f64,
}

impl NodeLayout {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_freq
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_freq > 0.0 && self.carrier_freq.is_finite()) {
            return Err(Error::param("carrier_freq", "must be positive and finite"));
        }
        let nodes = [("bs", self.bs), ("ris", self.ris), ("bob", self.bob), ("eve", self.eve)];
        for (name, p) in nodes {
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::param(name, "position must be finite"));
            }
        }
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if nodes[i].1 == nodes[j].1 {
                    return Err(Error::DegenerateGeometry(format!("{} and {} coincide", nodes[i].0, nodes[j].0)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub azimuth: f64,
    pub elevation: f64,
}

/// Direction of the vector `to − from`.
pub fn direction(from: Point, to: Point) -> Result<Direction> {
    let v = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if r == 0.0 {
        return Err(Error::DegenerateGeometry("coincident positions".into()));
    }
    let mut azimuth = v[1].atan2(v[0]);
    if azimuth <= -std::f64::consts::PI {
        azimuth += 2.0 * std::f64::consts::PI;
    }
    let elevation = (v[2] / r).clamp(-1.0, 1.0).acos();
    Ok(Direction { azimuth, elevation })
}

/// Every departure/arrival direction used by the channel model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSet {
    pub bs_to_ris: Direction,
    /// Arrival direction at the RIS, pointing back towards the BS.
    pub ris_aoa: Direction,
    pub ris_to_bob: Direction,
    pub ris_to_eve: Direction,
    pub bs_to_bob: Direction,
    pub bs_to_eve: Direction,
}

pub fn derive_angles(layout: &NodeLayout) -> Result<AngleSet> {
    layout.validate()?;
    Ok(AngleSet {
        bs_to_ris: direction(layout.bs, layout.ris)?,
        ris_aoa: direction(layout.ris, layout.bs)?,
        ris_to_bob: direction(layout.ris, layout.bob)?,
        ris_to_eve: direction(layout.ris, layout.eve)?,
        bs_to_bob: direction(layout.bs, layout.bob)?,
        bs_to_eve: direction(layout.bs, layout.eve)?,
    })
}
