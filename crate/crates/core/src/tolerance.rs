//! Tolerance set shared by every module.
//!
//! Geometric tolerances (`rank`, `sphere`, `unit`, `ball`) are absolute or
//! relative to the local point scale as noted. The neighbor tolerances are
//! relative to the image diameter of the instance being decided, so a map and
//! its rescaling get the same verdicts.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Affine dependence threshold, relative to the largest squared edge of
    /// the Gram system.
    pub rank: f64,
    /// Relative residual allowed for points on a computed circumsphere.
    pub sphere: f64,
    /// Allowed deviation from unit norm for sphere samples.
    pub unit: f64,
    /// Angular slack for enclosing-ball membership.
    pub ball: f64,
    /// Image points may intrude into a witness ball by at most this fraction
    /// of the image diameter.
    pub eps_inside: f64,
    /// Images closer than this fraction of the image diameter coincide.
    pub eps_coincide: f64,
    /// Witness residual threshold as a fraction of the image diameter.
    pub eps_witness: f64,
    /// Points within this fraction of the image diameter of a witness sphere
    /// are counted as lying on it.
    pub on_sphere: f64,
    /// Largest witness radius, in image diameters, a negative verdict has to
    /// rule out.
    pub max_radius: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-9,
            sphere: 1e-9,
            unit: 1e-9,
            ball: 1e-9,
            eps_inside: 1e-6,
            eps_coincide: 1e-9,
            eps_witness: 1e-3,
            on_sphere: 1e-9,
            max_radius: 1e4,
        }
    }
}
