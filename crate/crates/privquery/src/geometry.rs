//! Four-state geometry and its ideal measurement statistics.
//!
//! The sender encodes each qubit into one of four states living in a single
//! plane of the Bloch sphere: an orthogonal pair spanning the 0-basis and a
//! second orthogonal pair, rotated by the half-angle θ, spanning the 1-basis.
//! The receiver projects onto one of the two bases chosen uniformly at
//! random. After the sender discloses whether a ψ or φ state was sent, an
//! outcome orthogonal to one candidate identifies the basis conclusively;
//! otherwise the receiver gains only probabilistic information.
//!
//! In the noiseless case the relevant statistics are closed-form in θ:
//! conclusive probability `sin²θ / 2` and inconclusive error rate
//! `cos²θ / (1 + cos²θ)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    /// θ = 90° degenerates to orthogonal bases (the inconclusive error rate
    /// vanishes and the protocol regime no longer applies), so the bound is
    /// strict on both sides.
    #[error("state angle must satisfy 0 < theta < 90 degrees, got {0}")]
    InvalidTheta(f64),
}

/// Half-angle between the 0-basis and the 1-basis, in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateGeometry {
    theta_deg: f64,
}

impl StateGeometry {
    pub fn new(theta_deg: f64) -> Result<Self, GeometryError> {
        if !(theta_deg > 0.0 && theta_deg < 90.0) {
            return Err(GeometryError::InvalidTheta(theta_deg));
        }
        Ok(Self { theta_deg })
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn theta_rad(&self) -> f64 {
        self.theta_deg.to_radians()
    }

    /// Probability that an ideal measurement identifies the basis
    /// conclusively: `sin²θ / 2`.
    pub fn conclusive_prob(&self) -> f64 {
        let s = self.theta_rad().sin();
        s * s / 2.0
    }

    /// Probability that the basis inferred from an inconclusive outcome is
    /// wrong: `cos²θ / (1 + cos²θ)`.
    pub fn inconclusive_error(&self) -> f64 {
        let c2 = {
            let c = self.theta_rad().cos();
            c * c
        };
        c2 / (1.0 + c2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_angles() {
        assert!(StateGeometry::new(0.0).is_err());
        assert!(StateGeometry::new(90.0).is_err());
        assert!(StateGeometry::new(-5.0).is_err());
        assert!(StateGeometry::new(f64::NAN).is_err());
        assert!(StateGeometry::new(35.6).is_ok());
    }

    #[test]
    fn formula_values() {
        let g = StateGeometry::new(35.6).unwrap();
        assert!((g.conclusive_prob() - 0.16944).abs() < 1e-5);
        assert!((g.inconclusive_error() - 0.39800).abs() < 1e-5);

        let g = StateGeometry::new(25.0).unwrap();
        assert!((g.conclusive_prob() - 0.08930).abs() < 1e-5);
        assert!((g.inconclusive_error() - 0.45097).abs() < 1e-5);
    }

    #[test]
    fn orthogonal_basis_limit() {
        // θ → 90°: conclusive probability approaches 1/2 and the inconclusive
        // error rate approaches 0.
        let g = StateGeometry::new(89.999_999).unwrap();
        assert!((g.conclusive_prob() - 0.5).abs() < 1e-9);
        assert!(g.inconclusive_error() < 1e-9);
    }
}
