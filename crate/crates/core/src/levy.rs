//! Lévy process models.
//!
//! A model is the triplet (drift, Gaussian coefficient, jump measure) in
//! dimension `d`. The jump measure is carried radially; the full Lévy measure
//! is synthesized as σ ⊗ uniform direction on the unit sphere (a sign flip in
//! `d = 1`), which preserves σ — the only input to every quantity computed
//! here — exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::series::ExponentEstimate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyModel {
    /// Drift vector `a` (the characteristic exponent carries `+i a·λ`, so the
    /// path carries `−a·t`).
    pub drift: Vec<f64>,
    /// Isotropic Gaussian coefficient `q ≥ 0`; the quadratic form is `q‖λ‖²`.
    pub gaussian: f64,
    /// Radial jump-size measure σ.
    pub jumps: RadialMeasure,
    /// Ambient dimension `d ≥ 1`.
    pub dim: usize,
}

impl LevyModel {
    pub fn new(drift: Vec<f64>, gaussian: f64, jumps: RadialMeasure, dim: usize) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidParameter("dimension must lie in 1..=3".into()));
        }
        if drift.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "drift has {} components, expected {dim}",
                drift.len()
            )));
        }
        if !(gaussian >= 0.0) {
            return Err(Error::InvalidParameter("gaussian coefficient must be ≥ 0".into()));
        }
        Ok(Self { drift, gaussian, jumps, dim })
    }

    /// Scalar model without drift or Gaussian part.
    pub fn pure_jump(jumps: RadialMeasure) -> Self {
        Self { drift: vec![0.0], gaussian: 0.0, jumps, dim: 1 }
    }

    /// Blumenthal–Getoor index of the jump measure.
    pub fn bg_index(&self) -> Result<ExponentEstimate> {
        self.jumps.bg_index()
    }

    /// `β' = 2` when a Gaussian part is present, else `β`.
    pub fn beta_prime(&self) -> Result<ExponentEstimate> {
        if self.gaussian != 0.0 {
            Ok(ExponentEstimate::Point(2.0))
        } else {
            self.bg_index()
        }
    }

    /// The Hölder ceiling `1/β'`, as an extended real (`∞` when `β' = 0`).
    pub fn holder_ceiling(&self) -> Result<f64> {
        let bp = self.beta_prime()?.as_extended();
        Ok(if bp == 0.0 { f64::INFINITY } else { 1.0 / bp })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    #[test]
    fn beta_prime_switches_on_gaussian_part() {
        let jumps = RadialMeasure::power_law(1.0, 1.2).unwrap();
        let pure = LevyModel::pure_jump(jumps.clone());
        assert_eq!(pure.beta_prime().unwrap(), ExponentEstimate::Point(1.2));
        let with_gauss = LevyModel::new(vec![0.0], 1.0, jumps, 1).unwrap();
        assert_eq!(with_gauss.beta_prime().unwrap(), ExponentEstimate::Point(2.0));
    }

    #[test]
    fn holder_ceiling_is_infinite_for_beta_zero() {
        let jumps = RadialMeasure::finite(vec![Atom { radius: 0.5, mass: 3.0 }]).unwrap();
        let m = LevyModel::pure_jump(jumps);
        assert!(m.holder_ceiling().unwrap().is_infinite());
    }
}
