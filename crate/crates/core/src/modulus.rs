//! Moduli of continuity.
//!
//! The admissible moduli are the continuous increasing `w` with `w(0) = 0`
//! whose doubling ratio `w(2δ)/w(δ)` stays within bounds `1 < κ₁ ≤ κ₂ < ∞`
//! near zero. The bounds are measured on a dyadic grid at construction; the
//! exceptional-set machinery consumes `κ₁` and the pseudo-inverse `w⁻¹`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::GaugeFunction;
use crate::measure::RadialMeasure;
use crate::series::{self, classify_terms, Convergence};

/// Named modulus shapes accepted by configs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ModulusForm {
    /// `δ^h`
    Power { h: f64 },
    /// `δ^h · ln(1/δ)^log_power`
    PowerLog { h: f64, log_power: f64 },
}

/// A validated modulus of continuity on `[0, delta0]`.
#[derive(Debug, Clone)]
pub struct Modulus {
    form: ModulusForm,
    delta0: f64,
    kappa1: f64,
    kappa2: f64,
}

impl Modulus {
    pub fn new(form: ModulusForm, delta0: f64) -> Result<Self> {
        if !(delta0 > 0.0 && delta0 <= 0.5) {
            return Err(Error::Modulus(format!("delta0 {delta0} outside (0, 1/2]")));
        }
        match form {
            ModulusForm::Power { h } => {
                if !(h > 0.0) {
                    return Err(Error::Modulus("modulus exponent must be > 0".into()));
                }
            }
            // h = 0 with a negative log power is syntactically a modulus but
            // fails the doubling lower bound below.
            ModulusForm::PowerLog { h, .. } => {
                if !(h >= 0.0) {
                    return Err(Error::Modulus("modulus exponent must be ≥ 0".into()));
                }
            }
        }
        let mut m = Self { form, delta0, kappa1: 0.0, kappa2: 0.0 };
        // Doubling bounds and monotonicity on the dyadic grid δ = delta0·2^{-k}.
        let mut k1 = f64::INFINITY;
        let mut k2 = 0.0_f64;
        let mut prev = f64::INFINITY;
        let mut ratios = [0.0_f64; 40];
        for k in 1..=40u32 {
            let delta = delta0 * 2.0_f64.powi(-(k as i32));
            let w = m.eval(delta);
            let w2 = m.eval(2.0 * delta);
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::Modulus(format!("w({delta:.3e}) = {w:.3e} not positive")));
            }
            if w > prev * (1.0 + 1e-12) {
                return Err(Error::Modulus(format!("not increasing near δ = {delta:.3e}")));
            }
            prev = w;
            let ratio = w2 / w;
            ratios[(k - 1) as usize] = ratio;
            k1 = k1.min(ratio);
            k2 = k2.max(ratio);
        }
        if !(k1 > 1.0 + 1e-9) {
            return Err(Error::Modulus(format!("doubling lower bound κ₁ = {k1} not > 1")));
        }
        // Semi-decision that liminf w(2δ)/w(δ) > 1: reject when the excess
        // over 1 keeps collapsing along the grid.
        if ratios[39] - 1.0 < 0.6 * (ratios[19] - 1.0) {
            return Err(Error::Modulus(
                "doubling ratio trends to 1 along the dyadic grid".into(),
            ));
        }
        m.kappa1 = k1;
        m.kappa2 = k2;
        Ok(m)
    }

    pub fn power(h: f64) -> Result<Self> {
        Self::new(ModulusForm::Power { h }, 0.5)
    }

    pub fn form(&self) -> ModulusForm {
        self.form
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    /// Validated doubling lower bound (the κ₁ of the construction `φ_q`).
    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn eval(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        match self.form {
            ModulusForm::Power { h } => delta.powf(h),
            ModulusForm::PowerLog { h, log_power } => {
                delta.powf(h) * (1.0 / delta).ln().max(1.0).powf(log_power)
            }
        }
    }

    /// Pseudo-inverse `w⁻¹(y) = sup{δ | w(δ) ≤ y}`, extended linearly beyond
    /// the validated window so that it is increasing on all of `[0, ∞)`.
    pub fn pseudo_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if let ModulusForm::Power { h } = self.form {
            return y.powf(1.0 / h);
        }
        let w0 = self.eval(self.delta0);
        if y >= w0 {
            return self.delta0 * y / w0;
        }
        let (mut lo, mut hi) = (0.0_f64, self.delta0);
        // 80 halvings put the bracket well below 1e-20 relative width.
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) <= y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Whether `w(δ) = o(δ^h)` on the dyadic grid, the membership test for
    /// the class used by the wavelet modulus theorem.
    pub fn is_little_o_of_power(&self, h: f64) -> bool {
        let mut prev = f64::INFINITY;
        for k in 1..=40u32 {
            let delta = self.delta0 * 2.0_f64.powi(-(k as i32));
            let ratio = self.eval(delta) / delta.powf(h);
            if ratio > prev * (1.0 + 1e-12) {
                return false;
            }
            prev = ratio;
        }
        // Require visible decay, not mere boundedness.
        let deep = self.eval(self.delta0 * 2.0_f64.powi(-40)) / (self.delta0 * 2.0_f64.powi(-40)).powf(h);
        let shallow = self.eval(self.delta0 * 0.5) / (self.delta0 * 0.5).powf(h);
        deep < 0.5 * shallow
    }
}

/// Classifies `∫_{0+} g₁(w⁻¹(r)) σ(dr)` — the divergence condition of the
/// Lévy modulus theorem — via shell sums `Σ_j g₁(w⁻¹(2^{-j})) c_j`.
pub fn modulus_divergence_test(
    g: &GaugeFunction,
    w: &Modulus,
    m: &RadialMeasure,
) -> Result<Convergence> {
    let g1 = g.normalize_to(1);
    if g1.is_zero() {
        return Ok(Convergence::Converges);
    }
    let j_max = series::DEFAULT_J_MAX;
    let masses: Vec<f64> = (0..=j_max).map(|j| m.shell_mass(j)).collect::<Result<_>>()?;
    Ok(classify_terms(
        |j| g1.eval(w.pseudo_inverse(2.0_f64.powi(-(j as i32)))) * masses[j as usize],
        j_max,
    ))
}
