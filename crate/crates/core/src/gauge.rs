//! Gauge functions and their exponent calculus.
//!
//! A gauge is a nondecreasing `g` with `g(0+) = 0`, used to build Hausdorff
//! `g`-measures. The central transform is the `d`-normalization
//! `g_d(r) = r^d · inf_{ρ ≤ r} g(ρ)/ρ^d`, which lands in the class where
//! `g(r)/r^d` is nonincreasing (or degenerates to the zero gauge). On top of
//! it sit the critical exponent `h_g` of a jump measure and the log-log
//! scaling exponent that decides membership in the uniformity class.
//!
//! Class memberships (nondecreasing, ratio-monotone) are validated on dyadic
//! grids, never proven; constructors reject a claimed window on violation.

use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::measure::RadialMeasure;
use crate::series::{self, classify_terms, ExponentEstimate, ThresholdOutcome};

/// Number of grid points used to validate a claimed monotonicity window.
const VALIDATION_POINTS: usize = 1 << 12;
/// Relative slack admitted by the grid monotonicity checks.
const MONOTONE_TOL: f64 = 1e-12;
/// Geometric halvings probed by the running infimum of the `g_d` transform.
const INF_GRID_DEPTH: u32 = 64;

/// Named gauge shapes. Configs may only refer to these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum GaugeForm {
    /// `r^s`
    Power { s: f64 },
    /// `r^s · ln(1/r)^log_power`
    PowerLog { s: f64, log_power: f64 },
    /// `ln(1/r)^{-power}`; decays to zero slower than any power of `r`.
    InverseLog { power: f64 },
    /// `r^{center + amplitude·sin(ln ln (1/r))}`; oscillating log exponent.
    OscillatingExponent { center: f64, amplitude: f64 },
    /// `1 / max(1, log₂ σ((r, r_max]))` for a jump measure σ of infinite
    /// total mass; the standard witness for `h_g = 0`.
    InverseShellCount { measure: RadialMeasure },
    /// The `d`-normalization of another form, evaluated by running infimum.
    Normalized { inner: Box<GaugeForm>, dim: u32 },
    Zero,
}

impl GaugeForm {
    /// A usable monotonicity window for the form, handed to validation.
    pub fn suggested_epsilon(&self) -> f64 {
        match self {
            GaugeForm::Power { .. } => 1.0,
            GaugeForm::PowerLog { s, log_power } => {
                if *log_power > 0.0 {
                    // g' ≥ 0 needs s·ln(1/r) ≥ log_power.
                    0.95 * (-log_power / s).exp()
                } else {
                    0.3
                }
            }
            GaugeForm::InverseLog { .. } => 0.3,
            GaugeForm::OscillatingExponent { .. } => 0.05,
            GaugeForm::InverseShellCount { .. } => 0.25,
            GaugeForm::Normalized { inner, .. } => inner.suggested_epsilon(),
            GaugeForm::Zero => 1.0,
        }
    }
}

/// A validated gauge function on `(0, epsilon]`.
#[derive(Debug, Clone)]
pub struct GaugeFunction {
    form: GaugeForm,
    dim: u32,
    epsilon: f64,
    /// Whether `r ↦ g(r)/r^dim` was nonincreasing on the validation grid.
    ratio_monotone: bool,
    /// Known limit of `log g(r)/log r`, when the caller has one.
    pub exponent_hint: Option<f64>,
    /// Dyadic table of `log₂ σ((2^{-k}, r_max])` for `InverseShellCount`.
    shell_table: Option<Arc<Vec<f64>>>,
    /// Suffix-minimum table backing a `Normalized` form; see
    /// [`NormalizedTable`].
    normalized_table: Option<Arc<NormalizedTable>>,
}

/// Precomputed running infimum for the `g_d` transform.
///
/// The infimum of `g(ρ)/ρ^d` is taken over the canonical geometric grid
/// `ρ_m = ε·2^{-m/64}` so that evaluations at different radii share one
/// sample set. `suffix_min[m]` is the minimum over grid points with index
/// `≥ m` (radii `≤ ρ_m`); evaluation combines it with the ratio at the query
/// radius itself. On radii aligned with the grid this makes the normalized
/// gauge exactly monotone, dominated by `g`, and idempotent.
#[derive(Debug)]
struct NormalizedTable {
    eps: f64,
    suffix_min: Vec<f64>,
}

impl NormalizedTable {
    const STEPS_PER_OCTAVE: f64 = 64.0;

    fn lookup(&self, r: f64) -> f64 {
        let m = (Self::STEPS_PER_OCTAVE * (self.eps / r).log2()).ceil();
        if m < 0.0 {
            self.suffix_min[0]
        } else {
            let m = (m as usize).min(self.suffix_min.len() - 1);
            self.suffix_min[m]
        }
    }
}

impl GaugeFunction {
    pub fn new(form: GaugeForm, dim: u32, epsilon: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("gauge dimension must be ≥ 1".into()));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::GaugeWindow(format!("epsilon {epsilon} outside (0, 1]")));
        }
        let shell_table = match &form {
            GaugeForm::InverseShellCount { measure } => Some(Arc::new(build_shell_table(measure)?)),
            _ => None,
        };
        let mut g = Self {
            form,
            dim,
            epsilon,
            ratio_monotone: false,
            exponent_hint: None,
            shell_table,
            normalized_table: None,
        };
        if matches!(g.form, GaugeForm::Zero) {
            g.ratio_monotone = true;
            return Ok(g);
        }
        g.validate()?;
        Ok(g)
    }

    /// Builds with the form's suggested window.
    pub fn auto(form: GaugeForm, dim: u32) -> Result<Self> {
        let eps = form.suggested_epsilon();
        Self::new(form, dim, eps)
    }

    /// `r^s` in ambient dimension `dim`.
    pub fn power(s: f64, dim: u32) -> Result<Self> {
        let mut g = Self::auto(GaugeForm::Power { s }, dim)?;
        g.exponent_hint = Some(s.min(1.0));
        Ok(g)
    }

    pub fn form(&self) -> &GaugeForm {
        &self.form
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// The validated window radius (the paper's ε_g when ratio-monotone).
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.form, GaugeForm::Zero)
    }

    /// Whether `g(r)/r^dim` was nonincreasing on the validation grid.
    pub fn ratio_monotone(&self) -> bool {
        self.ratio_monotone
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        if let (GaugeForm::Normalized { inner, dim }, Some(table)) =
            (&self.form, &self.normalized_table)
        {
            let d = *dim as i32;
            let endpoint = eval_form(inner, r, self.shell_table.as_deref()) / r.powi(d);
            return r.powi(d) * table.lookup(r).min(endpoint);
        }
        eval_form(&self.form, r, self.shell_table.as_deref())
    }

    fn validate(&mut self) -> Result<()> {
        // Geometric grid over (epsilon·2^{-32}, epsilon].
        let mut prev_g = f64::INFINITY;
        let mut prev_ratio = -f64::INFINITY;
        let mut ratio_ok = true;
        let mut g_at_eps = 0.0;
        for k in 0..VALIDATION_POINTS {
            let r = self.epsilon * 2.0_f64.powf(-(k as f64) / 128.0);
            let v = self.eval(r);
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::GaugeWindow(format!("g({r:.3e}) = {v:.3e} not positive finite")));
            }
            if k == 0 {
                g_at_eps = v;
            }
            // r decreases with k, so g must not increase and g/r^d must not
            // decrease along the scan.
            if v > prev_g * (1.0 + MONOTONE_TOL) {
                return Err(Error::GaugeWindow(format!(
                    "not nondecreasing near r = {r:.3e} (g = {v:.6e} > {prev_g:.6e})"
                )));
            }
            let ratio = v / r.powi(self.dim as i32);
            if ratio < prev_ratio * (1.0 - MONOTONE_TOL) {
                ratio_ok = false;
            }
            prev_g = v;
            prev_ratio = ratio;
        }
        // Semi-decision that g vanishes at 0: require visible decay across
        // the 32 octaves of the grid.
        if prev_g > 0.999 * g_at_eps {
            return Err(Error::GaugeWindow("no decay toward zero across validation grid".into()));
        }
        self.ratio_monotone = ratio_ok;
        Ok(())
    }

    /// The transform `g_d(r) = r^d inf_{ρ∈(0,r]} g(ρ)/ρ^d` in the gauge's own
    /// dimension.
    pub fn normalize_d(&self) -> GaugeFunction {
        self.normalize_to(self.dim)
    }

    /// `g_d` for an arbitrary target dimension (the analysis mostly wants
    /// `d = 1` regardless of the ambient dimension).
    ///
    /// Returns the zero gauge when the running infimum collapses: twenty
    /// consecutive grid halvings each shrinking it by a factor ≤ 0.9.
    pub fn normalize_to(&self, d: u32) -> GaugeFunction {
        if self.is_zero() {
            return self.with_dim(d);
        }
        if self.dim == d && self.ratio_monotone {
            // Already in the target class; the infimum sits at ρ = r.
            return self.clone();
        }
        if let GaugeForm::Power { s } = self.form {
            if s > d as f64 {
                return GaugeFunction {
                    form: GaugeForm::Zero,
                    dim: d,
                    epsilon: self.epsilon,
                    ratio_monotone: true,
                    exponent_hint: None,
                    shell_table: None,
                    normalized_table: None,
                };
            }
            return self.with_dim(d);
        }
        // Ratios on the canonical grid ρ_m = ε·2^{-m/64}, down to the bottom
        // of the f64 range so that deep classifier probes stay inside the
        // table. Underflowed samples contribute a neutral +∞.
        let octaves = 1074usize;
        let steps = octaves * 64;
        let ratios: Vec<f64> = (0..=steps)
            .map(|m| {
                let rho = self.epsilon * 2.0_f64.powf(-(m as f64) / 64.0);
                if rho <= 0.0 {
                    return f64::INFINITY;
                }
                let v = self.eval(rho);
                let denom = rho.powi(d as i32);
                if v <= 0.0 || denom <= 0.0 {
                    f64::INFINITY
                } else {
                    v / denom
                }
            })
            .collect();
        // Zero detection: twenty consecutive octaves each shrinking the
        // running infimum by a factor ≤ 0.9.
        let mut running = ratios[0];
        let mut consecutive = 0u32;
        for k in 1..=octaves {
            let octave_min =
                ratios[(k - 1) * 64 + 1..=k * 64].iter().cloned().fold(f64::INFINITY, f64::min);
            let next = running.min(octave_min);
            if next <= 0.9 * running {
                consecutive += 1;
                if consecutive >= 20 {
                    return GaugeFunction {
                        form: GaugeForm::Zero,
                        dim: d,
                        epsilon: self.epsilon,
                        ratio_monotone: true,
                        exponent_hint: None,
                        shell_table: None,
                        normalized_table: None,
                    };
                }
            } else {
                consecutive = 0;
            }
            running = next;
        }
        let mut suffix_min = ratios;
        for m in (0..suffix_min.len() - 1).rev() {
            suffix_min[m] = suffix_min[m].min(suffix_min[m + 1]);
        }
        GaugeFunction {
            form: GaugeForm::Normalized { inner: Box::new(self.form.clone()), dim: d },
            dim: d,
            epsilon: self.epsilon,
            ratio_monotone: true,
            exponent_hint: self.exponent_hint,
            shell_table: self.shell_table.clone(),
            normalized_table: Some(Arc::new(NormalizedTable { eps: self.epsilon, suffix_min })),
        }
    }

    fn with_dim(&self, d: u32) -> GaugeFunction {
        let mut g = self.clone();
        g.dim = d;
        g
    }
}

fn build_shell_table(measure: &RadialMeasure) -> Result<Vec<f64>> {
    if !measure.has_infinite_mass() {
        return Err(Error::InvalidParameter(
            "InverseShellCount gauge needs a measure of infinite total mass".into(),
        ));
    }
    // log₂ of the tail mass at dyadic radii; monotone by construction.
    let mut table = Vec::with_capacity(200);
    let mut running_max = 0.0_f64;
    for k in 0..200u32 {
        let tail = measure.mass_above(2.0_f64.powi(-(k as i32)))?;
        running_max = running_max.max(tail.log2());
        table.push(running_max.max(1.0));
    }
    Ok(table)
}

fn eval_form(form: &GaugeForm, r: f64, shell_table: Option<&Vec<f64>>) -> f64 {
    if r <= 0.0 {
        // Limit value g(0+) = 0; also covers radii that underflowed.
        return 0.0;
    }
    match form {
        GaugeForm::Power { s } => r.powf(*s),
        GaugeForm::PowerLog { s, log_power } => {
            let l = (1.0 / r).ln().max(0.0);
            r.powf(*s) * l.powf(*log_power)
        }
        GaugeForm::InverseLog { power } => (1.0 / r).ln().max(1.0).powf(-power),
        GaugeForm::OscillatingExponent { center, amplitude } => {
            let inner = (1.0 / r).ln().max(1.000001);
            r.powf(center + amplitude * inner.ln().sin())
        }
        GaugeForm::InverseShellCount { measure } => {
            let count = match shell_table {
                Some(table) => {
                    let k = (-r.log2()).ceil().clamp(0.0, (table.len() - 1) as f64) as usize;
                    table[k]
                }
                None => measure.mass_above(r).map(|m| m.log2().max(1.0)).unwrap_or(1.0),
            };
            count.recip()
        }
        GaugeForm::Normalized { inner, dim } => {
            let d = *dim as i32;
            let mut inf = f64::INFINITY;
            for k in 0..=INF_GRID_DEPTH {
                let rho = r * 2.0_f64.powi(-(k as i32));
                if rho <= 0.0 {
                    break;
                }
                inf = inf.min(eval_form(inner, rho, shell_table) / rho.powi(d));
            }
            r.powi(d) * inf
        }
        GaugeForm::Zero => 0.0,
    }
}

/// Critical exponent `h_g = inf{h > 0 | ∫_{0+} g₁(r^{1/h}) σ(dr) = ∞}`,
/// with `h_g = ∞` when `g₁ = 0`.
///
/// Exact for `g = Id^s` against a power law (`h = s/index`); everything else
/// goes through shell sums `Σ_j g₁(2^{-j/h}) c_j` and the shared classifier,
/// bisected over `h`. Inconclusive classifications surface as intervals.
pub fn critical_exponent_h_g(g: &GaugeFunction, m: &RadialMeasure) -> Result<ExponentEstimate> {
    let g1 = g.normalize_to(1);
    if g1.is_zero() {
        return Ok(ExponentEstimate::Infinite);
    }
    if let (GaugeForm::Power { s }, Some(alpha)) = (&g1.form, m.power_law_index()) {
        return Ok(ExponentEstimate::Point(s / alpha));
    }
    let j_max = series::DEFAULT_J_MAX;
    let masses: Vec<f64> = (0..=j_max).map(|j| m.shell_mass(j)).collect::<Result<_>>()?;
    // Probe floor 1/16 keeps 2^{-j/h} above the subnormal range for every
    // shell; divergence already at the floor is reported as h_g = 0.
    let outcome = series::find_threshold(0.0625, 64.0, true, |h| {
        classify_terms(|j| g1.eval(2.0_f64.powf(-(j as f64) / h)) * masses[j as usize], j_max)
    });
    Ok(match outcome {
        ThresholdOutcome::AllConverge => ExponentEstimate::Infinite,
        ThresholdOutcome::AllDiverge => ExponentEstimate::Point(0.0),
        ThresholdOutcome::Estimate(e) => e,
    })
}

/// Log-scaling exponent of a gauge, or evidence that none exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GaugeLogExponent {
    /// `lim log g₁(r)/log r` exists (estimated); always clipped to `[0, 1]`.
    Value(f64),
    /// liminf and limsup estimates disagree.
    NotInClassD { liminf: f64, limsup: f64 },
}

/// Estimates `lim_{r→0} log g₁(r)/log r` on the dyadic grid `r = 2^{-j}`,
/// `j = 16..48`.
///
/// Raw ratios at these depths still carry `O(log j / j)` transients from any
/// slowly varying factor, so the limit is extrapolated from local dyadic
/// slopes fitted against `1/j`; the raw ratio envelope is what gets reported
/// when the slopes oscillate instead of settling.
pub fn gauge_log_exponent(g: &GaugeFunction) -> Result<GaugeLogExponent> {
    const J_LO: u32 = 16;
    const J_HI: u32 = 48;
    let g1 = g.normalize_to(1);
    if g1.is_zero() {
        return Err(Error::InvalidParameter("zero gauge has no log exponent".into()));
    }
    let log_g: Vec<f64> =
        (J_LO..=J_HI).map(|j| g1.eval(2.0_f64.powi(-(j as i32))).ln()).collect();
    let ratios: Vec<f64> = log_g
        .iter()
        .enumerate()
        .map(|(i, lg)| lg / (-(((J_LO + i as u32) as f64) * std::f64::consts::LN_2)))
        .collect();
    let slopes: Vec<f64> =
        log_g.windows(2).map(|w| (w[1] - w[0]) / (-std::f64::consts::LN_2)).collect();

    let envelope = || {
        let liminf = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let limsup = ratios.iter().cloned().fold(-f64::INFINITY, f64::max);
        GaugeLogExponent::NotInClassD { liminf, limsup }
    };

    let half = slopes.len() / 2;
    let recent = &slopes[half..];
    let spread = recent.iter().cloned().fold(-f64::INFINITY, f64::max)
        - recent.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread > 0.05 {
        return Ok(envelope());
    }
    // Fit slope_j = γ + a/j and read off γ as j → ∞.
    let fit = |lo: usize, hi: usize| {
        let xs: Vec<f64> = (lo..hi).map(|i| 1.0 / (J_LO + i as u32) as f64).collect();
        let ys: Vec<f64> = slopes[lo..hi].to_vec();
        let (_, intercept, _) = series::linear_fit(&xs, &ys);
        intercept
    };
    let gamma_first = fit(0, half);
    let gamma_last = fit(half, slopes.len());
    if (gamma_first - gamma_last).abs() > 0.02 {
        return Ok(envelope());
    }
    Ok(GaugeLogExponent::Value(fit(0, slopes.len()).clamp(0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::RadialMeasure;

    fn grid(eps: f64) -> impl Iterator<Item = f64> {
        (0..512).map(move |k| eps * 2.0_f64.powf(-(k as f64) / 16.0))
    }

    #[test]
    fn power_gauge_normalization_is_identity_below_dim() {
        let g = GaugeFunction::power(0.6, 1).unwrap();
        let gd = g.normalize_d();
        assert!(!gd.is_zero());
        for r in grid(g.epsilon()) {
            assert!((gd.eval(r) - g.eval(r)).abs() <= 1e-12 * g.eval(r));
        }
    }

    #[test]
    fn power_gauge_above_dim_collapses_to_zero() {
        let g = GaugeFunction::power(2.0, 1).unwrap();
        assert!(g.normalize_to(1).is_zero());
    }

    #[test]
    fn sqrt_log_gauge_is_its_own_normalization() {
        // g(r) = √r·ln(1/r): g(r)/r = r^{-1/2} ln(1/r) is decreasing below
        // e^{-2}, so g ∈ 𝔇₁ there and g₁ = g.
        let g = GaugeFunction::auto(GaugeForm::PowerLog { s: 0.5, log_power: 1.0 }, 1).unwrap();
        assert!(g.epsilon() <= (-2.0_f64).exp());
        assert!(g.ratio_monotone());
        let g1 = g.normalize_to(1);
        for r in grid(g.epsilon()) {
            let (a, b) = (g.eval(r), g1.eval(r));
            assert!((a - b).abs() <= 1e-9 * a, "r={r} g={a} g1={b}");
        }
    }

    #[test]
    fn normalization_invariants_on_fixtures() {
        let fixtures: Vec<GaugeFunction> = vec![
            GaugeFunction::power(0.3, 1).unwrap(),
            GaugeFunction::power(0.7, 1).unwrap(),
            GaugeFunction::power(1.0, 1).unwrap(),
            GaugeFunction::auto(GaugeForm::PowerLog { s: 0.5, log_power: 1.0 }, 1).unwrap(),
            GaugeFunction::auto(GaugeForm::PowerLog { s: 0.8, log_power: -1.0 }, 1).unwrap(),
            GaugeFunction::auto(GaugeForm::InverseLog { power: 1.0 }, 1).unwrap(),
            GaugeFunction::auto(GaugeForm::InverseLog { power: 2.0 }, 1).unwrap(),
            GaugeFunction::auto(
                GaugeForm::OscillatingExponent { center: 0.5, amplitude: 0.3 },
                1,
            )
            .unwrap(),
            GaugeFunction::auto(GaugeForm::PowerLog { s: 1.0, log_power: 2.0 }, 1).unwrap(),
            GaugeFunction::power(0.5, 2).unwrap(),
        ];
        for g in &fixtures {
            let gd = g.normalize_d();
            if gd.is_zero() {
                continue;
            }
            let mut prev_ratio = 0.0_f64;
            for r in grid(g.epsilon()) {
                let (orig, normed) = (g.eval(r), gd.eval(r));
                assert!(normed <= orig * (1.0 + 1e-9), "g_d ≤ g violated at r={r}");
                // grid() descends in r, so the ratio must not decrease.
                let ratio = normed / r.powi(g.dim() as i32);
                assert!(ratio >= prev_ratio * (1.0 - 1e-9), "ratio not monotone at r={r}");
                prev_ratio = ratio;
                // Idempotence.
                let twice = gd.normalize_d().eval(r);
                assert!((twice - normed).abs() <= 1e-9 * normed.max(1e-300));
            }
        }
    }

    #[test]
    fn h_g_power_law_closed_form() {
        let m = RadialMeasure::power_law(1.0, 1.2).unwrap();
        let g = GaugeFunction::power(0.6, 1).unwrap();
        assert_eq!(critical_exponent_h_g(&g, &m).unwrap(), ExponentEstimate::Point(0.5));
    }

    #[test]
    fn h_g_zero_normalization_gives_infinity() {
        let m = RadialMeasure::power_law(1.0, 1.2).unwrap();
        let g = GaugeFunction::power(2.0, 1).unwrap();
        assert_eq!(critical_exponent_h_g(&g, &m).unwrap(), ExponentEstimate::Infinite);
    }

    #[test]
    fn h_g_atom_series_polynomial_gauges_never_diverge() {
        // For σ = Σ δ_{1/k}/k the integral Σ g(k^{-1/h})/k stays finite for
        // every polynomially decaying gauge, so h_g = ∞.
        let m = RadialMeasure::atom_series(1.0, 1.0).unwrap();
        for s in [0.3, 0.7, 1.0] {
            let g = GaugeFunction::power(s, 1).unwrap();
            assert_eq!(
                critical_exponent_h_g(&g, &m).unwrap(),
                ExponentEstimate::Infinite,
                "s = {s}"
            );
        }
    }

    #[test]
    fn h_g_zero_witness_for_infinite_mass() {
        // g(r) = 1/max(1, log₂ σ((r, 1])) forces divergence at every h.
        for m in [
            RadialMeasure::power_law(1.0, 0.6).unwrap(),
            RadialMeasure::power_law(1.0, 1.2).unwrap(),
            RadialMeasure::density(crate::measure::NamedDensity::ShellGrowth {
                rate: 1.0,
                poly: 0.0,
            })
            .unwrap(),
        ] {
            let g =
                GaugeFunction::auto(GaugeForm::InverseShellCount { measure: m.clone() }, 1).unwrap();
            let h = critical_exponent_h_g(&g, &m).unwrap();
            assert_eq!(h, ExponentEstimate::Point(0.0), "measure {m:?}");
        }
    }

    #[test]
    fn inverse_shell_count_requires_infinite_mass() {
        let m = RadialMeasure::finite(vec![crate::measure::Atom { radius: 0.5, mass: 1.0 }]).unwrap();
        assert!(GaugeFunction::auto(GaugeForm::InverseShellCount { measure: m }, 1).is_err());
    }

    #[test]
    fn log_exponent_of_pure_power() {
        let g = GaugeFunction::power(0.7, 1).unwrap();
        match gauge_log_exponent(&g).unwrap() {
            GaugeLogExponent::Value(v) => assert!((v - 0.7).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn log_exponent_sees_through_log_corrections() {
        // v(r) = r/ln(1/r) has γ_v = 1.
        let g = GaugeFunction::auto(GaugeForm::PowerLog { s: 1.0, log_power: -1.0 }, 1).unwrap();
        match gauge_log_exponent(&g).unwrap() {
            GaugeLogExponent::Value(v) => assert!((v - 1.0).abs() <= 0.02, "γ = {v}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn log_exponent_rejects_oscillating_gauge() {
        let g = GaugeFunction::auto(
            GaugeForm::OscillatingExponent { center: 0.5, amplitude: 0.3 },
            1,
        )
        .unwrap();
        match gauge_log_exponent(&g).unwrap() {
            GaugeLogExponent::NotInClassD { liminf, limsup } => {
                assert!(liminf < limsup);
                assert!(liminf < 0.55 && limsup > 0.45, "({liminf}, {limsup})");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_window_is_rejected() {
        // √r·ln(1/r) is not monotone on (0, 0.9].
        let res = GaugeFunction::new(GaugeForm::PowerLog { s: 0.5, log_power: 1.0 }, 1, 0.9);
        assert!(res.is_err());
    }
}
