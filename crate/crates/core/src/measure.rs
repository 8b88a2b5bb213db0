//! Radial jump-size measures.
//!
//! A [`RadialMeasure`] is the image of a Lévy measure under the norm map:
//! a measure `σ` on `(0, r_max]` with `∫ (1 ∧ r²) σ(dr) < ∞`. Everything the
//! analysis needs from `σ` factors through a handful of queries: dyadic shell
//! masses `c_j = σ((2^{-j-1}, 2^{-j}])`, tail masses, integrals of monotone
//! test functions, and per-shell samplers for simulation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{self, classify_terms, Convergence, ExponentEstimate, ThresholdOutcome};

/// Atom of a finite measure: mass `mass` at radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub radius: f64,
    pub mass: f64,
}

/// Named built-in densities for the `Density` variant. No runtime code
/// loading: a config can only refer to these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "density", rename_all = "snake_case")]
pub enum NamedDensity {
    /// `f(r) = r^{-1-index} · ln(e/r)^{log_power}` on `(0, r_max]`.
    PowerLog { index: f64, log_power: f64 },
    /// Piecewise-constant density with shell masses `c_j = 2^{rate·j}/j^poly`
    /// for `j ≥ 1` and `c_0 = 0`.
    ShellGrowth { rate: f64, poly: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Variant {
    PowerLaw { intensity: f64, index: f64 },
    /// Atoms `r_k = k^{-radius_exponent}` with weights `w_k = k^{-weight_exponent}`.
    AtomSeries { radius_exponent: f64, weight_exponent: f64 },
    Finite { atoms: Vec<Atom> },
    Density(NamedDensity),
    Sum(Vec<RadialMeasure>),
}

/// Radial jump-size measure `σ` truncated to `(0, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialMeasure {
    variant: Variant,
    r_max: f64,
}

/// Bounds `(2^{-j-1}, 2^{-j}]` of dyadic shell `j`.
pub fn shell_bounds(j: u32) -> (f64, f64) {
    (2.0_f64.powi(-(j as i32) - 1), 2.0_f64.powi(-(j as i32)))
}

impl RadialMeasure {
    /// `σ(dr) = intensity · r^{-1-index} dr` on `(0, 1]`.
    pub fn power_law(intensity: f64, index: f64) -> Result<Self> {
        Self::power_law_truncated(intensity, index, 1.0)
    }

    pub fn power_law_truncated(intensity: f64, index: f64, r_max: f64) -> Result<Self> {
        if !(intensity > 0.0) {
            return Err(Error::InvalidParameter("power law intensity must be > 0".into()));
        }
        if !(0.0 < index && index < 2.0) {
            return Err(Error::InvalidParameter("power law index must lie in (0, 2)".into()));
        }
        check_r_max(r_max)?;
        Ok(Self { variant: Variant::PowerLaw { intensity, index }, r_max })
    }

    /// Atom series `Σ_k w_k δ_{r_k}` with `r_k = k^{-p}`, `w_k = k^{-q}`.
    pub fn atom_series(radius_exponent: f64, weight_exponent: f64) -> Result<Self> {
        let (p, q) = (radius_exponent, weight_exponent);
        if !(p > 0.0) {
            return Err(Error::InvalidParameter("radius exponent must be > 0".into()));
        }
        // ∫ (1∧r²) σ = Σ k^{-2p-q} over small atoms; needs 2p + q > 1.
        if 2.0 * p + q <= 1.0 {
            return Err(Error::InvalidParameter(
                "atom series violates ∫ (1∧r²) σ(dr) < ∞ (need 2p + q > 1)".into(),
            ));
        }
        Ok(Self {
            variant: Variant::AtomSeries { radius_exponent: p, weight_exponent: q },
            r_max: 1.0,
        })
    }

    /// Finite measure given by an explicit atom list. An empty list is the
    /// zero measure (a model without jumps).
    pub fn finite(atoms: Vec<Atom>) -> Result<Self> {
        let r_max = 1.0_f64;
        for a in &atoms {
            if !(a.radius > 0.0 && a.radius <= r_max) {
                return Err(Error::InvalidParameter(format!(
                    "atom radius {} outside (0, {r_max}]",
                    a.radius
                )));
            }
            if !(a.mass > 0.0) {
                return Err(Error::InvalidParameter("atom masses must be > 0".into()));
            }
        }
        Ok(Self { variant: Variant::Finite { atoms }, r_max })
    }

    pub fn density(d: NamedDensity) -> Result<Self> {
        match d {
            NamedDensity::PowerLog { index, .. } => {
                if !(0.0 < index && index < 2.0) {
                    return Err(Error::InvalidParameter("power-log index must lie in (0, 2)".into()));
                }
            }
            NamedDensity::ShellGrowth { rate, poly } => {
                if rate > 2.0 || (rate == 2.0 && poly <= 1.0) {
                    return Err(Error::InvalidParameter(
                        "shell growth violates Σ 2^{-2j} c_j < ∞".into(),
                    ));
                }
            }
        }
        let r_max = match d {
            NamedDensity::ShellGrowth { .. } => 0.5,
            _ => 1.0,
        };
        Ok(Self { variant: Variant::Density(d), r_max })
    }

    pub fn sum(parts: Vec<RadialMeasure>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidParameter("sum needs at least one part".into()));
        }
        let r_max = parts.iter().map(|p| p.r_max).fold(0.0, f64::max);
        Ok(Self { variant: Variant::Sum(parts), r_max })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Shell mass `c_j = σ((2^{-j-1}, 2^{-j}] ∩ (0, r_max])`.
    pub fn shell_mass(&self, j: u32) -> Result<f64> {
        let (lo, hi) = shell_bounds(j);
        self.mass(lo, hi.min(self.r_max))
    }

    /// Tail mass `σ((eps, r_max])`.
    pub fn mass_above(&self, eps: f64) -> Result<f64> {
        self.mass(eps, self.r_max)
    }

    /// Mass of `(lo, hi] ∩ (0, r_max]`.
    fn mass(&self, lo: f64, hi: f64) -> Result<f64> {
        let hi = hi.min(self.r_max);
        if hi <= lo {
            return Ok(0.0);
        }
        match &self.variant {
            Variant::PowerLaw { intensity, index } => {
                Ok(intensity / index * (lo.powf(-index) - hi.powf(-index)))
            }
            Variant::AtomSeries { radius_exponent: p, weight_exponent: q } => {
                match atom_range(*p, lo, hi) {
                    Some((k1, k2)) => Ok(power_sum(*q, k1, k2)),
                    None => Ok(0.0),
                }
            }
            Variant::Finite { atoms } => Ok(atoms
                .iter()
                .filter(|a| a.radius > lo && a.radius <= hi)
                .map(|a| a.mass)
                .sum()),
            Variant::Density(NamedDensity::PowerLog { index, log_power }) => {
                let (index, log_power) = (*index, *log_power);
                adaptive_simpson(
                    &|r: f64| r.powf(-1.0 - index) * (1.0 - r.ln()).powf(log_power),
                    lo,
                    hi,
                )
                .map_err(|detail| Error::Quadrature { shell: lo.log2().floor() as i64, detail })
            }
            Variant::Density(NamedDensity::ShellGrowth { rate, poly }) => {
                // Density is constant on each shell; integrate the overlap.
                let mut total = 0.0;
                let j_lo = (-hi.log2()).floor().max(0.0) as u32;
                let j_hi = (-lo.log2()).ceil() as u32;
                for j in j_lo..=j_hi.min(1074) {
                    let c = shell_growth_mass(*rate, *poly, j);
                    if c == 0.0 {
                        continue;
                    }
                    let (slo, shi) = shell_bounds(j);
                    let overlap = (hi.min(shi) - lo.max(slo)).max(0.0);
                    total += c * overlap / (shi - slo);
                }
                Ok(total)
            }
            Variant::Sum(parts) => parts.iter().map(|p| p.mass(lo, hi)).sum(),
        }
    }

    /// `∫_{(lo, hi]} φ(r) σ(dr)`; `φ` is assumed continuous.
    pub fn integral(&self, phi: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        let hi = hi.min(self.r_max);
        if hi <= lo {
            return Ok(0.0);
        }
        match &self.variant {
            Variant::PowerLaw { intensity, index } => {
                let (c, a) = (*intensity, *index);
                adaptive_simpson(&|r: f64| phi(r) * c * r.powf(-1.0 - a), lo, hi)
                    .map_err(|detail| Error::Quadrature { shell: lo.log2().floor() as i64, detail })
            }
            Variant::AtomSeries { radius_exponent: p, weight_exponent: q } => {
                match atom_range(*p, lo, hi) {
                    Some((k1, k2)) => weighted_atom_sum(*p, *q, k1, k2, phi),
                    None => Ok(0.0),
                }
            }
            Variant::Finite { atoms } => Ok(atoms
                .iter()
                .filter(|a| a.radius > lo && a.radius <= hi)
                .map(|a| a.mass * phi(a.radius))
                .sum()),
            Variant::Density(NamedDensity::PowerLog { index, log_power }) => {
                let (index, log_power) = (*index, *log_power);
                adaptive_simpson(
                    &|r: f64| phi(r) * r.powf(-1.0 - index) * (1.0 - r.ln()).powf(log_power),
                    lo,
                    hi,
                )
                .map_err(|detail| Error::Quadrature { shell: lo.log2().floor() as i64, detail })
            }
            Variant::Density(NamedDensity::ShellGrowth { rate, poly }) => {
                let mut total = 0.0;
                let j_lo = (-hi.log2()).floor().max(0.0) as u32;
                let j_hi = (-lo.log2()).ceil() as u32;
                for j in j_lo..=j_hi.min(1074) {
                    let c = shell_growth_mass(*rate, *poly, j);
                    if c == 0.0 {
                        continue;
                    }
                    let (slo, shi) = shell_bounds(j);
                    let (a, b) = (lo.max(slo), hi.min(shi));
                    if b <= a {
                        continue;
                    }
                    let dens = c / (shi - slo);
                    total += adaptive_simpson(&|r: f64| phi(r) * dens, a, b).map_err(|detail| {
                        Error::Quadrature { shell: j as i64, detail }
                    })?;
                }
                Ok(total)
            }
            Variant::Sum(parts) => {
                let mut total = 0.0;
                for p in parts {
                    total += p.integral(phi, lo, hi)?;
                }
                Ok(total)
            }
        }
    }

    /// Total mass when finite, `None` when the measure has infinite mass.
    pub fn total_mass(&self) -> Option<f64> {
        match &self.variant {
            Variant::PowerLaw { .. } => None,
            Variant::AtomSeries { weight_exponent: q, .. } => {
                // Σ k^{-q} converges iff q > 1; close with the analytic tail.
                const N: u64 = 50_000_000;
                (*q > 1.0).then(|| power_sum(*q, 1, N) + (N as f64).powf(1.0 - q) / (q - 1.0))
            }
            Variant::Finite { atoms } => Some(atoms.iter().map(|a| a.mass).sum()),
            Variant::Density(NamedDensity::PowerLog { .. }) => None,
            Variant::Density(NamedDensity::ShellGrowth { rate, poly }) => {
                if *rate > 0.0 || (*rate == 0.0 && *poly <= 1.0) {
                    None
                } else {
                    Some((1..=10_000).map(|j| shell_growth_mass(*rate, *poly, j)).sum())
                }
            }
            Variant::Sum(parts) => {
                let mut total = 0.0;
                for p in parts {
                    total += p.total_mass()?;
                }
                Some(total)
            }
        }
    }

    pub fn has_infinite_mass(&self) -> bool {
        self.total_mass().is_none()
    }

    /// The power-law index when the measure is a pure power law.
    pub fn power_law_index(&self) -> Option<f64> {
        match &self.variant {
            Variant::PowerLaw { index, .. } => Some(*index),
            _ => None,
        }
    }

    /// Blumenthal–Getoor index `β = inf{γ ≥ 0 | ∫₀¹ r^γ σ(dr) < ∞}`.
    ///
    /// Closed forms cover the parametric families; the density variants fall
    /// back to bisection on γ with the shared divergence classifier applied to
    /// the shell sums `Σ_j 2^{-γ j} c_j`. An `Inconclusive` classification at
    /// the bisection boundary yields an interval.
    pub fn bg_index(&self) -> Result<ExponentEstimate> {
        match &self.variant {
            Variant::PowerLaw { index, .. } => Ok(ExponentEstimate::Point(*index)),
            Variant::AtomSeries { radius_exponent: p, weight_exponent: q } => {
                // Σ k^{-pγ-q} < ∞ iff pγ + q > 1.
                Ok(ExponentEstimate::Point(((1.0 - q) / p).clamp(0.0, 2.0)))
            }
            Variant::Finite { .. } => Ok(ExponentEstimate::Point(0.0)),
            Variant::Density(_) => {
                let masses: Vec<f64> =
                    (0..=series::DEFAULT_J_MAX).map(|j| self.shell_mass(j)).collect::<Result<_>>()?;
                let outcome = series::find_threshold(1e-3, 2.0, false, |gamma| {
                    classify_terms(
                        |j| 2.0_f64.powf(-gamma * j as f64) * masses[j as usize],
                        series::DEFAULT_J_MAX,
                    )
                });
                Ok(match outcome {
                    ThresholdOutcome::AllConverge => ExponentEstimate::Point(0.0),
                    ThresholdOutcome::AllDiverge => ExponentEstimate::Point(2.0),
                    ThresholdOutcome::Estimate(e) => e,
                })
            }
            Variant::Sum(parts) => {
                let mut acc = ExponentEstimate::Point(0.0);
                for p in parts {
                    acc = max_estimate(acc, p.bg_index()?);
                }
                Ok(acc)
            }
        }
    }

    /// Condition `Σ_j 2^{-j} √(c_j log(1 + c_j)) < ∞`.
    ///
    /// `Converges` means the condition holds, `Diverges` that it fails.
    /// Analytic fast paths: any power law (index < 2 by construction) and any
    /// finite atom list satisfy the condition outright.
    pub fn jaffard_condition(&self, j_max: u32) -> Result<Convergence> {
        if j_max < 8 {
            return Err(Error::InvalidParameter("jaffard_condition needs j_max ≥ 8".into()));
        }
        if self.jaffard_fast_path() {
            return Ok(Convergence::Converges);
        }
        let masses: Vec<f64> = (0..=j_max).map(|j| self.shell_mass(j)).collect::<Result<_>>()?;
        Ok(classify_terms(
            |j| {
                let c = masses[j as usize];
                2.0_f64.powi(-(j as i32)) * (c * c.ln_1p()).sqrt()
            },
            j_max,
        ))
    }

    fn jaffard_fast_path(&self) -> bool {
        match &self.variant {
            Variant::PowerLaw { .. } | Variant::Finite { .. } => true,
            Variant::Sum(parts) => parts.iter().all(|p| p.jaffard_fast_path()),
            _ => false,
        }
    }

    /// Sampler for the normalized restriction of `σ` to shell `j`, or `None`
    /// when the shell carries no mass.
    pub fn shell_sampler(&self, j: u32) -> Result<Option<ShellSampler>> {
        let (lo, hi) = shell_bounds(j);
        let hi = hi.min(self.r_max);
        if hi <= lo {
            return Ok(None);
        }
        match &self.variant {
            Variant::PowerLaw { index, .. } => {
                let a_neg = lo.powf(-index);
                let span = a_neg - hi.powf(-index);
                Ok(Some(ShellSampler::PowerLawShell { index: *index, a_neg, span }))
            }
            Variant::AtomSeries { radius_exponent: p, weight_exponent: q } => {
                let Some((k1, k2)) = atom_range(*p, lo, hi) else {
                    return Ok(None);
                };
                let count = k2 - k1 + 1;
                if count <= 200_000 {
                    let mut radii = Vec::with_capacity(count as usize);
                    let mut cum = Vec::with_capacity(count as usize);
                    let mut acc = 0.0;
                    for k in k1..=k2 {
                        acc += (k as f64).powf(-q);
                        radii.push((k as f64).powf(-p));
                        cum.push(acc);
                    }
                    Ok(Some(ShellSampler::AtomTable { radii, cum, total: acc }))
                } else {
                    let total = power_sum(*q, k1, k2);
                    Ok(Some(ShellSampler::AtomBisect { p: *p, q: *q, k1, k2, total }))
                }
            }
            Variant::Finite { atoms } => {
                let selected: Vec<&Atom> =
                    atoms.iter().filter(|a| a.radius > lo && a.radius <= hi).collect();
                if selected.is_empty() {
                    return Ok(None);
                }
                let mut radii = Vec::with_capacity(selected.len());
                let mut cum = Vec::with_capacity(selected.len());
                let mut acc = 0.0;
                for a in selected {
                    acc += a.mass;
                    radii.push(a.radius);
                    cum.push(acc);
                }
                Ok(Some(ShellSampler::AtomTable { radii, cum, total: acc }))
            }
            Variant::Density(NamedDensity::PowerLog { index, log_power }) => {
                let ell = |r: f64| (1.0 - r.ln()).powf(*log_power);
                let bound = ell(lo).max(ell(hi));
                let a_neg = lo.powf(-index);
                let span = a_neg - hi.powf(-index);
                Ok(Some(ShellSampler::RejectPowerLog {
                    index: *index,
                    log_power: *log_power,
                    proposal: Box::new(ShellSampler::PowerLawShell { index: *index, a_neg, span }),
                    bound,
                }))
            }
            Variant::Density(NamedDensity::ShellGrowth { rate, poly }) => {
                if shell_growth_mass(*rate, *poly, j) == 0.0 {
                    return Ok(None);
                }
                Ok(Some(ShellSampler::UniformShell { lo, hi }))
            }
            Variant::Sum(parts) => {
                let mut arms = Vec::new();
                let mut acc = 0.0;
                for p in parts {
                    let mass = p.shell_mass(j)?;
                    if mass > 0.0 {
                        if let Some(s) = p.shell_sampler(j)? {
                            acc += mass;
                            arms.push((acc, s));
                        }
                    }
                }
                if arms.is_empty() {
                    Ok(None)
                } else {
                    Ok(Some(ShellSampler::Mixture { arms, total: acc }))
                }
            }
        }
    }
}

fn check_r_max(r_max: f64) -> Result<()> {
    if !(r_max > 0.0 && r_max <= 1.0) {
        return Err(Error::InvalidParameter("r_max must lie in (0, 1]".into()));
    }
    Ok(())
}

fn shell_growth_mass(rate: f64, poly: f64, j: u32) -> f64 {
    if j == 0 {
        return 0.0;
    }
    2.0_f64.powf(rate * j as f64) / (j as f64).powf(poly)
}

fn max_estimate(a: ExponentEstimate, b: ExponentEstimate) -> ExponentEstimate {
    use ExponentEstimate::*;
    match (a, b) {
        (Infinite, _) | (_, Infinite) => Infinite,
        (Point(x), Point(y)) => Point(x.max(y)),
        (Point(x), Interval(lo, hi)) | (Interval(lo, hi), Point(x)) => {
            if x >= hi {
                Point(x)
            } else {
                Interval(lo.max(x), hi)
            }
        }
        (Interval(a0, a1), Interval(b0, b1)) => Interval(a0.max(b0), a1.max(b1)),
    }
}

/// `Σ_{k=k1}^{k2} k^{-q}`, exact for short ranges and Euler–Maclaurin beyond.
///
/// Long ranges sum the first 200k terms exactly and close with the
/// Euler–Maclaurin tail, whose relative error is `O(q²/k³)` at the split.
pub(crate) fn power_sum(q: f64, k1: u64, k2: u64) -> f64 {
    if k2 < k1 {
        return 0.0;
    }
    let count = k2 - k1 + 1;
    if count <= 200_000 {
        return (k1..=k2).map(|k| (k as f64).powf(-q)).sum();
    }
    let split = k1 + 200_000;
    let head: f64 = (k1..split).map(|k| (k as f64).powf(-q)).sum();
    let (a, b) = (split as f64, k2 as f64);
    let integral = if (q - 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (a.powf(1.0 - q) - b.powf(1.0 - q)) / (q - 1.0)
    };
    head + integral + 0.5 * (a.powf(-q) + b.powf(-q))
        + q / 12.0 * (a.powf(-q - 1.0) - b.powf(-q - 1.0))
}

fn weighted_atom_sum(p: f64, q: f64, k1: u64, k2: u64, phi: &dyn Fn(f64) -> f64) -> Result<f64> {
    let count = k2 - k1 + 1;
    if count <= 2_000_000 {
        Ok((k1..=k2).map(|k| phi((k as f64).powf(-p)) * (k as f64).powf(-q)).sum())
    } else {
        // φ(k^{-p}) k^{-q} integrated in k, with trapezoid endpoint correction.
        let f = |k: f64| phi(k.powf(-p)) * k.powf(-q);
        let integral = adaptive_simpson(&f, k1 as f64, k2 as f64)
            .map_err(|detail| Error::Quadrature { shell: -1, detail })?;
        Ok(integral + 0.5 * (f(k1 as f64) + f(k2 as f64)))
    }
}

/// Index range `[k1, k2]` of atoms `r_k = k^{-p}` lying in `(lo, hi]`.
fn atom_range(p: f64, lo: f64, hi: f64) -> Option<(u64, u64)> {
    let r_of = |k: u64| (k as f64).powf(-p);
    // Smallest k with r_k ≤ hi.
    let mut k1 = hi.powf(-1.0 / p).ceil().max(1.0) as u64;
    while k1 > 1 && r_of(k1 - 1) <= hi {
        k1 -= 1;
    }
    while r_of(k1) > hi {
        k1 += 1;
    }
    // Largest k with r_k > lo.
    let mut k2 = lo.powf(-1.0 / p).ceil() as u64;
    while r_of(k2 + 1) > lo {
        k2 += 1;
    }
    while k2 >= k1 && r_of(k2) <= lo {
        k2 -= 1;
    }
    (k2 >= k1).then_some((k1, k2))
}

/// Draws radii from `σ` restricted to one dyadic shell.
#[derive(Debug, Clone)]
pub enum ShellSampler {
    PowerLawShell { index: f64, a_neg: f64, span: f64 },
    AtomTable { radii: Vec<f64>, cum: Vec<f64>, total: f64 },
    AtomBisect { p: f64, q: f64, k1: u64, k2: u64, total: f64 },
    UniformShell { lo: f64, hi: f64 },
    RejectPowerLog { index: f64, log_power: f64, proposal: Box<ShellSampler>, bound: f64 },
    Mixture { arms: Vec<(f64, ShellSampler)>, total: f64 },
}

impl ShellSampler {
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match self {
            ShellSampler::PowerLawShell { index, a_neg, span } => {
                let u: f64 = rng.random();
                (a_neg - u * span).powf(-1.0 / index)
            }
            ShellSampler::AtomTable { radii, cum, total } => {
                let target = rng.random::<f64>() * total;
                let idx = cum.partition_point(|&c| c < target).min(radii.len() - 1);
                radii[idx]
            }
            ShellSampler::AtomBisect { p, q, k1, k2, total } => {
                let target = rng.random::<f64>() * total;
                let (mut lo, mut hi) = (*k1, *k2);
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if power_sum(*q, *k1, mid) < target {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                (lo as f64).powf(-p)
            }
            ShellSampler::UniformShell { lo, hi } => {
                let u: f64 = rng.random();
                lo + u * (hi - lo)
            }
            ShellSampler::RejectPowerLog { log_power, proposal, bound, .. } => loop {
                let r = proposal.sample(rng);
                let accept = (1.0 - r.ln()).powf(*log_power) / bound;
                if rng.random::<f64>() <= accept {
                    return r;
                }
            },
            ShellSampler::Mixture { arms, total } => {
                let target = rng.random::<f64>() * total;
                for (cum, sampler) in arms {
                    if target <= *cum {
                        return sampler.sample(rng);
                    }
                }
                arms.last().unwrap().1.sample(rng)
            }
        }
    }
}

/// Adaptive Simpson quadrature with Richardson control.
pub(crate) fn adaptive_simpson(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
) -> std::result::Result<f64, String> {
    if !(b > a) {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(1e-300);
    let mut evals = 0usize;
    let v = simpson_rec(f, a, b, fa, fm, fb, whole, 1e-10 * scale, 48, &mut evals)?;
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> std::result::Result<f64, String> {
    *evals += 2;
    if *evals > 4_000_000 {
        return Err("quadrature evaluation budget exhausted".into());
    }
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || (b - a) < 1e-15 * (a.abs() + b.abs()) {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(format!("no convergence on [{a}, {b}]"));
    }
    let lv = simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals)?;
    let rv = simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals)?;
    Ok(lv + rv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    /// Independent trapezoid oracle on a fine fixed grid.
    fn quad_oracle(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let n = 400_000;
        let h = (b - a) / n as f64;
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + i as f64 * h);
        }
        s * h
    }

    #[test]
    fn power_law_shell_mass_matches_quadrature() {
        // ∫_{1/2}^1 r^{-2} dr = 1.
        let m = RadialMeasure::power_law(1.0, 1.0).unwrap();
        let c0 = m.shell_mass(0).unwrap();
        assert!((c0 - 1.0).abs() < 1e-12);
        let oracle = quad_oracle(|r| r.powf(-2.0), 0.5, 1.0);
        assert!((c0 - oracle).abs() < 1e-8, "c0={c0} oracle={oracle}");
    }

    #[test]
    fn finite_atom_shell_location() {
        // Atom at 1/2 sits in shell (1/4, 1/2], i.e. j = 1, under the
        // half-open shell convention c_j = σ((2^{-j-1}, 2^{-j}]).
        let m = RadialMeasure::finite(vec![Atom { radius: 0.5, mass: 3.0 }]).unwrap();
        assert_eq!(m.shell_mass(0).unwrap(), 0.0);
        assert_eq!(m.shell_mass(1).unwrap(), 3.0);
        assert_eq!(m.shell_mass(2).unwrap(), 0.0);
    }

    #[test]
    fn atom_series_shell_enumeration() {
        // Shell j=1 of r_k = 1/k holds k ∈ {2, 3}: mass 1/2 + 1/3.
        let m = RadialMeasure::atom_series(1.0, 1.0).unwrap();
        let c1 = m.shell_mass(1).unwrap();
        // Enumeration oracle.
        let direct: f64 = (1..1000u64)
            .map(|k| (k as f64).recip())
            .filter(|r| *r > 0.25 && *r <= 0.5)
            .sum();
        assert!((c1 - (0.5 + 1.0 / 3.0)).abs() < 1e-12);
        assert!((c1 - direct).abs() < 1e-12);
    }

    #[test]
    fn shell_sums_match_tail_mass() {
        for m in [
            RadialMeasure::power_law(1.0, 1.2).unwrap(),
            RadialMeasure::atom_series(1.0, 1.0).unwrap(),
            RadialMeasure::density(NamedDensity::PowerLog { index: 0.8, log_power: 1.0 }).unwrap(),
        ] {
            let total: f64 = (0..=20).map(|j| m.shell_mass(j).unwrap()).sum();
            let tail = m.mass_above(2.0_f64.powi(-21)).unwrap();
            assert!(
                (total - tail).abs() <= 1e-6 * tail.max(1.0),
                "{total} vs {tail}"
            );
        }
    }

    #[test]
    fn jaffard_power_law_holds() {
        let m = RadialMeasure::power_law(1.0, 1.2).unwrap();
        assert_eq!(m.jaffard_condition(40).unwrap(), Convergence::Converges);
    }

    #[test]
    fn jaffard_finite_holds() {
        let m = RadialMeasure::finite(vec![Atom { radius: 0.3, mass: 2.0 }]).unwrap();
        assert_eq!(m.jaffard_condition(40).unwrap(), Convergence::Converges);
    }

    #[test]
    fn jaffard_shell_growth_two_fails_or_inconclusive() {
        // c_j = 2^{2j}/j²: terms ≈ √(2 ln2 · j)/j decay like j^{-1/2}, so the
        // series diverges; the heuristic may only see Inconclusive.
        let m = RadialMeasure::density(NamedDensity::ShellGrowth { rate: 2.0, poly: 2.0 }).unwrap();
        let c = m.jaffard_condition(40).unwrap();
        assert!(
            c.is_diverges() || matches!(c, Convergence::Inconclusive { .. }),
            "got {c:?}"
        );
    }

    #[test]
    fn bg_index_closed_forms() {
        let p = RadialMeasure::power_law(1.0, 1.2).unwrap();
        assert_eq!(p.bg_index().unwrap(), ExponentEstimate::Point(1.2));
        let f = RadialMeasure::finite(vec![Atom { radius: 0.5, mass: 3.0 }]).unwrap();
        assert_eq!(f.bg_index().unwrap(), ExponentEstimate::Point(0.0));
        // Σ k^{-1-γ} < ∞ for every γ > 0, so β = 0.
        let a = RadialMeasure::atom_series(1.0, 1.0).unwrap();
        assert_eq!(a.bg_index().unwrap(), ExponentEstimate::Point(0.0));
    }

    #[test]
    fn bg_index_density_bisection_brackets_index() {
        let m = RadialMeasure::density(NamedDensity::PowerLog { index: 0.8, log_power: 0.0 }).unwrap();
        let est = m.bg_index().unwrap();
        assert!(est.contains(0.8) || (est.midpoint().unwrap() - 0.8).abs() < 0.08, "{est:?}");
    }

    #[test]
    fn bg_index_shell_growth_boundary_returns_interval() {
        let m = RadialMeasure::density(NamedDensity::ShellGrowth { rate: 2.0, poly: 2.0 }).unwrap();
        let est = m.bg_index().unwrap();
        match est {
            ExponentEstimate::Interval(lo, hi) => {
                assert!(lo <= 2.0 && hi >= 1.9, "bracket [{lo}, {hi}]");
            }
            ExponentEstimate::Point(p) => assert!((p - 2.0).abs() < 0.1, "point {p}"),
            ExponentEstimate::Infinite => panic!("β cannot be infinite"),
        }
    }

    #[test]
    fn bg_monotone_under_added_small_mass() {
        // Adding small-shell mass never decreases β.
        let base = RadialMeasure::atom_series(1.0, 1.0).unwrap(); // β = 0
        let heavier = RadialMeasure::sum(vec![
            base.clone(),
            RadialMeasure::power_law(0.5, 0.9).unwrap(),
        ])
        .unwrap();
        let b0 = base.bg_index().unwrap().as_extended();
        let b1 = heavier.bg_index().unwrap().as_extended();
        assert!(b1 >= b0);
        assert!((b1 - 0.9).abs() < 1e-9);
    }

    #[test]
    fn shell_sampler_stays_in_shell() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for m in [
            RadialMeasure::power_law(1.0, 1.2).unwrap(),
            RadialMeasure::atom_series(1.0, 1.0).unwrap(),
            RadialMeasure::density(NamedDensity::PowerLog { index: 0.8, log_power: 1.0 }).unwrap(),
            RadialMeasure::density(NamedDensity::ShellGrowth { rate: 1.0, poly: 0.0 }).unwrap(),
        ] {
            for j in [1u32, 3, 8] {
                if let Some(s) = m.shell_sampler(j).unwrap() {
                    let (lo, hi) = shell_bounds(j);
                    for _ in 0..200 {
                        let r = s.sample(&mut rng);
                        assert!(r > lo && r <= hi, "r={r} outside shell {j}");
                    }
                }
            }
        }
    }

    #[test]
    fn deep_atom_shell_sampling_via_bisect() {
        // Shell 22 of r_k = 1/k holds ~4M atoms, forcing the bisect path.
        let m = RadialMeasure::atom_series(1.0, 1.0).unwrap();
        let s = m.shell_sampler(22).unwrap().unwrap();
        assert!(matches!(s, ShellSampler::AtomBisect { .. }));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let (lo, hi) = shell_bounds(22);
        for _ in 0..50 {
            let r = s.sample(&mut rng);
            assert!(r > lo && r <= hi);
        }
    }

    #[test]
    fn power_sum_euler_maclaurin_matches_exact() {
        let exact: f64 = (100_000..=500_000u64).map(|k| (k as f64).powf(-1.3)).sum();
        let em = power_sum(1.3, 100_000, 500_000);
        assert!((exact - em).abs() < 1e-9 * exact);
    }

    #[test]
    fn integral_matches_compensation_target() {
        // ∫_{(ε,1]} r² · r^{-2} dr = 1 − ε for the PowerLaw(1, 1) measure.
        let m = RadialMeasure::power_law(1.0, 1.0).unwrap();
        let eps = 2.0_f64.powi(-10);
        let v = m.integral(&|r| r * r, eps, 1.0).unwrap();
        assert!((v - (1.0 - eps)).abs() < 1e-9);
    }

    #[test]
    fn zero_measure_is_allowed() {
        let m = RadialMeasure::finite(vec![]).unwrap();
        assert_eq!(m.shell_mass(2).unwrap(), 0.0);
        assert_eq!(m.bg_index().unwrap(), ExponentEstimate::Point(0.0));
        assert_eq!(m.total_mass(), Some(0.0));
    }
}
