//! Simulation of the jump Poisson random measure.
//!
//! The measure `J` has intensity `dt ⊗ π` on `(0, T] × (ℝ^d \ {0})`. Shell by
//! dyadic shell, the number of jumps is Poisson with mean `T·c_j`, jump times
//! are uniform on `(0, T]`, sizes follow σ restricted to the shell, and
//! directions are uniform on the sphere. Every shell owns an RNG substream
//! keyed by `(seed, shell)`, so lowering the size cutoff only appends records:
//! the realization is a consistent restriction of one infinite configuration.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::levy::LevyModel;
use crate::measure::shell_bounds;
use crate::rng::{substream, tags};

/// Hard cap on the expected number of simulated jumps.
pub const MAX_EXPECTED_JUMPS: f64 = 1e9;

/// One jump: time, size `‖ΔX_t‖`, unit direction.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub size: f64,
    pub direction: Vec<f64>,
}

/// A finite realization of the jump measure on `(0, T]`, sorted by time.
///
/// Storage is columnar; directions are flattened row-major.
#[derive(Debug, Clone)]
pub struct JumpSet {
    pub horizon: f64,
    pub eps_min: f64,
    pub seed: u64,
    pub model: LevyModel,
    /// Dyadic shells `(j_lo..=j_hi)` that were sampled.
    pub shell_range: (u32, u32),
    /// Whether the records came from the sampler (windows are then checked
    /// against `eps_min`) or were supplied explicitly.
    pub sampled: bool,
    times: Vec<f64>,
    sizes: Vec<f64>,
    directions: Vec<f64>,
}

impl JumpSet {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        let d = self.model.dim;
        &self.directions[i * d..(i + 1) * d]
    }

    pub fn record(&self, i: usize) -> JumpRecord {
        JumpRecord {
            time: self.times[i],
            size: self.sizes[i],
            direction: self.direction(i).to_vec(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = JumpRecord> + '_ {
        (0..self.len()).map(|i| self.record(i))
    }

    /// Assembles a set from explicit records (test fixtures, file loads).
    pub fn from_records(model: LevyModel, horizon: f64, records: Vec<JumpRecord>) -> Result<Self> {
        let dim = model.dim;
        let mut records = records;
        records.sort_by(|a, b| {
            a.time.total_cmp(&b.time).then(b.size.total_cmp(&a.size))
        });
        let mut times = Vec::with_capacity(records.len());
        let mut sizes = Vec::with_capacity(records.len());
        let mut directions = Vec::with_capacity(records.len() * dim);
        let mut eps_min: f64 = model.jumps.r_max();
        for r in records {
            if r.direction.len() != dim {
                return Err(Error::InvalidParameter("direction dimension mismatch".into()));
            }
            if !(r.size > 0.0) {
                return Err(Error::InvalidParameter("jump sizes must be > 0".into()));
            }
            eps_min = eps_min.min(r.size);
            times.push(r.time);
            sizes.push(r.size);
            directions.extend_from_slice(&r.direction);
        }
        Ok(Self {
            horizon,
            eps_min,
            seed: 0,
            model,
            shell_range: (0, 0),
            sampled: false,
            times,
            sizes,
            directions,
        })
    }

    /// `Σ φ(size)` over records with `time ≤ n` and `size ≤ 1` — the
    /// empirical side of the compensation formula. Its mean over seeds
    /// targets `n ∫ φ dσ` (restricted to the simulated window).
    pub fn compensation_sum(&self, phi: impl Fn(f64) -> f64, n: f64) -> f64 {
        self.times
            .iter()
            .zip(&self.sizes)
            .filter(|(t, s)| **t <= n && **s <= 1.0)
            .map(|(_, s)| phi(*s))
            .sum()
    }
}

/// Samples the jump measure down to jump size `eps_min`.
///
/// Shells `(2^{-j-1}, 2^{-j}]` with `2^{-j-1} ≥ eps_min` are generated; the
/// result is deterministic in `(model, horizon, eps_min, seed)`.
pub fn sample_jumps(model: &LevyModel, horizon: f64, eps_min: f64, seed: u64) -> Result<JumpSet> {
    if !(horizon > 0.0) {
        return Err(Error::InvalidParameter("horizon must be > 0".into()));
    }
    let r_max = model.jumps.r_max();
    if !(eps_min > 0.0 && eps_min <= r_max) {
        return Err(Error::InvalidParameter(format!(
            "eps_min {eps_min} outside (0, r_max = {r_max}]"
        )));
    }
    if eps_min == r_max {
        return empty_set(model, horizon, eps_min, seed, (0, 0));
    }
    // Deepest shell j with 2^{-j-1} ≥ eps_min.
    let j_hi = (-eps_min.log2() - 1.0).floor();
    if j_hi < 0.0 {
        return empty_set(model, horizon, eps_min, seed, (0, 0));
    }
    sample_jump_shells(model, horizon, (0, j_hi as u32), seed)
}

/// Samples only the shells in `j_range` (both ends inclusive).
///
/// Because shells own independent substreams, the union of two ranges equals
/// the range sampled in one go.
pub fn sample_jump_shells(
    model: &LevyModel,
    horizon: f64,
    j_range: (u32, u32),
    seed: u64,
) -> Result<JumpSet> {
    let (j_lo, j_hi) = j_range;
    if j_lo > j_hi {
        return Err(Error::InvalidParameter("empty shell range".into()));
    }
    let expected: f64 = (j_lo..=j_hi)
        .map(|j| model.jumps.shell_mass(j))
        .sum::<Result<f64>>()?
        * horizon;
    if expected > MAX_EXPECTED_JUMPS {
        return Err(Error::ResourceLimit {
            what: "expected jump count",
            estimate: expected,
            limit: MAX_EXPECTED_JUMPS,
        });
    }

    let dim = model.dim;
    let mut times = Vec::new();
    let mut sizes = Vec::new();
    let mut directions = Vec::new();
    for j in j_lo..=j_hi {
        let mass = model.jumps.shell_mass(j)?;
        if mass == 0.0 {
            continue;
        }
        let Some(sampler) = model.jumps.shell_sampler(j)? else {
            continue;
        };
        let mut rng = substream(seed, &[tags::SHELL, j as u64]);
        let count = Poisson::new(horizon * mass)
            .map_err(|e| Error::InvalidParameter(format!("poisson intensity: {e}")))?
            .sample(&mut rng) as usize;
        times.reserve(count);
        sizes.reserve(count);
        directions.reserve(count * dim);
        for _ in 0..count {
            times.push(rng.random::<f64>() * horizon);
            sizes.push(sampler.sample(&mut rng));
            sample_direction(dim, &mut rng, &mut directions);
        }
    }

    // Sort by (time asc, size desc); ties in time are probability zero but
    // determinism needs a rule.
    let mut order: Vec<u32> = (0..times.len() as u32).collect();
    order.sort_by(|&a, &b| {
        let (a, b) = (a as usize, b as usize);
        times[a].total_cmp(&times[b]).then(sizes[b].total_cmp(&sizes[a]))
    });
    let gather = |src: &[f64]| -> Vec<f64> { order.iter().map(|&i| src[i as usize]).collect() };
    let sorted_times = gather(&times);
    let sorted_sizes = gather(&sizes);
    let mut sorted_dirs = Vec::with_capacity(directions.len());
    for &i in &order {
        let i = i as usize;
        sorted_dirs.extend_from_slice(&directions[i * dim..(i + 1) * dim]);
    }

    Ok(JumpSet {
        horizon,
        eps_min: shell_bounds(j_hi).0,
        seed,
        model: model.clone(),
        shell_range: (j_lo, j_hi),
        sampled: true,
        times: sorted_times,
        sizes: sorted_sizes,
        directions: sorted_dirs,
    })
}

fn empty_set(
    model: &LevyModel,
    horizon: f64,
    eps_min: f64,
    seed: u64,
    shell_range: (u32, u32),
) -> Result<JumpSet> {
    Ok(JumpSet {
        horizon,
        eps_min,
        seed,
        model: model.clone(),
        shell_range,
        sampled: true,
        times: Vec::new(),
        sizes: Vec::new(),
        directions: Vec::new(),
    })
}

fn sample_direction(dim: usize, rng: &mut impl Rng, out: &mut Vec<f64>) {
    match dim {
        1 => out.push(if rng.random::<bool>() { 1.0 } else { -1.0 }),
        _ => {
            let start = out.len();
            let norm = loop {
                out.truncate(start);
                let mut norm2 = 0.0;
                for _ in 0..dim {
                    let z: f64 = StandardNormal.sample(rng);
                    norm2 += z * z;
                    out.push(z);
                }
                if norm2 > 1e-24 {
                    break norm2.sqrt();
                }
            };
            for v in &mut out[start..] {
                *v /= norm;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Atom, RadialMeasure};
    use crate::rng::{substream, tags};
    use rand_distr::Distribution;

    fn atom_model() -> LevyModel {
        LevyModel::pure_jump(
            RadialMeasure::finite(vec![Atom { radius: 0.5, mass: 3.0 }]).unwrap(),
        )
    }

    #[test]
    fn atom_measure_counts_are_poisson_three() {
        // Monte Carlo band: mean count over 10⁴ seeds within 3√(3/10⁴).
        let model = atom_model();
        let reps = 10_000u64;
        let mut total = 0usize;
        for rep in 0..reps {
            let js = sample_jumps(&model, 1.0, 0.1, rep).unwrap();
            total += js.len();
            for r in js.iter() {
                assert_eq!(r.size, 0.5);
                assert!(r.time > 0.0 && r.time <= 1.0);
            }
        }
        let mean = total as f64 / reps as f64;
        let band = 3.0 * (3.0 / reps as f64).sqrt();
        assert!((mean - 3.0).abs() < band, "mean {mean} outside 3 ± {band}");
    }

    #[test]
    fn power_law_shell_zero_count_has_mean_one() {
        // shell_mass(PowerLaw(1,1), 0) = 1, so the shell-0 count is
        // Poisson(T) with T = 1.
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.0).unwrap());
        let reps = 10_000u64;
        let mut total = 0usize;
        for rep in 0..reps {
            let js = sample_jump_shells(&model, 1.0, (0, 0), rep).unwrap();
            total += js.len();
        }
        let mean = total as f64 / reps as f64;
        let band = 3.0 * (1.0_f64 / reps as f64).sqrt();
        assert!((mean - 1.0).abs() < band, "mean {mean}");
    }

    #[test]
    fn cutoff_at_r_max_gives_empty_set() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.0).unwrap());
        let js = sample_jumps(&model, 1.0, 1.0, 7).unwrap();
        assert!(js.is_empty());
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        let a = sample_jumps(&model, 2.0, 1e-3, 99).unwrap();
        let b = sample_jumps(&model, 2.0, 1e-3, 99).unwrap();
        assert_eq!(a.times(), b.times());
        assert_eq!(a.sizes(), b.sizes());
    }

    #[test]
    fn refinement_only_appends_smaller_jumps() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        let coarse = sample_jumps(&model, 1.0, 2.0_f64.powi(-7), 5).unwrap();
        let fine = sample_jumps(&model, 1.0, 2.0_f64.powi(-11), 5).unwrap();
        let cutoff = 2.0_f64.powi(-7);
        let coarse_recs: Vec<_> = coarse.iter().map(|r| (r.time, r.size)).collect();
        let fine_recs: Vec<_> =
            fine.iter().filter(|r| r.size >= cutoff).map(|r| (r.time, r.size)).collect();
        assert_eq!(coarse_recs.len(), fine_recs.len());
        for (a, b) in coarse_recs.iter().zip(&fine_recs) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn compensation_sum_examples() {
        let model = atom_model();
        // φ ≡ 0 vanishes.
        let js = sample_jumps(&model, 1.0, 0.1, 1).unwrap();
        assert_eq!(js.compensation_sum(|_| 0.0, 1.0), 0.0);

        // Atom measure, φ = Id: mean over seeds ≈ E[N]·(1/2) = 1.5.
        let reps = 4_000u64;
        let mut acc = 0.0;
        for rep in 0..reps {
            acc += sample_jumps(&model, 1.0, 0.1, rep).unwrap().compensation_sum(|r| r, 1.0);
        }
        let mean = acc / reps as f64;
        // Var(Σφ) = n ∫ φ² dσ = 3/4 for the compensated Poisson sum.
        let band = 3.0 * (0.75_f64 / reps as f64).sqrt();
        assert!((mean - 1.5).abs() < band, "mean {mean}");

        // PowerLaw(1,1), φ = r²: target 1 − ε.
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.0).unwrap());
        let eps = 2.0_f64.powi(-8);
        let mut acc = 0.0;
        for rep in 0..reps {
            acc += sample_jumps(&model, 1.0, eps, rep).unwrap().compensation_sum(|r| r * r, 1.0);
        }
        let mean = acc / reps as f64;
        let target = 1.0 - eps;
        // Var = ∫ r⁴ r^{-2} dr ≈ 1/3.
        let band = 3.0 * ((1.0_f64 / 3.0) / reps as f64).sqrt();
        assert!((mean - target).abs() < band, "mean {mean} target {target}");
    }

    #[test]
    fn shell_counts_have_poisson_dispersion() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        let reps = 1_000u64;
        for j in [3u32, 6] {
            let lambda = model.jumps.shell_mass(j).unwrap();
            let mut counts = Vec::with_capacity(reps as usize);
            for rep in 0..reps {
                counts.push(sample_jump_shells(&model, 1.0, (j, j), rep).unwrap().len() as f64);
            }
            let mean = counts.iter().sum::<f64>() / reps as f64;
            let var =
                counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (reps - 1) as f64;
            assert!(
                (mean - lambda).abs() < 3.0 * (lambda / reps as f64).sqrt(),
                "shell {j}: mean {mean} vs λ {lambda}"
            );
            let dispersion = var / mean;
            assert!((0.9..=1.1).contains(&dispersion), "shell {j}: dispersion {dispersion}");
        }
    }

    #[test]
    fn directions_are_unit_in_dim_two() {
        let jumps = RadialMeasure::power_law(1.0, 1.0).unwrap();
        let model = LevyModel::new(vec![0.0, 0.0], 0.0, jumps, 2).unwrap();
        let js = sample_jumps(&model, 1.0, 0.01, 11).unwrap();
        assert!(js.len() > 10);
        for i in 0..js.len() {
            let d = js.direction(i);
            let norm: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resource_guard_trips() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.9).unwrap());
        let err = sample_jumps(&model, 1.0, 1e-6, 0).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit { .. }), "{err}");
    }

    #[test]
    fn poisson_sampler_is_deterministic() {
        let mut a = substream(3, &[tags::SHELL, 2]);
        let mut b = substream(3, &[tags::SHELL, 2]);
        let p = Poisson::new(17.0).unwrap();
        for _ in 0..8 {
            assert_eq!(p.sample(&mut a) as u64, p.sample(&mut b) as u64);
        }
    }
}
