//! Finite-resolution approximation (limsup) sets.
//!
//! The limsup set `L_φ` collects the times within `φ(‖ΔX_s‖)` of infinitely
//! many small jumps. "Infinitely many" is not finitely checkable, so the
//! runtime object is an approximant: the union of the intervals contributed
//! by the jumps in one size window, studied as the window deepens. Nested
//! windows give nested approximants; every theorem check documents its
//! window schedule.

use crate::error::{Error, Result};
use crate::intervals::IntervalSet;
use crate::jumps::JumpSet;
use crate::modulus::Modulus;

/// A limsup-set approximant: a disjoint union of open intervals in `[0, T]`,
/// tagged with the jump-size window that produced it.
#[derive(Debug, Clone)]
pub struct ResolutionSet {
    pub horizon: f64,
    pub intervals: IntervalSet,
    /// Shell window `(j_lo, j_hi)`: only jumps with size in
    /// `(2^{-j_hi-1}, 2^{-j_lo}]` — dyadic shells `j_lo..=j_hi` — contributed.
    pub window: (u32, u32),
    /// Human-readable origin: radius map description plus source hash.
    pub provenance: String,
}

impl ResolutionSet {
    pub fn measure(&self) -> f64 {
        self.intervals.measure()
    }

    /// Builds directly from intervals (fixtures, file loads).
    pub fn from_intervals(horizon: f64, intervals: Vec<(f64, f64)>, provenance: &str) -> Self {
        let intervals = IntervalSet::from_unsorted(intervals).clip(0.0, horizon);
        Self { horizon, intervals, window: (0, 0), provenance: provenance.to_string() }
    }
}

/// Union of `(s − φ(size), s + φ(size))` over the jumps with `size ≤ 1` in
/// the shell window, merged and clipped to `[0, T]`.
///
/// `phi` must be nondecreasing with `φ(0) = 0`. An empty window yields the
/// empty set.
pub fn build_limsup_set(
    jumps: &JumpSet,
    phi: impl Fn(f64) -> f64,
    phi_desc: &str,
    window: (u32, u32),
) -> Result<ResolutionSet> {
    let (j_lo, j_hi) = window;
    if j_lo > j_hi {
        return Err(Error::InvalidParameter("window must satisfy j_lo ≤ j_hi".into()));
    }
    let size_lo = 2.0_f64.powi(-(j_hi as i32) - 1);
    let size_hi = 2.0_f64.powi(-(j_lo as i32));
    if jumps.sampled && size_lo < jumps.eps_min * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "window floor 2^-{} below the simulated cutoff {:.3e}",
            j_hi + 1,
            jumps.eps_min
        )));
    }
    let mut raw = Vec::new();
    for i in 0..jumps.len() {
        let size = jumps.sizes()[i];
        if size > size_lo && size <= size_hi.min(1.0) {
            let radius = phi(size);
            if radius > 0.0 {
                let t = jumps.times()[i];
                raw.push((t - radius, t + radius));
            }
        }
    }
    let intervals = IntervalSet::from_unsorted(raw).clip(0.0, jumps.horizon);
    Ok(ResolutionSet {
        horizon: jumps.horizon,
        intervals,
        window,
        provenance: format!("L_phi[{phi_desc}] of jumps#{:016x}", jumps.seed),
    })
}

/// Lebesgue measure of the approximant (sum of clipped interval lengths).
pub fn lebesgue_measure(set: &ResolutionSet) -> f64 {
    set.measure()
}

/// The modulus exceptional-set approximant: intersection over `q = 1..q_max`
/// of the approximants for `φ_q(r) = w̃⁻¹(r/κ₁^q)`.
///
/// Jump times themselves are degenerate single points of every `L_{φ_q}`;
/// they carry no measure and are left to the interval representation.
pub fn modulus_exceptional_set(
    jumps: &JumpSet,
    w: &Modulus,
    q_max: u32,
    window: (u32, u32),
) -> Result<ResolutionSet> {
    if q_max < 1 {
        return Err(Error::InvalidParameter("q_max must be ≥ 1".into()));
    }
    let mut acc: Option<ResolutionSet> = None;
    for q in 1..=q_max {
        let scale = w.kappa1().powi(q as i32);
        let set = build_limsup_set(
            jumps,
            |r| w.pseudo_inverse(r / scale),
            &format!("w_inv(r/kappa1^{q})"),
            window,
        )?;
        acc = Some(match acc {
            None => set,
            Some(prev) => ResolutionSet {
                horizon: prev.horizon,
                intervals: prev.intervals.intersect(&set.intervals),
                window,
                provenance: format!("{} ∩ {}", prev.provenance, set.provenance),
            },
        });
    }
    let mut out = acc.unwrap();
    out.provenance = format!("F_w approximant, q_max={q_max}, window=({},{})", window.0, window.1);
    Ok(out)
}

/// Interval intersection of approximants over a common horizon.
pub fn intersect_independent(sets: &[ResolutionSet]) -> Result<ResolutionSet> {
    let first = sets.first().ok_or_else(|| {
        Error::InvalidParameter("intersection needs at least one set".into())
    })?;
    let mut intervals = first.intervals.clone();
    for s in &sets[1..] {
        if (s.horizon - first.horizon).abs() > 1e-12 {
            return Err(Error::Mismatch(format!(
                "horizons differ: {} vs {}",
                s.horizon, first.horizon
            )));
        }
        intervals = intervals.intersect(&s.intervals);
    }
    Ok(ResolutionSet {
        horizon: first.horizon,
        intervals,
        window: first.window,
        provenance: format!("intersection of {} approximants", sets.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jumps::{sample_jumps, JumpRecord, JumpSet};
    use crate::levy::LevyModel;
    use crate::measure::RadialMeasure;

    fn synthetic(records: Vec<(f64, f64)>) -> JumpSet {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.0).unwrap());
        JumpSet::from_records(
            model,
            1.0,
            records
                .into_iter()
                .map(|(time, size)| JumpRecord { time, size, direction: vec![1.0] })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_jump_single_interval() {
        let js = synthetic(vec![(0.5, 0.25)]);
        let set = build_limsup_set(&js, |r| r, "id", (0, 30)).unwrap();
        assert_eq!(set.intervals.count(), 1);
        let (a, b) = set.intervals.items()[0];
        assert!((a - 0.25).abs() < 1e-12 && (b - 0.75).abs() < 1e-12);
    }

    #[test]
    fn overlapping_intervals_merge() {
        let js = synthetic(vec![(0.3, 0.25), (0.45, 0.25)]);
        let set = build_limsup_set(&js, |r| r, "id", (0, 30)).unwrap();
        assert_eq!(set.intervals.count(), 1);
        assert!((lebesgue_measure(&set) - (0.70 - 0.05)).abs() < 1e-12);
    }

    #[test]
    fn empty_window_is_empty_set() {
        let js = synthetic(vec![(0.5, 0.25)]);
        // Window (10, 12) excludes the size-1/4 jump.
        let set = build_limsup_set(&js, |r| r, "id", (10, 12)).unwrap();
        assert!(set.intervals.is_empty());
    }

    #[test]
    fn measure_full_cover() {
        let js = synthetic(vec![(0.5, 0.9)]);
        let set = build_limsup_set(&js, |r| 2.0 * r, "2r", (0, 30)).unwrap();
        assert!((lebesgue_measure(&set) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_phi() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        let js = sample_jumps(&model, 1.0, 2.0_f64.powi(-12), 3).unwrap();
        // φ ≤ φ' pointwise on (0,1] ⇒ L_φ ⊆ L_{φ'}.
        let small = build_limsup_set(&js, |r| r * r, "r^2", (2, 11)).unwrap();
        let large = build_limsup_set(&js, |r| r, "r", (2, 11)).unwrap();
        assert!(small.intervals.subset_of(&large.intervals, 1e-12));
    }

    #[test]
    fn convergent_phi_measure_bounded_by_covering_sum() {
        // φ(r) = r²: ∫ φ dσ < ∞. The approximant measure is at most twice
        // the covering sum Σ φ(size), window by window.
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        for seed in 0..5u64 {
            let js = sample_jumps(&model, 1.0, 2.0_f64.powi(-16), seed).unwrap();
            for j_hi in [9u32, 12, 15] {
                let window = (j_hi / 2, j_hi);
                let set = build_limsup_set(&js, |r| r * r, "r^2", window).unwrap();
                let covering: f64 = js
                    .iter()
                    .filter(|r| {
                        r.size > 2.0_f64.powi(-(j_hi as i32) - 1)
                            && r.size <= 2.0_f64.powi(-((j_hi / 2) as i32))
                    })
                    .map(|r| r.size * r.size)
                    .sum();
                assert!(
                    lebesgue_measure(&set) <= 2.0 * covering + 1e-12,
                    "seed {seed} window ({},{j_hi})",
                    j_hi / 2
                );
            }
        }
    }

    #[test]
    fn divergent_phi_covers_in_deep_windows() {
        // φ(r) = √r against PowerLaw(1.2): ∫ φ dσ = ∞; coverage saturates.
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.2).unwrap());
        let js = sample_jumps(&model, 1.0, 2.0_f64.powi(-15), 1).unwrap();
        let set = build_limsup_set(&js, |r| r.sqrt(), "sqrt", (6, 14)).unwrap();
        assert!(lebesgue_measure(&set) > 0.95);
    }

    #[test]
    fn exceptional_set_single_q_equals_limsup() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.0).unwrap());
        let js = sample_jumps(&model, 1.0, 2.0_f64.powi(-10), 9).unwrap();
        let w = Modulus::power(2.0).unwrap();
        let single = modulus_exceptional_set(&js, &w, 1, (2, 9)).unwrap();
        let kappa = w.kappa1();
        let direct =
            build_limsup_set(&js, |r| w.pseudo_inverse(r / kappa), "phi1", (2, 9)).unwrap();
        assert_eq!(single.intervals, direct.intervals);
    }

    #[test]
    fn exceptional_set_nested_in_q() {
        let model = LevyModel::pure_jump(RadialMeasure::power_law(1.0, 1.0).unwrap());
        let js = sample_jumps(&model, 1.0, 2.0_f64.powi(-12), 17).unwrap();
        let w = Modulus::power(2.0).unwrap();
        let mut prev: Option<ResolutionSet> = None;
        for q_max in 1..=4u32 {
            let cur = modulus_exceptional_set(&js, &w, q_max, (2, 11)).unwrap();
            if let Some(p) = &prev {
                assert!(cur.intervals.subset_of(&p.intervals, 1e-12), "q_max {q_max}");
            }
            prev = Some(cur);
        }
    }

    #[test]
    fn intersect_trivia() {
        let a = ResolutionSet::from_intervals(1.0, vec![(0.1, 0.4), (0.6, 0.9)], "a");
        assert_eq!(
            intersect_independent(&[a.clone(), a.clone()]).unwrap().intervals,
            a.intervals
        );
        let b = ResolutionSet::from_intervals(1.0, vec![(0.45, 0.55)], "b");
        assert!(intersect_independent(&[a, b]).unwrap().intervals.is_empty());
    }
}
