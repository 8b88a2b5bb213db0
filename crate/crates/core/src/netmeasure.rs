//! c-adic net measures and box dimension.
//!
//! The outer net measure is the cheapest cover cost `Σ g(diam λ)` over
//! antichains of c-adic cubes containing the target set, with cubes
//! restricted to diameters below the gauge's validated window. At finite
//! depth `J` the tree is truncated, so the computed value is an upper
//! approximation that is nonincreasing in `J`; theorem checks always look at
//! trends across depths, never a single value.

use crate::error::{Error, Result};
use crate::gauge::GaugeFunction;
use crate::limsup::ResolutionSet;
use crate::series::linear_fit;

/// One selected cube of an optimal cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverCube {
    pub generation: u32,
    pub index: i64,
    pub diameter: f64,
    pub cost: f64,
}

/// An optimal (at the given depth) net cover.
#[derive(Debug, Clone)]
pub struct DyadicCover {
    pub base: u32,
    pub depth: u32,
    pub cubes: Vec<CoverCube>,
}

impl DyadicCover {
    pub fn total_cost(&self) -> f64 {
        self.cubes.iter().map(|c| c.cost).sum()
    }
}

/// Node budget for one net-measure query.
const DP_NODE_LIMIT: usize = 20_000_000;

/// Computes the depth-`J` net measure of a set by recursion over the c-adic
/// tree: a cube meeting the set either is selected (cost `g(diam)`, only for
/// admissible diameters `< ε_g`) or delegates to its children; leaves at
/// generation `J` must select. Ties prefer the coarser cube.
///
/// Returns the optimal value together with one optimal cover.
pub fn net_measure_dp(
    set: &ResolutionSet,
    g: &GaugeFunction,
    base: u32,
    depth: u32,
) -> Result<(f64, DyadicCover)> {
    if base < 2 {
        return Err(Error::InvalidParameter("base must be ≥ 2".into()));
    }
    if g.is_zero() {
        return Err(Error::InvalidParameter("net measure needs a nonzero gauge".into()));
    }
    // First admissible generation: c^{-j} ≤ ε_g (inclusive boundary, so a
    // gauge validated on all of (0, 1] admits the unit root cube).
    let j0 = first_admissible(base, g.epsilon());
    if depth < j0 {
        return Err(Error::InvalidParameter(format!(
            "depth {depth} precedes the first admissible generation {j0}"
        )));
    }
    let mut nodes = 0usize;
    let mut cover = Vec::new();
    let mut value = 0.0;
    // Root cells of generation 0 clipped to the horizon.
    let root_hi = set.horizon.ceil().max(1.0) as i64;
    for k in 0..root_hi {
        value += dp_cube(set, g, base, depth, j0, 0, k, &mut cover, &mut nodes)?;
    }
    Ok((value, DyadicCover { base, depth, cubes: cover }))
}

fn first_admissible(base: u32, epsilon: f64) -> u32 {
    let mut j = 0u32;
    while (base as f64).powi(-(j as i32)) > epsilon {
        j += 1;
    }
    j
}

#[allow(clippy::too_many_arguments)]
fn dp_cube(
    set: &ResolutionSet,
    g: &GaugeFunction,
    base: u32,
    depth: u32,
    j0: u32,
    j: u32,
    k: i64,
    cover: &mut Vec<CoverCube>,
    nodes: &mut usize,
) -> Result<f64> {
    *nodes += 1;
    if *nodes > DP_NODE_LIMIT {
        return Err(Error::ResourceLimit {
            what: "net measure DP nodes",
            estimate: *nodes as f64,
            limit: DP_NODE_LIMIT as f64,
        });
    }
    let width = (base as f64).powi(-(j as i32));
    let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
    if !intersects(set, lo, hi) {
        return Ok(0.0);
    }
    let own_cost = if j >= j0 { Some(g.eval(width)) } else { None };
    if j == depth {
        // Leaf: must select (j == depth ≥ j0).
        let cost = own_cost.expect("leaf below first admissible generation");
        cover.push(CoverCube { generation: j, index: k, diameter: width, cost });
        return Ok(cost);
    }
    let mut child_cover = Vec::new();
    let mut child_sum = 0.0;
    for c in 0..base as i64 {
        child_sum += dp_cube(
            set,
            g,
            base,
            depth,
            j0,
            j + 1,
            k * base as i64 + c,
            &mut child_cover,
            nodes,
        )?;
    }
    match own_cost {
        // Tie prefers the coarser cube.
        Some(cost) if cost <= child_sum => {
            cover.push(CoverCube { generation: j, index: k, diameter: width, cost });
            Ok(cost)
        }
        _ => {
            cover.append(&mut child_cover);
            Ok(child_sum)
        }
    }
}

fn intersects(set: &ResolutionSet, lo: f64, hi: f64) -> bool {
    let items = set.intervals.items();
    let idx = items.partition_point(|&(_, b)| b <= lo);
    idx < items.len() && items[idx].0 < hi
}

/// Box-counting dimension: regresses `log_c N_j` on `j` over `j_range`,
/// where `N_j` counts generation-`j` cubes meeting the set.
pub fn box_dimension(set: &ResolutionSet, base: u32, j_range: (u32, u32)) -> Result<(f64, f64)> {
    if set.intervals.is_empty() {
        return Err(Error::InvalidParameter("box dimension of the empty set".into()));
    }
    let (j1, j2) = j_range;
    if j2 < j1 + 2 {
        return Err(Error::InsufficientScales { got: (j2 + 1 - j1) as usize, need: 3 });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in j1..=j2 {
        let n = count_boxes(set, base, j);
        if n > 0 {
            xs.push(j as f64);
            ys.push((n as f64).ln() / (base as f64).ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientScales { got: xs.len(), need: 3 });
    }
    let (slope, _, r2) = linear_fit(&xs, &ys);
    Ok((slope, r2))
}

/// Number of generation-`j` cubes of the absolute c-adic grid meeting the
/// (open) set. Endpoints within 1e-9 of a cube boundary count as aligned.
pub fn count_boxes(set: &ResolutionSet, base: u32, j: u32) -> u64 {
    let width = (base as f64).powi(-(j as i32));
    let mut count = 0u64;
    let mut last: i64 = i64::MIN;
    for &(a, b) in set.intervals.items() {
        let first = (a / width + 1e-9).floor() as i64;
        let final_ = ((b / width - 1e-9).ceil() as i64 - 1).max(first);
        let from = first.max(last + 1);
        if final_ >= from {
            count += (final_ - from + 1) as u64;
            last = final_;
        }
    }
    count
}

/// Upper bound for the Hausdorff `g`-measure from the set's own intervals,
/// each chopped into equal pieces no longer than `c^{-J}` (and no longer
/// than the gauge window).
pub fn hausdorff_g_upper_bound(
    set: &ResolutionSet,
    g: &GaugeFunction,
    base: u32,
    depth: u32,
) -> Result<f64> {
    if g.is_zero() {
        return Err(Error::InvalidParameter("upper bound needs a nonzero gauge".into()));
    }
    let max_len = (base as f64).powi(-(depth as i32)).min(0.999 * g.epsilon());
    let mut total = 0.0;
    for &(a, b) in set.intervals.items() {
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        let pieces = (len / max_len).ceil().max(1.0);
        total += pieces * g.eval(len / pieces);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::GaugeFunction;
    use rand::Rng;

    /// Brute-force oracle: enumerates *all* antichain covers of the binary
    /// tree up to `depth` and returns the cheapest admissible one. Covers
    /// are built independently of the DP recursion.
    fn exhaustive_min(
        set: &ResolutionSet,
        g: &GaugeFunction,
        depth: u32,
        j0: u32,
        j: u32,
        k: i64,
    ) -> f64 {
        let width = 2.0_f64.powi(-(j as i32));
        let (lo, hi) = (k as f64 * width, (k + 1) as f64 * width);
        let items = set.intervals.items();
        let idx = items.partition_point(|&(_, b)| b <= lo);
        if !(idx < items.len() && items[idx].0 < hi) {
            return 0.0;
        }
        let own = if j >= j0 { Some(g.eval(width)) } else { None };
        if j == depth {
            return own.unwrap();
        }
        let split = exhaustive_min(set, g, depth, j0, j + 1, 2 * k)
            + exhaustive_min(set, g, depth, j0, j + 1, 2 * k + 1);
        match own {
            Some(cost) => cost.min(split),
            None => split,
        }
    }

    #[test]
    fn single_dyadic_interval_selects_itself() {
        // For nondecreasing g the interval's own cube is optimal.
        let g = GaugeFunction::power(1.0, 1).unwrap();
        for (j, lo) in [(1u32, 0.5), (3u32, 0.25)] {
            let w = 2.0_f64.powi(-(j as i32));
            let set = ResolutionSet::from_intervals(1.0, vec![(lo, lo + w)], "fixture");
            let (value, cover) = net_measure_dp(&set, &g, 2, 8).unwrap();
            assert!((value - w).abs() < 1e-12, "j={j} value={value}");
            assert!(cover.cubes.iter().any(|c| (c.diameter - w).abs() < 1e-15));
        }
    }

    #[test]
    fn full_interval_sqrt_gauge_prefers_root() {
        // g = Id^{1/2}: the unit cube costs 1, any split costs ≥ 2·2^{-1/2}.
        let g = GaugeFunction::power(0.5, 1).unwrap();
        let set = ResolutionSet::from_intervals(1.0, vec![(0.0, 1.0)], "full");
        let (value, cover) = net_measure_dp(&set, &g, 2, 6).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
        assert_eq!(cover.cubes.len(), 1);
        assert_eq!(cover.cubes[0].generation, 0);
        let oracle = exhaustive_min(&set, &g, 6, 0, 0, 0);
        assert!((value - oracle).abs() < 1e-12);
    }

    #[test]
    fn dp_matches_exhaustive_oracle_on_random_fixtures() {
        let mut rng = crate::rng::substream(2024, &[1]);
        let gauges = [
            GaugeFunction::power(0.4, 1).unwrap(),
            GaugeFunction::power(0.8, 1).unwrap(),
            GaugeFunction::power(1.0, 1).unwrap(),
        ];
        for trial in 0..200 {
            let n = rng.random_range(1..=6);
            let intervals: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let a: f64 = rng.random::<f64>();
                    let len = rng.random::<f64>() * 0.3;
                    (a, (a + len).min(1.0))
                })
                .collect();
            let set = ResolutionSet::from_intervals(1.0, intervals, "random");
            if set.intervals.is_empty() {
                continue;
            }
            let g = &gauges[trial % gauges.len()];
            let depth = 4;
            let (dp, cover) = net_measure_dp(&set, g, 2, depth).unwrap();
            let oracle = exhaustive_min(&set, g, depth, 0, 0, 0);
            assert!(
                (dp - oracle).abs() <= 1e-12 * oracle.max(1.0),
                "trial {trial}: dp {dp} vs oracle {oracle}"
            );
            assert!((cover.total_cost() - dp).abs() <= 1e-12 * dp.max(1.0));
        }
    }

    #[test]
    fn net_measure_set_and_gauge_monotonicity() {
        let small = ResolutionSet::from_intervals(1.0, vec![(0.1, 0.3)], "a");
        let large = ResolutionSet::from_intervals(1.0, vec![(0.1, 0.3), (0.6, 0.9)], "b");
        let g_small = GaugeFunction::power(0.9, 1).unwrap();
        let g_large = GaugeFunction::power(0.5, 1).unwrap(); // r^{0.5} ≥ r^{0.9} on (0,1]
        let (va, _) = net_measure_dp(&small, &g_small, 2, 8).unwrap();
        let (vb, _) = net_measure_dp(&large, &g_small, 2, 8).unwrap();
        assert!(va <= vb + 1e-12, "subset monotonicity");
        let (vg, _) = net_measure_dp(&small, &g_large, 2, 8).unwrap();
        assert!(va <= vg + 1e-12, "gauge monotonicity");
    }

    #[test]
    fn net_measure_subadditive_and_depth_monotone() {
        let a = ResolutionSet::from_intervals(1.0, vec![(0.05, 0.22), (0.4, 0.45)], "a");
        let b = ResolutionSet::from_intervals(1.0, vec![(0.18, 0.35), (0.7, 0.71)], "b");
        let union = ResolutionSet::from_intervals(
            1.0,
            a.intervals.items().iter().chain(b.intervals.items()).cloned().collect(),
            "a∪b",
        );
        let g = GaugeFunction::power(0.7, 1).unwrap();
        let (va, _) = net_measure_dp(&a, &g, 2, 8).unwrap();
        let (vb, _) = net_measure_dp(&b, &g, 2, 8).unwrap();
        let (vu, _) = net_measure_dp(&union, &g, 2, 8).unwrap();
        assert!(vu <= va + vb + 1e-12);
        let mut prev = f64::INFINITY;
        for depth in 2..=10 {
            let (v, _) = net_measure_dp(&union, &g, 2, depth).unwrap();
            assert!(v <= prev + 1e-12, "depth {depth}");
            prev = v;
        }
    }

    #[test]
    fn base_choice_changes_value_within_factor_two_on_fixtures() {
        let set = ResolutionSet::from_intervals(1.0, vec![(0.1, 0.35), (0.62, 0.8)], "fixture");
        let g = GaugeFunction::power(0.6, 1).unwrap();
        let (v2, _) = net_measure_dp(&set, &g, 2, 10).unwrap();
        let (v3, _) = net_measure_dp(&set, &g, 3, 7).unwrap();
        let ratio = v2 / v3;
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn box_dimension_trivia() {
        let full = ResolutionSet::from_intervals(1.0, vec![(0.0, 1.0)], "full");
        let (slope, r2) = box_dimension(&full, 2, (2, 10)).unwrap();
        assert!((slope - 1.0).abs() < 0.01 && r2 > 0.999);
        let point = ResolutionSet::from_intervals(1.0, vec![(0.5, 0.5 + 1e-12)], "pt");
        let (slope, _) = box_dimension(&point, 2, (2, 10)).unwrap();
        assert!(slope.abs() < 0.01);
    }

    #[test]
    fn cantor_prefix_box_dimension() {
        // Depth-10 middle-thirds prefix: N_j = 2^j for ternary generations
        // j ≤ 10, so the slope is log 2 / log 3 exactly.
        let mut intervals = vec![(0.0_f64, 1.0_f64)];
        for _ in 0..10 {
            let mut next = Vec::with_capacity(intervals.len() * 2);
            for (a, b) in intervals {
                let third = (b - a) / 3.0;
                next.push((a, a + third));
                next.push((b - third, b));
            }
            intervals = next;
        }
        let set = ResolutionSet::from_intervals(1.0, intervals, "cantor10");
        let (slope, r2) = box_dimension(&set, 3, (1, 10)).unwrap();
        let target = 2.0_f64.ln() / 3.0_f64.ln();
        assert!((slope - target).abs() < 0.02, "slope {slope} vs {target}");
        assert!(r2 > 0.999);
    }

    #[test]
    fn upper_bound_examples() {
        let g = GaugeFunction::power(1.0, 1).unwrap();
        let empty = ResolutionSet::from_intervals(1.0, vec![], "empty");
        assert_eq!(hausdorff_g_upper_bound(&empty, &g, 2, 6).unwrap(), 0.0);
        // Length is cover-invariant for g = Id.
        let full = ResolutionSet::from_intervals(1.0, vec![(0.0, 1.0)], "full");
        for depth in [2u32, 6, 10] {
            let v = hausdorff_g_upper_bound(&full, &g, 2, depth).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "depth {depth}: {v}");
        }
    }

    #[test]
    fn upper_bound_dominates_net_value_on_aligned_fixtures() {
        // On c-adic aligned intervals the natural refined cover is itself a
        // net cover, so it cannot be cheaper than the optimum.
        let g = GaugeFunction::power(0.6, 1).unwrap();
        let set = ResolutionSet::from_intervals(
            1.0,
            vec![(0.25, 0.375), (0.5, 0.625), (0.75, 0.8125)],
            "aligned",
        );
        for depth in 4..=9u32 {
            let ub = hausdorff_g_upper_bound(&set, &g, 2, depth).unwrap();
            let (dp, _) = net_measure_dp(&set, &g, 2, depth).unwrap();
            assert!(ub >= dp - 1e-12, "depth {depth}: ub {ub} < dp {dp}");
        }
    }
}
