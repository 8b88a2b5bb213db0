//! Coarse-grained singularity spectrum.
//!
//! The Hausdorff dimension of the level set `E_h` is estimated by dyadic
//! counting: `N_j(h)` is the number of generation-`j` dyadic intervals
//! containing at least one grid point whose Hölder estimate falls in the
//! `h`-bin, and the dimension estimate is the least-squares slope of
//! `log₂ N_j(h)` against `j`. The regression's fit quality is reported so
//! the bias of the surrogate stays visible.

use crate::error::{Error, Result};
use crate::exponents::ExponentField;
use crate::series::linear_fit;

/// Dimension estimate for one Hölder bin.
#[derive(Debug, Clone)]
pub struct SpectrumRow {
    pub h_center: f64,
    /// Slope clipped to `[0, 1]`; `None` when the bin was empty at every
    /// generation or had fewer than three usable scales.
    pub dim: Option<f64>,
    /// Unclipped slope, kept for diagnostics.
    pub dim_raw: Option<f64>,
    pub r2: Option<f64>,
    /// Grid points that landed in the bin.
    pub points: usize,
}

#[derive(Debug, Clone)]
pub struct SpectrumEstimate {
    pub bin_width: f64,
    pub j_range: (u32, u32),
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumEstimate {
    /// Row whose bin contains `h`.
    pub fn row_at(&self, h: f64) -> Option<&SpectrumRow> {
        self.rows.iter().find(|r| (r.h_center - h).abs() <= 0.5 * self.bin_width + 1e-12)
    }
}

/// Estimates the spectrum from an exponent field.
///
/// Bins of width `bin_width` cover `[0, ceiling]`; flagged grid points are
/// dropped. Counting uses the absolute dyadic grid on the line, so horizons
/// other than 1 simply span more intervals per generation.
pub fn estimate_spectrum(
    field: &ExponentField,
    bin_width: f64,
    j_range: (u32, u32),
) -> Result<SpectrumEstimate> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParameter("bin width must be > 0".into()));
    }
    let (j1, j2) = j_range;
    if j1 > j2 {
        return Err(Error::InvalidParameter("j_range must be ordered".into()));
    }
    let max_points = field.len();
    if (j2 as f64 + 1.0) * std::f64::consts::LN_2 > (max_points as f64).ln() + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "generation {j2} is not resolved by a grid of {max_points} points"
        )));
    }
    let ceiling = if field.ceiling.is_finite() {
        field.ceiling
    } else {
        // β' = 0: no almost-sure cap; bin the observed range.
        field.h().iter().cloned().fold(0.0, f64::max).max(bin_width)
    };
    let n_bins = (ceiling / bin_width).ceil() as usize + 1;
    let gens = (j1..=j2).collect::<Vec<u32>>();

    // Distinct occupied dyadic cells per (generation, bin).
    let mut cells: Vec<Vec<u64>> = vec![Vec::new(); gens.len() * n_bins];
    let mut points = vec![0usize; n_bins];
    for i in 0..field.len() {
        if field.flagged()[i] {
            continue;
        }
        let h = field.h()[i];
        let bin = ((h / bin_width) as usize).min(n_bins - 1);
        points[bin] += 1;
        let t = field.grid_time(i);
        for (gi, &g) in gens.iter().enumerate() {
            let cell = (t * 2.0_f64.powi(g as i32)).floor() as u64;
            cells[gi * n_bins + bin].push(cell);
        }
    }

    let mut rows = Vec::with_capacity(n_bins);
    for bin in 0..n_bins {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (gi, &g) in gens.iter().enumerate() {
            let v = &mut cells[gi * n_bins + bin];
            v.sort_unstable();
            v.dedup();
            if !v.is_empty() {
                xs.push(g as f64);
                ys.push((v.len() as f64).log2());
            }
        }
        let (dim, dim_raw, r2) = if xs.len() >= 3 {
            let (slope, _, r2) = linear_fit(&xs, &ys);
            (Some(slope.clamp(0.0, 1.0)), Some(slope), Some(r2))
        } else {
            (None, None, None)
        };
        rows.push(SpectrumRow {
            h_center: (bin as f64 + 0.5) * bin_width,
            dim,
            dim_raw,
            r2,
            points: points[bin],
        });
    }
    Ok(SpectrumEstimate { bin_width, j_range, rows })
}

/// Coarse-grained spectrum straight from jump records.
///
/// At each generation `j` every dyadic interval `I` receives the exponent of
/// its own scale: `ĥ_j(I) = min(a_min/j, ceiling)` where `2^{-a_min}` is the
/// largest jump size in the 3-interval neighborhood `3I`. Intervals with no
/// jump in the neighborhood are skipped. This matched-scale classification
/// avoids the cross-scale saturation a fixed point field suffers when one
/// window feeds every generation, and is the standard box-counting surrogate
/// for the dimension of `E_h`.
pub fn coarse_spectrum(
    jumps: &crate::jumps::JumpSet,
    bin_width: f64,
    j_range: (u32, u32),
) -> Result<SpectrumEstimate> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParameter("bin width must be > 0".into()));
    }
    let (j1, j2) = j_range;
    if j1 == 0 || j1 > j2 {
        return Err(Error::InvalidParameter("need 1 ≤ j1 ≤ j2".into()));
    }
    let ceiling = jumps.model.holder_ceiling()?;
    let top = if ceiling.is_finite() { ceiling } else { 4.0 };
    let n_bins = (top / bin_width).ceil() as usize + 1;
    let gens: Vec<u32> = (j1..=j2).collect();
    let mut counts = vec![vec![0u64; n_bins]; gens.len()];
    let mut points = vec![0usize; n_bins];

    for (gi, &g) in gens.iter().enumerate() {
        let cells = (jumps.horizon * 2.0_f64.powi(g as i32)).ceil() as usize;
        let mut max_size = vec![0.0_f64; cells];
        for i in 0..jumps.len() {
            let size = jumps.sizes()[i];
            if size > 1.0 {
                continue;
            }
            let cell = ((jumps.times()[i] * 2.0_f64.powi(g as i32)) as usize).min(cells - 1);
            let lo = cell.saturating_sub(1);
            let hi = (cell + 1).min(cells - 1);
            for m in &mut max_size[lo..=hi] {
                if size > *m {
                    *m = size;
                }
            }
        }
        for &m in &max_size {
            if m == 0.0 {
                continue;
            }
            let h = (-m.log2() / g as f64).min(ceiling);
            let bin = ((h / bin_width) as usize).min(n_bins - 1);
            counts[gi][bin] += 1;
            points[bin] += 1;
        }
    }

    Ok(assemble_rows(&gens, &counts, &points, bin_width, j_range, 1.0))
}

pub(crate) fn assemble_rows(
    gens: &[u32],
    counts: &[Vec<u64>],
    points: &[usize],
    bin_width: f64,
    j_range: (u32, u32),
    dim_cap: f64,
) -> SpectrumEstimate {
    let n_bins = points.len();
    let mut rows = Vec::with_capacity(n_bins);
    for bin in 0..n_bins {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (gi, &g) in gens.iter().enumerate() {
            let n = counts[gi][bin];
            if n > 0 {
                xs.push(g as f64);
                ys.push((n as f64).log2());
            }
        }
        let (dim, dim_raw, r2) = if xs.len() >= 3 {
            let (slope, _, r2) = linear_fit(&xs, &ys);
            (Some(slope.clamp(0.0, dim_cap)), Some(slope), Some(r2))
        } else {
            (None, None, None)
        };
        rows.push(SpectrumRow {
            h_center: (bin as f64 + 0.5) * bin_width,
            dim,
            dim_raw,
            r2,
            points: points[bin],
        });
    }
    SpectrumEstimate { bin_width, j_range, rows }
}
