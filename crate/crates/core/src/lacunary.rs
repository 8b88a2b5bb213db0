//! Lacunary random wavelet series on the torus.
//!
//! The model places `m_{i,j}` nonvanishing coefficients of size `2^{-h̲ j}`
//! at uniform random positions, per direction `i` and generation `j`. All of
//! the pointwise analysis reduces to the geometry of the occupied dyadic
//! cubes: a point's Hölder estimate is the minimum of
//! `h̲·⟨λ⟩ / log₂(1/𝔡(x, x_λ))` over occupied cubes `λ` in a generation
//! window (the same min-of-log-ratios estimator as for jump processes,
//! clipped to the admissible band `[h̲, h̄]`). Distances use the
//! max-coordinate quotient metric.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{GaugeForm, GaugeFunction};
use crate::modulus::Modulus;
use crate::rng::{substream, tags};
use crate::series::{self, classify_terms, linear_fit, ExponentEstimate, ThresholdOutcome};

/// Hard cap on the total number of sampled coefficient positions.
pub const MAX_COEFFICIENTS: f64 = 1e8;

/// Per-scale coefficient counts `m_{i,j}`, identical across directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "counts", rename_all = "snake_case")]
pub enum CountGenerator {
    /// `m_{i,j} = ⌊2^{η j}⌋` with `η ∈ (0, d)`.
    Eta { eta: f64 },
    /// `m_{i,j} = m` at every scale.
    Constant { m: u64 },
    /// Explicit per-generation table, zero beyond its end.
    Table { rows: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunaryModel {
    /// Torus dimension `d ≥ 1`.
    pub dim: u32,
    /// Coefficient size exponent `h̲ > 0` (coefficients are `2^{-h̲ j}`).
    pub h_base: f64,
    pub counts: CountGenerator,
    pub seed: u64,
}

impl LacunaryModel {
    pub fn new(dim: u32, h_base: f64, counts: CountGenerator, seed: u64) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::InvalidParameter("torus dimension must lie in 1..=3".into()));
        }
        if !(h_base > 0.0) {
            return Err(Error::InvalidParameter("h_base must be > 0".into()));
        }
        if let CountGenerator::Eta { eta } = counts {
            if !(eta > 0.0 && eta < dim as f64) {
                return Err(Error::InvalidParameter("eta must lie in (0, d)".into()));
            }
        }
        Ok(Self { dim, h_base, counts, seed })
    }

    /// Number of wavelet directions, `2^d − 1`.
    pub fn directions(&self) -> u32 {
        (1u32 << self.dim) - 1
    }

    /// `m_{i,j}`, clamped to the cube count `2^{dj}`.
    pub fn count(&self, _direction: u32, j: u32) -> u64 {
        let cap = 1u64 << (self.dim * j).min(62);
        let raw = match &self.counts {
            CountGenerator::Eta { eta } => 2.0_f64.powf(eta * j as f64).floor() as u64,
            CountGenerator::Constant { m } => *m,
            CountGenerator::Table { rows } => rows.get(j as usize).copied().unwrap_or(0),
        };
        raw.min(cap)
    }

    /// Total coefficients across directions at one generation.
    fn level_count(&self, j: u32) -> u64 {
        self.directions() as u64 * self.count(0, j)
    }

    /// Critical exponent `h_g = inf{h | Σ m_{i,j} g_d(2^{-h̲ j/h}) = ∞}`.
    pub fn h_g(&self, g: &GaugeFunction) -> Result<ExponentEstimate> {
        let gd = g.normalize_to(self.dim);
        if gd.is_zero() {
            return Ok(ExponentEstimate::Infinite);
        }
        // Power-counting fast path: Σ 2^{ηj} 2^{-s h̲ j / h} splits at
        // h = s·h̲/η exactly.
        if let (GaugeForm::Power { s }, CountGenerator::Eta { eta }) = (gd.form(), &self.counts) {
            return Ok(ExponentEstimate::Point(s * self.h_base / eta));
        }
        let h_base = self.h_base;
        let counts: Vec<f64> =
            (0..=series::DEFAULT_J_MAX).map(|j| self.level_count(j) as f64).collect();
        let outcome = series::find_threshold(0.0625, 64.0, true, |h| {
            classify_terms(
                |j| counts[j as usize] * gd.eval(2.0_f64.powf(-h_base * j as f64 / h)),
                series::DEFAULT_J_MAX,
            )
        });
        Ok(match outcome {
            ThresholdOutcome::AllConverge => ExponentEstimate::Infinite,
            ThresholdOutcome::AllDiverge => ExponentEstimate::Point(0.0),
            ThresholdOutcome::Estimate(e) => e,
        })
    }

    /// `h̄ = h_{Id^d}`, the almost-everywhere Hölder exponent.
    pub fn hbar(&self) -> Result<ExponentEstimate> {
        let g = GaugeFunction::power(self.dim as f64, self.dim)?;
        self.h_g(&g)
    }
}

/// An occupied dyadic cube `(i, j, k)` of the support set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SupportCube {
    pub direction: u32,
    pub generation: u32,
    /// Packed cell index: 21 bits per axis.
    pub cell: u64,
}

/// The sampled coefficient support: the set `M` of occupied cubes, plus
/// per-(direction, generation) distinct-cube counts.
#[derive(Debug, Clone)]
pub struct CoefficientSupport {
    pub dim: u32,
    pub j_max: u32,
    cubes: Vec<SupportCube>,
    pub occupied: Vec<((u32, u32), u64)>,
}

/// Axis width in the packed cell index.
const AXIS_BITS: u32 = 21;

fn pack_cell(coords: &[u64]) -> u64 {
    coords.iter().enumerate().fold(0u64, |acc, (a, &k)| acc | (k << (AXIS_BITS * a as u32)))
}

fn unpack_cell(cell: u64, dim: u32) -> [u64; 3] {
    let mask = (1u64 << AXIS_BITS) - 1;
    let mut out = [0u64; 3];
    for a in 0..dim {
        out[a as usize] = (cell >> (AXIS_BITS * a)) & mask;
    }
    out
}

impl CoefficientSupport {
    pub fn cubes(&self) -> &[SupportCube] {
        &self.cubes
    }

    /// Distinct occupied cells at generation `j`, directions merged, sorted.
    pub fn cells_at(&self, j: u32) -> Vec<u64> {
        let mut v: Vec<u64> =
            self.cubes.iter().filter(|c| c.generation == j).map(|c| c.cell).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Corner coordinates `x_λ = k·2^{-j}` of a cube.
    pub fn corner(&self, cube: &SupportCube) -> [f64; 3] {
        let k = unpack_cell(cube.cell, self.dim);
        let w = 2.0_f64.powi(-(cube.generation as i32));
        [k[0] as f64 * w, k[1] as f64 * w, k[2] as f64 * w]
    }
}

/// Exact expectation of the number of distinct occupied cubes when `m`
/// positions fall uniformly on `2^{dj}` cubes: `2^{dj}(1 − (1 − 2^{-dj})^m)`.
pub fn expected_distinct(dim: u32, j: u32, m: u64) -> f64 {
    let cells = 2.0_f64.powi((dim * j) as i32);
    let log_miss = (m as f64) * (-1.0 / cells).ln_1p();
    cells * (-log_miss.exp_m1())
}

/// Samples the support up to generation `j_max`. Deterministic per model
/// seed; each `(direction, generation)` pair owns an RNG substream.
pub fn sample_support(model: &LacunaryModel, j_max: u32) -> Result<CoefficientSupport> {
    let max_gen = if model.dim == 1 { 40 } else { AXIS_BITS - 1 };
    if j_max < 4 || j_max > max_gen {
        return Err(Error::InvalidParameter(format!(
            "j_max must lie in 4..={max_gen} for dimension {}",
            model.dim
        )));
    }
    let total: f64 = (0..=j_max).map(|j| model.level_count(j) as f64).sum();
    if total > MAX_COEFFICIENTS {
        return Err(Error::ResourceLimit {
            what: "lacunary coefficient count",
            estimate: total,
            limit: MAX_COEFFICIENTS,
        });
    }
    let mut cubes = Vec::with_capacity(total as usize);
    let mut occupied = Vec::new();
    for i in 1..=model.directions() {
        for j in 0..=j_max {
            let m = model.count(i, j);
            if m == 0 {
                continue;
            }
            let mut rng = substream(model.seed, &[tags::LACUNARY, i as u64, j as u64]);
            let scale = 2.0_f64.powi(j as i32);
            let before = cubes.len();
            for _ in 0..m {
                let mut coords = [0u64; 3];
                for c in coords.iter_mut().take(model.dim as usize) {
                    let u: f64 = rng.random();
                    *c = ((u * scale) as u64).min(scale as u64 - 1);
                }
                cubes.push(SupportCube {
                    direction: i,
                    generation: j,
                    cell: pack_cell(&coords[..model.dim as usize]),
                });
            }
            let slice = &mut cubes[before..];
            slice.sort_unstable();
            let mut distinct = 0u64;
            let mut prev: Option<u64> = None;
            for c in slice.iter() {
                if prev != Some(c.cell) {
                    distinct += 1;
                    prev = Some(c.cell);
                }
            }
            occupied.push(((i, j), distinct));
        }
    }
    cubes.sort_unstable();
    cubes.dedup();
    Ok(CoefficientSupport { dim: model.dim, j_max, cubes, occupied })
}

/// Torus distance in the max-coordinate quotient metric.
fn torus_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).abs();
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

/// Pointwise exponent estimates on a uniform lattice of the torus.
#[derive(Debug, Clone)]
pub struct TorusExponentField {
    pub dim: u32,
    pub grid_m: usize,
    pub h_base: f64,
    /// `h̄` as an extended real.
    pub h_bar: f64,
    pub window: (u32, u32),
    alpha: Vec<f64>,
    h: Vec<f64>,
    flagged: Vec<bool>,
}

impl TorusExponentField {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn flagged(&self) -> &[bool] {
        &self.flagged
    }

    /// Lattice coordinates of flat index `i`.
    pub fn grid_point(&self, i: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        let mut rest = i;
        for a in 0..self.dim as usize {
            out[a] = ((rest % self.grid_m) as f64 + 0.5) / self.grid_m as f64;
            rest /= self.grid_m;
        }
        out
    }

    pub fn median_h(&self) -> Option<f64> {
        let mut vals: Vec<f64> =
            self.h.iter().zip(&self.flagged).filter(|(_, f)| !**f).map(|(h, _)| *h).collect();
        if vals.is_empty() {
            return None;
        }
        vals.sort_by(f64::total_cmp);
        Some(vals[vals.len() / 2])
    }
}

/// Computes the exponent field from coefficient geometry.
///
/// `alpha(x) = min over occupied cubes λ (generation in the window) of
/// `h̲·⟨λ⟩ / log₂(1/𝔡(x, x_λ))`; an exact corner hit contributes 0 (the
/// sharpest possible singularity). `h` clips alpha to `[h̲, h̄]`.
pub fn torus_exponents(
    support: &CoefficientSupport,
    model: &LacunaryModel,
    grid_m: usize,
    window: (u32, u32),
) -> Result<TorusExponentField> {
    let (j_lo, j_hi) = window;
    if j_lo > j_hi || j_hi > support.j_max {
        return Err(Error::InvalidParameter("window out of the sampled range".into()));
    }
    if grid_m < 2 {
        return Err(Error::InvalidParameter("grid_m must be ≥ 2".into()));
    }
    let n_points = (grid_m as u64).pow(model.dim) as usize;
    let mut best = vec![f64::INFINITY; n_points];
    match model.dim {
        1 => torus_exponents_1d(support, model, grid_m, window, &mut best),
        _ => torus_exponents_nd(support, model, grid_m, window, &mut best)?,
    }

    let h_bar = model.hbar()?.as_extended();
    let hb = model.h_base;
    let mut alpha = Vec::with_capacity(n_points);
    let mut h = Vec::with_capacity(n_points);
    let mut flagged = Vec::with_capacity(n_points);
    for q in best {
        if q.is_finite() {
            alpha.push(q);
            h.push(q.clamp(hb, h_bar));
            flagged.push(false);
        } else {
            alpha.push(0.0);
            h.push(hb);
            flagged.push(true);
        }
    }
    Ok(TorusExponentField {
        dim: model.dim,
        grid_m,
        h_base: model.h_base,
        h_bar,
        window,
        alpha,
        h,
        flagged,
    })
}

fn torus_exponents_1d(
    support: &CoefficientSupport,
    model: &LacunaryModel,
    grid_m: usize,
    window: (u32, u32),
    best: &mut [f64],
) {
    let hb = model.h_base;
    for j in window.0..=window.1 {
        let cells = support.cells_at(j);
        if cells.is_empty() {
            continue;
        }
        let w = 2.0_f64.powi(-(j as i32));
        // Corners extended periodically one turn either way.
        let mut corners: Vec<f64> = Vec::with_capacity(cells.len() * 3);
        for &k in &cells {
            let x = k as f64 * w;
            corners.extend_from_slice(&[x - 1.0, x, x + 1.0]);
        }
        corners.sort_by(f64::total_cmp);
        let u_min = hb * j as f64 * std::f64::consts::LN_2;
        let mut ptr = 0usize;
        for (i, b) in best.iter_mut().enumerate() {
            let x = (i as f64 + 0.5) / grid_m as f64;
            while ptr < corners.len() && corners[ptr] < x {
                ptr += 1;
            }
            let mut bound = if b.is_finite() { (-u_min / *b).exp() } else { 0.5 };
            let consider = |c: f64, b: &mut f64| {
                let dist = (x - c).abs();
                if dist >= 0.5 {
                    return;
                }
                let q = if dist == 0.0 { 0.0 } else { u_min / -dist.ln() };
                if q < *b {
                    *b = q;
                }
            };
            let mut right = ptr;
            while right < corners.len() && (corners[right] - x) < bound {
                consider(corners[right], b);
                bound = bound.min((-u_min / *b).exp());
                right += 1;
            }
            let mut left = ptr;
            while left > 0 && (x - corners[left - 1]) < bound {
                consider(corners[left - 1], b);
                bound = bound.min((-u_min / *b).exp());
                left -= 1;
            }
        }
    }
}

fn torus_exponents_nd(
    support: &CoefficientSupport,
    model: &LacunaryModel,
    grid_m: usize,
    window: (u32, u32),
    best: &mut [f64],
) -> Result<()> {
    let hb = model.h_base;
    let dim = model.dim;
    let n_points = best.len();
    let mut total_corners = 0usize;
    let mut corners_by_gen: Vec<(u32, Vec<[f64; 3]>)> = Vec::new();
    for j in window.0..=window.1 {
        let cells = support.cells_at(j);
        total_corners += cells.len();
        let w = 2.0_f64.powi(-(j as i32));
        let pts = cells
            .iter()
            .map(|&cell| {
                let k = unpack_cell(cell, dim);
                [k[0] as f64 * w, k[1] as f64 * w, k[2] as f64 * w]
            })
            .collect();
        corners_by_gen.push((j, pts));
    }
    // Quadratic scan; meant for smoke-scale lattices in d ≥ 2.
    let work = n_points as f64 * total_corners as f64;
    if work > 2e8 {
        return Err(Error::ResourceLimit {
            what: "torus exponent scan (grid × corners)",
            estimate: work,
            limit: 2e8,
        });
    }
    for (i, b) in best.iter_mut().enumerate() {
        let mut x = [0.0_f64; 3];
        let mut rest = i;
        for xa in x.iter_mut().take(dim as usize) {
            *xa = ((rest % grid_m) as f64 + 0.5) / grid_m as f64;
            rest /= grid_m;
        }
        for (j, pts) in &corners_by_gen {
            let u = hb * *j as f64 * std::f64::consts::LN_2;
            for c in pts {
                let dist = torus_dist(&x[..dim as usize], &c[..dim as usize]);
                if dist >= 0.5 {
                    continue;
                }
                let q = if dist == 0.0 { 0.0 } else { u / -dist.ln() };
                if q < *b {
                    *b = q;
                }
            }
        }
    }
    Ok(())
}

/// Spectrum rows for the lacunary field (dimension estimates in `[0, d]`).
pub fn lacunary_spectrum(
    field: &TorusExponentField,
    bin_width: f64,
    j_range: (u32, u32),
) -> Result<crate::spectrum::SpectrumEstimate> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParameter("bin width must be > 0".into()));
    }
    let (j1, j2) = j_range;
    if j1 > j2 {
        return Err(Error::InvalidParameter("j_range must be ordered".into()));
    }
    if 2.0_f64.powi(j2 as i32) > field.grid_m as f64 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "generation {j2} is not resolved by a lattice of {} points per axis",
            field.grid_m
        )));
    }
    let ceiling = if field.h_bar.is_finite() {
        field.h_bar
    } else {
        field.h().iter().cloned().fold(0.0, f64::max).max(bin_width)
    };
    let n_bins = (ceiling / bin_width).ceil() as usize + 1;
    let gens: Vec<u32> = (j1..=j2).collect();
    let dim = field.dim;

    let mut cells: Vec<Vec<u64>> = vec![Vec::new(); gens.len() * n_bins];
    let mut points = vec![0usize; n_bins];
    for i in 0..field.len() {
        if field.flagged()[i] {
            continue;
        }
        let h = field.h()[i];
        let bin = ((h / bin_width) as usize).min(n_bins - 1);
        points[bin] += 1;
        let x = field.grid_point(i);
        for (gi, &g) in gens.iter().enumerate() {
            let scale = 2.0_f64.powi(g as i32);
            let mut coords = [0u64; 3];
            for a in 0..dim as usize {
                coords[a] = ((x[a] * scale) as u64).min(scale as u64 - 1);
            }
            cells[gi * n_bins + bin].push(pack_cell(&coords[..dim as usize]));
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
        let (dim_est, dim_raw, r2) = if xs.len() >= 3 {
            let (slope, _, r2) = linear_fit(&xs, &ys);
            (Some(slope.clamp(0.0, dim as f64)), Some(slope), Some(r2))
        } else {
            (None, None, None)
        };
        rows.push(crate::spectrum::SpectrumRow {
            h_center: (bin as f64 + 0.5) * bin_width,
            dim: dim_est,
            dim_raw,
            r2,
            points: points[bin],
        });
    }
    Ok(crate::spectrum::SpectrumEstimate { bin_width, j_range, rows })
}

/// Coarse-grained lacunary spectrum straight from the coefficient support.
///
/// At generation `g` every dyadic cube `K` of the torus gets the exponent of
/// its own scale: `ĥ_g(K) = clip(h̲ · j_min/g, [h̲, h̄])`, where `j_min` is
/// the smallest generation among occupied cubes whose corner falls in the
/// 3^d-cube neighborhood of `K`. Cubes with no nearby coefficient are
/// skipped. Matched-scale classification keeps the level-set counts on their
/// theoretical `2^{g·dh/h̄}` growth, which a fixed point field cannot do
/// across generations.
pub fn coarse_lacunary_spectrum(
    support: &CoefficientSupport,
    model: &LacunaryModel,
    bin_width: f64,
    j_range: (u32, u32),
) -> Result<crate::spectrum::SpectrumEstimate> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParameter("bin width must be > 0".into()));
    }
    let (j1, j2) = j_range;
    if j1 == 0 || j1 > j2 {
        return Err(Error::InvalidParameter("need 1 ≤ j1 ≤ j2".into()));
    }
    if model.dim != 1 {
        // The d ≥ 2 analysis runs at smoke scale through the point field.
        return Err(Error::InvalidParameter(
            "coarse lacunary spectrum is implemented for d = 1".into(),
        ));
    }
    let h_bar = model.hbar()?.as_extended();
    let hb = model.h_base;
    let top = if h_bar.is_finite() { h_bar } else { 8.0 * hb };
    let n_bins = (top / bin_width).ceil() as usize + 1;
    let gens: Vec<u32> = (j1..=j2).collect();
    let mut counts = vec![vec![0u64; n_bins]; gens.len()];
    let mut points = vec![0usize; n_bins];

    for (gi, &g) in gens.iter().enumerate() {
        let cells = 1usize << g;
        let mut min_gen = vec![u32::MAX; cells];
        for j in 0..=support.j_max {
            let occupied = support.cells_at(j);
            if occupied.is_empty() {
                continue;
            }
            let w = 2.0_f64.powi(-(j as i32));
            for &k in &occupied {
                let corner = k as f64 * w;
                let cell = ((corner * cells as f64) as usize).min(cells - 1);
                for offset in [cells - 1, 0, 1] {
                    let idx = (cell + offset) % cells;
                    if min_gen[idx] == u32::MAX {
                        min_gen[idx] = j;
                    }
                }
            }
        }
        for &jm in &min_gen {
            if jm == u32::MAX {
                continue;
            }
            let h = (hb * jm as f64 / g as f64).clamp(hb, h_bar);
            let bin = ((h / bin_width) as usize).min(n_bins - 1);
            counts[gi][bin] += 1;
            points[bin] += 1;
        }
    }

    Ok(crate::spectrum::assemble_rows(&gens, &counts, &points, bin_width, j_range, 1.0))
}

/// A dyadic indicator raster on the torus at one depth.
#[derive(Debug, Clone)]
pub struct TorusRaster {
    pub dim: u32,
    pub depth: u32,
    bits: Vec<u64>,
}

impl TorusRaster {
    fn empty(dim: u32, depth: u32) -> Result<Self> {
        if dim * depth > 26 {
            return Err(Error::ResourceLimit {
                what: "raster cells",
                estimate: 2.0_f64.powi((dim * depth) as i32),
                limit: 2.0_f64.powi(26),
            });
        }
        let n_cells = 1usize << (dim * depth);
        Ok(Self { dim, depth, bits: vec![0u64; n_cells.div_ceil(64)] })
    }

    fn set(&mut self, idx: usize) {
        self.bits[idx / 64] |= 1u64 << (idx % 64);
    }

    fn get(&self, idx: usize) -> bool {
        self.bits[idx / 64] & (1u64 << (idx % 64)) != 0
    }

    pub fn cell_count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Normalized volume: occupied cells × cell volume.
    pub fn volume(&self) -> f64 {
        self.cell_count() as f64 * 2.0_f64.powi(-((self.dim * self.depth) as i32))
    }

    fn intersect_with(&mut self, other: &TorusRaster) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    /// Occupied-cell counts at coarser generations `j ≤ depth`.
    pub fn box_counts(&self, j_range: (u32, u32)) -> Result<Vec<(u32, u64)>> {
        let (j1, j2) = j_range;
        if j2 > self.depth {
            return Err(Error::InvalidParameter("box generation beyond raster depth".into()));
        }
        let mut out = Vec::new();
        let mut current = self.clone();
        let mut level = self.depth;
        loop {
            if level <= j2 && level >= j1 {
                out.push((level, current.cell_count()));
            }
            if level == 0 || level <= j1 {
                break;
            }
            current = current.coarsen()?;
            level -= 1;
        }
        out.reverse();
        Ok(out)
    }

    /// Box-dimension slope over the given generations.
    pub fn box_dimension(&self, j_range: (u32, u32)) -> Result<(f64, f64)> {
        let counts = self.box_counts(j_range)?;
        let usable: Vec<(f64, f64)> = counts
            .iter()
            .filter(|(_, n)| *n > 0)
            .map(|(j, n)| (*j as f64, (*n as f64).log2()))
            .collect();
        if usable.len() < 3 {
            return Err(Error::InsufficientScales { got: usable.len(), need: 3 });
        }
        let xs: Vec<f64> = usable.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = usable.iter().map(|p| p.1).collect();
        let (slope, _, r2) = linear_fit(&xs, &ys);
        Ok((slope, r2))
    }

    /// One-generation coarsening: a parent cell is occupied when any of its
    /// `2^d` children is.
    fn coarsen(&self) -> Result<TorusRaster> {
        if self.depth == 0 {
            return Err(Error::InvalidParameter("cannot coarsen depth 0".into()));
        }
        let mut parent = TorusRaster::empty(self.dim, self.depth - 1)?;
        let m_child = 1usize << self.depth;
        let m_parent = m_child / 2;
        let n_cells = 1usize << (self.dim * self.depth);
        for idx in 0..n_cells {
            if !self.get(idx) {
                continue;
            }
            // Unpack per-axis child coordinates (row-major by axis).
            let mut rest = idx;
            let mut pidx = 0usize;
            let mut stride = 1usize;
            for _ in 0..self.dim {
                let coord = rest % m_child;
                rest /= m_child;
                pidx += (coord / 2) * stride;
                stride *= m_parent;
            }
            parent.set(pidx);
        }
        Ok(parent)
    }
}

/// Rasterizes the modulus exceptional-set approximant
/// `∩_{q=1..q_max} L_{φ_q}` with `φ_q(r) = w̃⁻¹(r^{h̲}/κ^q)`.
///
/// Requires `w(δ) = o(δ^{h̲})` (grid-validated), the admissible class for
/// the wavelet modulus theorem. Balls are sup-metric cubes, so rasterization
/// marks an axis-aligned block per coefficient.
pub fn lacunary_modulus_set(
    support: &CoefficientSupport,
    model: &LacunaryModel,
    w: &Modulus,
    q_max: u32,
    window: (u32, u32),
    raster_depth: u32,
) -> Result<TorusRaster> {
    if q_max < 1 {
        return Err(Error::InvalidParameter("q_max must be ≥ 1".into()));
    }
    if !w.is_little_o_of_power(model.h_base) {
        return Err(Error::Modulus(format!(
            "w is not o(δ^{}) on the dyadic grid",
            model.h_base
        )));
    }
    let kappa = w.kappa1();
    let mut acc: Option<TorusRaster> = None;
    for q in 1..=q_max {
        let mut raster = TorusRaster::empty(model.dim, raster_depth)?;
        let denom = kappa.powi(q as i32);
        for j in window.0..=window.1 {
            let radius = w.pseudo_inverse(2.0_f64.powf(-model.h_base * j as f64) / denom);
            if radius <= 0.0 {
                continue;
            }
            let cells = support.cells_at(j);
            let wj = 2.0_f64.powi(-(j as i32));
            for &cell in &cells {
                let k = unpack_cell(cell, model.dim);
                let corner: Vec<f64> =
                    (0..model.dim as usize).map(|a| k[a] as f64 * wj).collect();
                mark_ball(&mut raster, &corner, radius);
            }
        }
        acc = Some(match acc {
            None => raster,
            Some(mut prev) => {
                prev.intersect_with(&raster);
                prev
            }
        });
    }
    Ok(acc.unwrap())
}

/// Marks every raster cell meeting the (closed) sup-ball.
fn mark_ball(raster: &mut TorusRaster, center: &[f64], radius: f64) {
    let m = 1i64 << raster.depth;
    let scale = m as f64;
    let dim = raster.dim as usize;
    let mut ranges: Vec<Vec<usize>> = Vec::with_capacity(dim);
    for &c in center.iter().take(dim) {
        let lo = ((c - radius) * scale).floor() as i64;
        let hi = ((c + radius) * scale).floor() as i64;
        let cells: Vec<usize> =
            (lo..=hi.min(lo + m - 1)).map(|k| (k.rem_euclid(m)) as usize).collect();
        ranges.push(cells);
    }
    // Cartesian product over axes (d ≤ 3, blocks are small in practice).
    match dim {
        1 => {
            for &a in &ranges[0] {
                raster.set(a);
            }
        }
        2 => {
            let m_usize = m as usize;
            for &b in &ranges[1] {
                for &a in &ranges[0] {
                    raster.set(b * m_usize + a);
                }
            }
        }
        _ => {
            let m_usize = m as usize;
            for &c in &ranges[2] {
                for &b in &ranges[1] {
                    for &a in &ranges[0] {
                        raster.set((c * m_usize + b) * m_usize + a);
                    }
                }
            }
        }
    }
}

/// Built-in smooth profiles for visualization-only synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveletProfile {
    /// `exp(1 − 1/(1 − y²))` per axis on `|y| < 1`, zero outside.
    Bump,
    /// `cos²(πy/2)` per axis on `|y| < 1`, zero outside.
    CosineArch,
}

impl WaveletProfile {
    fn eval_axis(self, y: f64) -> f64 {
        let a = y.abs();
        if a >= 1.0 {
            return 0.0;
        }
        match self {
            WaveletProfile::Bump => (1.0 - 1.0 / (1.0 - y * y)).exp(),
            WaveletProfile::CosineArch => {
                let c = (std::f64::consts::FRAC_PI_2 * y).cos();
                c * c
            }
        }
    }

    fn eval(self, y: &[f64]) -> f64 {
        y.iter().map(|&v| self.eval_axis(v)).product()
    }
}

/// Evaluates the partial sum `Σ 2^{-h̲⟨λ⟩} ψ(2^{⟨λ⟩}(x − x_λ))` on the
/// lattice. Visualization output only: the profiles are not an orthonormal
/// family and none of the analysis consumes these samples.
pub fn synthesize_partial_sum(
    support: &CoefficientSupport,
    model: &LacunaryModel,
    profile: WaveletProfile,
    j_max: u32,
    grid_m: usize,
) -> Result<Vec<f64>> {
    let dim = model.dim as usize;
    let n_points = (grid_m as u64).pow(model.dim) as usize;
    let mut out = vec![0.0_f64; n_points];
    let work = support.cubes.len() as f64 * n_points as f64;
    if work > 5e8 {
        return Err(Error::ResourceLimit {
            what: "synthesis work (coefficients × grid)",
            estimate: work,
            limit: 5e8,
        });
    }
    for cube in &support.cubes {
        if cube.generation > j_max {
            continue;
        }
        let amp = 2.0_f64.powf(-model.h_base * cube.generation as f64);
        let corner = support.corner(cube);
        let scale = 2.0_f64.powi(cube.generation as i32);
        for (i, o) in out.iter_mut().enumerate() {
            let mut y = [0.0_f64; 3];
            let mut rest = i;
            for (a, ya) in y.iter_mut().enumerate().take(dim) {
                let x = ((rest % grid_m) as f64 + 0.5) / grid_m as f64;
                rest /= grid_m;
                let mut d = x - corner[a];
                // Nearest periodic image.
                if d > 0.5 {
                    d -= 1.0;
                } else if d < -0.5 {
                    d += 1.0;
                }
                *ya = d * scale;
            }
            *o += amp * profile.eval(&y[..dim]);
        }
    }
    Ok(out)
}
