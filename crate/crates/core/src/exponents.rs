//! Pointwise approximation exponents from jump data.
//!
//! A time `t` lies in the approximation set `L_{Id^{1/α}}` exactly when
//! `|t−s| < size^{1/α}` for (infinitely many) jumps `s`; taking logarithms of
//! both sides — both negative — membership reads `α > log(size)/log|t−s|`.
//! The per-jump ratio `q(t,s) = log(size)/log|t−s|` is therefore the
//! approximation quality of `s` at `t`, and the finite-resolution Hölder
//! estimate is the *minimum* of `q(t,s)` over the jumps of a size window,
//! capped at the almost-sure ceiling `1/β'`. Points with no usable jump are
//! flagged rather than given a fake value.

use crate::error::{Error, Result};
use crate::jumps::JumpSet;

/// Pointwise exponent estimates on a uniform grid of `[0, T]`.
#[derive(Debug, Clone)]
pub struct ExponentField {
    pub horizon: f64,
    /// Shell window `(j_lo, j_hi)` of the jumps used.
    pub window: (u32, u32),
    /// The cap `1/β'`; `f64::INFINITY` when `β' = 0`.
    pub ceiling: f64,
    alpha: Vec<f64>,
    h: Vec<f64>,
    flagged: Vec<bool>,
}

impl ExponentField {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn grid_time(&self, i: usize) -> f64 {
        self.horizon * (i as f64 + 0.5) / self.len() as f64
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

    /// Median of the unflagged Hölder estimates.
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

/// Computes the exponent field on `m_points` grid cells.
///
/// For every grid point the estimator minimizes `log(size)/log|t−s|` over
/// the in-window jumps with `0 < |t−s| < 1` (grid points that coincide with
/// a jump time skip that jump: those belong to the excluded jump-time set).
/// One sorted sweep per shell with an outward scan bounded by the current
/// minimum keeps the cost near `O((M + records)·shells)`.
pub fn approximation_exponents(
    jumps: &JumpSet,
    m_points: usize,
    window: (u32, u32),
) -> Result<ExponentField> {
    if m_points < 2 {
        return Err(Error::InvalidParameter("need at least 2 grid points".into()));
    }
    let (j_lo, j_hi) = window;
    if j_lo > j_hi {
        return Err(Error::InvalidParameter("window must satisfy j_lo ≤ j_hi".into()));
    }
    let t_horizon = jumps.horizon;
    let ceiling = jumps.model.holder_ceiling()?;
    let mut best = vec![f64::INFINITY; m_points];

    for shell in j_lo..=j_hi {
        let size_lo = 2.0_f64.powi(-(shell as i32) - 1);
        let size_hi = 2.0_f64.powi(-(shell as i32)).min(1.0);
        // (time, −ln size) of this shell's jumps, time-sorted.
        let recs: Vec<(f64, f64)> = jumps
            .times()
            .iter()
            .zip(jumps.sizes())
            .filter(|(_, s)| **s > size_lo && **s <= size_hi)
            .map(|(t, s)| (*t, -s.ln()))
            .collect();
        if recs.is_empty() {
            continue;
        }
        let u_min = shell as f64 * std::f64::consts::LN_2;
        let mut ptr = 0usize;
        for (i, b) in best.iter_mut().enumerate() {
            let t = t_horizon * (i as f64 + 0.5) / m_points as f64;
            while ptr < recs.len() && recs[ptr].0 < t {
                ptr += 1;
            }
            // A shell record beats the current best q only within
            // exp(−u_min/q) of t; tighten the bound as the best improves.
            let mut bound = if b.is_finite() { (-u_min / *b).exp() } else { 1.0 };
            let consider = |time: f64, u: f64, b: &mut f64| {
                let dist = (t - time).abs();
                if dist == 0.0 || dist >= 1.0 {
                    return;
                }
                let q = u / -dist.ln();
                if q < *b {
                    *b = q;
                }
            };
            let mut right = ptr;
            while right < recs.len() && (recs[right].0 - t) < bound {
                consider(recs[right].0, recs[right].1, b);
                bound = bound.min((-u_min / *b).exp());
                right += 1;
            }
            let mut left = ptr;
            while left > 0 && (t - recs[left - 1].0) < bound {
                consider(recs[left - 1].0, recs[left - 1].1, b);
                bound = bound.min((-u_min / *b).exp());
                left -= 1;
            }
        }
    }

    let mut alpha = Vec::with_capacity(m_points);
    let mut h = Vec::with_capacity(m_points);
    let mut flagged = Vec::with_capacity(m_points);
    for q in best {
        if q.is_finite() {
            alpha.push(q);
            h.push(q.min(ceiling));
            flagged.push(false);
        } else {
            // Insufficient data: sentinel zero, flagged, never silently used.
            alpha.push(0.0);
            h.push(0.0);
            flagged.push(true);
        }
    }
    Ok(ExponentField { horizon: t_horizon, window, ceiling, alpha, h, flagged })
}
