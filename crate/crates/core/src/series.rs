//! Shared divergence heuristic for shell-indexed series.
//!
//! Whether a nonnegative series `Σ_j a_j` converges cannot be decided from
//! finitely many terms, so every exponent computation in this crate funnels
//! through one explicit heuristic and surfaces `Inconclusive` instead of
//! guessing. Applied to the trailing terms of the series: all trailing
//! ratios ≤ [`RATIO_CONVERGE`] means the tail is dominated by a geometric
//! series (converges); all ratios ≥ [`RATIO_DIVERGE`] means the terms grow
//! (diverges); anything else is `Inconclusive`, reported with the partial
//! sum and the last observed ratio. Borderline tails (harmonic-rate decay)
//! land in `Inconclusive` by design — no trailing window can separate
//! `1/j` from `2^{-j/100}`.

use serde::Serialize;

/// Trailing geometric ratio at or below which the tail is called convergent.
pub const RATIO_CONVERGE: f64 = 0.95;
/// Trailing geometric ratio at or above which the terms are called growing.
pub const RATIO_DIVERGE: f64 = 1.05;
/// Number of trailing terms inspected by the ratio tests.
pub const TRAILING_TERMS: usize = 8;
/// Default number of shells fed to the classifier.
pub const DEFAULT_J_MAX: u32 = 48;

/// Verdict of the divergence heuristic on a shell series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Convergence {
    Converges,
    Diverges,
    Inconclusive { partial_sum: f64, last_ratio: f64 },
}

impl Convergence {
    pub fn is_converges(self) -> bool {
        matches!(self, Convergence::Converges)
    }

    pub fn is_diverges(self) -> bool {
        matches!(self, Convergence::Diverges)
    }
}

/// Classifies `Σ_{j=0..=j_max} term(j)` with the shared heuristic.
///
/// Terms must be nonnegative and finite. Shells with zero mass (atom measures
/// leave gaps) break plain ratios, so when the trailing window contains a mix
/// of zero and nonzero terms the test falls back to blocks of four consecutive
/// shells with the ratio thresholds raised to the fourth power.
pub fn classify_terms(term: impl Fn(u32) -> f64, j_max: u32) -> Convergence {
    assert!(j_max >= TRAILING_TERMS as u32, "need at least {TRAILING_TERMS} shells");
    let terms: Vec<f64> = (0..=j_max).map(term).collect();
    debug_assert!(terms.iter().all(|t| t.is_finite() && *t >= 0.0));
    let partial_sum: f64 = terms.iter().sum();

    let tail = &terms[terms.len() - TRAILING_TERMS..];
    let tail_max = tail.iter().cloned().fold(0.0_f64, f64::max);
    if tail_max == 0.0 {
        // Tail vanished entirely; treat the sum as finite.
        return Convergence::Converges;
    }
    if tail.iter().any(|&t| t == 0.0) {
        return classify_blocks(&terms, partial_sum);
    }

    ratio_verdict(tail, 1, partial_sum)
}

/// Block-of-four fallback for series with empty shells interleaved.
fn classify_blocks(terms: &[f64], partial_sum: f64) -> Convergence {
    let blocks: Vec<f64> = terms.chunks(4).map(|c| c.iter().sum()).collect();
    if blocks.len() < TRAILING_TERMS {
        return Convergence::Inconclusive { partial_sum, last_ratio: f64::NAN };
    }
    let tail = &blocks[blocks.len() - TRAILING_TERMS..];
    if tail.iter().cloned().fold(0.0_f64, f64::max) == 0.0 {
        return Convergence::Converges;
    }
    if tail.iter().any(|&t| t == 0.0) {
        return Convergence::Inconclusive { partial_sum, last_ratio: f64::NAN };
    }
    ratio_verdict(tail, 4, partial_sum)
}

fn ratio_verdict(tail: &[f64], block: usize, partial_sum: f64) -> Convergence {
    let ratios: Vec<f64> = tail.windows(2).map(|w| w[1] / w[0]).collect();
    let last_ratio = *ratios.last().unwrap();
    let conv = RATIO_CONVERGE.powi(block as i32);
    let div = RATIO_DIVERGE.powi(block as i32);

    if ratios.iter().all(|&r| r <= conv) {
        return Convergence::Converges;
    }
    if ratios.iter().all(|&r| r >= div) {
        return Convergence::Diverges;
    }
    Convergence::Inconclusive { partial_sum, last_ratio }
}

/// An exponent resolved by bisection: a point, an interval the heuristic could
/// not split further, or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ExponentEstimate {
    Point(f64),
    Interval(f64, f64),
    Infinite,
}

impl ExponentEstimate {
    /// Point value if resolved, midpoint if an interval, `None` if infinite.
    pub fn midpoint(self) -> Option<f64> {
        match self {
            ExponentEstimate::Point(x) => Some(x),
            ExponentEstimate::Interval(a, b) => Some(0.5 * (a + b)),
            ExponentEstimate::Infinite => None,
        }
    }

    /// Value as an extended real, mapping `Infinite` to `f64::INFINITY`.
    pub fn as_extended(self) -> f64 {
        self.midpoint().unwrap_or(f64::INFINITY)
    }

    pub fn width(self) -> f64 {
        match self {
            ExponentEstimate::Point(_) => 0.0,
            ExponentEstimate::Interval(a, b) => b - a,
            ExponentEstimate::Infinite => 0.0,
        }
    }

    pub fn contains(self, x: f64) -> bool {
        match self {
            ExponentEstimate::Point(p) => (p - x).abs() <= 1e-9,
            ExponentEstimate::Interval(a, b) => (a..=b).contains(&x),
            ExponentEstimate::Infinite => x.is_infinite() && x > 0.0,
        }
    }
}

/// Outcome of scanning a parameter range for a convergence/divergence split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdOutcome {
    /// The series converged at every probe.
    AllConverge,
    /// The series diverged at every probe.
    AllDiverge,
    /// A split was bracketed and refined.
    Estimate(ExponentEstimate),
}

/// Absolute bisection tolerance for exponents.
pub const EXPONENT_TOL: f64 = 1e-3;

/// Locates the threshold parameter at which `classify` flips between
/// convergent and divergent.
///
/// `diverges_above` states the monotone orientation: `true` when divergence
/// sets in for large parameter values. Probes run on a geometric grid of
/// `[lo, hi]`; an `Inconclusive` midpoint stops the bisection and the current
/// bracket is returned as an interval.
pub fn find_threshold(
    lo: f64,
    hi: f64,
    diverges_above: bool,
    classify: impl Fn(f64) -> Convergence,
) -> ThresholdOutcome {
    assert!(lo > 0.0 && hi > lo);
    const PROBES: usize = 17;
    let step = (hi / lo).powf(1.0 / (PROBES - 1) as f64);

    let mut best_conv: Option<f64> = None;
    let mut best_div: Option<f64> = None;
    for k in 0..PROBES {
        let x = lo * step.powi(k as i32);
        match orient(classify(x), diverges_above) {
            Side::Converge => {
                best_conv = Some(match (best_conv, diverges_above) {
                    (None, _) => x,
                    (Some(c), true) => c.max(x),
                    (Some(c), false) => c.min(x),
                });
            }
            Side::Diverge => {
                best_div = Some(match (best_div, diverges_above) {
                    (None, _) => x,
                    (Some(d), true) => d.min(x),
                    (Some(d), false) => d.max(x),
                });
            }
            Side::Unknown => {}
        }
    }

    let (mut a, mut b) = match (best_conv, best_div) {
        (None, None) => return ThresholdOutcome::Estimate(ExponentEstimate::Interval(lo, hi)),
        (Some(_), None) => return ThresholdOutcome::AllConverge,
        (None, Some(_)) => return ThresholdOutcome::AllDiverge,
        (Some(c), Some(d)) => (c, d),
    };
    // a = convergent end, b = divergent end; they may straddle either way.
    while (a - b).abs() > EXPONENT_TOL {
        let mid = 0.5 * (a + b);
        match orient(classify(mid), diverges_above) {
            Side::Converge => a = mid,
            Side::Diverge => b = mid,
            Side::Unknown => {
                return ThresholdOutcome::Estimate(ExponentEstimate::Interval(a.min(b), a.max(b)));
            }
        }
    }
    ThresholdOutcome::Estimate(ExponentEstimate::Point(0.5 * (a + b)))
}

enum Side {
    Converge,
    Diverge,
    Unknown,
}

fn orient(c: Convergence, _diverges_above: bool) -> Side {
    match c {
        Convergence::Converges => Side::Converge,
        Convergence::Diverges => Side::Diverge,
        Convergence::Inconclusive { .. } => Side::Unknown,
    }
}

/// Least-squares fit of `y = slope·x + intercept`, with the coefficient of
/// determination.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_decay_converges() {
        let c = classify_terms(|j| 0.5_f64.powi(j as i32), DEFAULT_J_MAX);
        assert_eq!(c, Convergence::Converges);
    }

    #[test]
    fn geometric_growth_diverges() {
        let c = classify_terms(|j| 1.3_f64.powi(j as i32), DEFAULT_J_MAX);
        assert_eq!(c, Convergence::Diverges);
    }

    #[test]
    fn harmonic_tail_is_inconclusive() {
        // a_j = 1/(j+1): divergent, but the trailing ratios sit in the
        // undecidable band, so the heuristic must not guess.
        let c = classify_terms(|j| 1.0 / (j as f64 + 1.0), DEFAULT_J_MAX);
        assert!(matches!(c, Convergence::Inconclusive { .. }), "got {c:?}");
    }

    #[test]
    fn log_damped_tail_is_inconclusive() {
        // a_j = 1/(j log²j) converges but decays too slowly for the ratio
        // test, and j·a_j decreases, so the honest verdict is Inconclusive.
        let c = classify_terms(
            |j| {
                let j = j as f64 + 2.0;
                1.0 / (j * j.ln() * j.ln())
            },
            DEFAULT_J_MAX,
        );
        assert!(matches!(c, Convergence::Inconclusive { .. }), "got {c:?}");
    }

    #[test]
    fn finite_support_converges() {
        let c = classify_terms(|j| if j < 5 { 2.0 } else { 0.0 }, DEFAULT_J_MAX);
        assert_eq!(c, Convergence::Converges);
    }

    #[test]
    fn gapped_series_uses_blocks() {
        // Every other shell empty, otherwise geometric growth.
        let c = classify_terms(
            |j| if j % 2 == 0 { 1.4_f64.powi(j as i32) } else { 0.0 },
            DEFAULT_J_MAX,
        );
        assert_eq!(c, Convergence::Diverges);
    }

    #[test]
    fn threshold_recovers_geometric_split() {
        // Terms 2^{j(x-1)}: diverges iff x > 1.
        let outcome = find_threshold(0.05, 16.0, true, |x| {
            classify_terms(|j| 2.0_f64.powf(j as f64 * (x - 1.0)), DEFAULT_J_MAX)
        });
        match outcome {
            ThresholdOutcome::Estimate(ExponentEstimate::Point(p)) => {
                assert!((p - 1.0).abs() < 0.05, "threshold {p}");
            }
            ThresholdOutcome::Estimate(ExponentEstimate::Interval(a, b)) => {
                assert!(a <= 1.0 && b >= 1.0, "bracket [{a}, {b}]");
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn linear_fit_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (m, b, r2) = linear_fit(&xs, &ys);
        assert!((m - 2.0).abs() < 1e-12);
        assert!((b - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }
}
