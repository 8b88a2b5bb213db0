//! Sorted disjoint interval sets on the line.

/// A finite union of intervals, kept sorted and disjoint. Endpoints touching
/// within float resolution are merged; the represented set is open, which
/// leaves its Lebesgue measure unchanged.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalSet {
    items: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from arbitrary (possibly overlapping, unsorted) intervals.
    /// Empty or inverted inputs are dropped.
    pub fn from_unsorted(mut raw: Vec<(f64, f64)>) -> Self {
        raw.retain(|(a, b)| b > a);
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut items: Vec<(f64, f64)> = Vec::with_capacity(raw.len().min(64));
        for (a, b) in raw {
            match items.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => items.push((a, b)),
            }
        }
        Self { items }
    }

    pub fn items(&self) -> &[(f64, f64)] {
        &self.items
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn count(&self) -> usize {
        self.items.len()
    }

    pub fn measure(&self) -> f64 {
        self.items.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        let idx = self.items.partition_point(|&(_, b)| b < t);
        idx < self.items.len() && self.items[idx].0 < t && t < self.items[idx].1
    }

    /// Intersects with `[lo, hi]`, clipping partially overlapping intervals.
    pub fn clip(&self, lo: f64, hi: f64) -> Self {
        let mut items = Vec::new();
        for &(a, b) in &self.items {
            let (a, b) = (a.max(lo), b.min(hi));
            if b > a {
                items.push((a, b));
            }
        }
        Self { items }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut items = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.items.len() && j < other.items.len() {
            let (a1, b1) = self.items[i];
            let (a2, b2) = other.items[j];
            let (lo, hi) = (a1.max(a2), b1.min(b2));
            if hi > lo {
                items.push((lo, hi));
            }
            if b1 <= b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self { items }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut raw = self.items.clone();
        raw.extend_from_slice(&other.items);
        Self::from_unsorted(raw)
    }

    /// Whether every interval of `self` lies inside `other` (as point sets,
    /// up to a relative tolerance on endpoints).
    pub fn subset_of(&self, other: &Self, tol: f64) -> bool {
        self.items.iter().all(|&(a, b)| {
            let idx = other.items.partition_point(|&(_, ob)| ob < b - tol);
            idx < other.items.len() && other.items[idx].0 <= a + tol && b <= other.items[idx].1 + tol
        })
    }
}
