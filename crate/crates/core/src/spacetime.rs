//! Events and the light-cone causal order on 1+1 Minkowski spacetime,
//! compact spatial regions, and grid-based probability measures.
//!
//! The speed of light is fixed to 1, so an event `(t_p, x_p)` causally
//! precedes `(t_q, x_q)` exactly when `t_q ≥ t_p` and `|x_q − x_p| ≤ t_q − t_p`.
//! Spatial regions are finite unions of disjoint closed intervals, which makes
//! the future-cone slice `J⁺` computable exactly: each interval widens by the
//! elapsed time and overlaps merge.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::CompensatedSum;

/// Numerical tolerance for total-mass normalisation of measures.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacetimeError {
    #[error("event coordinates must be finite, got (t={t}, x={x})")]
    NonFiniteEvent { t: f64, x: f64 },
    #[error("interval [{lo}, {hi}] has lo > hi")]
    InvertedInterval { lo: f64, hi: f64 },
    #[error("future_region requires dt ≥ 0, got {0}")]
    NegativeDuration(f64),
    #[error("grid spacing must be positive, got {0}")]
    NonPositiveSpacing(f64),
    #[error("grid weights must be nonnegative, cell {index} has {weight}")]
    NegativeWeight { index: usize, weight: f64 },
    #[error("total mass {0} deviates from 1 by more than {MASS_TOLERANCE}")]
    NotNormalised(f64),
    #[error("malformed measure file: {0}")]
    Parse(String),
}

/// A point of 1+1 Minkowski spacetime, natural units (c = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
}

impl Event {
    pub fn new(t: f64, x: f64) -> Result<Self, SpacetimeError> {
        if !t.is_finite() || !x.is_finite() {
            return Err(SpacetimeError::NonFiniteEvent { t, x });
        }
        Ok(Self { t, x })
    }
}

/// True iff `p` causally precedes `q`: `q` lies in the closed future light
/// cone of `p`.
pub fn causally_precedes(p: Event, q: Event) -> bool {
    let dt = q.t - p.t;
    dt >= 0.0 && (q.x - p.x).abs() <= dt
}

/// A finite union of disjoint closed intervals `[a_i, b_i]`, kept sorted.
///
/// Degenerate intervals (`a = b`) are allowed; the empty union represents the
/// empty region.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SpatialRegion {
    intervals: Vec<(f64, f64)>,
}

impl SpatialRegion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Single closed interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self, SpacetimeError> {
        Self::from_intervals(vec![(lo, hi)])
    }

    /// Builds a region from arbitrary closed intervals, sorting and merging
    /// overlapping or touching ones.
    pub fn from_intervals(mut intervals: Vec<(f64, f64)>) -> Result<Self, SpacetimeError> {
        for &(lo, hi) in &intervals {
            if !(lo <= hi) {
                return Err(SpacetimeError::InvertedInterval { lo, hi });
            }
        }
        intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (lo, hi) in intervals {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total length of the union.
    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// True iff every interval of `self` is covered by `other`.
    pub fn subset_of(&self, other: &SpatialRegion) -> bool {
        self.intervals
            .iter()
            .all(|&(lo, hi)| other.intervals.iter().any(|&(a, b)| a <= lo && hi <= b))
    }
}

/// Slice of the causal future of `region` after a delay `dt ≥ 0`: each
/// interval `[a, b]` widens to `[a − dt, b + dt]`, with overlaps merged.
pub fn future_region(region: &SpatialRegion, dt: f64) -> Result<SpatialRegion, SpacetimeError> {
    if !(dt >= 0.0) {
        return Err(SpacetimeError::NegativeDuration(dt));
    }
    SpatialRegion::from_intervals(
        region
            .intervals
            .iter()
            .map(|&(lo, hi)| (lo - dt, hi + dt))
            .collect(),
    )
}

/// Probability measure discretised on a uniform spatial grid at a fixed time.
///
/// Cell `i` covers `[x0 + i·dx, x0 + (i+1)·dx]` and carries weight `w[i]`;
/// the weights sum to 1. Region masses treat the density as constant on each
/// cell, so partially covered cells contribute proportionally to the overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeasure {
    t: f64,
    x0: f64,
    dx: f64,
    weights: Vec<f64>,
    /// prefix[i] = Σ_{j<i} w[j], compensated; prefix[n] = total.
    prefix: Vec<f64>,
}

impl GridMeasure {
    pub fn new(t: f64, x0: f64, dx: f64, weights: Vec<f64>) -> Result<Self, SpacetimeError> {
        if !(dx > 0.0) {
            return Err(SpacetimeError::NonPositiveSpacing(dx));
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight >= 0.0) {
                return Err(SpacetimeError::NegativeWeight { index, weight });
            }
        }
        let mut prefix = Vec::with_capacity(weights.len() + 1);
        let mut acc = CompensatedSum::new();
        prefix.push(0.0);
        for &w in &weights {
            acc.add(w);
            prefix.push(acc.value());
        }
        let total = *prefix.last().unwrap();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(SpacetimeError::NotNormalised(total));
        }
        Ok(Self {
            t,
            x0,
            dx,
            weights,
            prefix,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Centre of cell `i`.
    pub fn cell_center(&self, i: usize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.dx
    }

    /// Right edge of the grid.
    pub fn x_end(&self) -> f64 {
        self.x0 + self.dx * self.weights.len() as f64
    }

    /// Total mass of cells `0..i` (prefix sums are exact by construction).
    pub fn prefix_mass(&self, i: usize) -> f64 {
        self.prefix[i.min(self.weights.len())]
    }

    /// Cumulative mass of `(-∞, x]` under the piecewise-constant density.
    fn cumulative(&self, x: f64) -> f64 {
        if x <= self.x0 {
            return 0.0;
        }
        let n = self.weights.len();
        let pos = (x - self.x0) / self.dx;
        if pos >= n as f64 {
            return self.prefix[n];
        }
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        self.prefix[i] + self.weights[i] * frac
    }

    /// Mass the measure assigns to a region, prorating partially covered
    /// cells by overlap length.
    pub fn region_mass(&self, region: &SpatialRegion) -> f64 {
        let mut acc = CompensatedSum::new();
        for &(lo, hi) in region.intervals() {
            acc.add(self.cumulative(hi) - self.cumulative(lo));
        }
        acc.value()
    }

    /// Density slope near `x`, from central differences of the cell weights.
    fn density_slope(&self, x: f64) -> f64 {
        let n = self.weights.len();
        if n < 3 || x <= self.x0 || x >= self.x_end() {
            return 0.0;
        }
        let i = (((x - self.x0) / self.dx) as usize).clamp(1, n - 2);
        (self.weights[i + 1] - self.weights[i - 1]) / (2.0 * self.dx * self.dx)
    }

    /// Bound on the quadrature error of [`GridMeasure::region_mass`] against
    /// the smooth density the weights sampled.
    ///
    /// Piecewise-constant integration of midpoint samples is exact up to
    /// boundary terms of order `dx²·ρ'` (interior Euler–Maclaurin terms
    /// telescope); the `1/8` coefficient leaves threefold headroom over the
    /// leading `ρ'(x)·dx²/24` for the prorated cut cells.
    pub fn region_mass_error_bound(&self, region: &SpatialRegion) -> f64 {
        let coeff = self.dx * self.dx / 8.0;
        region
            .intervals()
            .iter()
            .map(|&(lo, hi)| coeff * (self.density_slope(lo).abs() + self.density_slope(hi).abs()))
            .sum()
    }

    /// Serialises the weights as CSV with header `x_left,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_left,weight\n");
        for (i, w) in self.weights.iter().enumerate() {
            let x_left = self.x0 + i as f64 * self.dx;
            out.push_str(&format!("{x_left},{w}\n"));
        }
        out
    }

    /// JSON sidecar describing the grid: `{t, x0, dx, n}`.
    pub fn sidecar_json(&self) -> String {
        serde_json::json!({
            "t": self.t,
            "x0": self.x0,
            "dx": self.dx,
            "n": self.weights.len(),
        })
        .to_string()
    }

    /// Parses the CSV produced by [`GridMeasure::to_csv`]. The time label is
    /// supplied by the caller (it lives in the sidecar).
    pub fn from_csv(t: f64, text: &str) -> Result<Self, SpacetimeError> {
        let mut xs: Vec<f64> = Vec::new();
        let mut ws: Vec<f64> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("x_left")) {
                continue;
            }
            let mut parts = line.split(',');
            let x: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| SpacetimeError::Parse(format!("line {}: bad x", lineno + 1)))?;
            let w: f64 = parts
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| SpacetimeError::Parse(format!("line {}: bad weight", lineno + 1)))?;
            xs.push(x);
            ws.push(w);
        }
        if xs.len() < 2 {
            return Err(SpacetimeError::Parse("need at least two cells".into()));
        }
        let dx = xs[1] - xs[0];
        for pair in xs.windows(2) {
            if ((pair[1] - pair[0]) - dx).abs() > 1e-9 * dx.abs().max(1.0) {
                return Err(SpacetimeError::Parse("grid spacing is not uniform".into()));
            }
        }
        GridMeasure::new(t, xs[0], dx, ws)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(t: f64, x: f64) -> Event {
        Event::new(t, x).unwrap()
    }

    #[test]
    fn precedence_is_reflexive_and_respects_light_rays() {
        assert!(causally_precedes(ev(0.0, 0.0), ev(0.0, 0.0)));
        assert!(causally_precedes(ev(0.0, 0.0), ev(1.0, 1.0)));
        assert!(!causally_precedes(ev(0.0, 0.0), ev(1.0, 1.0001)));
    }

    #[test]
    fn precedence_checked_by_hand() {
        // |−1 − 2| = 3 ≤ 3 − 0.
        assert!(causally_precedes(ev(0.0, 2.0), ev(3.0, -1.0)));
        // Going backwards in time never precedes.
        assert!(!causally_precedes(ev(1.0, 0.0), ev(0.0, 0.0)));
    }

    #[test]
    fn future_region_widens_cone() {
        let k = SpatialRegion::interval(-1.0, 1.0).unwrap();
        let f = future_region(&k, 2.0).unwrap();
        assert_eq!(f.intervals(), &[(-3.0, 3.0)]);
    }

    #[test]
    fn future_region_merges_overlaps() {
        let k = SpatialRegion::from_intervals(vec![(0.0, 1.0), (5.0, 6.0)]).unwrap();
        let f = future_region(&k, 2.0).unwrap();
        assert_eq!(f.intervals(), &[(-2.0, 8.0)]);
    }

    #[test]
    fn future_of_empty_is_empty() {
        let f = future_region(&SpatialRegion::empty(), 1.0).unwrap();
        assert!(f.is_empty());
    }

    #[test]
    fn negative_duration_rejected() {
        let k = SpatialRegion::interval(0.0, 1.0).unwrap();
        assert!(matches!(
            future_region(&k, -0.5),
            Err(SpacetimeError::NegativeDuration(_))
        ));
    }

    fn uniform_measure(n: usize) -> GridMeasure {
        // Uniform on [0, 1].
        GridMeasure::new(0.0, 0.0, 1.0 / n as f64, vec![1.0 / n as f64; n]).unwrap()
    }

    #[test]
    fn region_mass_uniform_half() {
        for n in [1, 7, 100] {
            let mu = uniform_measure(n);
            let k = SpatialRegion::interval(0.0, 0.5).unwrap();
            assert!((mu.region_mass(&k) - 0.5).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn region_mass_whole_support_is_one() {
        let mu = uniform_measure(37);
        let k = SpatialRegion::interval(-5.0, 5.0).unwrap();
        assert!((mu.region_mass(&k) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn region_mass_prorates_partial_cell() {
        let mu = GridMeasure::new(0.0, 0.0, 1.0, vec![1.0]).unwrap();
        let k = SpatialRegion::interval(0.25, 0.75).unwrap();
        assert!((mu.region_mass(&k) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_measure_validates() {
        assert!(matches!(
            GridMeasure::new(0.0, 0.0, 0.0, vec![1.0]),
            Err(SpacetimeError::NonPositiveSpacing(_))
        ));
        assert!(matches!(
            GridMeasure::new(0.0, 0.0, 1.0, vec![1.5, -0.5]),
            Err(SpacetimeError::NegativeWeight { .. })
        ));
        assert!(matches!(
            GridMeasure::new(0.0, 0.0, 1.0, vec![0.4, 0.4]),
            Err(SpacetimeError::NotNormalised(_))
        ));
    }

    #[test]
    fn csv_roundtrip() {
        let mu = GridMeasure::new(1.5, -1.0, 0.5, vec![0.25, 0.5, 0.125, 0.125]).unwrap();
        let text = mu.to_csv();
        let back = GridMeasure::from_csv(1.5, &text).unwrap();
        assert_eq!(mu, back);
        assert!(mu.sidecar_json().contains("\"n\":4"));
    }

    #[test]
    fn composing_future_regions_adds_durations() {
        let k = SpatialRegion::from_intervals(vec![(-2.0, -1.0), (0.5, 3.0)]).unwrap();
        let twice = future_region(&future_region(&k, 0.75).unwrap(), 1.5).unwrap();
        let once = future_region(&k, 2.25).unwrap();
        assert_eq!(twice, once);
    }
}
