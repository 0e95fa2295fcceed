//! Optimal causal couplings of discrete measures on time slices.
//!
//! Given `μ` at time `s` and `ν` at time `t ≥ s`, the solver maximises the
//! mass a coupling can place on causally related pairs, i.e. pairs with
//! `|x_ν − x_μ| ≤ t − s`. The maximum equals `1 − ñ`, where `ñ` is the mass
//! that any transport plan is forced to move faster than light. By strong
//! duality `ñ` also equals the worst deficiency `μ(S) − ν(J⁺(S))` over
//! subsets `S` of source atoms, which yields a signalling-region witness.
//!
//! Because every source atom reaches a sliding interval of target atoms, the
//! bipartite flow problem is *convex*: an earliest-deadline-first sweep is an
//! exact maximum flow in `O(n)`, and a single left-to-right dynamic program
//! maximises the deficiency. Masses are scaled to integers with denominator
//! 10¹² first, so both routes are exact and their agreement is asserted.
//! A subset-enumeration oracle is provided for small instances.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spacetime::{GridMeasure, SpatialRegion};

/// Integer mass unit: one part in 10¹² of total probability.
pub const MASS_SCALE: u64 = 1_000_000_000_000;

/// Tolerance below which a coupling shortfall counts as causal.
pub const CAUSAL_TOLERANCE: f64 = 1e-9;

const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("atom {index} has non-positive mass {mass}")]
    NonPositiveMass { index: usize, mass: f64 },
    #[error("atom positions must be strictly increasing (index {0})")]
    UnsortedPositions(usize),
    #[error("total mass {0} deviates from 1 by more than 1e-12")]
    NotNormalised(f64),
    #[error("target slice time {nu_t} precedes source slice time {mu_t}")]
    TimeOrdering { mu_t: f64, nu_t: f64 },
    #[error("brute force supports at most {BRUTE_FORCE_LIMIT} source atoms, got {0}")]
    TooManyAtoms(usize),
    #[error("measure has no atoms")]
    Empty,
}

/// Finite list of `(position, mass)` atoms at a fixed time, total mass 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    t: f64,
    positions: Vec<f64>,
    masses: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from `(position, mass)` pairs sorted by position.
    pub fn new(t: f64, atoms: Vec<(f64, f64)>) -> Result<Self, TransportError> {
        if atoms.is_empty() {
            return Err(TransportError::Empty);
        }
        let mut total = 0.0;
        for (index, &(_, mass)) in atoms.iter().enumerate() {
            if !(mass > 0.0) {
                return Err(TransportError::NonPositiveMass { index, mass });
            }
            total += mass;
        }
        for (i, pair) in atoms.windows(2).enumerate() {
            if !(pair[0].0 < pair[1].0) {
                return Err(TransportError::UnsortedPositions(i + 1));
            }
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(TransportError::NotNormalised(total));
        }
        let (positions, masses) = atoms.into_iter().unzip();
        Ok(Self {
            t,
            positions,
            masses,
        })
    }

    /// Cell-centre discretisation of a grid measure, rebinned to at most
    /// `max_atoms` atoms. Returns the measure together with the half-width
    /// of a bin, the amount by which cone radii must be slackened so that
    /// binning can never fabricate a causality violation.
    pub fn from_grid(grid: &GridMeasure, max_atoms: usize) -> (Self, f64) {
        let n = grid.len();
        let group = n.div_ceil(max_atoms.max(1));
        let bin_width = group as f64 * grid.dx();
        let mut atoms = Vec::with_capacity(n.div_ceil(group));
        let mut i = 0;
        while i < n {
            let end = (i + group).min(n);
            let mass: f64 = grid.weights()[i..end].iter().sum();
            if mass > 0.0 {
                let center = grid.x0() + (i as f64 + (end - i) as f64 * 0.5) * grid.dx();
                atoms.push((center, mass));
            }
            i = end;
        }
        // Absorb the normalisation residue into the heaviest atom.
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if let Some(heaviest) = atoms
            .iter_mut()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        {
            heaviest.1 += 1.0 - total;
        }
        let measure = Self::new(grid.t(), atoms).expect("rebinned grid measure is valid");
        (measure, 0.5 * bin_width)
    }

    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn len(&self) -> usize {
        self.positions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Masses rounded to integer units summing exactly to [`MASS_SCALE`],
    /// largest remainders first.
    fn integer_masses(&self) -> Vec<u64> {
        let mut units: Vec<u64> = Vec::with_capacity(self.masses.len());
        let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(self.masses.len());
        let mut assigned: u64 = 0;
        for (i, &m) in self.masses.iter().enumerate() {
            let exact = m * MASS_SCALE as f64;
            let floor = exact.floor().max(0.0) as u64;
            assigned += floor;
            units.push(floor);
            remainders.push((exact - floor as f64, i));
        }
        let missing = (MASS_SCALE.saturating_sub(assigned) as usize).min(remainders.len());
        if missing > 0 {
            // Only the top `missing` remainders matter; avoid a full sort.
            remainders
                .select_nth_unstable_by(missing - 1, |a, b| b.0.partial_cmp(&a.0).unwrap());
            for &(_, i) in &remainders[..missing] {
                units[i] += 1;
            }
        }
        // Over-assignment can only happen through accumulated f64 excess of
        // at most one unit; trim it from the heaviest atom.
        if assigned > MASS_SCALE {
            let excess = assigned - MASS_SCALE;
            let imax = (0..units.len()).max_by_key(|&i| units[i]).unwrap();
            units[imax] -= excess;
        }
        units
    }
}

/// One entry of a sparse coupling: mass moved from source atom `source` to
/// target atom `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
    pub causal: bool,
}

/// Result of the optimal causal coupling problem.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingResult {
    /// Largest mass any coupling places on causally related pairs.
    pub causal_mass: f64,
    /// `1 − causal_mass`: mass forced to move superluminally.
    pub acausal_mass: f64,
    /// One optimal coupling with exact marginals.
    pub coupling: Vec<CouplingEntry>,
    /// Indices of source atoms forming a maximal-deficiency set.
    pub witness: Vec<usize>,
    /// Deficiency `μ(S) − ν(J⁺(S))` of the witness; equals `acausal_mass`.
    pub witness_deficiency: f64,
}

impl CouplingResult {
    /// Witness atoms as a spatial region, consecutive atoms merged into one
    /// closed interval.
    pub fn witness_region(&self, mu: &DiscreteMeasure) -> SpatialRegion {
        let mut intervals = Vec::new();
        let mut iter = self.witness.iter().peekable();
        while let Some(&start) = iter.next() {
            let mut end = start;
            while let Some(&&next) = iter.peek() {
                if next == end + 1 {
                    end = next;
                    iter.next();
                } else {
                    break;
                }
            }
            intervals.push((mu.positions()[start], mu.positions()[end]));
        }
        SpatialRegion::from_intervals(intervals).expect("witness intervals are ordered")
    }
}

/// True iff a source at `xs` can feed a target at `xt` across the cone
/// radius; the single causality predicate shared by every solver route.
#[inline]
fn within_cone(xs: f64, xt: f64, radius: f64) -> bool {
    (xt - xs).abs() <= radius
}

/// Full-resolution transport atoms for a grid measure: one atom per nonzero
/// cell, plus two edge atoms carrying `tail_bound` of mass parked just
/// outside the grid, standing in for the truncated tails beyond every causal
/// window of interest. Returns the measure and the half-cell cone slack that
/// makes the discretisation conservative.
pub fn discretize_grid_with_tail(measure: &GridMeasure, tail_bound: f64) -> (DiscreteMeasure, f64) {
    let tail = tail_bound.clamp(0.0, 0.49);
    let n = measure.len();
    let dx = measure.dx();
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(n + 2);
    let rescale = 1.0 - tail;
    atoms.push((measure.x0() - dx, 0.5 * tail.max(1e-15)));
    for (i, &w) in measure.weights().iter().enumerate() {
        if w > 0.0 {
            atoms.push((measure.cell_center(i), w * rescale));
        }
    }
    atoms.push((measure.x_end() + dx, 0.5 * tail.max(1e-15)));
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    let heaviest = atoms
        .iter_mut()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("nonempty");
    heaviest.1 += 1.0 - total;
    (
        DiscreteMeasure::new(measure.t(), atoms).expect("grid discretisation is valid"),
        0.5 * dx,
    )
}

/// Maximal causal mass between `mu` and `nu`, cone radius `nu.t − mu.t`.
pub fn max_causal_mass(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<CouplingResult, TransportError> {
    max_causal_mass_slack(mu, nu, 0.0)
}

/// Like [`max_causal_mass`] with the cone radius widened by `slack`; used
/// for measures rebinned from grids, where `slack` absorbs bin half-widths.
pub fn max_causal_mass_slack(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    slack: f64,
) -> Result<CouplingResult, TransportError> {
    let dt = nu.t - mu.t;
    if dt < 0.0 {
        return Err(TransportError::TimeOrdering {
            mu_t: mu.t,
            nu_t: nu.t,
        });
    }
    let radius = dt + slack;
    let supply = mu.integer_masses();
    let demand = nu.integer_masses();

    let (flow_total, mut coupling_units) = greedy_causal_flow(mu, nu, &supply, &demand, radius);
    let (deficiency, witness) = max_deficiency_subset(mu, nu, &supply, &demand, radius);

    assert_eq!(
        flow_total,
        MASS_SCALE - deficiency,
        "flow and deficiency routes disagree; solver invariant broken"
    );

    complete_coupling(&supply, &demand, &mut coupling_units);

    let scale = 1.0 / MASS_SCALE as f64;
    let coupling = coupling_units
        .into_iter()
        .map(|(source, target, units)| CouplingEntry {
            source,
            target,
            mass: units as f64 * scale,
            causal: within_cone(mu.positions[source], nu.positions[target], radius),
        })
        .collect();

    Ok(CouplingResult {
        causal_mass: flow_total as f64 * scale,
        acausal_mass: deficiency as f64 * scale,
        coupling,
        witness,
        witness_deficiency: deficiency as f64 * scale,
    })
}

/// Earliest-deadline-first sweep: targets are served left to right, each
/// draining the leftmost source atom whose cone still covers it. For
/// interval ("convex") bipartite structure this greedy attains the maximum
/// flow.
fn greedy_causal_flow(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    supply: &[u64],
    demand: &[u64],
    radius: f64,
) -> (u64, Vec<(usize, usize, u64)>) {
    let mut remaining = supply.to_vec();
    let mut edges: Vec<(usize, usize, u64)> = Vec::new();
    let mut window: std::collections::VecDeque<usize> = std::collections::VecDeque::new();
    let mut admitted = 0;
    let mut total: u64 = 0;

    for (j, &xt) in nu.positions.iter().enumerate() {
        while admitted < mu.positions.len() && mu.positions[admitted] <= xt + radius {
            window.push_back(admitted);
            admitted += 1;
        }
        while let Some(&front) = window.front() {
            if remaining[front] == 0 || mu.positions[front] < xt - radius {
                window.pop_front();
            } else {
                break;
            }
        }
        let mut need = demand[j];
        while need > 0 {
            let Some(&front) = window.front() else { break };
            if mu.positions[front] < xt - radius {
                window.pop_front();
                continue;
            }
            let take = need.min(remaining[front]);
            if take > 0 {
                edges.push((front, j, take));
                remaining[front] -= take;
                total += take;
                need -= take;
            }
            if remaining[front] == 0 {
                window.pop_front();
            }
        }
    }
    (total, edges)
}

/// Maximises `μ(S) − ν(J⁺(S))` over subsets `S` of source atoms by a
/// left-to-right dynamic program over the rightmost selected atom. Cone
/// unions of consecutive selections are accounted through prefix masses of
/// `ν`, so the optimum is exact in integer units.
fn max_deficiency_subset(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    supply: &[u64],
    demand: &[u64],
    radius: f64,
) -> (u64, Vec<usize>) {
    let n = mu.positions.len();
    // prefix[j] = Σ_{k<j} demand_k
    let mut prefix: Vec<i64> = Vec::with_capacity(demand.len() + 1);
    prefix.push(0);
    for &d in demand {
        prefix.push(prefix.last().unwrap() + d as i64);
    }
    // Both cone edges are monotone in the source atom, so a pair of
    // advancing pointers replaces per-atom binary searches.
    let mut ptr_le = 0usize; // first target index with position > x_i + R
    let mut ptr_lt = 0usize; // first target index with position ≥ x_i − R

    // Candidate values are lower bounds on the deficiency of the chain they
    // encode, and exact when the branch matches the true cone geometry, so
    // the running maxima stay exact.
    let mut best_fresh: i64 = 0; // max(0, f(k)) over earlier atoms
    let mut best_fresh_idx: Option<usize> = None;
    let mut best_merge: i64 = i64::MIN; // max f(k) + ν(≤ x_k + radius)
    let mut best_merge_idx: Option<usize> = None;

    let mut f: Vec<i64> = vec![0; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut best_value: i64 = 0;
    let mut best_end: Option<usize> = None;

    for i in 0..n {
        let xi = mu.positions[i];
        while ptr_le < nu.positions.len() && nu.positions[ptr_le] <= xi + radius {
            ptr_le += 1;
        }
        while ptr_lt < nu.positions.len() && nu.positions[ptr_lt] < xi - radius {
            ptr_lt += 1;
        }
        let cone_hi = prefix[ptr_le];
        let fresh = best_fresh + prefix[ptr_lt];
        let (value, par) = if best_merge > i64::MIN && best_merge >= fresh {
            (best_merge, best_merge_idx)
        } else {
            (fresh, best_fresh_idx)
        };
        f[i] = supply[i] as i64 - cone_hi + value;
        parent[i] = par;
        if f[i] > best_value {
            best_value = f[i];
            best_end = Some(i);
        }
        if f[i] > best_fresh {
            best_fresh = f[i];
            best_fresh_idx = Some(i);
        }
        let merged = f[i] + cone_hi;
        if merged > best_merge {
            best_merge = merged;
            best_merge_idx = Some(i);
        }
    }

    let mut witness = Vec::new();
    let mut cursor = best_end;
    while let Some(i) = cursor {
        witness.push(i);
        cursor = parent[i];
    }
    witness.reverse();
    (best_value.max(0) as u64, witness)
}

/// Fills the residual supplies and demands left by the causal flow with
/// acausal transport so the returned coupling has exact marginals.
fn complete_coupling(supply: &[u64], demand: &[u64], edges: &mut Vec<(usize, usize, u64)>) {
    let mut residual_supply = supply.to_vec();
    let mut residual_demand = demand.to_vec();
    for &(i, j, units) in edges.iter() {
        residual_supply[i] -= units;
        residual_demand[j] -= units;
    }
    let mut i = 0;
    let mut j = 0;
    while i < residual_supply.len() && j < residual_demand.len() {
        if residual_supply[i] == 0 {
            i += 1;
            continue;
        }
        if residual_demand[j] == 0 {
            j += 1;
            continue;
        }
        let take = residual_supply[i].min(residual_demand[j]);
        edges.push((i, j, take));
        residual_supply[i] -= take;
        residual_demand[j] -= take;
    }
}

/// Theorem-style precedence check: the worst compact-set deficiency, the set
/// attaining it, and the verdict `deficiency ≤ tolerance`.
pub fn check_precedence_compact(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<(bool, f64, SpatialRegion), TransportError> {
    let result = max_causal_mass(mu, nu)?;
    let region = result.witness_region(mu);
    Ok((
        result.acausal_mass <= CAUSAL_TOLERANCE,
        result.witness_deficiency,
        region,
    ))
}

/// Exhaustive oracle: enumerates all `2^n` subsets of source atoms and
/// returns `max(0, max_S μ(S) − ν(J⁺(S)))`. Limited to 20 atoms.
pub fn brute_force_deficiency(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<f64, TransportError> {
    brute_force_deficiency_slack(mu, nu, 0.0)
}

/// Oracle with a widened cone radius, matching [`max_causal_mass_slack`].
pub fn brute_force_deficiency_slack(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    slack: f64,
) -> Result<f64, TransportError> {
    let dt = nu.t - mu.t;
    if dt < 0.0 {
        return Err(TransportError::TimeOrdering {
            mu_t: mu.t,
            nu_t: nu.t,
        });
    }
    let n = mu.positions.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(TransportError::TooManyAtoms(n));
    }
    let radius = dt + slack;
    let supply = mu.integer_masses();
    let demand = nu.integer_masses();

    let mut best: i64 = 0;
    for mask in 0u32..(1u32 << n) {
        let mut mu_mass: i64 = 0;
        let mut nu_mass: i64 = 0;
        for (j, &xt) in nu.positions.iter().enumerate() {
            let reachable = (0..n).any(|i| {
                mask & (1 << i) != 0 && within_cone(mu.positions[i], xt, radius)
            });
            if reachable {
                nu_mass += demand[j] as i64;
            }
        }
        for (i, &s) in supply.iter().enumerate() {
            if mask & (1 << i) != 0 {
                mu_mass += s as i64;
            }
        }
        best = best.max(mu_mass - nu_mass);
    }
    Ok(best as f64 / MASS_SCALE as f64)
}

/// Necessary support condition: every `ν`-atom lies in the forward cone of
/// some `μ`-atom. Not sufficient for causal precedence.
pub fn support_condition(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> bool {
    let radius = nu.t - mu.t;
    if radius < 0.0 {
        return false;
    }
    nu.positions.iter().all(|&xt| {
        mu.positions
            .iter()
            .any(|&xs| within_cone(xs, xt, radius))
    })
}
