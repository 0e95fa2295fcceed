//! Causal-precedence analysis for time-indexed probability measures on
//! 1+1-dimensional Minkowski spacetime.
//!
//! A family of probability measures `t ↦ μ_t` evolves *causally* when, for
//! every pair of times `s ≤ t`, all of the mass of `μ_s` can be transported
//! onto `μ_t` along future-directed causal curves — equivalently, when no
//! compact region loses mass faster than light-speed transport allows. This
//! crate decides that property for discretised measures and quantifies its
//! failure for quantum wave packets:
//!
//! - [`spacetime`] — events, the light-cone order, spatial regions, and
//!   grid-based probability measures.
//! - [`transport`] — optimal causal couplings of discrete measures via an
//!   exact flow solver, with Hall-type deficiency witnesses and a brute-force
//!   oracle.
//! - [`packets`] — closed-form wave-packet families and spectral time
//!   evolution under relativistic, massless, and non-relativistic dispersion
//!   relations.
//! - [`dirac`] — free 1+1 Dirac evolution, its conserved probability
//!   current, and causality verification.
//! - [`quantify`] — violation measures over evolved packets: cone
//!   deficiencies, coupling shortfalls, sweep drivers, witness searches.
//! - [`continuity`] — continuity-equation and causal-current checks on
//!   sampled density/flux fields.
//!
//! Natural units with `c = 1` (and `ħ = 1` for the quantum modules) are used
//! throughout; times and lengths share one unit.

// Negated comparisons like `!(x > 0.0)` are NaN-rejecting validation guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuity;
pub mod dirac;
pub mod numeric;
pub mod packets;
pub mod quantify;
pub mod spacetime;
pub mod transport;
