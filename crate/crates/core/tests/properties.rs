//! Property-based tests for the structural invariants: light-cone order
//! axioms, region algebra, transport duality, and conservation laws of the
//! spectral pipeline.

use proptest::prelude::*;

use causalflow::packets::{Dispersion, GridSpec, SpectralEvolver, StateFamily};
use causalflow::spacetime::{causally_precedes, future_region, Event, SpatialRegion};
use causalflow::transport::{brute_force_deficiency, max_causal_mass, DiscreteMeasure};

fn event() -> impl Strategy<Value = Event> {
    ((-50.0..50.0f64), (-50.0..50.0f64)).prop_map(|(t, x)| Event::new(t, x).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// p ⪯ q and q ⪯ r imply p ⪯ r.
    #[test]
    fn causal_order_is_transitive(p in event(), q in event(), r in event()) {
        if causally_precedes(p, q) && causally_precedes(q, r) {
            prop_assert!(causally_precedes(p, r));
        }
    }

    /// Antisymmetry up to equality: mutual precedence forces p = q.
    #[test]
    fn causal_order_is_antisymmetric(p in event(), q in event()) {
        if causally_precedes(p, q) && causally_precedes(q, p) {
            prop_assert_eq!(p.t, q.t);
            prop_assert_eq!(p.x, q.x);
        }
    }

    /// Future regions compose additively and grow monotonically.
    #[test]
    fn future_region_semigroup(
        intervals in proptest::collection::vec(((-20.0..20.0f64), (0.0..5.0f64)), 1..5),
        s in 0.0..4.0f64,
        t in 0.0..4.0f64,
    ) {
        let region = SpatialRegion::from_intervals(
            intervals.iter().map(|&(lo, len)| (lo, lo + len)).collect(),
        ).unwrap();
        let twice = future_region(&future_region(&region, s).unwrap(), t).unwrap();
        let once = future_region(&region, s + t).unwrap();
        for (a, b) in twice.intervals().iter().zip(once.intervals()) {
            prop_assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
        }
        // monotone in dt
        let small = future_region(&region, s).unwrap();
        let large = future_region(&region, s + t).unwrap();
        prop_assert!(small.subset_of(&large));
    }
}

fn discrete_measure(t: f64) -> impl Strategy<Value = DiscreteMeasure> {
    proptest::collection::vec(((-8.0..8.0f64), (0.01..1.0f64)), 1..9).prop_map(move |atoms| {
        let mut xs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let total: f64 = atoms.iter().take(xs.len()).map(|a| a.1).sum();
        let mut masses: Vec<f64> = atoms.iter().take(xs.len()).map(|a| a.1 / total).collect();
        let residue = 1.0 - masses.iter().sum::<f64>();
        masses[0] += residue;
        DiscreteMeasure::new(t, xs.into_iter().zip(masses).collect()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Strong duality: the flow solver's shortfall equals the exhaustive
    /// subset deficiency, and the returned witness attains it.
    #[test]
    fn transport_duality(mu in discrete_measure(0.0), nu in discrete_measure(0.0), gap in 0.0..4.0f64) {
        let nu = DiscreteMeasure::new(gap, nu.positions().iter().copied().zip(nu.masses().iter().copied()).collect()).unwrap();
        let result = max_causal_mass(&mu, &nu).unwrap();
        let brute = brute_force_deficiency(&mu, &nu).unwrap();
        prop_assert!((result.acausal_mass - brute).abs() < 1e-12,
            "flow {} vs brute {}", result.acausal_mass, brute);
        prop_assert!((result.witness_deficiency - result.acausal_mass).abs() < 1e-9);
        prop_assert!(result.causal_mass >= 0.0 && result.causal_mass <= 1.0 + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Unitarity of the spectral evolution: total probability stays 1 to
    /// 1e-10 for random Gaussian families, dispersions, and times.
    #[test]
    fn evolution_conserves_probability(
        width_sq in 0.05..4.0f64,
        boost in -1.5..1.5f64,
        t in 0.0..2.5f64,
        relativistic in proptest::bool::ANY,
    ) {
        let family = StateFamily::gaussian(width_sq).unwrap().with_boost(boost);
        let dispersion = if relativistic {
            Dispersion::Relativistic { mass: 1.0 }
        } else {
            Dispersion::NonRelativistic { mass: 1.0 }
        };
        let grid = GridSpec::auto(&family, &dispersion, 2.5).unwrap();
        let evolver = SpectralEvolver::new(family, dispersion, grid, 2.5).unwrap();
        let packet = evolver.evolve(t).unwrap();
        let (density, delta) = packet.density();
        prop_assert!(delta < 1e-10, "norm defect {delta}");
        let total: f64 = density.weights().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}
