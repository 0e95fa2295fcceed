//! Acceptance suite: every headline quantitative claim the library is built
//! to reproduce, one test per criterion, each printing a PASS line with the
//! measured numbers (run with `--nocapture` to see them).
//!
//! The suite covers the relativistic Gaussian maximum and its width table,
//! the sech-family decay ladder, the massless asymptote, the δ-limit
//! extrapolation, the Hegerfeldt-boundary null result, the heavy-tail scans,
//! the non-relativistic closed form, Dirac causality, transport duality, the
//! mass-rescaling identity, and weak duality between cone deficiencies and
//! coupling shortfalls.

use std::sync::OnceLock;
use std::time::Instant;

use causalflow::dirac;
use causalflow::numeric::SplitMix64;
use causalflow::packets::{nonrel_cone_mass, nonrel_violation_threshold};
use causalflow::packets::{Dispersion, GridSpec, StateFamily};
use causalflow::quantify::{
    scaling_discrepancy, Quantifier, TimeScan, ViolationProfile, HALF_WIDTH_SCAN,
};
use causalflow::spacetime::SpatialRegion;
use causalflow::transport::{
    brute_force_deficiency, max_causal_mass, support_condition, DiscreteMeasure,
};

const GAUSSIAN_WIDTHS: [f64; 6] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
const GAUSSIAN_PEAKS: [f64; 6] = [3.5e-5, 0.0066, 0.039, 0.079, 0.106, 0.121];
const GAUSSIAN_PEAK_TIMES: [f64; 6] = [0.81, 0.68, 0.64, 0.58, 0.53, 0.48];
const GAUSSIAN_PEAK_WIDTHS: [f64; 6] = [2.89, 0.63, 0.165, 0.048, 0.015, 0.0047];

const SECH_DECAYS: [f64; 4] = [3.0, 2.0, 5.0 / 3.0, 1.5];
const SECH_PEAKS: [f64; 4] = [3e-4, 2e-6, 1.4e-8, 1e-10];
const SECH_PEAK_TIMES: [f64; 4] = [0.79, 0.83, 0.84, 0.85];
const SECH_PEAK_WIDTHS: [f64; 4] = [1.4, 3.2, 5.2, 7.4];

/// Sweep of one family with the coupling shortfall evaluated per time slice.
struct SweepFixture {
    profile: ViolationProfile,
    shortfalls: Vec<f64>,
}

fn sweep_with_shortfalls(family: StateFamily, dispersion: Dispersion, times: TimeScan) -> SweepFixture {
    let q = Quantifier::new(family, dispersion, times.t_max * 1.01 + 1e-3).expect("pipeline");
    let (profile, shortfalls) = q
        .sweep_with_transport(&times, &HALF_WIDTH_SCAN)
        .expect("sweep");
    SweepFixture {
        profile,
        shortfalls,
    }
}

fn sweep_only(family: StateFamily, dispersion: Dispersion, times: TimeScan) -> ViolationProfile {
    let q = Quantifier::new(family, dispersion, times.t_max * 1.01 + 1e-3).expect("pipeline");
    q.sweep(&times, &HALF_WIDTH_SCAN).expect("sweep")
}

fn gaussian_fixture(index: usize) -> &'static SweepFixture {
    static CELLS: [OnceLock<SweepFixture>; 6] = [const { OnceLock::new() }; 6];
    CELLS[index].get_or_init(|| {
        sweep_with_shortfalls(
            StateFamily::gaussian(GAUSSIAN_WIDTHS[index]).expect("valid width"),
            Dispersion::Relativistic { mass: 1.0 },
            TimeScan {
                t_max: 3.0,
                step: 0.01,
            },
        )
    })
}

fn sech_fixture(index: usize) -> &'static SweepFixture {
    static CELLS: [OnceLock<SweepFixture>; 4] = [const { OnceLock::new() }; 4];
    CELLS[index].get_or_init(|| {
        sweep_with_shortfalls(
            StateFamily::sech(SECH_DECAYS[index]).expect("valid decay"),
            Dispersion::Relativistic { mass: 1.0 },
            TimeScan {
                t_max: 3.0,
                step: 0.01,
            },
        )
    })
}

fn massless_fixture() -> &'static SweepFixture {
    static CELL: OnceLock<SweepFixture> = OnceLock::new();
    CELL.get_or_init(|| {
        sweep_with_shortfalls(
            StateFamily::gaussian(1.0).expect("valid width"),
            Dispersion::Massless,
            TimeScan {
                t_max: 20.0,
                step: 0.05,
            },
        )
    })
}

fn within_relative(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

/// Criterion 1: the relativistic Gaussian of unit width peaks at
/// M̃* = 3.55e-5 ± 10% with t₁ = 0.81 ± 0.02 and a_M = 2.89 ± 0.05, inside
/// the five-minute single-thread budget.
#[test]
fn criterion_01_gaussian_maximum() {
    let start = Instant::now();
    let fx = gaussian_fixture(0);
    let elapsed = start.elapsed().as_secs_f64();
    let peak = fx.profile.peak;
    let (value, t1, a_m) = (peak.value, fx.profile.peak_t, peak.half_width());
    assert!(peak.detected(), "peak below noise floor");
    assert!(
        within_relative(value, 3.55e-5, 0.10),
        "M̃* = {value} vs 3.55e-5"
    );
    assert!((t1 - 0.81).abs() <= 0.02, "t₁ = {t1} vs 0.81");
    assert!((a_m - 2.89).abs() <= 0.05, "a_M = {a_m} vs 2.89");
    assert!(elapsed < 300.0, "runtime {elapsed:.1}s exceeds 5 min");
    println!(
        "[PASS] criterion 1: M̃* = {value:.3e} (3.55e-5 ± 10%), t₁ = {t1:.3} (0.81 ± 0.02), a_M = {a_m:.3} (2.89 ± 0.05), {elapsed:.0}s"
    );
}

/// Criterion 2: the Gaussian width table — peak value within 15%, peak time
/// within ±0.03, maximising half-width within 5% for six decades of d.
///
/// Known red: the d = 0.1 peak time. Our pipeline and a grid-free
/// quadrature oracle both place it at 0.716 ± 0.002 on a ridge that is flat
/// to 0.16%, while the published table says 0.68; every other row matches
/// to ±0.01. The check is kept as stated and reports the discrepancy.
#[test]
fn criterion_02_gaussian_table() {
    let mut failures = Vec::new();
    for i in 0..6 {
        let fx = gaussian_fixture(i);
        let peak = fx.profile.peak;
        let d = GAUSSIAN_WIDTHS[i];
        let mut row_ok = true;
        if !within_relative(peak.value, GAUSSIAN_PEAKS[i], 0.15) {
            failures.push(format!(
                "d={d}: M̃ = {} vs {} (15%)",
                peak.value, GAUSSIAN_PEAKS[i]
            ));
            row_ok = false;
        }
        if (fx.profile.peak_t - GAUSSIAN_PEAK_TIMES[i]).abs() > 0.03 {
            failures.push(format!(
                "d={d}: t₁ = {:.4} vs {} (±0.03)",
                fx.profile.peak_t, GAUSSIAN_PEAK_TIMES[i]
            ));
            row_ok = false;
        }
        if !within_relative(peak.half_width(), GAUSSIAN_PEAK_WIDTHS[i], 0.05) {
            failures.push(format!(
                "d={d}: a_M = {} vs {} (5%)",
                peak.half_width(),
                GAUSSIAN_PEAK_WIDTHS[i]
            ));
            row_ok = false;
        }
        println!(
            "[{}] criterion 2 (d={d:e}): M̃={:.3e} t₁={:.3} a_M={:.4}",
            if row_ok { "PASS" } else { "FAIL" },
            peak.value,
            fx.profile.peak_t,
            peak.half_width()
        );
    }
    assert!(
        failures.is_empty(),
        "criterion 2 sub-checks failed:\n  {}",
        failures.join("\n  ")
    );
    println!("[PASS] criterion 2: gaussian table reproduced for all six widths");
}

/// Criterion 3: the sech ladder — peak value within a factor of 3 down to
/// the 1e-10 entry, peak time within ±0.03, half-width within 10%.
#[test]
fn criterion_03_sech_table() {
    for i in 0..4 {
        let fx = sech_fixture(i);
        let peak = fx.profile.peak;
        let alpha = SECH_DECAYS[i];
        let ratio = peak.value / SECH_PEAKS[i];
        assert!(
            (1.0 / 3.0..=3.0).contains(&ratio),
            "α={alpha}: M̃ = {} vs {} (ratio {ratio})",
            peak.value,
            SECH_PEAKS[i]
        );
        assert!(
            (fx.profile.peak_t - SECH_PEAK_TIMES[i]).abs() <= 0.03,
            "α={alpha}: t₁ = {} vs {}",
            fx.profile.peak_t,
            SECH_PEAK_TIMES[i]
        );
        assert!(
            within_relative(peak.half_width(), SECH_PEAK_WIDTHS[i], 0.10),
            "α={alpha}: a_M = {} vs {}",
            peak.half_width(),
            SECH_PEAK_WIDTHS[i]
        );
        println!(
            "[PASS] criterion 3 (α={alpha:.3}): M̃={:.3e} t₁={:.3} a_M={:.3}",
            peak.value,
            fx.profile.peak_t,
            peak.half_width()
        );
    }
    println!("[PASS] criterion 3: sech table reproduced for all four decays");
}

/// Criterion 4: under the massless dispersion the Gaussian violation grows
/// monotonically (within noise) and reaches 0.12–0.14 by t = 20.
///
/// Known red on the reach-by-20 half: the model approaches its asymptote
/// 0.1277 like 1/t (measured 0.105 at t = 20, 0.116 at 40, 0.123 at 80), so
/// the band is first reached near t ≈ 60. The monotonicity half passes; the
/// t = 80 value is printed to document attainability at a longer horizon.
#[test]
fn criterion_04_massless_asymptote() {
    let fx = massless_fixture();
    let curve = fx.profile.symmetric_max_per_time();
    for (i, pair) in curve.windows(2).enumerate() {
        let slack = pair[0].floor + pair[1].floor;
        assert!(
            pair[1].value >= pair[0].value - slack,
            "M̃ decreased at step {i}: {} -> {} (slack {slack:e})",
            pair[0].value,
            pair[1].value
        );
    }
    let last = curve.last().unwrap().value;
    println!(
        "[{}] criterion 4: massless M̃ nondecreasing over 401 steps; M̃(20) = {last:.4} vs [0.12, 0.14]",
        if (0.12..=0.14).contains(&last) { "PASS" } else { "FAIL" }
    );
    if !(0.12..=0.14).contains(&last) {
        // Document the longer-horizon value before failing.
        let q = Quantifier::new(
            StateFamily::gaussian(1.0).expect("family"),
            Dispersion::Massless,
            80.1,
        )
        .expect("pipeline");
        let slice = q.slice(80.0).expect("slice");
        let peak = q.peak_symmetric(&slice, &HALF_WIDTH_SCAN);
        println!(
            "       …the 1/t approach reaches M̃(80) = {:.4}; asymptote ≈ 0.1277",
            peak.value
        );
    }
    assert!(
        (0.12..=0.14).contains(&last),
        "M̃(20) = {last} outside [0.12, 0.14]"
    );
}

/// Criterion 5: the Gaussian peaks grow as d shrinks and extrapolate above
/// 0.125 in the δ-limit (Aitken Δ² on the three smallest widths).
#[test]
fn criterion_05_delta_limit() {
    let peaks: Vec<f64> = (0..6).map(|i| gaussian_fixture(i).profile.peak.value).collect();
    for pair in peaks.windows(2) {
        assert!(
            pair[1] > pair[0],
            "peaks must grow as d shrinks: {pair:?}"
        );
    }
    let (x0, x1, x2) = (peaks[3], peaks[4], peaks[5]);
    let denom = x0 + x2 - 2.0 * x1;
    let limit = if denom.abs() > 1e-12 {
        (x0 * x2 - x1 * x1) / denom
    } else {
        x2
    };
    assert!(limit > 0.125, "δ-limit extrapolation {limit} ≤ 0.125");
    println!("[PASS] criterion 5: peaks monotone in d, δ-limit ≈ {limit:.4} > 0.125");
}

/// Criterion 6: at the Hegerfeldt boundary (sech decay = mass = 1) no
/// deficiency rises above its noise floor anywhere on the sweep.
#[test]
fn criterion_06_sech_at_hegerfeldt_bound() {
    let profile = sweep_only(
        StateFamily::sech(1.0).expect("valid decay"),
        Dispersion::Relativistic { mass: 1.0 },
        TimeScan {
            t_max: 3.0,
            step: 0.01,
        },
    );
    let mut worst_margin = f64::MIN;
    for d in &profile.samples {
        worst_margin = worst_margin.max(d.value - d.floor);
    }
    assert!(
        worst_margin <= 0.0,
        "a cell exceeded its noise floor by {worst_margin:e}"
    );
    assert!(!profile.peak.detected());
    println!(
        "[PASS] criterion 6: sech(α=1) stays under the floor (worst margin {worst_margin:.2e})"
    );
}

/// Criterion 7: the sinc·sech family breaks causality for every decay rate
/// on the 0.25 grid over [0, 4].
#[test]
fn criterion_07_sinc_sech_scan() {
    for i in 0..=16 {
        let alpha = 0.25 * i as f64;
        let profile = sweep_only(
            StateFamily::sinc_sech(alpha).expect("valid decay"),
            Dispersion::Relativistic { mass: 1.0 },
            TimeScan {
                t_max: 3.0,
                step: 0.01,
            },
        );
        let peak = profile.peak;
        assert!(
            peak.detected(),
            "α={alpha}: peak {} under floor {}",
            peak.value,
            peak.floor
        );
        println!(
            "[PASS] criterion 7 (α={alpha:.2}): M̃*={:.3e} > floor {:.1e}",
            peak.value, peak.floor
        );
    }
    println!("[PASS] criterion 7: sinc·sech violations detected across α ∈ [0, 4]");
}

/// Criterion 8: the heavy-tailed sinc^n states break causality for
/// n ∈ {1,2,3} and momentum cuts 0.1, 1, 10.
///
/// Known red on (n, p_m) = (1, 0.1): quadrature oracles at 1e-11 resolution
/// find no positive deficiency anywhere in the scan windows for that
/// corner, and 1/x tails cap f64 grid floors at the 1e-5 scale. The other
/// eight cases are oracle-confirmed violations and must be detected.
#[test]
fn criterion_08_sinc_power_scan() {
    let mut failures = Vec::new();
    for n in [1u32, 2, 3] {
        for p_m in [0.1, 1.0, 10.0] {
            // The family's intrinsic timescale stretches as 1/p_m.
            let unit = (1.0f64 / p_m).max(1.0);
            let profile = sweep_only(
                StateFamily::sinc_power(n, p_m).expect("valid family"),
                Dispersion::Relativistic { mass: 1.0 },
                TimeScan {
                    t_max: 3.0 * unit,
                    step: 0.01 * unit,
                },
            );
            let peak = profile.peak;
            println!(
                "[{}] criterion 8 (n={n}, p_m={p_m}): M̃*={:.3e} vs floor {:.1e}",
                if peak.detected() { "PASS" } else { "FAIL" },
                peak.value,
                peak.floor
            );
            if !peak.detected() {
                failures.push(format!(
                    "n={n} p_m={p_m}: peak {} under floor {}",
                    peak.value, peak.floor
                ));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "criterion 8 sub-checks failed:\n  {}",
        failures.join("\n  ")
    );
    println!("[PASS] criterion 8: sinc^n violations detected across the grid");
}

/// Criterion 9: the non-relativistic pipeline agrees with the closed-form
/// cone mass to 1e-8 on a 100-point grid, and a violating half-width above
/// the threshold formula exists for each probe time.
#[test]
fn criterion_09_nonrelativistic_closed_form() {
    let family = StateFamily::gaussian(0.5).expect("reference state");
    let q = Quantifier::with_grid(
        family,
        Dispersion::NonRelativistic { mass: 1.0 },
        GridSpec::new(-160.0, 320.0 / (1 << 20) as f64, 1 << 20).expect("grid"),
        10.5,
    )
    .expect("pipeline");
    let mut worst = 0.0f64;
    for ti in 0..10 {
        let t = 0.1 * 10f64.powf(ti as f64 * 2.0 / 9.0); // 0.1 … 10
        let slice = q.slice(t).expect("slice");
        for ai in 0..10 {
            let a = 0.2 + 0.4 * ai as f64; // 0.2 … 3.8
            let region = SpatialRegion::interval(-a - t, a + t).expect("ordered");
            let got = slice.measure.region_mass(&region);
            let expected = nonrel_cone_mass(a, t, 1.0);
            worst = worst.max((got - expected).abs());
        }
    }
    assert!(worst < 1e-8, "worst cone-mass deviation {worst:e}");

    // A violating half-width above the threshold exists for every t. The
    // deficiency erf(√2a) − erf(arg_t) is evaluated through erfc so the
    // t = 0.1 case (≈1e-24, far below f64 resolution of the direct
    // difference) stays representable; where the signal rises above the
    // grid floor the pipeline must see it too.
    for t in [0.1, 1.0, 10.0] {
        let threshold = nonrel_violation_threshold(t, 1.0);
        let mut found = None;
        for i in 1..200 {
            let a = threshold * (1.0 + 0.01 * i as f64);
            let arg_t = 2f64.sqrt() * (a + t) / (1.0 + 4.0 * t * t).sqrt();
            let closed = libm::erfc(arg_t) - libm::erfc(2f64.sqrt() * a);
            if closed > 0.0 {
                found = Some((a, closed));
                break;
            }
        }
        let (a, closed) = found.unwrap_or_else(|| panic!("t={t}: no violating a above {threshold}"));
        assert!(a > threshold);
        let slice = q.slice(t).expect("slice");
        let d = q.symmetric_deficiency(&slice, a);
        if closed > d.floor {
            assert!(
                d.detected(),
                "t={t}: closed form predicts {closed:e} at a={a} but the grid saw {} (floor {})",
                d.value,
                d.floor
            );
        }
        println!(
            "       criterion 9: t={t}: violating a = {a:.3} (> threshold {threshold:.3}), M = {closed:.3e}"
        );
    }
    println!(
        "[PASS] criterion 9: closed-form agreement to {worst:.2e} (< 1e-8), violations found above threshold"
    );
}

/// Criterion 10: twenty randomised spinors evolve causally — every pairwise
/// coupling shortfall ≤ 1e-6 over t ∈ [0, 5], the current never beats light,
/// and the continuity residual converges at second order.
#[test]
fn criterion_10_dirac_causality() {
    let grid = dirac::default_grid(5.0);
    let times = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
    let mut worst_shortfall = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for seed in 0..20 {
        let field = dirac::random_spinor(grid, 1.0, seed);
        for &t in &times {
            let ratio = field.evolve(t).expect("evolve").current().max_speed_ratio();
            worst_ratio = worst_ratio.max(ratio);
        }
        let checks = dirac::causality_check(&field, &times).expect("check");
        for check in checks {
            worst_shortfall = worst_shortfall.max(check.acausal_mass);
        }
    }
    assert!(worst_ratio <= 1.0 + 1e-12, "max |j|/ρ = {worst_ratio}");
    assert!(worst_shortfall <= 1e-6, "worst pairwise ñ = {worst_shortfall:e}");

    // Second-order convergence of the continuity residual.
    let mut residuals = Vec::new();
    for halvings in 0..2 {
        let n = 1usize << (13 + halvings);
        let g = GridSpec::new(-32.0, 64.0 / n as f64, n).expect("grid");
        let field = dirac::SpinorField::from_profiles(
            g,
            1.0,
            |x| num_complex::Complex64::new((-x * x / 2.0).exp(), 0.0),
            |x| num_complex::Complex64::from_polar(0.4 * (-x * x / 3.0).exp(), 1.1 * x),
        )
        .expect("spinor");
        let dt = 0.02 / (1 << halvings) as f64;
        let a = field.evolve(0.5).expect("evolve");
        let b = field.evolve(0.5 + dt).expect("evolve");
        residuals.push(dirac::continuity_residual(&a, &b).expect("residual"));
    }
    let ratio = residuals[0] / residuals[1];
    assert!(
        ratio > 3.0 && ratio < 5.0,
        "continuity residual convergence ratio {ratio} ({residuals:?})"
    );
    println!(
        "[PASS] criterion 10: 20 spinors causal (worst ñ {worst_shortfall:.2e}, worst |j|/ρ {worst_ratio:.12}), residual ratio {ratio:.2}"
    );
}

/// Criterion 11: exact duality between the flow solver and subset
/// enumeration on 500 random instances, plus the support-condition
/// counterexample.
#[test]
fn criterion_11_transport_duality() {
    let mut rng = SplitMix64::new(20260808);
    let mut worst = 0.0f64;
    for case in 0..500 {
        let mu = random_discrete(&mut rng, 0.0);
        let gap = rng.uniform(0.0, 3.0);
        let nu = random_discrete(&mut rng, gap);
        let result = max_causal_mass(&mu, &nu).expect("solver");
        let brute = brute_force_deficiency(&mu, &nu).expect("oracle");
        let diff = (result.acausal_mass - brute).abs();
        worst = worst.max(diff);
        assert!(diff < 1e-12, "case {case}: {} vs {brute}", result.acausal_mass);
    }

    // Excess mass on the left cannot reach the far-right atom even though
    // supp ν ⊆ J⁺(supp μ).
    let mu = DiscreteMeasure::new(0.0, vec![(-1.0, 0.6), (0.5, 0.4)]).expect("measure");
    let nu = DiscreteMeasure::new(3.0, vec![(0.0, 0.5), (3.5, 0.5)]).expect("measure");
    assert!(support_condition(&mu, &nu));
    let result = max_causal_mass(&mu, &nu).expect("solver");
    assert!(result.acausal_mass > 0.0);
    println!(
        "[PASS] criterion 11: 500 instances exact to {worst:.1e}; counterexample ñ = {:.3} with support condition true",
        result.acausal_mass
    );
}

fn random_discrete(rng: &mut SplitMix64, t: f64) -> DiscreteMeasure {
    let n = 1 + rng.below(10);
    let mut xs: Vec<f64> = (0..n).map(|_| rng.uniform(-5.0, 5.0)).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let mut masses: Vec<f64> = xs.iter().map(|_| rng.uniform(0.05, 1.0)).collect();
    let total: f64 = masses.iter().sum();
    for m in &mut masses {
        *m /= total;
    }
    let residue = 1.0 - masses.iter().sum::<f64>();
    masses[0] += residue;
    DiscreteMeasure::new(t, xs.into_iter().zip(masses).collect()).expect("random measure")
}

/// Criterion 12: the mass-rescaling identity holds to 1e-6 across a
/// randomised (family, m, t, interval) suite of at least 50 detectable
/// cases.
#[test]
fn criterion_12_scaling_identity() {
    let mut rng = SplitMix64::new(7_777);
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut draws = 0;
    while checked < 50 && draws < 200 {
        draws += 1;
        let (family, a_hint) = match rng.below(5) {
            0 | 1 => {
                let d = rng.uniform(0.4, 1.6);
                (StateFamily::gaussian(d).expect("family"), 2.89 * d.powf(0.35))
            }
            2 | 3 => {
                let alpha = rng.uniform(2.0, 3.5);
                (
                    StateFamily::sech(alpha).expect("family"),
                    1.4 * (3.0 / alpha).powf(1.8),
                )
            }
            _ => {
                let p_m = rng.uniform(0.8, 1.3);
                (StateFamily::sinc_power(2, p_m).expect("family"), 1.5 / p_m)
            }
        };
        let m = rng.uniform(0.6, 2.2);
        let t = rng.uniform(0.6, 1.0) / m;
        let a = a_hint * rng.uniform(0.85, 1.15) / m;
        let disc = scaling_discrepancy(&family, m, t, (-a, a)).expect("pipelines");
        // `scaling_discrepancy` normalises by the larger value or the
        // combined floors, so undetectable draws cannot fake agreement;
        // count only clearly detected ones.
        let probe = Quantifier::new(
            family.clone(),
            Dispersion::Relativistic { mass: m },
            t * 1.05 + 1e-3,
        )
        .expect("probe");
        let slice = probe.slice(t).expect("slice");
        let d = probe.symmetric_deficiency(&slice, a);
        if d.value < 20.0 * d.floor {
            continue;
        }
        checked += 1;
        worst = worst.max(disc);
        assert!(
            disc < 1e-6,
            "case {checked} ({family:?}, m={m:.3}, t={t:.3}, a={a:.3}): discrepancy {disc:e}"
        );
    }
    assert!(checked >= 50, "only {checked} detectable cases in {draws} draws");
    println!(
        "[PASS] criterion 12: scaling identity on {checked} cases, worst discrepancy {worst:.2e}"
    );
}

/// Criterion 13: weak duality — no cone deficiency exceeds the coupling
/// shortfall of its time slice by more than the discretisation slack, on
/// every sweep cell of criteria 1–4.
#[test]
fn criterion_13_weak_duality() {
    let mut worst = f64::MIN;
    let mut cells = 0usize;
    let mut scan = |fx: &SweepFixture, label: &str| {
        let n_a = fx.profile.half_widths.len();
        for (ti, &shortfall) in fx.shortfalls.iter().enumerate() {
            let row_max = fx.profile.samples[ti * n_a..(ti + 1) * n_a]
                .iter()
                .map(|d| d.value)
                .fold(0.0f64, f64::max);
            cells += n_a;
            let margin = row_max - shortfall;
            if margin > worst {
                worst = margin;
            }
            assert!(
                margin <= 1e-4,
                "{label}, t = {}: max M = {row_max} vs ñ = {shortfall}",
                fx.profile.times[ti]
            );
        }
    };
    for i in 0..6 {
        scan(gaussian_fixture(i), "gaussian");
    }
    for i in 0..4 {
        scan(sech_fixture(i), "sech");
    }
    scan(massless_fixture(), "massless");
    println!(
        "[PASS] criterion 13: weak duality on {cells} cells, worst M − ñ = {worst:.2e} (≤ 1e-4)"
    );
}
