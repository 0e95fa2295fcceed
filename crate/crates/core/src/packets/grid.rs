//! Spatial grid selection for spectral evolution.
//!
//! The grid must satisfy two competing constraints: the conjugate momentum
//! window has to contain the packet's momentum support (with headroom for the
//! density, whose bandwidth is twice the field's), and the spatial domain has
//! to hold the evolved packet's tails below the truncation budget. Families
//! with exponential tails get a domain sized from an analytic bound on the
//! *evolved* tails — initial decay plus light-cone reach plus the evanescent
//! skin of the dispersion; power-tail families get the largest domain the
//! cell cap allows.

use std::f64::consts::PI;

use super::amplitude::MomentumAmplitude;
use super::{Dispersion, PacketError, Shape, StateFamily};

/// Hard ceiling on grid size.
pub const MAX_CELLS: usize = 1 << 20;
/// Default resolution floor for automatically chosen grids; keeps the
/// piecewise-constant region quadrature below the 1e-10 reproducibility
/// tolerance under grid doubling.
pub const AUTO_MIN_CELLS: usize = 1 << 18;
/// Relative amplitude below which the momentum support is considered cut.
pub const AMPLITUDE_CUT: f64 = 1e-17;
/// Truncated-tail budget for exponentially decaying families.
pub const TAIL_BUDGET_EXPONENTIAL: f64 = 1e-13;
/// Tail budget beyond which evolution refuses to run at all.
pub const TAIL_BUDGET_HARD: f64 = 1e-4;
/// Massless evolution builds algebraic tails out of any initial state; this
/// is the weakest truncation target the domain search accepts for them.
const TAIL_BUDGET_MASSLESS: f64 = 1e-9;
/// Minimum grid cells per characteristic packet width.
const CELLS_PER_SCALE: f64 = 128.0;
/// Power-tail families trade resolution for domain.
const CELLS_PER_SCALE_POWER: f64 = 32.0;
/// Nyquist headroom: momentum window ≥ margin × density bandwidth.
const NYQUIST_MARGIN: f64 = 1.2;

/// Uniform spatial grid: cell `k` is centred at `x0 + (k + 1/2)·dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn new(x0: f64, dx: f64, n: usize) -> Result<Self, PacketError> {
        if !(dx > 0.0) || n < 2 {
            return Err(PacketError::InvalidGrid {
                reason: format!("dx = {dx}, n = {n}"),
            });
        }
        Ok(Self { x0, dx, n })
    }

    /// Total covered interval `[x0, x0 + n·dx]`.
    pub fn x_end(&self) -> f64 {
        self.x0 + self.dx * self.n as f64
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.x_end() - self.x0)
    }

    /// Centre of cell `k`.
    pub fn center(&self, k: usize) -> f64 {
        self.x0 + (k as f64 + 0.5) * self.dx
    }

    /// Conjugate momentum spacing `2π/(n·dx)`.
    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dx)
    }

    /// Largest representable momentum magnitude on the half-offset grid.
    pub fn p_max(&self) -> f64 {
        (self.n as f64 / 2.0 - 0.5) * self.dp()
    }

    /// Picks a grid for evolving `family` under `dispersion` up to `t_max`.
    ///
    /// The domain is symmetric and covers the boost drift, the light-cone or
    /// dispersive spreading, the evanescent skin, and a buffer of a couple of
    /// packet widths.
    pub fn auto(
        family: &StateFamily,
        dispersion: &Dispersion,
        t_max: f64,
    ) -> Result<Self, PacketError> {
        family.validate()?;
        dispersion.validate()?;
        let amp = MomentumAmplitude::for_family(family);
        let support = amp.support_cut(AMPLITUDE_CUT);
        let p_cut = support.cut + family.boost.abs();
        // The density |ψ|² oscillates at up to twice the field bandwidth.
        let margin = if support.exact { 1.05 } else { NYQUIST_MARGIN };
        let dx_nyquist = PI / (margin * 2.0 * p_cut.max(1e-6));
        let scale = family.position_scale();
        let cells_per_scale = if family.has_power_tails() {
            CELLS_PER_SCALE_POWER
        } else {
            CELLS_PER_SCALE
        };
        let mut dx = dx_nyquist.min(scale / cells_per_scale);

        let drift = drift_speed(family.boost, dispersion) * t_max;
        match evolved_extent(family, dispersion, t_max, p_cut) {
            Some(extent) => {
                let half = extent + drift + 2.0 * scale + 1.0;
                let n = ((2.0 * half / dx).ceil() as usize)
                    .next_power_of_two()
                    .clamp(AUTO_MIN_CELLS, MAX_CELLS);
                if (n as f64) * dx < 2.0 * half {
                    // Cell cap reached: coarsen up to the Nyquist limit.
                    dx = 2.0 * half / n as f64;
                    if dx > dx_nyquist {
                        return Err(PacketError::Resolution {
                            needed: dx_nyquist,
                            available: dx,
                        });
                    }
                } else {
                    // Spare cells: spend them on resolution, not domain.
                    dx = 2.0 * half / n as f64;
                }
                let half = 0.5 * n as f64 * dx;
                GridSpec::new(-half, dx, n)
            }
            None => {
                // Algebraic tails: no domain meets the strict budget, so
                // weigh candidate truncation budgets against the quadrature
                // gain of finer cells on their smaller domains. The score
                // mirrors the runtime noise-floor model: wrapped-tail weight
                // ≈ 0.3·τ, boundary-quadrature weight ≈ 10·dx²·ρ′/8 at the
                // mid-tail slope where weak-signal scans live.
                let slope = family.tail_slope_scale();
                let margins = drift + 2.0 * scale + 1.0;
                let score_of = |tau: f64, dx_eff: f64| {
                    0.3 * tau + 10.0 * dx_eff * dx_eff / 8.0 * slope
                };
                // Fallback: the largest domain the cap affords at base
                // resolution.
                let half_fb = 0.5 * MAX_CELLS as f64 * dx;
                if half_fb < 4.0 * (scale + drift + t_max) {
                    return Err(PacketError::Resolution {
                        needed: dx,
                        available: 8.0 * (scale + drift + t_max) / MAX_CELLS as f64,
                    });
                }
                let tau_fb =
                    evolved_tail_bound(family, dispersion, t_max, p_cut, half_fb - margins);
                let mut best = (score_of(tau_fb, dx), half_fb, dx);

                let mut budget = TAIL_BUDGET_EXPONENTIAL;
                while budget <= TAIL_BUDGET_HARD {
                    if let Some(extent) =
                        extent_for_budget(family, dispersion, t_max, p_cut, budget)
                    {
                        let half = extent + margins;
                        if 2.0 * half / dx <= MAX_CELLS as f64 {
                            let dx_eff = 2.0 * half / MAX_CELLS as f64;
                            let score = score_of(budget, dx_eff);
                            if score < best.0 {
                                best = (score, half, dx_eff);
                            }
                        }
                    }
                    budget *= 10.0;
                }
                GridSpec::new(-best.1, best.2, MAX_CELLS)
            }
        }
    }
}

/// Mean transport speed of a boosted packet.
fn drift_speed(boost: f64, dispersion: &Dispersion) -> f64 {
    match dispersion {
        Dispersion::Relativistic { mass } => {
            boost.abs() / (boost * boost + mass * mass).sqrt()
        }
        Dispersion::Massless => {
            if boost == 0.0 {
                0.0
            } else {
                1.0
            }
        }
        Dispersion::NonRelativistic { mass } => boost.abs() / mass,
    }
}

/// Bound on the mass an evolved packet keeps beyond `±x` at times up to `t`.
///
/// Relativistic evolution transports the initial tails along the light cone
/// and adds an evanescent skin `~e^{−2m s}` outside it; the massless sign
/// kink turns any state into one with `x⁻⁴` density tails of weight
/// `(t·∫ψ₀)²`; non-relativistic Gaussians spread in closed form, anything
/// else is bounded by ballistic transport at the resolved group speed.
pub(crate) fn evolved_tail_bound(
    family: &StateFamily,
    dispersion: &Dispersion,
    t: f64,
    p_cut: f64,
    x: f64,
) -> f64 {
    match dispersion {
        Dispersion::Relativistic { mass } => {
            let s = (x - t).max(0.0);
            family.tail_mass_bound(s) + 1e-2 * (-2.0 * mass * s).exp()
        }
        Dispersion::Massless => {
            let s = (x - t).max(0.0);
            let hilbert = match family.l1_norm() {
                Some(s0) if s > 0.0 => 2.0 * t * t * s0 * s0 / (3.0 * PI * PI * s.powi(3)),
                Some(_) => 1.0,
                // The Hilbert transform of the 1/x-tailed sinc stays in its
                // decay class (H[sin x/x] = (1−cos x)/x), at worst tripling
                // the tail mass.
                None => 3.0 * family.tail_mass_bound(s),
            };
            family.tail_mass_bound(s) + hilbert
        }
        Dispersion::NonRelativistic { mass } => match family.shape {
            Shape::Gaussian { width_sq: d } => {
                let w_t = (d * (1.0 + (t / (mass * d)).powi(2))).sqrt();
                libm::erfc(x / w_t)
            }
            _ => family.tail_mass_bound((x - p_cut / mass * t).max(0.0)),
        },
    }
}

/// Half-width beyond which the *evolved* packet keeps less than the
/// truncation budget of its mass, `None` when tails are algebraic and no
/// finite domain reaches the budget.
fn evolved_extent(
    family: &StateFamily,
    dispersion: &Dispersion,
    t_max: f64,
    p_cut: f64,
) -> Option<f64> {
    if family.has_power_tails() {
        return None;
    }
    let budget = match dispersion {
        Dispersion::Massless => TAIL_BUDGET_MASSLESS,
        _ => TAIL_BUDGET_EXPONENTIAL,
    };
    extent_for_budget(family, dispersion, t_max, p_cut, budget)
}

/// Geometric search for the half-width at which the evolved tail bound
/// drops under `budget`.
fn extent_for_budget(
    family: &StateFamily,
    dispersion: &Dispersion,
    t_max: f64,
    p_cut: f64,
    budget: f64,
) -> Option<f64> {
    let mut x = family.position_scale() + t_max;
    for _ in 0..400 {
        if evolved_tail_bound(family, dispersion, t_max, p_cut, x) <= budget {
            return Some(x);
        }
        x *= 1.2;
    }
    None
}

impl StateFamily {
    /// Characteristic width of the initial density.
    pub fn position_scale(&self) -> f64 {
        match self.shape {
            Shape::Gaussian { width_sq } => width_sq.sqrt(),
            Shape::Sech { decay } => decay.recip(),
            Shape::SincSech { decay } => {
                if decay > 1.0 {
                    decay.recip()
                } else {
                    1.0
                }
            }
            Shape::SincPower { momentum_cut, .. } => momentum_cut.recip(),
            Shape::BoxState { half_width } => half_width,
        }
    }

    /// Upper bound on the initial mass beyond `±x`.
    pub fn tail_mass_bound(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match self.shape {
            Shape::Gaussian { width_sq } => libm::erfc(x / width_sq.sqrt()),
            // 1 − tanh(αx) ≤ 2 e^{−2αx}
            Shape::Sech { decay } => 2.0 * (-2.0 * decay * x).exp(),
            Shape::SincSech { decay } if decay > 0.0 => {
                // |ψ| ≤ N (2/x) e^{−αx} with N² ≲ 1 + α
                8.0 * (-2.0 * decay * x).exp() / x * (1.0 + decay)
            }
            Shape::SincSech { .. } => 2.0 / (PI * x), // α = 0: plain sinc
            Shape::SincPower {
                order,
                momentum_cut,
            } => {
                // density ≤ N²/(p_m x)^{2n}, N² = p_m / ∫ sinc^{2n}
                let m = 2 * order;
                let norm_sq = momentum_cut / super::amplitude::sinc_power_l2(m);
                2.0 * norm_sq / ((m as f64 - 1.0) * momentum_cut.powi(m as i32))
                    / x.powi(m as i32 - 1)
            }
            Shape::BoxState { half_width } => {
                if x >= half_width {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    /// Distance beyond which the initial tail mass drops under `budget`,
    /// `None` for power-law families that can never reach it.
    pub fn tail_extent(&self, budget: f64) -> Option<f64> {
        match self.shape {
            Shape::SincSech { decay: 0.0 } => None,
            Shape::SincPower { .. } => None,
            Shape::BoxState { half_width } => Some(half_width),
            _ => {
                let mut x = self.position_scale();
                for _ in 0..400 {
                    if self.tail_mass_bound(x) <= budget {
                        return Some(x);
                    }
                    x *= 1.2;
                }
                None
            }
        }
    }

    /// `∫ |ψ₀| dx`, `None` where it diverges (plain sinc).
    pub fn l1_norm(&self) -> Option<f64> {
        match self.shape {
            Shape::Gaussian { width_sq: d } => {
                Some(2f64.sqrt() * (PI * d).powf(0.25))
            }
            Shape::Sech { decay } => Some(PI / (2.0 * decay).sqrt()),
            Shape::BoxState { half_width } => Some((2.0 * half_width).sqrt()),
            Shape::SincSech { decay } if decay > 0.0 => {
                let extent = 50.0 / decay.min(1.0);
                Some(crate::numeric::integrate_adaptive(
                    &|x: f64| self.position_amplitude(x).abs(),
                    -extent,
                    extent,
                    1e-10,
                ))
            }
            Shape::SincSech { .. } => None,
            Shape::SincPower { order, .. } if order >= 2 => {
                let extent = 400.0 * self.position_scale();
                Some(crate::numeric::integrate_adaptive(
                    &|x: f64| self.position_amplitude(x).abs(),
                    -extent,
                    extent,
                    1e-9,
                ))
            }
            Shape::SincPower { .. } => None,
        }
    }

    /// True for families whose tails decay only algebraically.
    pub fn has_power_tails(&self) -> bool {
        matches!(
            self.shape,
            Shape::SincPower { .. } | Shape::SincSech { decay: 0.0 }
        )
    }

    /// |dρ₀/dx| near the mid-tail (initial mass beyond ≈ 1e-4) — the slope
    /// scale entering quadrature floors where weak-signal scans live.
    pub(crate) fn tail_slope_scale(&self) -> f64 {
        let mut x = self.position_scale();
        for _ in 0..200 {
            if self.tail_mass_bound(x) <= 1e-4 {
                break;
            }
            x *= 1.15;
        }
        let h = (1e-4 * x).max(1e-9);
        let rho = |y: f64| self.position_amplitude(y).powi(2);
        (0..12)
            .map(|i| {
                let xi = x * (1.0 + 0.03 * i as f64);
                ((rho(xi + h) - rho(xi - h)) / (2.0 * h)).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl Dispersion {
    /// Bound on the group speed over the resolved momentum window.
    pub fn max_speed(&self, p_cut: f64) -> f64 {
        match self {
            Dispersion::Relativistic { .. } | Dispersion::Massless => 1.0,
            Dispersion::NonRelativistic { mass } => p_cut / mass,
        }
    }
}
