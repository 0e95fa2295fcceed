//! Wave-packet families with closed-form momentum representations and their
//! spectral time evolution.
//!
//! Every family is normalised to unit L² norm and, unboosted, is even in `x`.
//! Evolution applies the phase `e^{−iE(p)t}` per momentum mode, with `E(p)`
//! given by the chosen dispersion relation:
//!
//! | dispersion        | `E(p)`        |
//! |-------------------|---------------|
//! | relativistic      | `√(p² + m²)`  |
//! | massless          | `\|p\|`       |
//! | non-relativistic  | `p²/(2m)`     |

mod amplitude;
mod grid;
mod spectral;

pub use amplitude::MomentumAmplitude;
pub use grid::{GridSpec, MAX_CELLS, TAIL_BUDGET_EXPONENTIAL, TAIL_BUDGET_HARD};
pub use spectral::SpectralEvolver;

use num_complex::Complex64;
use thiserror::Error;

use crate::numeric::CompensatedSum;
use crate::spacetime::GridMeasure;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PacketError {
    #[error("invalid family parameter: {0}")]
    InvalidFamily(String),
    #[error("invalid dispersion: {0}")]
    InvalidDispersion(String),
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    #[error("grid spacing {available} cannot resolve the momentum support (need ≤ {needed})")]
    Resolution { needed: f64, available: f64 },
    #[error("truncated tail mass bound {bound} exceeds budget {budget}")]
    TailMass { bound: f64, budget: f64 },
    #[error("evolution time must be finite and ≥ 0, got {0}")]
    InvalidTime(f64),
    #[error("family cannot be rescaled within its parameter set")]
    NotRescalable,
}

/// Initial-state profile. All shapes are unit-normalised and even.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Shape {
    /// `(π d)^{-1/4} exp(−x²/(2d))` — width `√d`.
    Gaussian { width_sq: f64 },
    /// `√(α/2) sech(αx)` — exponential tails at rate `α`.
    Sech { decay: f64 },
    /// `N sin(x)/x · sech(αx)`; `α = 0` degenerates to the plain sinc.
    SincSech { decay: f64 },
    /// `N (sin(p_m x)/(p_m x))^n` — algebraic tails, momentum support
    /// `[−n·p_m, n·p_m]`.
    SincPower { order: u32, momentum_cut: f64 },
    /// `(2d)^{-1/2} χ_{[−d,d]}` — compact support in position space.
    BoxState { half_width: f64 },
}

/// A shape together with a mean-momentum boost.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StateFamily {
    pub shape: Shape,
    pub boost: f64,
}

impl StateFamily {
    pub fn gaussian(width_sq: f64) -> Result<Self, PacketError> {
        Self::from_shape(Shape::Gaussian { width_sq })
    }

    pub fn sech(decay: f64) -> Result<Self, PacketError> {
        Self::from_shape(Shape::Sech { decay })
    }

    pub fn sinc_sech(decay: f64) -> Result<Self, PacketError> {
        Self::from_shape(Shape::SincSech { decay })
    }

    pub fn sinc_power(order: u32, momentum_cut: f64) -> Result<Self, PacketError> {
        Self::from_shape(Shape::SincPower {
            order,
            momentum_cut,
        })
    }

    pub fn box_state(half_width: f64) -> Result<Self, PacketError> {
        Self::from_shape(Shape::BoxState { half_width })
    }

    pub fn from_shape(shape: Shape) -> Result<Self, PacketError> {
        let family = Self { shape, boost: 0.0 };
        family.validate()?;
        Ok(family)
    }

    pub fn with_boost(mut self, boost: f64) -> Self {
        self.boost = boost;
        self
    }

    pub fn validate(&self) -> Result<(), PacketError> {
        if !self.boost.is_finite() {
            return Err(PacketError::InvalidFamily("boost must be finite".into()));
        }
        match self.shape {
            Shape::Gaussian { width_sq } if !(width_sq > 0.0) => Err(PacketError::InvalidFamily(
                format!("gaussian width_sq must be > 0, got {width_sq}"),
            )),
            Shape::Sech { decay } if !(decay > 0.0) => Err(PacketError::InvalidFamily(format!(
                "sech decay must be > 0, got {decay}"
            ))),
            Shape::SincSech { decay } if !(decay >= 0.0) => Err(PacketError::InvalidFamily(
                format!("sinc-sech decay must be ≥ 0, got {decay}"),
            )),
            Shape::SincPower {
                order,
                momentum_cut,
            } if order == 0 || !(momentum_cut > 0.0) => Err(PacketError::InvalidFamily(format!(
                "sinc^n needs order ≥ 1 and momentum_cut > 0, got ({order}, {momentum_cut})"
            ))),
            Shape::BoxState { half_width } if !(half_width > 0.0) => Err(
                PacketError::InvalidFamily(format!("box half_width must be > 0, got {half_width}")),
            ),
            _ => Ok(()),
        }
    }

    /// Closed-form momentum-space amplitude `ψ̂₀`.
    pub fn momentum_amplitude(&self) -> Result<MomentumAmplitude, PacketError> {
        self.validate()?;
        Ok(MomentumAmplitude::for_family(self))
    }

    /// Unboosted position-space profile (real); a boost only adds a phase,
    /// leaving `|ψ₀|` unchanged.
    pub fn position_amplitude(&self, x: f64) -> f64 {
        fn sinc(z: f64) -> f64 {
            if z.abs() < 1e-8 {
                1.0 - z * z / 6.0
            } else {
                z.sin() / z
            }
        }
        match self.shape {
            Shape::Gaussian { width_sq: d } => {
                (std::f64::consts::PI * d).powf(-0.25) * (-x * x / (2.0 * d)).exp()
            }
            Shape::Sech { decay: a } => (0.5 * a).sqrt() / (a * x).cosh(),
            Shape::SincSech { decay: a } => {
                let norm_sq = crate::numeric::integrate_adaptive(
                    &|y: f64| (sinc(y) / (a * y).cosh()).powi(2),
                    -60.0 / a.max(0.05),
                    60.0 / a.max(0.05),
                    1e-14,
                );
                sinc(x) / (a * x).cosh() / norm_sq.sqrt()
            }
            Shape::SincPower {
                order: n,
                momentum_cut: pm,
            } => {
                let norm = (pm / amplitude::sinc_power_l2(2 * n)).sqrt();
                norm * sinc(pm * x).powi(n as i32)
            }
            Shape::BoxState { half_width: d } => {
                if x.abs() <= d {
                    (2.0 * d).sqrt().recip()
                } else {
                    0.0
                }
            }
        }
    }

    /// The normalised profile `x ↦ ψ₀(x/λ)`, when it stays inside the same
    /// parameter set. Underlies the mass-rescaling identity of relativistic
    /// evolution.
    pub fn rescaled(&self, lambda: f64) -> Result<Self, PacketError> {
        if !(lambda > 0.0) {
            return Err(PacketError::InvalidFamily(format!(
                "rescale factor must be > 0, got {lambda}"
            )));
        }
        let shape = match self.shape {
            Shape::Gaussian { width_sq } => Shape::Gaussian {
                width_sq: width_sq * lambda * lambda,
            },
            Shape::Sech { decay } => Shape::Sech {
                decay: decay / lambda,
            },
            Shape::SincPower {
                order,
                momentum_cut,
            } => Shape::SincPower {
                order,
                momentum_cut: momentum_cut / lambda,
            },
            Shape::BoxState { half_width } => Shape::BoxState {
                half_width: half_width * lambda,
            },
            // sin(x/λ)/(x/λ)·sech(αx/λ) leaves the fixed-frequency sinc-sech set.
            Shape::SincSech { .. } => return Err(PacketError::NotRescalable),
        };
        Ok(Self {
            shape,
            boost: self.boost * lambda,
        })
    }
}

/// Single-particle dispersion relation.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Dispersion {
    Relativistic { mass: f64 },
    Massless,
    NonRelativistic { mass: f64 },
}

impl Dispersion {
    pub fn validate(&self) -> Result<(), PacketError> {
        match self {
            Dispersion::Relativistic { mass } | Dispersion::NonRelativistic { mass }
                if !(*mass > 0.0) =>
            {
                Err(PacketError::InvalidDispersion(format!(
                    "mass must be > 0, got {mass}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn energy(&self, p: f64) -> f64 {
        match self {
            Dispersion::Relativistic { mass } => (p * p + mass * mass).sqrt(),
            Dispersion::Massless => p.abs(),
            Dispersion::NonRelativistic { mass } => 0.5 * p * p / mass,
        }
    }
}

/// Complex amplitude samples on a spatial grid at a fixed time, unit norm.
#[derive(Debug, Clone)]
pub struct WavePacket {
    pub(crate) grid: GridSpec,
    pub(crate) t: f64,
    pub(crate) psi: Vec<Complex64>,
    pub(crate) renorm_delta: f64,
    pub(crate) edge_band_mass: f64,
    pub(crate) tail_bound: f64,
}

impl WavePacket {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    /// Norm defect absorbed by renormalisation; a quadrature-error gauge.
    pub fn renorm_delta(&self) -> f64 {
        self.renorm_delta
    }

    /// Mass found in the outermost 1% of cells on each side.
    pub fn edge_band_mass(&self) -> f64 {
        self.edge_band_mass
    }

    /// Analytic bound on the mass the domain truncates.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Quadrature-error estimate for region-mass *differences* against the
    /// initial slice: a few times the edge-band mass, gauging what the
    /// periodic domain wraps around. The norm defect is excluded — it is
    /// shared by every slice of one evolver (the phase `e^{−iEt}` leaves
    /// `|ψ̂|²` untouched), so it rescales all region masses by one common
    /// factor that cancels in differences.
    pub fn wrap_error_estimate(&self) -> f64 {
        3.0 * self.edge_band_mass
    }

    /// Midpoint-rule probability measure `w_k = |ψ(x_k)|² dx`, renormalised;
    /// the rescale defect is returned alongside.
    pub fn density(&self) -> (GridMeasure, f64) {
        let dx = self.grid.dx;
        let mut acc = CompensatedSum::new();
        let mut weights: Vec<f64> = self
            .psi
            .iter()
            .map(|v| {
                let w = v.norm_sqr() * dx;
                acc.add(w);
                w
            })
            .collect();
        let total = acc.value();
        let delta = (total - 1.0).abs();
        let inv = total.recip();
        for w in &mut weights {
            *w *= inv;
        }
        let measure = GridMeasure::new(self.t, self.grid.x0, dx, weights)
            .expect("renormalised density is a valid grid measure");
        (measure, delta)
    }
}

/// One-shot evolution: picks no grid for you — see [`GridSpec::auto`] — and
/// rebuilds the evolver each call. Sweeps should hold a [`SpectralEvolver`].
pub fn evolve(
    family: &StateFamily,
    dispersion: &Dispersion,
    t: f64,
    grid: GridSpec,
) -> Result<WavePacket, PacketError> {
    SpectralEvolver::new(family.clone(), dispersion.clone(), grid, t)?.evolve(t)
}

/// Closed-form mass of the widened interval `[−a−t, a+t]` for the spreading
/// Gaussian of the non-relativistic reference state `(2/π)^{1/4} e^{−x²}`:
/// `Erf(√2·m(a+t)/√(m² + 4t²))`.
pub fn nonrel_cone_mass(a: f64, t: f64, m: f64) -> f64 {
    libm::erf((2.0f64).sqrt() * m * (a + t) / (m * m + 4.0 * t * t).sqrt())
}

/// Interval half-widths above this threshold lose mass from their light cone
/// under non-relativistic evolution: `m(√(m² + 4t²) + m)/(4t)`.
pub fn nonrel_violation_threshold(t: f64, m: f64) -> f64 {
    m * ((m * m + 4.0 * t * t).sqrt() + m) / (4.0 * t)
}
