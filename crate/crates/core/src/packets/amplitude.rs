//! Closed-form momentum-space amplitudes for the wave-packet families.
//!
//! The momentum representation is always taken from analytic formulas rather
//! than a numerical transform of the position-space profile, so the spectral
//! synthesis carries one quadrature layer only. All amplitudes are real for
//! zero boost; a boost shifts the argument.

use std::f64::consts::PI;

use crate::numeric::{integrate_adaptive, integrate_gl32};

use super::{Shape, StateFamily};

/// Momentum-truncation mass budget for the box state, whose transform has
/// `1/p` tails that no affordable window cuts at amplitude level.
pub(crate) const BOX_MOMENTUM_MASS_BUDGET: f64 = 3e-5;

/// Evaluator for `ψ̂₀(p)`, normalised to unit L² norm.
#[derive(Debug, Clone)]
pub struct MomentumAmplitude {
    kind: AmplitudeKind,
    boost: f64,
}

#[derive(Debug, Clone)]
enum AmplitudeKind {
    /// `norm · exp(−d p²/2)`
    Gaussian { d: f64, norm: f64 },
    /// `norm · sech(π p / (2α))`
    Sech { half_pi_over_alpha: f64, norm: f64 },
    /// `norm · atan(sinh λ / cosh(λ p))`, λ = π/(2α); the convolution of a
    /// momentum box with the sech transform in closed form.
    SincSech { lambda: f64, sinh_lambda: f64, norm: f64 },
    /// Box of height `norm` on `[−p_max, p_max]`.
    Box { p_max: f64, norm: f64 },
    /// `norm · B_n((p/p_m + n)/2)`: the n-fold box self-convolution
    /// (a centred B-spline), compact support `[−n·p_m, n·p_m]`.
    BSpline { n: u32, p_m: f64, norm: f64 },
    /// `norm · sinc(p d)` — transform of the position-space box state.
    SincOfBox { d: f64, norm: f64 },
}

impl MomentumAmplitude {
    pub fn for_family(family: &StateFamily) -> Self {
        let kind = match family.shape {
            Shape::Gaussian { width_sq: d } => AmplitudeKind::Gaussian {
                d,
                norm: (d / PI).powf(0.25),
            },
            Shape::Sech { decay: alpha } => AmplitudeKind::Sech {
                half_pi_over_alpha: 0.5 * PI / alpha,
                norm: 0.5 * (PI / alpha).sqrt(),
            },
            Shape::SincSech { decay: 0.0 } => AmplitudeKind::Box {
                p_max: 1.0,
                norm: 2.0f64.sqrt().recip(),
            },
            Shape::SincSech { decay: alpha } => {
                let lambda = 0.5 * PI / alpha;
                let sinh_lambda = lambda.sinh();
                let raw = |p: f64| sinc_sech_raw(lambda, sinh_lambda, p);
                // Exponential tails e^{−λ(|p|−1)} beyond the box edge.
                let extent = 1.0 + (45.0 / lambda).max(2.0);
                let norm_sq =
                    2.0 * integrate_adaptive(&|p: f64| raw(p) * raw(p), 0.0, extent, 1e-14);
                AmplitudeKind::SincSech {
                    lambda,
                    sinh_lambda,
                    norm: norm_sq.sqrt().recip(),
                }
            }
            Shape::SincPower {
                order: 1,
                momentum_cut: p_m,
            } => AmplitudeKind::Box {
                p_max: p_m,
                norm: (2.0 * p_m).sqrt().recip(),
            },
            Shape::SincPower {
                order: n,
                momentum_cut: p_m,
            } => {
                // ∫ B_n((p/p_m + n)/2)² dp = 2 p_m ∫₀ⁿ B_n(u)² du, each unit
                // interval a polynomial of degree 2n−2: GL32 is exact.
                let mut norm_sq = 0.0;
                for k in 0..n {
                    norm_sq +=
                        integrate_gl32(|u| bspline(n, u).powi(2), k as f64, (k + 1) as f64);
                }
                norm_sq *= 2.0 * p_m;
                AmplitudeKind::BSpline {
                    n,
                    p_m,
                    norm: norm_sq.sqrt().recip(),
                }
            }
            Shape::BoxState { half_width: d } => AmplitudeKind::SincOfBox {
                d,
                norm: (d / PI).sqrt(),
            },
        };
        Self {
            kind,
            boost: family.boost,
        }
    }

    /// Amplitude at momentum `p` (real-valued; a boost shifts the argument).
    pub fn eval(&self, p: f64) -> f64 {
        let q = p - self.boost;
        match &self.kind {
            AmplitudeKind::Gaussian { d, norm } => norm * (-0.5 * d * q * q).exp(),
            AmplitudeKind::Sech {
                half_pi_over_alpha,
                norm,
            } => {
                let arg = half_pi_over_alpha * q;
                // sech via exp, underflow-safe
                let e = (-arg.abs()).exp();
                norm * 2.0 * e / (1.0 + e * e)
            }
            AmplitudeKind::SincSech {
                lambda,
                sinh_lambda,
                norm,
            } => norm * sinc_sech_raw(*lambda, *sinh_lambda, q),
            AmplitudeKind::Box { p_max, norm } => {
                if q.abs() <= *p_max {
                    *norm
                } else {
                    0.0
                }
            }
            AmplitudeKind::BSpline { n, p_m, norm } => {
                norm * bspline(*n, 0.5 * (q / p_m + *n as f64))
            }
            AmplitudeKind::SincOfBox { d, norm } => {
                let z = q * d;
                if z.abs() < 1e-8 {
                    norm * (1.0 - z * z / 6.0)
                } else {
                    norm * z.sin() / z
                }
            }
        }
    }

    /// Smallest momentum beyond which `|ψ̂₀|` is below `threshold` times its
    /// peak, before the boost shift. Exact for compactly supported shapes.
    pub fn support_cut(&self, threshold: f64) -> MomentumSupport {
        let log_thresh = -threshold.ln(); // e.g. 39.1 for 1e-17
        match &self.kind {
            AmplitudeKind::Gaussian { d, .. } => MomentumSupport {
                cut: (2.0 * log_thresh / d).sqrt(),
                exact: false,
            },
            AmplitudeKind::Sech {
                half_pi_over_alpha, ..
            } => MomentumSupport {
                cut: (log_thresh + std::f64::consts::LN_2) / half_pi_over_alpha,
                exact: false,
            },
            AmplitudeKind::SincSech { lambda, .. } => MomentumSupport {
                // atan(sinh λ / cosh(λp)) ≈ 2 sinh λ e^{−λp} for λp ≫ 1
                cut: 1.0 + (log_thresh + (2.0 * lambda.sinh()).ln().max(0.0)) / lambda,
                exact: false,
            },
            AmplitudeKind::Box { p_max, .. } => MomentumSupport {
                cut: *p_max,
                exact: true,
            },
            AmplitudeKind::BSpline { n, p_m, .. } => MomentumSupport {
                cut: *n as f64 * p_m,
                exact: true,
            },
            AmplitudeKind::SincOfBox { d, .. } => MomentumSupport {
                // |sinc(pd)| ~ 1/(pd) decays too slowly for an amplitude
                // cut; bound the truncated momentum *mass* 2/(π d P) instead.
                cut: 2.0 / (PI * d * BOX_MOMENTUM_MASS_BUDGET),
                exact: false,
            },
        }
    }

    pub fn boost(&self) -> f64 {
        self.boost
    }
}

/// Momentum-space support descriptor: `cut` bounds the unshifted support,
/// `exact` marks compactly supported amplitudes.
#[derive(Debug, Clone, Copy)]
pub struct MomentumSupport {
    pub cut: f64,
    pub exact: bool,
}

/// `atan(sinh λ / cosh(λ p))` evaluated without overflow for large `λ` or
/// `λ p`. Derived from `∫ sech` via the hyperbolic atan subtraction rule, so
/// the difference of near-equal antiderivatives never appears.
fn sinc_sech_raw(lambda: f64, sinh_lambda: f64, p: f64) -> f64 {
    let u = (lambda * p).abs();
    if sinh_lambda.is_finite() {
        if u < 700.0 {
            (sinh_lambda / u.cosh()).atan()
        } else {
            // cosh(u) ≈ e^u/2; atan(x) ≈ x for the tiny ratio
            let log_ratio = sinh_lambda.ln() + std::f64::consts::LN_2 - u;
            if log_ratio < -700.0 {
                0.0
            } else {
                log_ratio.exp().atan()
            }
        }
    } else {
        // λ so large that sinh λ overflows: sinh λ / cosh u ≈ e^{λ−u}.
        let diff = lambda - u;
        if diff > 700.0 {
            std::f64::consts::FRAC_PI_2
        } else if diff >= 0.0 {
            std::f64::consts::FRAC_PI_2 - (-diff).exp().atan()
        } else {
            diff.exp().atan()
        }
    }
}

/// Cardinal B-spline `B_n` on `[0, n]`:
/// `B_n(u) = (1/(n−1)!) Σ_k (−1)^k C(n,k) (u−k)₊^{n−1}`.
///
/// Alternating-sum cancellation limits this to moderate orders; the packet
/// families use n ≤ a few.
fn bspline(n: u32, u: f64) -> f64 {
    let nf = n as f64;
    if !(0.0..=nf).contains(&u) {
        return 0.0;
    }
    if n == 1 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut binom = 1.0; // C(n, k)
    for k in 0..=n {
        let base = u - k as f64;
        if base > 0.0 {
            sum += binom * base.powi(n as i32 - 1);
        }
        binom *= -(nf - k as f64) / (k as f64 + 1.0);
    }
    let mut fact = 1.0;
    for j in 2..n {
        fact *= j as f64;
    }
    sum / fact
}

/// `∫ (sin x / x)^m dx` over the real line, closed form:
/// `π/(2^{m−1}(m−1)!) Σ_k (−1)^k C(m,k)(m−2k)^{m−1}`, k ≤ m/2.
pub fn sinc_power_l2(m: u32) -> f64 {
    let mf = m as f64;
    let mut fact = 1.0;
    for j in 2..m {
        fact *= j as f64;
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut sign = 1.0;
    for k in 0..=(m / 2) {
        let base = mf - 2.0 * k as f64;
        if base > 0.0 {
            sum += sign * binom * base.powi(m as i32 - 1);
        }
        binom *= (mf - k as f64) / (k as f64 + 1.0);
        sign = -sign;
    }
    PI / (2f64.powi(m as i32 - 1) * fact) * sum
}
