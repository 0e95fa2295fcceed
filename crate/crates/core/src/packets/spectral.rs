//! Spectral synthesis of evolved packets.
//!
//! The evolution integral `ψ(t,x) = (2π)^{-1/2} ∫ ψ̂₀(p) e^{−iE(p)t + ipx} dp`
//! is evaluated by sampling the closed-form amplitude on the momentum grid
//! conjugate to the requested spatial grid and applying one inverse FFT. The
//! momentum grid is half-offset so the kink of the massless dispersion at
//! `p = 0` falls between nodes.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::numeric::CompensatedSum;

use super::amplitude::MomentumAmplitude;
use super::grid::{GridSpec, AMPLITUDE_CUT, TAIL_BUDGET_HARD};
use super::{Dispersion, PacketError, StateFamily, WavePacket};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Fraction of the grid on each side treated as the tail-diagnostic band.
const EDGE_BAND: f64 = 0.01;

/// Reusable evolution engine for one `(family, dispersion, grid)` triple.
///
/// Construction performs the resolution and tail checks and precomputes
/// everything `t`-independent, so a time sweep costs one vector of phase
/// rotations plus one FFT per sample.
pub struct SpectralEvolver {
    family: StateFamily,
    dispersion: Dispersion,
    grid: GridSpec,
    /// `ψ̂₀(p_j) e^{i p_j x_c0}` with `x_c0` the first cell centre.
    base: Vec<Complex64>,
    /// `E(p_j)` per momentum node.
    energies: Vec<f64>,
    /// Output fix-up: `(dp/√(2π)) (−1)^k e^{iπk/n}`.
    postfactor: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    /// |Σ|ψ̂₀(p_j)|² dp − 1|: momentum truncation plus sampling error.
    momentum_norm_delta: f64,
    /// Analytic bound on the initial mass outside the domain.
    initial_tail_bound: f64,
}

impl SpectralEvolver {
    pub fn new(
        family: StateFamily,
        dispersion: Dispersion,
        grid: GridSpec,
        t_max: f64,
    ) -> Result<Self, PacketError> {
        family.validate()?;
        dispersion.validate()?;
        let amp = MomentumAmplitude::for_family(&family);
        let support = amp.support_cut(AMPLITUDE_CUT);
        let p_need = support.cut + family.boost.abs();
        if grid.p_max() < p_need {
            return Err(PacketError::Resolution {
                needed: std::f64::consts::PI / p_need,
                available: grid.dx,
            });
        }

        // Truncated-tail precondition: the domain must hold the packet after
        // it spreads for t_max.
        let initial_tail_bound = super::grid::evolved_tail_bound(
            &family,
            &dispersion,
            t_max,
            p_need,
            grid.half_width(),
        );
        if initial_tail_bound > TAIL_BUDGET_HARD {
            return Err(PacketError::TailMass {
                bound: initial_tail_bound,
                budget: TAIL_BUDGET_HARD,
            });
        }

        let n = grid.n;
        let dp = grid.dp();
        let x_c0 = grid.center(0);
        let mut base = Vec::with_capacity(n);
        let mut energies = Vec::with_capacity(n);
        let mut norm = CompensatedSum::new();
        for j in 0..n {
            let p = (j as f64 - n as f64 / 2.0 + 0.5) * dp;
            let a = amp.eval(p);
            norm.add(a * a);
            base.push(Complex64::from_polar(a, p * x_c0));
            energies.push(dispersion.energy(p));
        }
        let momentum_norm_delta = (norm.value() * dp - 1.0).abs();

        let scale = dp / (2.0 * std::f64::consts::PI).sqrt();
        let postfactor = (0..n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::from_polar(
                    scale * sign,
                    std::f64::consts::PI * k as f64 / n as f64,
                )
            })
            .collect();

        let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));

        Ok(Self {
            family,
            dispersion,
            grid,
            base,
            energies,
            postfactor,
            fft,
            momentum_norm_delta,
            initial_tail_bound,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn family(&self) -> &StateFamily {
        &self.family
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.dispersion
    }

    /// Evolves the packet to time `t ≥ 0` and renormalises; the pre-rescale
    /// norm defect and the edge-band mass are kept as quadrature diagnostics.
    pub fn evolve(&self, t: f64) -> Result<WavePacket, PacketError> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(PacketError::InvalidTime(t));
        }
        let n = self.grid.n;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|j| self.base[j] * Complex64::from_polar(1.0, -self.energies[j] * t))
            .collect();
        self.fft.process(&mut buf);
        for (k, value) in buf.iter_mut().enumerate() {
            *value *= self.postfactor[k];
        }

        let dx = self.grid.dx;
        let mut norm = CompensatedSum::new();
        for v in &buf {
            norm.add(v.norm_sqr());
        }
        let total = norm.value() * dx;
        let renorm_delta = (total - 1.0).abs();
        let inv = total.sqrt().recip();
        for v in &mut buf {
            *v *= inv;
        }

        let band = ((n as f64 * EDGE_BAND) as usize).max(2);
        let mut edge = CompensatedSum::new();
        for v in buf.iter().take(band).chain(buf.iter().skip(n - band)) {
            edge.add(v.norm_sqr());
        }
        let edge_band_mass = edge.value() * dx / (total.max(0.5));

        Ok(WavePacket {
            grid: self.grid,
            t,
            psi: buf,
            renorm_delta: renorm_delta + self.momentum_norm_delta,
            edge_band_mass,
            tail_bound: self.initial_tail_bound,
        })
    }
}
