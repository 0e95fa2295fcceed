//! Causal-flow checks for sampled density/flux fields.
//!
//! A conserved density whose flux never exceeds it in magnitude transports
//! probability along subluminal trajectories, so its evolution is causal.
//! Given `ρ` and `j` sampled on a `(t, x)` grid this module verifies the two
//! halves of that criterion: the continuity equation `∂_t ρ + ∂_x j = 0` via
//! central-difference residuals, and the pointwise causal-current bound
//! `|j| ≤ ρ` (equivalently, velocity `|j/ρ| ≤ 1`).

use thiserror::Error;

/// Relative slack on the light-speed bound, covering roundoff in `j/ρ`.
pub const SPEED_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContinuityError {
    #[error("need at least a 3×3 grid, got {nt}×{nx}")]
    TooSmall { nt: usize, nx: usize },
    #[error("sample array length {got} does not match grid {nt}×{nx}")]
    ShapeMismatch { got: usize, nt: usize, nx: usize },
    #[error("density must be nonnegative and finite, cell ({ti}, {xi}) is {value}")]
    BadDensity { ti: usize, xi: usize, value: f64 },
    #[error("flux must be finite, cell ({ti}, {xi}) is {value}")]
    BadFlux { ti: usize, xi: usize, value: f64 },
}

/// Density and flux samples on a uniform `(t, x)` grid, row-major in time.
#[derive(Debug, Clone)]
pub struct SampledFlow {
    pub t0: f64,
    pub dt: f64,
    pub x0: f64,
    pub dx: f64,
    pub nt: usize,
    pub nx: usize,
    rho: Vec<f64>,
    j: Vec<f64>,
}

impl SampledFlow {
    pub fn new(
        t0: f64,
        dt: f64,
        x0: f64,
        dx: f64,
        nt: usize,
        nx: usize,
        rho: Vec<f64>,
        j: Vec<f64>,
    ) -> Result<Self, ContinuityError> {
        if nt < 3 || nx < 3 {
            return Err(ContinuityError::TooSmall { nt, nx });
        }
        if rho.len() != nt * nx || j.len() != nt * nx {
            return Err(ContinuityError::ShapeMismatch {
                got: rho.len().max(j.len()),
                nt,
                nx,
            });
        }
        for (i, &r) in rho.iter().enumerate() {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(ContinuityError::BadDensity {
                    ti: i / nx,
                    xi: i % nx,
                    value: r,
                });
            }
        }
        for (i, &f) in j.iter().enumerate() {
            if !f.is_finite() {
                return Err(ContinuityError::BadFlux {
                    ti: i / nx,
                    xi: i % nx,
                    value: f,
                });
            }
        }
        Ok(Self {
            t0,
            dt,
            x0,
            dx,
            nt,
            nx,
            rho,
            j,
        })
    }

    /// Builds a flow by sampling closed-form density and flux functions.
    pub fn from_fields(
        t0: f64,
        dt: f64,
        x0: f64,
        dx: f64,
        nt: usize,
        nx: usize,
        rho: impl Fn(f64, f64) -> f64,
        j: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, ContinuityError> {
        let mut rho_samples = Vec::with_capacity(nt * nx);
        let mut j_samples = Vec::with_capacity(nt * nx);
        for ti in 0..nt {
            let t = t0 + ti as f64 * dt;
            for xi in 0..nx {
                let x = x0 + xi as f64 * dx;
                rho_samples.push(rho(t, x));
                j_samples.push(j(t, x));
            }
        }
        Self::new(t0, dt, x0, dx, nt, nx, rho_samples, j_samples)
    }

    pub fn rho(&self, ti: usize, xi: usize) -> f64 {
        self.rho[ti * self.nx + xi]
    }

    pub fn j(&self, ti: usize, xi: usize) -> f64 {
        self.j[ti * self.nx + xi]
    }
}

/// Pointwise causal-current condition: `|j| ≤ ρ` wherever `ρ > 0` and
/// `j = 0` wherever `ρ = 0`. Returns the verdict and the worst |j|/ρ ratio.
pub fn causal_current_check(flow: &SampledFlow) -> (bool, f64) {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (&r, &j) in flow.rho.iter().zip(&flow.j) {
        if r > 0.0 {
            worst = worst.max(j.abs() / r);
        } else if j != 0.0 {
            ok = false;
            worst = f64::INFINITY;
        }
    }
    (ok && worst <= 1.0 + SPEED_TOLERANCE, worst)
}

/// Maximum interior central-difference residual of `∂_t ρ + ∂_x j`.
pub fn continuity_residual_check(flow: &SampledFlow) -> f64 {
    let mut worst = 0.0f64;
    for ti in 1..flow.nt - 1 {
        for xi in 1..flow.nx - 1 {
            let drho = (flow.rho(ti + 1, xi) - flow.rho(ti - 1, xi)) / (2.0 * flow.dt);
            let dj = (flow.j(ti, xi + 1) - flow.j(ti, xi - 1)) / (2.0 * flow.dx);
            worst = worst.max((drho + dj).abs());
        }
    }
    worst
}

/// Velocity-field bound: `v = j/ρ` where mass sits (zero elsewhere), report
/// the maximum speed and whether it respects the light cone.
pub fn velocity_bound_check(flow: &SampledFlow) -> (bool, f64) {
    let mut max_speed = 0.0f64;
    for (&r, &j) in flow.rho.iter().zip(&flow.j) {
        let v = if r > 0.0 { (j / r).abs() } else { 0.0 };
        max_speed = max_speed.max(v);
    }
    (max_speed <= 1.0 + SPEED_TOLERANCE, max_speed)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Smooth bump translating at speed `v`: exact solution of the
    /// continuity equation with `j = vρ`.
    fn translating_bump(v: f64, nt: usize, nx: usize) -> SampledFlow {
        SampledFlow::from_fields(
            0.0,
            0.01,
            -8.0,
            16.0 / nx as f64,
            nt,
            nx,
            move |t, x| (-(x - v * t) * (x - v * t)).exp(),
            move |t, x| v * (-(x - v * t) * (x - v * t)).exp(),
        )
        .unwrap()
    }

    #[test]
    fn static_density_is_causal_with_zero_ratio() {
        let flow = SampledFlow::from_fields(
            0.0,
            0.1,
            -4.0,
            0.05,
            5,
            160,
            |_, x| (-x * x).exp(),
            |_, _| 0.0,
        )
        .unwrap();
        let (ok, ratio) = causal_current_check(&flow);
        assert!(ok);
        assert_eq!(ratio, 0.0);
        let (ok, speed) = velocity_bound_check(&flow);
        assert!(ok);
        assert_eq!(speed, 0.0);
    }

    #[test]
    fn null_flow_saturates_the_bound() {
        let flow = translating_bump(1.0, 5, 400);
        let (ok, ratio) = causal_current_check(&flow);
        assert!(ok);
        assert!((ratio - 1.0).abs() < 1e-12);
        let (ok, speed) = velocity_bound_check(&flow);
        assert!(ok);
        assert!((speed - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spacelike_current_is_flagged() {
        let flow = SampledFlow::from_fields(
            0.0,
            0.1,
            -4.0,
            0.05,
            5,
            160,
            |_, x| (-x * x).exp(),
            |_, x| 1.5 * (-x * x).exp(),
        )
        .unwrap();
        let (ok, ratio) = causal_current_check(&flow);
        assert!(!ok);
        assert!((ratio - 1.5).abs() < 1e-12);
        let (ok, speed) = velocity_bound_check(&flow);
        assert!(!ok);
        assert!((speed - 1.5).abs() < 1e-12);
    }

    #[test]
    fn vacuum_cells_with_flux_are_non_causal_data() {
        let mut rho = vec![0.0; 9];
        let mut j = vec![0.0; 9];
        rho[4] = 1.0;
        j[0] = 0.5; // flux out of nothing
        let flow = SampledFlow::new(0.0, 0.1, 0.0, 0.1, 3, 3, rho, j).unwrap();
        let (ok, ratio) = causal_current_check(&flow);
        assert!(!ok);
        assert!(ratio.is_infinite());
    }

    #[test]
    fn translating_bump_residual_is_discretisation_error() {
        let res = continuity_residual_check(&translating_bump(0.8, 7, 800));
        assert!(res < 1e-3, "residual {res}");
        // Refining both steps by 2 cuts the residual by about 4.
        let fine = SampledFlow::from_fields(
            0.0,
            0.005,
            -8.0,
            16.0 / 1600.0,
            13,
            1600,
            |t, x| (-(x - 0.8 * t) * (x - 0.8 * t)).exp(),
            |t, x| 0.8 * (-(x - 0.8 * t) * (x - 0.8 * t)).exp(),
        )
        .unwrap();
        let res_fine = continuity_residual_check(&fine);
        let ratio = res / res_fine;
        assert!(ratio > 3.0 && ratio < 5.0, "convergence ratio {ratio}");
    }

    #[test]
    fn non_conserved_input_has_large_residual() {
        // Density decaying in place with no flux violates conservation.
        let flow = SampledFlow::from_fields(
            0.0,
            0.05,
            -4.0,
            0.02,
            5,
            400,
            |t, x| (-x * x).exp() * (-t).exp(),
            |_, _| 0.0,
        )
        .unwrap();
        let res = continuity_residual_check(&flow);
        assert!(res > 0.1, "residual {res}");
    }

    /// Dirac density/current snapshots feed straight into the classical
    /// checks: causal current, small residual.
    #[test]
    fn dirac_flow_passes_classical_checks() {
        let grid = crate::packets::GridSpec::new(-32.0, 64.0 / 4096.0, 4096).unwrap();
        let field = crate::dirac::SpinorField::from_profiles(
            grid,
            1.0,
            |x| num_complex::Complex64::new((-x * x / 2.0).exp(), 0.0),
            |x| num_complex::Complex64::from_polar(0.5 * (-x * x / 4.0).exp(), 1.3 * x),
        )
        .unwrap();
        let nt = 5;
        let dt = 1e-3;
        let mut rho = Vec::new();
        let mut j = Vec::new();
        for ti in 0..nt {
            let current = field.evolve(0.2 + ti as f64 * dt).unwrap().current();
            rho.extend(current.rho);
            j.extend(current.j);
        }
        let flow = SampledFlow::new(0.2, dt, grid.x0, grid.dx, nt, grid.n, rho, j).unwrap();
        let (ok, ratio) = causal_current_check(&flow);
        assert!(ok, "worst ratio {ratio}");
        let res = continuity_residual_check(&flow);
        assert!(res < 1e-4, "dirac continuity residual {res}");
    }
}
