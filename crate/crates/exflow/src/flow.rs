//! Steady exchange flow of two fluids in a vertical duct with cross-section
//! `(-1, 1)`: the heavy fluid occupies the region `A`, the velocity solves
//! `u'' = lambda + 1` on `A` and `u'' = lambda - 1` outside with zero ends,
//! and `lambda` is pinned by the flux-balance condition `(u, 1) = 0`.
//!
//! The velocity is the superposition `u = (1 - lambda) psi - 2 G chi_A` of
//! closed forms, so no differential equation is ever solved numerically;
//! the residual checks in the tests are the independent verification.
//!
//! Flux orientation: `Q = (chi_(D\A), u)` counts the volume rate of the
//! light fluid, and is nonnegative at the optimizing regions.

use crate::forms::{j_energy, potential, PotentialProfile};
use crate::interval::IntervalUnion;
use crate::kernel::{torsion, xi_for_budget};
use crate::optimize::alpha_value;
use crate::tol::ToleranceConfig;
use crate::{real, Error, Real, Result};

/// Dimensional parameters of the two-fluid configuration. Only their
/// combination `lambda` enters the dimensionless problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<F> {
    pub rho_heavy: F,
    pub rho_light: F,
    pub gravity: F,
    /// The constant `-dp/dz` driving the flow.
    pub pressure_gradient: F,
}

impl<F: Real> PhysicalParams<F> {
    fn validate(&self) -> Result<()> {
        if !(self.rho_heavy > self.rho_light && self.rho_light > F::zero()) {
            return Err(Error::domain(
                "densities must satisfy rho_heavy > rho_light > 0",
            ));
        }
        if !(self.gravity > F::zero()) {
            return Err(Error::domain("gravity must be positive"));
        }
        let lo = self.rho_light * self.gravity;
        let hi = self.rho_heavy * self.gravity;
        if !(self.pressure_gradient > lo && self.pressure_gradient < hi) {
            return Err(Error::domain(
                "pressure gradient must lie strictly between rho_light*g and rho_heavy*g",
            ));
        }
        Ok(())
    }
}

/// Exchange-flow answer for a region: the pressure proxy, the flux, and the
/// velocity profile.
#[derive(Debug, Clone)]
pub struct FlowSolution<F> {
    pub region: IntervalUnion<F>,
    /// Dimensionless pressure proxy in `[-1, 1]`; the open endpoints
    /// correspond to the degenerate single-fluid regions.
    pub lambda: F,
    /// Flux `(chi_(D\A), u)` of the light fluid.
    pub flux: F,
    potential: PotentialProfile<F>,
}

impl<F: Real> FlowSolution<F> {
    /// Velocity `u(x) = (1 - lambda) psi(x) - 2 (G chi_A)(x)`.
    pub fn velocity(&self, x: F) -> Result<F> {
        let psi = torsion(x)?;
        Ok((F::one() - self.lambda) * psi - real::<F>(2.0) * self.potential.eval(x))
    }
}

/// Pressure proxy from physical parameters:
/// `lambda = ((rho' + rho) g - 2 P) / ((rho - rho') g)`.
pub fn lambda_from_physical<F: Real>(p: &PhysicalParams<F>) -> Result<F> {
    p.validate()?;
    let num = (p.rho_light + p.rho_heavy) * p.gravity - real::<F>(2.0) * p.pressure_gradient;
    let den = (p.rho_heavy - p.rho_light) * p.gravity;
    Ok(num / den)
}

/// Pressure proxy pinned by flux balance for a given region:
/// `lambda = 1 - 3 (psi, chi_A)`, equivalently `(psi, chi_A) = (1-lambda)/3`.
pub fn lambda_from_region<F: Real>(a: &IntervalUnion<F>) -> F {
    F::one() - real::<F>(3.0) * a.psi_mass()
}

/// Solves the flow for a region by superposition of closed forms; the
/// flux-balance condition holds by construction.
pub fn solve_flow<F: Real>(a: &IntervalUnion<F>) -> FlowSolution<F> {
    let lambda = lambda_from_region(a);
    FlowSolution {
        lambda,
        flux: flux(a),
        potential: potential(a),
        region: a.clone(),
    }
}

/// Flux `Q = 2 J(chi_A) - (1/3)(1 - lambda)^2` with `lambda` pinned by flux
/// balance.
pub fn flux<F: Real>(a: &IntervalUnion<F>) -> F {
    let lambda = lambda_from_region(a);
    let one_minus = F::one() - lambda;
    real::<F>(2.0) * j_energy(a) - one_minus * one_minus / real(3.0)
}

/// Optimal flux at fixed `lambda in (-1, 1)`:
/// `gamma_lambda = 2 alpha_((1-lambda)/3) - (1/3)(1-lambda)^2`, attained by
/// the right tail `(xi, 1)` of mass `(1-lambda)/3` and by its reflection.
pub fn gamma_lambda<F: Real>(lambda: F) -> Result<F> {
    if !(lambda > -F::one() && lambda < F::one()) {
        return Err(Error::domain(format!("lambda = {lambda} outside (-1, 1)")));
    }
    let one_minus = F::one() - lambda;
    let t = one_minus / real(3.0);
    Ok(real::<F>(2.0) * alpha_value(t)? - one_minus * one_minus / real(3.0))
}

/// One row of the optimal-flux sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow<F> {
    pub lambda: F,
    /// Left endpoint of the optimizing region `(xi, 1)`.
    pub xi: F,
    pub gamma_lambda: F,
    pub region: [F; 2],
}

/// Samples `gamma_lambda` on `n >= 3` evenly spaced values of `lambda` in
/// `[-1, 1]`; the endpoint rows carry the continuity limits (`gamma = 0`,
/// degenerate regions).
pub fn gamma_sweep<F: Real>(n: usize) -> Result<Vec<SweepRow<F>>> {
    if n < 3 {
        return Err(Error::domain("sweep needs at least 3 samples"));
    }
    let tol = ToleranceConfig::default();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = -F::one() + real::<F>(2.0) * real::<F>(i as f64) / real((n - 1) as f64);
        let row = if lambda <= -F::one() {
            SweepRow {
                lambda: -F::one(),
                xi: -F::one(),
                gamma_lambda: F::zero(),
                region: [-F::one(), F::one()],
            }
        } else if lambda >= F::one() {
            SweepRow {
                lambda: F::one(),
                xi: F::one(),
                gamma_lambda: F::zero(),
                region: [F::one(), F::one()],
            }
        } else {
            let t = (F::one() - lambda) / real(3.0);
            let xi = xi_for_budget(t, &tol)?;
            SweepRow {
                lambda,
                xi,
                gamma_lambda: gamma_lambda(lambda)?,
                region: [xi, F::one()],
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// The globally optimal exchange flow.
#[derive(Debug, Clone)]
pub struct GammaOptimum<F> {
    /// Optimal flux `1/12`.
    pub value: F,
    /// Optimizing pressure proxy, `0`.
    pub lambda_star: F,
    /// Right-handed optimizing region `(0, 1)`.
    pub region: IntervalUnion<F>,
    /// The degenerate co-optimum `(-1, 0)`, J-equivalent by reflection.
    pub reflected_region: IntervalUnion<F>,
}

/// Optimum of the flux over regions and `lambda`: value `1/12` at
/// `lambda = 0` with region `(0, 1)` (or its reflection).
pub fn gamma<F: Real>() -> GammaOptimum<F> {
    let region = IntervalUnion::from_exact(vec![[F::zero(), F::one()]]);
    GammaOptimum {
        value: gamma_lambda(F::zero()).expect("lambda = 0 in range"),
        lambda_star: F::zero(),
        reflected_region: region.reflect(),
        region,
    }
}
