//! Closed forms on the interval `D = (-1, 1)`: the Dirichlet Green kernel,
//! the torsion function `psi`, the right-tail torsion mass `phi`, and the
//! inverse map from a mass budget to its tail endpoint.
//!
//! All four are exact polynomial expressions; the only iteration in this
//! module is the scalar root solve behind [`xi_for_budget`].

use crate::solve::newton_bisect;
use crate::tol::ToleranceConfig;
use crate::{real, Error, Real, Result};

/// Total torsion mass of the interval, `(1, psi) = 2/3`.
pub fn total_mass<F: Real>() -> F {
    real::<F>(2.0) / real(3.0)
}

fn check_coordinate<F: Real>(name: &str, x: F) -> Result<()> {
    if !(x >= -F::one() && x <= F::one()) {
        return Err(Error::domain(format!(
            "{name} = {x} outside the closed interval [-1, 1]"
        )));
    }
    Ok(())
}

/// Green kernel of `-d^2/dx^2` with Dirichlet ends:
/// `(1/2)(1 - y)(1 + x)` for `x <= y` and symmetrically otherwise.
///
/// Inputs exactly at `-1` or `1` are accepted and give `0`.
pub fn green<F: Real>(x: F, y: F) -> Result<F> {
    check_coordinate("x", x)?;
    check_coordinate("y", y)?;
    let half = real::<F>(0.5);
    Ok(if x <= y {
        half * (F::one() - y) * (F::one() + x)
    } else {
        half * (F::one() + y) * (F::one() - x)
    })
}

/// Torsion function `psi(x) = (1 - x^2)/2`, the potential of the uniform
/// source; equals `green(x, x)`.
pub fn torsion<F: Real>(x: F) -> Result<F> {
    check_coordinate("x", x)?;
    Ok((F::one() - x * x) * real(0.5))
}

/// Right-tail torsion mass `phi(x) = (psi, chi_(x,1)) = (2 - 3x + x^3)/6`.
///
/// Strictly decreasing, `phi(-1) = 2/3`, `phi(1) = 0`, `phi' = -psi`.
pub fn phi<F: Real>(x: F) -> Result<F> {
    check_coordinate("x", x)?;
    Ok(phi_unchecked(x))
}

#[inline]
pub(crate) fn phi_unchecked<F: Real>(x: F) -> F {
    (real::<F>(2.0) - real::<F>(3.0) * x + x * x * x) / real(6.0)
}

/// Inverse of [`phi`]: the unique `xi in (-1, 1)` with `phi(xi) = t`, for a
/// budget `t in (0, 2/3)`. Bisection-guarded Newton on the monotone cubic,
/// using `phi' = -psi`.
pub fn xi_for_budget<F: Real>(t: F, tol: &ToleranceConfig<F>) -> Result<F> {
    tol.validate()?;
    if !(t > F::zero() && t < total_mass()) {
        return Err(Error::domain(format!("budget t = {t} outside (0, 2/3)")));
    }
    let f = |x: F| phi_unchecked(x) - t;
    let df = |x: F| -(F::one() - x * x) * real::<F>(0.5);
    newton_bisect(f, df, -F::one(), F::one(), tol.root_tol)
}
