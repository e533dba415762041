//! Shape optimization of the Green-form energy `J(f) = (f, Gf)` on the
//! interval `(-1, 1)` under the torsion-mass budget `(f, psi) <= t`, together
//! with its application to maximum-flux exchange flow in a vertical duct and
//! a polar-grid explorer for the analogous (open) problem on the unit disc.
//!
//! Everything on the interval is evaluated through closed forms: the Green
//! kernel of `-d^2/dx^2` with Dirichlet ends, the torsion function
//! `psi(x) = (1 - x^2)/2`, the right-tail mass `phi`, piecewise-polynomial
//! potentials, and pairwise energy sums over interval unions. Numerical
//! quadrature appears only as an independent cross-check.
//!
//! The numeric core is generic over the scalar type via [`Real`] (any
//! `num-traits` float works; `f32` and `f64` out of the box). Concrete `f64`
//! aliases for the main domain types live at the crate root; the CLI and the
//! acceptance suite run in `f64`.

// Negated comparisons on floats are deliberate here: they reject NaN along
// with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod disc;
pub mod error;
pub mod flow;
pub mod forms;
pub mod interval;
pub mod kernel;
pub mod optimize;
pub mod quad;
pub mod tol;

mod solve;

pub use error::{Error, Result};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar bound for the numeric core: an IEEE-style float with constants.
pub trait Real:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + 'static
{
}

/// Shorthand used throughout the crate to lift `f64` literals into `F`.
#[inline]
pub(crate) fn real<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("literal representable in scalar type")
}

/// Default scalar for the CLI and the acceptance suite.
pub type Scalar = f64;

/// `f64` interval union.
pub type IntervalUnion64 = interval::IntervalUnion<f64>;
/// `f64` tolerance bundle.
pub type ToleranceConfig64 = tol::ToleranceConfig<f64>;
/// `f64` potential profile.
pub type PotentialProfile64 = forms::PotentialProfile<f64>;
/// `f64` optimizer output.
pub type OptimizeResult64 = optimize::OptimizeResult<f64>;
/// `f64` exchange-flow solution.
pub type FlowSolution64 = flow::FlowSolution<f64>;
/// `f64` relaxed density on the disc grid.
pub type GridDensity64 = disc::GridDensity<f64>;
