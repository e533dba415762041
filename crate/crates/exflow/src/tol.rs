//! Shared tolerance configuration.

use crate::{real, Error, Real, Result};

/// Root-find, interval-merge, and optimizer-convergence tolerances shared
/// across the crate.
///
/// * `root_tol` bounds the residual accepted by scalar root solves (the
///   budget-to-endpoint map, mass-to-width inversions).
/// * `merge_tol` is the endpoint tolerance of [`crate::interval::IntervalUnion::normalize`]:
///   gaps at most `merge_tol` are glued and pieces of length at most
///   `merge_tol` are dropped. Boundary-point matching uses the same scale.
/// * `conv_tol` is the exchange-gain threshold below which the local search
///   treats a configuration as stationary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig<F> {
    pub root_tol: F,
    pub merge_tol: F,
    pub conv_tol: F,
}

impl<F: Real> Default for ToleranceConfig<F> {
    fn default() -> Self {
        ToleranceConfig {
            root_tol: real(1e-14),
            merge_tol: real(1e-12),
            conv_tol: real(1e-10),
        }
    }
}

impl<F: Real> ToleranceConfig<F> {
    /// Builds a configuration, enforcing positivity and the ordering
    /// `root_tol <= merge_tol <= 1e-6`.
    pub fn new(root_tol: F, merge_tol: F, conv_tol: F) -> Result<Self> {
        let cfg = ToleranceConfig {
            root_tol,
            merge_tol,
            conv_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.root_tol > F::zero() && self.merge_tol > F::zero() && self.conv_tol > F::zero()) {
            return Err(Error::invalid("tolerances must be strictly positive"));
        }
        if self.root_tol > self.merge_tol || self.merge_tol > real(1e-6) {
            return Err(Error::invalid(
                "tolerance ordering root_tol <= merge_tol <= 1e-6 violated",
            ));
        }
        Ok(())
    }
}
