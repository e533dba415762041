//! Safeguarded scalar root finding on a bracket.

use crate::{real, Error, Real, Result};

/// Finds the root of a continuous, strictly monotone `f` inside `[lo, hi]`.
///
/// Newton steps (using `df`) run inside a maintained sign-change bracket;
/// any step that leaves the bracket or fails to shrink the residual falls
/// back to bisection. Iteration continues to float resolution, so the final
/// residual is limited by roundoff in `f`, not by `f_tol`; `f_tol` is only
/// the acceptance bound checked at the end.
pub fn newton_bisect<F, Fun, Der>(f: Fun, df: Der, lo: F, hi: F, f_tol: F) -> Result<F>
where
    F: Real,
    Fun: Fn(F) -> F,
    Der: Fn(F) -> F,
{
    debug_assert!(lo < hi);
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let fb = f(b);
    if fa == F::zero() {
        return Ok(a);
    }
    if fb == F::zero() {
        return Ok(b);
    }
    if (fa > F::zero()) == (fb > F::zero()) {
        return Err(Error::invalid("root bracket does not change sign"));
    }

    let mut x = (a + b) * real(0.5);
    let mut fx = f(x);
    let eps = F::epsilon();
    for _ in 0..200 {
        if fx == F::zero() {
            return Ok(x);
        }
        // shrink the bracket around the sign change
        if (fx > F::zero()) == (fa > F::zero()) {
            a = x;
            fa = fx;
        } else {
            b = x;
        }
        let width = b - a;
        if width <= eps * (F::one() + a.abs().max(b.abs())) {
            break;
        }
        let d = df(x);
        let newton = if d != F::zero() { x - fx / d } else { x };
        x = if newton > a && newton < b {
            newton
        } else {
            (a + b) * real(0.5)
        };
        fx = f(x);
    }
    if fx.abs() <= f_tol {
        Ok(x)
    } else {
        Err(Error::NonConvergence(format!(
            "root residual {fx:?} above tolerance {f_tol:?}"
        )))
    }
}
