//! Gauss-Legendre quadrature.
//!
//! Nodes and weights are generated on demand by Newton iteration on the
//! Legendre polynomial (Chebyshev initial guesses), which keeps the module
//! order-agnostic. Used as the independent numerical route against the
//! crate's closed forms.

use crate::{real, Real};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<F: Real>(n: usize) -> Vec<(F, F)> {
    assert!(n >= 1, "quadrature order must be positive");
    let mut rule = Vec::with_capacity(n);
    let nf = real::<F>(n as f64);
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n
        let mut x = (F::PI() * (real::<F>(i as f64) + real(0.75)) / (nf + real(0.5))).cos();
        let mut dp = F::zero();
        for _ in 0..64 {
            let (p, d) = legendre(n, x);
            dp = d;
            let step = p / d;
            x = x - step;
            if step.abs() <= F::epsilon() * (F::one() + x.abs()) {
                break;
            }
        }
        let w = real::<F>(2.0) / ((F::one() - x * x) * dp * dp);
        rule.push((x, w));
    }
    // ascending nodes, deterministic order
    rule.reverse();
    rule
}

/// Legendre polynomial `P_n` and its derivative at `x` by the three-term
/// recurrence.
fn legendre<F: Real>(n: usize, x: F) -> (F, F) {
    let mut p0 = F::one();
    let mut p1 = x;
    if n == 0 {
        return (p0, F::zero());
    }
    for k in 2..=n {
        let kf = real::<F>(k as f64);
        let p2 = ((real::<F>(2.0) * kf - F::one()) * x * p1 - (kf - F::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = real::<F>(n as f64) * (x * p1 - p0) / (x * x - F::one());
    (p1, d)
}

/// Integral of `f` over `[a, b]` with the `n`-point rule.
pub fn integrate<F: Real, Fun: Fn(F) -> F>(f: Fun, a: F, b: F, n: usize) -> F {
    let half = real::<F>(0.5);
    let mid = (a + b) * half;
    let rad = (b - a) * half;
    let mut acc = F::zero();
    for &(x, w) in &gauss_legendre::<F>(n) {
        acc = acc + w * f(mid + rad * x);
    }
    acc * rad
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_on_polynomials() {
        // n-point rule integrates degree 2n-1 exactly
        let got = integrate(|x: f64| x.powi(8) + x * x, -1.0, 1.0, 5);
        let want = 2.0 / 9.0 + 2.0 / 3.0;
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 3, 8, 21, 64] {
            let s: f64 = gauss_legendre::<f64>(n).iter().map(|&(_, w)| w).sum();
            assert!((s - 2.0).abs() < 1e-13, "order {n}: {s}");
        }
    }

    #[test]
    fn nodes_symmetric_and_sorted() {
        let rule = gauss_legendre::<f64>(12);
        for pair in rule.windows(2) {
            assert!(pair[0].0 < pair[1].0);
        }
        for i in 0..rule.len() {
            let (x, w) = rule[i];
            let (xr, wr) = rule[rule.len() - 1 - i];
            assert!((x + xr).abs() < 1e-15);
            assert!((w - wr).abs() < 1e-15);
        }
    }

    #[test]
    fn smooth_integral_converges() {
        let got = integrate(|x: f64| (2.0 * x).sin().exp(), 0.0, 1.0, 24);
        let refined = integrate(|x: f64| (2.0 * x).sin().exp(), 0.0, 1.0, 48);
        assert!((got - refined).abs() < 1e-14);
    }
}
