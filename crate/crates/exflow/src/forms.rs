//! Potentials, energies, and perturbation quantities for interval unions.
//!
//! The potential `u = G chi_A` of a union is piecewise polynomial: quadratic
//! with `u'' = -1` inside source pieces, affine outside, `C^1` across
//! breakpoints, zero at the ends. [`PotentialProfile`] stores the segment
//! coefficients exactly; from it come the ratio `h = u / psi` (extended to
//! the ends by its derivative limits) and cross energies by polynomial
//! integration.
//!
//! The energy `J(chi_A) = (chi_A, G chi_A)` uses the separable structure of
//! the kernel on `x <= y`: each ordered piece pair contributes
//! `(1/2) int_(piece_i) (1+x) dx * int_(piece_j) (1-y) dy` twice, and the
//! self term integrates the triangular split analytically. Cost is `O(k^2)`
//! in the piece count with machine-precision results; [`j_energy_quadrature`]
//! is the independent numerical route.

use crate::interval::IntervalUnion;
use crate::kernel::{phi_unchecked, torsion};
use crate::quad::{gauss_legendre, integrate};
use crate::solve::newton_bisect;
use crate::tol::ToleranceConfig;
use crate::{real, Error, Real, Result};

/// `int_(a,b) (1 + x) dx`
#[inline]
fn w_plus<F: Real>(a: F, b: F) -> F {
    (b - a) + (b * b - a * a) * real(0.5)
}

/// `int_(a,b) (1 - x) dx`
#[inline]
fn w_minus<F: Real>(a: F, b: F) -> F {
    (b - a) - (b * b - a * a) * real(0.5)
}

/// Self energy `int_(a,b) int_(a,b) G(x,y) dy dx` in closed form.
#[inline]
fn j_self<F: Real>(a: F, b: F) -> F {
    let half = real::<F>(0.5);
    let c = b - b * b * half;
    c * (b - a) + (c - F::one()) * (b * b - a * a) * half - (b * b * b - a * a * a) / real(6.0)
        + (b * b * b * b - a * a * a * a) / real(8.0)
}

/// Piecewise-polynomial representation of the potential `u = G chi_A`.
#[derive(Debug, Clone)]
pub struct PotentialProfile<F> {
    source: IntervalUnion<F>,
    breakpoints: Vec<F>,
    /// Per segment: `u(x) = c[0] + c[1] x + c[2] x^2`.
    coeffs: Vec<[F; 3]>,
    measure: F,
    moment: F,
}

impl<F: Real> PotentialProfile<F> {
    /// The union this potential was built from.
    pub fn source(&self) -> &IntervalUnion<F> {
        &self.source
    }

    fn segment_index(&self, x: F) -> usize {
        let k = self.breakpoints.partition_point(|&e| e <= x);
        k.saturating_sub(1).min(self.coeffs.len() - 1)
    }

    /// Potential value; `x` must lie in `[-1, 1]`.
    pub fn eval(&self, x: F) -> F {
        debug_assert!(x >= -F::one() && x <= F::one());
        let [c0, c1, c2] = self.coeffs[self.segment_index(x)];
        c0 + (c1 + c2 * x) * x
    }

    /// Derivative `u'(x)`; continuous across breakpoints.
    pub fn derivative(&self, x: F) -> F {
        debug_assert!(x >= -F::one() && x <= F::one());
        let [_, c1, c2] = self.coeffs[self.segment_index(x)];
        c1 + real::<F>(2.0) * c2 * x
    }

    /// `int_(lo, hi) u dx` by exact segment antiderivatives.
    pub fn integral(&self, lo: F, hi: F) -> F {
        debug_assert!(lo <= hi);
        let anti = |c: [F; 3], x: F| ((c[2] * x / real(3.0) + c[1] * real(0.5)) * x + c[0]) * x;
        let mut acc = F::zero();
        for i in 0..self.coeffs.len() {
            let s_lo = self.breakpoints[i].max(lo);
            let s_hi = self.breakpoints[i + 1].min(hi);
            if s_hi > s_lo {
                acc = acc + anti(self.coeffs[i], s_hi) - anti(self.coeffs[i], s_lo);
            }
        }
        acc
    }

    /// One-sided derivative limits at the ends, from the closed identities
    /// `u'(-1) + u'(1) = -moment` and `u'(-1) - u'(1) = measure`.
    pub fn end_derivatives(&self) -> (F, F) {
        let half = real::<F>(0.5);
        (
            (self.measure - self.moment) * half,
            -(self.measure + self.moment) * half,
        )
    }

    /// The ratio `h = u / psi`, extended continuously to the ends by
    /// `h(-1) = u'(-1)` and `h(1) = -u'(1)`.
    pub fn h(&self, x: F) -> Result<F> {
        if !(x >= -F::one() && x <= F::one()) {
            return Err(Error::domain(format!("h at {x} outside [-1, 1]")));
        }
        let (d_lo, d_hi) = self.end_derivatives();
        if x == -F::one() {
            Ok(d_lo)
        } else if x == F::one() {
            Ok(-d_hi)
        } else {
            Ok(self.eval(x) / torsion(x).expect("interior point"))
        }
    }
}

/// Builds the exact potential profile of `u = G chi_A`.
pub fn potential<F: Real>(a: &IntervalUnion<F>) -> PotentialProfile<F> {
    let half = real::<F>(0.5);
    let mut breakpoints = Vec::with_capacity(a.piece_count() * 2 + 2);
    breakpoints.push(-F::one());
    breakpoints.extend(a.boundary_points());
    breakpoints.push(F::one());
    breakpoints.sort_by(|x, y| x.partial_cmp(y).expect("finite endpoints"));
    breakpoints.dedup();

    let mut coeffs = Vec::with_capacity(breakpoints.len() - 1);
    for seg in breakpoints.windows(2) {
        let mid = (seg[0] + seg[1]) * half;
        let mut c = [F::zero(); 3];
        for &[lo, hi] in a.pieces() {
            if hi <= seg[0] {
                // source piece entirely to the left: (1 - x) branch
                let w = w_plus(lo, hi) * half;
                c[0] = c[0] + w;
                c[1] = c[1] - w;
            } else if lo >= seg[1] {
                // entirely to the right: (1 + x) branch
                let w = w_minus(lo, hi) * half;
                c[0] = c[0] + w;
                c[1] = c[1] + w;
            } else {
                debug_assert!(lo <= mid && mid <= hi);
                // segment inside the source piece: quadratic branch
                c[0] = c[0] + (hi - hi * hi * half - lo - lo * lo * half) * half;
                c[1] = c[1] + (lo + lo * lo * half + hi - hi * hi * half) * half;
                c[2] = c[2] - half;
            }
        }
        coeffs.push(c);
    }
    PotentialProfile {
        source: a.clone(),
        breakpoints,
        coeffs,
        measure: a.measure(),
        moment: a.moment(),
    }
}

/// Energy `J(chi_A) = (chi_A, G chi_A)` by the exact pairwise closed form.
pub fn j_energy<F: Real>(a: &IntervalUnion<F>) -> F {
    let pieces = a.pieces();
    let mut acc = F::zero();
    for (i, &[a1, b1]) in pieces.iter().enumerate() {
        acc = acc + j_self(a1, b1);
        for &[a2, b2] in &pieces[i + 1..] {
            // both ordered cross terms of the pair (i, j)
            acc = acc + w_plus(a1, b1) * w_minus(a2, b2);
        }
    }
    acc
}

/// Interaction energy `(chi_A, G chi_B)` by integrating the potential of `B`
/// over `A` (a route independent of [`j_energy`]'s pairwise formula).
pub fn interaction_energy<F: Real>(a: &IntervalUnion<F>, b: &IntervalUnion<F>) -> F {
    let profile = potential(b);
    a.pieces()
        .iter()
        .fold(F::zero(), |acc, &[lo, hi]| acc + profile.integral(lo, hi))
}

/// Numerical double integral of the kernel over `A x A` with an `n`-point
/// Gauss-Legendre rule per direction; the oracle for [`j_energy`].
///
/// Self squares are split along the diagonal kink before quadrature.
pub fn j_energy_quadrature<F: Real>(a: &IntervalUnion<F>, nodes: usize) -> Result<F> {
    if nodes < 4 {
        return Err(Error::domain("quadrature order must be at least 4"));
    }
    let rule = gauss_legendre::<F>(nodes);
    let half = real::<F>(0.5);
    let pieces = a.pieces();
    let green = |x: F, y: F| crate::kernel::green(x, y).expect("quadrature stays in range");
    let mut acc = F::zero();
    for (i, &[a1, b1]) in pieces.iter().enumerate() {
        // triangular split of the self square
        let mid1 = (a1 + b1) * half;
        let rad1 = (b1 - a1) * half;
        for &(xn, xw) in &rule {
            let x = mid1 + rad1 * xn;
            let inner =
                integrate(|y| green(x, y), a1, x, nodes) + integrate(|y| green(x, y), x, b1, nodes);
            acc = acc + xw * rad1 * inner;
        }
        for &[a2, b2] in &pieces[i + 1..] {
            let mid2 = (a2 + b2) * half;
            let rad2 = (b2 - a2) * half;
            let mut cross = F::zero();
            for &(xn, xw) in &rule {
                let x = mid1 + rad1 * xn;
                for &(yn, yw) in &rule {
                    let y = mid2 + rad2 * yn;
                    cross = cross + xw * yw * green(x, y);
                }
            }
            acc = acc + real::<F>(2.0) * rad1 * rad2 * cross;
        }
    }
    Ok(acc)
}

/// One-sided derivatives of the potential at the ends,
/// `(u'(-1), u'(+1)) = ((|A| - m)/2, -(|A| + m)/2)` with `m` the moment.
pub fn boundary_derivatives<F: Real>(a: &IntervalUnion<F>) -> (F, F) {
    let half = real::<F>(0.5);
    let measure = a.measure();
    let moment = a.moment();
    ((measure - moment) * half, -(measure + moment) * half)
}

/// `h = u/psi` extended to `[-1, 1]`; see [`PotentialProfile::h`].
pub fn h_ratio<F: Real>(a: &IntervalUnion<F>, x: F) -> Result<F> {
    potential(a).h(x)
}

/// Single-interval energy `J(chi_((xi, 1)))` as an explicit quartic:
/// `-xi^4/8 + xi^3/6 + xi^2/4 - xi/2 + 5/24`.
pub fn right_tail_energy<F: Real>(xi: F) -> F {
    let x2 = xi * xi;
    -x2 * x2 / real(8.0) + x2 * xi / real(6.0) + x2 / real(4.0) - xi * real(0.5)
        + real::<F>(5.0) / real(24.0)
}

/// Which side of a snapped boundary point belongs to the source set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum EndpointKind {
    /// Left endpoint of a piece: the set lies to the right.
    PieceStart(usize),
    /// Right endpoint of a piece: the set lies to the left.
    PieceEnd(usize),
}

/// Matches `x` against a piece endpoint of `a` within `merge_tol`.
pub(crate) fn snap_endpoint<F: Real>(
    a: &IntervalUnion<F>,
    x: F,
    tol: &ToleranceConfig<F>,
) -> Result<(F, EndpointKind)> {
    let mut best: Option<(F, F, EndpointKind)> = None;
    for (i, &[lo, hi]) in a.pieces().iter().enumerate() {
        for (coord, kind) in [
            (lo, EndpointKind::PieceStart(i)),
            (hi, EndpointKind::PieceEnd(i)),
        ] {
            let d = (x - coord).abs();
            if d <= tol.merge_tol && best.as_ref().is_none_or(|&(bd, _, _)| d < bd) {
                best = Some((d, coord, kind));
            }
        }
    }
    best.map(|(_, coord, kind)| (coord, kind))
        .ok_or_else(|| Error::invalid(format!("{x} is not a boundary point of the union")))
}

/// Mass `(psi, chi)` of the one-sided neighborhood of width `w` at `x0`,
/// growing rightward (`dir = +1`) or leftward (`dir = -1`).
fn one_sided_mass<F: Real>(x0: F, dir: i8, w: F) -> F {
    if dir > 0 {
        phi_unchecked(x0) - phi_unchecked(x0 + w)
    } else {
        phi_unchecked(x0 - w) - phi_unchecked(x0)
    }
}

/// Inverts [`one_sided_mass`] for the width carrying mass `eps`, searching
/// widths in `(0, limit]`.
fn width_for_mass<F: Real>(
    x0: F,
    dir: i8,
    eps: F,
    limit: F,
    tol: &ToleranceConfig<F>,
) -> Result<F> {
    debug_assert!(limit > F::zero());
    let available = one_sided_mass(x0, dir, limit);
    if eps > available {
        if eps - available <= tol.root_tol {
            return Ok(limit);
        }
        return Err(Error::infeasible(format!(
            "mass {eps} exceeds the {available} available locally"
        )));
    }
    let f = |w: F| one_sided_mass(x0, dir, w) - eps;
    let df = |w: F| {
        let x = if dir > 0 { x0 + w } else { x0 - w };
        (F::one() - x * x) * real::<F>(0.5)
    };
    newton_bisect(f, df, F::zero(), limit, tol.root_tol)
}

/// Admissible exchange at a boundary point pair: where mass leaves the set
/// (`removal`) and where it enters the complement (`insertion`), with the
/// one-sided masses available on each side.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExchangeSites<F> {
    pub a: F,
    pub b: F,
    pub removal_dir: i8,
    pub removal_limit: F,
    pub removal_mass: F,
    pub insertion_dir: i8,
    pub insertion_limit: F,
    pub insertion_mass: F,
}

pub(crate) fn exchange_sites<F: Real>(
    set: &IntervalUnion<F>,
    a: F,
    b: F,
    tol: &ToleranceConfig<F>,
) -> Result<ExchangeSites<F>> {
    let (a, a_kind) = snap_endpoint(set, a, tol)?;
    let (b, b_kind) = snap_endpoint(set, b, tol)?;
    if a == b {
        return Err(Error::invalid("exchange endpoints must differ"));
    }
    let pieces = set.pieces();
    // removal: one-sided neighborhood of `a` interior to the set
    let (removal_dir, removal_limit) = match a_kind {
        EndpointKind::PieceStart(i) => (1i8, pieces[i][1] - pieces[i][0]),
        EndpointKind::PieceEnd(i) => (-1i8, pieces[i][1] - pieces[i][0]),
    };
    // insertion: one-sided neighborhood of `b` in the adjacent gap
    let (insertion_dir, insertion_limit) = match b_kind {
        EndpointKind::PieceStart(i) => {
            let gap_lo = if i == 0 { -F::one() } else { pieces[i - 1][1] };
            (-1i8, pieces[i][0] - gap_lo)
        }
        EndpointKind::PieceEnd(i) => {
            let gap_hi = if i + 1 == pieces.len() {
                F::one()
            } else {
                pieces[i + 1][0]
            };
            (1i8, gap_hi - pieces[i][1])
        }
    };
    if insertion_limit <= F::zero() {
        return Err(Error::invalid(format!(
            "no room to insert mass at the domain end {b}"
        )));
    }
    Ok(ExchangeSites {
        a,
        b,
        removal_dir,
        removal_limit,
        removal_mass: one_sided_mass(a, removal_dir, removal_limit),
        insertion_dir,
        insertion_limit,
        insertion_mass: one_sided_mass(b, insertion_dir, insertion_limit),
    })
}

/// First-order rate of energy change for the exchange move that removes mass
/// near `at` (inside `A`) and inserts it near `into` (in the complement):
/// `2 (h(into) - h(at))`.
///
/// Both points must be boundary points of `A` within `merge_tol`, and the
/// complement must adjoin `into`.
pub fn exchange_gain<F: Real>(
    a: &IntervalUnion<F>,
    at: F,
    into: F,
    tol: &ToleranceConfig<F>,
) -> Result<F> {
    let sites = exchange_sites(a, at, into, tol)?;
    let profile = potential(a);
    Ok(real::<F>(2.0) * (profile.h(sites.b)? - profile.h(sites.a)?))
}

/// The perturbed configuration of the exchange move: removes a one-sided
/// neighborhood of `at` inside `A` carrying torsion mass exactly `eps`, and
/// inserts a neighborhood of `into` in the complement carrying the same
/// mass. Total mass is preserved to `root_tol` and the piece count grows by
/// at most one.
pub fn perturbed_config<F: Real>(
    a: &IntervalUnion<F>,
    at: F,
    into: F,
    eps: F,
    tol: &ToleranceConfig<F>,
) -> Result<IntervalUnion<F>> {
    if !(eps > F::zero()) {
        return Err(Error::domain("exchange mass must be positive"));
    }
    let sites = exchange_sites(a, at, into, tol)?;
    let removal_w = width_for_mass(sites.a, sites.removal_dir, eps, sites.removal_limit, tol)?;
    let insertion_w = width_for_mass(
        sites.b,
        sites.insertion_dir,
        eps,
        sites.insertion_limit,
        tol,
    )?;

    let mut pieces: Vec<[F; 2]> = a.pieces().to_vec();
    for piece in pieces.iter_mut() {
        if sites.removal_dir > 0 && piece[0] == sites.a {
            piece[0] = piece[0] + removal_w;
        } else if sites.removal_dir < 0 && piece[1] == sites.a {
            piece[1] = piece[1] - removal_w;
        }
    }
    if sites.insertion_dir > 0 {
        pieces.push([sites.b, sites.b + insertion_w]);
    } else {
        pieces.push([sites.b - insertion_w, sites.b]);
    }
    Ok(IntervalUnion::from_exact(pieces))
}

/// The matched insertion width of the symmetric two-sided move: the unique
/// `zeta > 0` giving `[b, b + zeta]` the same torsion mass as
/// `[-b, -b + eta]`. Expands as `zeta = eta + (2b/(1-b^2)) eta^2 + O(eta^3)`.
pub fn matched_offset<F: Real>(b: F, eta: F, tol: &ToleranceConfig<F>) -> Result<F> {
    if !(b > F::zero() && b < F::one()) {
        return Err(Error::domain(format!("base point b = {b} outside (0, 1)")));
    }
    if !(eta > F::zero()) {
        return Err(Error::domain("width eta must be positive"));
    }
    if -b + eta > F::one() {
        return Err(Error::infeasible("interval [-b, -b+eta] leaves the domain"));
    }
    let target = one_sided_mass(-b, 1, eta);
    width_for_mass(b, 1, target, F::one() - b, tol).map_err(|e| match e {
        Error::Infeasible(_) => Error::infeasible("matched interval [b, b+zeta] leaves the domain"),
        other => other,
    })
}

/// Second-order energy rate of the symmetric exchange move of an even
/// configuration with extreme boundary points `-b`, `b`:
/// `(2/psi(b)^2) (b h(b) + u'(b) + b(1 - b))`.
pub fn symmetric_second_order<F: Real>(
    a: &IntervalUnion<F>,
    b: F,
    tol: &ToleranceConfig<F>,
) -> Result<F> {
    if a.is_empty() {
        return Err(Error::invalid("empty configuration"));
    }
    let reflected = a.reflect();
    let even = a.piece_count() == reflected.piece_count()
        && a.pieces().iter().zip(reflected.pieces()).all(|(p, q)| {
            (p[0] - q[0]).abs() <= tol.merge_tol && (p[1] - q[1]).abs() <= tol.merge_tol
        });
    if !even {
        return Err(Error::invalid("configuration is not even"));
    }
    if !(b > F::zero() && b < F::one()) {
        return Err(Error::domain(format!("base point b = {b} outside (0, 1)")));
    }
    let first = a.pieces()[0][0];
    let last = a.pieces()[a.piece_count() - 1][1];
    if (first + b).abs() > tol.merge_tol || (last - b).abs() > tol.merge_tol {
        return Err(Error::invalid(
            "b must be the extreme boundary point of the even configuration",
        ));
    }
    let profile = potential(a);
    let h_b = profile.h(b)?;
    let du_b = profile.derivative(b);
    let psi_b = torsion(b)?;
    Ok(real::<F>(2.0) / (psi_b * psi_b) * (b * h_b + du_b + b * (F::one() - b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{green, xi_for_budget};
    use proptest::prelude::*;

    type U = IntervalUnion<f64>;

    fn tol() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn union(pieces: &[[f64; 2]]) -> U {
        IntervalUnion::normalize(pieces, &tol()).unwrap()
    }

    /// Explicit two-branch potential of the right tail `(xi, 1)`.
    fn right_tail_potential(xi: f64, x: f64) -> f64 {
        if x <= xi {
            0.25 * (xi - 1.0) * (xi - 1.0) * (x + 1.0)
        } else {
            -0.5 * x * x + 0.25 * (xi + 1.0) * (xi + 1.0) * x + 0.5 - 0.25 * (xi + 1.0) * (xi + 1.0)
        }
    }

    #[test]
    fn potential_examples() {
        // u(0) = 1/4 for the right half
        let p = potential(&union(&[[0.0, 1.0]]));
        assert!((p.eval(0.0) - 0.25).abs() < 1e-15);
        // the full source gives the torsion function
        let p = potential(&U::full());
        for i in 0..=40 {
            let x = -1.0 + 0.05 * i as f64;
            assert!((p.eval(x) - torsion(x).unwrap()).abs() < 1e-15);
        }
        // empty source: identically zero
        let p = potential(&U::empty());
        assert_eq!(p.eval(0.3), 0.0);
        assert_eq!(p.end_derivatives(), (0.0, 0.0));
    }

    #[test]
    fn potential_matches_right_tail_branches() {
        for xi in [-0.8, -0.3, 0.0, 0.41, 0.9] {
            let p = potential(&union(&[[xi, 1.0]]));
            for i in 0..=50 {
                let x = -1.0 + 0.04 * i as f64;
                let want = right_tail_potential(xi, x);
                assert!(
                    (p.eval(x) - want).abs() < 1e-14,
                    "xi={xi} x={x}: {} vs {want}",
                    p.eval(x)
                );
            }
        }
    }

    #[test]
    fn potential_profile_regularity() {
        let a = union(&[[-0.7, -0.2], [0.1, 0.4], [0.6, 0.9]]);
        let p = potential(&a);
        // zero ends, bounded by torsion
        assert!(p.eval(-1.0).abs() < 1e-15 && p.eval(1.0).abs() < 1e-15);
        for i in 0..=200 {
            let x = -1.0 + 0.01 * i as f64;
            let u = p.eval(x);
            assert!(u >= -1e-15);
            assert!(u <= torsion(x).unwrap() + 1e-15);
        }
        // C^1 across breakpoints
        for &e in &a.boundary_points() {
            let h = 1e-9;
            assert!((p.eval(e - h) - p.eval(e + h)).abs() < 1e-8);
            assert!((p.derivative(e - h) - p.derivative(e + h)).abs() < 1e-8);
        }
        // distributional second derivative = -chi_A away from breakpoints
        let h = 1e-4;
        for &x in &[-0.45, -0.5, 0.25, 0.5, 0.75, 0.95] {
            let fd = (p.eval(x + h) - 2.0 * p.eval(x) + p.eval(x - h)) / (h * h);
            let want = if a.contains(x) { -1.0 } else { 0.0 };
            assert!((fd - want).abs() < 1e-6, "u'' at {x}: {fd} vs {want}");
        }
    }

    #[test]
    fn energy_closed_form_values() {
        assert!((j_energy(&union(&[[0.0, 1.0]])) - 5.0 / 24.0).abs() < 1e-15);
        assert!((j_energy(&U::full()) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(j_energy(&U::empty()), 0.0);
        // two-piece value, frozen from exact rational evaluation of the
        // pairwise closed form: 149/6144 + 7/96 + 5/128 = 837/6144
        let a = union(&[[-0.5, -0.25], [0.25, 0.75]]);
        assert!((j_energy(&a) - 837.0 / 6144.0).abs() < 1e-16);
    }

    #[test]
    fn energy_quadrature_oracle() {
        assert!(
            (j_energy_quadrature(&union(&[[0.0, 1.0]]), 12).unwrap() - 5.0 / 24.0).abs() < 1e-12
        );
        assert_eq!(j_energy_quadrature(&U::empty(), 8).unwrap(), 0.0);
        assert!(j_energy_quadrature(&U::full(), 3).is_err());
        let a = union(&[[-0.5, -0.25], [0.25, 0.75]]);
        assert!((j_energy_quadrature(&a, 16).unwrap() - j_energy(&a)).abs() < 1e-13);
    }

    #[test]
    fn energy_matches_right_tail_quartic() {
        let cfg = tol();
        for t in [0.05, 0.21, 1.0 / 3.0, 0.49] {
            let xi = xi_for_budget(t, &cfg).unwrap();
            let a = union(&[[xi, 1.0]]);
            assert!((j_energy(&a) - right_tail_energy(xi)).abs() < 1e-15);
        }
    }

    #[test]
    fn boundary_derivative_values() {
        assert_eq!(boundary_derivatives(&U::full()), (1.0, -1.0));
        let (lo, hi) = boundary_derivatives(&union(&[[0.0, 1.0]]));
        assert!((lo - 0.25).abs() < 1e-15);
        assert!((hi + 0.75).abs() < 1e-15);
        // symmetric union: u'(-1) = -u'(+1)
        let (lo, hi) = boundary_derivatives(&union(&[[-0.6, -0.2], [0.2, 0.6]]));
        assert!((lo + hi).abs() < 1e-15);
        // profile end derivatives agree with the closed identities
        let a = union(&[[-0.3, 0.2], [0.5, 0.8]]);
        let p = potential(&a);
        let (d_lo, d_hi) = boundary_derivatives(&a);
        assert!((p.derivative(-1.0) - d_lo).abs() < 1e-14);
        assert!((p.derivative(1.0) - d_hi).abs() < 1e-14);
    }

    #[test]
    fn h_ratio_values() {
        let a = union(&[[0.0, 1.0]]);
        assert!((h_ratio(&a, 1.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((h_ratio(&a, -1.0).unwrap() - 0.25).abs() < 1e-15);
        for x in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            assert!((h_ratio(&U::full(), x).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(h_ratio(&a, 1.5).is_err());
        assert!(h_ratio(&a, -1.0 - 1e-12).is_err());
    }

    #[test]
    fn h_tail_formulas_left_and_right_of_support() {
        // left of the support: h(y) = (1/(1-y)) int (1-x) f dm;
        // right of it:         h(y) = (1/(1+y)) int (1+x) f dm
        let a = union(&[[-0.2, 0.1], [0.3, 0.5]]);
        let p = potential(&a);
        let int_one_minus: f64 = a
            .pieces()
            .iter()
            .map(|&[lo, hi]| (hi - lo) - (hi * hi - lo * lo) / 2.0)
            .sum();
        let int_one_plus: f64 = a
            .pieces()
            .iter()
            .map(|&[lo, hi]| (hi - lo) + (hi * hi - lo * lo) / 2.0)
            .sum();
        for y in [-1.0, -0.8, -0.4, -0.2] {
            let want = int_one_minus / (2.0 * (1.0 - y)) * 2.0;
            assert!((p.h(y).unwrap() - want).abs() < 1e-13, "y={y}");
        }
        for y in [0.5, 0.7, 1.0] {
            let want = int_one_plus / (2.0 * (1.0 + y)) * 2.0;
            assert!((p.h(y).unwrap() - want).abs() < 1e-13, "y={y}");
        }
    }

    #[test]
    fn interaction_energy_decomposition() {
        // J(A ∪ B) = J(A) + 2 (chi_A, G chi_B) + J(B) for disjoint A, B,
        // with the cross term from the independent profile route
        let a = union(&[[-0.8, -0.3]]);
        let b = union(&[[0.1, 0.4], [0.6, 0.7]]);
        let both = a.union(&b);
        let lhs = j_energy(&both);
        let rhs = j_energy(&a) + 2.0 * interaction_energy(&a, &b) + j_energy(&b);
        assert!((lhs - rhs).abs() < 1e-15, "{lhs} vs {rhs}");
        // symmetry of the interaction
        assert!((interaction_energy(&a, &b) - interaction_energy(&b, &a)).abs() < 1e-15);
    }

    #[test]
    fn complement_energy_identity() {
        for t in [0.1, 1.0 / 3.0, 0.52] {
            let xi = xi_for_budget(t, &tol()).unwrap();
            let a = union(&[[xi, 1.0]]);
            let c = a.complement();
            let lhs = j_energy(&a);
            let rhs = 2.0 * (t - 1.0 / 3.0) + j_energy(&c);
            assert!((lhs - rhs).abs() < 1e-13, "t={t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn exchange_gain_values() {
        let cfg = tol();
        // even configuration: zero gain across the symmetric pair
        let sym = union(&[[-0.5, 0.5]]);
        let g = exchange_gain(&sym, -0.5, 0.5, &cfg).unwrap();
        assert!(g.abs() < 1e-15);
        // rightward exchange on (0, 0.5): gain 2(h(1/2) - h(0)) = 1/12
        let a = union(&[[0.0, 0.5]]);
        let g = exchange_gain(&a, 0.0, 0.5, &cfg).unwrap();
        assert!((g - 1.0 / 12.0).abs() < 1e-15, "{g}");
        assert!(g > 0.0);
        // at the optimal tail the only admissible pair has non-positive gain
        let xi = xi_for_budget(0.3, &cfg).unwrap();
        let best = union(&[[xi, 1.0]]);
        let g = exchange_gain(&best, 1.0, xi, &cfg).unwrap();
        assert!(g < 0.0);
        // invalid boundary points are rejected
        assert!(exchange_gain(&a, 0.25, 0.5, &cfg).is_err());
        assert!(exchange_gain(&a, 0.0, 0.0, &cfg).is_err());
        // insertion at a domain end the set already touches is rejected
        assert!(exchange_gain(&best, xi, 1.0, &cfg).is_err());
    }

    #[test]
    fn perturbed_config_preserves_mass() {
        let cfg = tol();
        let a = union(&[[-0.4, 0.1], [0.3, 0.6]]);
        let mass = a.psi_mass();
        for eps in [1e-2, 1e-4, 1e-8, 1e-12] {
            let p = perturbed_config(&a, -0.4, 0.6, eps, &cfg).unwrap();
            assert!((p.psi_mass() - mass).abs() <= cfg.root_tol);
        }
        // eps -> 0 leaves the configuration unchanged in the limit
        let p = perturbed_config(&a, -0.4, 0.6, 1e-13, &cfg).unwrap();
        for (x, y) in p.pieces().iter().zip(a.pieces()) {
            assert!((x[0] - y[0]).abs() < 1e-11 && (x[1] - y[1]).abs() < 1e-11);
        }
    }

    #[test]
    fn perturbed_config_first_order_limit() {
        let cfg = tol();
        let a = union(&[[-0.4, 0.1], [0.3, 0.6]]);
        let gain = exchange_gain(&a, 0.1, 0.3, &cfg).unwrap();
        let j0 = j_energy(&a);
        let mut err_prev = f64::INFINITY;
        for eps in [1e-3, 1e-4, 1e-5] {
            let p = perturbed_config(&a, 0.1, 0.3, eps, &cfg).unwrap();
            let rate = (j_energy(&p) - j0) / eps;
            let err = (rate - gain).abs();
            assert!(err < 10.0 * eps, "eps={eps}: rate {rate} vs gain {gain}");
            assert!(err < err_prev);
            err_prev = err;
        }
    }

    #[test]
    fn perturbed_config_feasibility_errors() {
        let cfg = tol();
        let a = union(&[[0.2, 0.4]]);
        // removal beyond the piece mass
        assert!(perturbed_config(&a, 0.2, 0.4, 1.0, &cfg).is_err());
        // insertion beyond the right gap mass
        let big = union(&[[-0.9, 0.9]]);
        let gap_mass = crate::kernel::phi(0.9).unwrap();
        assert!(perturbed_config(&big, -0.9, 0.9, gap_mass * 2.0, &cfg).is_err());
        // zero mass is rejected
        assert!(perturbed_config(&a, 0.2, 0.4, 0.0, &cfg).is_err());
    }

    #[test]
    fn perturbed_config_merges_and_consumes() {
        let cfg = tol();
        // inserting exactly the gap mass merges the piece into the domain end
        let a = union(&[[-0.2, 0.5]]);
        let gap = crate::kernel::phi(0.5).unwrap();
        let p = perturbed_config(&a, -0.2, 0.5, gap, &cfg).unwrap();
        assert_eq!(p.piece_count(), 1);
        assert!((p.pieces()[0][1] - 1.0).abs() < 1e-12);
        // removing the full piece mass teleports the piece
        let small = union(&[[-0.1, 0.1]]);
        let m = small.psi_mass();
        let p = perturbed_config(&small, -0.1, 0.1, m, &cfg).unwrap();
        assert_eq!(p.piece_count(), 1);
        assert!((p.pieces()[0][0] - 0.1).abs() < 1e-12);
        assert!((p.psi_mass() - m).abs() <= cfg.root_tol);
    }

    #[test]
    fn matched_offset_expansion() {
        let cfg = tol();
        // zeta/eta -> 1
        for eta in [1e-2, 1e-3, 1e-4] {
            let z = matched_offset(0.5, eta, &cfg).unwrap();
            assert!((z / eta - 1.0).abs() < 3.0 * eta);
        }
        // quadratic coefficient 2b/(1-b^2) at b = 1/2
        let b = 0.5;
        let eta = 1e-3;
        let z = matched_offset(b, eta, &cfg).unwrap();
        let coeff = 2.0 * b / (1.0 - b * b);
        let cubic_remainder = z - eta - coeff * eta * eta;
        assert!(
            cubic_remainder.abs() < 20.0 * eta * eta * eta,
            "{cubic_remainder}"
        );
        // b -> 0: symmetric limit zeta = eta
        let z = matched_offset(1e-9, 1e-3, &cfg).unwrap();
        assert!((z - 1e-3).abs() < 1e-11);
        // infeasible widths are rejected
        assert!(matched_offset(0.9, 1.95, &cfg).is_err());
        assert!(matched_offset(0.99, 1.5, &cfg).is_err());
        assert!(matched_offset(0.0, 1e-3, &cfg).is_err());
    }

    #[test]
    fn symmetric_second_order_positivity_and_limit() {
        let cfg = tol();
        let b = 0.4;
        let a = union(&[[-b, b]]);
        let curv = symmetric_second_order(&a, b, &cfg).unwrap();
        // lower bound from the even-configuration algebra
        let psi_b = torsion(b).unwrap();
        assert!(curv >= 2.0 / (psi_b * psi_b) * b * b * (1.0 - b) / (1.0 + b) - 1e-12);
        assert!(curv > 0.0);

        // matches the epsilon^2 rate of the actual symmetric move
        let j0 = j_energy(&a);
        let rate = |eps: f64| {
            let f = |w: f64| one_sided_mass(-b, 1, w) - eps;
            let eta = newton_bisect(f, |w| torsion(-b + w).unwrap(), 0.0, 2.0 * b, 1e-15).unwrap();
            let zeta = matched_offset(b, eta, &cfg).unwrap();
            let moved = union(&[[-b + eta, b + zeta]]);
            (j_energy(&moved) - j0) / (eps * eps)
        };
        let r1 = rate(1e-3);
        let r2 = rate(1e-4);
        let extrap = r2 + (r2 - r1) / 9.0;
        assert!(
            (extrap - curv).abs() / curv.abs() < 1e-4,
            "extrapolated {extrap} vs formula {curv}"
        );
    }

    #[test]
    fn symmetric_second_order_formula_near_degenerate_end() {
        let cfg = tol();
        // two-route algebra: h(b) = |A|/(1+b) and u'(b) = -|A|/2 for even A
        for b in [0.9, 0.99, 0.999] {
            let a = union(&[[-b, -b + 0.05], [b - 0.05, b]]);
            let value = symmetric_second_order(&a, b, &cfg).unwrap();
            let measure = a.measure();
            let psi_b = torsion(b).unwrap();
            let assembled =
                2.0 / (psi_b * psi_b) * (b * measure / (1.0 + b) - measure / 2.0 + b * (1.0 - b));
            assert!(
                (value - assembled).abs() <= 1e-10 * assembled.abs().max(1.0),
                "b={b}: {value} vs {assembled}"
            );
        }
    }

    #[test]
    fn symmetric_second_order_rejects_bad_input() {
        let cfg = tol();
        assert!(symmetric_second_order(&union(&[[0.1, 0.4]]), 0.4, &cfg).is_err());
        assert!(symmetric_second_order(&union(&[[-0.4, 0.4]]), 0.3, &cfg).is_err());
        assert!(symmetric_second_order(&U::empty(), 0.4, &cfg).is_err());
    }

    #[test]
    fn small_neighborhood_limits() {
        // on-diagonal: J(chi_I)/mass(I)^2 -> 1/psi(a);
        // off-diagonal: (chi_I, G chi_J)/eps^2 -> G(a,b)/(psi(a) psi(b));
        // first-order ratio: (chi_I, u)/(chi_I, psi) -> h(a)
        let cfg = tol();
        let a_set = union(&[[-0.35, 0.2], [0.45, 0.7]]);
        let profile = potential(&a_set);
        let a = 0.2; // piece end, set to the left
        let b = 0.45; // piece start, gap to the left

        let ratio_on = |eta: f64| {
            let i = union(&[[a - eta, a]]);
            j_energy(&i) / i.psi_mass().powi(2)
        };
        let r = [ratio_on(1e-2), ratio_on(1e-3), ratio_on(1e-4)];
        let extrap = r[2] + (r[2] - r[1]) / 9.0;
        let want = 1.0 / torsion(a).unwrap();
        assert!((extrap - want).abs() / want < 1e-4, "{extrap} vs {want}");

        let ratio_off = |eps: f64| {
            let w_a = width_for_mass(a, -1, eps, 0.55, &cfg).unwrap();
            let w_b = width_for_mass(b, -1, eps, 0.25, &cfg).unwrap();
            let i = union(&[[a - w_a, a]]);
            let j = union(&[[b - w_b, b]]);
            interaction_energy(&i, &j) / (eps * eps)
        };
        let r = [ratio_off(1e-2), ratio_off(1e-3), ratio_off(1e-4)];
        let extrap = r[2] + (r[2] - r[1]) / 9.0;
        let want = green(a, b).unwrap() / (torsion(a).unwrap() * torsion(b).unwrap());
        assert!((extrap - want).abs() / want < 1e-4, "{extrap} vs {want}");

        let ratio_first = |eta: f64| {
            let i = union(&[[a - eta, a]]);
            profile.integral(a - eta, a) / i.psi_mass()
        };
        let r = [ratio_first(1e-2), ratio_first(1e-3), ratio_first(1e-4)];
        let extrap = r[2] + (r[2] - r[1]) / 9.0;
        let want = profile.h(a).unwrap();
        assert!(
            (extrap - want).abs() / want.abs() < 1e-4,
            "{extrap} vs {want}"
        );
    }

    prop_compose! {
        fn arb_union()(points in proptest::collection::vec(-1.0..1.0f64, 2..=8)) -> U {
            let mut pts = points;
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let pairs: Vec<[f64; 2]> = pts.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            IntervalUnion::normalize(&pairs, &ToleranceConfig::default()).unwrap()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn quadrature_agrees_with_closed_form(a in arb_union()) {
            let q = j_energy_quadrature(&a, 12).unwrap();
            prop_assert!((q - j_energy(&a)).abs() <= 1e-10);
        }

        #[test]
        fn polarization_never_decreases_energy(a in arb_union()) {
            let pa = a.polarize_right();
            prop_assert!(j_energy(&pa) >= j_energy(&a) - 1e-12);
        }

        #[test]
        fn potential_bounded_by_torsion(a in arb_union(), x in -1.0..1.0f64) {
            let p = potential(&a);
            let u = p.eval(x);
            prop_assert!(u >= -1e-15);
            prop_assert!(u <= torsion(x).unwrap() + 1e-15);
        }

        #[test]
        fn reflection_preserves_energy(a in arb_union()) {
            prop_assert!((j_energy(&a.reflect()) - j_energy(&a)).abs() <= 1e-14);
        }
    }
}
