//! Canonical finite unions of disjoint open subintervals of `(-1, 1)`.
//!
//! An [`IntervalUnion`] is the shape variable of the whole crate. The
//! canonical form keeps pieces strictly separated and strictly positive in
//! length (the interior of the closure is the set itself), which makes
//! boundary-point enumeration for the optimizer well defined.
//!
//! Set operations work by endpoint sweeps over the ordered piece lists, not
//! by sampling, so unions built from exact arithmetic stay exact. Only
//! [`IntervalUnion::normalize`] applies the `merge_tol` gluing used to
//! sanitize external input.

use serde::Serialize;

use crate::kernel::phi_unchecked;
use crate::tol::ToleranceConfig;
use crate::{real, Error, Real, Result};

/// Ordered union of disjoint open intervals `(a_1, b_1), ..., (a_k, b_k)`
/// with `-1 <= a_1 < b_1 < a_2 < ... < b_k <= 1`. The empty union is legal.
///
/// Serializes to the `{"intervals": [[a, b], ...]}` JSON schema shared with
/// the CLI and test fixtures; see [`RawIntervals`] for the parsing side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalUnion<F> {
    intervals: Vec<[F; 2]>,
}

/// Deserialization shim for the interval JSON schema. Parsed pairs are not
/// yet canonical; run them through [`IntervalUnion::normalize`].
#[derive(Debug, Clone, serde::Deserialize)]
pub struct RawIntervals<F> {
    pub intervals: Vec<[F; 2]>,
}

impl<F: Real> Default for IntervalUnion<F> {
    fn default() -> Self {
        IntervalUnion::empty()
    }
}

impl<F: Real> IntervalUnion<F> {
    /// The empty union.
    pub fn empty() -> Self {
        IntervalUnion {
            intervals: Vec::new(),
        }
    }

    /// The full interval `(-1, 1)`.
    pub fn full() -> Self {
        IntervalUnion {
            intervals: vec![[-F::one(), F::one()]],
        }
    }

    /// Canonicalizes raw coordinate pairs: clamps to `[-1, 1]`, sorts, glues
    /// pieces whose gap is at most `merge_tol`, and drops pieces of length at
    /// most `merge_tol`.
    ///
    /// Errors on NaN coordinates and on pairs reversed by more than
    /// `merge_tol`.
    pub fn normalize(raw: &[[F; 2]], tol: &ToleranceConfig<F>) -> Result<Self> {
        tol.validate()?;
        let mut pieces: Vec<[F; 2]> = Vec::with_capacity(raw.len());
        for &[p, q] in raw {
            if p.is_nan() || q.is_nan() {
                return Err(Error::invalid("NaN interval endpoint"));
            }
            if p >= q + tol.merge_tol {
                return Err(Error::invalid(format!("reversed interval ({p}, {q})")));
            }
            let p = p.max(-F::one()).min(F::one());
            let q = q.max(-F::one()).min(F::one());
            if q - p > F::zero() {
                pieces.push([p, q]);
            }
        }
        pieces.sort_by(|a, b| a[0].partial_cmp(&b[0]).expect("no NaN after check"));

        let mut merged: Vec<[F; 2]> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match merged.last_mut() {
                Some(last) if piece[0] <= last[1] + tol.merge_tol => {
                    last[1] = last[1].max(piece[1]);
                }
                _ => merged.push(piece),
            }
        }
        merged.retain(|p| p[1] - p[0] > tol.merge_tol);
        Ok(IntervalUnion { intervals: merged })
    }

    /// Builds a union from pieces that are already exact and disjoint,
    /// merging only overlapping or touching pieces (zero tolerance).
    pub(crate) fn from_exact(mut pieces: Vec<[F; 2]>) -> Self {
        pieces.retain(|p| p[1] - p[0] > F::zero());
        pieces.sort_by(|a, b| a[0].partial_cmp(&b[0]).expect("finite endpoints"));
        let mut merged: Vec<[F; 2]> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match merged.last_mut() {
                Some(last) if piece[0] <= last[1] => {
                    last[1] = last[1].max(piece[1]);
                }
                _ => merged.push(piece),
            }
        }
        IntervalUnion { intervals: merged }
    }

    pub fn pieces(&self) -> &[[F; 2]] {
        &self.intervals
    }

    pub fn piece_count(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Membership test (pieces are open).
    pub fn contains(&self, x: F) -> bool {
        self.intervals.iter().any(|&[a, b]| a < x && x < b)
    }

    /// All piece endpoints in ascending order.
    pub fn boundary_points(&self) -> Vec<F> {
        let mut out = Vec::with_capacity(2 * self.intervals.len());
        for &[a, b] in &self.intervals {
            out.push(a);
            out.push(b);
        }
        out
    }

    /// Total length `sum(b_j - a_j)`.
    pub fn measure(&self) -> F {
        self.intervals
            .iter()
            .fold(F::zero(), |acc, &[a, b]| acc + (b - a))
    }

    /// First moment `int_A x dx = sum (b_j^2 - a_j^2)/2`.
    pub fn moment(&self) -> F {
        self.intervals
            .iter()
            .fold(F::zero(), |acc, &[a, b]| acc + (b * b - a * a) * real(0.5))
    }

    /// Torsion mass `(chi_A, psi) = sum_j [phi(a_j) - phi(b_j)]`, identical
    /// to `sum_j [(b_j - a_j)/2 - (b_j^3 - a_j^3)/6]`.
    pub fn psi_mass(&self) -> F {
        self.intervals.iter().fold(F::zero(), |acc, &[a, b]| {
            acc + (phi_unchecked(a) - phi_unchecked(b))
        })
    }

    /// Complement `D \ closure(A)`, canonical.
    pub fn complement(&self) -> Self {
        let mut pieces = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = -F::one();
        for &[a, b] in &self.intervals {
            pieces.push([cursor, a]);
            cursor = b;
        }
        pieces.push([cursor, F::one()]);
        IntervalUnion::from_exact(pieces)
    }

    /// Image under the reflection `x -> -x`.
    pub fn reflect(&self) -> Self {
        let pieces = self
            .intervals
            .iter()
            .rev()
            .map(|&[a, b]| [-b, -a])
            .collect();
        IntervalUnion { intervals: pieces }
    }

    /// Intersection by a two-pointer sweep.
    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let [a1, b1] = self.intervals[i];
            let [a2, b2] = other.intervals[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if hi - lo > F::zero() {
                out.push([lo, hi]);
            }
            if b1 <= b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion { intervals: out }
    }

    /// Union (overlapping or touching pieces merge exactly).
    pub fn union(&self, other: &Self) -> Self {
        let mut pieces = self.intervals.clone();
        pieces.extend_from_slice(&other.intervals);
        IntervalUnion::from_exact(pieces)
    }

    /// Set difference `A \ closure(B)` as an open union.
    pub fn difference(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for &[a, b] in &self.intervals {
            let mut lo = a;
            for &[c, d] in &other.intervals {
                if d <= lo {
                    continue;
                }
                if c >= b {
                    break;
                }
                if c > lo {
                    out.push([lo, c.min(b)]);
                }
                lo = lo.max(d);
                if lo >= b {
                    break;
                }
            }
            if b - lo > F::zero() {
                out.push([lo, b]);
            }
        }
        IntervalUnion::from_exact(out)
    }

    /// Intersection with the open interval `(lo, hi)`.
    pub fn restrict(&self, lo: F, hi: F) -> Self {
        let window = IntervalUnion {
            intervals: vec![[lo, hi]],
        };
        self.intersect(&window)
    }

    /// Polarization with respect to the right half `(0, 1)`:
    /// `PA = (A ∩ τA) ∪ ((A ∪ τA) ∩ (0, 1))` with `τ` the reflection.
    /// Idempotent; preserves measure and torsion mass.
    pub fn polarize_right(&self) -> Self {
        let tau = self.reflect();
        let sym = self.intersect(&tau);
        let pos = self.union(&tau).restrict(F::zero(), F::one());
        sym.union(&pos)
    }

    /// Mirror image of [`polarize_right`](Self::polarize_right).
    pub fn polarize_left(&self) -> Self {
        let tau = self.reflect();
        let sym = self.intersect(&tau);
        let neg = self.union(&tau).restrict(-F::one(), F::zero());
        sym.union(&neg)
    }

    /// Splits a right-polarized union into its symmetric part `A ∩ τA` and
    /// the non-symmetric remainder inside `(0, 1)`.
    ///
    /// Errors when `A` is not right-polarized.
    pub fn decompose_symmetric(&self) -> Result<(Self, Self)> {
        if self != &self.polarize_right() {
            return Err(Error::invalid(
                "decompose_symmetric requires a right-polarized union",
            ));
        }
        let tau = self.reflect();
        let sym = self.intersect(&tau);
        let non_sym = self
            .union(&tau)
            .restrict(F::zero(), F::one())
            .difference(&sym);
        Ok((sym, non_sym))
    }
}
