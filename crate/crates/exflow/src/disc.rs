//! Grid explorer for the analogous problem on the unit disc (open in
//! dimension two): collocated energy evaluation with the disc Green kernel,
//! discrete polarization and circular cap symmetrization, and projected
//! exchange ascent over the relaxed class.
//!
//! Cells are annular sectors of a polar grid, equal-area within each ring,
//! so every reflection across a lattice diameter maps cells to cells
//! exactly. Kernel values between cells are computed from ring radii and
//! the tabulated cosine of the sector difference, which makes reflected and
//! rotated configurations bit-identical term multisets. The logarithmic
//! self-interaction of a cell uses the equal-area-disc closed form; this
//! module certifies monotonicity properties, not tight optima.

use crate::optimize::project_box_budget;
use crate::{real, Error, Real, Result};

/// Planar point helpers.
#[inline]
fn norm2<F: Real>(p: [F; 2]) -> F {
    p[0] * p[0] + p[1] * p[1]
}

/// Green kernel of the Dirichlet Laplacian on the unit disc, via the image
/// charge at the inversion of `x` in the unit circle:
/// `G(x, y) = (1/4 pi) ln[(|x|^2 |y|^2 - 2 x.y + 1) / |y - x|^2]`.
///
/// Both points must be interior; coincident points (within `1e-14`) are a
/// singular-argument error.
pub fn green_disc<F: Real>(x: [F; 2], y: [F; 2]) -> Result<F> {
    if norm2(x) >= F::one() || norm2(y) >= F::one() {
        return Err(Error::domain("green_disc requires interior points"));
    }
    let d2 = norm2([y[0] - x[0], y[1] - x[1]]);
    if d2.sqrt() <= real(1e-14) {
        return Err(Error::domain("green_disc is singular on the diagonal"));
    }
    let dot = x[0] * y[0] + x[1] * y[1];
    let q2 = norm2(x) * norm2(y) - real::<F>(2.0) * dot + F::one();
    Ok((q2 / d2).ln() / (real::<F>(4.0) * F::PI()))
}

/// Torsion function of the disc, `(1 - |x|^2)/4`.
pub fn torsion_disc<F: Real>(x: [F; 2]) -> Result<F> {
    let r2 = norm2(x);
    if r2 > F::one() {
        return Err(Error::domain("point outside the closed disc"));
    }
    Ok((F::one() - r2) / real(4.0))
}

/// Polar grid of `n_r` uniform rings by `n_theta` sectors. `n_theta` must be
/// even so that every lattice reflection maps cells to cells.
#[derive(Debug, Clone)]
pub struct PolarGrid<F> {
    n_r: usize,
    n_theta: usize,
    /// Collocation radius per ring (radial center of mass).
    ring_radius: Vec<F>,
    /// Cell area per ring (constant within a ring).
    ring_area: Vec<F>,
    /// Exact `int_cell psi` per ring.
    ring_psi: Vec<F>,
    /// Self-interaction `s_i` per ring (see [`PolarGrid::grid_j`]).
    ring_self: Vec<F>,
    /// `cos(2 pi k / n_theta)` with the symmetric construction
    /// `cos_table[k] == cos_table[n_theta - k]` exactly.
    cos_table: Vec<F>,
}

/// Relaxed density on a polar grid: one value in `[0, 1]` per cell, indexed
/// `ring * n_theta + sector`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity<F> {
    values: Vec<F>,
}

impl<F: Real> GridDensity<F> {
    pub fn new(grid: &PolarGrid<F>, values: Vec<F>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::invalid("density length does not match the grid"));
        }
        if values
            .iter()
            .any(|v| v.is_nan() || *v < F::zero() || *v > F::one())
        {
            return Err(Error::invalid("density values must lie in [0, 1]"));
        }
        Ok(GridDensity { values })
    }

    pub fn uniform(grid: &PolarGrid<F>, value: F) -> Result<Self> {
        Self::new(grid, vec![value; grid.cell_count()])
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }
}

/// Cap-symmetrization axis: the center angle of a lattice sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    pub sector: usize,
}

/// Closed half-space through the origin whose reflection is a lattice
/// diameter: the inward normal points along `pi * axis / n_theta`.
/// All `axis` in `0..2 n_theta` are lattice-compatible when `n_theta` is
/// even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfSpace {
    pub axis: usize,
}

/// Side of a sector's center relative to the half-space boundary:
/// `1` inside `H`, `-1` in the complement, `0` on the reflection line.
fn sector_side(n_theta: usize, sector: usize, axis: usize) -> i8 {
    let n = n_theta as i64;
    let u = (2 * sector as i64 + 1 - axis as i64).rem_euclid(2 * n);
    let d = 2 * u;
    if d == n || d == 3 * n {
        0
    } else if d < n || d > 3 * n {
        1
    } else {
        -1
    }
}

impl<F: Real> PolarGrid<F> {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r == 0 {
            return Err(Error::domain("grid needs at least one ring"));
        }
        if n_theta < 2 || !n_theta.is_multiple_of(2) {
            return Err(Error::domain("sector count must be even and at least 2"));
        }
        let pi = F::PI();
        let nrf = real::<F>(n_r as f64);
        let ntf = real::<F>(n_theta as f64);
        let dtheta = real::<F>(2.0) * pi / ntf;
        let mut ring_radius = Vec::with_capacity(n_r);
        let mut ring_area = Vec::with_capacity(n_r);
        let mut ring_psi = Vec::with_capacity(n_r);
        let mut ring_self = Vec::with_capacity(n_r);
        for i in 0..n_r {
            let r1 = real::<F>(i as f64) / nrf;
            let r2 = real::<F>((i + 1) as f64) / nrf;
            let (s1, s2) = (r1 * r1, r2 * r2);
            let area = pi * (s2 - s1) / ntf;
            let radius = real::<F>(2.0) / real(3.0) * (r2 * s2 - r1 * s1) / (s2 - s1);
            // int_cell (1 - r^2)/4 r dr dtheta
            let psi = dtheta * ((s2 - s1) / real(8.0) - (s2 * s2 - s1 * s1) / real(16.0));
            // equal-area-disc regularization of the log singularity plus the
            // image term at the collocation point
            let rho = (area / pi).sqrt();
            let regular = (F::one() - radius * radius).ln();
            let s = area * area / (real::<F>(2.0) * pi) * (real::<F>(0.25) - rho.ln() + regular);
            ring_radius.push(radius);
            ring_area.push(area);
            ring_psi.push(psi);
            ring_self.push(s);
        }
        // symmetric table: cos_table[k] == cos_table[n_theta - k] bit-exactly
        let cos_table = (0..n_theta)
            .map(|k| {
                let kk = k.min(n_theta - k);
                (real::<F>(kk as f64) * dtheta).cos()
            })
            .collect();
        Ok(PolarGrid {
            n_r,
            n_theta,
            ring_radius,
            ring_area,
            ring_psi,
            ring_self,
            cos_table,
        })
    }

    pub fn rings(&self) -> usize {
        self.n_r
    }

    pub fn sectors(&self) -> usize {
        self.n_theta
    }

    pub fn cell_count(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn cell_area(&self, cell: usize) -> F {
        self.ring_area[cell / self.n_theta]
    }

    /// Cartesian collocation point of a cell.
    pub fn cell_center(&self, cell: usize) -> [F; 2] {
        let ring = cell / self.n_theta;
        let sector = cell % self.n_theta;
        let theta = real::<F>(2.0) * F::PI() * (real::<F>(sector as f64) + real(0.5))
            / real(self.n_theta as f64);
        let r = self.ring_radius[ring];
        [r * theta.cos(), r * theta.sin()]
    }

    /// Total collocated torsion mass of the grid (the full budget).
    pub fn psi_budget(&self) -> F {
        self.ring_psi
            .iter()
            .fold(F::zero(), |acc, &w| acc + w * real(self.n_theta as f64))
    }

    /// Per-cell torsion weights in cell order.
    pub fn psi_weights(&self) -> Vec<F> {
        let mut w = Vec::with_capacity(self.cell_count());
        for ring in 0..self.n_r {
            for _ in 0..self.n_theta {
                w.push(self.ring_psi[ring]);
            }
        }
        w
    }

    /// Kernel value between two distinct cells, computed from ring radii and
    /// the tabulated sector-difference cosine (so congruent pairs evaluate
    /// bit-identically).
    fn kernel_between(&self, cell_i: usize, cell_j: usize) -> F {
        let (ri, si) = (cell_i / self.n_theta, cell_i % self.n_theta);
        let (rj, sj) = (cell_j / self.n_theta, cell_j % self.n_theta);
        let r1 = self.ring_radius[ri];
        let r2 = self.ring_radius[rj];
        let k = (si + self.n_theta - sj) % self.n_theta;
        let c = self.cos_table[k];
        let cross = real::<F>(2.0) * r1 * r2 * c;
        let d2 = r1 * r1 + r2 * r2 - cross;
        let q2 = r1 * r1 * r2 * r2 - cross + F::one();
        (q2 / d2).ln() / (real::<F>(4.0) * F::PI())
    }

    /// Collocated energy `J(f)`: pair terms `f_i f_j G(c_i, c_j) a_i a_j`
    /// plus the per-cell self terms, in deterministic index order.
    pub fn grid_j(&self, f: &GridDensity<F>) -> Result<F> {
        if f.values.len() != self.cell_count() {
            return Err(Error::invalid("density length does not match the grid"));
        }
        let n = self.cell_count();
        let mut acc = F::zero();
        for i in 0..n {
            let fi = f.values[i];
            if fi == F::zero() {
                continue;
            }
            let ai = self.cell_area(i);
            for j in (i + 1)..n {
                let fj = f.values[j];
                if fj == F::zero() {
                    continue;
                }
                acc = acc
                    + real::<F>(2.0) * fi * fj * self.kernel_between(i, j) * ai * self.cell_area(j);
            }
        }
        for i in 0..n {
            acc = acc + f.values[i] * f.values[i] * self.ring_self[i / self.n_theta];
        }
        Ok(acc)
    }

    /// Image sector under the reflection of a half-space's lattice diameter.
    fn reflect_sector(&self, sector: usize, axis: usize) -> usize {
        let n = self.n_theta as i64;
        (axis as i64 + n / 2 - 1 - sector as i64).rem_euclid(n) as usize
    }

    fn polarize_in_place(&self, values: &mut [F], h: HalfSpace) {
        for ring in 0..self.n_r {
            let base = ring * self.n_theta;
            for s in 0..self.n_theta {
                let m = self.reflect_sector(s, h.axis);
                if s >= m {
                    continue;
                }
                let side_s = sector_side(self.n_theta, s, h.axis);
                debug_assert_eq!(side_s, -sector_side(self.n_theta, m, h.axis));
                if side_s == 0 {
                    continue;
                }
                let (i, j) = (base + s, base + m);
                let lo = values[i].min(values[j]);
                let hi = values[i].max(values[j]);
                // min on the half-space side, max on its complement
                if side_s > 0 {
                    values[i] = lo;
                    values[j] = hi;
                } else {
                    values[i] = hi;
                    values[j] = lo;
                }
            }
        }
    }

    /// Discrete polarization: per reflection pair of cells, the value on the
    /// half-space side becomes the minimum and the value on the complement
    /// side the maximum. Equimeasurable per ring and idempotent; never
    /// decreases [`PolarGrid::grid_j`].
    pub fn polarize_disc(&self, f: &GridDensity<F>, h: HalfSpace) -> Result<GridDensity<F>> {
        if f.values.len() != self.cell_count() {
            return Err(Error::invalid("density length does not match the grid"));
        }
        if h.axis >= 2 * self.n_theta {
            return Err(Error::invalid("half-space axis is off the angular lattice"));
        }
        let mut values = f.values.clone();
        self.polarize_in_place(&mut values, h);
        Ok(GridDensity { values })
    }

    /// The lattice half-spaces whose polarization moves mass toward `omega`
    /// (the complement side, which receives the maxima, contains `omega`'s
    /// cell center strictly).
    pub fn halfspaces_toward(&self, omega: Direction) -> Result<Vec<HalfSpace>> {
        if omega.sector >= self.n_theta {
            return Err(Error::invalid("direction is off the angular lattice"));
        }
        Ok((0..2 * self.n_theta)
            .filter(|&axis| sector_side(self.n_theta, omega.sector, axis) < 0)
            .map(|axis| HalfSpace { axis })
            .collect())
    }

    /// Sector visit order of the discrete cap centered at `omega`: ascending
    /// angular distance, counterclockwise first on ties.
    fn cap_order(&self, omega: Direction) -> Vec<usize> {
        let n = self.n_theta;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&s| {
            let o = (s + n - omega.sector) % n;
            if o <= n / 2 {
                (o, 0usize)
            } else {
                (n - o, 1usize)
            }
        });
        order
    }

    /// Discrete circular cap symmetrization: per ring, values are rearranged
    /// to decrease with angular distance from `omega`. Preserves each ring's
    /// value multiset; idempotent.
    pub fn cap_symmetrize(&self, f: &GridDensity<F>, omega: Direction) -> Result<GridDensity<F>> {
        if f.values.len() != self.cell_count() {
            return Err(Error::invalid("density length does not match the grid"));
        }
        if omega.sector >= self.n_theta {
            return Err(Error::invalid("direction is off the angular lattice"));
        }
        let order = self.cap_order(omega);
        let mut values = f.values.clone();
        let mut ring_vals: Vec<F> = Vec::with_capacity(self.n_theta);
        for ring in 0..self.n_r {
            let base = ring * self.n_theta;
            ring_vals.clear();
            ring_vals.extend_from_slice(&f.values[base..base + self.n_theta]);
            ring_vals.sort_by(|a, b| b.partial_cmp(a).expect("no NaN in densities"));
            for (rank, &sector) in order.iter().enumerate() {
                values[base + sector] = ring_vals[rank];
            }
        }
        Ok(GridDensity { values })
    }

    /// Area-weighted `L^1` distance between densities.
    pub fn l1_distance(&self, f: &GridDensity<F>, g: &GridDensity<F>) -> F {
        f.values
            .iter()
            .zip(&g.values)
            .enumerate()
            .fold(F::zero(), |acc, (i, (&a, &b))| {
                acc + (a - b).abs() * self.cell_area(i)
            })
    }

    /// Smallest cap deviation over all lattice directions, with the argmin.
    pub fn cap_deviation(&self, f: &GridDensity<F>) -> (F, Direction) {
        let mut best = (F::infinity(), Direction { sector: 0 });
        for sector in 0..self.n_theta {
            let omega = Direction { sector };
            let cap = self.cap_symmetrize(f, omega).expect("lattice direction");
            let d = self.l1_distance(f, &cap);
            if d < best.0 {
                best = (d, omega);
            }
        }
        best
    }
}

/// Result of the relaxed ascent on the disc grid.
#[derive(Debug, Clone)]
pub struct DiscAscent<F> {
    pub density: GridDensity<F>,
    pub energy: F,
    /// Minimal cap-symmetrization `L^1` deviation over lattice directions.
    pub deviation: F,
    pub direction: Direction,
    pub iterations: usize,
    pub converged: bool,
    /// `(iteration, energy)`; nondecreasing.
    pub trace: Vec<(usize, F)>,
}

/// Projected gradient ascent on the collocated energy over the relaxed
/// class `{0 <= f <= 1, (f, psi) <= t}`, interleaved with polarization
/// sweeps toward a fixed lattice direction (each sweep is exactly
/// energy-nondecreasing) and with guarded cap-symmetrization steps (applied
/// only when they do not decrease the energy).
pub fn ascent_disc<F: Real>(grid: &PolarGrid<F>, t: F, max_iters: usize) -> Result<DiscAscent<F>> {
    let budget = grid.psi_budget();
    if !(t > F::zero() && t < budget) {
        return Err(Error::domain(format!(
            "budget t = {t} outside (0, {budget})"
        )));
    }
    let n = grid.cell_count();
    let weights = grid.psi_weights();
    let omega = Direction { sector: 0 };
    let toward = grid.halfspaces_toward(omega)?;

    // dense collocation matrix: pair terms off the diagonal, self terms on it
    let mut matrix = vec![F::zero(); n * n];
    for i in 0..n {
        matrix[i * n + i] = grid.ring_self[i / grid.n_theta];
        let ai = grid.cell_area(i);
        for j in (i + 1)..n {
            let v = grid.kernel_between(i, j) * ai * grid.cell_area(j);
            matrix[i * n + j] = v;
            matrix[j * n + i] = v;
        }
    }
    let energy = |f: &[F]| -> F {
        let mut acc = F::zero();
        for i in 0..n {
            let row = &matrix[i * n..(i + 1) * n];
            let mut s = F::zero();
            for j in 0..n {
                s = s + row[j] * f[j];
            }
            acc = acc + f[i] * s;
        }
        acc
    };
    let gradient = |f: &[F]| -> Vec<F> {
        (0..n)
            .map(|i| {
                let row = &matrix[i * n..(i + 1) * n];
                let mut s = F::zero();
                for j in 0..n {
                    s = s + row[j] * f[j];
                }
                real::<F>(2.0) * s
            })
            .collect()
    };

    // seed tilted toward omega, then projected
    let seed: Vec<F> = (0..n)
        .map(|i| {
            let c = grid.cell_center(i);
            let theta0 = real::<F>(2.0) * F::PI() * (real::<F>(omega.sector as f64) + real(0.5))
                / real(grid.n_theta as f64);
            let dir = [theta0.cos(), theta0.sin()];
            let radius = grid.ring_radius[i / grid.n_theta];
            let along = if radius > F::zero() {
                (c[0] * dir[0] + c[1] * dir[1]) / radius
            } else {
                F::zero()
            };
            (F::one() + along * real(0.5)) * real(0.5)
        })
        .collect();
    let mut f = project_box_budget(&seed, &weights, t);
    for &h in &toward {
        grid.polarize_in_place(&mut f, h);
    }
    let mut e = energy(&f);
    let mut trace = vec![(0usize, e)];

    let row_max = (0..n)
        .map(|i| (0..n).fold(F::zero(), |acc, j| acc + matrix[i * n + j].abs()))
        .fold(F::zero(), |a, b| a.max(b));
    let base_step = F::one() / (real::<F>(2.0) * row_max).max(F::epsilon());
    let mut step = base_step;
    let mut converged = false;
    let mut iterations = 0usize;

    while iterations < max_iters {
        iterations += 1;
        let g = gradient(&f);
        let y: Vec<F> = f.iter().zip(&g).map(|(&fi, &gi)| fi + step * gi).collect();
        let mut cand = project_box_budget(&y, &weights, t);
        for &h in &toward {
            grid.polarize_in_place(&mut cand, h);
        }
        // guarded cap step: keep it only when the energy does not drop
        let capped = grid
            .cap_symmetrize(
                &GridDensity {
                    values: cand.clone(),
                },
                omega,
            )
            .expect("lattice direction");
        let ec_plain = energy(&cand);
        let ec_capped = energy(capped.values());
        let (cand, ec) = if ec_capped >= ec_plain {
            (capped.values.clone(), ec_capped)
        } else {
            (cand, ec_plain)
        };

        if ec >= e {
            let displacement = f
                .iter()
                .zip(&cand)
                .fold(F::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
            f = cand;
            e = ec;
            trace.push((iterations, e));
            step = (step * real(1.25)).min(base_step * real(64.0));
            if displacement <= real(1e-12) {
                converged = true;
                break;
            }
        } else {
            step = step * real(0.5);
            if step < base_step * real(1e-12) {
                converged = true;
                break;
            }
        }
    }

    let density = GridDensity { values: f };
    let (deviation, direction) = grid.cap_deviation(&density);
    Ok(DiscAscent {
        energy: e,
        density,
        deviation,
        direction,
        iterations,
        converged,
        trace,
    })
}

/// The two-point sorting map `(x1, x2) -> (max, min)` applied to a pair of
/// pairs, together with the exact strictness of the `l^1` contraction
/// `|phi x - phi y|_1 <= |x - y|_1`: strict exactly when the two pairs are
/// strictly oppositely ordered and their value ranges overlap with interior.
pub fn sort_pair<F: Real>(x: (F, F), y: (F, F)) -> ((F, F), (F, F), bool) {
    let phi = |p: (F, F)| (p.0.max(p.1), p.0.min(p.1));
    let px = phi(x);
    let py = phi(y);
    let opposite = (x.0 - x.1) * (y.0 - y.1) < F::zero();
    let overlap = px.0.min(py.0) > px.1.max(py.1);
    (px, py, opposite && overlap)
}
