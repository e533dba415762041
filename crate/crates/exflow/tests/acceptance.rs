//! Acceptance suite: one test per criterion, each printing a pass line and
//! enforcing its stated tolerance (and runtime budget where one applies).
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use exflow::disc::{ascent_disc, sort_pair, GridDensity, HalfSpace, PolarGrid};
use exflow::flow::{flux, gamma, gamma_lambda, lambda_from_region, solve_flow};
use exflow::forms::{exchange_gain, j_energy, matched_offset, perturbed_config};
use exflow::interval::IntervalUnion;
use exflow::kernel::{green, phi, torsion, xi_for_budget};
use exflow::optimize::{alpha_value, brute_force_best, exchange_local_search, OptimizeParams};
use exflow::quad::integrate;
use exflow::tol::ToleranceConfig;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn tol() -> ToleranceConfig<f64> {
    ToleranceConfig::default()
}

/// Random canonical union with pieces and gaps at least `sep` long and all
/// endpoints inside `[-span, span]`.
fn random_union(rng: &mut StdRng, span: f64, sep: f64, max_pieces: usize) -> IntervalUnion<f64> {
    loop {
        let k = rng.random_range(1..=max_pieces);
        let mut pts: Vec<f64> = (0..2 * k).map(|_| rng.random_range(-span..span)).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if pts.windows(2).all(|w| w[1] - w[0] >= sep) {
            let pairs: Vec<[f64; 2]> = pts.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
            return IntervalUnion::normalize(&pairs, &tol()).unwrap();
        }
    }
}

#[test]
fn criterion_01_exact_constants() {
    let start = Instant::now();
    let cfg = tol();

    let xi = xi_for_budget(1.0 / 3.0, &cfg).unwrap();
    assert!(xi.abs() <= 1e-12, "xi(1/3) = {xi}");

    let alpha = alpha_value::<f64>(1.0 / 3.0).unwrap();
    assert!((alpha - 5.0 / 24.0).abs() <= 1e-12, "alpha(1/3) = {alpha}");

    let opt = gamma::<f64>();
    assert!(
        (opt.value - 1.0 / 12.0).abs() <= 1e-12,
        "gamma = {}",
        opt.value
    );
    assert_eq!(opt.lambda_star, 0.0);
    assert_eq!(opt.region.pieces(), &[[0.0, 1.0]]);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("criterion 01 exact constants: PASS ({elapsed:?})");
}

#[test]
fn criterion_02_optimal_tail_reproduction() {
    let start = Instant::now();
    let cfg = tol();
    for i in 1..=12 {
        let t = 0.05 * i as f64;
        let xi = xi_for_budget(t, &cfg).unwrap();
        let alpha = alpha_value(t).unwrap();
        for m in 1..=4usize {
            let res = exchange_local_search(&OptimizeParams::new(t, m)).unwrap();
            assert!(res.converged, "t={t} m={m}: not converged");
            assert_eq!(res.config.piece_count(), 1, "t={t} m={m}: not an interval");
            let [lo, hi] = res.config.pieces()[0];
            assert!(
                (lo - xi).abs() <= 1e-6,
                "t={t} m={m}: left endpoint {lo} vs xi {xi}"
            );
            assert!((hi - 1.0).abs() <= 1e-6, "t={t} m={m}: right endpoint {hi}");
            assert!(
                (res.energy - alpha).abs() <= 1e-10,
                "t={t} m={m}: energy {} vs alpha {alpha}",
                res.energy
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("criterion 02 optimal-tail reproduction: PASS ({elapsed:?})");
}

#[test]
fn criterion_03_oracle_equivalence() {
    let start = Instant::now();
    // 20 instances: 10 budgets at m = 1 and m = 2
    for i in 1..=10 {
        let t = 0.06 * i as f64;
        let alpha = alpha_value(t).unwrap();
        for m in [1usize, 2] {
            let bf = brute_force_best(t, m, 200).unwrap();
            assert!(
                bf.energy <= alpha + 1e-9,
                "t={t} m={m}: brute force {} above alpha {alpha}",
                bf.energy
            );
            let ls = exchange_local_search(&OptimizeParams::new(t, m)).unwrap();
            assert!(
                ls.energy >= bf.energy - 1e-12,
                "t={t} m={m}: local search {} below brute force {}",
                ls.energy,
                bf.energy
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!("criterion 03 oracle equivalence: PASS ({elapsed:?})");
}

#[test]
fn criterion_04_first_order_gain() {
    let cfg = tol();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut checked = 0usize;
    while checked < 50 {
        let a_set = random_union(&mut rng, 0.55, 0.08, 3);
        let ends = a_set.boundary_points();
        let from = ends[rng.random_range(0..ends.len())];
        let to = ends[rng.random_range(0..ends.len())];
        if from == to {
            continue;
        }
        let gain = exchange_gain(&a_set, from, to, &cfg).unwrap();
        let j0 = j_energy(&a_set);
        for eps in [1e-3, 1e-4] {
            let moved = perturbed_config(&a_set, from, to, eps, &cfg).unwrap();
            let rate = (j_energy(&moved) - j0) / eps;
            assert!(
                (rate - gain).abs() <= 10.0 * eps,
                "instance {checked}: eps={eps}, rate {rate} vs gain {gain}"
            );
        }
        checked += 1;
    }
    println!("criterion 04 first-order gain: PASS (50 instances)");
}

#[test]
fn criterion_05_small_neighborhood_asymptotics() {
    let cfg = tol();
    let mut rng = StdRng::seed_from_u64(55);
    let richardson = |r_coarse: f64, r_fine: f64| r_fine + (r_fine - r_coarse) / 9.0;

    // on-diagonal concentration: J(chi_I)/mass(I)^2 -> 1/psi(a)
    for _ in 0..10 {
        let a = rng.random_range(-0.7..0.7);
        let ratio = |eta: f64| {
            let i = IntervalUnion::normalize(&[[a - eta, a]], &cfg).unwrap();
            j_energy(&i) / i.psi_mass().powi(2)
        };
        let extrap = richardson(ratio(1e-3), ratio(1e-4));
        let want = 1.0 / torsion(a).unwrap();
        assert!(
            ((extrap - want) / want).abs() <= 1e-4,
            "on-diagonal at {a}: {extrap} vs {want}"
        );
    }

    // off-diagonal concentration: (chi_I, G chi_J)/eps^2 -> G(a,b)/(psi psi)
    for _ in 0..10 {
        let a = rng.random_range(-0.7..0.0);
        let b = rng.random_range(0.1..0.7);
        let ratio = |eps: f64| {
            // widths carrying mass eps on each side, via the budget map
            let wa = a - xi_for_budget(phi(a).unwrap() + eps, &cfg).unwrap();
            let wb = b - xi_for_budget(phi(b).unwrap() + eps, &cfg).unwrap();
            let i = IntervalUnion::normalize(&[[a - wa, a]], &cfg).unwrap();
            let j = IntervalUnion::normalize(&[[b - wb, b]], &cfg).unwrap();
            exflow::forms::interaction_energy(&i, &j) / (eps * eps)
        };
        let extrap = richardson(ratio(1e-3), ratio(1e-4));
        let want = green(a, b).unwrap() / (torsion(a).unwrap() * torsion(b).unwrap());
        assert!(
            ((extrap - want) / want).abs() <= 1e-4,
            "off-diagonal at ({a}, {b}): {extrap} vs {want}"
        );
    }

    // matched-offset expansion: (zeta - eta)/eta^2 -> 2b/(1-b^2)
    for _ in 0..10 {
        let b = rng.random_range(0.05..0.8);
        let coeff = |eta: f64| (matched_offset(b, eta, &cfg).unwrap() - eta) / (eta * eta);
        let extrap = richardson(coeff(1e-3), coeff(1e-4));
        let want = 2.0 * b / (1.0 - b * b);
        assert!(
            ((extrap - want) / want).abs() <= 1e-4,
            "matched offset at {b}: {extrap} vs {want}"
        );
    }
    println!("criterion 05 small-neighborhood asymptotics: PASS (3 x 10 base points)");
}

#[test]
fn criterion_06_duality_and_symmetry() {
    for i in 0..101 {
        let t = (i + 1) as f64 * (2.0 / 3.0) / 102.0;
        let gap =
            alpha_value(t).unwrap() - 2.0 * (t - 1.0 / 3.0) - alpha_value(2.0 / 3.0 - t).unwrap();
        assert!(gap.abs() <= 1e-12, "duality at t={t}: {gap}");
    }
    for i in 0..101 {
        let l = -1.0 + 2.0 * (i + 1) as f64 / 102.0;
        let gap = gamma_lambda(l).unwrap() - gamma_lambda(-l).unwrap();
        assert!(gap.abs() <= 1e-12, "symmetry at lambda={l}: {gap}");
    }
    println!("criterion 06 duality and symmetry identities: PASS (2 x 101 grid points)");
}

#[test]
fn criterion_07_flow_physics() {
    let mut rng = StdRng::seed_from_u64(77);
    for instance in 0..50 {
        let region = random_union(&mut rng, 0.85, 0.05, 3);
        let sol = solve_flow(&region);
        let lambda = lambda_from_region(&region);

        // flux balance (u, 1) = 0 by piecewise quadrature
        let mut nodes = vec![-1.0];
        nodes.extend(region.boundary_points());
        nodes.push(1.0);
        let total: f64 = nodes
            .windows(2)
            .map(|s| integrate(|x| sol.velocity(x).unwrap(), s[0], s[1], 8))
            .sum();
        assert!(
            total.abs() <= 1e-10,
            "instance {instance}: flux-balance residual {total}"
        );

        // interior PDE residual u'' = lambda +/- 1 at O(step^2)
        for h in [1e-2, 1e-3] {
            for seg in nodes.windows(2) {
                let x = 0.5 * (seg[0] + seg[1]);
                if seg[1] - seg[0] < 4.0 * h {
                    continue;
                }
                let dd = (sol.velocity(x + h).unwrap() - 2.0 * sol.velocity(x).unwrap()
                    + sol.velocity(x - h).unwrap())
                    / (h * h);
                let want = if region.contains(x) {
                    lambda + 1.0
                } else {
                    lambda - 1.0
                };
                assert!(
                    (dd - want).abs() <= h * h,
                    "instance {instance}: residual {} at x={x}, h={h}",
                    dd - want
                );
            }
        }

        // flux identity against the energy form, and against transport
        let q = flux(&region);
        let identity = 2.0 * j_energy(&region) - (1.0 - lambda) * (1.0 - lambda) / 3.0;
        assert!(
            (q - identity).abs() <= 1e-12,
            "instance {instance}: flux {q} vs identity {identity}"
        );
        let transported: f64 = region
            .complement()
            .pieces()
            .iter()
            .map(|&[lo, hi]| integrate(|x| sol.velocity(x).unwrap(), lo, hi, 8))
            .sum();
        assert!(
            (q - transported).abs() <= 1e-9,
            "instance {instance}: flux {q} vs transported {transported}"
        );
    }
    println!("criterion 07 flow physics: PASS (50 regions)");
}

#[test]
fn criterion_08_polarization_monotonicity() {
    let mut rng = StdRng::seed_from_u64(88);
    for _ in 0..1000 {
        let a = random_union(&mut rng, 0.999, 1e-4, 4);
        let pa = a.polarize_right();
        assert!(
            j_energy(&pa) >= j_energy(&a) - 1e-12,
            "1D polarization decreased energy on {a:?}"
        );
    }

    let grid = PolarGrid::<f64>::new(6, 12).unwrap();
    for _ in 0..100 {
        let values: Vec<f64> = (0..grid.cell_count())
            .map(|_| rng.random_range(0.0..=1.0))
            .collect();
        let f = GridDensity::new(&grid, values).unwrap();
        let axis = rng.random_range(0..2 * grid.sectors());
        let p = grid.polarize_disc(&f, HalfSpace { axis }).unwrap();
        assert!(
            grid.grid_j(&p).unwrap() >= grid.grid_j(&f).unwrap() - 1e-10,
            "disc polarization decreased energy (axis {axis})"
        );
    }
    println!("criterion 08 polarization monotonicity: PASS (1000 unions + 100 densities)");
}

#[test]
fn criterion_09_disc_symmetry() {
    let start = Instant::now();
    let grid = PolarGrid::<f64>::new(32, 64).unwrap();
    let t = grid.psi_budget() / 4.0;
    let out = ascent_disc(&grid, t, 600).unwrap();
    for w in out.trace.windows(2) {
        assert!(w[1].1 >= w[0].1, "energy trace decreased");
    }
    let cell_mass = std::f64::consts::PI / grid.cell_count() as f64;
    assert!(
        out.deviation <= 2.0 * cell_mass,
        "cap deviation {} above 2 cell masses {}",
        out.deviation,
        2.0 * cell_mass
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "criterion 09 disc symmetry property: PASS (deviation {:.3e}, {elapsed:?})",
        out.deviation
    );
}

#[test]
fn criterion_10_two_point_contraction() {
    let mut rng = StdRng::seed_from_u64(100);
    let l1 = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).abs() + (p.1 - q.1).abs();
    for i in 0..100_000 {
        let x = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
        let y = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
        let (px, py, strict) = sort_pair(x, y);
        let before = l1(x, y);
        let after = l1(px, py);
        assert!(after <= before + 1e-14, "pair {i}: contraction violated");
        let actual_strict = after < before - 1e-12 * before.max(1.0);
        assert_eq!(
            strict, actual_strict,
            "pair {i}: strictness flag mismatch for {x:?}, {y:?}"
        );
    }
    println!("criterion 10 two-point contraction: PASS (100000 pairs)");
}
