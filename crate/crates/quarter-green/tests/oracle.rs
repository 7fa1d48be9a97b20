use quarter_green::oracle::*;
use quarter_green::simulate::{simulate, SimulationConfig};
use quarter_green::store::{cache_key, GridStore};
use quarter_green_core::green::green_value;
use quarter_green_core::uniformization::uniformize;
use quarter_green_core::walk::{JumpKernel, LatticePoint};
use quarter_green_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORIGIN: LatticePoint = LatticePoint::new(1, 1);

fn solve(k: &JumpKernel, start: LatticePoint, n: usize) -> GreenGrid {
    green_truncated(k, start, &TruncationConfig::new(n)).unwrap()
}

#[test]
fn visit_counts_are_nonnegative_and_bounded_below() {
    let start = LatticePoint::new(2, 3);
    let g = solve(&JumpKernel::uniform(), start, 64);
    assert!(g.values.iter().all(|v| *v >= 0.0));
    assert!(g.get(2, 3) >= 1.0);
}

#[test]
fn box_inclusion_is_monotone() {
    let k = JumpKernel::su3_product(0.2);
    let small = solve(&k, ORIGIN, 80);
    let big = solve(&k, ORIGIN, 160);
    for i in 1..=80 {
        for j in 1..=80 {
            assert!(big.get(i, j) >= small.get(i, j) - 1e-12, "({i}, {j})");
        }
    }
}

#[test]
fn su3_anchor_value() {
    // First converged run at N = 600, solver tolerance 1e-12.
    const ANCHOR: f64 = 1.047_969_119_062_153_8;
    let g = solve(&JumpKernel::su3(), ORIGIN, 600);
    assert!((g.get(1, 1) - ANCHOR).abs() < 1e-11, "{}", g.get(1, 1));
    let u = uniformize(&JumpKernel::su3()).unwrap().with_alpha(1.0);
    let c = green_value(&u, 1, 1, 1, 1, None).unwrap();
    assert!((c.value / g.get(1, 1) - 1.0).abs() < 0.005);
}

#[test]
fn extrapolation_reports_the_doubling_difference() {
    let k = JumpKernel::su3();
    let g = green_truncated(&k, ORIGIN, &TruncationConfig::new(100).extrapolated()).unwrap();
    let small = solve(&k, ORIGIN, 100);
    assert_eq!(g.solved_n, 200);
    for (i, j) in [(1, 1), (5, 7), (50, 50)] {
        assert!((g.error(i, j) - (g.get(i, j) - small.get(i, j)).abs()).abs() < 1e-15);
    }
}

#[test]
fn richardson_differences_decay() {
    let k = JumpKernel::su3();
    let grids: Vec<GreenGrid> = [50, 100, 200, 400].iter().map(|&n| solve(&k, ORIGIN, n)).collect();
    for (i, j) in [(3, 2), (10, 10), (20, 5)] {
        let d: Vec<f64> = grids.windows(2).map(|w| (w[1].get(i, j) - w[0].get(i, j)).abs()).collect();
        assert!(d.windows(2).all(|p| p[1] < p[0]), "({i}, {j}): {d:?}");
    }
}

#[test]
fn solver_residual_contracts() {
    let g = solve(&JumpKernel::uniform(), LatticePoint::new(3, 4), 300);
    let h = &g.residual_history;
    assert!(h.windows(2).all(|w| w[1] < w[0]));
    assert!(*h.last().unwrap() <= 1e-12);
}

#[test]
fn absorbed_mass_defect_is_small() {
    let k = JumpKernel::su3();
    let a = absorption_from_grid(&k, &solve(&k, ORIGIN, 600));
    assert!(1.0 - a.total_mass() <= 0.02);
    assert!(a.total_mass() <= 1.0 + 1e-10);
    let a_small = absorption_from_grid(&k, &solve(&k, ORIGIN, 100));
    assert!(a_small.total_mass() < a.total_mass());
}

#[test]
fn absorption_is_swap_symmetric() {
    let k = JumpKernel::su3_product(1.0 / 6.0);
    assert_eq!(k, k.swapped());
    let a = absorption_from_grid(&k, &solve(&k, LatticePoint::new(2, 2), 120));
    // Lexicographic sweeps are not swap-invariant, so equality holds to the
    // solver tolerance rather than bit for bit.
    for i in 1..=60 {
        assert!((a.h(i) - a.h_tilde(i)).abs() <= 1e-11, "{i}");
    }
}

#[test]
fn functional_equation_holds() {
    let k = JumpKernel::su3();
    let cfg = TruncationConfig::new(600);
    let r = functional_equation_residual(&k, ORIGIN, Complex64::new(0.5, 0.0), Complex64::new(0.4, 0.0), &cfg).unwrap();
    assert!(r.norm() <= 1e-4);
    let r0 = functional_equation_residual(&k, ORIGIN, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), &cfg).unwrap();
    assert!(r0.norm() <= 1e-6);
    // Mass leaving through the far sides enters only with weight x^N y^N, so
    // the residual sits at the rounding floor for every N tried.
    for n in [150, 300] {
        let r = functional_equation_residual(&k, ORIGIN, Complex64::new(0.5, 0.0), Complex64::new(0.4, 0.0), &TruncationConfig::new(n)).unwrap();
        assert!(r.norm() <= 1e-12);
    }
    assert!(functional_equation_residual(&k, ORIGIN, Complex64::new(1.0, 0.0), Complex64::new(0.4, 0.0), &cfg).is_err());
}

#[test]
fn monte_carlo_agrees_with_the_lattice_solve() {
    let k = JumpKernel::su3_product(0.2);
    let start = LatticePoint::new(2, 2);
    let g = solve(&k, start, 400);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let targets: Vec<LatticePoint> = (0..20)
        .map(|_| LatticePoint::new(rng.gen_range(1..=8), rng.gen_range(1..=8)))
        .collect();
    let cfg = SimulationConfig {
        paths: 200_000,
        seed: 3,
        ..SimulationConfig::default()
    };
    let r = simulate(&k, start, &targets, &cfg).unwrap();
    for (p, m) in &r.targets {
        let o = g.get(p.i as usize, p.j as usize);
        assert!((m.mean - o).abs() <= 3.0 * m.se, "{p:?}: {} vs {o} (se {})", m.mean, m.se);
    }
    let a = absorption_from_grid(&k, &g);
    for i in 1..=10 {
        let (mh, mv) = (r.horizontal[i - 1], r.vertical[i - 1]);
        assert!((mh.mean - a.h(i)).abs() <= 3.0 * mh.se, "h_{i}");
        assert!((mv.mean - a.h_tilde(i)).abs() <= 3.0 * mv.se, "h~_{i}");
    }
    let again = simulate(&k, start, &targets, &cfg).unwrap();
    assert_eq!(r, again);
}

#[test]
fn store_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let store = GridStore::new(dir.path());
    let k = JumpKernel::su3();
    let cfg = TruncationConfig::new(40);
    let first = store.green(&k, ORIGIN, &cfg).unwrap();
    let key = cache_key(&k, ORIGIN, &cfg);
    assert!(store.path_for(&key).exists());
    let cached = store.load(&key).unwrap().unwrap();
    assert_eq!(first, cached);
    std::fs::write(store.path_for(&key), b"garbage").unwrap();
    assert!(store.load(&key).is_err());
}

#[test]
fn rejects_bad_inputs() {
    let k = JumpKernel::su3();
    assert!(green_truncated(&k, LatticePoint::new(0, 1), &TruncationConfig::new(32)).is_err());
    assert!(green_truncated(&k, LatticePoint::new(40, 1), &TruncationConfig::new(32)).is_err());
    assert!(green_truncated(&k, ORIGIN, &TruncationConfig::new(8)).is_err());
}
