use approx::assert_relative_eq;
use qcad::device::{build_single_hamiltonian, exact_spectrum, TransmonSpec};
use qcad::pauli::{encode_operator, EncodingScheme, PauliSum};
use qcad::variational::*;

fn transmon_h(d: usize) -> (PauliSum<f64>, Vec<f64>) {
    let t = TransmonSpec::new(20.0, 91.0, 0.1).unwrap();
    let dense = build_single_hamiltonian::<f64>(&t, d).unwrap();
    let ex = exact_spectrum(&dense, d).unwrap();
    (encode_operator(&dense, d, EncodingScheme::Gray).unwrap(), ex.eigenvalues)
}

fn quick() -> OptimizerConfig {
    OptimizerConfig { restarts: 3, seed: 7, ..Default::default() }
}

#[test]
fn adjoint_gradient_matches_parameter_shift() {
    let (h, _) = transmon_h(8);
    let a = build_block_ansatz(3, 2).unwrap();
    let params: Vec<f64> = (0..a.num_parameters).map(|i| 0.3 * (i as f64 * 1.7).sin()).collect();
    let obj = Objective::new(&h, &a, None).unwrap();
    let (fa, ga) = obj.adjoint_gradient(&params).unwrap();
    let (fs, gs) = obj.parameter_shift_gradient(&params).unwrap();
    assert_relative_eq!(fa, fs, epsilon = 1e-12);
    for (x, y) in ga.iter().zip(&gs) {
        assert_relative_eq!(x, y, epsilon = 1e-10);
    }
    let (fv, gv) = vqe_objective(&params, &h, &a, None).unwrap();
    assert_eq!(fv, fs);
    assert_eq!(gv, gs);
}

#[test]
fn penalized_gradient_matches_finite_differences() {
    let (h, _) = transmon_h(4);
    let a = build_block_ansatz(2, 2).unwrap();
    let mut obj = Objective::new(&h, &a, None).unwrap();
    let other: Vec<f64> = (0..a.num_parameters).map(|i| 0.2 + 0.1 * i as f64).collect();
    obj.add_penalty(3.0, a.prepare(&other).unwrap()).unwrap();
    let p: Vec<f64> = (0..a.num_parameters).map(|i| -0.4 + 0.15 * i as f64).collect();
    let (_, g) = obj.adjoint_gradient(&p).unwrap();
    for i in 0..p.len() {
        let mut up = p.clone();
        let mut dn = p.clone();
        up[i] += 1e-6;
        dn[i] -= 1e-6;
        let fd = (obj.value(&up).unwrap() - obj.value(&dn).unwrap()) / 2e-6;
        assert_relative_eq!(g[i], fd, epsilon = 1e-6);
    }
}

#[test]
fn vqe_reaches_ground_state() {
    let (h, exact) = transmon_h(4);
    let a = build_block_ansatz(2, 2).unwrap();
    let r = run_vqe(&h, &a, &quick(), None).unwrap();
    assert_eq!(r.levels.len(), 1);
    assert!((r.levels[0].energy - exact[0]).abs() < 1e-6);
    assert!(r.levels[0].energy >= exact[0] - 1e-9);
}

#[test]
fn vqd_fixed_beta_finds_all_levels() {
    let (h, exact) = transmon_h(4);
    let a = build_block_ansatz(2, 2).unwrap();
    let defl = DeflationConfig { num_levels: 4, beta_policy: BetaPolicy::from_exact(&exact, 4).unwrap() };
    let r = run_vqd(&h, &a, &defl, &quick(), None).unwrap();
    for (e, x) in r.energies().iter().zip(&exact) {
        assert!((e - x).abs() < 1e-5, "{e} vs {x}");
    }
    assert!(r.max_off_diagonal_overlap() < 1e-6);
    for i in 0..4 {
        assert_relative_eq!(r.overlaps[i][i], 1.0, epsilon = 1e-9);
    }
}

#[test]
fn vqd_adaptive_beta_finds_all_levels() {
    let (h, exact) = transmon_h(4);
    let a = build_block_ansatz(2, 2).unwrap();
    let defl = DeflationConfig { num_levels: 3, beta_policy: BetaPolicy::adaptive() };
    let r = run_vqd(&h, &a, &defl, &quick(), None).unwrap();
    for (e, x) in r.energies().iter().zip(&exact) {
        assert!((e - x).abs() < 1e-5, "{e} vs {x}");
    }
}

#[test]
fn vqd_is_deterministic_for_fixed_seed() {
    let (h, exact) = transmon_h(4);
    let a = build_block_ansatz(2, 2).unwrap();
    let defl = DeflationConfig { num_levels: 2, beta_policy: BetaPolicy::from_exact(&exact, 2).unwrap() };
    let r1 = run_vqd(&h, &a, &defl, &quick(), None).unwrap();
    let r2 = run_vqd(&h, &a, &defl, &quick(), None).unwrap();
    assert_eq!(r1, r2);
}

#[test]
fn ritz_values_bound_exact_levels_from_above() {
    let (h, exact) = transmon_h(8);
    let a = build_block_ansatz(3, 1).unwrap();
    let cfg = OptimizerConfig { restarts: 1, max_iterations: 30, ..Default::default() };
    let defl = DeflationConfig { num_levels: 3, beta_policy: BetaPolicy::from_exact(&exact, 3).unwrap() };
    let r = run_vqd(&h, &a, &defl, &cfg, None).unwrap();
    let refined = subspace_refine(&h, &a, &r).unwrap();
    assert_eq!(refined.energies.len(), refined.rank);
    for (e, x) in refined.energies.iter().zip(&exact) {
        assert!(*e >= x - 1e-9, "{e} below exact {x}");
    }
    assert!(refined.energies[0] <= r.energies().iter().cloned().fold(f64::INFINITY, f64::min) + 1e-9);
}

#[test]
fn invalid_configs_are_rejected() {
    let (h, _) = transmon_h(4);
    let a = build_block_ansatz(2, 1).unwrap();
    let bad = OptimizerConfig { restarts: 0, ..Default::default() };
    assert!(run_vqe(&h, &a, &bad, None).is_err());
    let defl = DeflationConfig { num_levels: 0, beta_policy: BetaPolicy::adaptive() };
    assert!(run_vqd(&h, &a, &defl, &quick(), None).is_err());
    let defl = DeflationConfig { num_levels: 2, beta_policy: BetaPolicy::Fixed(vec![-1.0]) };
    assert!(run_vqd(&h, &a, &defl, &quick(), None).is_err());
    assert!(BetaPolicy::from_exact(&[1.0], 2).is_err());
    assert!(build_hierarchical_ansatz(3, 2, 1).is_err());
}

#[test]
fn lbfgs_minimizes_rosenbrock() {
    let f = |x: &[f64]| {
        let (a, b) = (x[0], x[1]);
        let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
        (v, vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)])
    };
    let r = minimize(f, &[-1.2, 1.0], &LbfgsOptions::default());
    assert!(r.converged);
    assert_relative_eq!(r.x[0], 1.0, epsilon = 1e-5);
    assert_relative_eq!(r.x[1], 1.0, epsilon = 1e-5);
}

#[test]
fn closed_form_resources_small_m() {
    // M = 1: 32 − 0 − 20 = 12 XX gates.
    let r1 = closed_form_resources(1).unwrap();
    assert_eq!((r1.n_xx, r1.depth_parallel, r1.depth_sequential), (12, 14, 20));
    let r2 = closed_form_resources(2).unwrap();
    assert_eq!((r2.n_xx, r2.depth_parallel, r2.depth_sequential), (80, 36, 84));
    assert!(closed_form_resources(3).is_err());
    assert!(closed_form_resources(0).is_err());
}

#[test]
fn constructive_resources_match_closed_form() {
    for m in [1, 2, 4, 8] {
        assert_eq!(constructive_resources(m).unwrap(), closed_form_resources(m).unwrap(), "M={m}");
        let a = build_hierarchical_ansatz(m, 4, 2).unwrap();
        assert_eq!(count_resources(&a).n_xx, closed_form_n_xx(m).unwrap());
        assert_eq!(a.count_xx(), closed_form_n_xx(m).unwrap());
    }
}

#[test]
fn one_factorization_covers_every_edge_once() {
    for n in 2..10 {
        let rounds = one_factorization(n);
        assert_eq!(rounds.len(), if n % 2 == 0 { n - 1 } else { n });
        let mut seen = std::collections::HashSet::new();
        for r in &rounds {
            let mut used = std::collections::HashSet::new();
            for &(a, b) in r {
                assert!(a < b && b < n);
                assert!(used.insert(a) && used.insert(b), "vertex reused in a round");
                assert!(seen.insert((a, b)));
            }
        }
        assert_eq!(seen.len(), n * (n - 1) / 2);
    }
}

#[test]
fn canonical_pairs_enumerate_all_pairs() {
    assert_eq!(canonical_pairs(0..4).len(), 6);
    assert!(canonical_pairs(0..1).is_empty());
}
