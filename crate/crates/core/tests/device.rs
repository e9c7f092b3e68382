use approx::assert_relative_eq;
use nalgebra::DMatrix;
use qcad::device::*;

fn pair(f1: f64, coupling: f64) -> ChainSpec {
    ChainSpec::pair(TransmonSpec::new(22.0, 91.0, f1).unwrap(), TransmonSpec::new(19.0, 91.0, 0.0).unwrap(), coupling)
        .unwrap()
}

fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn charging_energy_from_constants() {
    let e = 1.602176634e-19;
    let h = 6.62607015e-34;
    let want = e * e / (2.0 * 91e-15 * h) / 1e9;
    assert_relative_eq!(charging_energy(91.0).unwrap(), want, max_relative = 1e-12);
    assert!(charging_energy(0.0).is_err());
    assert!(charging_energy(f64::NAN).is_err());
}

#[test]
fn single_hamiltonian_matches_tridiagonal_oracle() {
    let t = TransmonSpec::new(20.0, 91.0, 0.13).unwrap();
    let d = 16;
    let ec = charging_energy(91.0).unwrap();
    let ej = 20.0 * (2.0 * std::f64::consts::PI * 0.13f64).cos().abs();
    let oracle = DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            let n = r as f64 - 8.0;
            4.0 * ec * n * n
        } else if r.abs_diff(c) == 1 {
            -ej
        } else {
            0.0
        }
    });
    let h = build_single_hamiltonian::<f64>(&t, d).unwrap();
    assert!(h.is_real());
    for r in 0..d {
        for c in 0..d {
            assert_relative_eq!(h.get(r, c).re, oracle[(r, c)], epsilon = 1e-12);
        }
    }
    let spec = exact_spectrum(&h, 4).unwrap();
    let want = sorted_eigs(oracle);
    for (a, b) in spec.eigenvalues.iter().zip(&want) {
        assert_relative_eq!(*a, *b, epsilon = 1e-10);
    }
}

#[test]
fn uncoupled_chain_is_a_kron_sum() {
    let chain = pair(0.05, 0.0);
    let d = 8;
    let h = build_chain_hamiltonian::<f64>(&chain, d).unwrap();
    let a = sorted_eigs(build_single_hamiltonian::<f64>(&chain.transmons[0], d).unwrap().matrix().map(|z| z.re));
    let b = sorted_eigs(build_single_hamiltonian::<f64>(&chain.transmons[1], d).unwrap().matrix().map(|z| z.re));
    let mut sums: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
    sums.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let ex = exact_spectrum(&h, 10).unwrap();
    for (e, s) in ex.eigenvalues.iter().zip(&sums) {
        assert_relative_eq!(*e, *s, epsilon = 1e-9);
    }
    let prods = uncoupled_product_states::<f64>(&chain.transmons, d, 3).unwrap();
    let mut low: Vec<f64> = a[..3].iter().flat_map(|x| b[..3].iter().map(move |y| x + y)).collect();
    low.sort_by(|x, y| x.partial_cmp(y).unwrap());
    assert_eq!(prods.len(), 9);
    for (p, s) in prods.iter().zip(&low) {
        assert_relative_eq!(p.energy, *s, epsilon = 1e-9);
    }
}

#[test]
fn chain_and_closed_form_pair_agree() {
    let chain = pair(0.07, 0.5);
    let a = build_chain_hamiltonian::<f64>(&chain, 8).unwrap();
    let b = build_two_hamiltonian::<f64>(&chain.transmons[0], &chain.transmons[1], 0.5, 8).unwrap();
    assert!(a.relative_distance(&b) < 1e-12);
}

#[test]
fn spectrum_is_even_in_flux() {
    for f in [0.03, 0.11, 0.2] {
        let plus = exact_spectrum(&build_chain_hamiltonian::<f64>(&pair(f, 0.5), 8).unwrap(), 6).unwrap();
        let minus = exact_spectrum(&build_chain_hamiltonian::<f64>(&pair(-f, 0.5), 8).unwrap(), 6).unwrap();
        for (x, y) in plus.eigenvalues.iter().zip(&minus.eigenvalues) {
            assert_relative_eq!(*x, *y, epsilon = 1e-12);
        }
        let shifted = exact_spectrum(&build_chain_hamiltonian::<f64>(&pair(f + 1.0, 0.5), 8).unwrap(), 6).unwrap();
        for (x, y) in plus.eigenvalues.iter().zip(&shifted.eigenvalues) {
            assert_relative_eq!(*x, *y, epsilon = 1e-9);
        }
    }
}

#[test]
fn eigenvectors_are_orthonormal_and_diagonalize() {
    let h = build_chain_hamiltonian::<f64>(&pair(0.1, 0.5), 4).unwrap();
    let s = exact_spectrum(&h, 16).unwrap();
    let v = &s.eigenvectors;
    let gram = v.adjoint() * v;
    assert!((gram - DMatrix::identity(16, 16)).norm() < 1e-10);
    let d = v.adjoint() * h.matrix() * v;
    for i in 0..16 {
        assert_relative_eq!(d[(i, i)].re, s.eigenvalues[i], epsilon = 1e-10);
    }
}

#[test]
fn labels_follow_uncoupled_products_away_from_crossings() {
    let chain = pair(0.0, 0.5);
    let s = exact_spectrum(&build_chain_hamiltonian::<f64>(&chain, 8).unwrap(), 4).unwrap();
    let prods = uncoupled_product_states::<f64>(&chain.transmons, 8, 3).unwrap();
    let labels = label_computational_states(&s, &prods).unwrap();
    assert_eq!(labels[0].label, "00");
    assert!(labels[0].overlap > 0.99);
    assert!(!labels[0].ambiguous);
    let names: Vec<&str> = labels.iter().map(|l| l.label.as_str()).collect();
    assert!(names.contains(&"10") && names.contains(&"01"));
}

#[test]
fn degenerate_levels_are_flagged_ambiguous() {
    let t = TransmonSpec::new(20.0, 91.0, 0.0).unwrap();
    let chain = ChainSpec::pair(t, t, 0.0).unwrap();
    let s = exact_spectrum(&build_chain_hamiltonian::<f64>(&chain, 4).unwrap(), 3).unwrap();
    let prods = uncoupled_product_states::<f64>(&chain.transmons, 4, 2).unwrap();
    let labels = label_computational_states(&s, &prods).unwrap();
    assert!(!labels[0].ambiguous);
    assert!(labels[1].ambiguous && labels[2].ambiguous);
    let mut pair_labels = vec![labels[1].label.clone(), labels[2].label.clone()];
    pair_labels.sort();
    assert_eq!(pair_labels, vec!["01", "10"]);
}

#[test]
fn level_labels_use_commas_above_nine() {
    assert_eq!(level_label(&[1, 2]), "12");
    assert_eq!(level_label(&[10, 2]), "10,2");
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(TransmonSpec::new(-1.0, 91.0, 0.0).is_err());
    assert!(TransmonSpec::new(20.0, 0.0, 0.0).is_err());
    let t = TransmonSpec::new(20.0, 91.0, 0.0).unwrap();
    assert!(build_single_hamiltonian::<f64>(&t, 6).is_err());
    assert!(build_single_hamiltonian::<f64>(&t, 1).is_err());
    assert!(ChainSpec::pair(t, t, -0.1).is_err());
    let other = TransmonSpec::new(20.0, 80.0, 0.0).unwrap();
    assert!(build_two_hamiltonian::<f64>(&t, &other, 0.5, 4).is_err());
    assert!(build_chain_hamiltonian::<f64>(&ChainSpec::new(vec![t; 4], vec![0.5; 3]).unwrap(), 64).is_err());
}

#[test]
fn f32_and_f64_spectra_agree() {
    let t = TransmonSpec::new(20.0, 91.0, 0.2).unwrap();
    let a = exact_spectrum(&build_single_hamiltonian::<f64>(&t, 16).unwrap(), 4).unwrap();
    let b = exact_spectrum(&build_single_hamiltonian::<f32>(&t, 16).unwrap(), 4).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - *y as f64).abs() < 1e-4 * x.abs().max(1.0));
    }
}
