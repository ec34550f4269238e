//! Hamiltonian builders cross-checked against the classical oracles.

use hecool::hamiltonians::{
    constrained_impurity_hamiltonian, heisenberg_hamiltonian, magnetization_observable,
    maxcut_hamiltonian, random_complete_graph, FrozenState, ImpuritySpec,
};
use hecool::oracles::{
    brute_force_maxcut, dense_matrix, exact_ground, excited_population, lindblad_evolve,
    min_eigenvalue, pure_density, verify_decay, LindbladSpec,
};
use hecool::pauli::{Pauli, PauliSum};
use hecool::sim::Statevector;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn maxcut_ground_energy_is_minus_best_cut() {
    for k in 0..20u64 {
        let n = 4 + (k as usize % 7);
        let g = random_complete_graph(n, 100 + k).unwrap();
        let h = maxcut_hamiltonian(&g);
        let sol = brute_force_maxcut(&g).unwrap();
        let e0 = exact_ground(&h).unwrap().energy;
        assert!((e0 + sol.c_opt).abs() < 1e-9, "n={n}");
        if n <= 6 {
            for z in 0..1usize << n {
                let s = Statevector::basis(n, &(0..n).filter(|q| z >> q & 1 == 1).collect::<Vec<_>>())
                    .unwrap();
                assert!((s.expectation(&h).unwrap() + g.cut_value_index(z)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn dense_n10_maxcut_agrees_with_brute_force() {
    // the diagonal fast path is bypassed by adding a zero-weight X term
    let g = random_complete_graph(10, 3).unwrap();
    let mut h = maxcut_hamiltonian(&g);
    h.add_term(0.0, &[(0, Pauli::X)]).unwrap();
    assert!(!h.is_diagonal());
    let e0 = exact_ground(&h).unwrap().energy;
    assert!((e0 + brute_force_maxcut(&g).unwrap().c_opt).abs() < 1e-9);
}

/// Ground energy of the full chain restricted to states with the impurity
/// fixed, built by slicing the dense matrix.
fn projected_ground(n: usize, field: f64, imp: ImpuritySpec) -> f64 {
    let full = dense_matrix(&heisenberg_hamiltonian(n, 1.0, field).unwrap()).unwrap();
    let bit = match imp.frozen {
        FrozenState::Zero => 0,
        FrozenState::One => 1,
    };
    let keep: Vec<usize> = (0..1usize << n).filter(|i| (i >> imp.site) & 1 == bit).collect();
    let sub = DMatrix::from_fn(keep.len(), keep.len(), |r, col| full[(keep[r], keep[col])]);
    sub.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn constrained_hamiltonian_matches_projected_chain() {
    for n in 4..=6 {
        for d in 0..3 {
            for frozen in [FrozenState::Zero, FrozenState::One] {
                for field in [0.0, 1.5, 4.0] {
                    let imp = ImpuritySpec::new(d, frozen);
                    let h = constrained_impurity_hamiltonian(n, 1.0, field, imp).unwrap();
                    let e = exact_ground(&h).unwrap().energy;
                    let want = projected_ground(n, field, imp);
                    assert!((e - want).abs() < 1e-9, "n={n} d={d} {frozen:?} h={field}");
                }
            }
        }
    }
}

#[test]
fn heisenberg_regressions() {
    let e = exact_ground(&heisenberg_hamiltonian(6, 1.0, 0.0).unwrap()).unwrap().energy;
    assert!((e - -9.974308535551689).abs() < 1e-9);

    // the h = 2 ground state is non-degenerate with total Sz = -1
    let h = heisenberg_hamiltonian(6, 1.0, 2.0).unwrap();
    let g = exact_ground(&h).unwrap();
    assert!((g.energy - -12.007981427594125).abs() < 1e-9);
    let s = Statevector::from_amplitudes(6, g.vector).unwrap();
    let m = s.expectation(&magnetization_observable(6).unwrap()).unwrap();
    assert!((m - -1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn constrained_reference_curve() {
    // n = 6, impurity at the edge frozen in |0>, h = 0..4
    let want = [
        -8.370211381484568,
        -8.370211381484568,
        -8.370211381484566,
        -10.182605615520158,
        -13.0,
    ];
    for (field, w) in want.iter().enumerate() {
        let imp = ImpuritySpec::new(0, FrozenState::Zero);
        let h = constrained_impurity_hamiltonian(6, 1.0, field as f64, imp).unwrap();
        assert!((exact_ground(&h).unwrap().energy - w).abs() < 1e-9, "h={field}");
    }
}

#[test]
fn eigenpair_residuals() {
    let cases = [
        heisenberg_hamiltonian(5, 1.0, 0.7).unwrap(),
        constrained_impurity_hamiltonian(6, 1.0, 2.0, ImpuritySpec::new(1, FrozenState::One)).unwrap(),
        {
            let mut h = PauliSum::new(3);
            h.add_term(0.4, &[(0, Pauli::Y), (2, Pauli::X)]).unwrap();
            h.add_term(-0.9, &[(1, Pauli::Y)]).unwrap();
            h.add_term(0.3, &[(0, Pauli::Z)]).unwrap();
            h
        },
    ];
    for h in cases {
        let g = exact_ground(&h).unwrap();
        let m = dense_matrix(&h).unwrap();
        let v = DVector::from_vec(g.vector.clone());
        assert!((v.norm() - 1.0).abs() < 1e-10);
        let residual = (&m * &v - &v * c(g.energy)).norm();
        assert!(residual < 1e-8, "{residual}");
    }
}

#[test]
fn zero_rate_fits_to_zero() {
    let spec = LindbladSpec {
        hamiltonian: PauliSum::new(1),
        jump_site: 0,
        gamma: 0.0,
        rho0: pure_density(&[c(0.6), c(0.8)]),
    };
    let traj = lindblad_evolve(&spec, 1e-2, 1.0).unwrap();
    let rates = verify_decay(&traj, 0).unwrap();
    assert!(rates.population.abs() < 1e-6 && rates.coherence.abs() < 1e-6);
}

#[test]
fn weak_coupling_two_site_decay() {
    // the jump site is strongly detuned so exchange with its neighbour is
    // off resonant and the local decay rate dominates
    let gamma = 0.01;
    let mut h = PauliSum::new(2);
    for p in [Pauli::X, Pauli::Y, Pauli::Z] {
        h.add_term(0.1, &[(0, p), (1, p)]).unwrap();
    }
    h.add_term(5.0, &[(0, Pauli::Z)]).unwrap();
    // |1> on the jump site, |0> on the neighbour: index 0b01
    let mut amps = vec![c(0.0); 4];
    amps[0b01] = c(1.0);
    let spec = LindbladSpec {
        hamiltonian: h,
        jump_site: 0,
        gamma,
        rho0: pure_density(&amps),
    };
    let dt = 0.01 / spec.hamiltonian.coefficient_norm();
    let traj = lindblad_evolve(&spec, dt, 20.0).unwrap();
    let times: Vec<f64> = traj.samples.iter().map(|(t, _)| *t).collect();
    let pops: Vec<f64> = traj.samples.iter().map(|(_, r)| excited_population(r, 0)).collect();
    let logs: Vec<f64> = pops.iter().map(|p| p.ln()).collect();
    let n = times.len() as f64;
    let (tm, lm) = (times.iter().sum::<f64>() / n, logs.iter().sum::<f64>() / n);
    let sxy: f64 = times.iter().zip(&logs).map(|(t, l)| (t - tm) * (l - lm)).sum();
    let sxx: f64 = times.iter().map(|t| (t - tm).powi(2)).sum();
    let rate = -sxy / sxx;
    assert!((rate - 2.0 * gamma).abs() < 0.1 * 2.0 * gamma, "rate {rate}");
    for (_, rho) in traj.samples.iter().step_by(200) {
        assert!((rho.trace().re - 1.0).abs() < 1e-9);
        assert!(min_eigenvalue(rho) > -1e-7);
    }
}
