use hecool::ansatz::{qaoa_ansatz, AnsatzSpec};
use hecool::hamiltonians::{maxcut_hamiltonian, random_complete_graph, FrozenState, ImpuritySpec};
use hecool::oracles::brute_force_maxcut;
use hecool::sim::Statevector;
use hecool::vqe::{
    approximation_ratio, energy_objective, prob_best_cut, run_dvqe, run_vqe, shot_estimate,
    EvalMode, HamiltonianSource, RunConfig,
};

fn maxcut(ansatz: AnsatzSpec, seed: u64, budget: usize, mode: EvalMode) -> RunConfig {
    let g = random_complete_graph(ansatz.n_problem, seed).unwrap();
    RunConfig {
        ansatz,
        source: HamiltonianSource::MaxCut(g),
        eval_mode: mode,
        budget,
        seed: 0,
    }
}

#[test]
fn he_maxcut_n5_reaches_best_cut() {
    let cfg = maxcut(AnsatzSpec::he_maxcut(5), 0, 150, EvalMode::Exact);
    let HamiltonianSource::MaxCut(g) = &cfg.source else { unreachable!() };
    let c_opt = brute_force_maxcut(g).unwrap().c_opt;
    let rec = run_vqe(&cfg).unwrap();
    assert!((rec.best_energy + c_opt).abs() < 0.02 * c_opt);
    assert!(rec.final_metric("alpha").unwrap() <= 1.0 + 1e-9);
}

#[test]
fn uniform_superposition_ratio_and_probability() {
    let g = random_complete_graph(5, 9).unwrap();
    let sol = brute_force_maxcut(&g).unwrap();
    assert_eq!(sol.optimal_indices().len(), 2, "generic weights give one partition");
    let c = qaoa_ansatz(&g, 1).unwrap();
    let h = maxcut_hamiltonian(&g);
    let mut obj = energy_objective(&c, &h, EvalMode::Exact).unwrap();
    let e = obj.evaluate(&[0.0, 0.0]).unwrap();
    let alpha = approximation_ratio(e, sol.c_opt).unwrap();
    assert!((alpha - g.total_weight() / 2.0 / sol.c_opt).abs() < 1e-12);
    let state = c.run(&[0.0, 0.0]).unwrap();
    assert!((prob_best_cut(&state, &sol, 5).unwrap() - 2.0 / 32.0).abs() < 1e-12);
}

#[test]
fn optimal_basis_state_has_unit_probability() {
    let g = random_complete_graph(4, 2).unwrap();
    let sol = brute_force_maxcut(&g).unwrap();
    let z = sol.optimal_indices()[0];
    // problem register plus two bath qubits in |1>
    let ones: Vec<usize> = (0..4).filter(|q| z >> q & 1 == 1).chain([4, 5]).collect();
    let s = Statevector::basis(6, &ones).unwrap();
    assert_eq!(prob_best_cut(&s, &sol, 4).unwrap(), 1.0);
    assert!(approximation_ratio(-1.0, 0.0).is_err());
}

#[test]
fn shot_estimates_track_exact_values() {
    let g = random_complete_graph(5, 4).unwrap();
    let h = maxcut_hamiltonian(&g);
    let c = qaoa_ansatz(&g, 2).unwrap();
    for (k, params) in [[0.3, 0.5, -0.2, 1.1], [1.0, -0.7, 0.4, 0.2]].iter().enumerate() {
        let s = c.run(params).unwrap();
        let exact = s.expectation(&h).unwrap();
        let est = shot_estimate(&s, &h, 20_000, k as u64).unwrap();
        assert!((est.value - exact).abs() < 5.0 * est.std_error);
    }
}

#[test]
fn shot_mode_run_is_deterministic() {
    let mode = EvalMode::Shots { count: 500, seed: 7 };
    let cfg = maxcut(AnsatzSpec::he_maxcut(4), 1, 40, mode);
    let a = run_vqe(&cfg).unwrap();
    let b = run_vqe(&cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    assert!(a.final_metric("alpha").unwrap() <= 1.0 + 1e-9);
}

#[test]
fn dvqe_respects_variational_bound() {
    for (d, frozen, field) in [(0, FrozenState::Zero, 4.0), (1, FrozenState::One, 1.0)] {
        let imp = ImpuritySpec::new(d, frozen);
        let cfg = RunConfig {
            ansatz: AnsatzSpec::he_dvqe(4, imp, 2),
            source: HamiltonianSource::Chain {
                n: 4,
                coupling: 1.0,
                field,
                impurity: Some(imp),
            },
            eval_mode: EvalMode::Exact,
            budget: 200,
            seed: 0,
        };
        let res = run_dvqe(&cfg).unwrap();
        assert!(res.energy >= res.reference - 1e-9);
        assert!(res.reference >= res.unconstrained - 1e-9);
        assert!((-1.0..=1.0).contains(&res.magnetization));
        assert_eq!(res.record.series["error_rel"].len(), res.record.trace.len());
    }
}
