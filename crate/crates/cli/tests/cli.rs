use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hecool::hamiltonians::{
    constrained_impurity_hamiltonian, random_complete_graph, FrozenState, ImpuritySpec,
};
use hecool::oracles::{brute_force_maxcut, exact_ground, parse_ground_fixtures, parse_maxcut_fixtures};

fn hecool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecool"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("exp.cfg");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn run_files(out: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(out.join("runs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

const SMALL_MAXCUT: &str = "n = 4\nseeds = [0, 1]\nansatze = [he, qaoa_p1]\nbudget = 30\n";

#[test]
fn maxcut_sweep_writes_runs_and_summary_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), SMALL_MAXCUT);
    let args = ["maxcut", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "2"];

    let first = hecool(&args);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let runs = run_files(&out);
    let names: Vec<&str> = runs.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "maxcut_n4_s0_he.csv",
            "maxcut_n4_s0_qaoa_p1.csv",
            "maxcut_n4_s1_he.csv",
            "maxcut_n4_s1_qaoa_p1.csv"
        ]
    );
    assert!(runs.iter().all(|(_, b)| b.starts_with(b"eval_index,energy,best_so_far,alpha,p_best,param_0")));

    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "ansatz,n,seed,budget,alpha,p_best");
    assert_eq!(lines.len(), 5);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[1..4].join(","), format!("4,{},30", cols[2]));
        let alpha: f64 = cols[4].parse().unwrap();
        let p: f64 = cols[5].parse().unwrap();
        assert!(alpha > 0.0 && alpha <= 1.0 + 1e-9 && (0.0..=1.0 + 1e-9).contains(&p));
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("runs/maxcut_n4_s0_he.json")).unwrap()).unwrap();
    for key in ["config_hash", "best_energy", "alpha", "p_best", "wall_time_s"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }

    // checkpointed rerun, then a forced one: identical bytes either way
    let second = hecool(&args);
    assert_eq!(code(&second), 0);
    assert!(stderr(&second).contains("4 reused"), "{}", stderr(&second));
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap(), summary);
    let mut forced = args.to_vec();
    forced.push("--force");
    let third = hecool(&forced);
    assert!(stderr(&third).contains("0 reused"));
    assert_eq!(run_files(&out), runs);
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap(), summary);
}

#[test]
fn failed_cell_is_listed_and_others_are_kept() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    // a directory where the run CSV should go makes that one cell fail
    fs::create_dir_all(out.join("runs/maxcut_n4_s1_he.csv")).unwrap();
    let cfg = write_config(dir.path(), SMALL_MAXCUT);
    let args = ["maxcut", "--config", &cfg, "--out", out.to_str().unwrap()];

    let o = hecool(&args);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let manifest = fs::read_to_string(out.join("failures.csv")).unwrap();
    assert!(manifest.starts_with("cell,error\nmaxcut_n4_s1_he,"), "{manifest}");
    assert_eq!(manifest.lines().count(), 2);
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap().lines().count(), 4);

    fs::remove_dir(out.join("runs/maxcut_n4_s1_he.csv")).unwrap();
    let o = hecool(&args);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("3 reused"));
    assert!(!out.join("failures.csv").exists());
    assert_eq!(fs::read_to_string(out.join("summary.csv")).unwrap().lines().count(), 5);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let cases: [(&str, &[&str]); 6] = [
        ("maxcut", &["--seeds", "[]"]),
        ("maxcut", &["--budget", "3"]),
        ("maxcut", &["--h", "[1]"]),
        ("heisenberg", &["--n", "13"]),
        ("oracle-fixtures", &["--seed", "4"]),
        ("maxcut", &["--workers", "0"]),
    ];
    for (cmd, extra) in cases {
        let mut args = vec![cmd, "--out", out];
        args.extend_from_slice(extra);
        let o = hecool(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("config error"));
    }
    let cfg = write_config(dir.path(), "seeds = [0]\nbogus = 1\n");
    assert_eq!(code(&hecool(&["maxcut", "--config", &cfg, "--out", out])), 2);
    assert_eq!(code(&hecool(&["maxcut", "--seeds", "[0]"])), 2, "no output directory");
    assert_eq!(code(&hecool(&["maxcut", "--config", "/nonexistent.cfg", "--out", out])), 2);
}

#[test]
fn heisenberg_single_cell_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(dir.path(), "n = 4\nd = [0]\nh = [4]\nfrozen = [0]\nbudget = 200\n");
    let o = hecool(&["heisenberg", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "d,h,frozen,seed,energy,reference,error_rel,error_abs,magnetization");
    assert_eq!(lines.len(), 2);
    let cols: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&cols[..4], ["0", "4", "0", "3"]);
    let reference: f64 = cols[5].parse().unwrap();
    let h = constrained_impurity_hamiltonian(4, 1.0, 4.0, ImpuritySpec::new(0, FrozenState::Zero)).unwrap();
    assert_eq!(reference, exact_ground(&h).unwrap().energy);
    let energy: f64 = cols[4].parse().unwrap();
    let error_rel: f64 = cols[6].parse().unwrap();
    assert_eq!(error_rel, (energy - reference).abs() / reference.abs());
    assert!(error_rel < 0.01, "{error_rel}");
    assert!(out.join("runs/heis_n4_d0_h4_f0_s3.csv").exists());
}

#[test]
fn oracle_fixtures_match_the_oracles_and_rerun_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let args = ["oracle-fixtures", "--out", out.to_str().unwrap()];
    assert_eq!(code(&hecool(&args)), 0);
    let ground_text = fs::read_to_string(out.join("ground_fixtures.csv")).unwrap();
    let cuts_text = fs::read_to_string(out.join("maxcut_fixtures.csv")).unwrap();

    let ground = parse_ground_fixtures(&ground_text).unwrap();
    assert_eq!(ground.len(), 30);
    let edge = ground.iter().find(|g| g.case_id == "n6_d0_h4_f0").unwrap();
    assert_eq!(edge.e0, -13.0);
    let h = constrained_impurity_hamiltonian(6, 1.0, 2.0, ImpuritySpec::new(1, FrozenState::One)).unwrap();
    let row = ground.iter().find(|g| g.case_id == "n6_d1_h2_f1").unwrap();
    assert_eq!(row.e0, exact_ground(&h).unwrap().energy);

    let cuts = parse_maxcut_fixtures(&cuts_text).unwrap();
    assert_eq!(cuts.len(), 10);
    for (seed, row) in cuts.iter().enumerate() {
        assert_eq!(row.graph_id, format!("n5_s{seed}"));
        let sol = brute_force_maxcut(&random_complete_graph(5, seed as u64).unwrap()).unwrap();
        assert_eq!(row.c_opt, sol.c_opt);
        assert_eq!(row.assignments, sol.assignments);
    }

    assert_eq!(code(&hecool(&args)), 0);
    assert_eq!(fs::read_to_string(out.join("ground_fixtures.csv")).unwrap(), ground_text);
    assert_eq!(fs::read_to_string(out.join("maxcut_fixtures.csv")).unwrap(), cuts_text);
}
