//! The three subcommands: cell planning, per-cell work and summaries.

use std::fmt::Write as _;
use std::io;

use hecool::ansatz::AnsatzSpec;
use hecool::hamiltonians::{
    constrained_impurity_hamiltonian, random_complete_graph, FrozenState, ImpuritySpec,
};
use hecool::oracles::{
    brute_force_maxcut, exact_ground, ground_fixtures_csv, maxcut_fixtures_csv, GroundFixture,
    MaxCutFixture,
};
use hecool::vqe::{run_dvqe, run_vqe, HamiltonianSource, RunConfig};

use crate::config::{AnsatzChoice, ChainGrid, ConfigError, FixtureSet, HeisenbergSweep, MaxcutSweep};
use crate::sweep::{write_atomic, Cell, CellSummary, Settled, Sweep};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const GROUND_FIXTURES_FILE: &str = "ground_fixtures.csv";
pub const MAXCUT_FIXTURES_FILE: &str = "maxcut_fixtures.csv";

pub const MAXCUT_SUMMARY_HEADER: &str = "ansatz,n,seed,budget,alpha,p_best";
pub const HEISENBERG_SUMMARY_HEADER: &str =
    "d,h,frozen,seed,energy,reference,error_rel,error_abs,magnetization";

#[derive(Debug)]
pub enum CommandError {
    /// Rejected before any cell ran.
    Config(ConfigError),
    /// Results could not be written.
    Output(io::Error),
}

impl From<ConfigError> for CommandError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

/// Cells that settled, and how many of them failed or were reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Report {
    pub cells: usize,
    pub reused: usize,
    pub failed: usize,
}

fn report(settled: &[Settled]) -> Report {
    Report {
        cells: settled.len(),
        reused: settled.iter().filter(|s| s.reused).count(),
        failed: settled.iter().filter(|s| s.result.is_err()).count(),
    }
}

fn frozen_bit(f: FrozenState) -> u8 {
    match f {
        FrozenState::Zero => 0,
        FrozenState::One => 1,
    }
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// Builds every run config up front so invalid sweeps fail before any work.
fn checked<T>(plan: Vec<(Cell, RunConfig, T)>) -> Result<Vec<(Cell, RunConfig, T)>, ConfigError> {
    for (cell, cfg, _) in &plan {
        cfg.validate()
            .map_err(|e| ConfigError(format!("cell {}: {e}", cell.key)))?;
    }
    Ok(plan)
}

struct MaxcutCell {
    ansatz: String,
    n: usize,
    seed: u64,
}

fn plan_maxcut(s: &MaxcutSweep) -> Result<Vec<(Cell, RunConfig, MaxcutCell)>, ConfigError> {
    let mut plan = Vec::new();
    for &n in &s.n {
        for &seed in &s.seeds {
            let graph = random_complete_graph(n, seed).map_err(|e| ConfigError(e.to_string()))?;
            for &choice in &s.ansatze {
                let ansatz = match choice {
                    AnsatzChoice::He => AnsatzSpec::he_maxcut(n),
                    AnsatzChoice::Qaoa(p) => AnsatzSpec::qaoa(graph.clone(), p),
                    AnsatzChoice::Hea => AnsatzSpec::hardware_efficient(n, s.reps),
                };
                let label = ansatz.label();
                let cell = Cell {
                    key: format!("maxcut_n{n}_s{seed}_{label}"),
                    canonical: format!(
                        "maxcut;n={n};graph_seed={seed};ansatz={label};budget={};eval={};seed={}",
                        s.budget,
                        s.eval.label(),
                        s.seed
                    ),
                };
                let cfg = RunConfig {
                    ansatz,
                    source: HamiltonianSource::MaxCut(graph.clone()),
                    eval_mode: s.eval.mode(s.seed),
                    budget: s.budget,
                    seed: s.seed,
                };
                plan.push((cell, cfg, MaxcutCell { ansatz: label, n, seed }));
            }
        }
    }
    checked(plan)
}

pub fn cmd_maxcut(s: &MaxcutSweep, sweep: &Sweep) -> Result<Report, CommandError> {
    let plan = plan_maxcut(s)?;
    let (cells, rest): (Vec<Cell>, Vec<(RunConfig, MaxcutCell)>) =
        plan.into_iter().map(|(c, cfg, m)| (c, (cfg, m))).unzip();
    let settled = sweep
        .run(cells, |i, cell| {
            let rec = run_vqe(&rest[i].0).map_err(|e| e.to_string())?;
            let mut summary = CellSummary::new(cell, rec.best_energy);
            summary.alpha = rec.final_metric("alpha");
            summary.p_best = rec.final_metric("p_best");
            Ok((rec.to_csv(), summary))
        })
        .map_err(io_error)?;

    let mut text = format!("{MAXCUT_SUMMARY_HEADER}\n");
    for (st, (_, m)) in settled.iter().zip(&rest) {
        if let Ok(r) = &st.result {
            writeln!(text, "{},{},{},{},{},{}", m.ansatz, m.n, m.seed, s.budget, num(r.alpha), num(r.p_best)).unwrap();
        }
    }
    write_atomic(&sweep.out.join(SUMMARY_FILE), &text).map_err(io_error)?;
    Ok(report(&settled))
}

struct ChainCell {
    d: usize,
    h: f64,
    frozen: FrozenState,
    seed: u64,
}

fn plan_heisenberg(s: &HeisenbergSweep) -> Result<Vec<(Cell, RunConfig, ChainCell)>, ConfigError> {
    let ChainGrid { n, coupling, .. } = s.grid;
    let mut plan = Vec::new();
    for &d in &s.grid.d {
        for &h in &s.grid.h {
            for &frozen in &s.grid.frozen {
                for &seed in &s.seeds {
                    let f = frozen_bit(frozen);
                    let imp = ImpuritySpec::new(d, frozen);
                    let cell = Cell {
                        key: format!("heis_n{n}_d{d}_h{h}_f{f}_s{seed}"),
                        canonical: format!(
                            "heisenberg;n={n};coupling={coupling};h={h};d={d};frozen={f};reps={};budget={};eval={};seed={seed}",
                            s.reps,
                            s.budget,
                            s.eval.label()
                        ),
                    };
                    let cfg = RunConfig {
                        ansatz: AnsatzSpec::he_dvqe(n, imp, s.reps),
                        source: HamiltonianSource::Chain {
                            n,
                            coupling,
                            field: h,
                            impurity: Some(imp),
                        },
                        eval_mode: s.eval.mode(seed),
                        budget: s.budget,
                        seed,
                    };
                    plan.push((cell, cfg, ChainCell { d, h, frozen, seed }));
                }
            }
        }
    }
    checked(plan)
}

pub fn cmd_heisenberg(s: &HeisenbergSweep, sweep: &Sweep) -> Result<Report, CommandError> {
    let plan = plan_heisenberg(s)?;
    let cells: Vec<Cell> = plan.iter().map(|(c, _, _)| c.clone()).collect();
    let settled = sweep
        .run(cells, |i, cell| {
            let res = run_dvqe(&plan[i].1).map_err(|e| e.to_string())?;
            let mut summary = CellSummary::new(cell, res.record.best_energy);
            summary.energy = Some(res.energy);
            summary.reference = Some(res.reference);
            summary.error_rel = Some(res.error_rel);
            summary.error_abs = Some(res.error_abs);
            summary.magnetization = Some(res.magnetization);
            Ok((res.record.to_csv(), summary))
        })
        .map_err(io_error)?;

    let mut text = format!("{HEISENBERG_SUMMARY_HEADER}\n");
    for (st, (_, _, c)) in settled.iter().zip(&plan) {
        if let Ok(r) = &st.result {
            writeln!(
                text,
                "{},{},{},{},{},{},{},{},{}",
                c.d,
                c.h,
                frozen_bit(c.frozen),
                c.seed,
                num(r.energy),
                num(r.reference),
                num(r.error_rel),
                num(r.error_abs),
                num(r.magnetization)
            )
            .unwrap();
        }
    }
    write_atomic(&sweep.out.join(SUMMARY_FILE), &text).map_err(io_error)?;
    Ok(report(&settled))
}

/// Writes the ground-energy fixtures for the constrained chain grid and the
/// MaxCut fixtures for each (graph size, seed).
pub fn cmd_oracle_fixtures(f: &FixtureSet, out: &std::path::Path) -> Result<Report, CommandError> {
    let g = &f.grid;
    let mut ground = Vec::new();
    for &d in &g.d {
        for &h in &g.h {
            for &frozen in &g.frozen {
                let imp = ImpuritySpec::new(d, frozen);
                let e0 = constrained_impurity_hamiltonian(g.n, g.coupling, h, imp)
                    .and_then(|ham| exact_ground(&ham))
                    .map_err(|e| ConfigError(e.to_string()))?
                    .energy;
                ground.push(GroundFixture {
                    case_id: format!("n{}_d{d}_h{h}_f{}", g.n, frozen_bit(frozen)),
                    e0,
                });
            }
        }
    }
    let mut cuts = Vec::new();
    for &n in &f.graph_n {
        for &seed in &f.seeds {
            let sol = random_complete_graph(n, seed)
                .and_then(|graph| brute_force_maxcut(&graph))
                .map_err(|e| ConfigError(e.to_string()))?;
            cuts.push(MaxCutFixture {
                graph_id: format!("n{n}_s{seed}"),
                c_opt: sol.c_opt,
                assignments: sol.assignments,
            });
        }
    }
    write_atomic(&out.join(GROUND_FIXTURES_FILE), &ground_fixtures_csv(&ground)).map_err(io_error)?;
    write_atomic(&out.join(MAXCUT_FIXTURES_FILE), &maxcut_fixtures_csv(&cuts)).map_err(io_error)?;
    Ok(Report {
        cells: ground.len() + cuts.len(),
        reused: 0,
        failed: 0,
    })
}

fn io_error(e: io::Error) -> CommandError {
    CommandError::Output(e)
}
