//! Independent classical references used to validate the variational stack.

mod diag;
mod lindblad;
mod maxcut;

use std::fmt::Write as _;

pub use diag::{dense_matrix, exact_ground, GroundState, MAX_DENSE_QUBITS};
pub use lindblad::{
    coherence_magnitude, excited_population, lindblad_evolve, lowering_operator, min_eigenvalue,
    pure_density, verify_decay, DecayRates, LindbladSpec, Trajectory,
};
pub use maxcut::{brute_force_maxcut, MaxCutSolution, MAX_BRUTE_FORCE_NODES};

use crate::error::{Error, Result};

/// One row of the ground-energy fixture file.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundFixture {
    pub case_id: String,
    pub e0: f64,
}

/// One row of the MaxCut fixture file.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutFixture {
    pub graph_id: String,
    pub c_opt: f64,
    pub assignments: Vec<String>,
}

pub fn ground_fixtures_csv(rows: &[GroundFixture]) -> String {
    let mut out = String::from("case_id,E0\n");
    for r in rows {
        writeln!(out, "{},{}", r.case_id, r.e0).unwrap();
    }
    out
}

/// Assignments are joined with `;` inside the third column.
pub fn maxcut_fixtures_csv(rows: &[MaxCutFixture]) -> String {
    let mut out = String::from("graph_id,C_opt,assignments\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.graph_id, r.c_opt, r.assignments.join(";")).unwrap();
    }
    out
}

fn data_rows<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => Ok(lines.filter(|(_, l)| !l.trim().is_empty())),
        _ => Err(Error::Parse {
            line: 1,
            msg: format!("expected header {header:?}"),
        }),
    }
}

pub fn parse_ground_fixtures(text: &str) -> Result<Vec<GroundFixture>> {
    data_rows(text, "case_id,E0")?
        .map(|(i, line)| {
            let (id, e0) = line.split_once(',').ok_or(Error::Parse {
                line: i + 1,
                msg: "expected two columns".into(),
            })?;
            Ok(GroundFixture {
                case_id: id.to_string(),
                e0: e0.trim().parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("bad energy {e0:?}"),
                })?,
            })
        })
        .collect()
}

pub fn parse_maxcut_fixtures(text: &str) -> Result<Vec<MaxCutFixture>> {
    data_rows(text, "graph_id,C_opt,assignments")?
        .map(|(i, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "expected three columns".into(),
                });
            }
            Ok(MaxCutFixture {
                graph_id: cols[0].to_string(),
                c_opt: cols[1].parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("bad C_opt {:?}", cols[1]),
                })?,
                assignments: cols[2].split(';').map(str::to_string).collect(),
            })
        })
        .collect()
}
