//! File formats: graph/state JSON, DOT export, verdict reports, census CSV.
//!
//! JSON field order is fixed by the struct definitions here, so writing the
//! same value twice produces identical bytes. Complex numbers serialize as
//! `[re, im]` pairs; edges as `[i, j]` pairs; block doubles as `[i, j, w]`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::analyzer::{PairVerdict, StateInput, Tolerances};
use crate::error::{Error, Result};
use crate::feasibility::{CensusReport, Verdict};
use crate::graph::EntangledGraph;
use crate::linalg::{C64, DensityOperator, PureState};
use crate::search::SearchResult;
use crate::synthesis::ExcitationBlockState;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub entangled: Vec<(usize, usize)>,
    pub classical: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureJson {
    pub n: usize,
    pub amplitudes: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseJson {
    pub n: usize,
    pub rows: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub n: usize,
    pub vacuum: f64,
    pub single_block: Vec<Vec<f64>>,
    pub doubles: Vec<(usize, usize, f64)>,
}

/// Any accepted state payload; variants are told apart by their required
/// fields (`vacuum`/`single_block`, `amplitudes`, `rows`).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Block(BlockJson),
    Pure(PureJson),
    Dense(DenseJson),
}

impl From<&EntangledGraph> for GraphJson {
    fn from(g: &EntangledGraph) -> Self {
        GraphJson {
            n: g.n(),
            entangled: g.entangled_edges().collect(),
            classical: g.classical_edges().collect(),
        }
    }
}

impl GraphJson {
    pub fn into_graph(self) -> Result<EntangledGraph> {
        EntangledGraph::new(self.n, self.entangled, self.classical)
    }
}

impl From<&PureState> for PureJson {
    fn from(state: &PureState) -> Self {
        let sorted = state.sorted_qubits();
        PureJson {
            n: sorted.num_qubits(),
            amplitudes: sorted.amplitudes().iter().map(|a| (a.re, a.im)).collect(),
        }
    }
}

impl PureJson {
    pub fn into_state(self) -> Result<PureState> {
        let amps: Vec<C64> = self
            .amplitudes
            .iter()
            .map(|&(re, im)| C64::new(re, im))
            .collect();
        PureState::new((0..self.n).collect(), DVector::from_column_slice(&amps))
    }
}

impl From<&DensityOperator> for DenseJson {
    fn from(rho: &DensityOperator) -> Self {
        let m = rho.matrix();
        let rows = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| (m[(r, c)].re, m[(r, c)].im)).collect())
            .collect();
        DenseJson { n: rho.num_qubits(), rows }
    }
}

impl DenseJson {
    pub fn into_density(self) -> Result<DensityOperator> {
        let dim = 1usize << self.n;
        if self.rows.len() != dim || self.rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Malformed(format!(
                "density matrix must be {dim}x{dim} for n={}",
                self.n
            )));
        }
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (r, row) in self.rows.iter().enumerate() {
            for (c, &(re, im)) in row.iter().enumerate() {
                m[(r, c)] = C64::new(re, im);
            }
        }
        DensityOperator::new((0..self.n).collect(), m)
    }
}

impl From<&ExcitationBlockState> for BlockJson {
    fn from(s: &ExcitationBlockState) -> Self {
        let sb = s.single_block();
        let n = s.n();
        let single_block = (0..n)
            .map(|r| (0..n).map(|c| sb[(r, c)]).collect())
            .collect();
        let doubles = s.doubles().iter().map(|(&(i, j), &w)| (i, j, w)).collect();
        BlockJson { n, vacuum: s.vacuum(), single_block, doubles }
    }
}

impl BlockJson {
    pub fn into_block(self) -> Result<ExcitationBlockState> {
        let n = self.n;
        if self.single_block.len() != n || self.single_block.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed(format!(
                "single_block must be {n}x{n}"
            )));
        }
        let mut sb = DMatrix::<f64>::zeros(n, n);
        for (r, row) in self.single_block.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                sb[(r, c)] = v;
            }
        }
        let doubles = self
            .doubles
            .into_iter()
            .map(|(i, j, w)| ((i, j), w))
            .collect();
        ExcitationBlockState::new(n, self.vacuum, sb, doubles)
    }
}

impl StateJson {
    pub fn into_input(self) -> Result<StateInput> {
        Ok(match self {
            StateJson::Block(b) => StateInput::Block(b.into_block()?),
            StateJson::Pure(p) => StateInput::Pure(p.into_state()?),
            StateJson::Dense(d) => StateInput::Dense(d.into_density()?),
        })
    }
}

fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn graph_to_string(g: &EntangledGraph) -> Result<String> {
    to_pretty(&GraphJson::from(g))
}

pub fn graph_from_str(s: &str) -> Result<EntangledGraph> {
    serde_json::from_str::<GraphJson>(s)?.into_graph()
}

pub fn read_graph(path: &Path) -> Result<EntangledGraph> {
    graph_from_str(&fs::read_to_string(path)?)
}

pub fn write_graph(path: &Path, g: &EntangledGraph) -> Result<()> {
    Ok(fs::write(path, graph_to_string(g)?)?)
}

pub fn pure_to_string(state: &PureState) -> Result<String> {
    to_pretty(&PureJson::from(state))
}

pub fn write_pure(path: &Path, state: &PureState) -> Result<()> {
    Ok(fs::write(path, pure_to_string(state)?)?)
}

pub fn density_to_string(rho: &DensityOperator) -> Result<String> {
    to_pretty(&DenseJson::from(rho))
}

pub fn write_density(path: &Path, rho: &DensityOperator) -> Result<()> {
    Ok(fs::write(path, density_to_string(rho)?)?)
}

pub fn block_to_string(state: &ExcitationBlockState) -> Result<String> {
    to_pretty(&BlockJson::from(state))
}

pub fn write_block(path: &Path, state: &ExcitationBlockState) -> Result<()> {
    Ok(fs::write(path, block_to_string(state)?)?)
}

pub fn state_from_str(s: &str) -> Result<StateInput> {
    serde_json::from_str::<StateJson>(s)
        .map_err(|e| Error::Malformed(format!("unrecognized state JSON: {e}")))?
        .into_input()
}

pub fn read_state(path: &Path) -> Result<StateInput> {
    state_from_str(&fs::read_to_string(path)?)
}

/// DOT rendering: solid edges for entangled pairs, dashed for classical.
pub fn graph_to_dot(g: &EntangledGraph) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for v in 0..g.n() {
        out.push_str(&format!("  {v};\n"));
    }
    for (i, j) in g.entangled_edges() {
        out.push_str(&format!("  {i} -- {j} [style=solid];\n"));
    }
    for (i, j) in g.classical_edges() {
        out.push_str(&format!("  {i} -- {j} [style=dashed];\n"));
    }
    out.push_str("}\n");
    out
}

pub fn write_dot(path: &Path, g: &EntangledGraph) -> Result<()> {
    Ok(fs::write(path, graph_to_dot(g))?)
}

/// Pair-by-pair classification report, with the thresholds that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ReportJson {
    pub n: usize,
    pub tolerances: Tolerances,
    pub pairs: Vec<PairVerdict>,
}

pub fn report_to_string(n: usize, tol: &Tolerances, pairs: &[PairVerdict]) -> Result<String> {
    to_pretty(&ReportJson { n, tolerances: *tol, pairs: pairs.to_vec() })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentJson {
    pub vertices: Vec<usize>,
    pub status: String,
    pub rule: String,
    pub note: Option<String>,
    pub witness: Option<PureJson>,
}

/// Feasibility verdict, with any witnesses inlined as state JSON.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictJson {
    pub status: String,
    pub reason: String,
    pub witness: Option<PureJson>,
    pub components: Vec<ComponentJson>,
}

impl From<&Verdict> for VerdictJson {
    fn from(v: &Verdict) -> Self {
        VerdictJson {
            status: v.status.to_string(),
            reason: v.reason.clone(),
            witness: v.witness.as_ref().map(PureJson::from),
            components: v
                .components
                .iter()
                .map(|c| ComponentJson {
                    vertices: c.vertices.clone(),
                    status: c.status.to_string(),
                    rule: c.rule.to_string(),
                    note: c.note.clone(),
                    witness: c.witness.as_ref().map(PureJson::from),
                })
                .collect(),
        }
    }
}

pub fn verdict_to_string(v: &Verdict) -> Result<String> {
    to_pretty(&VerdictJson::from(v))
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResultJson {
    pub found: bool,
    pub best_objective: f64,
    pub evals: u64,
    pub witness: Option<PureJson>,
    pub per_restart_trace: Vec<(u64, f64)>,
}

impl From<&SearchResult> for SearchResultJson {
    fn from(r: &SearchResult) -> Self {
        SearchResultJson {
            found: r.found,
            best_objective: r.best_objective,
            evals: r.evals,
            witness: r.witness.as_ref().map(PureJson::from),
            per_restart_trace: r.per_restart_trace.clone(),
        }
    }
}

pub fn search_result_to_string(r: &SearchResult) -> Result<String> {
    to_pretty(&SearchResultJson::from(r))
}

/// Census CSV: one row per isomorphism class. The witness column holds a
/// file path when witnesses are archived, else is empty.
pub fn census_to_csv(report: &CensusReport, witness_paths: &[Option<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "count", "status", "rule", "witness"])
        .map_err(|e| Error::Malformed(e.to_string()))?;
    for (row, path) in report.rows.iter().zip(
        witness_paths
            .iter()
            .chain(std::iter::repeat(&None)),
    ) {
        w.write_record([
            row.label.as_str(),
            &row.count.to_string(),
            row.status.as_str(),
            &row.rule,
            path.as_deref().unwrap_or(""),
        ])
        .map_err(|e| Error::Malformed(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| Error::Malformed(e.to_string()))?)
        .map_err(|e| Error::Malformed(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::bell_phi_plus;
    use crate::synthesis::{build_mixed, three_qubit_catalog};

    #[test]
    fn graph_json_round_trip() {
        let g = EntangledGraph::new(4, vec![(2, 3), (0, 1)], vec![(1, 3)]).unwrap();
        let s = graph_to_string(&g).unwrap();
        let back = graph_from_str(&s).unwrap();
        assert_eq!(back, g);
        // canonical bytes: rewriting gives the identical string
        assert_eq!(graph_to_string(&back).unwrap(), s);
        assert!(s.contains("\"entangled\""));
    }

    #[test]
    fn pure_json_round_trip() {
        let w = three_qubit_catalog('g').unwrap();
        let s = pure_to_string(&w).unwrap();
        let state = match state_from_str(&s).unwrap() {
            StateInput::Pure(p) => p,
            other => panic!("expected pure, got {other:?}"),
        };
        assert_eq!(state.amplitudes(), w.amplitudes());
    }

    #[test]
    fn dense_json_round_trip() {
        let rho = bell_phi_plus().projector();
        let s = density_to_string(&rho).unwrap();
        let back = match state_from_str(&s).unwrap() {
            StateInput::Dense(d) => d,
            other => panic!("expected dense, got {other:?}"),
        };
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn block_json_round_trip() {
        let g = EntangledGraph::new(4, vec![(0, 1)], vec![(2, 3)]).unwrap();
        let s = build_mixed(&g).unwrap();
        let txt = block_to_string(&s).unwrap();
        let back = match state_from_str(&txt).unwrap() {
            StateInput::Block(b) => b,
            other => panic!("expected block, got {other:?}"),
        };
        assert_eq!(back.vacuum(), s.vacuum());
        assert_eq!(back.doubles(), s.doubles());
        assert_eq!(back.single_block(), s.single_block());
    }

    #[test]
    fn malformed_state_is_rejected() {
        assert!(state_from_str("{\"n\": 2}").is_err());
        assert!(state_from_str("{\"n\": 2, \"rows\": [[[1.0, 0.0]]]}").is_err());
    }

    #[test]
    fn dot_styles() {
        let g = EntangledGraph::new(3, vec![(0, 1)], vec![(1, 2)]).unwrap();
        let dot = graph_to_dot(&g);
        assert!(dot.contains("0 -- 1 [style=solid];"));
        assert!(dot.contains("1 -- 2 [style=dashed];"));
        assert!(dot.starts_with("graph G {"));
    }

    #[test]
    fn census_csv_shape() {
        let report = crate::feasibility::census(2).unwrap();
        let csv_text = census_to_csv(&report, &[]).unwrap();
        let mut lines = csv_text.lines();
        assert_eq!(lines.next().unwrap(), "label,count,status,rule,witness");
        assert_eq!(csv_text.lines().count(), 1 + report.rows.len());
    }
}
