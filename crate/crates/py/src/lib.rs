//! Python bindings: graph type, mixed-state construction, pair analysis,
//! feasibility assessment and pure-state search.

use entangled_graphs::analyzer::{
    extract_graph_block, extract_graph_density, extract_graph_pure, PairVerdict, Tolerances,
};
use entangled_graphs::graph::EntangledGraph;
use entangled_graphs::linalg::{self, DensityOperator, PureState as CorePure, C64};
use entangled_graphs::search::{search as core_search, SearchConfig};
use entangled_graphs::synthesis::{
    build_mixed as core_build_mixed, build_web as core_build_web, build_web_auto,
    three_qubit_catalog as core_catalog, ExcitationBlockState,
};
use entangled_graphs::{assess as core_assess, assess_with_search, census as core_census, io};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: entangled_graphs::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_rows(m: &DMatrix<C64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<Complex64>]) -> PyResult<DMatrix<C64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square and nonempty"));
    }
    Ok(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
}

fn gates(tol_ent: f64, tol_fac: f64) -> PyResult<Tolerances> {
    let tol = Tolerances::with_gates(tol_ent, tol_fac);
    tol.check().map_err(err)?;
    Ok(tol)
}

/// A graph over qubit vertices whose pairs are entangled, classically
/// correlated, or uncorrelated.
#[pyclass(frozen, eq)]
#[derive(PartialEq)]
struct Graph {
    inner: EntangledGraph,
}

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (n, entangled=Vec::new(), classical=Vec::new()))]
    fn new(n: usize, entangled: Vec<(usize, usize)>, classical: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Graph {
            inner: EntangledGraph::new(n, entangled, classical).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn entangled_edges(&self) -> Vec<(usize, usize)> {
        self.inner.entangled_edges().collect()
    }

    fn classical_edges(&self) -> Vec<(usize, usize)> {
        self.inner.classical_edges().collect()
    }

    fn pair_class(&self, i: usize, j: usize) -> String {
        self.inner.pair_class(i, j).to_string()
    }

    fn canonical_label(&self) -> PyResult<String> {
        Ok(self.inner.canonical_form().as_str().to_string())
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn open_edges(&self) -> Vec<(usize, (usize, usize))> {
        self.inner.open_edges()
    }

    fn permuted(&self, perm: Vec<usize>) -> PyResult<Graph> {
        Ok(Graph {
            inner: self.inner.permuted(&perm).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        io::graph_to_string(&self.inner).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Graph> {
        Ok(Graph {
            inner: io::graph_from_str(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, entangled={:?}, classical={:?})",
            self.inner.n(),
            self.inner.entangled_edges().collect::<Vec<_>>(),
            self.inner.classical_edges().collect::<Vec<_>>()
        )
    }
}

/// Sparse mixed state supported on the vacuum, single and double
/// excitations.
#[pyclass(frozen)]
struct BlockState {
    inner: ExcitationBlockState,
}

#[pymethods]
impl BlockState {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn vacuum(&self) -> f64 {
        self.inner.vacuum()
    }

    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    fn reduce_pair(&self, i: usize, j: usize) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(matrix_rows(self.inner.reduce_pair(i, j).map_err(err)?.matrix()))
    }

    fn marginal(&self, i: usize) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(matrix_rows(self.inner.marginal(i).map_err(err)?.matrix()))
    }

    fn expand_dense(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(matrix_rows(self.inner.expand_dense().map_err(err)?.matrix()))
    }

    fn to_json(&self) -> PyResult<String> {
        io::block_to_string(&self.inner).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<BlockState> {
        match io::state_from_str(text).map_err(err)? {
            entangled_graphs::StateInput::Block(b) => Ok(BlockState { inner: b }),
            _ => Err(PyValueError::new_err("not an excitation-block state")),
        }
    }

    fn __repr__(&self) -> String {
        format!("BlockState(n={}, vacuum={:.6})", self.inner.n(), self.inner.vacuum())
    }
}

/// Pure state on qubits 0..n with amplitudes in most-significant-first
/// basis order.
#[pyclass(frozen)]
struct PureState {
    inner: CorePure,
}

#[pymethods]
impl PureState {
    #[new]
    #[pyo3(signature = (amplitudes, normalize=true))]
    fn new(amplitudes: Vec<Complex64>, normalize: bool) -> PyResult<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(PyValueError::new_err("amplitude count must be a power of two, at least 2"));
        }
        let n = dim.trailing_zeros() as usize;
        let amps = DVector::from_vec(amplitudes);
        let inner = if normalize {
            CorePure::new_normalized((0..n).collect(), amps)
        } else {
            CorePure::new((0..n).collect(), amps)
        };
        Ok(PureState { inner: inner.map_err(err)? })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().iter().copied().collect()
    }

    fn reduce_pair(&self, i: usize, j: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let rho = linalg::partial_trace_pure(&self.inner.sorted_qubits(), &[i, j]).map_err(err)?;
        Ok(matrix_rows(rho.matrix()))
    }

    fn to_json(&self) -> PyResult<String> {
        io::pure_to_string(&self.inner).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<PureState> {
        match io::state_from_str(text).map_err(err)? {
            entangled_graphs::StateInput::Pure(p) => Ok(PureState { inner: p }),
            _ => Err(PyValueError::new_err("not a pure state")),
        }
    }

    fn __repr__(&self) -> String {
        format!("PureState(num_qubits={})", self.inner.num_qubits())
    }
}

fn verdicts_to_py(py: Python<'_>, verdicts: &[PairVerdict]) -> PyResult<Vec<Py<PyDict>>> {
    verdicts
        .iter()
        .map(|v| {
            let d = PyDict::new(py);
            d.set_item("i", v.i)?;
            d.set_item("j", v.j)?;
            d.set_item("class", v.class.to_string())?;
            d.set_item("concurrence", v.concurrence)?;
            d.set_item("negativity", v.negativity)?;
            d.set_item("fac_distance", v.fac_distance)?;
            d.set_item("marginal", v.marginal)?;
            Ok(d.unbind())
        })
        .collect()
}

/// Classify a state into its graph. Accepts a PureState, a BlockState, or a
/// square density matrix as nested lists of complex numbers.
#[pyfunction]
#[pyo3(signature = (state, tol_ent=1e-9, tol_fac=1e-9))]
fn extract_graph(
    py: Python<'_>,
    state: &Bound<'_, PyAny>,
    tol_ent: f64,
    tol_fac: f64,
) -> PyResult<(Graph, Vec<Py<PyDict>>)> {
    let tol = gates(tol_ent, tol_fac)?;
    let (g, verdicts) = if let Ok(p) = state.extract::<PyRef<PureState>>() {
        extract_graph_pure(&p.inner, &tol).map_err(err)?
    } else if let Ok(b) = state.extract::<PyRef<BlockState>>() {
        extract_graph_block(&b.inner, &tol).map_err(err)?
    } else if let Ok(rows) = state.extract::<Vec<Vec<Complex64>>>() {
        let m = matrix_from_rows(&rows)?;
        if !m.nrows().is_power_of_two() || m.nrows() < 4 {
            return Err(PyValueError::new_err("density matrix dimension must be 2^n with n >= 2"));
        }
        let n = m.nrows().trailing_zeros() as usize;
        let rho = DensityOperator::new((0..n).collect(), m).map_err(err)?;
        extract_graph_density(&rho, &tol).map_err(err)?
    } else {
        return Err(PyValueError::new_err(
            "expected a PureState, a BlockState, or a density matrix",
        ));
    };
    Ok((Graph { inner: g }, verdicts_to_py(py, &verdicts)?))
}

/// Mixed-state realization of any graph.
#[pyfunction]
fn build_mixed(g: &Graph) -> PyResult<BlockState> {
    Ok(BlockState {
        inner: core_build_mixed(&g.inner).map_err(err)?,
    })
}

/// Wootters concurrence of a two-qubit density matrix.
#[pyfunction]
fn concurrence(rows: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let m = matrix_from_rows(&rows)?;
    if m.nrows() != 4 {
        return Err(PyValueError::new_err("expected a 4x4 matrix"));
    }
    let rho = DensityOperator::new(vec![0, 1], m).map_err(err)?;
    linalg::concurrence(&rho).map_err(err)
}

/// Negativity of a two-qubit density matrix.
#[pyfunction]
fn negativity(rows: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let m = matrix_from_rows(&rows)?;
    if m.nrows() != 4 {
        return Err(PyValueError::new_err("expected a 4x4 matrix"));
    }
    let rho = DensityOperator::new(vec![0, 1], m).map_err(err)?;
    linalg::negativity(&rho).map_err(err)
}

fn component_to_py(
    py: Python<'_>,
    c: &entangled_graphs::ComponentVerdict,
) -> PyResult<Py<PyDict>> {
    let d = PyDict::new(py);
    d.set_item("vertices", c.vertices.clone())?;
    d.set_item("status", c.status.as_str())?;
    d.set_item("rule", c.rule)?;
    d.set_item("note", c.note.clone())?;
    d.set_item(
        "witness",
        c.witness.as_ref().map(|w| PureState { inner: w.clone() }),
    )?;
    Ok(d.unbind())
}

fn verdict_to_py(py: Python<'_>, v: &entangled_graphs::Verdict) -> PyResult<Py<PyDict>> {
    let d = PyDict::new(py);
    d.set_item("status", v.status.as_str())?;
    d.set_item("feasible", v.status.is_feasible())?;
    d.set_item("reason", v.reason.clone())?;
    d.set_item(
        "witness",
        v.witness.as_ref().map(|w| PureState { inner: w.clone() }),
    )?;
    let comps: Vec<Py<PyDict>> = v
        .components
        .iter()
        .map(|c| component_to_py(py, c))
        .collect::<PyResult<_>>()?;
    d.set_item("components", comps)?;
    Ok(d.unbind())
}

/// Decide whether a graph admits a pure-state representative, by rules
/// alone or with a numerical search attached.
#[pyfunction]
#[pyo3(signature = (g, with_search=false, restarts=64, max_evals=20_000, seed=7))]
fn assess(
    py: Python<'_>,
    g: &Graph,
    with_search: bool,
    restarts: usize,
    max_evals: usize,
    seed: u64,
) -> PyResult<Py<PyDict>> {
    let verdict = if with_search {
        let cfg = SearchConfig {
            restarts,
            max_evals_per_restart: max_evals,
            seed,
            ..SearchConfig::default()
        };
        assess_with_search(&g.inner, &cfg).map_err(err)?
    } else {
        core_assess(&g.inner).map_err(err)?
    };
    verdict_to_py(py, &verdict)
}

/// Search for a pure state classifying exactly to the graph.
#[pyfunction]
#[pyo3(signature = (g, restarts=64, max_evals=20_000, seed=7))]
fn search(
    py: Python<'_>,
    g: &Graph,
    restarts: usize,
    max_evals: usize,
    seed: u64,
) -> PyResult<Py<PyDict>> {
    let cfg = SearchConfig {
        restarts,
        max_evals_per_restart: max_evals,
        seed,
        ..SearchConfig::default()
    };
    let r = core_search(&g.inner, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("found", r.found)?;
    d.set_item("best_objective", r.best_objective)?;
    d.set_item("evals", r.evals)?;
    d.set_item("witness", r.witness.map(|w| PureState { inner: w }))?;
    Ok(d.unbind())
}

/// One of the six fixed three-qubit states, by letter (a, b, g, h, i, j).
#[pyfunction]
fn three_qubit_catalog(letter: &str) -> PyResult<PureState> {
    let mut chars = letter.chars();
    let (Some(c), None) = (chars.next(), chars.next()) else {
        return Err(PyValueError::new_err("letter must be a single character"));
    };
    Ok(PureState { inner: core_catalog(c).map_err(err)? })
}

/// Web state with amplitudes alpha on the vacuum, beta on the full
/// excitation, and gamma split over the entangled edges.
#[pyfunction]
fn build_web(g: &Graph, alpha: f64, beta: f64, gamma: f64) -> PyResult<PureState> {
    Ok(PureState {
        inner: core_build_web(&g.inner, alpha, beta, gamma).map_err(err)?,
    })
}

/// Web state with verified parameters, trying defaults then a grid sweep.
#[pyfunction]
#[pyo3(signature = (g, tol_ent=1e-9, tol_fac=1e-9))]
fn build_web_verified(g: &Graph, tol_ent: f64, tol_fac: f64) -> PyResult<(PureState, (f64, f64, f64))> {
    let tol = gates(tol_ent, tol_fac)?;
    let (state, params) = build_web_auto(&g.inner, &tol).map_err(err)?;
    Ok((PureState { inner: state }, params))
}

/// Feasibility census over all graphs on n vertices (n <= 5).
#[pyfunction]
fn census(py: Python<'_>, n: usize) -> PyResult<Py<PyDict>> {
    let report = core_census(n).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", report.n)?;
    d.set_item("raw_total", report.raw_total)?;
    d.set_item("class_total", report.class_total)?;
    d.set_item("connected_classes", report.connected_classes)?;
    d.set_item("connected_no_open_edge_classes", report.connected_no_open_edge_classes)?;
    d.set_item(
        "connected_no_open_edge_non_web_classes",
        report.connected_no_open_edge_non_web_classes,
    )?;
    d.set_item("ambiguous_classes", report.ambiguous_classes)?;
    let rows: Vec<Py<PyDict>> = report
        .rows
        .iter()
        .map(|row| {
            let r = PyDict::new(py);
            r.set_item("label", row.label.as_str())?;
            r.set_item("count", row.count)?;
            r.set_item("status", row.status.as_str())?;
            r.set_item("rule", row.rule.clone())?;
            r.set_item(
                "witness",
                row.witness.as_ref().map(|w| PureState { inner: w.clone() }),
            )?;
            Ok(r.unbind())
        })
        .collect::<PyResult<_>>()?;
    d.set_item("rows", rows)?;
    Ok(d.unbind())
}

#[pymodule]
fn entangled_graphs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<BlockState>()?;
    m.add_class::<PureState>()?;
    m.add_function(wrap_pyfunction!(build_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(extract_graph, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(negativity, m)?)?;
    m.add_function(wrap_pyfunction!(assess, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(three_qubit_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(build_web, m)?)?;
    m.add_function(wrap_pyfunction!(build_web_verified, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add("ACCEPT_OBJECTIVE", entangled_graphs::ACCEPT_OBJECTIVE)?;
    Ok(())
}
