//! Python bindings. Vertex ids are 0-based here, as in the Rust API; only
//! the text format uses 1-based ids.

// The pyfunction macro expands to PyErr conversions clippy flags as redundant.
#![allow(clippy::useless_conversion)]

use std::collections::BTreeMap;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use treecut::branch::{self, SearchStats, SolveOptions};
use treecut::gadgets;
use treecut::gmwct;
use treecut::io;
use treecut::model::{self, build_instance, root_forest, CutSet, Demands, Mode, VertexId};
use treecut::oracle::{self, GenSpec, TreeShape};
use treecut::reduce::{check_reduced, reduce_to_fixpoint_counted, reduced_instance, ReductionCounts};

type Pairs = Vec<(VertexId, VertexId)>;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Instance", module = "treecut_py")]
#[derive(Clone)]
struct PyInstance {
    inner: model::Instance,
}

#[pymethods]
impl PyInstance {
    /// Pass `requests` for a multicut instance or `terminal_sets` for a
    /// multiway one; `costs` makes the latter weighted.
    #[new]
    #[pyo3(signature = (n, edges, requests=None, terminal_sets=None, costs=None, k=None))]
    fn new(
        n: usize,
        edges: Vec<(VertexId, VertexId)>,
        requests: Option<Vec<(VertexId, VertexId)>>,
        terminal_sets: Option<Vec<Vec<VertexId>>>,
        costs: Option<Vec<u64>>,
        k: Option<usize>,
    ) -> PyResult<Self> {
        let demands = match (requests, terminal_sets) {
            (Some(r), None) => Demands::Requests(r),
            (None, Some(t)) => Demands::TerminalSets(t),
            (None, None) => Demands::Requests(Vec::new()),
            (Some(_), Some(_)) => return Err(value_err("give requests or terminal_sets, not both")),
        };
        let inner = build_instance(n, edges, costs, demands, k).map_err(value_err)?;
        Ok(PyInstance { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_instance(text).map(|inner| PyInstance { inner }).map_err(value_err)
    }

    fn to_text(&self) -> String {
        io::write_instance(&self.inner)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.inner.edges().to_vec()
    }

    #[getter]
    fn requests(&self) -> Vec<(VertexId, VertexId)> {
        self.inner.requests().to_vec()
    }

    #[getter]
    fn terminal_sets(&self) -> Option<Vec<Vec<VertexId>>> {
        self.inner.terminal_sets().map(|s| s.to_vec())
    }

    #[getter]
    fn costs(&self) -> Option<Vec<u64>> {
        self.inner.costs().map(|c| c.to_vec())
    }

    #[getter]
    fn k(&self) -> Option<usize> {
        self.inner.k()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        self.inner.mode().as_str()
    }

    /// Checks that `cut` (a list of edges as vertex pairs) separates every
    /// request.
    fn verify(&self, cut: Vec<(VertexId, VertexId)>) -> PyResult<bool> {
        Ok(model::verify_cut(&self.inner, &self.cut_set(&cut)?))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(n={}, mode={}, edges={}, requests={})",
            self.inner.n(),
            self.inner.mode().as_str(),
            self.inner.edges().len(),
            self.inner.requests().len()
        )
    }
}

impl PyInstance {
    fn pairs(&self, cut: &CutSet) -> Vec<(VertexId, VertexId)> {
        cut.iter().map(|e| self.inner.edge(e)).collect()
    }

    fn cut_set(&self, cut: &[(VertexId, VertexId)]) -> PyResult<CutSet> {
        let mut set = CutSet::new();
        for &(a, b) in cut {
            let e = self.inner.find_edge(a, b).ok_or_else(|| value_err(format!("no edge {a} {b}")))?;
            set.0.insert(e);
        }
        Ok(set)
    }
}

/// Search counters of one decision run.
#[pyclass(name = "Stats", module = "treecut_py", get_all)]
#[derive(Clone)]
struct PyStats {
    nodes: u64,
    leaves: u64,
    max_depth: usize,
    fallback: u64,
    rules: BTreeMap<String, u64>,
    reductions: BTreeMap<String, u64>,
    bound_violations: u64,
    leaf_bound: u64,
}

impl From<&SearchStats> for PyStats {
    fn from(s: &SearchStats) -> Self {
        PyStats {
            nodes: s.nodes,
            leaves: s.leaves,
            max_depth: s.max_depth,
            fallback: s.fallback,
            rules: s.rules.clone(),
            reductions: s.reductions.clone(),
            bound_violations: s.bound_violation_count(),
            leaf_bound: branch::leaf_bound(s.initial_k),
        }
    }
}

#[pymethods]
impl PyStats {
    fn __repr__(&self) -> String {
        format!("Stats(nodes={}, leaves={}, fallback={})", self.nodes, self.leaves, self.fallback)
    }
}

fn opts(parallel: bool) -> SolveOptions {
    SolveOptions { parallel, ..SolveOptions::default() }
}

fn multicut_only(inst: &PyInstance) -> PyResult<()> {
    if inst.inner.mode() == Mode::Wgmwct {
        return Err(value_err("weighted instances go through solve_wgmwct"));
    }
    Ok(())
}

/// Minimum cut by branching: returns `(size, cut, stats)`.
#[pyfunction]
#[pyo3(signature = (inst, parallel=false))]
fn solve_min(inst: &PyInstance, parallel: bool) -> PyResult<(usize, Pairs, PyStats)> {
    multicut_only(inst)?;
    let (size, cut, stats) = branch::solve_min(&inst.inner, &opts(parallel));
    Ok((size, inst.pairs(&cut), PyStats::from(&stats)))
}

/// A cut of at most `k` edges, or `None`, with the search stats.
#[pyfunction]
#[pyo3(signature = (inst, k, parallel=false))]
fn solve_decision(
    inst: &PyInstance,
    k: usize,
    parallel: bool,
) -> PyResult<(Option<Pairs>, PyStats)> {
    multicut_only(inst)?;
    let (cut, stats) = branch::solve_decision(&inst.inner, k, &opts(parallel));
    Ok((cut.map(|c| inst.pairs(&c)), PyStats::from(&stats)))
}

/// Weighted multiway cut by dynamic programming: `(cost, cut)`.
#[pyfunction]
fn solve_wgmwct(inst: &PyInstance) -> PyResult<(u64, Vec<(VertexId, VertexId)>)> {
    let (cost, cut, _) = gmwct::solve_wgmwct(&inst.inner).map_err(value_err)?;
    Ok((cost, inst.pairs(&cut)))
}

/// Exhaustive minimum over all edge subsets (small instances only).
#[pyfunction]
fn brute_force_min(inst: &PyInstance) -> PyResult<(u64, Vec<(VertexId, VertexId)>)> {
    let (cost, cut) = oracle::brute_force_min_cut(&inst.inner).map_err(value_err)?;
    Ok((cost, inst.pairs(&cut)))
}

/// Result of running the reduction rules to a fixpoint.
#[pyclass(name = "Reduction", module = "treecut_py", get_all)]
struct PyReduction {
    infeasible: bool,
    forced_cuts: Vec<(VertexId, VertexId)>,
    contractions: usize,
    rules: BTreeMap<String, u64>,
    violations: Vec<String>,
    instance: PyInstance,
}

#[pyfunction]
#[pyo3(signature = (inst, k=None))]
fn reduce(inst: &PyInstance, k: Option<usize>) -> PyResult<PyReduction> {
    multicut_only(inst)?;
    let mut forest = root_forest(&inst.inner, None);
    forest.set_budget(k.or(inst.inner.k()));
    let mut counts = ReductionCounts::default();
    let out = reduce_to_fixpoint_counted(&mut forest, &mut counts);
    let forced = CutSet(forest.committed_cut().iter().copied().collect());
    let (reduced, _) = reduced_instance(&forest);
    Ok(PyReduction {
        infeasible: out.is_infeasible(),
        forced_cuts: inst.pairs(&forced),
        contractions: out.contractions,
        rules: counts.fired.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        violations: check_reduced(&forest).iter().map(|v| format!("{v:?}")).collect(),
        instance: PyInstance { inner: reduced },
    })
}

/// Random instance; `shape` is random, star or caterpillar.
#[pyfunction]
#[pyo3(signature = (seed=0, edges=8, requests=4, shape="random", mode="mct", q=2, max_cost=100))]
fn generate(
    seed: u64,
    edges: usize,
    requests: usize,
    shape: &str,
    mode: &str,
    q: usize,
    max_cost: u64,
) -> PyResult<PyInstance> {
    let shape = match shape {
        "random" => TreeShape::RandomTree,
        "star" => TreeShape::Star,
        "caterpillar" => TreeShape::Caterpillar,
        other => return Err(value_err(format!("unknown shape `{other}`"))),
    };
    let mode: Mode = mode.parse().map_err(value_err)?;
    let spec = GenSpec { seed, edges, requests, shape, mode, q, max_cost };
    oracle::generate(&spec).map(|inner| PyInstance { inner }).map_err(value_err)
}

#[pyfunction]
fn gadget(name: &str) -> PyResult<PyInstance> {
    gadgets::gadget(name)
        .map(|inner| PyInstance { inner })
        .ok_or_else(|| PyKeyError::new_err(name.to_string()))
}

#[pyfunction]
fn gadget_names() -> Vec<&'static str> {
    gadgets::GADGETS.iter().map(|g| g.name).collect()
}

#[pymodule]
fn treecut_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyStats>()?;
    m.add_class::<PyReduction>()?;
    m.add_function(wrap_pyfunction!(solve_min, m)?)?;
    m.add_function(wrap_pyfunction!(solve_decision, m)?)?;
    m.add_function(wrap_pyfunction!(solve_wgmwct, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_min, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(gadget, m)?)?;
    m.add_function(wrap_pyfunction!(gadget_names, m)?)?;
    Ok(())
}
