//! Python bindings for the listpack library.
//!
//! Wraps the graph, cover, decomposition, and packing types and the exact
//! solvers behind them. Rational values cross the boundary as `p/q`
//! strings, which `fractions.Fraction` parses directly.

use listpack::caterpillar;
use listpack::compose::{self, PackingLpOutcome};
use listpack::cover::{cover_graph, validate_cover, CorrespondenceCover};
use listpack::decomp::{pathwidth_decompose_small, CaterpillarDecomposition};
use listpack::fcp;
use listpack::fixtures;
use listpack::flexibility::flexible_for_degeneracy;
use listpack::graph::parse_dimacs;
use listpack::packing::{validate_packing, PackingDistribution, PackingTarget};
use listpack::{format_rat, format_rat_mixed, parse_rat, rat};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Undirected graph on vertices `1..=n`.
#[pyclass(name = "Graph", skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: listpack::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = listpack::Graph::new(n, &edges).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        Self {
            inner: listpack::Graph::complete(n),
        }
    }

    #[staticmethod]
    fn cycle(n: usize) -> Self {
        Self {
            inner: listpack::Graph::cycle(n),
        }
    }

    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_dimacs(text).map_err(err)?,
        })
    }

    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    fn degree(&self, v: usize) -> usize {
        self.inner.degree(v)
    }

    fn to_dimacs(&self) -> String {
        self.inner.to_dimacs()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, m={})",
            self.inner.vertex_count(),
            self.inner.edges().count()
        )
    }
}

/// Correspondence cover: per-vertex list sizes plus a partial matching of
/// colour pairs on every edge.
#[pyclass(name = "Cover", skip_from_py_object)]
#[derive(Clone)]
struct PyCover {
    inner: CorrespondenceCover,
}

#[pymethods]
impl PyCover {
    /// k-fold cover whose every edge matches equal colours to each other.
    #[staticmethod]
    fn identity(g: &PyGraph, k: usize) -> Self {
        Self {
            inner: CorrespondenceCover::identity(g.inner.clone(), k),
        }
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CorrespondenceCover::from_text(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn sha256(&self) -> String {
        self.inner.sha256()
    }

    fn base(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.base.clone(),
        }
    }

    fn list_size(&self, v: usize) -> usize {
        self.inner.list_size(v)
    }

    fn matching(&self, u: usize, v: usize) -> Vec<(usize, usize)> {
        self.inner.matching(u, v)
    }

    /// Flattened graph with a clique per list and an edge per matched pair.
    fn cover_graph(&self) -> PyGraph {
        PyGraph {
            inner: cover_graph(&self.inner),
        }
    }

    /// Violation messages; an empty list means the cover is well formed.
    fn validate(&self) -> Vec<String> {
        validate_cover(&self.inner).violations
    }

    fn __repr__(&self) -> String {
        format!(
            "Cover(n={}, lists={:?})",
            self.inner.base.vertex_count(),
            self.inner.list_sizes
        )
    }
}

/// Caterpillar decomposition: a walk of active cliques over the graph.
#[pyclass(name = "Caterpillar", skip_from_py_object)]
#[derive(Clone)]
struct PyCaterpillar {
    inner: CaterpillarDecomposition,
    n: usize,
}

#[pymethods]
impl PyCaterpillar {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let (inner, n) = CaterpillarDecomposition::from_text(text).map_err(err)?;
        Ok(Self { inner, n })
    }

    fn to_text(&self) -> String {
        self.inner.to_text(self.n)
    }

    /// Width parameter; active cliques hold `p + 1` vertices.
    #[getter]
    fn p(&self) -> usize {
        self.inner.p
    }

    /// The caterpillar-shaped supergraph the decomposition spans.
    fn graph(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.caterpillar_graph(self.n),
        }
    }

    fn __repr__(&self) -> String {
        format!("Caterpillar(p={}, n={})", self.inner.p, self.n)
    }
}

/// Finitely supported probability distribution on proper colourings.
#[pyclass(name = "Packing", skip_from_py_object)]
#[derive(Clone)]
struct PyPacking {
    inner: PackingDistribution,
}

#[pymethods]
impl PyPacking {
    /// Sorted support as `(colouring, weight)` pairs, weights as `p/q`.
    fn support(&self) -> Vec<(Vec<usize>, String)> {
        self.inner
            .support()
            .iter()
            .map(|(c, w)| (c.clone(), format_rat(w)))
            .collect()
    }

    fn support_size(&self) -> usize {
        self.inner.support_size()
    }

    fn to_text(&self, cover_sha256: &str) -> String {
        self.inner.to_text(cover_sha256)
    }

    /// Parses a packing file, returning the cover digest it names.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<(String, Self)> {
        let (sha, inner) = PackingDistribution::from_text(text).map_err(err)?;
        Ok((sha, Self { inner }))
    }

    /// Violations against the cover, empty when the packing holds. With no
    /// floor every colour must get probability `1/|L(v)|` exactly; a floor
    /// `p/q` only requires that much probability per colour.
    #[pyo3(signature = (cover, floor=None))]
    fn validate(&self, cover: &PyCover, floor: Option<&str>) -> PyResult<Vec<String>> {
        let target = match floor {
            None => PackingTarget::Fractional,
            Some(text) => {
                let eps = parse_rat(text)
                    .ok_or_else(|| err(format!("unreadable rational {:?}", text)))?;
                PackingTarget::Epsilon(vec![eps; cover.inner.base.vertex_count()])
            }
        };
        Ok(validate_packing(&cover.inner, &self.inner, &target).violations)
    }

    fn __repr__(&self) -> String {
        format!("Packing(support={})", self.inner.support_size())
    }
}

/// Exact fractional chromatic number as a `p/q` string.
#[pyfunction]
fn fractional_chromatic_number(g: &PyGraph) -> PyResult<String> {
    let (value, _, _) = fcp::fractional_chromatic_number(&g.inner).map_err(err)?;
    Ok(format_rat(&value))
}

/// Fractional chromatic number in mixed form, e.g. `2+1/2` for C5.
#[pyfunction]
fn fractional_chromatic_number_mixed(g: &PyGraph) -> PyResult<String> {
    let (value, _, _) = fcp::fractional_chromatic_number(&g.inner).map_err(err)?;
    Ok(format_rat_mixed(&value))
}

/// Printable primal/dual certificate for the fractional chromatic number.
#[pyfunction]
fn chromatic_certificate(g: &PyGraph) -> PyResult<String> {
    let (value, primal, dual) = fcp::fractional_chromatic_number(&g.inner).map_err(err)?;
    Ok(fcp::certificate_to_text(&value, &primal, &dual))
}

/// Independence number as a `p/q` string (an integer for unit weights).
#[pyfunction]
fn independence_number(g: &PyGraph) -> String {
    let weights = vec![rat(1, 1); g.inner.vertex_count()];
    let (_, value) = fcp::max_weight_independent_set(&g.inner, &weights);
    format_rat(&value)
}

/// Exact fractional packing when one exists, `None` when infeasible.
#[pyfunction]
fn solve_packing_lp(cover: &PyCover) -> PyResult<Option<PyPacking>> {
    match compose::solve_packing_lp(&cover.inner).map_err(err)? {
        PackingLpOutcome::Feasible(d) => Ok(Some(PyPacking { inner: d })),
        PackingLpOutcome::Infeasible { .. } => Ok(None),
    }
}

/// Packing with every colour probability at least `2^-(d+1)`, for a
/// `d`-degenerate base with uniform `(d+2)`-fold lists.
#[pyfunction]
fn flexible_packing(cover: &PyCover, degeneracy: usize) -> PyResult<PyPacking> {
    let d = flexible_for_degeneracy(&cover.inner, degeneracy).map_err(err)?;
    Ok(PyPacking { inner: d })
}

/// Uniform packing over a balanced `(p+1)!`-colouring family built along
/// the decomposition; the cover needs `(p+1)`-fold lists and full
/// matchings on its caterpillar graph.
#[pyfunction]
fn pack_caterpillar(cover: &PyCover, decomp: &PyCaterpillar) -> PyResult<PyPacking> {
    let d = caterpillar::caterpillar_packing(&cover.inner, &decomp.inner).map_err(err)?;
    Ok(PyPacking { inner: d })
}

/// Minimal-width caterpillar decomposition found by exhaustive search.
#[pyfunction]
fn pathwidth_decomposition(g: &PyGraph) -> PyResult<PyCaterpillar> {
    let inner = pathwidth_decompose_small(&g.inner).map_err(err)?;
    Ok(PyCaterpillar {
        inner,
        n: g.inner.vertex_count(),
    })
}

/// Whether nonnegative colouring weights can hit every proper pair of
/// every triangle edge with total weight exactly `q - 2`.
#[pyfunction]
fn triangle_balance_feasible(cover: &PyCover) -> PyResult<bool> {
    caterpillar::triangle_balance_feasible(&cover.inner).map_err(err)
}

/// Whether distinct proper colourings can hit every proper pair of every
/// triangle edge exactly `q - 2` times.
#[pyfunction]
fn triangle_family_feasible(cover: &PyCover) -> PyResult<bool> {
    caterpillar::triangle_family_feasible(&cover.inner).map_err(err)
}

/// True when the q-fold shifted triangle cover admits no such family.
#[pyfunction]
fn check_cyclic_shift_infeasible(q: usize) -> PyResult<bool> {
    caterpillar::check_cyclic_shift_infeasible(q).map_err(err)
}

/// 3-fold cover of the cube graph with no fractional packing.
#[pyfunction]
fn fixture_q3() -> PyCover {
    PyCover {
        inner: fixtures::build_q3_cover(),
    }
}

/// 45-vertex benchmark graph with fractional chromatic number 8369/2092.
#[pyfunction]
fn fixture_appendix_b() -> PyGraph {
    PyGraph {
        inner: fixtures::build_appendix_b().0,
    }
}

/// q-fold triangle cover with identity matchings on two edges and the
/// cyclic shift on the third.
#[pyfunction]
fn fixture_cyclic_shift(q: usize) -> PyCover {
    PyCover {
        inner: fixtures::shifted_triangle_cover(q),
    }
}

/// Ten-vertex caterpillar demo cover with its decomposition.
#[pyfunction]
fn fixture_caterpillar() -> (PyCover, PyCaterpillar) {
    let (c, d) = fixtures::shifted_caterpillar_cover();
    let n = c.base.vertex_count();
    (PyCover { inner: c }, PyCaterpillar { inner: d, n })
}

#[pymodule]
fn listpack_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyCover>()?;
    m.add_class::<PyCaterpillar>()?;
    m.add_class::<PyPacking>()?;
    m.add_function(wrap_pyfunction!(fractional_chromatic_number, m)?)?;
    m.add_function(wrap_pyfunction!(fractional_chromatic_number_mixed, m)?)?;
    m.add_function(wrap_pyfunction!(chromatic_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(independence_number, m)?)?;
    m.add_function(wrap_pyfunction!(solve_packing_lp, m)?)?;
    m.add_function(wrap_pyfunction!(flexible_packing, m)?)?;
    m.add_function(wrap_pyfunction!(pack_caterpillar, m)?)?;
    m.add_function(wrap_pyfunction!(pathwidth_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_balance_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(triangle_family_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(check_cyclic_shift_infeasible, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_q3, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_appendix_b, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_cyclic_shift, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_caterpillar, m)?)?;
    Ok(())
}
