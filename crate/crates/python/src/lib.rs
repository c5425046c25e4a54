//! Python bindings: graphs, graph Fourier transforms and the three
//! decomposers, operating on plain Python lists.

use graphif::decomposers::{
    db_if as db_if_rs, fif_1d, gft_if as gft_if_rs, CutoffChoice, DbIfOptions, FifOptions, GftIfOptions,
    PlanarWindowRule, Storage, WindowMode,
};
use graphif::distances::{circular_distance_matrix, euclidean_distance_matrix, shortest_path_matrix, DistanceMatrix};
use graphif::experiments::{equispaced_angles, example1_at, example2_at, random_points, random_sorted_angles, rng_from_seed};
use graphif::graph::{build_delaunay_graph, build_ring_graph, count_extrema, laplacian};
use graphif::harness::{limit_check as limit_check_rs, LimitCheckConfig};
use nalgebra::DMatrix;
use graphif::sifting::{sifting_limit as sifting_limit_rs, DecomposeOptions};
use graphif::spectral::{eigendecompose, gft as gft_rs, igft as igft_rs};
use graphif::{DecompositionResult, Edge, Embedding, Error, ErrorClass, StoppingRule};
use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    let msg = format!("{} ({})", e, e.kind());
    match e.class() {
        ErrorClass::InvalidInput => PyValueError::new_err(msg),
        ErrorClass::Numeric => PyArithmeticError::new_err(msg),
        ErrorClass::Io => PyOSError::new_err(msg),
    }
}

fn parse<T: names::FromName>(name: &str) -> PyResult<T> {
    T::from_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown option {name:?}")))
}

mod names {
    use super::*;

    pub trait FromName: Sized {
        fn from_name(s: &str) -> Option<Self>;
    }

    impl FromName for WindowMode {
        fn from_name(s: &str) -> Option<Self> {
            match s {
                "row_stochastic" => Some(WindowMode::RowStochastic),
                "symmetrized" => Some(WindowMode::Symmetrized),
                _ => None,
            }
        }
    }

    impl FromName for Storage {
        fn from_name(s: &str) -> Option<Self> {
            match s {
                "auto" => Some(Storage::Auto),
                "dense" => Some(Storage::Dense),
                "sparse" => Some(Storage::Sparse),
                _ => None,
            }
        }
    }

    impl FromName for PlanarWindowRule {
        fn from_name(s: &str) -> Option<Self> {
            match s {
                "extrema_spacing" => Some(PlanarWindowRule::ExtremaSpacing),
                "bounding_box" => Some(PlanarWindowRule::BoundingBox),
                _ => None,
            }
        }
    }
}

fn decompose_options(max_imfs: usize, fixed_iterations: Option<usize>, delta: f64, max_iterations: usize) -> DecomposeOptions {
    let rule = match fixed_iterations {
        Some(m) => StoppingRule::fixed(m),
        None => StoppingRule::relative_change(delta, max_iterations),
    };
    DecomposeOptions::with_rule(rule, max_imfs)
}

/// A weighted undirected graph, optionally embedded on the circle or in the plane.
#[pyclass(name = "Graph", module = "pygraphif", frozen)]
struct PyGraph {
    inner: graphif::Graph,
}

#[pymethods]
impl PyGraph {
    /// Ring graph over sorted angles in `[0, 2π)`.
    #[staticmethod]
    #[pyo3(signature = (angles, neighbors_per_side = 2))]
    fn ring(angles: Vec<f64>, neighbors_per_side: usize) -> PyResult<Self> {
        build_ring_graph(&angles, neighbors_per_side).map(|inner| PyGraph { inner }).map_err(py_err)
    }

    /// Delaunay graph of planar points `[(x, y), ...]`.
    #[staticmethod]
    fn delaunay(points: Vec<[f64; 2]>) -> PyResult<Self> {
        build_delaunay_graph(&points).map(|inner| PyGraph { inner }).map_err(py_err)
    }

    /// Graph from `(i, j, weight)` triples.
    #[staticmethod]
    #[pyo3(signature = (n, edges, angles = None, points = None))]
    fn from_edges(
        n: usize,
        edges: Vec<(usize, usize, f64)>,
        angles: Option<Vec<f64>>,
        points: Option<Vec<[f64; 2]>>,
    ) -> PyResult<Self> {
        let embedding = match (angles, points) {
            (Some(_), Some(_)) => return Err(PyValueError::new_err("give angles or points, not both")),
            (Some(a), None) => Some(Embedding::Circle(a)),
            (None, Some(p)) => Some(Embedding::Plane(p)),
            (None, None) => None,
        };
        let edges = edges.into_iter().map(|(i, j, weight)| Edge { i, j, weight }).collect();
        graphif::Graph::new(n, edges, embedding).map(|inner| PyGraph { inner }).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.inner.edges().iter().map(|e| (e.i, e.j, e.weight)).collect()
    }

    fn is_connected(&self) -> bool {
        self.inner.is_connected()
    }

    fn laplacian(&self) -> Vec<Vec<f64>> {
        rows(&laplacian(&self.inner))
    }

    fn count_extrema(&self, signal: Vec<f64>) -> PyResult<usize> {
        count_extrema(&self.inner, &signal).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.edges().len())
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: Vec<Vec<f64>>) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(PyValueError::new_err("rows have different lengths"));
    }
    Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

/// Laplacian eigenbasis of a graph.
#[pyclass(name = "SpectralBasis", module = "pygraphif", frozen)]
struct PySpectralBasis {
    inner: graphif::SpectralBasis,
}

#[pymethods]
impl PySpectralBasis {
    #[new]
    fn new(graph: &PyGraph) -> PyResult<Self> {
        eigendecompose(&laplacian(&graph.inner)).map(|inner| PySpectralBasis { inner }).map_err(py_err)
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    /// Columns are the orthonormal eigenvectors.
    #[getter]
    fn eigenvectors(&self) -> Vec<Vec<f64>> {
        rows(self.inner.eigenvectors())
    }

    fn gft(&self, signal: Vec<f64>) -> PyResult<Vec<f64>> {
        gft_rs(&self.inner, &signal).map_err(py_err)
    }

    fn igft(&self, coefficients: Vec<f64>) -> PyResult<Vec<f64>> {
        igft_rs(&self.inner, &coefficients).map_err(py_err)
    }
}

/// IMFs and residual of a decomposition.
#[pyclass(name = "Decomposition", module = "pygraphif", frozen)]
struct PyDecomposition {
    inner: DecompositionResult,
}

#[pymethods]
impl PyDecomposition {
    #[getter]
    fn imfs(&self) -> Vec<Vec<f64>> {
        self.inner.imfs.iter().map(|m| m.to_vec()).collect()
    }

    #[getter]
    fn residual(&self) -> Vec<f64> {
        self.inner.residual.to_vec()
    }

    /// Inner iterations spent on each IMF.
    #[getter]
    fn iterations(&self) -> Vec<usize> {
        self.inner.meta.iter().map(|m| m.iterations).collect()
    }

    #[getter]
    fn input_checksum(&self) -> String {
        self.inner.input_checksum.clone()
    }

    fn reconstruct(&self) -> Vec<f64> {
        self.inner.reconstruct()
    }

    fn reconstruction_error(&self, signal: Vec<f64>) -> f64 {
        self.inner.reconstruction_error(&signal)
    }

    fn __len__(&self) -> usize {
        self.inner.imfs.len()
    }

    fn __repr__(&self) -> String {
        format!("Decomposition(imfs={}, n={})", self.inner.imfs.len(), self.inner.residual.len())
    }
}

/// Distance-based iterative filtering. Distances default to the embedding
/// (circular or Euclidean); `distances="shortest_path"` uses hop-weighted
/// graph paths, and a nested list is taken as an explicit matrix.
#[pyfunction]
#[pyo3(signature = (
    graph, signal, *, distances = None, nu = 1.6, mode = "row_stochastic", storage = "auto",
    planar_rule = "extrema_spacing", extent = None, max_imfs = 10, fixed_iterations = None,
    delta = 1e-3, max_iterations = 200
))]
#[allow(clippy::too_many_arguments)]
fn db_if(
    graph: &PyGraph,
    signal: Vec<f64>,
    distances: Option<Bound<'_, PyAny>>,
    nu: f64,
    mode: &str,
    storage: &str,
    planar_rule: &str,
    extent: Option<f64>,
    max_imfs: usize,
    fixed_iterations: Option<usize>,
    delta: f64,
    max_iterations: usize,
) -> PyResult<PyDecomposition> {
    let g = &graph.inner;
    let c = match distances {
        None => match g.embedding() {
            Some(Embedding::Circle(a)) => circular_distance_matrix(a),
            Some(Embedding::Plane(p)) => euclidean_distance_matrix(p),
            None => return Err(PyValueError::new_err("graph has no embedding; pass distances")),
        },
        Some(d) => match d.extract::<String>() {
            Ok(s) if s == "shortest_path" => shortest_path_matrix(g, Default::default(), Default::default()),
            Ok(s) => return Err(PyValueError::new_err(format!("unknown distances {s:?}"))),
            Err(_) => DistanceMatrix::new(matrix(d.extract()?)?),
        },
    }
    .map_err(py_err)?;
    let opts = DbIfOptions {
        nu,
        mode: parse(mode)?,
        storage: parse(storage)?,
        extent,
        planar_rule: parse(planar_rule)?,
        decompose: decompose_options(max_imfs, fixed_iterations, delta, max_iterations),
    };
    db_if_rs(g, &c, &signal, &opts).map(|inner| PyDecomposition { inner }).map_err(py_err)
}

/// Graph Fourier iterative filtering with one Hann cutoff per IMF, or
/// automatic cutoffs when `cutoffs` is None.
#[pyfunction]
#[pyo3(signature = (basis, graph, signal, *, cutoffs = None, max_imfs = 10, fixed_iterations = None, delta = 1e-3, max_iterations = 200))]
#[allow(clippy::too_many_arguments)]
fn gft_if(
    basis: &PySpectralBasis,
    graph: &PyGraph,
    signal: Vec<f64>,
    cutoffs: Option<Vec<f64>>,
    max_imfs: usize,
    fixed_iterations: Option<usize>,
    delta: f64,
    max_iterations: usize,
) -> PyResult<PyDecomposition> {
    let opts = GftIfOptions {
        cutoff: cutoffs.map_or(CutoffChoice::Auto, CutoffChoice::Manual),
        decompose: decompose_options(max_imfs, fixed_iterations, delta, max_iterations),
    };
    gft_if_rs(&basis.inner, &graph.inner, &signal, &opts)
        .map(|r| PyDecomposition { inner: r.decomposition })
        .map_err(py_err)
}

/// Fast iterative filtering of an equispaced periodic signal.
#[pyfunction]
#[pyo3(signature = (signal, *, nu = 1.6, max_imfs = 10, fixed_iterations = None, delta = 1e-3, max_iterations = 200))]
fn fif(
    signal: Vec<f64>,
    nu: f64,
    max_imfs: usize,
    fixed_iterations: Option<usize>,
    delta: f64,
    max_iterations: usize,
) -> PyResult<PyDecomposition> {
    let opts = FifOptions {
        nu,
        decompose: decompose_options(max_imfs, fixed_iterations, delta, max_iterations),
    };
    fif_1d(&signal, &opts).map(|inner| PyDecomposition { inner }).map_err(py_err)
}

/// Limit of `s ← s - W s` for a square matrix `W`.
#[pyfunction]
#[pyo3(signature = (w, signal, zero_tol = None))]
fn sifting_limit(w: Vec<Vec<f64>>, signal: Vec<f64>, zero_tol: Option<f64>) -> PyResult<Vec<f64>> {
    sifting_limit_rs(&matrix(w)?, &signal, zero_tol).map_err(py_err)
}

/// Randomized comparison of long sifting runs with the closed-form limit.
/// Returns `(max_relative_error, within_tolerance, violation_detected)`.
#[pyfunction]
#[pyo3(signature = (trials = 100, n = 8, iterations = 10_000, seed = 0))]
fn limit_check(trials: usize, n: usize, iterations: usize, seed: u64) -> PyResult<(f64, bool, bool)> {
    let config = LimitCheckConfig {
        trials,
        n,
        iterations,
        seed,
        ..Default::default()
    };
    let r = limit_check_rs(&config).map_err(py_err)?;
    Ok((r.max_relative_error, r.within_tolerance, r.violation_detected))
}

/// Two chirps on the circle: `(angles, signal, b0, b1)`.
#[pyfunction]
#[pyo3(signature = (n = 512, seed = 0, equispaced = false))]
fn example1(n: usize, seed: u64, equispaced: bool) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let angles = if equispaced {
        equispaced_angles(n)
    } else {
        random_sorted_angles(n, &mut rng_from_seed(seed))
    };
    let c = example1_at(&angles);
    (angles, c.signal, c.b0, c.b1)
}

/// Plane waves on the unit square: `(points, signal, b0, b1)`.
#[pyfunction]
#[pyo3(signature = (n = 512, seed = 0))]
fn example2(n: usize, seed: u64) -> (Vec<[f64; 2]>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let points = random_points(n, &mut rng_from_seed(seed));
    let c = example2_at(&points);
    (points, c.signal, c.b0, c.b1)
}

#[pymodule]
fn pygraphif(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PySpectralBasis>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(db_if, m)?)?;
    m.add_function(wrap_pyfunction!(gft_if, m)?)?;
    m.add_function(wrap_pyfunction!(fif, m)?)?;
    m.add_function(wrap_pyfunction!(sifting_limit, m)?)?;
    m.add_function(wrap_pyfunction!(limit_check, m)?)?;
    m.add_function(wrap_pyfunction!(example1, m)?)?;
    m.add_function(wrap_pyfunction!(example2, m)?)?;
    Ok(())
}
