//! Python bindings for `opalg-core`.

use num_complex::Complex64;
use opalg_core::experiment::{self, ExperimentConfig};
use opalg_core::numkit::{self, CircleGrid, Structure};
use opalg_core::report::{ExperimentReport, Format};
use opalg_core::shift::{self, ShiftTruncation, WeightSequence};
use opalg_core::volterra::{self, KernelSpec, SampledKernel, SamplingMode};
use opalg_core::{gauge, Error};
use pyo3::exceptions::{PyArithmeticError, PyIndexError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Index(_) => PyIndexError::new_err(e.to_string()),
        e if e.is_numeric() => PyArithmeticError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "ComplexMatrix", module = "opalg", frozen)]
struct PyMatrix(numkit::ComplexMatrix);

#[pymethods]
impl PyMatrix {
    /// Dense matrix from a square list of rows.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(PyValueError::new_err("rows must form a square matrix"));
        }
        let data = rows.into_iter().flatten().collect();
        numkit::ComplexMatrix::from_rows(dim, data)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn identity(dim: usize) -> Self {
        Self(numkit::ComplexMatrix::identity(dim))
    }

    /// Lower-triangular Toeplitz matrix with the given first column.
    #[staticmethod]
    fn lower_toeplitz(column: Vec<Complex64>) -> Self {
        Self(numkit::ComplexMatrix::lower_toeplitz(column))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn structure(&self) -> &'static str {
        match self.0.structure() {
            Structure::Dense => "dense",
            Structure::LowerTriangular => "lower_triangular",
            Structure::LowerTriangularToeplitz => "lower_toeplitz",
        }
    }

    fn get(&self, i: usize, j: usize) -> PyResult<Complex64> {
        let n = self.0.dim();
        if i >= n || j >= n {
            return Err(PyIndexError::new_err(format!(
                "({i}, {j}) outside a {n}x{n} matrix"
            )));
        }
        Ok(self.0.get(i, j))
    }

    fn to_rows(&self) -> Vec<Vec<Complex64>> {
        self.0
            .to_row_major()
            .chunks(self.0.dim().max(1))
            .map(<[_]>::to_vec)
            .collect()
    }

    fn matvec(&self, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        if x.len() != self.0.dim() {
            return Err(PyValueError::new_err(
                "vector length must equal the dimension",
            ));
        }
        Ok(self.0.matvec(&x))
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        same_dim(self, other)?;
        Ok(Self(self.0.matmul(&other.0)))
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        same_dim(self, other)?;
        Ok(Self(self.0.add(&other.0)))
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        same_dim(self, other)?;
        Ok(Self(self.0.sub(&other.0)))
    }

    fn scale(&self, alpha: Complex64) -> Self {
        Self(self.0.scale(alpha))
    }

    fn __pow__(&self, k: usize, _modulo: Option<usize>) -> Self {
        Self(self.0.pow(k))
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    fn max_abs_diff(&self, other: &Self) -> PyResult<f64> {
        same_dim(self, other)?;
        Ok(self.0.max_abs_diff(&other.0))
    }

    fn __repr__(&self) -> String {
        format!(
            "ComplexMatrix(dim={}, structure={})",
            self.0.dim(),
            self.structure()
        )
    }
}

fn same_dim(a: &PyMatrix, b: &PyMatrix) -> PyResult<()> {
    if a.0.dim() != b.0.dim() {
        return Err(PyValueError::new_err(format!(
            "dimension mismatch: {} vs {}",
            a.0.dim(),
            b.0.dim()
        )));
    }
    Ok(())
}

/// Truncated weighted shift.
#[pyclass(name = "WeightedShift", module = "opalg", frozen)]
struct PyShift(ShiftTruncation);

#[pymethods]
impl PyShift {
    #[new]
    fn new(weights: &str, dim: usize) -> PyResult<Self> {
        let w: WeightSequence = weights.parse().map_err(to_py)?;
        shift::build_shift(w, dim).map(Self).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn matrix(&self) -> PyMatrix {
        PyMatrix(self.0.matrix().clone())
    }

    fn subdiagonal(&self) -> Vec<Complex64> {
        self.0.subdiagonal().to_vec()
    }

    /// `sum_j coeffs[j-1] T^j`.
    fn polynomial(&self, coeffs: Vec<Complex64>) -> PyMatrix {
        PyMatrix(self.0.polynomial(&coeffs))
    }

    /// Nonzero Fourier coefficients of `s` as `(k, S^(k))` pairs.
    fn series(&self, s: &PyMatrix) -> PyResult<Vec<(usize, Complex64)>> {
        let series = self.0.series(&s.0).map_err(to_py)?;
        Ok(series
            .iter()
            .filter(|&(k, _)| series.is_nonzero(k))
            .collect())
    }

    fn equivalence_constant(&self) -> Option<f64> {
        self.0.equivalence_constant()
    }
}

/// Kernel sampled onto the midpoint grid.
#[pyclass(name = "Kernel", module = "opalg", frozen)]
struct PyKernel(SampledKernel);

#[pymethods]
impl PyKernel {
    #[new]
    #[pyo3(signature = (spec, dim, mode = "exact"))]
    fn new(spec: &str, dim: usize, mode: &str) -> PyResult<Self> {
        let spec: KernelSpec = spec.parse().map_err(to_py)?;
        let mode: SamplingMode = mode.parse().map_err(to_py)?;
        SampledKernel::new(&spec, dim, mode)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.n()
    }

    fn cells(&self) -> Vec<Complex64> {
        self.0.cells().to_vec()
    }

    fn support_start(&self) -> f64 {
        self.0.support_start()
    }

    fn l1_norm(&self) -> f64 {
        self.0.l1_cells()
    }

    fn hs_norm(&self) -> f64 {
        volterra::hs_norm(&self.0)
    }

    fn operator(&self) -> PyResult<PyMatrix> {
        volterra::build_vf(&self.0).map(PyMatrix).map_err(to_py)
    }

    fn convolve(&self, other: &Self) -> PyResult<Self> {
        volterra::convolve(&self.0, &other.0)
            .map(Self)
            .map_err(to_py)
    }

    fn truncated_below(&self, delta: f64) -> PyResult<Self> {
        self.0.truncated_below(delta).map(Self).map_err(to_py)
    }
}

#[pyfunction]
#[pyo3(signature = (m, tol = None, restarts = None))]
fn operator_norm(m: &PyMatrix, tol: Option<f64>, restarts: Option<usize>) -> PyResult<f64> {
    let tol = tol.unwrap_or_else(|| numkit::default_tolerance(m.0.dim()));
    numkit::operator_norm(&m.0, tol, restarts.unwrap_or(numkit::DEFAULT_RESTARTS)).map_err(to_py)
}

#[pyfunction]
fn svd_oracle(m: &PyMatrix) -> PyResult<f64> {
    numkit::svd_oracle(&m.0).map_err(to_py)
}

#[pyfunction]
fn singular_values(m: &PyMatrix) -> PyResult<Vec<f64>> {
    numkit::singular_values(&m.0).map_err(to_py)
}

#[pyfunction]
fn volterra_matrix(dim: usize) -> PyResult<PyMatrix> {
    volterra::volterra(dim).map(PyMatrix).map_err(to_py)
}

/// `(eta0, norm)` for the exact norm of the squared Volterra operator.
#[pyfunction]
fn v2_exact() -> PyResult<(f64, f64)> {
    let v = volterra::v2_exact().map_err(to_py)?;
    Ok((v.eta0, v.norm))
}

#[pyfunction]
fn gauge_conjugate(m: &PyMatrix, lam: Complex64) -> PyResult<PyMatrix> {
    gauge::gauge_conjugate(&m.0, lam)
        .map(PyMatrix)
        .map_err(to_py)
}

/// Fourier coefficients of `m` against the powers `T^1, T^2, ...` of `t`.
#[pyfunction]
#[pyo3(signature = (m, t, nodes = None))]
fn fourier_coefficients(
    m: &PyMatrix,
    t: &PyMatrix,
    nodes: Option<usize>,
) -> PyResult<Vec<(usize, Complex64)>> {
    let n = t.0.dim();
    let grid = CircleGrid::new(nodes.unwrap_or(2 * n)).map_err(to_py)?;
    let powers = t.0.powers(n.saturating_sub(1).max(1));
    let series = gauge::fourier_coefficients(&m.0, &grid, &powers).map_err(to_py)?;
    Ok(series
        .iter()
        .filter(|&(k, _)| series.is_nonzero(k))
        .collect())
}

#[pyclass(name = "Report", module = "opalg", frozen)]
struct PyReport(ExperimentReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn experiment(&self) -> &str {
        &self.0.experiment
    }

    #[getter]
    fn rows(&self) -> Vec<(String, f64)> {
        self.0.rows.clone()
    }

    #[getter]
    fn flags(&self) -> Vec<(String, bool)> {
        self.0.flags.clone()
    }

    fn value(&self, label: &str) -> Option<f64> {
        self.0.value(label)
    }

    fn all_pass(&self) -> bool {
        self.0.all_pass()
    }

    #[pyo3(signature = (format = "csv"))]
    fn emit(&self, format: &str) -> PyResult<String> {
        let f: Format = format.parse().map_err(to_py)?;
        Ok(self.0.emit(f))
    }
}

#[pyfunction]
#[pyo3(signature = (experiment, dim = None, nodes = None, seed = 0, weights = None, kernel = None, nmax = None))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    experiment: String,
    dim: Option<usize>,
    nodes: Option<usize>,
    seed: u64,
    weights: Option<String>,
    kernel: Option<String>,
    nmax: Option<usize>,
) -> PyResult<PyReport> {
    let config = ExperimentConfig {
        dim,
        nodes,
        seed,
        weights,
        kernel,
        n_max: nmax,
        ..ExperimentConfig::new(experiment)
    };
    py.detach(|| experiment::run_experiment(&config))
        .map(PyReport)
        .map_err(to_py)
}

#[pymodule]
fn opalg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyShift>()?;
    m.add_class::<PyKernel>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(svd_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(volterra_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(v2_exact, m)?)?;
    m.add_function(wrap_pyfunction!(gauge_conjugate, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("EXPERIMENTS", experiment::EXPERIMENTS.to_vec())?;
    Ok(())
}
