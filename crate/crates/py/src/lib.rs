//! Python bindings: a `State` class over the catalog plus the measure,
//! threshold, dynamics, and tomography entry points. Matrices cross the
//! boundary as nested lists of (re, im) pairs, matching the CLI state-file
//! schema.

use mbn_core::dynamics::Measure;
use mbn_core::{
    apply_channel, catalog, dephasing_channel, Bipartition, CMatrix, CatalogState, DensityMatrix,
    IbmParams, MbnError,
};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

type Rows = Vec<Vec<(f64, f64)>>;

fn err(e: MbnError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| (m[(i, j)].re, m[(i, j)].im)).collect())
        .collect()
}

fn rows_to_matrix(rows: &Rows) -> PyResult<CMatrix> {
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    let mut m = CMatrix::zeros(d, d);
    for (i, row) in rows.iter().enumerate() {
        for (j, &(re, im)) in row.iter().enumerate() {
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

fn params_for(bip: Bipartition, m: Option<usize>, a: Option<f64>, b: Option<f64>) -> PyResult<IbmParams> {
    let d = IbmParams::defaults(bip);
    IbmParams::new(m.unwrap_or(d.m), a.unwrap_or(d.a), b.unwrap_or(d.b)).map_err(err)
}

/// A bipartite (quasi-)density matrix with its bipartition.
#[pyclass]
#[derive(Clone)]
struct State {
    inner: CatalogState,
}

impl State {
    fn wrap(inner: CatalogState) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl State {
    #[getter]
    fn label(&self) -> String {
        self.inner.label().to_string()
    }

    #[getter]
    fn bipartition(&self) -> (usize, usize) {
        let b = self.inner.bip();
        (b.dim_a, b.dim_b)
    }

    #[getter]
    fn matrix(&self) -> Rows {
        matrix_to_rows(self.inner.rho().matrix())
    }

    #[pyo3(signature = (m=None, a=None, b=None))]
    fn mbn(&self, m: Option<usize>, a: Option<f64>, b: Option<f64>) -> PyResult<f64> {
        let bip = self.inner.bip();
        mbn_core::mbn(self.inner.rho(), bip, params_for(bip, m, a, b)?).map_err(err)
    }

    #[pyo3(signature = (m=None, a=None, b=None))]
    fn violation(&self, m: Option<usize>, a: Option<f64>, b: Option<f64>) -> PyResult<f64> {
        let bip = self.inner.bip();
        mbn_core::violation(self.inner.rho(), bip, params_for(bip, m, a, b)?).map_err(err)
    }

    fn negativity(&self) -> PyResult<f64> {
        mbn_core::negativity(self.inner.rho(), self.inner.bip()).map_err(err)
    }

    fn cm_violation(&self) -> PyResult<f64> {
        mbn_core::cm_value(self.inner.rho(), self.inner.bip()).map_err(err)
    }

    fn gcm_violation(&self) -> PyResult<f64> {
        mbn_core::gcm_value(self.inner.rho(), self.inner.bip()).map_err(err)
    }

    fn min_eigenvalue(&self) -> f64 {
        self.inner.rho().min_eigenvalue()
    }

    fn purity(&self) -> f64 {
        self.inner.rho().purity()
    }

    /// Local dephasing with time constant t2 applied for time t (qubits only).
    fn dephase(&self, t: f64, t2: f64) -> PyResult<State> {
        let dim = self.inner.rho().dim();
        if !dim.is_power_of_two() {
            return Err(PyValueError::new_err("dephase requires a qubit system"));
        }
        let k = dim.trailing_zeros() as usize;
        let ch = dephasing_channel(t, t2, k).map_err(err)?;
        let rho = apply_channel(self.inner.rho(), &ch).map_err(err)?;
        Ok(State::wrap(CatalogState::new(
            format!("{}_dephased", self.inner.label()),
            rho,
            self.inner.bip(),
            self.inner.params().to_vec(),
        )))
    }
}

#[pyfunction]
#[pyo3(signature = (matrix, dim_a, dim_b, quasi=false))]
fn state_from_matrix(matrix: Rows, dim_a: usize, dim_b: usize, quasi: bool) -> PyResult<State> {
    let m = rows_to_matrix(&matrix)?;
    let bip = Bipartition::new(dim_a, dim_b).map_err(err)?;
    bip.check(m.nrows()).map_err(err)?;
    let rho = if quasi {
        DensityMatrix::new_quasi(m)
    } else {
        DensityMatrix::new(m)
    }
    .map_err(err)?;
    Ok(State::wrap(CatalogState::new("custom", rho, bip, vec![])))
}

#[pyfunction]
fn max_entangled(dim_a: usize, dim_b: usize) -> PyResult<State> {
    let bip = Bipartition::new(dim_a, dim_b).map_err(err)?;
    catalog::max_entangled(bip).map(State::wrap).map_err(err)
}

#[pyfunction]
fn horodecki_qutrit(alpha: f64) -> PyResult<State> {
    catalog::horodecki_qutrit(alpha).map(State::wrap).map_err(err)
}

#[pyfunction]
fn toth_4qubit() -> PyResult<State> {
    catalog::toth_4qubit().map(State::wrap).map_err(err)
}

#[pyfunction]
fn bloch_diagonal_bd() -> PyResult<State> {
    catalog::bloch_diagonal_bd().map(State::wrap).map_err(err)
}

#[pyfunction]
fn me_state(k: usize) -> PyResult<State> {
    catalog::me_state(k).map(State::wrap).map_err(err)
}

#[pyfunction]
fn mix_with_identity(state: &State, p: f64) -> PyResult<State> {
    catalog::mix_with_identity(&state.inner, p)
        .map(State::wrap)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (dim_a, dim_b, m=None, a=None, b=None))]
fn ibm_threshold(
    dim_a: usize,
    dim_b: usize,
    m: Option<usize>,
    a: Option<f64>,
    b: Option<f64>,
) -> PyResult<f64> {
    let bip = Bipartition::new(dim_a, dim_b).map_err(err)?;
    Ok(mbn_core::ibm_threshold(params_for(bip, m, a, b)?, bip))
}

/// Median relative errors of the shot-noise experiment; returns
/// {"mbn": float, "negativity": float, "negative_eigenvalue_trials": int}.
#[pyfunction]
#[pyo3(signature = (k, n, trials, seed=7))]
fn error_experiment_medians(
    py: Python<'_>,
    k: usize,
    n: u64,
    trials: usize,
    seed: u64,
) -> PyResult<PyObject> {
    let st = catalog::me_state(k).map_err(err)?;
    let measures = [
        Measure::Mbn(IbmParams::defaults(st.bip())),
        Measure::Negativity,
    ];
    let result = mbn_core::error_experiment(&st, n, trials, &measures, seed).map_err(err)?;
    let dict = pyo3::types::PyDict::new_bound(py);
    for m in &measures {
        dict.set_item(m.name(), result.median_delta(m.name()).map_err(err)?)?;
    }
    dict.set_item(
        "negative_eigenvalue_trials",
        result.negative_eigenvalue_trials,
    )?;
    Ok(dict.into())
}

#[pymodule]
fn mbn_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<State>()?;
    m.add_function(wrap_pyfunction!(state_from_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(max_entangled, m)?)?;
    m.add_function(wrap_pyfunction!(horodecki_qutrit, m)?)?;
    m.add_function(wrap_pyfunction!(toth_4qubit, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_diagonal_bd, m)?)?;
    m.add_function(wrap_pyfunction!(me_state, m)?)?;
    m.add_function(wrap_pyfunction!(mix_with_identity, m)?)?;
    m.add_function(wrap_pyfunction!(ibm_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(error_experiment_medians, m)?)?;
    Ok(())
}
