//! Python bindings: Pauli sums, Majorana modes, transfer matrices, circuits,
//! duality operators, charges and the verification driver.
//!
//! Dense operators cross the boundary as nested lists of complex numbers
//! (row-major), which `numpy.array` accepts directly.

use lab::charges::{closed_q1, closed_q2, closed_qr, hamiltonian_majorana};
use lab::circuits::{self, Sign};
use lab::duality;
use lab::fermion::{self, Majoranas};
use lab::lax::{self, Inhomogeneity, ModeRep};
use lab::suites::{self, RunConfig};
use lab::{DenseOperator, Error, PauliSum};
use num_complex::Complex64;
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dense(op: &DenseOperator) -> Vec<Vec<Complex64>> {
    let m = op.matrix();
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

fn sign(s: &str) -> PyResult<Sign> {
    match s {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "minus" => Ok(Sign::Minus),
        _ => Err(PyValueError::new_err(format!("sign must be 'plus' or 'minus', got {s:?}"))),
    }
}

/// Sum of Pauli strings with complex coefficients on `n` sites.
#[pyclass(name = "PauliSum", module = "ising_lab", from_py_object)]
#[derive(Clone)]
struct PyPauliSum {
    inner: PauliSum,
}

impl From<PauliSum> for PyPauliSum {
    fn from(inner: PauliSum) -> Self {
        PyPauliSum { inner }
    }
}

#[pymethods]
impl PyPauliSum {
    /// `PauliSum.from_label(n, "X1Z3", coeff=1)`.
    #[staticmethod]
    #[pyo3(signature = (n, label, coeff = Complex64::new(1.0, 0.0)))]
    fn from_label(n: usize, label: &str, coeff: Complex64) -> PyResult<Self> {
        PauliSum::from_label(n, label, coeff).map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn identity(n: usize) -> PyResult<Self> {
        PauliSum::identity(n).map(Into::into).map_err(err)
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    /// `[(label, coeff), ...]` in canonical order.
    fn terms(&self) -> Vec<(String, Complex64)> {
        self.inner.iter().map(|(t, c)| (t.label(), c)).collect()
    }

    fn coefficient(&self, label: &str) -> PyResult<Complex64> {
        self.inner.coefficient_of(label).map_err(err)
    }

    fn commutator(&self, other: &PyPauliSum) -> PyResult<Self> {
        self.inner.commutator(&other.inner).map(Into::into).map_err(err)
    }

    fn anticommutator(&self, other: &PyPauliSum) -> PyResult<Self> {
        self.inner.anticommutator(&other.inner).map(Into::into).map_err(err)
    }

    fn dagger(&self) -> Self {
        self.inner.dagger().into()
    }

    fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    #[pyo3(signature = (tol = 1e-12))]
    fn is_hermitian(&self, tol: f64) -> bool {
        self.inner.is_hermitian(tol)
    }

    fn to_dense(&self) -> PyResult<Vec<Vec<Complex64>>> {
        self.inner.to_dense().map(|d| dense(&d)).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __add__(&self, other: &PyPauliSum) -> PyResult<Self> {
        self.inner.checked_add(&other.inner).map(Into::into).map_err(err)
    }

    fn __sub__(&self, other: &PyPauliSum) -> PyResult<Self> {
        self.inner.checked_sub(&other.inner).map(Into::into).map_err(err)
    }

    fn __neg__(&self) -> Self {
        (-&self.inner).into()
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(p) = other.extract::<PyPauliSum>() {
            return self.inner.checked_mul(&p.inner).map(Into::into).map_err(err);
        }
        if let Ok(c) = other.extract::<Complex64>() {
            return Ok(self.inner.scale(c).into());
        }
        Err(PyTypeError::new_err("PauliSum can be multiplied by a PauliSum or a number"))
    }

    fn __rmul__(&self, other: Complex64) -> Self {
        self.inner.scale(other).into()
    }

    fn __eq__(&self, other: &PyPauliSum) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PauliSum(n={}, terms={})", self.inner.n_sites(), self.inner.len())
    }
}

/// `Γ_j`, 1-based.
#[pyfunction]
fn jw_gamma(j: usize, n: usize) -> PyResult<PyPauliSum> {
    fermion::jw_gamma(j, n).map(Into::into).map_err(err)
}

#[pyfunction]
fn spin_parity(n: usize) -> PyResult<PyPauliSum> {
    fermion::spin_parity(n).map(Into::into).map_err(err)
}

/// Twisted translation `U` as a Pauli sum.
#[pyfunction]
fn twisted_translation(n: usize) -> PyResult<PyPauliSum> {
    duality::twisted_translation(n).map(Into::into).map_err(err)
}

/// `τ(λ|η)` for an explicit inhomogeneity vector of length `2n`.
#[pyfunction]
fn transfer(lam: f64, eta: Vec<f64>, n: usize) -> PyResult<Vec<Vec<Complex64>>> {
    let rep = ModeRep::new(n).map_err(err)?;
    let eta = Inhomogeneity::new(eta, n).map_err(err)?;
    lax::transfer(lam, &eta, &rep).map(|d| dense(&d)).map_err(err)
}

/// `τ(λ|ω)` with the staggered inhomogeneity `(ω/2, −ω/2, …)`.
#[pyfunction]
fn staggered_transfer(lam: f64, omega: f64, n: usize) -> PyResult<Vec<Vec<Complex64>>> {
    let rep = ModeRep::new(n).map_err(err)?;
    lax::transfer(lam, &Inhomogeneity::staggered(omega, n), &rep).map(|d| dense(&d)).map_err(err)
}

/// Trace calibration scalar `c` with `τ(0|0) = cU`.
#[pyfunction]
fn calibration(n: usize) -> PyResult<Complex64> {
    lax::calibrate_trace_convention(n).map_err(err)
}

/// `V(Ω; h, J)`.
#[pyfunction]
#[pyo3(signature = (omega, n, h = 1.0, j = 1.0))]
fn trotter_circuit(omega: f64, n: usize, h: f64, j: f64) -> PyResult<Vec<Vec<Complex64>>> {
    circuits::v_first_order(omega, h, j, n).map(|d| dense(&d)).map_err(err)
}

/// Majorana form `𝒱(Ω)`.
#[pyfunction]
fn majorana_circuit(omega: f64, n: usize) -> PyResult<Vec<Vec<Complex64>>> {
    let m = Majoranas::new(n).map_err(err)?;
    circuits::v_majorana(omega, &m).map(|d| dense(&d)).map_err(err)
}

/// `V^F(t; h, J) = e^{−ihtH_A} e^{−iJtH_B}`.
#[pyfunction]
#[pyo3(signature = (t, n, h = 1.0, j = 1.0))]
fn floquet_circuit(t: f64, n: usize, h: f64, j: f64) -> PyResult<Vec<Vec<Complex64>>> {
    circuits::floquet(t, h, j, n).map(|d| dense(&d)).map_err(err)
}

/// Critical Hamiltonian `−Σ Z_j − Σ X_jX_{j+1}` with couplings `h`, `J`.
#[pyfunction]
#[pyo3(signature = (n, h = 1.0, j = 1.0))]
fn tfim(n: usize, h: f64, j: f64) -> PyResult<PyPauliSum> {
    circuits::tfim(h, j, n).map(Into::into).map_err(err)
}

/// Duality operators: `kind` is `"d"`, `"plus"`, `"minus"`, `"floquet_plus"` or
/// `"floquet_minus"`; `param` is `Ω` or `t`.
#[pyfunction]
#[pyo3(signature = (kind, n, param = 0.0))]
fn kw_operator(kind: &str, n: usize, param: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let op = match kind {
        "d" => duality::kw_continuous(n),
        "plus" => duality::kw_trotterized(param, Sign::Plus, n),
        "minus" => duality::kw_trotterized(param, Sign::Minus, n),
        "floquet_plus" => duality::kw_floquet(param, Sign::Plus, n),
        "floquet_minus" => duality::kw_floquet(param, Sign::Minus, n),
        other => return Err(PyValueError::new_err(format!("unknown duality kind {other:?}"))),
    }
    .map_err(err)?;
    Ok(dense(&op.matrix))
}

/// Translation `T` by one site.
#[pyfunction]
fn translation(n: usize) -> PyResult<Vec<Vec<Complex64>>> {
    duality::translation(n).map(|d| dense(&d)).map_err(err)
}

/// Closed-form charge: `r = 1, 2` give `Q⁽ʳ⁾±(ω)`; `sign = None` gives `Q_r`.
#[pyfunction]
#[pyo3(signature = (r, n, omega = 0.0, sign = None))]
fn charge(r: usize, n: usize, omega: f64, sign: Option<&str>) -> PyResult<PyPauliSum> {
    let m = Majoranas::new(n).map_err(err)?;
    let op = match (r, sign) {
        (_, None) => closed_qr(r, &m),
        (1, Some(s)) => closed_q1(self::sign(s)?, omega, &m).map(|c| c.operator),
        (2, Some(s)) => closed_q2(self::sign(s)?, omega, &m).map(|c| c.operator),
        _ => return Err(PyValueError::new_err("signed charges exist for r = 1, 2")),
    };
    op.map(Into::into).map_err(err)
}

/// `H = iΣ(−1)^{δ_{j,2N}} Γ_jΓ_{j+1}`.
#[pyfunction]
fn majorana_hamiltonian(n: usize) -> PyResult<PyPauliSum> {
    let m = Majoranas::new(n).map_err(err)?;
    hamiltonian_majorana(&m).map(Into::into).map_err(err)
}

fn config(toml_text: Option<&str>) -> PyResult<RunConfig> {
    match toml_text {
        Some(t) => RunConfig::from_toml(t).map_err(err),
        None => Ok(RunConfig::default()),
    }
}

/// Runs the verification suites; returns the JSON report.
#[pyfunction]
#[pyo3(signature = (config_toml = None))]
fn verify(py: Python<'_>, config_toml: Option<&str>) -> PyResult<String> {
    let cfg = config(config_toml)?;
    let report = py.detach(|| suites::verify(&cfg)).map_err(err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Charge table as JSON.
#[pyfunction]
#[pyo3(signature = (config_toml = None))]
fn charges_table(py: Python<'_>, config_toml: Option<&str>) -> PyResult<String> {
    let cfg = config(config_toml)?;
    let rows = py.detach(|| suites::charges_report(&cfg)).map_err(err)?;
    serde_json::to_string(&rows).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn ising_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPauliSum>()?;
    m.add_function(wrap_pyfunction!(jw_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(spin_parity, m)?)?;
    m.add_function(wrap_pyfunction!(twisted_translation, m)?)?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add_function(wrap_pyfunction!(staggered_transfer, m)?)?;
    m.add_function(wrap_pyfunction!(calibration, m)?)?;
    m.add_function(wrap_pyfunction!(trotter_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(majorana_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(floquet_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(tfim, m)?)?;
    m.add_function(wrap_pyfunction!(kw_operator, m)?)?;
    m.add_function(wrap_pyfunction!(translation, m)?)?;
    m.add_function(wrap_pyfunction!(charge, m)?)?;
    m.add_function(wrap_pyfunction!(majorana_hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(charges_table, m)?)?;
    Ok(())
}
