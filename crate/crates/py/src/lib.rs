//! Python bindings for the `spin_squeeze` crate.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::spin_squeeze as ss;
use ::spin_squeeze::crosscheck::{
    default_betas, default_grid, default_mus, product_grid, DEFAULT_TOL,
};
use ::spin_squeeze::frame::DEFAULT_FRAME_EPS;
use ::spin_squeeze::sweep::{write_csv, OutputFormat};

fn to_py(e: ss::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Superposition parameters `(beta, mu, nu)`, angles in radians.
#[pyclass(name = "SqueezeParams", frozen)]
struct PySqueezeParams(ss::SqueezeParams);

#[pymethods]
impl PySqueezeParams {
    #[new]
    fn new(beta: f64, mu: f64, nu: f64) -> PyResult<Self> {
        ss::SqueezeParams::new(beta, mu, nu)
            .map(Self)
            .map_err(to_py)
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.0.mu()
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.0.nu()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    /// State amplitudes over `m = +1, 0, -1`.
    fn state(&self) -> Vec<num_complex::Complex64> {
        ss::build_superposition_state(&self.0).amplitudes().to_vec()
    }

    /// Mean spin from the closed forms.
    fn mean_spin_closed_form(&self) -> (f64, f64, f64) {
        let m = ss::mean_spin_closed_form(&self.0);
        (m.jx, m.jy, m.jz)
    }

    /// Mean spin length from the simplified closed form.
    fn mean_spin_length(&self) -> f64 {
        ss::mean_spin_length_closed_form(&self.0)
    }

    /// `(jn1_sq, jn2_sq, anticomm)` from the printed closed forms, or `None`
    /// when the mean spin vanishes.
    fn frame_moments_closed_form(&self) -> Option<(f64, f64, f64)> {
        let frame = ss::compute_frame(&ss::mean_spin_closed_form(&self.0), DEFAULT_FRAME_EPS);
        ss::frame_moments_closed_form(&self.0, &frame)
            .ok()
            .map(|f| (f.jn1_sq, f.jn2_sq, f.anticomm))
    }

    fn squeeze(&self) -> PyResult<PySqueezeResult> {
        ss::squeeze_oracle(&self.0)
            .map(PySqueezeResult)
            .map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "SqueezeParams(beta={}, mu={}, nu={})",
            self.0.beta(),
            self.0.mu(),
            self.0.nu()
        )
    }
}

/// Direct operator evaluation of one parameter point.
#[pyclass(name = "SqueezeResult", frozen)]
struct PySqueezeResult(ss::SqueezeResult);

#[pymethods]
impl PySqueezeResult {
    #[getter]
    fn mean(&self) -> (f64, f64, f64) {
        (self.0.mean.jx, self.0.mean.jy, self.0.mean.jz)
    }

    #[getter]
    fn r(&self) -> f64 {
        self.0.frame.r
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.0.frame.theta
    }

    #[getter]
    fn phi(&self) -> f64 {
        self.0.frame.phi
    }

    #[getter]
    fn frame_status(&self) -> &'static str {
        self.0.frame_status.as_str()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.as_str()
    }

    #[getter]
    fn lambda_min(&self) -> f64 {
        self.0.lambda_min
    }

    #[getter]
    fn search_lambda_min(&self) -> f64 {
        self.0.search_lambda_min
    }

    #[getter]
    fn chi_min(&self) -> Option<f64> {
        self.0.chi_min
    }

    #[getter]
    fn frame_moments(&self) -> Option<(f64, f64, f64)> {
        self.0
            .frame_moments
            .map(|f| (f.jn1_sq, f.jn2_sq, f.anticomm))
    }

    #[getter]
    fn xi2_std(&self) -> f64 {
        self.0.xi2_std
    }

    #[getter]
    fn xi2_literal(&self) -> f64 {
        self.0.xi2_literal
    }

    #[getter]
    fn concurrence(&self) -> f64 {
        self.0.concurrence
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!(
            "SqueezeResult(R={:.6}, xi2_std={:.6}, concurrence={:.6}, method={})",
            self.0.frame.r, self.0.xi2_std, self.0.concurrence, self.0.method
        )
    }
}

/// Evaluates one point through the operator oracle.
#[pyfunction]
fn squeeze(beta: f64, mu: f64, nu: f64) -> PyResult<PySqueezeResult> {
    PySqueezeParams::new(beta, mu, nu)?.squeeze()
}

/// Compares closed forms with the oracle; returns the report as JSON.
/// Without `nu_list` the default grid is used.
#[pyfunction]
#[pyo3(signature = (nu_list=None, tol=DEFAULT_TOL))]
fn crosscheck(py: Python<'_>, nu_list: Option<Vec<f64>>, tol: f64) -> PyResult<String> {
    let grid = match nu_list {
        Some(nus) => product_grid(&default_betas(), &default_mus(), &nus).map_err(to_py)?,
        None => default_grid(),
    };
    let report = py
        .detach(|| ss::run_crosscheck(&grid, tol))
        .map_err(to_py)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs a sweep and returns it as CSV text in the standard column order.
#[pyfunction]
#[pyo3(signature = (mu_list, nu_list, beta_min=0.0, beta_max=1.0, beta_steps=101, threads=None))]
fn sweep(
    py: Python<'_>,
    mu_list: Vec<f64>,
    nu_list: Vec<f64>,
    beta_min: f64,
    beta_max: f64,
    beta_steps: usize,
    threads: Option<usize>,
) -> PyResult<String> {
    let spec = ss::SweepSpec {
        mu_values: mu_list,
        nu_values: nu_list,
        beta_min,
        beta_max,
        beta_steps,
        convention: ss::Convention::Standard,
        format: OutputFormat::Csv,
    };
    let rows = py.detach(|| ss::run_sweep(&spec, threads)).map_err(to_py)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(to_py)?;
    String::from_utf8(buf).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Runs the `fig1` or `fig2` sweep and returns its shape summary as JSON.
#[pyfunction]
fn figure_summary(py: Python<'_>, name: &str) -> PyResult<String> {
    let name = ss::FigureName::parse(name).map_err(to_py)?;
    let out = py.detach(|| ss::run_figure(name, None)).map_err(to_py)?;
    serde_json::to_string(&out.summary).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule(name = "spin_squeeze")]
fn spin_squeeze_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySqueezeParams>()?;
    m.add_class::<PySqueezeResult>()?;
    m.add_function(wrap_pyfunction!(squeeze, m)?)?;
    m.add_function(wrap_pyfunction!(crosscheck, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(figure_summary, m)?)?;
    Ok(())
}
