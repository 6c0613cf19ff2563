//! Python bindings: spectra, simulations and decay fits driven from scenario TOML.

use std::f64::consts::PI;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use blackstock::block::{self, PdeParams};
use blackstock::compat;
use blackstock::decay::{self, Channel, NormSeries};
use blackstock::extension;
use blackstock::linear;
use blackstock::nonlinear;
use blackstock::scenario::{self, Scenario};
use blackstock::spectral::{BoundaryKind, SpectralDomain};
use blackstock::Error;

fn to_py(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn boundary(bc: &str) -> PyResult<BoundaryKind> {
    match bc.to_ascii_lowercase().as_str() {
        "dirichlet" => Ok(BoundaryKind::Dirichlet),
        "neumann" => Ok(BoundaryKind::Neumann),
        other => Err(PyValueError::new_err(format!("unknown boundary condition {other:?}"))),
    }
}

fn interval(bc: &str, length: f64, modes: usize) -> PyResult<std::sync::Arc<SpectralDomain>> {
    SpectralDomain::interval(length, boundary(bc)?, modes).map_err(to_py)
}

/// `(ω₀, attaining branch)` on an interval.
#[pyfunction]
#[pyo3(signature = (a, b, c, bc = "dirichlet", length = PI, modes = 32))]
fn omega0(a: f64, b: f64, c: f64, bc: &str, length: f64, modes: usize) -> PyResult<(f64, String)> {
    let p = PdeParams::linear(a, b, c).map_err(to_py)?;
    let d = interval(bc, length, modes)?;
    let w = block::omega0(&p, &d);
    let which = match w.attaining {
        block::Attainment::Heat { .. } => "heat",
        block::Attainment::Oscillatory { .. } => "oscillatory",
        block::Attainment::AccumulationAtInfinity => "accumulation",
    };
    Ok((w.omega0, which.to_string()))
}

/// Rows `(λ, Re μ₁, Im μ₁, Re μ₂, Im μ₂, aλ)` for every retained mode.
#[pyfunction]
#[pyo3(signature = (a, b, c, bc = "dirichlet", length = PI, modes = 32))]
fn spectrum(a: f64, b: f64, c: f64, bc: &str, length: f64, modes: usize) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64)>> {
    let p = PdeParams::linear(a, b, c).map_err(to_py)?;
    let d = interval(bc, length, modes)?;
    Ok(block::spectrum_table(&p, &d)
        .into_iter()
        .map(|(l, m1, m2, m3)| (l, m1.re, m1.im, m2.re, m2.im, m3))
        .collect())
}

#[pyfunction]
fn mode_rate(lam: f64, a: f64, b: f64, c: f64) -> PyResult<f64> {
    let p = PdeParams::linear(a, b, c).map_err(to_py)?;
    Ok(block::mode_rate(lam, &p))
}

/// Coefficients `c[i][j]` of the exponential extension and the condition number.
#[pyfunction]
fn extension_coefficients(l: usize) -> PyResult<(Vec<Vec<f64>>, f64)> {
    let c = extension::vandermonde_coeffs(l).map_err(to_py)?;
    Ok((c.c, c.condition))
}

/// Exact determinant of the extension matrix as a decimal string.
#[pyfunction]
fn extension_determinant(l: usize) -> String {
    extension::vandermonde_det(l).to_string()
}

#[pyfunction]
fn preset(name: &str) -> PyResult<String> {
    Ok(scenario::preset(name).map_err(to_py)?.to_toml())
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    scenario::PRESETS.to_vec()
}

/// Runs a scenario; `mode` is `linear`, `nonlinear` or `picard`. Returns a dict of columns.
#[pyfunction]
#[pyo3(signature = (scenario_toml, mode = "linear", force = false))]
fn simulate<'py>(py: Python<'py>, scenario_toml: &str, mode: &str, force: bool) -> PyResult<Bound<'py, PyDict>> {
    let sc = Scenario::from_toml(scenario_toml).map_err(to_py)?;
    let traj = py.allow_threads(|| -> blackstock::Result<_> {
        let domain = sc.domain.build()?;
        let data = sc.problem(&domain)?;
        let params = sc.params();
        let cfg = sc.sim_config(force);
        match mode {
            "linear" => {
                let opts = sc.linear_options(force);
                if data.has_homogeneous_bc() && !opts.mean_ode {
                    linear::solve_direct(&domain, &params, &data, &opts)
                } else {
                    linear::solve_bc_linear(&domain, &params, &data, &opts)
                }
            }
            "nonlinear" => nonlinear::simulate(&domain, &cfg, &data),
            "picard" => nonlinear::picard_solve(&domain, &cfg, &data).map(|o| o.trajectory),
            other => Err(Error::InvalidParameter(format!("unknown mode {other:?}"))),
        }
    });
    let traj = traj.map_err(to_py)?;
    let norms = NormSeries::from_trajectory(&traj);
    let out = PyDict::new_bound(py);
    out.set_item("time", &norms.times)?;
    for c in Channel::ALL {
        out.set_item(c.name(), norms.channel(c))?;
    }
    let signed: Vec<f64> = traj.states.iter().map(|s| s.u.mean()).collect();
    out.set_item("mean_u", signed)?;
    if !traj.guard.is_empty() {
        out.set_item("guard_min", &traj.guard)?;
    }
    Ok(out)
}

/// Log-linear decay fit; returns `(rate, intercept, r_squared)`.
#[pyfunction]
#[pyo3(signature = (times, values, window = None))]
fn fit_decay(times: Vec<f64>, values: Vec<f64>, window: Option<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let series = NormSeries::single(times, Channel::L2U, values);
    let fit = decay::fit_decay(&series, Channel::L2U, window).map_err(to_py)?;
    Ok((fit.rate, fit.intercept, fit.r_squared))
}

/// `(passed, JSON report)` of the boundary compatibility conditions.
#[pyfunction]
fn check_compat(scenario_toml: &str) -> PyResult<(bool, String)> {
    let sc = Scenario::from_toml(scenario_toml).map_err(to_py)?;
    let domain = sc.domain.build().map_err(to_py)?;
    let data = sc.problem(&domain).map_err(to_py)?;
    let report = compat::check_problem(&domain, &data, sc.compat.tolerance).map_err(to_py)?;
    let json = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok((report.passed, json))
}

#[pymodule]
pub fn blackstock_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(omega0, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(mode_rate, m)?)?;
    m.add_function(wrap_pyfunction!(extension_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(extension_determinant, m)?)?;
    m.add_function(wrap_pyfunction!(preset, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(fit_decay, m)?)?;
    m.add_function(wrap_pyfunction!(check_compat, m)?)?;
    Ok(())
}
