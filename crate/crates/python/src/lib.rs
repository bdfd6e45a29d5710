//! Python bindings. Results cross the boundary as plain dicts and lists built
//! from the same serialization the CLI reports use.

use critex_core::bubble::{
    condition_one, energy_ratio_direct, energy_ratio_expansion, evaluate_criteria,
    example_11_check, KSpec, ProblemSpec, RadialProfile,
};
use critex_core::constants::dimension_constants;
use critex_core::green::{geometry_constants, BallGeometry};
use critex_core::pohozaev::{
    build_psibar, certify_nonexistence, estimate_mu_n, pohozaev_sides, Identity, Multiplier,
};
use critex_core::shoot::{find_ground_state, GroundState, ShootOptions};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(critex_py, CritexError, PyException);

fn core_err(e: critex_core::Error) -> PyErr {
    use critex_core::Error as E;
    match e {
        E::InvalidParameter(_) | E::Domain(_) | E::UnsupportedDimension { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => CritexError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| CritexError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// A radial problem −Δu = K u^p + μu on the unit ball with
/// K = f0 + η f₁(|x − y0|).
#[pyclass(name = "Problem", module = "critex_py", frozen)]
pub struct PyProblem {
    inner: ProblemSpec,
}

#[pymethods]
impl PyProblem {
    /// `f1` is a list of coefficients [c2, c3, …] of t², t³, … or the name
    /// "neg_t2".
    #[new]
    #[pyo3(signature = (n, mu, f0=1.0, eta=0.0, f1=None, y0=None))]
    fn new(
        n: u32,
        mu: f64,
        f0: f64,
        eta: f64,
        f1: Option<&Bound<'_, PyAny>>,
        y0: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let profile = match f1 {
            None => RadialProfile::zero(),
            Some(obj) => match obj.extract::<String>() {
                Ok(name) if name == "neg_t2" => RadialProfile::neg_t2(),
                Ok(name) => return Err(PyValueError::new_err(format!("unknown profile {name:?}"))),
                Err(_) => RadialProfile::polynomial(obj.extract::<Vec<f64>>()?),
            },
        };
        let kspec = KSpec::general(f0, eta, profile, None).map_err(core_err)?;
        let geom = match y0 {
            Some(y) => BallGeometry::new(n, y).map_err(core_err)?,
            None => BallGeometry::centered(n),
        };
        Ok(Self { inner: ProblemSpec::new(geom, kspec, mu).map_err(core_err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu
    }

    #[getter]
    fn first_eigenvalue(&self) -> f64 {
        self.inner.mu1
    }

    fn admissible(&self) -> bool {
        self.inner.admissible()
    }

    fn with_mu(&self, mu: f64) -> PyResult<Self> {
        Ok(Self { inner: self.inner.with_mu(mu).map_err(core_err)? })
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }

    fn condition_one(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &condition_one(&self.inner))
    }

    #[pyo3(signature = (lambdas=vec![10.0, 20.0, 40.0, 80.0]))]
    fn criteria(&self, py: Python<'_>, lambdas: Vec<f64>) -> PyResult<Py<PyAny>> {
        let r = py.detach(|| evaluate_criteria(&self.inner, &lambdas)).map_err(core_err)?;
        to_py(py, &r)
    }

    /// A^{n/(n−2)} by quadrature.
    fn energy_direct(&self, py: Python<'_>, lam: f64) -> PyResult<Py<PyAny>> {
        to_py(py, &energy_ratio_direct(&self.inner, lam).map_err(core_err)?)
    }

    /// A^{n/(n−2)} from the asymptotic expansion.
    fn energy_expansion(&self, lam: f64) -> PyResult<f64> {
        energy_ratio_expansion(&self.inner, lam).map_err(core_err)
    }

    fn certify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let c = py.detach(|| certify_nonexistence(&self.inner)).map_err(core_err)?;
        to_py(py, &c)
    }

    /// Ground state search; the dict carries `status` and, when found, the
    /// profile samples and the classical Pohozaev balance.
    #[pyo3(signature = (alpha_min=0.1, alpha_max=1e4))]
    fn shoot(&self, py: Python<'_>, alpha_min: f64, alpha_max: f64) -> PyResult<Py<PyAny>> {
        let (state, sides) = py
            .detach(|| -> critex_core::Result<_> {
                let g = find_ground_state(&self.inner, alpha_min, alpha_max, &ShootOptions::default())?;
                let sides = match &g {
                    GroundState::Found { solution, .. } => Some(pohozaev_sides(solution, &Identity)?),
                    GroundState::NotFound { .. } => None,
                };
                Ok((g, sides))
            })
            .map_err(core_err)?;
        let out = to_py(py, &state)?;
        if let Some(s) = sides {
            out.bind(py).set_item("pohozaev", to_py(py, &s)?)?;
        }
        Ok(out)
    }

    fn __repr__(&self) -> String {
        let k = &self.inner.kspec;
        format!("Problem(n={}, mu={}, f0={}, eta={})", self.inner.n(), self.inner.mu, k.f0, k.eta)
    }
}

#[pyfunction]
fn constants(py: Python<'_>, n: u32) -> PyResult<Py<PyAny>> {
    to_py(py, &dimension_constants(n).map_err(core_err)?)
}

#[pyfunction]
#[pyo3(signature = (n, mu, y0=None))]
fn geometry(py: Python<'_>, n: u32, mu: f64, y0: Option<Vec<f64>>) -> PyResult<Py<PyAny>> {
    let consts = dimension_constants(n).map_err(core_err)?;
    let geom = match y0 {
        Some(y) => BallGeometry::new(n, y).map_err(core_err)?,
        None => BallGeometry::centered(n),
    };
    to_py(py, &geometry_constants(&geom, mu, &consts).map_err(core_err)?)
}

#[pyfunction]
fn psibar(py: Python<'_>, n: u32, mu: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &build_psibar(n, mu).map_err(core_err)?)
}

/// (t, ψ̄(t)) on a uniform grid of [0, 1].
#[pyfunction]
#[pyo3(signature = (n, mu, points=200))]
fn psibar_samples(n: u32, mu: f64, points: usize) -> PyResult<Vec<(f64, f64)>> {
    if points == 0 {
        return Err(PyValueError::new_err("points must be positive"));
    }
    let c = build_psibar(n, mu).map_err(core_err)?;
    Ok((0..=points)
        .map(|i| {
            let t = i as f64 / points as f64;
            (t, c.psibar.jet(t).value)
        })
        .collect())
}

#[pyfunction]
#[pyo3(signature = (a, b, mu, f0=1.0))]
fn example11(py: Python<'_>, a: f64, b: f64, mu: f64, f0: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &example_11_check(a, b, mu, f0).map_err(core_err)?)
}

/// Largest μ at which both multiplier sign certificates hold.
#[pyfunction]
fn mu_limit(py: Python<'_>, n: u32) -> PyResult<Py<PyAny>> {
    to_py(py, &py.detach(|| estimate_mu_n(n)).map_err(core_err)?)
}

#[pymodule]
fn critex_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("CritexError", m.py().get_type::<CritexError>())?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(geometry, m)?)?;
    m.add_function(wrap_pyfunction!(psibar, m)?)?;
    m.add_function(wrap_pyfunction!(psibar_samples, m)?)?;
    m.add_function(wrap_pyfunction!(example11, m)?)?;
    m.add_function(wrap_pyfunction!(mu_limit, m)?)?;
    Ok(())
}
