//! Python module `knorm`: ground states, the scalar reduction, verdicts and
//! the gradient-flow oracle.

use knorm_core::classifier::{self, Verdict as CoreVerdict};
use knorm_core::ground_state::{self, GroundStateProfile, QNorms, SolverConfig};
use knorm_core::oracle::{self, FlowConfig, FlowGrid};
use knorm_core::scalar_reduction::{self, CriticalPoint, Params as CoreParams, ScalarReduction};
use knorm_core::Error;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(knorm, NumericalError, PyException, "A solver or check did not converge.");

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Inadmissible(_) | Error::InvalidInput(_) => PyValueError::new_err(err.to_string()),
        _ => NumericalError::new_err(err.to_string()),
    }
}

fn json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("core types serialize")
}

#[pyclass(frozen, skip_from_py_object, name = "Params")]
#[derive(Clone)]
struct Params(CoreParams);

#[pymethods]
impl Params {
    #[new]
    #[pyo3(signature = (dim, p, a = 1.0, b = 1.0, c = 1.0))]
    fn new(dim: u32, p: f64, a: f64, b: f64, c: f64) -> PyResult<Self> {
        CoreParams::new(dim, p, a, b, c).map(Params).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> u32 {
        self.0.dim
    }
    #[getter]
    fn p(&self) -> f64 {
        self.0.p
    }
    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }
    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }
    #[getter]
    fn c(&self) -> f64 {
        self.0.c
    }

    fn with_c(&self, c: f64) -> PyResult<Self> {
        let next = self.0.with_c(c);
        next.validate().map_err(to_py)?;
        Ok(Params(next))
    }

    /// Regime name of (N, p).
    fn regime(&self) -> String {
        classifier::Regime::of(self.0.dim, self.0.p).as_str().to_string()
    }

    fn __repr__(&self) -> String {
        let p = &self.0;
        format!("Params(dim={}, p={:?}, a={:?}, b={:?}, c={:?})", p.dim, p.p, p.a, p.b, p.c)
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Norms")]
#[derive(Clone)]
struct Norms {
    inner: QNorms,
    p: f64,
}

#[pymethods]
impl Norms {
    #[getter]
    fn mass_sq(&self) -> f64 {
        self.inner.mass_sq
    }
    #[getter]
    fn grad_sq(&self) -> f64 {
        self.inner.grad_sq
    }
    #[getter]
    fn pnorm(&self) -> f64 {
        self.inner.pnorm
    }
    #[getter]
    fn q_l2(&self) -> f64 {
        self.inner.q_l2
    }
    /// Sharp Gagliardo-Nirenberg constant built from |Q|_{L²}.
    #[getter]
    fn gn_constant(&self) -> f64 {
        ground_state::gn_constant(&self.inner, self.p)
    }
    /// Both Pohozaev residuals.
    fn pohozaev_residuals(&self) -> (f64, f64) {
        let r = ground_state::check_pohozaev(&self.inner, self.p, f64::INFINITY);
        (r.grad_vs_mass, r.grad_vs_pnorm)
    }
    fn to_json(&self) -> String {
        json(&self.inner)
    }
}

#[pyclass(frozen, name = "GroundState")]
struct GroundState(GroundStateProfile);

#[pymethods]
impl GroundState {
    #[getter]
    fn dim(&self) -> u32 {
        self.0.dim()
    }
    #[getter]
    fn p(&self) -> f64 {
        self.0.p()
    }
    #[getter]
    fn q0(&self) -> f64 {
        self.0.q0
    }
    #[getter]
    fn r(&self) -> Vec<f64> {
        self.0.r_grid.clone()
    }
    #[getter]
    fn values(&self) -> Vec<f64> {
        self.0.values.clone()
    }
    fn norms(&self) -> PyResult<Norms> {
        let inner = ground_state::compute_norms(&self.0).map_err(to_py)?;
        Ok(Norms { inner, p: self.0.p() })
    }
    fn ode_residual(&self) -> PyResult<f64> {
        self.0.ode_residual().map_err(to_py)
    }
    /// Profile as CSV with header `r,Q`.
    fn to_csv(&self) -> String {
        self.0.to_csv()
    }
    fn __len__(&self) -> usize {
        self.0.values.len()
    }
}

/// Solves for the radial ground state Q of (N, p).
#[pyfunction]
#[pyo3(signature = (dim, p, step = None, r_max_scale = None))]
fn solve_ground_state(py: Python<'_>, dim: u32, p: f64, step: Option<f64>, r_max_scale: Option<f64>) -> PyResult<GroundState> {
    let mut cfg = SolverConfig::default();
    if let Some(s) = step {
        cfg.step = s;
    }
    if let Some(r) = r_max_scale {
        cfg.r_max_scale = r;
    }
    py.detach(|| ground_state::solve_ground_state(dim, p, &cfg)).map(GroundState).map_err(to_py)
}

/// |Q|_{L²} for (N, p) with default solver settings.
#[pyfunction]
fn q_l2(py: Python<'_>, dim: u32, p: f64) -> PyResult<f64> {
    py.detach(|| {
        let q = ground_state::solve_ground_state(dim, p, &SolverConfig::default())?;
        ground_state::compute_norms(&q).map(|n| n.q_l2)
    })
    .map_err(to_py)
}

fn point(cp: CriticalPoint) -> (f64, f64) {
    (cp.t_star, cp.f_value)
}

#[pyclass(frozen, name = "Reduction")]
struct Reduction(ScalarReduction);

#[pymethods]
impl Reduction {
    fn f(&self, t: f64) -> f64 {
        self.0.f(t)
    }
    fn df(&self, t: f64) -> f64 {
        self.0.df(t)
    }
    fn d2f(&self, t: f64) -> f64 {
        self.0.d2f(t)
    }
    fn stationary_points(&self) -> Vec<f64> {
        self.0.stationary_points()
    }
    /// (t, f(t)) at the global minimum over t > 0.
    fn global_min(&self) -> PyResult<(f64, f64)> {
        self.0.global_min().map(point).map_err(to_py)
    }
    /// (t, f(t)) at the mountain pass maximum.
    fn global_max(&self) -> PyResult<(f64, f64)> {
        self.0.global_max().map(point).map_err(to_py)
    }
    /// (t0, f(t0)) at the Young equality point.
    fn young_point(&self) -> PyResult<(f64, f64)> {
        self.0.young_point().map(point).map_err(to_py)
    }
    /// (c*, c_*), each None where it does not exist.
    fn thresholds(&self) -> (Option<f64>, Option<f64>) {
        let th = self.0.thresholds();
        (th.c_star_mass, th.c_star_mp)
    }
}

#[pyfunction]
fn build_reduction(params: &Params, q_l2: f64) -> PyResult<Reduction> {
    scalar_reduction::build_reduction(&params.0, q_l2).map(Reduction).map_err(to_py)
}

#[pyclass(frozen, name = "Verdict")]
struct Verdict(CoreVerdict);

#[pymethods]
impl Verdict {
    #[getter]
    fn regime(&self) -> &'static str {
        self.0.regime.as_str()
    }
    #[getter]
    fn minimizer_exists(&self) -> bool {
        self.0.minimizer_exists
    }
    #[getter]
    fn mp_exists(&self) -> bool {
        self.0.mp_exists
    }
    #[getter]
    fn t_star(&self) -> Option<f64> {
        self.0.t_star
    }
    #[getter]
    fn lambda_(&self) -> Option<f64> {
        self.0.lambda
    }
    #[getter]
    fn energy(&self) -> Option<f64> {
        self.0.energy
    }
    #[getter]
    fn infimum(&self) -> Option<f64> {
        self.0.infimum
    }
    #[getter]
    fn mu(&self) -> Option<f64> {
        self.0.mu
    }
    #[getter]
    fn q_l2(&self) -> f64 {
        self.0.q_l2
    }
    #[getter]
    fn c_star_mass(&self) -> Option<f64> {
        self.0.thresholds.c_star_mass
    }
    #[getter]
    fn c_star_mp(&self) -> Option<f64> {
        self.0.thresholds.c_star_mp
    }
    #[getter]
    fn flags(&self) -> Vec<&'static str> {
        self.0.flags.iter().map(|f| f.as_str()).collect()
    }
    fn to_json(&self) -> String {
        json(&self.0)
    }
    fn __repr__(&self) -> String {
        format!(
            "Verdict(regime={}, minimizer_exists={}, mp_exists={}, energy={:?})",
            self.0.regime, self.0.minimizer_exists, self.0.mp_exists, self.0.energy
        )
    }
}

/// Regime verdict for `params`; solves for |Q|_{L²} when it is not given.
#[pyfunction]
#[pyo3(signature = (params, q_l2 = None))]
fn classify(py: Python<'_>, params: &Params, q_l2: Option<f64>) -> PyResult<Verdict> {
    let norm = match q_l2 {
        Some(x) => x,
        None => self::q_l2(py, params.0.dim, params.0.p)?,
    };
    classifier::classify(&params.0, norm).map(Verdict).map_err(to_py)
}

#[pyclass(frozen, name = "FlowResult")]
struct FlowResult(oracle::FlowReport);

#[pymethods]
impl FlowResult {
    #[getter]
    fn energy(&self) -> f64 {
        self.0.energy
    }
    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }
    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }
    #[getter]
    fn diverged(&self) -> bool {
        self.0.diverged
    }
    #[getter]
    fn mass_drift(&self) -> f64 {
        self.0.mass_drift
    }
    #[getter]
    fn grad_norm_sq(&self) -> f64 {
        self.0.grad_norm_sq
    }
    #[getter]
    fn history(&self) -> Vec<f64> {
        self.0.history.clone()
    }
}

/// Projected gradient flow on the mass sphere from a Gaussian seed.
#[pyfunction]
#[pyo3(signature = (params, r_max = None, n_intervals = None, max_iters = None, seed_width = None))]
fn gradient_flow_min(
    py: Python<'_>,
    params: &Params,
    r_max: Option<f64>,
    n_intervals: Option<usize>,
    max_iters: Option<usize>,
    seed_width: Option<f64>,
) -> PyResult<FlowResult> {
    let base = FlowConfig::default();
    let cfg = FlowConfig {
        grid: FlowGrid {
            r_max: r_max.unwrap_or(base.grid.r_max),
            n_intervals: n_intervals.unwrap_or(base.grid.n_intervals),
        },
        max_iters: max_iters.unwrap_or(base.max_iters),
        seed_width: seed_width.unwrap_or(base.seed_width),
        ..base
    };
    py.detach(|| oracle::gradient_flow_min(&params.0, &cfg)).map(FlowResult).map_err(to_py)
}

#[pymodule]
fn knorm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_class::<Norms>()?;
    m.add_class::<GroundState>()?;
    m.add_class::<Reduction>()?;
    m.add_class::<Verdict>()?;
    m.add_class::<FlowResult>()?;
    m.add_function(wrap_pyfunction!(solve_ground_state, m)?)?;
    m.add_function(wrap_pyfunction!(q_l2, m)?)?;
    m.add_function(wrap_pyfunction!(build_reduction, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_flow_min, m)?)?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    Ok(())
}
