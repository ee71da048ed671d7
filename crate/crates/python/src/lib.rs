//! Python bindings: `import pyppok`.
//!
//! Every random routine takes an explicit integer seed and is reproducible.

use pyo3::exceptions::{PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ppok::combinatorics::{self, PoKParams, ZetaWeights};
use ppok::rng::RngStream;
use ppok::ruin::{self, ClaimDist, GCurve, RiskModel};
use ppok::subordinator::SubordinatorSpec;
use ppok::time_change::{self, McBudget, PmfMethod, TimeChangedSpec};
use ppok::validate::{self, Suite, ValidateOptions};
use ppok::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Unsupported(msg) => PyNotImplementedError::new_err(msg),
        Error::NonConvergence { .. } | Error::Io(_) | Error::Json(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for ppok::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Poisson process of order k with rate parameter λ.
#[pyclass(name = "PoK", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyPoK(PoKParams);

#[pymethods]
impl PyPoK {
    #[new]
    fn new(k: u32, lam: f64) -> PyResult<Self> {
        PoKParams::new(k, lam).py().map(Self)
    }

    #[getter]
    fn k(&self) -> u32 {
        self.0.k()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.0.lambda()
    }

    fn pmf(&self, t: f64, n: u32) -> f64 {
        combinatorics::pok_pmf(&self.0, t, n)
    }

    /// `[P(N(t) = 0), …, P(N(t) = n_max)]`
    fn pmf_table(&self, t: f64, n_max: u32) -> PyResult<Vec<f64>> {
        Ok(ZetaWeights::new(self.0.k(), n_max).py()?.pmf_table(self.0.lambda(), t))
    }

    fn pgf(&self, t: f64, s: f64) -> f64 {
        combinatorics::pok_pgf(&self.0, t, s)
    }

    fn mean(&self, t: f64) -> f64 {
        ppok::process::ppok_mean(&self.0, t)
    }

    fn var(&self, t: f64) -> f64 {
        ppok::process::ppok_var(&self.0, t)
    }

    /// One path on `[0, horizon]` as `(jump_times, jump_sizes)`.
    fn simulate(&self, horizon: f64, seed: u64) -> PyResult<(Vec<f64>, Vec<u32>)> {
        let path = ppok::process::simulate_ppok(&self.0, horizon, &mut RngStream::new(seed, 0).rng()).py()?;
        Ok((path.jump_times().to_vec(), path.jump_sizes().to_vec()))
    }

    /// `N(horizon)` for `n` independent paths.
    fn sample_terminal(&self, horizon: f64, n: usize, seed: u64) -> PyResult<Vec<u64>> {
        let draws = ppok::rng::replicate(RngStream::new(seed, 0), n, |_, rng| {
            ppok::process::simulate_ppok(&self.0, horizon, rng).map(|p| p.terminal())
        });
        draws.into_iter().collect::<ppok::Result<Vec<_>>>().py()
    }

    fn __repr__(&self) -> String {
        format!("PoK(k={}, lam={})", self.0.k(), self.0.lambda())
    }
}

/// Lévy subordinator.
#[pyclass(name = "Subordinator", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySubordinator(SubordinatorSpec);

#[pymethods]
impl PySubordinator {
    #[staticmethod]
    fn drift(b: f64) -> PyResult<Self> {
        SubordinatorSpec::drift(b).py().map(Self)
    }

    #[staticmethod]
    fn gamma(p: f64, alpha: f64) -> PyResult<Self> {
        SubordinatorSpec::gamma(p, alpha).py().map(Self)
    }

    #[staticmethod]
    fn tempered_stable(alpha: f64, mu: f64) -> PyResult<Self> {
        SubordinatorSpec::tempered_stable(alpha, mu).py().map(Self)
    }

    #[staticmethod]
    fn inverse_gaussian(delta: f64, gamma: f64) -> PyResult<Self> {
        SubordinatorSpec::inverse_gaussian(delta, gamma).py().map(Self)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn bernstein(&self, s: f64) -> f64 {
        self.0.bernstein(s)
    }

    fn laplace_transform(&self, s: f64, t: f64) -> f64 {
        self.0.laplace_transform(s, t)
    }

    fn mean(&self, t: f64) -> PyResult<f64> {
        self.0.mean(t).py()
    }

    fn variance(&self, t: f64) -> PyResult<f64> {
        self.0.variance(t).py()
    }

    /// `n` independent draws of `D(t)`.
    fn sample(&self, t: f64, n: usize, seed: u64) -> PyResult<Vec<f64>> {
        ppok::rng::replicate(RngStream::new(seed, 0), n, |_, rng| self.0.sample_increment(t, rng))
            .into_iter()
            .collect::<ppok::Result<Vec<_>>>()
            .py()
    }

    /// `n` independent draws of `E(t)` on a forward grid of step `h`.
    #[pyo3(signature = (t, n, seed, h = None))]
    fn sample_inverse(&self, t: f64, n: usize, seed: u64, h: Option<f64>) -> PyResult<Vec<f64>> {
        let grid = h.map_or_else(|| time_change::InverseGrid::for_horizon(t), time_change::InverseGrid::new);
        ppok::rng::replicate(RngStream::new(seed, 0), n, |_, rng| self.0.inverse_at(t, grid.step, grid.max_steps, rng))
            .into_iter()
            .collect::<ppok::Result<Vec<_>>>()
            .py()
    }

    fn __repr__(&self) -> String {
        format!("Subordinator({:?})", self.0)
    }
}

/// PPoK run on a subordinator (`inverse=False`) or on its inverse.
#[pyclass(name = "TimeChanged", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyTimeChanged(TimeChangedSpec);

#[pymethods]
impl PyTimeChanged {
    #[new]
    #[pyo3(signature = (pok, sub, inverse = false))]
    fn new(pok: &PyPoK, sub: &PySubordinator, inverse: bool) -> PyResult<Self> {
        if inverse { TimeChangedSpec::inverse(pok.0, sub.0) } else { TimeChangedSpec::direct(pok.0, sub.0) }
            .py()
            .map(Self)
    }

    fn mean(&self, t: f64) -> PyResult<f64> {
        time_change::tc_mean(&self.0, t).py()
    }

    fn var(&self, t: f64) -> PyResult<f64> {
        time_change::tc_var(&self.0, t).py()
    }

    /// `(values, uncertainties)` for `n = 0..=n_max`. `method` is one of
    /// `closed`, `quadrature`, `mc`; direct mode only.
    #[pyo3(signature = (t, n_max, method = "quadrature", n_samples = 100_000, seed = 0))]
    fn pmf(&self, t: f64, n_max: u32, method: &str, n_samples: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let method = match method {
            "closed" => PmfMethod::Closed,
            "quadrature" => PmfMethod::Quadrature,
            "mc" => PmfMethod::MonteCarlo,
            other => return Err(PyValueError::new_err(format!("unknown method '{other}'"))),
        };
        let budget = McBudget::new(n_samples, RngStream::new(seed, 0));
        let rows = time_change::tcppok1_pmf_table(&self.0, t, n_max, method, Some(budget)).py()?;
        Ok((rows.iter().map(|r| r.value()).collect(), rows.iter().map(|r| r.uncertainty()).collect()))
    }

    /// Monte Carlo `(pmf, stderr)` in inverse mode.
    #[pyo3(signature = (t, n_max, n_samples = 20_000, seed = 0))]
    fn inverse_pmf(&self, t: f64, n_max: u32, n_samples: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let table = time_change::tcppok2_pmf_table(&self.0, t, n_max, McBudget::new(n_samples, RngStream::new(seed, 0))).py()?;
        Ok((table.values.iter().map(|v| v.value).collect(), table.values.iter().map(|v| v.stderr).collect()))
    }

    /// Monte Carlo `(mean, stderr)` of `Q(t)` in inverse mode.
    #[pyo3(signature = (t, n_samples = 20_000, seed = 0))]
    fn inverse_mean(&self, t: f64, n_samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let est = time_change::tcppok2_mean_mc(&self.0, t, n_samples, RngStream::new(seed, 0), None).py()?;
        Ok((est.value, est.stderr))
    }

    /// `(total_rate, probs)` of the jump sizes in direct mode.
    fn jump_law(&self) -> PyResult<(f64, Vec<f64>)> {
        let law = time_change::arrival_jump_law(&self.0.pok, &self.0.sub, 1e-14).py()?;
        Ok((law.total_rate, law.probs))
    }

    /// Counts observed at the ascending `times`.
    #[pyo3(signature = (times, seed, step = 1e-3))]
    fn sample_path(&self, times: Vec<f64>, seed: u64, step: f64) -> PyResult<Vec<u64>> {
        let mut rng = RngStream::new(seed, 0).rng();
        Ok(time_change::sample_at_times(&self.0, &times, time_change::InverseGrid::new(step), &mut rng).py()?.counts)
    }
}

/// Surplus `u + ct − S(t)` with order-k batched exponential or Erlang claims.
#[pyclass(name = "RiskModel", frozen, skip_from_py_object)]
struct PyRiskModel(RiskModel);

fn curve_tuple(c: GCurve) -> (Vec<f64>, Vec<f64>, f64) {
    (c.u, c.g, c.richardson_error)
}

#[pymethods]
impl PyRiskModel {
    #[new]
    #[pyo3(signature = (arrivals, premium, claim_mean = 1.0, claim_shape = 1))]
    fn new(arrivals: &PyTimeChanged, premium: f64, claim_mean: f64, claim_shape: u32) -> PyResult<Self> {
        let claim = if claim_shape == 1 {
            ClaimDist::exponential(claim_mean)
        } else {
            ClaimDist::erlang(claim_shape, claim_shape as f64 / claim_mean)
        }
        .py()?;
        RiskModel::new(premium, 0.0, claim, arrivals.0).py().map(Self)
    }

    fn loading(&self) -> PyResult<f64> {
        ruin::premium_loading(&self.0).py()
    }

    /// Finite-horizon Monte Carlo. Returns a dict with `psi`, `psi_se`, `g`,
    /// `g_se` (rows follow `u`, columns follow `y`) and `horizon_too_short`.
    #[pyo3(signature = (u, y, horizon = 300.0, n_reps = 20_000, seed = 0))]
    fn simulate<'py>(
        &self,
        py: Python<'py>,
        u: Vec<f64>,
        y: Vec<f64>,
        horizon: f64,
        n_reps: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
        let est = ruin::simulate_ruin(&self.0, &u, &y, horizon, n_reps, RngStream::new(seed, 0)).py()?;
        let out = pyo3::types::PyDict::new(py);
        out.set_item("u", est.u_grid)?;
        out.set_item("y", est.y_grid)?;
        out.set_item("psi", est.psi.iter().map(|e| e.value).collect::<Vec<_>>())?;
        out.set_item("psi_se", est.psi.iter().map(|e| e.stderr).collect::<Vec<_>>())?;
        out.set_item("g", est.g.iter().map(|r| r.iter().map(|e| e.value).collect::<Vec<_>>()).collect::<Vec<_>>())?;
        out.set_item("g_se", est.g.iter().map(|r| r.iter().map(|e| e.stderr).collect::<Vec<_>>()).collect::<Vec<_>>())?;
        out.set_item("horizon_too_short", est.horizon_too_short)?;
        Ok(out)
    }

    /// `(u, G(u, y), richardson_error)` with the jump-law kernel.
    #[pyo3(signature = (y, u_max = 5.0, step = 1e-2))]
    fn solve(&self, y: f64, u_max: f64, step: f64) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
        ruin::solve_g_jump_law(&self.0, y, u_max, step).py().map(curve_tuple)
    }

    /// Classical solver; k = 1 only.
    #[pyo3(signature = (y, u_max = 5.0, step = 1e-2))]
    fn solve_k1(&self, y: f64, u_max: f64, step: f64) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
        ruin::solve_g_k1(&self.0, y, u_max, step).py().map(curve_tuple)
    }
}

#[pyfunction]
fn enumerate_partitions(k: u32, n: u32) -> PyResult<Vec<Vec<u32>>> {
    Ok(combinatorics::enumerate_partitions(k, n).py()?.into_iter().map(|p| p.x).collect())
}

/// Run a validation suite; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 20_240_601))]
fn run_validation(py: Python<'_>, suite: &str, seed: u64) -> PyResult<(bool, String)> {
    let suite: Suite = suite.parse().map_err(py_err)?;
    let report = py.detach(|| validate::run(suite, ValidateOptions { seed, inject_fault: false }));
    let json = serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((report.passed, json))
}

#[pymodule]
fn pyppok(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoK>()?;
    m.add_class::<PySubordinator>()?;
    m.add_class::<PyTimeChanged>()?;
    m.add_class::<PyRiskModel>()?;
    m.add_function(wrap_pyfunction!(enumerate_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(run_validation, m)?)?;
    Ok(())
}
