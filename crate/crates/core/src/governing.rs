//! Finite-difference residuals of the difference-differential equations
//! satisfied by the PPoK pmf and by its inverse-Gaussian time changes.
//!
//! Time-changed pmfs `p̂_m(t) = ∫ p_m(x) w(x, t) dx` are computed by adaptive
//! quadrature against the density `w` of `G(t)` (type I) or of `E_G(t)`
//! (type II). Each residual is a central-difference left side minus the
//! equation's right side, so it carries an `O(h²)` truncation term plus
//! quadrature noise amplified by `1/h` or `1/h²`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::combinatorics::{PoKParams, ZetaWeights};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_with_tail, Integral, Tolerance};
use crate::special::erfcx;
use crate::stats::least_squares;
use crate::subordinator::SubordinatorSpec;

/// Default finite-difference steps.
pub const DEFAULT_STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Earliest time at which the type II equation is checked; the `δ₀(t)`
/// atom sits at the origin.
pub const T_MIN: f64 = 0.05;

fn quad_tol() -> Tolerance {
    Tolerance { abs: 1e-14, rel: 1e-13, max_intervals: 8000 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    /// `p_m' = −kλ p_m + λ Σ_{j ≤ m∧k} p_{m−j}`
    PpokFirstOrder,
    /// The once-differentiated form with the double convolution sum.
    PpokSecondOrder,
    /// `(d²/dt² − 2δγ d/dt) p̂_m = 2δ²λ [k p̂_m − Σ p̂_{m−j}]` for `N(G(t))`.
    PoissonInverseGaussian,
    /// The first-order equation for `N(E_G(t))` with the `h(0,t)` boundary term.
    InverseInverseGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub equation: Equation,
    pub m: u32,
    pub t: f64,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares slope of `ln residual` on `ln h`; present with ≥ 2 steps.
    pub observed_order: Option<f64>,
    /// Quadrature error of the pmf values divided by the differencing
    /// denominator at the smallest step; residuals below this are noise.
    pub quadrature_floor: f64,
}

impl ResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// `(δ, γ)` of an inverse Gaussian spec.
fn ig_params(ig: &SubordinatorSpec) -> Result<(f64, f64)> {
    match *ig {
        SubordinatorSpec::InverseGaussian { delta, gamma } => Ok((delta, gamma)),
        other => Err(Error::Unsupported(format!(
            "the governing equations are derived for the inverse Gaussian subordinator only, not {}",
            other.name()
        ))),
    }
}

/// `−kλ p_m + λ Σ_{j=1}^{m∧k} p_{m−j}` from a pmf table `p[0..=m]`.
fn first_rhs(p: &[f64], k: u32, lambda: f64, m: u32) -> f64 {
    let sum: f64 = (1..=m.min(k)).map(|j| p[(m - j) as usize]).sum();
    -(k as f64) * lambda * p[m as usize] + lambda * sum
}

/// `(kλ)² p_m − 2kλ² Σ_j p_{m−j} + λ² Σ_j Σ_{i ≤ (m−j)∧k} p_{m−j−i}`.
fn second_rhs(p: &[f64], k: u32, lambda: f64, m: u32) -> f64 {
    let kl = k as f64 * lambda;
    let mut single = 0.0;
    let mut double = 0.0;
    for j in 1..=m.min(k) {
        let r = m - j;
        single += p[r as usize];
        for i in 1..=r.min(k) {
            double += p[(r - i) as usize];
        }
    }
    kl * kl * p[m as usize] - 2.0 * kl * lambda * single + lambda * lambda * double
}

/// `p_m'(0)`: `−kλ` for `m = 0`, `λ` for `1 ≤ m ≤ k`, else 0.
pub fn ppok_initial_slope(params: &PoKParams, m: u32) -> f64 {
    match m {
        0 => -params.event_rate(),
        m if m <= params.k() => params.lambda(),
        _ => 0.0,
    }
}

pub fn ppok_dde_residual(params: &PoKParams, m: u32, t: f64, h: f64) -> f64 {
    let w = ZetaWeights::new(params.k(), m).expect("k ≥ 1");
    let lambda = params.lambda();
    let lhs = (w.pmf(lambda, t + h, m) - w.pmf(lambda, t - h, m)) / (2.0 * h);
    (lhs - first_rhs(&w.pmf_table(lambda, t), params.k(), lambda, m)).abs()
}

pub fn ppok_dde2_residual(params: &PoKParams, m: u32, t: f64, h: f64) -> f64 {
    let w = ZetaWeights::new(params.k(), m).expect("k ≥ 1");
    let lambda = params.lambda();
    let p = |s| w.pmf(lambda, s, m);
    let lhs = (p(t + h) - 2.0 * p(t) + p(t - h)) / (h * h);
    (lhs - second_rhs(&w.pmf_table(lambda, t), params.k(), lambda, m)).abs()
}

/// Density of `E_G(t)`, the first exit time of the inverse Gaussian
/// subordinator above level `t`.
///
/// Differentiating `P[E_G(t) ≤ x] = P[G(x) > t]` in `x` gives
/// `h(x,t) = e^{−a²/2} [2δ/√(2πt) − δγ erfcx(c)]` with
/// `a = γ√t − δx/√t` and `c = (γt + δx)/√(2t)`, which stays finite and
/// cancellation-free for large `x`.
pub fn inverse_ig_density(x: f64, t: f64, delta: f64, gamma: f64) -> f64 {
    if x < 0.0 || t <= 0.0 {
        return 0.0;
    }
    let st = t.sqrt();
    let a = gamma * st - delta * x / st;
    let c = (gamma * t + delta * x) / (2.0 * t).sqrt();
    let bracket = 2.0 * delta / (2.0 * PI * t).sqrt() - delta * gamma * erfcx(c);
    ((-0.5 * a * a).exp() * bracket).max(0.0)
}

/// Breakpoints and tail scale for integrating against the law of `G(t)`.
fn ig_layout(delta: f64, gamma: f64, t: f64) -> (Vec<f64>, f64) {
    let mean = delta * t / gamma;
    let sd = (delta * t / gamma.powi(3)).sqrt();
    // mode of IG(mean, shape) with mean/shape = (sd/mean)²
    let r = (sd / mean).powi(2);
    let mode = mean * ((1.0 + 2.25 * r * r).sqrt() - 1.5 * r);
    let mut breaks = vec![0.0, 0.5 * mode, mode, mean, mean + 3.0 * sd];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    (breaks, mean + sd)
}

/// Breakpoints and tail scale for integrating against the law of `E_G(t)`.
fn inverse_ig_layout(delta: f64, gamma: f64, t: f64) -> (Vec<f64>, f64) {
    let centre = gamma * t / delta;
    let spread = t.sqrt() / delta;
    let mut breaks = vec![0.0, 0.5 * centre, centre, centre + 3.0 * spread];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    (breaks, centre + spread)
}

/// `∫ F(p(x)) w(x) dx` where `p(x)` is the pmf table `p_0..p_m` at `x`.
fn integrate_pmf_functional<F, W>(
    params: &PoKParams,
    m: u32,
    weight: W,
    layout: (Vec<f64>, f64),
    functional: F,
) -> Result<Integral>
where
    F: Fn(&[f64]) -> f64,
    W: Fn(f64) -> f64,
{
    let w = ZetaWeights::new(params.k(), m)?;
    let lambda = params.lambda();
    integrate_with_tail(|x| functional(&w.pmf_table(lambda, x)) * weight(x), &layout.0, layout.1, quad_tol())
}

/// `P[N(G(t)) = m]` by quadrature.
pub fn poisson_ig_pmf(params: &PoKParams, ig: &SubordinatorSpec, m: u32, t: f64) -> Result<Integral> {
    let (delta, gamma) = ig_params(ig)?;
    integrate_pmf_functional(
        params,
        m,
        |x| ig.density(x, t).unwrap_or(0.0),
        ig_layout(delta, gamma, t),
        |p| p[m as usize],
    )
}

/// `P[N(E_G(t)) = m]` by quadrature.
pub fn inverse_ig_pmf(params: &PoKParams, ig: &SubordinatorSpec, m: u32, t: f64) -> Result<Integral> {
    let (delta, gamma) = ig_params(ig)?;
    integrate_pmf_functional(
        params,
        m,
        |x| inverse_ig_density(x, t, delta, gamma),
        inverse_ig_layout(delta, gamma, t),
        |p| p[m as usize],
    )
}

/// Residual of the second-order equation for `N(G(t))` at `(m, t)`,
/// together with the quadrature error propagated through the stencil.
fn poisson_ig_residual_with_floor(params: &PoKParams, ig: &SubordinatorSpec, m: u32, t: f64, h: f64) -> Result<(f64, f64)> {
    let (delta, gamma) = ig_params(ig)?;
    if t - h <= 0.0 {
        return Err(Error::Domain(format!("step {h} reaches t ≤ 0 from t = {t}")));
    }
    let pm = |s: f64| poisson_ig_pmf(params, ig, m, s);
    let (lo, mid, hi) = (pm(t - h)?, pm(t)?, pm(t + h)?);
    let d1 = (hi.value - lo.value) / (2.0 * h);
    let d2 = (hi.value - 2.0 * mid.value + lo.value) / (h * h);
    let mut sum = 0.0;
    let mut err = mid.error;
    for j in 1..=m.min(params.k()) {
        let v = poisson_ig_pmf(params, ig, m - j, t)?;
        sum += v.value;
        err += v.error;
    }
    let lhs = d2 - 2.0 * delta * gamma * d1;
    let rhs = 2.0 * delta * delta * params.lambda() * (params.k() as f64 * mid.value - sum);
    let floor = (4.0 / (h * h) + 2.0 * delta * gamma / h) * (lo.error + mid.error + hi.error)
        + 2.0 * delta * delta * params.lambda() * params.k() as f64 * err;
    Ok(((lhs - rhs).abs(), floor))
}

pub fn poisson_ig_orderk_dde_residual(params: &PoKParams, ig: &SubordinatorSpec, m: u32, t: f64, h: f64) -> Result<f64> {
    Ok(poisson_ig_residual_with_floor(params, ig, m, t, h)?.0)
}

fn inverse_ig_residual_with_floor(params: &PoKParams, ig: &SubordinatorSpec, m: u32, t: f64, h: f64) -> Result<(f64, f64)> {
    let (delta, gamma) = ig_params(ig)?;
    if t - h < T_MIN.min(t) * 0.5 || t < T_MIN {
        return Err(Error::Domain(format!(
            "the type II equation is checked for t ≥ {T_MIN} with t − h well away from 0 (t = {t}, h = {h})"
        )));
    }
    let k = params.k();
    let lambda = params.lambda();
    let lo = inverse_ig_pmf(params, ig, m, t - h)?;
    let hi = inverse_ig_pmf(params, ig, m, t + h)?;
    let lhs = (hi.value - lo.value) / (2.0 * h);
    let weight = |x| inverse_ig_density(x, t, delta, gamma);
    let layout = inverse_ig_layout(delta, gamma, t);
    let second = integrate_pmf_functional(params, m, weight, layout.clone(), |p| second_rhs(p, k, lambda, m))?;
    let first = integrate_pmf_functional(params, m, weight, layout, |p| first_rhs(p, k, lambda, m))?;
    let boundary = inverse_ig_density(0.0, t, delta, gamma) * ppok_initial_slope(params, m);
    let rhs = (second.value + 2.0 * delta * gamma * first.value + boundary) / (2.0 * delta * delta);
    let floor = (lo.error + hi.error) / (2.0 * h) + (second.error + 2.0 * delta * gamma * first.error) / (2.0 * delta * delta);
    Ok(((lhs - rhs).abs(), floor))
}

/// Residual of the first-order equation for `N(E_G(t))` at `t > 0`.
pub fn tcppok2_ig_dde_residual(params: &PoKParams, ig: &SubordinatorSpec, m: u32, t: f64, h: f64) -> Result<f64> {
    Ok(inverse_ig_residual_with_floor(params, ig, m, t, h)?.0)
}

/// Evaluate `equation` at `(m, t)` for each step and estimate the
/// convergence order. `ig` is required for the two time-changed equations.
pub fn residual_report(
    equation: Equation,
    params: &PoKParams,
    ig: Option<&SubordinatorSpec>,
    m: u32,
    t: f64,
    steps: &[f64],
) -> Result<ResidualReport> {
    if steps.is_empty() || steps.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::Domain("at least one positive step is required".into()));
    }
    let need_ig = || ig.ok_or_else(|| Error::Config(format!("{equation:?} needs an inverse Gaussian spec")));
    let mut residuals = Vec::with_capacity(steps.len());
    let mut floors = Vec::with_capacity(steps.len());
    for &h in steps {
        let (r, floor) = match equation {
            Equation::PpokFirstOrder => (ppok_dde_residual(params, m, t, h), 0.0),
            Equation::PpokSecondOrder => (ppok_dde2_residual(params, m, t, h), 0.0),
            Equation::PoissonInverseGaussian => poisson_ig_residual_with_floor(params, need_ig()?, m, t, h)?,
            Equation::InverseInverseGaussian => inverse_ig_residual_with_floor(params, need_ig()?, m, t, h)?,
        };
        if !r.is_finite() {
            return Err(Error::NonConvergence { routine: "residual_report", detail: format!("non-finite residual at h = {h}") });
        }
        residuals.push(r);
        floors.push(floor);
    }
    let observed_order = if steps.len() >= 2 && residuals.iter().all(|&r| r > 0.0) {
        let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
        Some(least_squares(&xs, &ys).0)
    } else {
        None
    };
    let smallest = steps.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    Ok(ResidualReport {
        equation,
        m,
        t,
        steps: steps.to_vec(),
        residuals,
        observed_order,
        quadrature_floor: floors[smallest],
    })
}
