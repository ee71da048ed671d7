//! Ruin theory for the surplus `U(t) = u + ct − Σ_{j ≤ Q(t)} Z_j`, where
//! `Q` is a type I time-changed PPoK.
//!
//! `Q` is itself compound Poisson: jumps arrive at rate `f(kλ)` and carry
//! `i` claims with probability `q_i` (see
//! [`arrival_jump_law`](crate::time_change::arrival_jump_law)). The Monte
//! Carlo engine samples that representation exactly, so the only
//! approximation is the finite horizon.
//!
//! The deficit law `G(u,y) = P[T < ∞, |U(T)| ≤ y]` solves a renewal-type
//! equation in `u`. Two kernels are available:
//!
//! * [`GKernel::Displayed`] uses `K = k·B₁ = Σ_{i≤k} F^{*i}` for every arrival,
//!   as in the published equation. Its total mass is `k`.
//! * [`GKernel::JumpLaw`] uses `H = Σ_i q_i F^{*i}`, the claim law of one
//!   arrival of `Q`. The two agree when `k = 1` with a pure drift.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;
use statrs::function::gamma::gamma_lr;

use crate::error::{domain, Error, Result};
use crate::process::exponential;
use crate::rng::{replicate, RngStream};
use crate::special::ln_gamma;
use crate::stats::McEstimate;
use crate::time_change::{arrival_jump_law, tc_mean, ArrivalJumpLaw, TimeChangedSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClaimDist {
    Exponential { mean: f64 },
    Erlang { shape: u32, rate: f64 },
}

impl ClaimDist {
    pub fn exponential(mean: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return domain(format!("claim mean must be positive, got {mean}"));
        }
        Ok(Self::Exponential { mean })
    }

    pub fn erlang(shape: u32, rate: f64) -> Result<Self> {
        if shape == 0 || !(rate > 0.0 && rate.is_finite()) {
            return domain(format!("Erlang claims need shape ≥ 1 and rate > 0 (got {shape}, {rate})"));
        }
        Ok(Self::Erlang { shape, rate })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { mean } => mean,
            Self::Erlang { shape, rate } => shape as f64 / rate,
        }
    }

    /// `(shape, rate)` of one claim as an Erlang law.
    fn erlang_form(&self) -> (u32, f64) {
        match *self {
            Self::Exponential { mean } => (1, 1.0 / mean),
            Self::Erlang { shape, rate } => (shape, rate),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (n, r) = self.erlang_form();
        erlang_cdf(n, r, x)
    }

    /// `F^{*i}(x)`.
    pub fn convolution_cdf(&self, i: u32, x: f64) -> f64 {
        let (n, r) = self.erlang_form();
        erlang_cdf(n * i, r, x)
    }

    /// Total of `i` independent claims.
    pub fn sample_sum<R: Rng + ?Sized>(&self, i: u32, rng: &mut R) -> f64 {
        let (n, r) = self.erlang_form();
        if n * i == 1 {
            return exponential(r, rng);
        }
        Gamma::new((n * i) as f64, 1.0 / r).expect("valid gamma parameters").sample(rng)
    }
}

fn erlang_cdf(n: u32, rate: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x.is_infinite() {
        1.0
    } else {
        gamma_lr(n as f64, rate * x)
    }
}

fn erlang_pdf(n: u32, rate: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if n == 1 { rate } else { 0.0 };
    }
    let nf = n as f64;
    (rate.ln() + (nf - 1.0) * (rate * x).ln() - rate * x - ln_gamma(nf)).exp()
}

/// `Σ_i w_i F^{*i}` for Erlang-type claims: a weighted sum of Erlang laws
/// sharing one rate. Not necessarily normalised.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErlangMixture {
    pub rate: f64,
    /// `(shape, weight)` pairs.
    pub terms: Vec<(u32, f64)>,
}

impl ErlangMixture {
    /// `Σ_i weights[i-1] F^{*i}`.
    pub fn from_convolutions(claim: &ClaimDist, weights: &[f64]) -> Self {
        let (n, rate) = claim.erlang_form();
        let terms = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, &w)| (n * (i as u32 + 1), w))
            .collect();
        Self { rate, terms }
    }

    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|t| t.1).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(n, w)| w * erlang_cdf(n, self.rate, x)).sum()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(n, w)| w * erlang_pdf(n, self.rate, x)).sum()
    }

    /// `∫_0^∞ x dK(x)`.
    pub fn first_moment(&self) -> f64 {
        self.terms.iter().map(|&(n, w)| w * n as f64 / self.rate).sum()
    }

    /// `∫_0^y (mass − K(v)) dv`, exact: for one Erlang term
    /// `∫_0^y (1 − F_n) = (1/r) Σ_{j=1}^{n} F_j(y)`.
    pub fn integrated_tail(&self, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(n, w)| {
                let s: f64 = if y.is_infinite() {
                    n as f64
                } else {
                    (1..=n).map(|j| erlang_cdf(j, self.rate, y)).sum()
                };
                w * s / self.rate
            })
            .sum()
    }
}

/// `B(x) = Σ_{i=1}^k F^{*i}(x)` and its normalisation `B₁ = B/k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateClaimDist {
    pub k: u32,
    pub claim: ClaimDist,
    b: ErlangMixture,
}

pub fn aggregate_claim_cdf(claim: &ClaimDist, k: u32) -> Result<AggregateClaimDist> {
    if k == 0 {
        return domain("order k must be at least 1");
    }
    Ok(AggregateClaimDist { k, claim: *claim, b: ErlangMixture::from_convolutions(claim, &vec![1.0; k as usize]) })
}

impl AggregateClaimDist {
    pub fn b(&self, x: f64) -> f64 {
        self.b.cdf(x)
    }

    pub fn b1(&self, x: f64) -> f64 {
        self.b.cdf(x) / self.k as f64
    }

    pub fn b1_density(&self, x: f64) -> f64 {
        self.b.density(x) / self.k as f64
    }

    pub fn b1_mean(&self) -> f64 {
        self.b.first_moment() / self.k as f64
    }

    /// `B` as a kernel of mass `k`.
    pub fn b_mixture(&self) -> &ErlangMixture {
        &self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskModel {
    pub premium_rate: f64,
    pub initial_capital: f64,
    pub claim: ClaimDist,
    pub arrivals: TimeChangedSpec,
}

impl RiskModel {
    pub fn new(premium_rate: f64, initial_capital: f64, claim: ClaimDist, arrivals: TimeChangedSpec) -> Result<Self> {
        if !(premium_rate > 0.0 && premium_rate.is_finite()) {
            return domain(format!("premium rate must be positive, got {premium_rate}"));
        }
        if !(initial_capital >= 0.0) {
            return domain(format!("initial capital must be non-negative, got {initial_capital}"));
        }
        if arrivals.mode != crate::time_change::Mode::Direct {
            return Err(Error::Unsupported("the risk model uses type I (Direct) arrivals only".into()));
        }
        Ok(Self { premium_rate, initial_capital, claim, arrivals })
    }

    /// `f(kλ)`, the arrival rate of claim batches.
    pub fn batch_rate(&self) -> f64 {
        self.arrivals.sub.bernstein(self.arrivals.pok.event_rate())
    }

    /// `f(kλ)/c`.
    pub fn ode_coefficient(&self) -> f64 {
        self.batch_rate() / self.premium_rate
    }

    pub fn jump_law(&self) -> Result<ArrivalJumpLaw> {
        arrival_jump_law(&self.arrivals.pok, &self.arrivals.sub, 1e-14)
    }
}

/// `ρ = c / (μ E[Q(1)]) − 1`; a positive value means premiums outpace
/// expected claims.
pub fn premium_loading(model: &RiskModel) -> Result<f64> {
    Ok(model.premium_rate / (model.claim.mean() * tc_mean(&model.arrivals, 1.0)?) - 1.0)
}

/// Ladder records of `L(t) = S(t) − ct` for one path: each entry is a new
/// running maximum above 0, as `(level, time)`, in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderPath {
    pub records: Vec<(f64, f64)>,
}

impl LadderPath {
    /// First ruin for initial capital `u`: `(deficit, time)`.
    pub fn ruin(&self, u: f64) -> Option<(f64, f64)> {
        let i = self.records.partition_point(|&(level, _)| level <= u);
        self.records.get(i).map(|&(level, time)| (level - u, time))
    }
}

/// Ladder paths for many replications, enough to evaluate ruin for every
/// `u ≤ u_max` within the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSample {
    pub paths: Vec<LadderPath>,
    pub horizon: f64,
    pub u_max: f64,
}

fn simulate_ladder<R: Rng + ?Sized>(
    model: &RiskModel,
    law: &ArrivalJumpLaw,
    u_max: f64,
    horizon: f64,
    rng: &mut R,
) -> LadderPath {
    let rate = law.total_rate;
    let c = model.premium_rate;
    let mut records = Vec::new();
    let mut t = 0.0;
    let mut claims = 0.0;
    let mut best = 0.0;
    loop {
        t += exponential(rate, rng);
        if t > horizon {
            break;
        }
        claims += model.claim.sample_sum(law.sample(rng), rng);
        let level = claims - c * t;
        if level > best {
            best = level;
            records.push((level, t));
            if level > u_max {
                break;
            }
        }
    }
    LadderPath { records }
}

/// Simulate `n_reps` surplus paths up to `horizon` with common random
/// numbers across initial capitals in `[0, u_max]`.
pub fn simulate_ladders(model: &RiskModel, u_max: f64, horizon: f64, n_reps: usize, stream: RngStream) -> Result<LadderSample> {
    if !(horizon > 0.0) || !(u_max >= 0.0) || n_reps == 0 {
        return domain("need horizon > 0, u_max ≥ 0 and at least one replication");
    }
    let law = model.jump_law()?;
    let paths = replicate(stream, n_reps, |_, rng| simulate_ladder(model, &law, u_max, horizon, rng));
    Ok(LadderSample { paths, horizon, u_max })
}

/// Fraction of the horizon treated as "late" by the horizon diagnostic.
pub const LATE_WINDOW: f64 = 0.1;
/// Conditional late-ruin mass above which the horizon is flagged as short.
pub const LATE_MASS_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuinEstimate {
    pub u_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
    /// Finite-horizon ruin probability per `u`; a lower bound for `ψ(u)`.
    pub psi: Vec<McEstimate>,
    /// `g[i][j]` estimates `G(u_i, y_j)`.
    pub g: Vec<Vec<McEstimate>>,
    pub horizon: f64,
    /// `P[(1 − LATE_WINDOW)·horizon < T ≤ horizon]` per `u`.
    pub late_ruin: Vec<f64>,
    /// Some `u` has more than `LATE_MASS_LIMIT` of its ruins in the late window.
    pub horizon_too_short: bool,
    pub n_reps: usize,
}

fn bernoulli(hits: usize, n: usize) -> McEstimate {
    let p = hits as f64 / n as f64;
    let var = if n > 1 { p * (1.0 - p) * n as f64 / (n as f64 - 1.0) } else { 0.0 };
    McEstimate { value: p, stderr: (var / n as f64).sqrt(), n_reps: n }
}

impl LadderSample {
    pub fn estimate(&self, u_grid: &[f64], y_grid: &[f64]) -> Result<RuinEstimate> {
        if u_grid.iter().any(|&u| u > self.u_max || u < 0.0) {
            return domain(format!("u grid must lie in [0, {}]", self.u_max));
        }
        let mut ys = y_grid.to_vec();
        ys.sort_by(f64::total_cmp);
        let n = self.paths.len();
        let late_from = (1.0 - LATE_WINDOW) * self.horizon;
        let mut psi = Vec::with_capacity(u_grid.len());
        let mut g = Vec::with_capacity(u_grid.len());
        let mut late_ruin = Vec::with_capacity(u_grid.len());
        let mut flagged = false;
        for &u in u_grid {
            let mut ruined = 0;
            let mut late = 0;
            let mut below = vec![0usize; ys.len()];
            for path in &self.paths {
                if let Some((deficit, time)) = path.ruin(u) {
                    ruined += 1;
                    if time > late_from {
                        late += 1;
                    }
                    let first = ys.partition_point(|&y| y < deficit);
                    for c in &mut below[first..] {
                        *c += 1;
                    }
                }
            }
            psi.push(bernoulli(ruined, n));
            g.push(below.iter().map(|&c| bernoulli(c, n)).collect());
            late_ruin.push(late as f64 / n as f64);
            if ruined > 0 && late as f64 / ruined as f64 > LATE_MASS_LIMIT {
                flagged = true;
            }
        }
        Ok(RuinEstimate {
            u_grid: u_grid.to_vec(),
            y_grid: ys,
            psi,
            g,
            horizon: self.horizon,
            late_ruin,
            horizon_too_short: flagged,
            n_reps: n,
        })
    }

    /// `1{T < horizon, D ≤ y}` for each path and each `u` in `u_grid`.
    fn indicators(&self, u_grid: &[f64], y: f64) -> Vec<Vec<f64>> {
        self.paths
            .iter()
            .map(|p| {
                u_grid
                    .iter()
                    .map(|&u| match p.ruin(u) {
                        Some((d, _)) if d <= y => 1.0,
                        _ => 0.0,
                    })
                    .collect()
            })
            .collect()
    }
}

/// Finite-horizon Monte Carlo of ruin and deficit on a `(u, y)` grid.
pub fn simulate_ruin(
    model: &RiskModel,
    u_grid: &[f64],
    y_grid: &[f64],
    horizon: f64,
    n_reps: usize,
    stream: RngStream,
) -> Result<RuinEstimate> {
    let u_max = u_grid.iter().cloned().fold(0.0, f64::max);
    simulate_ladders(model, u_max, horizon, n_reps, stream)?.estimate(u_grid, y_grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GKernel {
    /// `k·B₁` for every arrival.
    Displayed,
    /// `H = Σ_i q_i F^{*i}` from the arrival jump law.
    JumpLaw,
}

/// The kernel of the `G` equation under the chosen reading.
pub fn g_kernel(model: &RiskModel, kernel: GKernel) -> Result<ErlangMixture> {
    match kernel {
        GKernel::Displayed => Ok(aggregate_claim_cdf(&model.claim, model.arrivals.pok.k())?.b_mixture().clone()),
        GKernel::JumpLaw => Ok(ErlangMixture::from_convolutions(&model.claim, &model.jump_law()?.probs)),
    }
}

/// The discrete `G` equation at grid node `n` written as `Σ c_i G_i + b`:
/// central difference on the left, trapezoid convolution on the right.
struct DiscreteOperator {
    coefficients: Vec<f64>,
    constant: f64,
}

fn discrete_operator(kernel: &ErlangMixture, a: f64, y: f64, du: f64, n: usize) -> DiscreteOperator {
    let u = n as f64 * du;
    let mut c = vec![0.0; n + 2];
    c[n + 1] += 1.0 / (2.0 * du);
    c[n - 1] -= 1.0 / (2.0 * du);
    c[n] -= a;
    // + a ∫_0^u G(u − x) κ(x) dx, trapezoid
    for j in 0..=n {
        let w = if j == 0 || j == n { 0.5 } else { 1.0 };
        c[n - j] += a * du * w * kernel.density(j as f64 * du);
    }
    DiscreteOperator { coefficients: c, constant: a * (kernel.cdf(u + y) - kernel.cdf(u)) }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub u: f64,
    /// Discrete residual of the Monte Carlo `G`.
    pub residual: McEstimate,
    /// The same discrete residual applied to the solver curve; it measures
    /// the discretisation error of the operator.
    pub discretisation: f64,
    pub budget: f64,
    pub within: bool,
}

/// Normal quantile used for the pointwise residual budget over a field of
/// about ten points.
pub const RESIDUAL_Z: f64 = 3.5;

/// Plug Monte Carlo `G(·, y)` into the `G` equation at the points `u_eval`
/// (which must be interior nodes of the grid `j·du`). The budget at each
/// point is `RESIDUAL_Z` standard errors plus twice the discretisation
/// residual of `solver`.
pub fn g_ode_residual(
    model: &RiskModel,
    sample: &LadderSample,
    solver: &GCurve,
    kernel: GKernel,
    y: f64,
    du: f64,
    u_eval: &[f64],
) -> Result<Vec<ResidualPoint>> {
    let kern = g_kernel(model, kernel)?;
    let a = model.ode_coefficient();
    let u_top = u_eval.iter().cloned().fold(0.0, f64::max);
    let n_top = (u_top / du).round() as usize + 1;
    let grid: Vec<f64> = (0..=n_top).map(|i| i as f64 * du).collect();
    if grid[n_top] > sample.u_max + 1e-12 || grid[n_top] > solver.u_max() + 1e-12 {
        return domain("the Monte Carlo sample and solver must cover u + du for every evaluation point");
    }
    let paths = sample.indicators(&grid, y);
    let solver_g: Vec<f64> = grid.iter().map(|&u| solver.value_at(u)).collect();
    u_eval
        .iter()
        .map(|&u| {
            let n = (u / du).round() as usize;
            if n == 0 || ((n as f64 * du) - u).abs() > 1e-9 * du.max(1.0) {
                return domain(format!("evaluation point {u} is not an interior node of the du = {du} grid"));
            }
            let op = discrete_operator(&kern, a, y, du, n);
            let per_path: Vec<f64> = paths
                .iter()
                .map(|ind| op.coefficients.iter().zip(ind).map(|(c, i)| c * i).sum::<f64>() + op.constant)
                .collect();
            let residual = McEstimate::from_samples(&per_path);
            let discretisation =
                op.coefficients.iter().zip(&solver_g).map(|(c, g)| c * g).sum::<f64>() + op.constant;
            let budget = RESIDUAL_Z * residual.stderr + 2.0 * discretisation.abs();
            Ok(ResidualPoint { u, residual, discretisation, budget, within: residual.value.abs() <= budget })
        })
        .collect()
}

/// A solution `G(·, y)` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GCurve {
    pub y: f64,
    pub kernel: GKernel,
    pub u: Vec<f64>,
    pub g: Vec<f64>,
    pub step: f64,
    /// `∫_0^∞ G(u, y) du` (grid part plus an exponential tail).
    pub integral: f64,
    pub iterations: usize,
    /// Largest `|G_h − G_{h/2}|/3` over the grid, the Richardson error
    /// estimate of the unextrapolated half-step solution.
    pub richardson_error: f64,
    /// The boundary condition did not pin down `G(0, y)`; see
    /// [`solve_g_fixed_point`].
    pub degenerate: bool,
}

impl GCurve {
    pub fn u_max(&self) -> f64 {
        *self.u.last().expect("non-empty grid")
    }

    /// Linear interpolation on the grid.
    pub fn value_at(&self, u: f64) -> f64 {
        let x = (u / self.step).clamp(0.0, (self.u.len() - 1) as f64);
        let i = (x.floor() as usize).min(self.u.len() - 2);
        let frac = x - i as f64;
        self.g[i] * (1.0 - frac) + self.g[i + 1] * frac
    }
}

/// Implicit trapezoid march of `G' = a[G − G⋆κ − r]` from `G(0) = g0`,
/// with the convolution on the same grid by the trapezoid rule.
fn march(kernel: &ErlangMixture, a: f64, y: f64, g0: f64, step: f64, n: usize) -> Vec<f64> {
    let kappa: Vec<f64> = (0..=n).map(|j| kernel.density(j as f64 * step)).collect();
    let r: Vec<f64> = (0..=n)
        .map(|j| {
            let u = j as f64 * step;
            kernel.cdf(u + y) - kernel.cdf(u)
        })
        .collect();
    let mut g = Vec::with_capacity(n + 1);
    g.push(g0);
    let mut phi_prev = a * (g0 - r[0]);
    for m in 1..=n {
        // trapezoid convolution without the G_m·κ_0 term
        let mut partial = 0.5 * g[0] * kappa[m];
        for j in 1..m {
            partial += g[m - j] * kappa[j];
        }
        partial *= step;
        let self_weight = 1.0 - 0.5 * step * kappa[0];
        let numer = g[m - 1] + 0.5 * step * phi_prev - 0.5 * step * a * (partial + r[m]);
        let denom = 1.0 - 0.5 * step * a * self_weight;
        let gm = numer / denom;
        phi_prev = a * (gm * self_weight - partial - r[m]);
        g.push(gm);
    }
    g
}

fn trapezoid(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    step * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1]))
}

/// `∫_0^∞ G` from grid values, closing the tail with the exponential decay
/// observed over the last tenth of the grid.
fn integral_with_tail(g: &[f64], step: f64) -> f64 {
    let body = trapezoid(g, step);
    let n = g.len() - 1;
    let back = (n / 10).max(1);
    let (g1, g2) = (g[n - back], g[n]);
    if g2 > 0.0 && g2 < g1 {
        let rate = (g1 / g2).ln() / (back as f64 * step);
        body + g2 / rate
    } else {
        body
    }
}

/// Solve with a known `G(0, y)` on step `h` and `h/2`, then Richardson-extrapolate.
fn solve_known_start(kernel: &ErlangMixture, a: f64, y: f64, g0: f64, u_max: f64, step: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    if !(u_max > 0.0 && step > 0.0 && step < u_max) {
        return domain(format!("need 0 < step < u_max (got {step}, {u_max})"));
    }
    let n = (u_max / step).round() as usize;
    let coarse = march(kernel, a, y, g0, step, n);
    let fine = march(kernel, a, y, g0, step / 2.0, 2 * n);
    let mut err = 0.0f64;
    let g: Vec<f64> = (0..=n)
        .map(|i| {
            let (gc, gf) = (coarse[i], fine[2 * i]);
            err = err.max((gf - gc).abs() / 3.0);
            (4.0 * gf - gc) / 3.0
        })
        .collect();
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence { routine: "g_solver", detail: "non-finite values while marching".into() });
    }
    let u = (0..=n).map(|i| i as f64 * step).collect();
    Ok((u, g, err))
}

/// `G(·, y)` for `k = 1`, where the `(k − 1)∫G` term vanishes and
/// `G(0, y) = (f(λ)/c) ∫_0^y (1 − F(v)) dv` is explicit.
pub fn solve_g_k1(model: &RiskModel, y: f64, u_max: f64, step: f64) -> Result<GCurve> {
    if model.arrivals.pok.k() != 1 {
        return Err(Error::Unsupported("solve_g_k1 needs k = 1; use solve_g_fixed_point".into()));
    }
    solve_g_fixed_point(model, y, u_max, step, 1, 0.0)
}

/// Slope of the integral map `I ↦ ∫G[I]` within this distance of 1 marks
/// the fixed point as undetermined.
pub const DEGENERATE_SLOPE_TOL: f64 = 0.1;

/// `G(·, y)` under the displayed kernel with `G(0, y)` tied to `∫_0^∞ G`:
/// guess the integral `I` (starting from 0), set
/// `G(0,y) = (f/c)[(k−1)I + k ∫_0^y (1 − B₁)]`, march, recompute the
/// integral and relax with weight 0.5 until it moves by less than `tol`.
///
/// For `k > 1` the boundary identity is itself obtained by integrating the
/// equation, so the map `I ↦ ∫G[I]` can have slope one and every `I` is
/// consistent. That case is detected from two probes of the map and the
/// curve from `I = 0` is returned with `degenerate` set.
pub fn solve_g_fixed_point(model: &RiskModel, y: f64, u_max: f64, step: f64, max_iter: usize, tol: f64) -> Result<GCurve> {
    let kernel = g_kernel(model, GKernel::Displayed)?;
    let k = model.arrivals.pok.k() as f64;
    let a = model.ode_coefficient();
    let forcing = kernel.integrated_tail(y);
    let curve = |integral: f64, iterations: usize, degenerate: bool| -> Result<GCurve> {
        let g0 = a * ((k - 1.0) * integral + forcing);
        let (u, g, richardson_error) = solve_known_start(&kernel, a, y, g0, u_max, step)?;
        let updated = integral_with_tail(&g, step);
        Ok(GCurve { y, kernel: GKernel::Displayed, u, g, step, integral: updated, iterations, richardson_error, degenerate })
    };
    let first = curve(0.0, 1, false)?;
    if k == 1.0 {
        return Ok(first);
    }
    let slope = curve(1.0, 1, false)?.integral - first.integral;
    if (slope - 1.0).abs() < DEGENERATE_SLOPE_TOL {
        return Ok(GCurve { degenerate: true, ..first });
    }
    let mut integral = 0.5 * first.integral;
    let mut previous = 0.0;
    for iteration in 2..=max_iter.max(2) {
        let c = curve(integral, iteration, false)?;
        if (c.integral - integral).abs() <= tol * integral.abs().max(1.0) {
            return Ok(c);
        }
        previous = integral;
        integral = 0.5 * integral + 0.5 * c.integral;
        if !integral.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        routine: "solve_g_fixed_point",
        detail: format!("integral iterates {previous:.6e} → {integral:.6e} after {max_iter} iterations"),
    })
}

/// `G(·, y)` under the jump-law kernel, where integrating the equation
/// over `u` gives `G(0, y) = (f(kλ)/c) ∫_0^y (1 − H(v)) dv` directly.
pub fn solve_g_jump_law(model: &RiskModel, y: f64, u_max: f64, step: f64) -> Result<GCurve> {
    let kernel = g_kernel(model, GKernel::JumpLaw)?;
    let a = model.ode_coefficient();
    let g0 = a * kernel.integrated_tail(y);
    let (u, g, richardson_error) = solve_known_start(&kernel, a, y, g0, u_max, step)?;
    let integral = integral_with_tail(&g, step);
    Ok(GCurve { y, kernel: GKernel::JumpLaw, u, g, step, integral, iterations: 1, richardson_error, degenerate: false })
}

/// `ψ(0)` from the published boundary identity,
/// `(f/c)[(k−1)∫ψ + k ∫(1 − B₁)]`, given a value for `∫_0^∞ ψ`.
pub fn psi0_boundary_identity(model: &RiskModel, psi_integral: f64) -> Result<f64> {
    let agg = aggregate_claim_cdf(&model.claim, model.arrivals.pok.k())?;
    let k = model.arrivals.pok.k() as f64;
    Ok(model.ode_coefficient() * ((k - 1.0) * psi_integral + k * agg.b1_mean()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::PoKParams;
    use crate::subordinator::SubordinatorSpec;

    fn classical(c: f64) -> RiskModel {
        let arrivals = TimeChangedSpec::direct(PoKParams::new(1, 1.0).unwrap(), SubordinatorSpec::drift(1.0).unwrap()).unwrap();
        RiskModel::new(c, 0.0, ClaimDist::exponential(1.0).unwrap(), arrivals).unwrap()
    }

    #[test]
    fn loading_examples() {
        assert!((premium_loading(&classical(2.0)).unwrap() - 1.0).abs() < 1e-15);
        let arrivals = TimeChangedSpec::direct(PoKParams::new(3, 1.2).unwrap(), SubordinatorSpec::drift(1.0).unwrap()).unwrap();
        let m = RiskModel::new(10.8, 0.0, ClaimDist::exponential(1.0).unwrap(), arrivals).unwrap();
        assert!((premium_loading(&m).unwrap() - 0.5).abs() < 1e-12);
        assert!(premium_loading(&classical(1.0)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn aggregate_cdf_k2_exponential() {
        let agg = aggregate_claim_cdf(&ClaimDist::exponential(1.0).unwrap(), 2).unwrap();
        for &x in &[0.0f64, 0.3, 1.0, 4.0] {
            let expect = 0.5 * ((1.0 - (-x).exp()) + (1.0 - (-x).exp() * (1.0 + x)));
            assert!((agg.b1(x) - expect).abs() < 1e-14, "x={x}");
        }
        assert!((agg.b1(60.0) - 1.0).abs() < 1e-15);
        assert_eq!(agg.b1(0.0), 0.0);
        let k1 = aggregate_claim_cdf(&ClaimDist::exponential(2.0).unwrap(), 1).unwrap();
        assert!((k1.b1(1.3) - (1.0 - (-0.65f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn integrated_tail_matches_quadrature() {
        let mix = ErlangMixture { rate: 1.5, terms: vec![(1, 0.3), (4, 0.7)] };
        let y = 2.2;
        let n = 20000;
        let h = y / n as f64;
        let vals: Vec<f64> = (0..=n).map(|i| mix.mass() - mix.cdf(i as f64 * h)).collect();
        assert!((trapezoid(&vals, h) - mix.integrated_tail(y)).abs() < 1e-8);
        assert!((mix.integrated_tail(f64::INFINITY) - mix.first_moment()).abs() < 1e-14);
    }

    #[test]
    fn classical_g0_closed_form() {
        let curve = solve_g_k1(&classical(2.0), 1.0, 10.0, 0.01).unwrap();
        assert!((curve.g[0] - (1.0 - (-1.0f64).exp()) / 2.0).abs() < 1e-12);
        assert_eq!(curve.iterations, 1);
    }

    #[test]
    fn classical_psi_profile() {
        // ψ(u) = (λμ/c) e^{−(1/μ − λ/c)u}
        let curve = solve_g_k1(&classical(2.0), 40.0, 10.0, 0.01).unwrap();
        for &u in &[0.0f64, 1.0, 2.0, 5.0] {
            let exact = 0.5 * (-0.5 * u).exp();
            assert!((curve.value_at(u) - exact).abs() < 1e-8, "u={u}: {}", curve.value_at(u));
        }
        assert!(curve.richardson_error < 1e-5);
    }

    #[test]
    fn jump_law_kernel_reduces_to_classical() {
        let m = classical(2.0);
        let a = solve_g_jump_law(&m, 1.0, 8.0, 0.01).unwrap();
        let b = solve_g_k1(&m, 1.0, 8.0, 0.01).unwrap();
        for (x, y) in a.g.iter().zip(&b.g) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn k1_rejected_for_higher_order() {
        let arrivals = TimeChangedSpec::direct(PoKParams::new(2, 1.0).unwrap(), SubordinatorSpec::drift(1.0).unwrap()).unwrap();
        let m = RiskModel::new(4.0, 0.0, ClaimDist::exponential(1.0).unwrap(), arrivals).unwrap();
        assert!(matches!(solve_g_k1(&m, 1.0, 5.0, 0.01), Err(Error::Unsupported(_))));
    }

    fn gamma_k2() -> RiskModel {
        let arrivals =
            TimeChangedSpec::direct(PoKParams::new(2, 1.0).unwrap(), SubordinatorSpec::gamma(3.0, 4.0).unwrap()).unwrap();
        RiskModel::new(4.5, 0.0, ClaimDist::exponential(1.0).unwrap(), arrivals).unwrap()
    }

    #[test]
    fn jump_law_psi0_is_net_profit_identity() {
        // ψ(0) = E[claims per unit time]/c = 1/(1 + ρ)
        let m = gamma_k2();
        assert!((premium_loading(&m).unwrap() - 1.0).abs() < 1e-12);
        let curve = solve_g_jump_law(&m, f64::INFINITY, 20.0, 0.01).unwrap();
        assert!((curve.g[0] - 0.5).abs() < 1e-10, "{}", curve.g[0]);
        assert!(curve.g.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn displayed_fixed_point_from_zero() {
        let m = gamma_k2();
        let curve = solve_g_fixed_point(&m, f64::INFINITY, 20.0, 0.01, 200, 1e-10).unwrap();
        let a = m.ode_coefficient();
        // k·E[B₁] = Σ_{i≤k} i·μ = 3
        assert!((curve.g[0] - 3.0 * a).abs() < 1e-8, "{} vs {}", curve.g[0], 3.0 * a);
        assert!(curve.degenerate);
    }

    #[test]
    fn ladder_ruin_lookup() {
        let p = LadderPath { records: vec![(0.5, 1.0), (2.0, 3.0)] };
        assert_eq!(p.ruin(0.0), Some((0.5, 1.0)));
        assert_eq!(p.ruin(0.5), Some((1.5, 3.0)));
        assert_eq!(p.ruin(2.0), None);
    }
}
