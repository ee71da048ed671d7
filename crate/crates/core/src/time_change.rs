//! The PPoK evaluated at a subordinator (type I) or at an inverse
//! subordinator (type II).
//!
//! Conditionally on the time change `W`, `P[N(W) = n] = p_n(W)` with `p_n`
//! the order-k Poisson pmf, so every pmf route here averages `p_n(W)`:
//! in closed form, by quadrature against the density of `W`, or over
//! simulated draws of `W`.

use rand::Rng;
use serde::Serialize;

use crate::combinatorics::{PoKParams, ZetaWeights};
use crate::error::{domain, Error, Result};
use crate::process::{sample_count, uniform_jump};
use crate::quadrature::{integrate_with_tail, Tolerance};
use crate::rng::{replicate, RngStream};
use crate::special::ln_gamma;
use crate::stats::{correlation, least_squares, McEstimate};
use crate::subordinator::{SubordinatorSpec, DEFAULT_MAX_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `Q(t) = N(D(t))`
    Direct,
    /// `Q(t) = N(E(t))`, `E` the first-exit time of `D`
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeChangedSpec {
    pub pok: PoKParams,
    pub sub: SubordinatorSpec,
    pub mode: Mode,
}

impl TimeChangedSpec {
    pub fn new(pok: PoKParams, sub: SubordinatorSpec, mode: Mode) -> Result<Self> {
        Ok(Self { pok, sub: sub.validated()?, mode })
    }

    pub fn direct(pok: PoKParams, sub: SubordinatorSpec) -> Result<Self> {
        Self::new(pok, sub, Mode::Direct)
    }

    pub fn inverse(pok: PoKParams, sub: SubordinatorSpec) -> Result<Self> {
        Self::new(pok, sub, Mode::Inverse)
    }

    fn require(&self, mode: Mode, what: &str) -> Result<()> {
        if self.mode == mode {
            Ok(())
        } else {
            Err(Error::Unsupported(format!("{what} needs {mode:?} mode, spec is {:?}", self.mode)))
        }
    }
}

/// Counts of a time-changed process observed at a list of times, along
/// with the time change itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeChangedPath {
    pub grid: Vec<f64>,
    pub time_change: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Grid controls for inverse-subordinator simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseGrid {
    pub step: f64,
    pub max_steps: usize,
}

impl InverseGrid {
    pub fn new(step: f64) -> Self {
        Self { step, max_steps: DEFAULT_MAX_STEPS }
    }

    /// Step `1e-3·horizon`.
    pub fn for_horizon(horizon: f64) -> Self {
        Self::new(1e-3 * horizon)
    }
}

/// Observe `Q` at ascending `times`.
///
/// Direct mode draws exact subordinator increments between consecutive
/// times. Inverse mode inverts a forward path on a grid of `grid.step`, so
/// `E` is biased upward by less than one step. Counts are then filled in
/// with exact PPoK increments over the time-change increments.
pub fn sample_at_times<R: Rng + ?Sized>(
    spec: &TimeChangedSpec,
    times: &[f64],
    grid: InverseGrid,
    rng: &mut R,
) -> Result<TimeChangedPath> {
    if times.iter().any(|&t| !(t >= 0.0)) || times.windows(2).any(|w| w[0] > w[1]) {
        return domain("observation times must be non-negative and ascending");
    }
    let time_change = match spec.mode {
        Mode::Direct => {
            let mut level = 0.0;
            let mut prev = 0.0;
            let mut values = Vec::with_capacity(times.len());
            for &t in times {
                if t > prev {
                    level += match spec.sub {
                        SubordinatorSpec::Drift { b } => b * (t - prev),
                        _ => spec.sub.sample_increment(t - prev, rng)?,
                    };
                }
                prev = t;
                values.push(level);
            }
            values
        }
        Mode::Inverse => spec.sub.inverse_at_levels(times, grid.step, grid.max_steps, rng)?,
    };
    let mut counts = Vec::with_capacity(times.len());
    let mut count = 0;
    let mut prev = 0.0;
    for &w in &time_change {
        count += sample_count(&spec.pok, w - prev, rng);
        prev = w;
        counts.push(count);
    }
    Ok(TimeChangedPath { grid: times.to_vec(), time_change, counts })
}

/// One path on a uniform grid of `[0, horizon]` with step `step`.
pub fn simulate<R: Rng + ?Sized>(spec: &TimeChangedSpec, horizon: f64, step: f64, rng: &mut R) -> Result<TimeChangedPath> {
    if !(horizon > 0.0 && step > 0.0) {
        return domain(format!("horizon and step must be positive (got {horizon}, {step})"));
    }
    let n = ((horizon / step) - 1e-9).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
    times[n] = horizon;
    sample_at_times(spec, &times, InverseGrid::new(step), rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfMethod {
    /// Gamma family only.
    Closed,
    /// Gamma and inverse Gaussian.
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PmfValue {
    Exact { value: f64, error: f64 },
    Estimate(McEstimate),
}

impl PmfValue {
    pub fn value(&self) -> f64 {
        match self {
            Self::Exact { value, .. } => *value,
            Self::Estimate(e) => e.value,
        }
    }

    /// Standard error for Monte Carlo values, quadrature error estimate otherwise.
    pub fn uncertainty(&self) -> f64 {
        match self {
            Self::Exact { error, .. } => *error,
            Self::Estimate(e) => e.stderr,
        }
    }
}

/// Monte Carlo budget shared by the pmf estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McBudget {
    pub n_samples: usize,
    pub stream: RngStream,
    /// Inverse-subordinator grid; `None` means `1e-3·t`.
    pub grid: Option<InverseGrid>,
    /// Cap on forward grid steps summed over all samples (inverse mode).
    pub max_total_steps: u64,
}

impl McBudget {
    pub fn new(n_samples: usize, stream: RngStream) -> Self {
        Self { n_samples, stream, grid: None, max_total_steps: u64::MAX }
    }
}

/// `E[e^{-kλD(t)} D(t)^ζ]` for the gamma subordinator, as a log.
pub fn gamma_ln_tilted_moment(p: f64, alpha: f64, t: f64, k_lambda: f64, zeta: u32) -> f64 {
    let shape = p * t;
    let z = zeta as f64;
    ln_gamma(shape + z) - ln_gamma(shape) + shape * alpha.ln() - (shape + z) * (alpha + k_lambda).ln()
}

/// `P[Q(t) = n]` for `n = 0..=n_max` in Direct mode.
pub fn tcppok1_pmf_table(
    spec: &TimeChangedSpec,
    t: f64,
    n_max: u32,
    method: PmfMethod,
    budget: Option<McBudget>,
) -> Result<Vec<PmfValue>> {
    spec.require(Mode::Direct, "tcppok1_pmf")?;
    if !(t > 0.0) {
        return domain(format!("t must be positive, got {t}"));
    }
    let weights = ZetaWeights::new(spec.pok.k(), n_max)?;
    let lambda = spec.pok.lambda();
    let k_lambda = spec.pok.event_rate();
    match method {
        PmfMethod::Closed => {
            let SubordinatorSpec::Gamma { p, alpha } = spec.sub else {
                return Err(Error::Unsupported(format!(
                    "closed-form pmf exists for the gamma family only, not {}",
                    spec.sub.name()
                )));
            };
            Ok((0..=n_max)
                .map(|n| {
                    let value = weights
                        .row(n)
                        .iter()
                        .map(|&(z, lw)| (lw + z as f64 * lambda.ln() + gamma_ln_tilted_moment(p, alpha, t, k_lambda, z)).exp())
                        .sum();
                    PmfValue::Exact { value, error: 0.0 }
                })
                .collect())
        }
        PmfMethod::Quadrature => {
            let mean = match spec.sub {
                SubordinatorSpec::Gamma { .. } | SubordinatorSpec::InverseGaussian { .. } => spec.sub.mean(t)?,
                _ => {
                    return Err(Error::Unsupported(format!(
                        "quadrature pmf needs a closed-form density; {} has none",
                        spec.sub.name()
                    )))
                }
            };
            let sd = spec.sub.variance(t)?.sqrt();
            let tol = Tolerance { abs: 1e-13, rel: 1e-11, max_intervals: 4000 };
            (0..=n_max)
                .map(|n| {
                    // p_n(y) peaks near y = n / (k(k+1)λ/2)
                    let peak = n as f64 / spec.pok.mean_rate();
                    let mut breaks = vec![0.0, 0.25 * mean, mean, mean + 2.0 * sd, mean + 6.0 * sd];
                    if peak > 0.0 {
                        breaks.push(peak);
                    }
                    breaks.sort_by(f64::total_cmp);
                    breaks.dedup();
                    let integral = integrate_with_tail(
                        |y| weights.pmf(lambda, y, n) * spec.sub.density(y, t).unwrap_or(0.0),
                        &breaks,
                        mean + sd,
                        tol,
                    )?;
                    Ok(PmfValue::Exact { value: integral.value, error: integral.error })
                })
                .collect()
        }
        PmfMethod::MonteCarlo => {
            let budget = budget.ok_or_else(|| Error::Config("Monte Carlo pmf needs a budget".into()))?;
            let draws = replicate(budget.stream, budget.n_samples, |_, rng| match spec.sub {
                SubordinatorSpec::Drift { b } => Ok(b * t),
                _ => spec.sub.sample_increment(t, rng),
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            Ok(mc_pmf_from_draws(&weights, lambda, &draws)
                .into_iter()
                .map(PmfValue::Estimate)
                .collect())
        }
    }
}

pub fn tcppok1_pmf(spec: &TimeChangedSpec, t: f64, n: u32, method: PmfMethod, budget: Option<McBudget>) -> Result<PmfValue> {
    Ok(*tcppok1_pmf_table(spec, t, n, method, budget)?.last().expect("n_max + 1 entries"))
}

fn mc_pmf_from_draws(weights: &ZetaWeights, lambda: f64, draws: &[f64]) -> Vec<McEstimate> {
    let tables: Vec<Vec<f64>> = draws.iter().map(|&w| weights.pmf_table(lambda, w)).collect();
    (0..=weights.n_max() as usize)
        .map(|n| {
            let column: Vec<f64> = tables.iter().map(|row| row[n]).collect();
            McEstimate::from_samples(&column)
        })
        .collect()
}

/// Monte Carlo pmf of the inverse-mode process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tcppok2Pmf {
    pub values: Vec<McEstimate>,
    /// The total step budget ran out before `n_samples` draws were made.
    pub partial: bool,
    pub samples_used: usize,
    /// Upper bound on the grid bias of the inverse subordinator.
    pub grid_step: f64,
}

const TCPPOK2_CHUNK: usize = 4096;

/// `P[Q(t) = n]`, `n ≤ n_max`, in Inverse mode, by averaging
/// `p_n(E(t))` over grid-inverted draws of `E(t)`.
pub fn tcppok2_pmf_table(spec: &TimeChangedSpec, t: f64, n_max: u32, budget: McBudget) -> Result<Tcppok2Pmf> {
    spec.require(Mode::Inverse, "tcppok2_pmf")?;
    if !(t > 0.0) {
        return domain(format!("t must be positive, got {t}"));
    }
    let grid = budget.grid.unwrap_or_else(|| InverseGrid::for_horizon(t));
    let weights = ZetaWeights::new(spec.pok.k(), n_max)?;
    let mut draws: Vec<f64> = Vec::with_capacity(budget.n_samples);
    let mut steps_used: u64 = 0;
    let mut partial = false;
    let mut chunk = 0u64;
    while draws.len() < budget.n_samples {
        if steps_used >= budget.max_total_steps {
            partial = true;
            break;
        }
        let len = TCPPOK2_CHUNK.min(budget.n_samples - draws.len());
        let batch = replicate(budget.stream.substream(chunk), len, |_, rng| {
            spec.sub.inverse_at(t, grid.step, grid.max_steps, rng)
        });
        for e in batch {
            let e = e?;
            steps_used = steps_used.saturating_add((e / grid.step).round() as u64);
            draws.push(e);
        }
        chunk += 1;
    }
    if draws.is_empty() {
        return Err(Error::BudgetExhausted("no inverse-subordinator draws fit the step budget".into()));
    }
    Ok(Tcppok2Pmf {
        values: mc_pmf_from_draws(&weights, spec.pok.lambda(), &draws),
        partial,
        samples_used: draws.len(),
        grid_step: grid.step,
    })
}

pub fn tcppok2_pmf(spec: &TimeChangedSpec, t: f64, n: u32, budget: McBudget) -> Result<(McEstimate, bool)> {
    let table = tcppok2_pmf_table(spec, t, n, budget)?;
    Ok((*table.values.last().expect("n_max + 1 entries"), table.partial))
}

/// `E[Q(t)] = k(k+1)λ/2 · E[D(t)]` (Direct mode).
pub fn tc_mean(spec: &TimeChangedSpec, t: f64) -> Result<f64> {
    spec.require(Mode::Direct, "tc_mean")?;
    Ok(spec.pok.mean_rate() * spec.sub.mean(t)?)
}

/// `Cov[Q(s), Q(t)] = k(k+1)(2k+1)λ/6 · E[D(m)] + (k(k+1)λ/2)² Var[D(m)]`,
/// `m = min(s, t)` (Direct mode).
pub fn tc_cov(spec: &TimeChangedSpec, s: f64, t: f64) -> Result<f64> {
    spec.require(Mode::Direct, "tc_cov")?;
    let m = s.min(t);
    Ok(spec.pok.variance_rate() * spec.sub.mean(m)? + spec.pok.mean_rate().powi(2) * spec.sub.variance(m)?)
}

pub fn tc_var(spec: &TimeChangedSpec, t: f64) -> Result<f64> {
    tc_cov(spec, t, t)
}

pub fn tc_dispersion_index(spec: &TimeChangedSpec, t: f64) -> Result<f64> {
    Ok(tc_var(spec, t)? / tc_mean(spec, t)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrdReport {
    pub s: f64,
    pub times: Vec<f64>,
    pub correlations: Vec<McEstimate>,
    /// Least-squares slope of `ln Corr` against `ln t`.
    pub slope: f64,
    pub intercept: f64,
}

/// Estimate `Corr[Q(s), Q(t)]` over `t_grid` from common paths and fit the
/// log-log decay exponent.
pub fn lrd_decay_check(
    spec: &TimeChangedSpec,
    s: f64,
    t_grid: &[f64],
    n_reps: usize,
    stream: RngStream,
    grid: Option<InverseGrid>,
) -> Result<LrdReport> {
    if t_grid.len() < 2 || t_grid.iter().any(|&t| t < s) || !(s > 0.0) {
        return domain("need s > 0 and at least two times t ≥ s");
    }
    let mut times = vec![s];
    times.extend_from_slice(t_grid);
    let last = *t_grid.last().expect("non-empty");
    let grid = grid.unwrap_or_else(|| InverseGrid::for_horizon(last));
    let paths = replicate(stream, n_reps, |_, rng| sample_at_times(spec, &times, grid, rng))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let at = |j: usize| -> Vec<f64> { paths.iter().map(|p| p.counts[j] as f64).collect() };
    let base = at(0);
    let correlations: Vec<McEstimate> = (1..times.len()).map(|j| correlation(&base, &at(j), 50)).collect();
    let xs: Vec<f64> = t_grid.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = correlations.iter().map(|c| c.value.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(LrdReport { s, times: t_grid.to_vec(), correlations, slope, intercept })
}

/// Log-log slope of the exact Direct-mode correlation over `t_grid`.
pub fn analytic_corr_slope(spec: &TimeChangedSpec, s: f64, t_grid: &[f64]) -> Result<f64> {
    let vs = tc_var(spec, s)?;
    let mut xs = Vec::with_capacity(t_grid.len());
    let mut ys = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let corr = tc_cov(spec, s, t)? / (vs * tc_var(spec, t)?).sqrt();
        xs.push(t.ln());
        ys.push(corr.ln());
    }
    Ok(least_squares(&xs, &ys).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    SmallT,
    LargeT,
}

/// How to read the large-t coefficient of the inverse tempered-stable mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperedReading {
    /// `E[E(t)] ~ μ^{1−α} t/α`, i.e. `t / f'(0+)`.
    #[default]
    Tempering,
    /// The printed `k(k+1)λ^{2−α}/(2α)`, with λ the PPoK rate.
    Literal,
}

/// `(coefficient, exponent)` with `E[Q(t)] ~ coefficient · t^exponent`
/// in the given regime (Inverse mode).
pub fn tcppok2_asymptotic_mean(spec: &TimeChangedSpec, regime: Regime, reading: TemperedReading) -> Result<(f64, f64)> {
    spec.require(Mode::Inverse, "tcppok2_asymptotic_mean")?;
    let rate = spec.pok.mean_rate();
    let unsupported = || {
        Err(Error::Unsupported(format!(
            "no asymptotic mean for the inverse {} subordinator as t {}",
            spec.sub.name(),
            if regime == Regime::SmallT { "→ 0" } else { "→ ∞" }
        )))
    };
    match (spec.sub, regime) {
        (SubordinatorSpec::Drift { b }, _) => Ok((rate / b, 1.0)),
        (SubordinatorSpec::Gamma { p, alpha }, Regime::LargeT) => Ok((rate * alpha / p, 1.0)),
        (SubordinatorSpec::Gamma { .. }, Regime::SmallT) => unsupported(),
        (SubordinatorSpec::TemperedStable { alpha, .. }, Regime::SmallT) => {
            Ok((rate / ln_gamma(1.0 + alpha).exp(), alpha))
        }
        (SubordinatorSpec::TemperedStable { alpha, mu }, Regime::LargeT) => match reading {
            TemperedReading::Tempering if mu > 0.0 => Ok((rate * mu.powf(1.0 - alpha) / alpha, 1.0)),
            TemperedReading::Tempering => unsupported(),
            TemperedReading::Literal => {
                let k = spec.pok.k() as f64;
                Ok((k * (k + 1.0) * spec.pok.lambda().powf(2.0 - alpha) / (2.0 * alpha), 1.0))
            }
        },
        (SubordinatorSpec::InverseGaussian { delta, .. }, Regime::SmallT) => {
            Ok((rate / (ln_gamma(1.5).exp() * delta * 2f64.sqrt()), 0.5))
        }
        (SubordinatorSpec::InverseGaussian { delta, gamma }, Regime::LargeT) => Ok((rate * gamma / delta, 1.0)),
    }
}

/// Monte Carlo `E[Q(t)]` in Inverse mode. Each draw contributes
/// `E[Q(t) | E(t)] = k(k+1)λ/2 · E(t)`, which has the same mean as the
/// count and much less variance at small `t`.
pub fn tcppok2_mean_mc(spec: &TimeChangedSpec, t: f64, n_samples: usize, stream: RngStream, grid: Option<InverseGrid>) -> Result<McEstimate> {
    spec.require(Mode::Inverse, "tcppok2_mean_mc")?;
    if !(t > 0.0) || n_samples < 2 {
        return domain("need t > 0 and at least two samples");
    }
    let grid = grid.unwrap_or_else(|| InverseGrid::for_horizon(t));
    let rate = spec.pok.mean_rate();
    let draws = replicate(stream, n_samples, |_, rng| spec.sub.inverse_at(t, grid.step, grid.max_steps, rng).map(|e| rate * e))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(McEstimate::from_samples(&draws))
}

/// Jump-size law of the Direct-mode process.
///
/// A jump of size `i` occurs at rate
/// `r_i = −Σ_{Ω(k,i)} (−λ)^ζ/Π! · f^{(ζ)}(kλ)`, and `Σ_i r_i = f(kλ)`.
/// Every summand is non-negative because `f^{(ζ)}` alternates in sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrivalJumpLaw {
    /// `f(kλ)`
    pub total_rate: f64,
    /// `probs[i-1] = r_i / f(kλ)`, truncated once the tail mass is below
    /// `tail_tol`.
    pub probs: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub tail_mass: f64,
}

/// Largest jump size tabulated by [`arrival_jump_law`].
pub const MAX_JUMP_SIZE: u32 = 4000;

pub fn arrival_jump_law(pok: &PoKParams, sub: &SubordinatorSpec, tail_tol: f64) -> Result<ArrivalJumpLaw> {
    let k_lambda = pok.event_rate();
    let total_rate = sub.bernstein(k_lambda);
    if let SubordinatorSpec::Drift { .. } = sub {
        let k = pok.k() as usize;
        let probs = vec![1.0 / k as f64; k];
        let cumulative = (1..=k).map(|i| i as f64 / k as f64).collect();
        return Ok(ArrivalJumpLaw { total_rate, probs, cumulative, tail_mass: 0.0 });
    }
    let ln_lambda = pok.lambda().ln();
    let mut probs = Vec::new();
    let mut acc;
    let mut size = 64u32;
    loop {
        let weights = ZetaWeights::new(pok.k(), size)?;
        probs.clear();
        acc = 0.0;
        for i in 1..=size {
            let terms: Vec<f64> = weights
                .row(i)
                .iter()
                .map(|&(z, lw)| lw + z as f64 * ln_lambda + sub.ln_bernstein_derivative(z, k_lambda).0)
                .collect();
            let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let rate = if m.is_finite() { m.exp() * terms.iter().map(|t| (t - m).exp()).sum::<f64>() } else { 0.0 };
            let p = rate / total_rate;
            probs.push(p);
            acc += p;
            if 1.0 - acc < tail_tol {
                break;
            }
        }
        if 1.0 - acc < tail_tol || size >= MAX_JUMP_SIZE {
            break;
        }
        size = (size * 4).min(MAX_JUMP_SIZE);
    }
    let tail_mass = (1.0 - acc).max(0.0);
    if tail_mass >= tail_tol.max(1e-6) {
        return Err(Error::NonConvergence {
            routine: "arrival_jump_law",
            detail: format!("tail mass {tail_mass:.3e} beyond jump size {MAX_JUMP_SIZE}"),
        });
    }
    let mut running = 0.0;
    let cumulative = probs
        .iter()
        .map(|p| {
            running += p;
            running / acc
        })
        .collect();
    Ok(ArrivalJumpLaw { total_rate, probs, cumulative, tail_mass })
}

impl ArrivalJumpLaw {
    pub fn max_size(&self) -> u32 {
        self.probs.len() as u32
    }

    pub fn mean_size(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, p)| (i + 1) as f64 * p).sum()
    }

    /// Draw a jump size (the truncated tail is renormalised away).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        if self.probs.iter().all(|&p| p == self.probs[0]) && self.tail_mass == 0.0 {
            return uniform_jump(self.max_size(), rng);
        }
        let u: f64 = rng.random();
        (self.cumulative.partition_point(|&c| c <= u) as u32 + 1).min(self.max_size())
    }
}
