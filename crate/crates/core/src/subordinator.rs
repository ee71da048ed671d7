//! Parametric Lévy subordinators.
//!
//! Each family is described by its Bernstein function `f`, with
//! `E[e^{-s D(t)}] = e^{-t f(s)}`:
//!
//! | family            | `f(s)`                       |
//! |-------------------|------------------------------|
//! | drift `b`         | `b s`                        |
//! | gamma `(p, α)`    | `p ln(1 + s/α)`              |
//! | tempered stable `(α, μ)` | `(s + μ)^α − μ^α`     |
//! | inverse Gaussian `(δ, γ)` | `δ(√(2s + γ²) − γ)`  |
//!
//! The tempered-stable Lévy measure `c e^{-μx} x^{-α-1}` is normalised by
//! `c = α/Γ(1 − α)`, which is what the Bernstein function above implies.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::process::exponential;
use crate::special::{bessel_k_half_scaled, ln_gamma};

/// Cap on rejected proposals for one tempered-stable increment.
pub const MAX_REJECTIONS: usize = 1_000_000;
/// Default cap on forward grid steps when inverting a subordinator path.
pub const DEFAULT_MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SubordinatorSpec {
    Drift { b: f64 },
    Gamma { p: f64, alpha: f64 },
    TemperedStable { alpha: f64, mu: f64 },
    InverseGaussian { delta: f64, gamma: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

impl SubordinatorSpec {
    pub fn drift(b: f64) -> Result<Self> {
        Self::Drift { b }.validated()
    }

    pub fn gamma(p: f64, alpha: f64) -> Result<Self> {
        Self::Gamma { p, alpha }.validated()
    }

    /// `mu = 0` gives the pure α-stable subordinator (no finite moments).
    pub fn tempered_stable(alpha: f64, mu: f64) -> Result<Self> {
        Self::TemperedStable { alpha, mu }.validated()
    }

    pub fn inverse_gaussian(delta: f64, gamma: f64) -> Result<Self> {
        Self::InverseGaussian { delta, gamma }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Drift { b } => positive("drift b", b)?,
            Self::Gamma { p, alpha } => {
                positive("gamma p", p)?;
                positive("gamma alpha", alpha)?;
            }
            Self::TemperedStable { alpha, mu } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return domain(format!("stability index must lie in (0, 1), got {alpha}"));
                }
                if !(mu >= 0.0 && mu.is_finite()) {
                    return domain(format!("tempering mu must be non-negative, got {mu}"));
                }
            }
            Self::InverseGaussian { delta, gamma } => {
                positive("inverse Gaussian delta", delta)?;
                positive("inverse Gaussian gamma", gamma)?;
            }
        }
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Drift { .. } => "drift",
            Self::Gamma { .. } => "gamma",
            Self::TemperedStable { .. } => "tempered_stable",
            Self::InverseGaussian { .. } => "inverse_gaussian",
        }
    }

    /// Bernstein function `f(s)`, `s ≥ 0`.
    pub fn bernstein(&self, s: f64) -> f64 {
        match *self {
            Self::Drift { b } => b * s,
            Self::Gamma { p, alpha } => p * (s / alpha).ln_1p(),
            Self::TemperedStable { alpha, mu } => (s + mu).powf(alpha) - mu.powf(alpha),
            Self::InverseGaussian { delta, gamma } => {
                // δ(√(2s+γ²) − γ) = 2δs / (√(2s+γ²) + γ), without cancellation.
                2.0 * delta * s / ((2.0 * s + gamma * gamma).sqrt() + gamma)
            }
        }
    }

    /// `(ln |f^{(n)}(s)|, sign)` for `n ≥ 1`. A zero derivative returns
    /// `(-∞, 0.0)`.
    pub fn ln_bernstein_derivative(&self, n: u32, s: f64) -> (f64, f64) {
        assert!(n >= 1, "derivative order must be at least 1");
        let alternating = if n % 2 == 1 { 1.0 } else { -1.0 };
        let nf = n as f64;
        match *self {
            Self::Drift { b } => {
                if n == 1 {
                    (b.ln(), 1.0)
                } else {
                    (f64::NEG_INFINITY, 0.0)
                }
            }
            Self::Gamma { p, alpha } => (p.ln() + ln_gamma(nf) - nf * (alpha + s).ln(), alternating),
            Self::TemperedStable { alpha, mu } => {
                // |α(α−1)…(α−n+1)| = α Γ(n−α)/Γ(1−α)
                let ln_falling = alpha.ln() + ln_gamma(nf - alpha) - ln_gamma(1.0 - alpha);
                (ln_falling + (alpha - nf) * (s + mu).ln(), alternating)
            }
            Self::InverseGaussian { delta, gamma } => {
                // f^{(n)} = δ 2^n (1/2)(−1/2)…(3/2−n) (2s+γ²)^{1/2−n}
                let ln_falling = 0.5f64.ln() + ln_gamma(nf - 0.5) - ln_gamma(0.5);
                (
                    delta.ln() + nf * 2f64.ln() + ln_falling + (0.5 - nf) * (2.0 * s + gamma * gamma).ln(),
                    alternating,
                )
            }
        }
    }

    pub fn bernstein_derivative(&self, n: u32, s: f64) -> f64 {
        let (ln, sign) = self.ln_bernstein_derivative(n, s);
        sign * ln.exp()
    }

    /// `E[e^{-s D(t)}] = e^{-t f(s)}`.
    pub fn laplace_transform(&self, s: f64, t: f64) -> f64 {
        (-t * self.bernstein(s)).exp()
    }

    /// `E[D(t)] = t f'(0+)`.
    pub fn mean(&self, t: f64) -> Result<f64> {
        Ok(t * match *self {
            Self::Drift { b } => b,
            Self::Gamma { p, alpha } => p / alpha,
            Self::TemperedStable { alpha, mu } => {
                self.require_tempering()?;
                alpha * mu.powf(alpha - 1.0)
            }
            Self::InverseGaussian { delta, gamma } => delta / gamma,
        })
    }

    /// `Var[D(t)] = −t f''(0+)`.
    pub fn variance(&self, t: f64) -> Result<f64> {
        Ok(t * match *self {
            Self::Drift { .. } => 0.0,
            Self::Gamma { p, alpha } => p / (alpha * alpha),
            Self::TemperedStable { alpha, mu } => {
                self.require_tempering()?;
                alpha * (1.0 - alpha) * mu.powf(alpha - 2.0)
            }
            Self::InverseGaussian { delta, gamma } => delta / gamma.powi(3),
        })
    }

    fn require_tempering(&self) -> Result<()> {
        match *self {
            Self::TemperedStable { mu, .. } if mu <= 0.0 => Err(Error::Unsupported(
                "the untempered stable subordinator has infinite moments".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Lévy density `ν(dx)/dx`; `None` for the pure drift.
    pub fn levy_density(&self, x: f64) -> Option<f64> {
        if x <= 0.0 {
            return Some(0.0);
        }
        match *self {
            Self::Drift { .. } => None,
            Self::Gamma { p, alpha } => Some(p * (-alpha * x).exp() / x),
            Self::TemperedStable { alpha, mu } => {
                let c = alpha / ln_gamma(1.0 - alpha).exp();
                Some(c * (-mu * x).exp() * x.powf(-alpha - 1.0))
            }
            Self::InverseGaussian { delta, gamma } => {
                Some(delta / (2.0 * PI * x.powi(3)).sqrt() * (-gamma * gamma * x / 2.0).exp())
            }
        }
    }

    /// Density of `D(t)` at `x` (gamma and inverse Gaussian only).
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        match *self {
            Self::Gamma { p, alpha } => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                let shape = p * t;
                Ok((shape * alpha.ln() + (shape - 1.0) * x.ln() - alpha * x - ln_gamma(shape)).exp())
            }
            Self::InverseGaussian { delta, gamma } => {
                if x <= 0.0 {
                    return Ok(0.0);
                }
                let dt = delta * t;
                let expo = dt * gamma - dt * dt / (2.0 * x) - gamma * gamma * x / 2.0;
                Ok(dt / (2.0 * PI * x.powi(3)).sqrt() * expo.exp())
            }
            _ => Err(Error::Unsupported(format!(
                "no closed-form density for the {} subordinator",
                self.name()
            ))),
        }
    }

    /// One draw of `D(dt)`.
    pub fn sample_increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> Result<f64> {
        if !(dt > 0.0) {
            return domain(format!("increment length must be positive, got {dt}"));
        }
        match *self {
            Self::Drift { b } => Ok(b * dt),
            Self::Gamma { p, alpha } => Ok(Gamma::new(p * dt, 1.0 / alpha)
                .map_err(|e| Error::Domain(e.to_string()))?
                .sample(rng)),
            Self::InverseGaussian { delta, gamma } => Ok(inverse_gaussian(delta * dt / gamma, (delta * dt).powi(2), rng)),
            Self::TemperedStable { alpha, mu } => {
                // Each rejection stage accepts with probability e^{-piece·μ^α};
                // split dt so that this stays above e^{-1}.
                let cost = dt * mu.powf(alpha);
                let pieces = cost.ceil().max(1.0) as usize;
                let piece = dt / pieces as f64;
                let mut total = 0.0;
                for _ in 0..pieces {
                    total += tempered_stable(alpha, mu, piece, rng)?;
                }
                Ok(total)
            }
        }
    }

    /// Cumulative path on a uniform grid over `[0, horizon]`; the step is
    /// `horizon / ceil(horizon / h)`.
    pub fn simulate_path<R: Rng + ?Sized>(&self, horizon: f64, h: f64, rng: &mut R) -> Result<SamplePath> {
        let grid = uniform_grid(horizon, h)?;
        let step = grid[1] - grid[0];
        let values = match *self {
            Self::Drift { b } => grid.iter().map(|&t| b * t).collect(),
            _ => {
                let mut values = Vec::with_capacity(grid.len());
                let mut level = 0.0;
                values.push(level);
                for _ in 1..grid.len() {
                    level += self.sample_increment(step, rng)?;
                    values.push(level);
                }
                values
            }
        };
        Ok(SamplePath { grid, values })
    }

    /// Right-continuous inverse `E(t) = inf{r : D(r) > t}` on a uniform
    /// `t`-grid over `[0, horizon_t]`.
    ///
    /// `D` is simulated on an `r`-grid of step `h` and `E(t_j)` is the first
    /// grid point where `D` exceeds `t_j`, so `E_grid − h < E ≤ E_grid`.
    /// `E(0) = 0`.
    pub fn inverse_path<R: Rng + ?Sized>(
        &self,
        horizon_t: f64,
        h: f64,
        max_steps: usize,
        rng: &mut R,
    ) -> Result<SamplePath> {
        let grid = uniform_grid(horizon_t, h)?;
        let mut walker = ForwardWalker::new(*self, h, max_steps);
        let mut values = Vec::with_capacity(grid.len());
        values.push(0.0);
        for &t in &grid[1..] {
            values.push(walker.first_exceedance(t, rng)?);
        }
        Ok(SamplePath { grid, values })
    }

    /// `E(t)` at a single level, with the same grid convention as
    /// [`inverse_path`](Self::inverse_path).
    pub fn inverse_at<R: Rng + ?Sized>(&self, t: f64, h: f64, max_steps: usize, rng: &mut R) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        ForwardWalker::new(*self, h, max_steps).first_exceedance(t, rng)
    }

    /// `E(t)` at several ascending levels from one forward path.
    pub fn inverse_at_levels<R: Rng + ?Sized>(
        &self,
        levels: &[f64],
        h: f64,
        max_steps: usize,
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let mut walker = ForwardWalker::new(*self, h, max_steps);
        levels
            .iter()
            .map(|&t| if t <= 0.0 { Ok(0.0) } else { walker.first_exceedance(t, rng) })
            .collect()
    }
}

/// Steps a subordinator forward on an `r`-grid, remembering where it is.
struct ForwardWalker {
    spec: SubordinatorSpec,
    h: f64,
    max_steps: usize,
    steps: usize,
    level: f64,
}

impl ForwardWalker {
    fn new(spec: SubordinatorSpec, h: f64, max_steps: usize) -> Self {
        Self { spec, h, max_steps, steps: 0, level: 0.0 }
    }

    fn first_exceedance<R: Rng + ?Sized>(&mut self, t: f64, rng: &mut R) -> Result<f64> {
        while self.level <= t {
            if self.steps >= self.max_steps {
                return Err(Error::BudgetExhausted(format!(
                    "{} subordinator stayed at {:.6e} ≤ {t} after {} steps of {}",
                    self.spec.name(),
                    self.level,
                    self.steps,
                    self.h
                )));
            }
            self.steps += 1;
            self.level = match self.spec {
                SubordinatorSpec::Drift { b } => b * self.steps as f64 * self.h,
                _ => self.level + self.spec.sample_increment(self.h, rng)?,
            };
        }
        Ok(self.steps as f64 * self.h)
    }
}

fn uniform_grid(horizon: f64, h: f64) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && h > 0.0) {
        return domain(format!("horizon and step must be positive (got {horizon}, {h})"));
    }
    let n = ((horizon / h) - 1e-9).ceil().max(1.0) as usize;
    let step = horizon / n as f64;
    let mut grid: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();
    grid[n] = horizon;
    Ok(grid)
}

/// Inverse Gaussian draw with mean `m` and shape `l` by the transformation
/// with multiple roots; the smaller root is formed without cancellation.
fn inverse_gaussian<R: Rng + ?Sized>(m: f64, l: f64, rng: &mut R) -> f64 {
    let nu: f64 = StandardNormal.sample(rng);
    let y = nu * nu;
    let my = m * y;
    let root = (my * my + 4.0 * m * l * y).sqrt();
    let denom = root + my;
    let x = if denom > 0.0 { 4.0 * m * m * l * y / (denom * denom) } else { m };
    let u: f64 = rng.random();
    if u * (m + x) <= m {
        x
    } else {
        m * m / x
    }
}

/// Positive α-stable draw with `E[e^{-sS}] = e^{-dt s^α}` (Kanter's representation).
fn positive_stable<R: Rng + ?Sized>(alpha: f64, dt: f64, rng: &mut R) -> f64 {
    let u = PI * (1.0 - rng.random::<f64>());
    let e = exponential(1.0, rng);
    let a = (alpha * u).sin();
    let zolotarev = (a / u.sin()).powf(1.0 / (1.0 - alpha)) * ((1.0 - alpha) * u).sin() / a;
    dt.powf(1.0 / alpha) * (zolotarev / e).powf((1.0 - alpha) / alpha)
}

/// Tempered-stable increment by exponential tilting: propose a stable draw
/// and accept it with probability `e^{-μS}`.
fn tempered_stable<R: Rng + ?Sized>(alpha: f64, mu: f64, dt: f64, rng: &mut R) -> Result<f64> {
    for _ in 0..MAX_REJECTIONS {
        let s = positive_stable(alpha, dt, rng);
        if mu == 0.0 || rng.random::<f64>() <= (-mu * s).exp() {
            return Ok(s);
        }
    }
    Err(Error::BudgetExhausted(format!(
        "tempered-stable rejection sampler exceeded {MAX_REJECTIONS} proposals (alpha={alpha}, mu={mu}, dt={dt})"
    )))
}

/// `E[G(t)^q]` for the inverse Gaussian subordinator and integer `q ≥ 0`,
/// through the half-integer Bessel function `K_{q−1/2}`.
pub fn ig_moment(q: u32, t: f64, delta: f64, gamma: f64) -> f64 {
    let z = delta * gamma * t;
    // K_{-1/2} = K_{1/2}
    let order = if q == 0 { 0 } else { q - 1 };
    let qf = q as f64;
    (2.0 / PI).sqrt() * delta * (delta * t / gamma).powf(qf - 0.5) * t * bessel_k_half_scaled(order, z)
}

/// A non-decreasing path sampled on a uniform grid starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePath {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn step(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("non-empty path")
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}
