//! Sample paths and exact second-order structure of the Poisson process of order k.

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::combinatorics::PoKParams;
use crate::error::{domain, Result};
use crate::rng::{replicate, RngStream};
use crate::stats::McEstimate;

/// A right-continuous step path on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountPath {
    jump_times: Vec<f64>,
    jump_sizes: Vec<u32>,
    cumulative: Vec<u64>,
    horizon: f64,
}

impl CountPath {
    fn new(horizon: f64) -> Self {
        Self { jump_times: Vec::new(), jump_sizes: Vec::new(), cumulative: Vec::new(), horizon }
    }

    fn push(&mut self, t: f64, size: u32) {
        let total = self.terminal() + size as u64;
        self.jump_times.push(t);
        self.jump_sizes.push(size);
        self.cumulative.push(total);
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn jump_sizes(&self) -> &[u32] {
        &self.jump_sizes
    }

    pub fn cumulative(&self) -> &[u64] {
        &self.cumulative
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of jumps (not the count value).
    pub fn n_jumps(&self) -> usize {
        self.jump_times.len()
    }

    pub fn terminal(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    /// Path value at time `t` (right-continuous).
    pub fn value_at(&self, t: f64) -> u64 {
        let idx = self.jump_times.partition_point(|&s| s <= t);
        if idx == 0 {
            0
        } else {
            self.cumulative[idx - 1]
        }
    }
}

/// Exponential(rate) variate by inversion.
pub(crate) fn exponential<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> f64 {
    // 1 - U lies in (0, 1], so the log is finite.
    -(1.0 - rng.random::<f64>()).ln() / rate
}

/// Uniform jump size on `{1, …, k}` from a single uniform.
pub(crate) fn uniform_jump<R: Rng + ?Sized>(k: u32, rng: &mut R) -> u32 {
    let u: f64 = rng.random();
    ((k as f64 * u) as u32 + 1).min(k)
}

/// Simulate one path on `[0, horizon]`: interarrival times are
/// Exponential(kλ) and each jump is uniform on `{1, …, k}`.
pub fn simulate_ppok<R: Rng + ?Sized>(params: &PoKParams, horizon: f64, rng: &mut R) -> Result<CountPath> {
    if !(horizon > 0.0) {
        return domain(format!("horizon must be positive, got {horizon}"));
    }
    let rate = params.event_rate();
    let mut path = CountPath::new(horizon);
    let mut t = 0.0;
    loop {
        t += exponential(rate, rng);
        if t > horizon {
            break;
        }
        let size = uniform_jump(params.k(), rng);
        path.push(t, size);
    }
    Ok(path)
}

/// Simulate through the superposition `N_1 + 2N_2 + … + kN_k` of `k`
/// independent rate-λ Poisson processes. Same law as [`simulate_ppok`].
pub fn simulate_ppok_superposed<R: Rng + ?Sized>(params: &PoKParams, horizon: f64, rng: &mut R) -> Result<CountPath> {
    if !(horizon > 0.0) {
        return domain(format!("horizon must be positive, got {horizon}"));
    }
    let mut events: Vec<(f64, u32)> = Vec::new();
    for size in 1..=params.k() {
        let mut t = 0.0;
        loop {
            t += exponential(params.lambda(), rng);
            if t > horizon {
                break;
            }
            events.push((t, size));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut path = CountPath::new(horizon);
    for (t, size) in events {
        path.push(t, size);
    }
    Ok(path)
}

/// Draw `N^{(k)}(duration)` directly: a Poisson(kλ·duration) number of uniform jumps.
pub fn sample_count<R: Rng + ?Sized>(params: &PoKParams, duration: f64, rng: &mut R) -> u64 {
    let mean = params.event_rate() * duration;
    if !(mean > 0.0) {
        return 0;
    }
    let events = Poisson::new(mean).expect("positive finite mean").sample(rng) as u64;
    (0..events).map(|_| uniform_jump(params.k(), rng) as u64).sum()
}

pub fn ppok_mean(params: &PoKParams, t: f64) -> f64 {
    params.mean_rate() * t
}

pub fn ppok_var(params: &PoKParams, t: f64) -> f64 {
    params.variance_rate() * t
}

/// Covariance `k(k+1)(2k+1)λ·min(s,t)/6`; symmetric in its arguments.
pub fn ppok_cov(params: &PoKParams, s: f64, t: f64) -> f64 {
    params.variance_rate() * s.min(t)
}

/// `Corr[N(s), N(t)] = √(min/max)`, free of `k` and `λ`.
pub fn ppok_corr(s: f64, t: f64) -> f64 {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    (lo / hi).sqrt()
}

/// Variance-to-mean ratio `(2k+1)/3`.
pub fn ppok_dispersion_index(params: &PoKParams) -> f64 {
    (2.0 * params.k() as f64 + 1.0) / 3.0
}

#[derive(Debug, Clone, Serialize)]
pub struct LlnRow {
    pub horizon: f64,
    /// Estimated `P[|N(t)/t − k(k+1)λ/2| > ε]`.
    pub exceedance: McEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct LlnReport {
    pub limit: f64,
    pub epsilon: f64,
    pub rows: Vec<LlnRow>,
    /// Exceedance never rises by more than 3 joint standard errors between
    /// consecutive horizons.
    pub non_increasing: bool,
}

/// Monte Carlo view of `N(t)/t → k(k+1)λ/2`: exceedance probabilities of the
/// band `±epsilon` at each horizon (in ascending order).
pub fn ppok_lln_check(
    params: &PoKParams,
    horizons: &[f64],
    epsilon: f64,
    n_paths: usize,
    stream: RngStream,
) -> Result<LlnReport> {
    if horizons.is_empty() || horizons.iter().any(|&h| !(h > 0.0)) {
        return domain("horizons must be non-empty and positive");
    }
    let limit = params.mean_rate();
    let rows: Vec<LlnRow> = horizons
        .iter()
        .enumerate()
        .map(|(i, &horizon)| {
            let hits = replicate(stream.substream(i as u64), n_paths, |_, rng| {
                let n = sample_count(params, horizon, rng) as f64;
                if (n / horizon - limit).abs() > epsilon {
                    1.0
                } else {
                    0.0
                }
            });
            LlnRow { horizon, exceedance: McEstimate::from_samples(&hits) }
        })
        .collect();
    let non_increasing = rows.windows(2).all(|w| {
        let (a, b) = (&w[0].exceedance, &w[1].exceedance);
        b.value <= a.value + 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt()
    });
    Ok(LlnReport { limit, epsilon, rows, non_increasing })
}
