//! Order-k index sets and the Poisson distribution of order k.
//!
//! `Ω(k, n)` is the set of non-negative integer vectors `x = (x_1, …, x_k)`
//! with `x_1 + 2x_2 + … + k·x_k = n`. Each vector carries `ζ = Σ x_i` and
//! `Π! = Π x_i!`, and the order-k pmf at time `t` is
//! `Σ_{x ∈ Ω(k,n)} e^{-kλt} (λt)^ζ / Π!`.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::special::{ln_factorial, CompensatedSum};

/// Order `k` and rate `λ` of a Poisson process of order k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoKParams {
    k: u32,
    lambda: f64,
}

impl PoKParams {
    pub fn new(k: u32, lambda: f64) -> Result<Self> {
        if k == 0 {
            return domain("order k must be at least 1");
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("rate lambda must be positive and finite, got {lambda}"));
        }
        Ok(Self { k, lambda })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Rate of the underlying Poisson event stream, `kλ`.
    pub fn event_rate(&self) -> f64 {
        self.k as f64 * self.lambda
    }

    /// `E[N(t)]/t = k(k+1)λ/2`.
    pub fn mean_rate(&self) -> f64 {
        let k = self.k as f64;
        k * (k + 1.0) / 2.0 * self.lambda
    }

    /// `Var[N(t)]/t = k(k+1)(2k+1)λ/6`.
    pub fn variance_rate(&self) -> f64 {
        let k = self.k as f64;
        k * (k + 1.0) * (2.0 * k + 1.0) / 6.0 * self.lambda
    }
}

/// One element of `Ω(k, n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionVector {
    pub x: Vec<u32>,
    pub n: u32,
    /// `ζ = Σ x_i`
    pub zeta: u32,
    /// `ln Π x_i!`
    pub ln_pi_factorial: f64,
}

impl PartitionVector {
    fn from_counts(x: Vec<u32>) -> Self {
        let n = x.iter().enumerate().map(|(i, &c)| (i as u32 + 1) * c).sum();
        let zeta = x.iter().sum();
        let ln_pi_factorial = x.iter().map(|&c| ln_factorial(c as u64)).sum();
        Self { x, n, zeta, ln_pi_factorial }
    }

    /// `Π x_i!` as an exact integer, or `None` on overflow.
    pub fn pi_factorial(&self) -> Option<u128> {
        self.x.iter().try_fold(1u128, |acc, &c| {
            (2..=c as u128).try_fold(acc, |a, m| a.checked_mul(m))
        })
    }
}

/// All of `Ω(k, n)`, in descending lexicographic order on `x` (so `x_1 = n`
/// comes first). For `n = 0` the single all-zero vector is returned.
pub fn enumerate_partitions(k: u32, n: u32) -> Result<Vec<PartitionVector>> {
    if k == 0 {
        return domain("order k must be at least 1");
    }
    let mut out = Vec::new();
    let mut x = vec![0u32; k as usize];
    descend(0, n, &mut x, &mut out);
    Ok(out)
}

fn descend(index: usize, remaining: u32, x: &mut Vec<u32>, out: &mut Vec<PartitionVector>) {
    let weight = index as u32 + 1;
    if index + 1 == x.len() {
        if remaining.is_multiple_of(weight) {
            x[index] = remaining / weight;
            out.push(PartitionVector::from_counts(x.clone()));
            x[index] = 0;
        }
        return;
    }
    for count in (0..=remaining / weight).rev() {
        x[index] = count;
        descend(index + 1, remaining - count * weight, x, out);
    }
    x[index] = 0;
}

/// Table of `|Ω(k, n)|` for `n = 0..=n_max`.
pub fn partition_counts(k: u32, n_max: u32) -> Vec<u128> {
    let mut ways = vec![0u128; n_max as usize + 1];
    ways[0] = 1;
    for part in 1..=k as usize {
        for m in part..=n_max as usize {
            ways[m] += ways[m - part];
        }
    }
    ways
}

/// `P[N^{(k)}(t) = n]` by direct summation over `Ω(k, n)`, each term formed in
/// log space and accumulated with compensated summation. For `t ≤ 0` this is
/// the point mass at zero.
pub fn pok_pmf(params: &PoKParams, t: f64, n: u32) -> f64 {
    if t <= 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let lt = params.lambda * t;
    let ln_lt = lt.ln();
    let base = -params.event_rate() * t;
    let parts = enumerate_partitions(params.k, n).expect("k validated by PoKParams");
    parts
        .iter()
        .map(|p| (base + p.zeta as f64 * ln_lt - p.ln_pi_factorial).exp())
        .collect::<CompensatedSum>()
        .value()
}

/// Probability generating function `exp(-λt(k - Σ_{i=1}^k s^i))`.
pub fn pok_pgf(params: &PoKParams, t: f64, s: f64) -> f64 {
    let powers: f64 = (1..=params.k).map(|i| s.powi(i as i32)).sum();
    (-params.lambda * t * (params.k as f64 - powers)).exp()
}

/// The same pgf through the compound-Poisson form `exp(-kλt(1 - G_X(s)))`,
/// where `G_X(s) = s(1 - s^k)/(k(1 - s))` is the pgf of a uniform jump on `{1..k}`.
pub fn pok_pgf_compound(params: &PoKParams, t: f64, s: f64) -> f64 {
    let k = params.k as f64;
    let jump_pgf = if (1.0 - s).abs() < f64::EPSILON {
        1.0
    } else {
        s * (1.0 - s.powi(params.k as i32)) / (k * (1.0 - s))
    };
    (-params.event_rate() * t * (1.0 - jump_pgf)).exp()
}

/// Smallest `N*` for which `P[N^{(k)}(t) > N*] < eps`, via the bound
/// `P[N^{(k)}(t) > k·j] ≤ P[Poisson(kλt) > j]` (each event adds at most `k`).
pub fn truncation_point(params: &PoKParams, t: f64, eps: f64) -> u32 {
    poisson_quantile_tail(params.event_rate() * t, eps) * params.k
}

/// Smallest `j` with `P[Poisson(mean) > j] < eps`.
pub(crate) fn poisson_quantile_tail(mean: f64, eps: f64) -> u32 {
    if mean <= 0.0 {
        return 0;
    }
    let ln_mean = mean.ln();
    let mut cdf = CompensatedSum::new();
    let mut j: u32 = 0;
    loop {
        cdf.add((-mean + j as f64 * ln_mean - ln_factorial(j as u64)).exp());
        if 1.0 - cdf.value() < eps || j > 1_000_000 {
            return j;
        }
        j += 1;
    }
}

/// Grouped weights `w(n, ζ) = Σ_{x ∈ Ω(k,n), Σx = ζ} 1/Π!`, stored as logs.
///
/// They satisfy `w(n, ζ) = (1/ζ) Σ_{j=1}^{k} w(n-j, ζ-1)` with `w(0, 0) = 1`,
/// which avoids enumerating `Ω(k, n)` when many `n` or many time points are
/// needed. `pok_pmf` stays on the direct partition sum.
#[derive(Debug, Clone)]
pub struct ZetaWeights {
    k: u32,
    /// `rows[n]` holds `(ζ, ln w(n, ζ))` for every ζ that occurs in `Ω(k, n)`.
    rows: Vec<Vec<(u32, f64)>>,
}

impl ZetaWeights {
    pub fn new(k: u32, n_max: u32) -> Result<Self> {
        if k == 0 {
            return domain("order k must be at least 1");
        }
        let n_max = n_max as usize;
        // dense[n][ζ] as log weights; NEG_INFINITY marks an empty cell.
        let mut dense: Vec<Vec<f64>> = Vec::with_capacity(n_max + 1);
        dense.push(vec![0.0]);
        for n in 1..=n_max {
            let mut row = vec![f64::NEG_INFINITY; n + 1];
            for (zeta, cell) in row.iter_mut().enumerate().skip(1) {
                let mut m = f64::NEG_INFINITY;
                let mut terms = Vec::with_capacity(k as usize);
                for j in 1..=(k as usize).min(n) {
                    if let Some(&w) = dense[n - j].get(zeta - 1) {
                        if w > f64::NEG_INFINITY {
                            m = m.max(w);
                            terms.push(w);
                        }
                    }
                }
                if !terms.is_empty() {
                    let s: f64 = terms.iter().map(|w| (w - m).exp()).sum();
                    *cell = m + s.ln() - (zeta as f64).ln();
                }
            }
            dense.push(row);
        }
        let rows = dense
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .enumerate()
                    .filter(|(_, w)| *w > f64::NEG_INFINITY)
                    .map(|(z, w)| (z as u32, w))
                    .collect()
            })
            .collect();
        Ok(Self { k, rows })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n_max(&self) -> u32 {
        self.rows.len() as u32 - 1
    }

    /// `(ζ, ln w(n, ζ))` pairs for count `n`.
    pub fn row(&self, n: u32) -> &[(u32, f64)] {
        &self.rows[n as usize]
    }

    /// `P[N^{(k)}(t) = n]` for `n ≤ n_max`, with rate `lambda`.
    pub fn pmf(&self, lambda: f64, t: f64, n: u32) -> f64 {
        if t <= 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        let ln_lt = (lambda * t).ln();
        let base = -(self.k as f64) * lambda * t;
        self.row(n)
            .iter()
            .map(|&(z, lw)| (base + z as f64 * ln_lt + lw).exp())
            .sum()
    }

    /// The whole pmf `n = 0..=n_max` at one time point.
    pub fn pmf_table(&self, lambda: f64, t: f64) -> Vec<f64> {
        (0..=self.n_max()).map(|n| self.pmf(lambda, t, n)).collect()
    }
}
