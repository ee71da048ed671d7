//! Estimators and goodness-of-fit tests used by the Monte Carlo checks.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::special::CompensatedSum;

/// A Monte Carlo estimate with its standard error `sd/√n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_reps: usize,
}

impl McEstimate {
    /// Sample mean and its standard error. Summation runs in slice order.
    pub fn from_samples(samples: &[f64]) -> Self {
        let m = Moments::from_samples(samples);
        Self {
            value: m.mean,
            stderr: (m.variance / m.n as f64).sqrt(),
            n_reps: m.n,
        }
    }

    /// `|value − target| ≤ z·stderr + slack`
    pub fn within(&self, target: f64, z: f64, slack: f64) -> bool {
        (self.value - target).abs() <= z * self.stderr + slack
    }

    /// Standardised deviation from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.stderr > 0.0 {
            (self.value - target) / self.stderr
        } else if self.value == target {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Sample moments about the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Fourth central moment (biased).
    pub m4: f64,
}

impl Moments {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n >= 2, "need at least two samples");
        let mean = samples.iter().copied().collect::<CompensatedSum>().value() / n as f64;
        let mut s2 = CompensatedSum::new();
        let mut s4 = CompensatedSum::new();
        for &x in samples {
            let d = x - mean;
            let d2 = d * d;
            s2.add(d2);
            s4.add(d2 * d2);
        }
        Self {
            n,
            mean,
            variance: s2.value() / (n - 1) as f64,
            m4: s4.value() / n as f64,
        }
    }

    /// The sample variance as an estimate, with the large-sample standard
    /// error `√((m4 − σ⁴)/n)`.
    pub fn variance_estimate(&self) -> McEstimate {
        let s4 = self.variance * self.variance;
        McEstimate {
            value: self.variance,
            stderr: ((self.m4 - s4).max(0.0) / self.n as f64).sqrt(),
            n_reps: self.n,
        }
    }
}

/// Pearson correlation with a batch-means standard error (`batches` equal
/// consecutive blocks).
pub fn correlation(xs: &[f64], ys: &[f64], batches: usize) -> McEstimate {
    assert_eq!(xs.len(), ys.len());
    let r = pearson(xs, ys);
    let size = xs.len() / batches.max(1);
    let stderr = if batches >= 2 && size >= 3 {
        let rs: Vec<f64> = (0..batches)
            .map(|b| pearson(&xs[b * size..(b + 1) * size], &ys[b * size..(b + 1) * size]))
            .collect();
        let m = Moments::from_samples(&rs);
        (m.variance / batches as f64).sqrt()
    } else {
        f64::NAN
    };
    McEstimate { value: r, stderr, n_reps: xs.len() }
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy.add((x - mx) * (y - my));
        sxx.add((x - mx) * (x - mx));
        syy.add((y - my) * (y - my));
    }
    sxy.value() / (sxx.value() * syy.value()).sqrt()
}

/// Ordinary least-squares fit `y ≈ intercept + slope·x`; returns `(slope, intercept)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Pearson goodness of fit of integer `samples` against the pmf `probs` on
/// `0..probs.len()`. Mass outside the table goes to a final overflow bin.
/// Adjacent bins are pooled left to right until each expected count is at
/// least `min_expected`.
pub fn chi_square_gof(samples: &[u64], probs: &[f64], min_expected: f64) -> ChiSquareTest {
    let n = samples.len() as f64;
    let mut observed = vec![0.0; probs.len() + 1];
    for &s in samples {
        let idx = (s as usize).min(probs.len());
        observed[idx] += 1.0;
    }
    let mut expected: Vec<f64> = probs.iter().map(|p| p * n).collect();
    let covered: f64 = probs.iter().sum();
    expected.push(((1.0 - covered) * n).max(0.0));

    let mut pooled = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (o, e) in observed.iter().zip(&expected) {
        o_acc += o;
        e_acc += e;
        if e_acc >= min_expected {
            pooled.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => pooled.push((o_acc, e_acc)),
        }
    }
    let statistic: f64 = pooled.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = pooled.len().saturating_sub(1).max(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_sf(statistic, dof) }
}

/// Two-sample chi-square homogeneity test on integer samples. Values are
/// binned individually, pooling the tail until both expected counts are at
/// least `min_expected`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64], min_expected: f64) -> ChiSquareTest {
    let max = a.iter().chain(b).copied().max().unwrap_or(0) as usize;
    let mut ca = vec![0.0; max + 1];
    let mut cb = vec![0.0; max + 1];
    for &x in a {
        ca[x as usize] += 1.0;
    }
    for &x in b {
        cb[x as usize] += 1.0;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut bins = Vec::new();
    let (mut oa, mut ob) = (0.0, 0.0);
    for (x, y) in ca.iter().zip(&cb) {
        oa += x;
        ob += y;
        let pooled = oa + ob;
        if pooled * na / total >= min_expected && pooled * nb / total >= min_expected {
            bins.push((oa, ob));
            oa = 0.0;
            ob = 0.0;
        }
    }
    if oa + ob > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += oa;
                last.1 += ob;
            }
            None => bins.push((oa, ob)),
        }
    }
    let mut statistic = 0.0;
    for &(x, y) in &bins {
        let pooled = x + y;
        let ea = pooled * na / total;
        let eb = pooled * nb / total;
        statistic += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
    }
    let dof = bins.len().saturating_sub(1).max(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_sf(statistic, dof) }
}
