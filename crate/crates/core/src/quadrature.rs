//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol·|I|)`. Semi-infinite ranges are
//! mapped onto `[0, 1)` with `x = a + scale·s/(1 − s)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0, max_intervals: 4000 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-12, max_intervals: 4000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Piece {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    integrate_pieces(&f, &[a, b], tol)
}

/// Integrate over `[points[0], points[last]]`, starting with the given
/// breakpoints as separate intervals.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, points: &[f64], tol: Tolerance) -> Result<Integral> {
    if points.len() < 2 {
        return Ok(Integral { value: 0.0, error: 0.0, intervals: 0 });
    }
    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for w in points.windows(2) {
        if w[1] > w[0] {
            let p = kronrod(f, w[0], w[1]);
            value += p.value;
            error += p.error;
            heap.push(p);
        }
    }
    loop {
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            // Re-sum to shed the drift of the running totals.
            let (value, error) = heap
                .iter()
                .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
            return Ok(Integral { value, error, intervals: heap.len() });
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::NonConvergence {
                routine: "adaptive quadrature",
                detail: format!(
                    "error estimate {error:.3e} above target {target:.3e} after {} intervals on [{}, {}]",
                    heap.len(),
                    points[0],
                    points[points.len() - 1]
                ),
            });
        }
        let worst = heap.pop().expect("heap is non-empty");
        value -= worst.value;
        error -= worst.error;
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval exhausted at machine resolution; keep what we have.
            value += worst.value;
            heap.push(Piece { error: 0.0, ..worst });
            continue;
        }
        for p in [kronrod(f, worst.a, mid), kronrod(f, mid, worst.b)] {
            value += p.value;
            error += p.error;
            heap.push(p);
        }
        error = error.max(0.0);
    }
}

/// Integrate `f` over `[a, ∞)`. `scale` sets where the mapped variable puts
/// its midpoint and should be of the order of the integrand's spread.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: Tolerance) -> Result<Integral> {
    let mapped = |s: f64| {
        let one_minus = 1.0 - s;
        let x = a + scale * s / one_minus;
        let jac = scale / (one_minus * one_minus);
        let v = f(x) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate_pieces(&mapped, &[0.0, 0.5, 1.0], tol)
}

/// Integrate over `[breaks[0], ∞)`: the finite pieces between breakpoints, then
/// a mapped tail beyond the last breakpoint.
pub fn integrate_with_tail<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tail_scale: f64, tol: Tolerance) -> Result<Integral> {
    let finite = integrate_pieces(&f, breaks, tol)?;
    let last = *breaks.last().expect("at least one breakpoint");
    let tail = integrate_to_infinity(&f, last, tail_scale, tol)?;
    Ok(Integral {
        value: finite.value + tail.value,
        error: finite.error + tail.error,
        intervals: finite.intervals + tail.intervals,
    })
}
