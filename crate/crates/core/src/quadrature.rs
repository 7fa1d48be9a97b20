//! Globally adaptive Gauss–Kronrod (7, 15) quadrature for complex-valued
//! integrands on a finite real interval.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const ROUNDING: f64 = 50.0 * f64::EPSILON;
const STALL_LIMIT: usize = 10;
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of intervals held at once.
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    /// `∫|f|` over the panel by the Kronrod rule.
    mass: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod(f: &mut impl FnMut(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = fc * WGK[7];
    let mut ga = fc * WG[3];
    let mut mass = fc.norm() * WGK[7];
    for (n, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let (f1, f2) = (f(c - h * x), f(c + h * x));
        kr += (f1 + f2) * w;
        mass += (f1.norm() + f2.norm()) * w;
        if n % 2 == 1 {
            ga += (f1 + f2) * WG[n / 2];
        }
    }
    let value = kr * h;
    let error = ((kr - ga) * h).norm();
    (value, error, mass * h.abs())
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the panels
/// given by `breaks` and bisecting the panel with the largest error estimate
/// until the total estimate is below `max(abs_tol, rel_tol·|I|)`, or below
/// the rounding floor `50 ε ∫|f|`. When cancellation inside `f` stalls the
/// bisection (ten refinements that agree with their parent but do not shrink
/// its error), the achieved estimate is returned as it stands.
pub fn integrate(mut f: impl FnMut(f64) -> Complex64, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult> {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut mass = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error, m) = kronrod(&mut f, w[0], w[1]);
        evaluations += 15;
        total += value;
        err += error;
        mass += m;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
            mass: m,
        });
    }
    let mut stalled = 0;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.norm()).max(ROUNDING * mass);
        if err <= tol || stalled >= STALL_LIMIT {
            break;
        }
        if !err.is_finite() || heap.len() >= cfg.max_intervals {
            return Err(Error::NonConvergence { error: err, evaluations });
        }
        let Some(worst) = heap.pop() else { break };
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            return Err(Error::NonConvergence { error: err, evaluations });
        }
        let (v1, e1, m1) = kronrod(&mut f, worst.a, m);
        let (v2, e2, m2) = kronrod(&mut f, m, worst.b);
        evaluations += 30;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        mass += m1 + m2 - worst.mass;
        let refined = v1 + v2;
        if e1 + e2 >= 0.99 * worst.error && (refined - worst.value).norm() <= 1e-5 * refined.norm() {
            stalled += 1;
        }
        heap.push(Segment { a: worst.a, b: m, value: v1, error: e1, mass: m1 });
        heap.push(Segment { a: m, b: worst.b, value: v2, error: e2, mass: m2 });
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_error = 0.0;
    let mut mass = 0.0;
    let intervals = heap.len();
    let segs: Vec<Segment> = heap.into_vec();
    for s in &segs {
        value += s.value;
        abs_error += s.error;
        mass += s.mass;
    }
    let abs_error = abs_error.max(ROUNDING * mass);
    Ok(QuadResult {
        value,
        abs_error,
        evaluations,
        intervals,
    })
}
