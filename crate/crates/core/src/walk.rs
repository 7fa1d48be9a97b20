//! Jump kernels of nearest-neighbour walks in the quarter plane and the
//! two-parameter family of kernels for which `i j (i + α j + β)` is harmonic.

use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num};
use rand::Rng;

use crate::{Error, Result};

/// The eight nearest-neighbour steps, in the order used for iteration and
/// serialization.
pub const STEPS: [(i8, i8); 8] = [
    (1, 1),
    (1, 0),
    (1, -1),
    (0, 1),
    (0, -1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Tolerance on the total mass and on both drifts.
pub const KERNEL_TOL: f64 = 1e-14;

/// Tolerance used by the floating-point evaluation of the family formulas.
pub const FAMILY_TOL: f64 = 1e-12;

/// Law of one step of the walk: `p(di, dj)` for the eight neighbours.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct JumpKernel {
    p: [[f64; 3]; 3],
}

impl JumpKernel {
    /// Builds a kernel from a probability function on the eight steps.
    pub fn from_fn(mut f: impl FnMut(i8, i8) -> f64) -> Self {
        let mut k = Self::default();
        for (di, dj) in STEPS {
            k.p[(di + 1) as usize][(dj + 1) as usize] = f(di, dj);
        }
        k
    }

    /// Builds a kernel from explicit `((di, dj), p)` entries; missing steps are 0.
    pub fn from_entries(entries: &[((i8, i8), f64)]) -> Self {
        let mut k = Self::default();
        for &((di, dj), v) in entries {
            k.set(di, dj, v);
        }
        k
    }

    /// Walk on the Weyl chamber of SU(3): steps (1,0), (-1,1), (0,-1) with mass 1/3.
    pub fn su3() -> Self {
        let t = 1.0 / 3.0;
        Self::from_entries(&[((1, 0), t), ((-1, 1), t), ((0, -1), t)])
    }

    /// Simple walk with mass 1/8 on every neighbour.
    pub fn uniform() -> Self {
        Self::from_fn(|_, _| 0.125)
    }

    /// Cartesian product of the SU(3) walk and its dual: `μ` on (0,-1), (-1,1), (1,0)
    /// and `ν = 1/3 − μ` on (-1,0), (0,1), (1,-1).
    pub fn su3_product(mu: f64) -> Self {
        let nu = 1.0 / 3.0 - mu;
        Self::from_entries(&[
            ((0, -1), mu),
            ((-1, 1), mu),
            ((1, 0), mu),
            ((-1, 0), nu),
            ((0, 1), nu),
            ((1, -1), nu),
        ])
    }

    #[inline]
    pub fn p(&self, di: i8, dj: i8) -> f64 {
        if di == 0 && dj == 0 {
            return 0.0;
        }
        self.p[(di + 1) as usize][(dj + 1) as usize]
    }

    pub fn set(&mut self, di: i8, dj: i8, value: f64) {
        assert!(
            (-1..=1).contains(&di) && (-1..=1).contains(&dj) && (di, dj) != (0, 0),
            "step ({di}, {dj}) is not a nearest-neighbour step"
        );
        self.p[(di + 1) as usize][(dj + 1) as usize] = value;
    }

    /// Iterates over `(di, dj, p)` for the eight steps.
    pub fn steps(&self) -> impl Iterator<Item = (i8, i8, f64)> + '_ {
        STEPS.iter().map(move |&(di, dj)| (di, dj, self.p(di, dj)))
    }

    /// The kernel with the roles of the two coordinates exchanged.
    pub fn swapped(&self) -> Self {
        Self::from_fn(|di, dj| self.p(dj, di))
    }

    pub fn total_mass(&self) -> f64 {
        self.steps().map(|(_, _, p)| p).sum()
    }

    /// Mean horizontal and vertical increments.
    pub fn drift(&self) -> (f64, f64) {
        let dx = self.steps().map(|(di, _, p)| di as f64 * p).sum();
        let dy = self.steps().map(|(_, dj, p)| dj as f64 * p).sum();
        (dx, dy)
    }

    /// The eight probabilities in [`STEPS`] order.
    pub fn to_array(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        for (slot, (di, dj)) in out.iter_mut().zip(STEPS) {
            *slot = self.p(di, dj);
        }
        out
    }
}

impl fmt::Debug for JumpKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (di, dj, p) in self.steps() {
            m.entry(&(di, dj), &p);
        }
        m.finish()
    }
}

/// A violated kernel invariant with its magnitude.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite { di: i8, dj: i8 },
    Negative { di: i8, dj: i8, value: f64 },
    Mass { total: f64 },
    HorizontalDrift { drift: f64 },
    VerticalDrift { drift: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { di, dj } => write!(f, "p({di},{dj}) is not finite"),
            Violation::Negative { di, dj, value } => write!(f, "p({di},{dj}) = {value:e} < 0"),
            Violation::Mass { total } => write!(f, "total mass {total} != 1"),
            Violation::HorizontalDrift { drift } => write!(f, "horizontal drift {drift:e} != 0"),
            Violation::VerticalDrift { drift } => write!(f, "vertical drift {drift:e} != 0"),
        }
    }
}

/// Result of [`validate_kernel`]. Zero entries are warnings only.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub zero_entries: Vec<(i8, i8)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `k` is a zero-drift probability kernel.
pub fn validate_kernel(k: &JumpKernel) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (di, dj, p) in k.steps() {
        if !p.is_finite() {
            report.violations.push(Violation::NonFinite { di, dj });
        } else if p < 0.0 {
            report.violations.push(Violation::Negative { di, dj, value: p });
        } else if p == 0.0 {
            report.zero_entries.push((di, dj));
        }
    }
    if !report.is_valid() {
        return report;
    }
    let total = k.total_mass();
    if (total - 1.0).abs() > KERNEL_TOL {
        report.violations.push(Violation::Mass { total });
    }
    let (dx, dy) = k.drift();
    if dx.abs() > KERNEL_TOL {
        report.violations.push(Violation::HorizontalDrift { drift: dx });
    }
    if dy.abs() > KERNEL_TOL {
        report.violations.push(Violation::VerticalDrift { drift: dy });
    }
    report
}

/// A state `(i, j)` of the quarter plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub i: u32,
    pub j: u32,
}

impl LatticePoint {
    pub const fn new(i: u32, j: u32) -> Self {
        Self { i, j }
    }

    pub fn is_interior(&self) -> bool {
        self.i >= 1 && self.j >= 1
    }

    pub fn require_interior(&self) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::NotInterior {
                i: self.i as i64,
                j: self.j as i64,
            })
        }
    }
}

impl From<(u32, u32)> for LatticePoint {
    fn from((i, j): (u32, u32)) -> Self {
        Self { i, j }
    }
}

/// `(α, β, p₁₁, p₁₀)`: a point of the family of kernels with cubic harmonic
/// `i j (i + α j + β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicFamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub p11: f64,
    pub p10: f64,
}

impl CubicFamilyParams {
    pub const fn new(alpha: f64, beta: f64, p11: f64, p10: f64) -> Self {
        Self {
            alpha,
            beta,
            p11,
            p10,
        }
    }

    /// The parameters producing the SU(3) walk.
    pub const fn su3() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0 / 3.0)
    }

    fn infeasible(&self, reason: &'static str) -> Error {
        Error::InfeasibleParameters {
            alpha: self.alpha,
            beta: self.beta,
            p11: self.p11,
            p10: self.p10,
            reason,
        }
    }
}

/// The six dependent probabilities, in the order
/// `p(-1,0), p(-1,1), p(0,1), p(1,-1), p(0,-1), p(-1,-1)`.
fn dependent_probabilities<T>(alpha: T, beta: T, p11: T, p10: T) -> [T; 6]
where
    T: Num + Copy + FromPrimitive,
{
    let n = |v: i64| T::from_i64(v).unwrap();
    let (a, b) = (alpha, beta);
    let a2 = a * a;
    let a3 = a2 * a;
    let d = n(1) + n(2) * a + b;

    let p_m10 = n(0)
        - (a * (n(1) - n(2) * a - b) + n(8) * p11 + (n(4) - n(3) * a + n(2) * a2 + a * b) * p10)
            / (a * d);
    let p_m11 = (a * (n(1) - a - b)
        + n(2) * (n(4) + n(3) * a + n(2) * a2 + a * b) * p11
        + n(2) * (n(2) + a2 + a * b) * p10)
        / (n(2) * a * d);
    let p_01 = n(0)
        - (n(0) - (n(1) + a + b) + n(4) * (n(2) + n(2) * a + b) * p11 + n(2) * (n(2) + a + b) * p10)
            / (n(2) * d);
    let p_1m1 = (a2 + (n(-1) + n(2) * a - b) * p11 - (n(1) + b + n(2) * a2) * p10) / d;
    let p_0m1 = n(0)
        - ((n(-1) - n(3) * a - b + n(4) * a2)
            + n(4) * (n(-2) + n(2) * a - b) * p11
            + (n(-4) + n(6) * a - n(2) * b - n(8) * a2) * p10)
            / (n(2) * d);
    let p_m1m1 = (a * (n(1) - n(3) * a - b + n(2) * a2)
        + n(2) * (n(4) - n(3) * a + n(2) * a2 - a * b) * p11
        + n(2) * (n(2) - n(3) * a + n(3) * a2 - n(2) * a3) * p10)
        / (n(2) * a * d);
    [p_m10, p_m11, p_01, p_1m1, p_0m1, p_m1m1]
}

const DEPENDENT_STEPS: [(i8, i8); 6] = [(-1, 0), (-1, 1), (0, 1), (1, -1), (0, -1), (-1, -1)];

/// Largest denominator tried when recognizing an input as a small rational.
const MAX_DENOMINATOR: i128 = 1000;

/// Recognizes `x` as `p/q` with `q ≤ 1000` up to a few ulps.
fn small_rational(x: f64) -> Option<Ratio<i128>> {
    if !x.is_finite() || x.abs() > 1e3 {
        return None;
    }
    let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
    (1..=MAX_DENOMINATOR).find_map(|q| {
        let p = (x * q as f64).round();
        ((p / q as f64 - x).abs() <= tol).then(|| Ratio::new(p as i128, q))
    })
}

fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// The kernel of the cubic family at `c`.
///
/// Inputs that are small rationals are evaluated in exact arithmetic, so that
/// points on the boundary of the feasible polygon produce exact zeros.
pub fn kernel_from_cubic_family(c: &CubicFamilyParams) -> Result<JumpKernel> {
    let CubicFamilyParams {
        alpha,
        beta,
        p11,
        p10,
    } = *c;
    if ![alpha, beta, p11, p10].iter().all(|v| v.is_finite()) {
        return Err(c.infeasible("non-finite parameter"));
    }
    if alpha == 0.0 {
        return Err(Error::DegenerateParameters("alpha = 0"));
    }
    if (1.0 + 2.0 * alpha + beta).abs() < FAMILY_TOL {
        return Err(Error::DegenerateParameters("1 + 2 alpha + beta = 0"));
    }
    if !(0.5..=2.0).contains(&alpha) {
        return Err(c.infeasible("alpha outside [1/2, 2]"));
    }
    if p11 < 0.0 || p10 < 0.0 {
        return Err(c.infeasible("negative free probability"));
    }

    let exact = (|| {
        Some([
            small_rational(alpha)?,
            small_rational(beta)?,
            small_rational(p11)?,
            small_rational(p10)?,
        ])
    })();

    let dependent: [f64; 6] = match exact {
        Some([a, b, q11, q10]) => {
            let probs = dependent_probabilities(a, b, q11, q10);
            if probs.iter().any(|p| *p < Ratio::from_integer(0)) {
                return Err(c.infeasible("negative jump probability"));
            }
            probs.map(|p| ratio_to_f64(&p))
        }
        None => {
            let mut probs = dependent_probabilities(alpha, beta, p11, p10);
            if probs.iter().any(|p| *p < -FAMILY_TOL) {
                return Err(c.infeasible("negative jump probability"));
            }
            for p in probs.iter_mut() {
                *p = p.max(0.0);
            }
            probs
        }
    };

    let mut k = JumpKernel::default();
    k.set(1, 1, p11);
    k.set(1, 0, p10);
    for ((di, dj), p) in DEPENDENT_STEPS.into_iter().zip(dependent) {
        k.set(di, dj, p);
    }
    if (k.total_mass() - 1.0).abs() > FAMILY_TOL {
        return Err(c.infeasible("probabilities do not sum to 1"));
    }
    Ok(k)
}

/// `h(i, j) = i j (i + α j + β)`.
pub fn cubic_harmonic(alpha: f64, beta: f64, z: LatticePoint) -> f64 {
    let (i, j) = (z.i as f64, z.j as f64);
    i * j * (i + alpha * j + beta)
}

/// Inclusive rectangle of lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub i_min: u32,
    pub i_max: u32,
    pub j_min: u32,
    pub j_max: u32,
}

impl Rect {
    pub const fn square(lo: u32, hi: u32) -> Self {
        Self {
            i_min: lo,
            i_max: hi,
            j_min: lo,
            j_max: hi,
        }
    }

    /// Interior points of the rectangle.
    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        (self.i_min.max(1)..=self.i_max)
            .flat_map(move |i| (self.j_min.max(1)..=self.j_max).map(move |j| LatticePoint { i, j }))
    }
}

/// `h(z) − Σ p h(z + d)` at an interior point, with `h` extended by zero on the axes.
///
/// Every neighbour of an interior point lies in the closed quadrant, where the
/// polynomial already vanishes on the axes, so the defect is a cubic polynomial
/// in `(i, j)` whose coefficients are moments of the kernel (taken to have
/// total mass one). Evaluating it in that form keeps the rounding error at the
/// level of the moments.
pub fn harmonic_defect(k: &JumpKernel, alpha: f64, beta: f64, z: LatticePoint) -> f64 {
    let moment = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        k.steps().map(|(a, b, p)| p * f(a as f64, b as f64)).sum()
    };
    let m_a = moment(&|a, _| a);
    let m_b = moment(&|_, b| b);
    let m_aa = moment(&|a, _| a * a);
    let m_ab = moment(&|a, b| a * b);
    let m_bb = moment(&|_, b| b * b);
    let m_aab = moment(&|a, b| a * a * b);
    let m_abb = moment(&|a, b| a * b * b);
    let (i, j) = (z.i as f64, z.j as f64);

    let c_ii = m_b;
    let c_ij = 2.0 * m_a + 2.0 * alpha * m_b;
    let c_jj = alpha * m_a;
    let c_i = 2.0 * m_ab + alpha * m_bb + beta * m_b;
    let c_j = m_aa + 2.0 * alpha * m_ab + beta * m_a;
    let c_0 = m_aab + alpha * m_abb + beta * m_ab;
    -(c_ii * i * i + c_ij * i * j + c_jj * j * j + c_i * i + c_j * j + c_0)
}

/// Maximum absolute harmonicity defect of `h` over the interior points of `region`.
pub fn harmonicity_residual(k: &JumpKernel, alpha: f64, beta: f64, region: Rect) -> f64 {
    region
        .points()
        .map(|z| harmonic_defect(k, alpha, beta, z).abs())
        .fold(0.0, f64::max)
}

/// Recovers `(α, β)` from a zero-drift kernel whose cubic `i j (i + α j + β)`
/// is harmonic, or `None` when no such pair exists (within `tol` on the moment
/// conditions).
pub fn cubic_parameters(k: &JumpKernel, tol: f64) -> Option<(f64, f64)> {
    let moment = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        k.steps().map(|(a, b, p)| p * f(a as f64, b as f64)).sum()
    };
    let m_aa = moment(&|a, _| a * a);
    let m_ab = moment(&|a, b| a * b);
    let m_bb = moment(&|_, b| b * b);
    let m_aab = moment(&|a, b| a * a * b);
    let m_abb = moment(&|a, b| a * b * b);
    let (da, db) = k.drift();
    if da.abs() > tol || db.abs() > tol || m_bb <= tol || m_ab.abs() <= tol {
        return None;
    }
    let alpha = -2.0 * m_ab / m_bb;
    let beta = -(m_aab + alpha * m_abb) / m_ab;
    ((m_aa + 2.0 * alpha * m_ab).abs() <= tol && alpha > 0.0).then_some((alpha, beta))
}

/// Draws `(p₁₁, p₁₀)` uniformly in the unit square until the family kernel at
/// `(α, β)` is feasible.
pub fn sample_feasible_at<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    beta: f64,
    max_tries: usize,
) -> Option<(CubicFamilyParams, JumpKernel)> {
    (0..max_tries).find_map(|_| {
        let c = CubicFamilyParams::new(alpha, beta, rng.gen::<f64>(), rng.gen::<f64>());
        kernel_from_cubic_family(&c).ok().map(|k| (c, k))
    })
}

/// Rejection sampling over the whole family with `α` and `β` drawn uniformly
/// from the given ranges.
pub fn sample_feasible<R: Rng + ?Sized>(
    rng: &mut R,
    alpha_range: (f64, f64),
    beta_range: (f64, f64),
    max_tries: usize,
) -> Option<(CubicFamilyParams, JumpKernel)> {
    (0..max_tries).find_map(|_| {
        let alpha = alpha_range.0 + (alpha_range.1 - alpha_range.0) * rng.gen::<f64>();
        let beta = beta_range.0 + (beta_range.1 - beta_range.0) * rng.gen::<f64>();
        let c = CubicFamilyParams::new(alpha, beta, rng.gen::<f64>(), rng.gen::<f64>());
        kernel_from_cubic_family(&c).ok().map(|k| (c, k))
    })
}

/// Feasible `(p₁₁, p₁₀)` points on the `n × n` grid `{0, 1/(n−1), …, 1}²`.
pub fn feasible_grid(alpha: f64, beta: f64, n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let step = 1.0 / (n - 1) as f64;
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let (p11, p10) = (a as f64 * step, b as f64 * step);
            if kernel_from_cubic_family(&CubicFamilyParams::new(alpha, beta, p11, p10)).is_ok() {
                out.push((p11, p10));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Direct stencil evaluation, independent of the moment expansion.
    fn direct_defect(k: &JumpKernel, alpha: f64, beta: f64, z: LatticePoint) -> f64 {
        let h = |i: i64, j: i64| {
            if i <= 0 || j <= 0 {
                0.0
            } else {
                let (i, j) = (i as f64, j as f64);
                i * j * (i + alpha * j + beta)
            }
        };
        let (i, j) = (z.i as i64, z.j as i64);
        h(i, j)
            - k.steps()
                .map(|(a, b, p)| p * h(i + a as i64, j + b as i64))
                .sum::<f64>()
    }

    #[test]
    fn su3_kernel_validates_with_five_zero_warnings() {
        let report = validate_kernel(&JumpKernel::su3());
        assert!(report.is_valid(), "{report:?}");
        assert_eq!(report.zero_entries.len(), 5);
    }

    #[test]
    fn uniform_kernel_is_clean() {
        let report = validate_kernel(&JumpKernel::uniform());
        assert!(report.is_valid());
        assert!(report.zero_entries.is_empty());
    }

    #[test]
    fn drifting_kernel_is_reported() {
        let r = 1.0 / 28.0;
        let mut k = JumpKernel::from_fn(|_, _| r);
        k.set(1, 0, 0.5);
        k.set(-1, 0, 0.25);
        let report = validate_kernel(&k);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::HorizontalDrift { drift } if (drift - 0.25).abs() < 1e-12)));
    }

    #[test]
    fn negative_entry_is_a_violation() {
        let mut k = JumpKernel::uniform();
        k.set(1, 1, -0.125);
        assert!(!validate_kernel(&k).is_valid());
    }

    #[test]
    fn family_reproduces_su3_exactly() {
        let k = kernel_from_cubic_family(&CubicFamilyParams::su3()).unwrap();
        for (di, dj, p) in k.steps() {
            let expected = if matches!((di, dj), (1, 0) | (-1, 1) | (0, -1)) {
                1.0 / 3.0
            } else {
                0.0
            };
            assert_eq!(p, expected, "p({di},{dj})");
        }
    }

    #[test]
    fn family_contains_su3_products() {
        for mu in [0.05, 1.0 / 6.0, 0.3] {
            let k = kernel_from_cubic_family(&CubicFamilyParams::new(1.0, 0.0, 0.0, mu)).unwrap();
            let expected = JumpKernel::su3_product(mu);
            for (di, dj, p) in k.steps() {
                assert!((p - expected.p(di, dj)).abs() < 1e-15, "mu={mu} p({di},{dj})");
            }
        }
    }

    #[test]
    fn alpha_outside_range_is_infeasible() {
        for (p11, p10) in [(0.0, 0.0), (0.1, 0.2), (0.5, 0.5)] {
            let err = kernel_from_cubic_family(&CubicFamilyParams::new(3.0, 0.0, p11, p10));
            assert!(matches!(err, Err(Error::InfeasibleParameters { .. })));
        }
    }

    #[test]
    fn degenerate_denominators_are_rejected() {
        assert!(matches!(
            kernel_from_cubic_family(&CubicFamilyParams::new(1.0, -3.0, 0.0, 0.1)),
            Err(Error::DegenerateParameters(_))
        ));
    }

    #[test]
    fn cubic_harmonic_values() {
        assert_eq!(cubic_harmonic(1.0, 0.0, LatticePoint::new(1, 1)), 2.0);
        assert_eq!(cubic_harmonic(1.0, 0.0, LatticePoint::new(7, 0)), 0.0);
        assert_eq!(cubic_harmonic(2.0, 0.0, LatticePoint::new(2, 3)), 48.0);
    }

    #[test]
    fn su3_is_harmonic_to_rounding() {
        let r = harmonicity_residual(&JumpKernel::su3(), 1.0, 0.0, Rect::square(1, 20));
        assert!(r <= 1e-13, "{r}");
    }

    #[test]
    fn uniform_kernel_is_not_harmonic_at_the_corner() {
        let d = harmonic_defect(&JumpKernel::uniform(), 1.0, 0.0, LatticePoint::new(1, 1));
        assert!((d - direct_defect(&JumpKernel::uniform(), 1.0, 0.0, LatticePoint::new(1, 1))).abs() < 1e-12);
        assert!(d.abs() > 0.1);
    }

    #[test]
    fn moment_form_matches_direct_stencil() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let k = JumpKernel::from_fn(|_, _| rng.gen::<f64>());
            let mass = k.total_mass();
            let k = JumpKernel::from_fn(|a, b| k.p(a, b) / mass);
            let (alpha, beta) = (0.5 + 1.5 * rng.gen::<f64>(), rng.gen::<f64>() - 0.5);
            for z in Rect::square(1, 6).points() {
                let a = harmonic_defect(&k, alpha, beta, z);
                let b = direct_defect(&k, alpha, beta, z);
                assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn sampled_family_kernels_are_valid_and_harmonic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (c, k) = sample_feasible(&mut rng, (0.5, 2.0), (-0.5, 0.5), 1_000_000).unwrap();
            assert!(validate_kernel(&k).is_valid(), "{c:?}");
            let r = harmonicity_residual(&k, c.alpha, c.beta, Rect::square(1, 20));
            assert!(r <= 1e-12, "{c:?}: {r}");
        }
    }

    #[test]
    fn small_rational_recognition() {
        assert_eq!(small_rational(1.0 / 3.0), Some(Ratio::new(1, 3)));
        assert_eq!(small_rational(0.25), Some(Ratio::new(1, 4)));
        assert_eq!(small_rational(-0.069), Some(Ratio::new(-69, 1000)));
        assert_eq!(small_rational(core::f64::consts::PI), None);
    }

    #[test]
    fn recovers_family_parameters() {
        assert_eq!(cubic_parameters(&JumpKernel::su3(), 1e-12), Some((1.0, 0.0)));
        assert_eq!(cubic_parameters(&JumpKernel::uniform(), 1e-12), None);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (c, k) = sample_feasible(&mut rng, (0.5, 2.0), (-0.5, 0.5), 1_000_000).unwrap();
            let (a, b) = cubic_parameters(&k, 1e-10).unwrap();
            assert!((a - c.alpha).abs() < 1e-10 && (b - c.beta).abs() < 1e-9, "{c:?} -> {a} {b}");
        }
    }

}
