//! Rational uniformization `z ↦ (x(z), y(z))` of the kernel curve, the
//! automorphisms `ξ(z) = 1/z`, `η(z) = K²/z`, the dihedral group they
//! generate, and the alternating orbit sum.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::curve::{branch_points, q_eval, BranchPair, BranchPoints, CurvePolynomials, ExtendedReal};
use crate::sphere::{Mobius, SpherePoint};
use crate::walk::JumpKernel;
use crate::{Error, Result};

/// Residual threshold of the on-curve gate used when selecting branches.
pub const ON_CURVE_GATE: f64 = 1e-8;
const UNIT_TOL: f64 = 1e-12;
const GATE_SAMPLES: usize = 64;

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sign choices of the square roots entering `z₀…z₃` and the root of `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BranchAssignment {
    pub z0: bool,
    pub z1: bool,
    pub z2: bool,
    pub z3: bool,
    /// `true` selects `K = s/2 − i(1 − s²/4)^{1/2}`.
    pub k_lower: bool,
}

impl BranchAssignment {
    fn from_bits(bits: u8) -> Self {
        Self {
            z0: bits & 1 != 0,
            z1: bits & 2 != 0,
            z2: bits & 4 != 0,
            z3: bits & 8 != 0,
            k_lower: bits & 16 != 0,
        }
    }
}

/// One row of the branch ledger built by [`uniformize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub assignment: BranchAssignment,
    pub k: Complex64,
    pub residual: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformizationData {
    pub kernel: JumpKernel,
    pub z0: Complex64,
    pub z1: Complex64,
    pub z2: Complex64,
    pub z3: Complex64,
    pub k: Complex64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub branch: BranchPoints,
    pub alpha_hint: Option<f64>,
    pub polys: CurvePolynomials,
    pub assignment: BranchAssignment,
    pub ledger: Vec<LedgerEntry>,
    /// `z₀ + 1/z₀`, `z₁ + 1/z₁`, `z₂ + 1/z₂`, `z₃ + 1/z₃`.
    sums: [Complex64; 4],
}

/// Closed form for the pole/zero of one coordinate map (`z₀, z₁` from the
/// x-branch points, `z₂, z₃` from the y-branch points). `lower` flips the
/// square root.
fn closed_form_pair(pair: &BranchPair, lower_pole: bool, lower_zero: bool) -> (Complex64, Complex64) {
    let root = |v: f64, lower: bool| {
        let r = if v >= 0.0 {
            Complex64::new(v.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-v).sqrt())
        };
        if lower {
            -r
        } else {
            r
        }
    };
    let x1 = pair.inner;
    match pair.outer {
        ExtendedReal::Finite(x4) => {
            let gap = x4 - x1;
            let pole = (Complex64::new(2.0 - (x1 + x4), 0.0) + root((1.0 - x1) * (1.0 - x4), lower_pole) * 2.0) / gap;
            let zero = (Complex64::new(x1 + x4 - 2.0 * x1 * x4, 0.0)
                + root(x1 * x4 * (1.0 - x1) * (1.0 - x4), lower_zero) * 2.0)
                / gap;
            (pole, zero)
        }
        // x₄ → ∞: the pole tends to −1 whichever root is taken.
        ExtendedReal::Infinity => {
            let zero = Complex64::new(1.0 - 2.0 * x1, 0.0) + root(-x1 * (1.0 - x1), lower_zero) * 2.0;
            (Complex64::new(-1.0, 0.0), zero)
        }
    }
}

/// The labelling reproducing the reference values `z₀ = e^{−2iπ/3}`, `z₁ = 1`,
/// `z₃ = e^{iπ/3}` for the SU(3) walk: imaginary roots are taken in the lower
/// half plane for poles and in the upper half plane for zeros.
fn canonical_pole_sign(pair: &BranchPair) -> bool {
    match pair.outer {
        ExtendedReal::Finite(x4) => (1.0 - pair.inner) * (1.0 - x4) < 0.0,
        ExtendedReal::Infinity => false,
    }
}

fn k_roots(s: Complex64) -> [Complex64; 2] {
    let w = (ONE - s * s / 4.0).sqrt();
    let i = Complex64::new(0.0, 1.0);
    [s / 2.0 - i * w, s / 2.0 + i * w]
}

impl UniformizationData {
    fn assemble(
        k: &JumpKernel,
        branch: BranchPoints,
        a: BranchAssignment,
    ) -> Self {
        let polys = CurvePolynomials::new(k);
        let (z0, z1) = closed_form_pair(&branch.x, a.z0, a.z1);
        let (z2, z3) = closed_form_pair(&branch.y, a.z2, a.z3);
        let sums = [z0 + z0.inv(), z1 + z1.inv(), z2 + z2.inv(), z3 + z3.inv()];
        // K + 1/K = (√ã(y₁)(z₁ + 1/z₁) + √c̃(y₁)(z₀ + 1/z₀)) / (√ã(y₁) + √c̃(y₁))
        let y1 = Complex64::new(branch.y1(), 0.0);
        let sa = polys.at.eval_c(y1).sqrt();
        let sc = polys.ct.eval_c(y1).sqrt();
        let s = (sa * sums[1] + sc * sums[0]) / (sa + sc);
        let roots = k_roots(s);
        let kk = if a.k_lower { roots[0] } else { roots[1] };
        Self {
            kernel: *k,
            z0,
            z1,
            z2,
            z3,
            k: kk,
            omega_x: branch.x.omega(),
            omega_y: branch.y.omega(),
            branch,
            alpha_hint: None,
            polys,
            assignment: a,
            ledger: Vec::new(),
            sums,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_hint = Some(alpha);
        self
    }

    /// The family parameter α, from the hint or from `Ω_y / Ω_x`.
    pub fn alpha(&self) -> f64 {
        self.alpha_hint.unwrap_or(self.omega_y / self.omega_x)
    }

    /// `Ω_x` recomputed from the selected constants, `z₀ + 1/z₀ − (z₁ + 1/z₁)`.
    pub fn omega_x_from_constants(&self) -> Complex64 {
        self.sums[0] - self.sums[1]
    }

    pub fn omega_y_from_constants(&self) -> Complex64 {
        self.sums[2] - self.sums[3]
    }

    /// `x(z) = (z − z₁)(z − 1/z₁) / ((z − z₀)(z − 1/z₀))` at a finite point.
    #[inline]
    pub fn x(&self, z: Complex64) -> Complex64 {
        ratio(z, self.sums[1], self.sums[0], ONE)
    }

    /// `y(z) = (z − Kz₃)(z − K/z₃) / ((z − Kz₂)(z − K/z₂))` at a finite point.
    #[inline]
    pub fn y(&self, z: Complex64) -> Complex64 {
        ratio(z, self.k * self.sums[3], self.k * self.sums[2], self.k * self.k)
    }

    /// `x′(z) = (z₁ + 1/z₁ − z₀ − 1/z₀)(z² − 1) / (z² − (z₀ + 1/z₀) z + 1)²`.
    #[inline]
    pub fn dx(&self, z: Complex64) -> Complex64 {
        let den = z * z - self.sums[0] * z + 1.0;
        (self.sums[1] - self.sums[0]) * (z * z - 1.0) / (den * den)
    }

    pub fn x_of_z(&self, z: SpherePoint) -> SpherePoint {
        eval_sphere(z, self.sums[1], self.sums[0], ONE)
    }

    pub fn y_of_z(&self, z: SpherePoint) -> SpherePoint {
        eval_sphere(z, self.k * self.sums[3], self.k * self.sums[2], self.k * self.k)
    }

    pub fn group(&self) -> [GroupElement; 6] {
        group_elements(self.k)
    }

    /// Poles of `x∘w` and `y∘w` over the whole group.
    pub fn orbit_poles(&self) -> Vec<Complex64> {
        let base = [self.z0, self.z0.inv(), self.k * self.z2, self.k / self.z2];
        let mut out = Vec::with_capacity(24);
        for g in self.group() {
            for p in base {
                if let SpherePoint::Finite(v) = g.moebius.apply_sphere(SpherePoint::Finite(p)) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn min_pole_modulus(&self) -> f64 {
        self.orbit_poles().iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min)
    }
}

/// `(z² − s_num z + c) / (z² − s_den z + c)`, switched to the `1/z` form for
/// large `|z|`.
#[inline]
fn ratio(z: Complex64, s_num: Complex64, s_den: Complex64, c: Complex64) -> Complex64 {
    if z.norm_sqr() <= 1.0 {
        (z * z - s_num * z + c) / (z * z - s_den * z + c)
    } else {
        let w = z.inv();
        (ONE - s_num * w + c * w * w) / (ONE - s_den * w + c * w * w)
    }
}

fn eval_sphere(z: SpherePoint, s_num: Complex64, s_den: Complex64, c: Complex64) -> SpherePoint {
    match z {
        SpherePoint::Infinity => SpherePoint::Finite(ONE),
        SpherePoint::Finite(z) => {
            let (num, den) = if z.norm_sqr() <= 1.0 {
                (z * z - s_num * z + c, z * z - s_den * z + c)
            } else {
                let w = z.inv();
                (ONE - s_num * w + c * w * w, ONE - s_den * w + c * w * w)
            };
            if den == ZERO {
                SpherePoint::Infinity
            } else {
                SpherePoint::Finite(num / den)
            }
        }
    }
}

/// Deterministic low-discrepancy sample points in the annulus
/// `e^{−2} ≤ |z| ≤ e^{2}`.
pub fn sample_points(count: usize) -> impl Iterator<Item = Complex64> {
    const G1: f64 = 0.754_877_666_246_692_7;
    const G2: f64 = 0.569_840_290_998_053_3;
    (1..=count).map(|n| {
        let n = n as f64;
        let r = (-2.0 + 4.0 * (n * G1).fract()).exp();
        let phi = 2.0 * PI * (n * G2).fract();
        Complex64::from_polar(r, phi)
    })
}

/// `|Q(x, y)|` scaled by `max(1, |x|²) max(1, |y|²)`, so that rounding near a
/// pole of the parametrization does not read as a departure from the curve.
pub fn curve_residual(k: &JumpKernel, x: Complex64, y: Complex64) -> f64 {
    q_eval(k, x, y).norm() / (x.norm_sqr().max(1.0) * y.norm_sqr().max(1.0))
}

/// Largest [`curve_residual`] of `(x(z), y(z))` over `sample_count`
/// deterministic sample points.
pub fn verify_on_curve(k: &JumpKernel, u: &UniformizationData, sample_count: usize) -> f64 {
    sample_points(sample_count)
        .map(|z| curve_residual(k, u.x(z), u.y(z)))
        .fold(0.0, |m, r| if r.is_nan() { f64::INFINITY } else { m.max(r) })
}

/// Builds the uniformization for a kernel.
///
/// All 32 sign assignments of the closed forms are tried; an assignment is
/// accepted when it keeps the curve (`verify_on_curve ≤ 1e−8`) and gives
/// `|K| = 1` with `Im K ≤ 0`. Among accepted rows the canonical labelling
/// wins, then the smallest residual.
pub fn uniformize(k: &JumpKernel) -> Result<UniformizationData> {
    let bp = branch_points(k)?;
    uniformize_with(k, bp)
}

pub fn uniformize_with(k: &JumpKernel, bp: BranchPoints) -> Result<UniformizationData> {
    let canonical = BranchAssignment {
        z0: canonical_pole_sign(&bp.x),
        z1: false,
        z2: canonical_pole_sign(&bp.y),
        z3: false,
        k_lower: true,
    };
    let mut ledger = Vec::with_capacity(32);
    let mut best: Option<(bool, f64, UniformizationData)> = None;
    let mut best_residual = f64::INFINITY;
    for bits in 0..32u8 {
        let a = BranchAssignment::from_bits(bits);
        let cand = UniformizationData::assemble(k, bp, a);
        let residual = verify_on_curve(k, &cand, GATE_SAMPLES);
        let accepted = residual <= ON_CURVE_GATE && (cand.k.norm() - 1.0).abs() <= UNIT_TOL && cand.k.im <= UNIT_TOL;
        best_residual = best_residual.min(residual);
        ledger.push(LedgerEntry {
            assignment: a,
            k: cand.k,
            residual,
            accepted,
        });
        if !accepted {
            continue;
        }
        let is_canonical = a == canonical;
        let better = match &best {
            None => true,
            Some((c, r, _)) => (is_canonical && !*c) || (is_canonical == *c && residual < *r),
        };
        if better {
            best = Some((is_canonical, residual, cand));
        }
    }
    let (_, _, mut u) = best.ok_or(Error::BranchInconsistency { best_residual })?;
    u.ledger = ledger;
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupLabel {
    Identity,
    Xi,
    Eta,
    EtaXi,
    XiEta,
    XiEtaXi,
}

impl GroupLabel {
    pub fn name(&self) -> &'static str {
        match self {
            GroupLabel::Identity => "1",
            GroupLabel::Xi => "xi",
            GroupLabel::Eta => "eta",
            GroupLabel::EtaXi => "eta xi",
            GroupLabel::XiEta => "xi eta",
            GroupLabel::XiEtaXi => "xi eta xi",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub label: GroupLabel,
    pub moebius: Mobius,
    pub length: u8,
}

impl GroupElement {
    /// `(−1)^{l(w)}`.
    pub fn sign(&self) -> f64 {
        if self.length.is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.moebius.apply(z)
    }
}

/// `W = {1, ξ, η, ηξ, ξη, ξηξ}` with `ξ(z) = 1/z`, `η(z) = K²/z`.
pub fn group_elements(k: Complex64) -> [GroupElement; 6] {
    let k2 = k * k;
    let el = |label, a, b, c, d, length| GroupElement {
        label,
        moebius: Mobius::new(a, b, c, d),
        length,
    };
    [
        el(GroupLabel::Identity, ONE, ZERO, ZERO, ONE, 0),
        el(GroupLabel::Xi, ZERO, ONE, ONE, ZERO, 1),
        el(GroupLabel::Eta, ZERO, k2, ONE, ZERO, 1),
        el(GroupLabel::EtaXi, k2, ZERO, ZERO, ONE, 2),
        el(GroupLabel::XiEta, ONE, ZERO, ZERO, k2, 2),
        el(GroupLabel::XiEtaXi, ZERO, ONE, k2, ZERO, 3),
    ]
}

fn ipow(z: Complex64, n: u32) -> Complex64 {
    if n == 0 {
        ONE
    } else {
        z.powu(n)
    }
}

/// `Σ_{w∈W} (−1)^{l(w)} x(w(z))^{i₀} y(w(z))^{j₀}`; images at infinity
/// contribute `x = y = 1`.
pub fn orbit_sum(u: &UniformizationData, i0: u32, j0: u32, z: Complex64) -> Complex64 {
    let k2 = u.k * u.k;
    let images = [
        (z, 1.0),
        (z.inv(), -1.0),
        (k2 / z, -1.0),
        (k2 * z, 1.0),
        (z / k2, 1.0),
        ((k2 * z).inv(), -1.0),
    ];
    let mut acc = ZERO;
    for (w, s) in images {
        let term = if w.is_finite() {
            ipow(u.x(w), i0) * ipow(u.y(w), j0)
        } else {
            ONE
        };
        acc += term * s;
    }
    acc
}

/// Taylor coefficients `c₀…c_{orders−1}` of `f` at 0 by the trapezoidal
/// Cauchy integral on the circle of the given radius with `nodes` points.
pub fn taylor_coefficients(f: impl Fn(Complex64) -> Complex64, radius: f64, orders: usize, nodes: usize) -> Vec<Complex64> {
    let values: Vec<(Complex64, Complex64)> = (0..nodes)
        .map(|m| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / nodes as f64);
            (w, f(w * radius))
        })
        .collect();
    (0..orders)
        .map(|p| {
            let s: Complex64 = values.iter().map(|(w, v)| v * w.powi(-(p as i32))).sum();
            s / (nodes as f64 * radius.powi(p as i32))
        })
        .collect()
}

/// Taylor coefficients of the orbit sum at 0, on a circle of radius
/// `0.05 · min |pole|`.
pub fn orbit_taylor(u: &UniformizationData, i0: u32, j0: u32, orders: usize) -> Vec<Complex64> {
    let radius = 0.05 * u.min_pole_modulus().min(1.0);
    taylor_coefficients(|z| orbit_sum(u, i0, j0, z), radius, orders, 64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{sample_feasible, CubicFamilyParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn family_kernels(n: usize, seed: u64) -> Vec<(CubicFamilyParams, JumpKernel)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| sample_feasible(&mut rng, (0.5, 2.0), (-0.5, 0.5), 1_000_000).unwrap())
            .collect()
    }

    fn random_z(rng: &mut impl Rng) -> Complex64 {
        Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(-PI..PI))
    }

    #[test]
    fn su3_constants() {
        let u = uniformize(&JumpKernel::su3()).unwrap();
        let e = |t: f64| Complex64::from_polar(1.0, t);
        assert!((u.z0 - e(-2.0 * PI / 3.0)).norm() < 1e-12);
        assert!((u.z1 - ONE).norm() < 1e-12);
        assert!((u.z3 - e(PI / 3.0)).norm() < 1e-12);
        assert!((u.k - e(-PI / 3.0)).norm() < 1e-12);
        // The y₄ = ∞ limit forces z₂ = −1.
        assert!((u.z2 + ONE).norm() < 1e-12);
        assert!((u.omega_x + 3.0).abs() < 1e-14 && (u.omega_y + 3.0).abs() < 1e-14);
        assert!(verify_on_curve(&JumpKernel::su3(), &u, 100) < 1e-10);
    }

    #[test]
    fn su3_x_at_k_is_negative_root() {
        let k = JumpKernel::su3();
        let u = uniformize(&k).unwrap();
        let y1 = u.branch.y1();
        let expected = -(u.polys.ct.eval(y1) / u.polys.at.eval(y1)).sqrt();
        assert!((u.x(u.k) - Complex64::new(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn maps_at_zero_and_infinity() {
        let u = uniformize(&JumpKernel::uniform()).unwrap();
        for p in [SpherePoint::Finite(ZERO), SpherePoint::Infinity] {
            for v in [u.x_of_z(p), u.y_of_z(p)] {
                assert!(v.chordal_distance(&SpherePoint::Finite(ONE)) < 1e-15);
            }
        }
        assert!(u.x_of_z(SpherePoint::Finite(u.z0)).is_infinite() || u.x(u.z0).norm() > 1e12);
    }

    #[test]
    fn minus_k_is_rejected() {
        let k = JumpKernel::su3();
        let mut u = uniformize(&k).unwrap();
        u.k = -u.k;
        assert!(verify_on_curve(&k, &u, 100) > 1e-3);
    }

    #[test]
    fn ledger_records_every_assignment() {
        let u = uniformize(&JumpKernel::su3()).unwrap();
        assert_eq!(u.ledger.len(), 32);
        assert!(u.ledger.iter().any(|e| e.accepted));
        assert!(u.ledger.iter().any(|e| !e.accepted));
    }

    #[test]
    fn family_kernels_have_k_sixth_root() {
        let target = Complex64::from_polar(1.0, -PI / 3.0);
        for (c, k) in family_kernels(40, 5) {
            let u = uniformize(&k).unwrap().with_alpha(c.alpha);
            assert!((u.k - target).norm() < 1e-10, "{:?} {}", c, u.k);
            assert!((u.k.powu(6) - ONE).norm() < 1e-10);
            assert!((u.omega_y - c.alpha * u.omega_x).abs() < 1e-10);
            assert!(u.omega_x < 0.0);
            assert!((u.omega_x_from_constants().re - u.omega_x).abs() < 1e-9);
            for z in [u.z0, u.z1, u.z2, u.z3] {
                assert!(z.im.abs() < 1e-10 || (z.norm() - 1.0).abs() < 1e-10);
            }
            assert!(verify_on_curve(&k, &u, 200) < 1e-10);
        }
    }

    #[test]
    fn automorphism_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (_, k) in family_kernels(10, 6) {
            let u = uniformize(&k).unwrap();
            let p = &u.polys;
            let k2 = u.k * u.k;
            for _ in 0..50 {
                let z = random_z(&mut rng);
                let (x, y) = (u.x(z), u.y(z));
                let lhs = u.y(z.inv()) * y;
                let rhs = p.c.eval_c(x) / p.a.eval_c(x);
                assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
                let lhs = u.x(k2 / z) * x;
                let rhs = p.ct.eval_c(y) / p.at.eval_c(y);
                assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
                // ξ fixes x, η fixes y.
                assert!((u.x(z.inv()) - x).norm() < 1e-9 * (1.0 + x.norm()));
                assert!((u.y(k2 / z) - y).norm() < 1e-9 * (1.0 + y.norm()));
            }
        }
    }

    #[test]
    fn cycle_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let dir = Complex64::from_polar(1.0, -PI / 3.0);
        for (_, k) in family_kernels(10, 7) {
            let u = uniformize(&k).unwrap();
            for _ in 0..50 {
                let t: f64 = rng.gen_range(-5.0..5.0);
                let x = u.x(Complex64::new(t, 0.0));
                assert!(x.im.abs() < 1e-9 * (1.0 + x.norm()));
                assert!(u.branch.x.on_cut(x.re, 1e-9 * (1.0 + x.re.abs())), "x({t}) = {x}");
                let y = u.y(dir * t);
                assert!(y.im.abs() < 1e-9 * (1.0 + y.norm()));
                assert!(u.branch.y.on_cut(y.re, 1e-9 * (1.0 + y.re.abs())), "y = {y}");
            }
        }
    }

    #[test]
    fn group_relations() {
        let k = Complex64::from_polar(1.0, -PI / 3.0);
        let g = group_elements(k);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (xi, eta) = (g[1].moebius, g[2].moebius);
        let xe = xi * eta;
        for _ in 0..100 {
            let z = random_z(&mut rng);
            assert!((xi.apply(xi.apply(z)) - z).norm() < 1e-12 * z.norm());
            assert!((eta.apply(eta.apply(z)) - z).norm() < 1e-12 * z.norm());
            assert!(((xe * xe * xe).apply(z) - z).norm() < 1e-12 * z.norm());
            assert!(((xi * eta * xi).apply(z) - (eta * xi * eta).apply(z)).norm() < 1e-12 * z.norm());
            // Labels match the compositions they name.
            assert!(((eta * xi).apply(z) - g[3].apply(z)).norm() < 1e-12 * z.norm());
            assert!(((xi * eta).apply(z) - g[4].apply(z)).norm() < 1e-12 * z.norm());
            assert!(((xi * eta * xi).apply(z) - g[5].apply(z)).norm() < 1e-12 * z.norm());
        }
        let lengths: Vec<u8> = g.iter().map(|e| e.length).collect();
        assert_eq!(lengths, [0, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn fundamental_domain_cover() {
        let g = group_elements(Complex64::from_polar(1.0, -PI / 3.0));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let z = random_z(&mut rng);
            let hit = g.iter().any(|w| {
                let a = w.apply(z).arg();
                (-PI / 3.0 - 1e-9..=1e-9).contains(&a)
            });
            assert!(hit, "{z}");
        }
    }

    #[test]
    fn orbit_sum_is_alternating_and_vanishes_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (_, k) in family_kernels(5, 8) {
            let u = uniformize(&k).unwrap();
            assert!(orbit_sum(&u, 2, 3, Complex64::new(1e-9, 1e-9)).norm() < 1e-12);
            for _ in 0..20 {
                let z = random_z(&mut rng);
                let s = orbit_sum(&u, 2, 1, z);
                let t = orbit_sum(&u, 2, 1, z.inv());
                assert!((s + t).norm() < 1e-10 * (1.0 + s.norm()));
            }
        }
    }

    #[test]
    fn orbit_taylor_su3() {
        let u = uniformize(&JumpKernel::su3()).unwrap();
        let c = orbit_taylor(&u, 1, 1, 6);
        let expected = Complex64::new(0.0, -27.0 * 3f64.powf(1.5));
        assert!((c[3] - expected).norm() < 1e-7 * expected.norm(), "{:?}", c);
        for p in [0, 1, 2, 4, 5] {
            assert!(c[p].norm() < 1e-8 * expected.norm(), "order {p}: {}", c[p]);
        }
    }

    #[test]
    fn conjugation_symmetry_on_the_sphere() {
        let u = uniformize(&JumpKernel::su3()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let z = random_z(&mut rng);
            let zr = z.conj().inv();
            assert!((u.x(zr) - u.x(z).conj()).norm() < 1e-10 * (1.0 + u.x(z).norm()));
            assert!((u.y(zr) - u.y(z).conj()).norm() < 1e-10 * (1.0 + u.y(z).norm()));
            let s = orbit_sum(&u, 1, 2, z);
            assert!((orbit_sum(&u, 1, 2, zr) - s.conj()).norm() < 1e-10 * (1.0 + s.norm()));
        }
    }
}
