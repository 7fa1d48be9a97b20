//! The Green function as a contour integral over the ray `e^{iθ}[0, ∞]`.
//!
//! The integrand is written in the branch-free form
//! `−S(z) x′(z) / (∂_y Q(x(z), y(z)) x(z)^i y(z)^j)`, where `S` is the
//! alternating orbit sum, so no square root ever has to be chosen.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::curve::ExtendedReal;
use crate::quadrature::{integrate, QuadConfig, QuadResult};
use crate::uniformization::{orbit_sum, UniformizationData};
use crate::walk::{JumpKernel, LatticePoint};
use crate::{Error, Result};

/// Admissible ray angles are `[2π/3, π]`; defaults stay this far inside.
pub const THETA_MARGIN: f64 = 0.01;
pub const THETA_MIN: f64 = 2.0 * PI / 3.0;
pub const THETA_MAX: f64 = PI;
const POLE_TOL: f64 = 1e-13;
const Z_MIN: f64 = 1e-10;
const Z_MAX: f64 = 1e10;
/// Largest tolerated `|Im G|` relative to `|G|` (beyond the quadrature error).
pub const IMAG_REJECT: f64 = 1e-6;
/// Imaginary parts above this fraction of `|G|` are noted in the metadata.
pub const IMAG_NOTE: f64 = 1e-9;

/// `arg ρ_{j/i} = π − arg(1 + (j/i) α e^{iπ/3}) ∈ (2π/3, π]`.
pub fn rho_arg(alpha: f64, slope: f64) -> f64 {
    PI - (Complex64::new(1.0, 0.0) + Complex64::from_polar(slope * alpha, PI / 3.0)).arg()
}

/// `ρ_{j/i} = 1 / (Ω_x (1 + (j/i) α e^{iπ/3}))`.
pub fn rho(u: &UniformizationData, alpha: f64, slope: f64) -> Complex64 {
    (Complex64::from_polar(slope * alpha, PI / 3.0) + 1.0).inv() / u.omega_x
}

/// Taylor coefficients of `χ(z) = ln x(z) + (j/i) ln y(z)` at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    /// `ν_1 … ν_P`.
    pub nu: Vec<Complex64>,
    pub slope: f64,
}

impl SeriesCoefficients {
    /// `ν_p`, with `ν_0 = 0`.
    pub fn get(&self, p: usize) -> Complex64 {
        if p == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.nu[p - 1]
        }
    }
}

/// `p ν_p = z₀^p + z₀^{−p} − z₁^p − z₁^{−p} + (j/i)(z₂^p + z₂^{−p} − z₃^p − z₃^{−p}) / K^p`.
pub fn nu_coefficients(u: &UniformizationData, slope: f64, p_max: usize) -> SeriesCoefficients {
    let sym = |z: Complex64, p: i32| z.powi(p) + z.powi(-p);
    let nu = (1..=p_max as i32)
        .map(|p| {
            let x_part = sym(u.z0, p) - sym(u.z1, p);
            let y_part = (sym(u.z2, p) - sym(u.z3, p)) / u.k.powi(p);
            (x_part + y_part * slope) / p as f64
        })
        .collect();
    SeriesCoefficients { nu, slope }
}

/// `χ(z) = ln x(z) + slope · ln y(z)` (principal logarithms; valid near 0).
pub fn chi(u: &UniformizationData, slope: f64, z: Complex64) -> Complex64 {
    u.x(z).ln() + u.y(z).ln() * slope
}

/// `[z₀ − 1/z₀] / (p₁₀² − 4p₁₁p₁,₋₁)^{1/2}`, purely imaginary; when the
/// discriminant vanishes (`x₄ = ∞`) the finite limit is used.
pub fn pole_gap_ratio(u: &UniformizationData) -> Complex64 {
    match u.branch.x4() {
        ExtendedReal::Finite(_) => (u.z0 - u.z0.inv()) / Complex64::new(u.branch.disc_x(), 0.0).sqrt(),
        ExtendedReal::Infinity => Complex64::new(0.0, -u.branch.x.gap_over_root_leading()),
    }
}

/// Ray `e^{iθ}[0, ∞)` mapped to `t ∈ [0, 1)` by `z = e^{iθ} t / (1 − t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayContour {
    pub theta: f64,
    pub quad: QuadConfig,
}

impl RayContour {
    pub fn new(theta: f64) -> Self {
        Self {
            theta,
            quad: QuadConfig::default(),
        }
    }

    /// Steepest-descent direction `arg ρ_{j/i}`, clamped inside the sector.
    pub fn for_direction(alpha: f64, slope: f64) -> Self {
        Self::new(rho_arg(alpha, slope).clamp(THETA_MIN + THETA_MARGIN, THETA_MAX - THETA_MARGIN))
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.quad.abs_tol = abs_tol;
        self.quad.rel_tol = rel_tol;
        self
    }

    #[inline]
    pub fn point(&self, t: f64) -> Complex64 {
        Complex64::from_polar(t / (1.0 - t), self.theta)
    }

    /// `dz/dt`.
    #[inline]
    pub fn jacobian(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0 / ((1.0 - t) * (1.0 - t)), self.theta)
    }

    /// Parameter value with `|z| = r`.
    pub fn t_of_radius(r: f64) -> f64 {
        r / (1.0 + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Contour,
    OracleTruncation,
    MonteCarlo,
    Asymptotic,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Contour => "contour",
            Method::OracleTruncation => "oracle-truncation",
            Method::MonteCarlo => "monte-carlo",
            Method::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimateMeta {
    pub theta: Option<f64>,
    pub evaluations: Option<usize>,
    pub truncation: Option<usize>,
    /// Discarded imaginary part of a contour value.
    pub imag: Option<f64>,
    /// The middle panel of a split contour was bounded and skipped.
    pub middle_skipped: bool,
    /// The imaginary part exceeded `1e−9 |value|` but was tolerated.
    pub imag_noted: bool,
    /// Total subtracted from the ray integral: the monomial residue at
    /// infinity less any sector-pole residues.
    pub correction: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
    pub meta: EstimateMeta,
}

#[inline]
fn inv_powers(x: Complex64, y: Complex64, i: u32, j: u32) -> Complex64 {
    // x^{−i} y^{−j} through the logarithm to avoid intermediate overflow.
    (-(x.ln() * i as f64 + y.ln() * j as f64)).exp()
}

fn integrand_raw(u: &UniformizationData, i0: u32, j0: u32, i: u32, j: u32, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if !(Z_MIN..=Z_MAX).contains(&r) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (x, y) = (u.x(z), u.y(z));
    let dq = u.polys.dq_dy(x, y);
    if dq.norm() < POLE_TOL {
        return Err(Error::PoleProximity { re: z.re, im: z.im });
    }
    let s = orbit_sum(u, i0, j0, z);
    Ok(-s * u.dx(z) / dq * inv_powers(x, y, i, j))
}

/// `−S(z) x′(z) / (∂_y Q(x(z), y(z)) x(z)^i y(z)^j)`.
pub fn green_integrand(u: &UniformizationData, i0: u32, j0: u32, i: u32, j: u32, z: Complex64) -> Result<Complex64> {
    integrand_raw(u, i0, j0, i, j, z)
}

/// The integrand of the prefactor form,
/// `−[z₀ − 1/z₀] / (Ω_x disc^{1/2}) · S(z) / (z x(z)^i y(z)^j)`. Equal to
/// [`green_integrand`] up to a global sign fixed by the square-root branch.
pub fn prefactor_integrand(u: &UniformizationData, i0: u32, j0: u32, i: u32, j: u32, z: Complex64) -> Complex64 {
    let pre = -pole_gap_ratio(u) / u.omega_x;
    let (x, y) = (u.x(z), u.y(z));
    pre * orbit_sum(u, i0, j0, z) / z * inv_powers(x, y, i, j)
}

fn check_points(i0: u32, j0: u32, i: u32, j: u32) -> Result<()> {
    LatticePoint::new(i0, j0).require_interior()?;
    LatticePoint::new(i, j).require_interior()
}

fn ray_integral(
    u: &UniformizationData,
    (i0, j0, i, j): (u32, u32, u32, u32),
    contour: &RayContour,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let mut fault = None;
    let res = integrate(
        |t| {
            if t >= 1.0 {
                return Complex64::new(0.0, 0.0);
            }
            match integrand_raw(u, i0, j0, i, j, contour.point(t)) {
                Ok(v) => v * contour.jacobian(t),
                Err(e) => {
                    fault.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        breaks,
        cfg,
    );
    if let Some(e) = fault {
        return Err(e);
    }
    res
}

fn max_on_panel(u: &UniformizationData, idx: (u32, u32, u32, u32), contour: &RayContour, a: f64, b: f64) -> Result<f64> {
    const SAMPLES: usize = 256;
    let mut m = 0.0f64;
    for n in 0..=SAMPLES {
        let t = a + (b - a) * n as f64 / SAMPLES as f64;
        let v = integrand_raw(u, idx.0, idx.1, idx.2, idx.3, contour.point(t))? * contour.jacobian(t);
        m = m.max(v.norm());
    }
    Ok(m)
}

/// Residue at infinity of the start monomial:
/// `T = (1/2πi)² ∬ x^{i₀−i} y^{j₀−j} / Q(x, y) dx dy` over a torus with
/// `|x| ≫ |y| ≫ 1`.
///
/// The ray integral equals `G + T`. `T` vanishes unless the target lies
/// to the lower left of the start (up to the kernel's support), so only
/// those targets are affected. With `u = 1/x`, `v = 1/y` it is a Laurent
/// coefficient of `1/Q(1/u, 1/v)`, computed exactly by the recursion
/// `F = 1 − εF` around the leading monomial.
pub fn monomial_correction(k: &JumpKernel, i0: u32, j0: u32, i: u32, j: u32) -> f64 {
    // q[s][t] is the coefficient of x^s y^t in Q.
    let mut q = [[0.0f64; 3]; 3];
    for (s, row) in q.iter_mut().enumerate() {
        for (t, c) in row.iter_mut().enumerate() {
            *c = k.p(s as i8 - 1, t as i8 - 1);
        }
    }
    q[1][1] -= 1.0;
    // Leading monomial for |x| ≫ |y|: largest s, then largest t.
    let (s0, t0) = (0..3usize)
        .rev()
        .flat_map(|s| (0..3usize).rev().map(move |t| (s, t)))
        .find(|&(s, t)| q[s][t] != 0.0)
        .expect("kernel polynomial has a nonzero coefficient");
    let lead = q[s0][t0];
    let eps: Vec<(i64, i64, f64)> = (0..3usize)
        .flat_map(|s| (0..3usize).map(move |t| (s, t)))
        .filter(|&(s, t)| (s, t) != (s0, t0) && q[s][t] != 0.0)
        .map(|(s, t)| ((s0 - s) as i64, t0 as i64 - t as i64, q[s][t] / lead))
        .collect();
    let m = i0 as i64 - i as i64 - 1 + (2 - s0 as i64);
    let n = j0 as i64 - j as i64 - 1 + (2 - t0 as i64);
    let mut memo = BTreeMap::new();
    laurent_coefficient(&eps, m, n, &mut memo) / lead
}

/// Coefficient of `u^m v^n` in `1/(1 + ε)`. Every shift has `Δm ≥ 0`, and
/// `Δn > 0` when `Δm = 0`, so `3m + n` drops each step and the support is
/// `m ≥ 0, n ≥ −2m`.
fn laurent_coefficient(eps: &[(i64, i64, f64)], m: i64, n: i64, memo: &mut BTreeMap<(i64, i64), f64>) -> f64 {
    if m < 0 || n < -2 * m {
        return 0.0;
    }
    if let Some(&v) = memo.get(&(m, n)) {
        return v;
    }
    let mut v = if (m, n) == (0, 0) { 1.0 } else { 0.0 };
    for &(dm, dn, c) in eps {
        v -= c * laurent_coefficient(eps, m - dm, n - dn, memo);
    }
    memo.insert((m, n), v);
    v
}

/// A pole of `x` (at `z₀^{±1}`) or of `y` (at `K z₂^{±1}`) strictly inside
/// the admissible sector, with the sign its residue enters the value when
/// the ray lies on the wrong side of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPole {
    pub z: Complex64,
    /// `true` for a pole of `x`, which must lie above the contour; poles of
    /// `y` must lie below it.
    pub of_x: bool,
}

/// Poles of the coordinate maps strictly inside `(2π/3, π)`. For kernels
/// with `x₁ ≥ 0` and `y₁ ≥ 0` they sit on the boundary rays and this is
/// empty.
pub fn sector_poles(u: &UniformizationData) -> Vec<SectorPole> {
    const EDGE: f64 = 1e-9;
    [(u.z0, true), (u.z0.inv(), true), (u.k * u.z2, false), (u.k / u.z2, false)]
        .into_iter()
        .filter(|(z, _)| z.is_finite() && z.im > 0.0 && (THETA_MIN + EDGE..THETA_MAX - EDGE).contains(&z.arg()))
        .map(|(z, of_x)| SectorPole { z, of_x })
        .collect()
}

/// `(1/2πi) ∮ (integrand) dz` around `p`, on a circle a quarter of the way
/// to the nearest other singular point.
fn residue(u: &UniformizationData, idx: (u32, u32, u32, u32), p: Complex64) -> Result<Complex64> {
    const NODES: usize = 128;
    let one = Complex64::new(1.0, 0.0);
    let mut others = u.orbit_poles();
    others.extend([Complex64::new(0.0, 0.0), one, -one, u.k, -u.k, u.z1, u.z1.inv(), u.k * u.z3, u.k / u.z3]);
    let d = others
        .iter()
        .map(|q| (q - p).norm())
        .filter(|d| *d > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let r = 0.25 * d.min(p.norm());
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..NODES {
        let w = Complex64::from_polar(r, 2.0 * PI * n as f64 / NODES as f64);
        acc += integrand_raw(u, idx.0, idx.1, idx.2, idx.3, p + w)? * w;
    }
    Ok(acc / NODES as f64)
}

/// Residue terms restoring the contour that keeps poles of `x` above and
/// poles of `y` below it, for a ray at angle `theta`.
fn crossing_correction(u: &UniformizationData, idx: (u32, u32, u32, u32), theta: f64) -> Result<Complex64> {
    let poles = sector_poles(u);
    let mut out = Complex64::new(0.0, 0.0);
    for p in &poles {
        // With p₁₁ = 0 the curve passes through (∞, ∞) and a pole of x can
        // coincide with a pole of y; no contour separates them.
        let shared = poles.iter().any(|q| q.of_x != p.of_x && (q.z - p.z).norm() < 1e-9);
        if shared {
            if p.of_x {
                let r = residue(u, idx, p.z)?;
                if r.norm() > 1e-10 {
                    return Err(Error::CoincidentPoles { re: p.z.re, im: p.z.im });
                }
            }
            continue;
        }
        let below = p.z.arg() < theta;
        if p.of_x && below {
            out += residue(u, idx, p.z)?;
        } else if !p.of_x && !below {
            out -= residue(u, idx, p.z)?;
        }
    }
    Ok(out)
}

/// `G_{i,j}^{i₀,j₀} = (1/2πi) ∫_{e^{iθ}[0,∞]} (integrand) dz`.
///
/// The ray integral is corrected by [`monomial_correction`] and by the
/// residues of any [`sector_poles`] on the wrong side of the ray. Without a
/// contour the ray follows `arg ρ_{j/i}`, moved off sector poles. For `i + j > 500` the ray
/// is split at `|z| = 10/(i+j)` and `(i+j)/10`, and the middle panel is
/// skipped when a sampled bound puts it below 1% of the tolerance.
pub fn green_value(
    u: &UniformizationData,
    i0: u32,
    j0: u32,
    i: u32,
    j: u32,
    contour: Option<&RayContour>,
) -> Result<GreenEstimate> {
    check_points(i0, j0, i, j)?;
    let contour = match contour {
        Some(c) => *c,
        None => {
            let mut c = RayContour::for_direction(u.alpha(), j as f64 / i as f64);
            for p in sector_poles(u) {
                let gap = c.theta - p.z.arg();
                if gap.abs() < 1e-3 {
                    c.theta = (p.z.arg() + 1e-3f64.copysign(gap)).clamp(THETA_MIN, THETA_MAX);
                }
            }
            c
        }
    };
    let idx = (i0, j0, i, j);
    let n = (i + j) as f64;
    let mut middle_skipped = false;
    let (value, abs_error, evaluations) = if n > 500.0 {
        let (ta, tb) = (RayContour::t_of_radius(10.0 / n), RayContour::t_of_radius(n / 10.0));
        let head = ray_integral(u, idx, &contour, &[0.0, RayContour::t_of_radius(1.0 / n), ta], &contour.quad)?;
        let tail = ray_integral(u, idx, &contour, &[tb, RayContour::t_of_radius(n), 1.0], &contour.quad)?;
        let outer = head.value + tail.value;
        let tol = contour.quad.abs_tol.max(contour.quad.rel_tol * outer.norm());
        let bound = max_on_panel(u, idx, &contour, ta, tb)? * (tb - ta);
        let mut total = outer;
        let mut err = head.abs_error + tail.abs_error;
        let mut evals = head.evaluations + tail.evaluations + 257;
        if bound < 0.01 * tol {
            middle_skipped = true;
            err += bound;
        } else {
            let mid = ray_integral(u, idx, &contour, &[ta, 0.5, tb], &contour.quad)?;
            total += mid.value;
            err += mid.abs_error;
            evals += mid.evaluations;
        }
        (total, err, evals)
    } else {
        let mut breaks = Vec::from([0.0]);
        if n > 4.0 {
            breaks.push(RayContour::t_of_radius(1.0 / n));
        }
        breaks.push(0.5);
        if n > 4.0 {
            breaks.push(RayContour::t_of_radius(n));
        }
        breaks.push(1.0);
        let r = ray_integral(u, idx, &contour, &breaks, &contour.quad)?;
        (r.value, r.abs_error, r.evaluations)
    };
    let g = value / Complex64::new(0.0, 2.0 * PI);
    let abs_error = abs_error / (2.0 * PI);
    if g.im.abs() > IMAG_REJECT * g.re.abs() + abs_error {
        return Err(Error::NonReal { real: g.re, imag: g.im });
    }
    let crossing = crossing_correction(u, idx, contour.theta)?;
    let t = monomial_correction(&u.kernel, i0, j0, i, j) - crossing.re;
    let correction = (t != 0.0).then_some(t);
    Ok(GreenEstimate {
        value: g.re - t,
        abs_error: abs_error + 4.0 * f64::EPSILON * t.abs() + crossing.im.abs(),
        method: Method::Contour,
        meta: EstimateMeta {
            theta: Some(contour.theta),
            evaluations: Some(evaluations),
            imag: Some(g.im),
            middle_skipped,
            imag_noted: g.im.abs() > IMAG_NOTE * g.re.abs(),
            correction,
            ..EstimateMeta::default()
        },
    })
}

/// The two halves `∫_{|z|≤1}` and `∫_{|z|≥1}` of the ray integral (in `z`,
/// before dividing by `2πi`). The second is minus the conjugate of the first.
pub fn ray_halves(
    u: &UniformizationData,
    i0: u32,
    j0: u32,
    i: u32,
    j: u32,
    contour: &RayContour,
) -> Result<(Complex64, Complex64)> {
    check_points(i0, j0, i, j)?;
    let idx = (i0, j0, i, j);
    let head = ray_integral(u, idx, contour, &[0.0, 0.25, 0.5], &contour.quad)?;
    let tail = ray_integral(u, idx, contour, &[0.5, 0.75, 1.0], &contour.quad)?;
    Ok((head.value, tail.value))
}
