//! Directional asymptotics of the Green functions and absorption
//! probabilities: `G ~ C h(i₀,j₀) i j (i + αj) / (i² + αij + α²j²)³`.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::green::{green_value, nu_coefficients, pole_gap_ratio, rho, GreenEstimate};
use crate::uniformization::UniformizationData;
use crate::walk::{cubic_harmonic, JumpKernel, LatticePoint};
use crate::{Error, Result};

/// Index pair `i = j` at which the assembled constant is checked against
/// a contour value.
pub const GATE_INDEX: u32 = 100;
/// Largest tolerated relative disagreement in that check.
pub const GATE_TOL: f64 = 0.10;

/// Quantities the constant is assembled from, kept for audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CPieces {
    /// `z₀ − 1/z₀`.
    pub pole_gap: Complex64,
    /// `(z₀ − 1/z₀) / disc_x^{1/2}` (finite limit when `x₄ = ∞`).
    pub gap_ratio: Complex64,
    pub omega_x: f64,
    /// `p₁₀² − 4p₁₁p₁,₋₁`.
    pub disc_x: f64,
    pub alpha: f64,
    /// `Re(i [z₀ − 1/z₀] 27α² / (2π disc^{1/2} Ω_x))` before the sign gate.
    pub assembled: f64,
    /// Imaginary part of the same expression (zero up to rounding).
    pub assembled_imag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticModel {
    /// `C > 0`.
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub pieces: CPieces,
    /// The assembled constant was negative and its sign was flipped.
    pub sign_flipped: bool,
    /// `G·(i²+αij+α²j²)³ / (h(1,1) i j (i+αj))` at `i = j = GATE_INDEX`, when checked.
    pub empirical: Option<f64>,
}

/// Assembles `C` from the constants of the uniformization, without any gate.
pub fn assemble_c(u: &UniformizationData, alpha: f64) -> CPieces {
    let gap_ratio = pole_gap_ratio(u);
    let raw = Complex64::new(0.0, 1.0) * gap_ratio * (27.0 * alpha * alpha) / (2.0 * PI * u.omega_x);
    CPieces {
        pole_gap: u.z0 - u.z0.inv(),
        gap_ratio,
        omega_x: u.omega_x,
        disc_x: u.branch.disc_x(),
        alpha,
        assembled: raw.re,
        assembled_imag: raw.im,
    }
}

/// `C` with the positivity gate only: a negative assembled value is flipped
/// and `sign_flipped` records it.
pub fn constant_c_unchecked(u: &UniformizationData, alpha: f64, beta: f64) -> AsymptoticModel {
    let pieces = assemble_c(u, alpha);
    AsymptoticModel {
        c: pieces.assembled.abs(),
        alpha,
        beta,
        pieces,
        sign_flipped: pieces.assembled < 0.0,
        empirical: None,
    }
}

/// The directional factor `i j (i + αj) / (i² + αij + α²j²)³`.
pub fn direction_factor(alpha: f64, i: f64, j: f64) -> f64 {
    let q = i * i + alpha * i * j + alpha * alpha * j * j;
    i * j * (i + alpha * j) / (q * q * q)
}

/// Ratio `G / (h(i₀,j₀) · direction factor)` from a contour value.
pub fn empirical_constant(u: &UniformizationData, alpha: f64, beta: f64, i0: u32, j0: u32, i: u32, j: u32) -> Result<f64> {
    let g: GreenEstimate = green_value(u, i0, j0, i, j, None)?;
    let h = cubic_harmonic(alpha, beta, LatticePoint::new(i0, j0));
    Ok(g.value / (h * direction_factor(alpha, i as f64, j as f64)))
}

/// `C`, sign-gated and checked against the contour value at `i = j = 100`
/// from `(1, 1)`; fails when they differ by more than 10%.
pub fn constant_c(u: &UniformizationData, alpha: f64, beta: f64) -> Result<AsymptoticModel> {
    let mut model = constant_c_unchecked(u, alpha, beta);
    let empirical = empirical_constant(u, alpha, beta, 1, 1, GATE_INDEX, GATE_INDEX)?;
    model.empirical = Some(empirical);
    if (model.c - empirical).abs() > GATE_TOL * empirical.abs() {
        return Err(Error::GateFailure {
            assembled: model.pieces.assembled,
            empirical,
        });
    }
    Ok(model)
}

/// Leading term `C h(i₀,j₀) i j (i + αj) / (i² + αij + α²j²)³`.
pub fn green_asymptotic(model: &AsymptoticModel, i0: u32, j0: u32, i: u32, j: u32) -> f64 {
    let h = cubic_harmonic(model.alpha, model.beta, LatticePoint::new(i0, j0));
    model.c * h * direction_factor(model.alpha, i as f64, j as f64)
}

/// Two-term expansion: the leading term plus
/// `−24 P h(i₀,j₀) (ν₂ ρ⁵ − conj) / i⁴`, where `P` is the prefactor of the
/// local contribution near 0 (sign as gated in `model`).
pub fn green_asymptotic_two_term(u: &UniformizationData, model: &AsymptoticModel, i0: u32, j0: u32, i: u32, j: u32) -> f64 {
    let alpha = model.alpha;
    let h = cubic_harmonic(alpha, model.beta, LatticePoint::new(i0, j0));
    let slope = j as f64 / i as f64;
    let r = rho(u, alpha, slope);
    let nu2 = nu_coefficients(u, slope, 2).get(2);
    let sign = if model.sign_flipped { -1.0 } else { 1.0 };
    let p = -model.pieces.gap_ratio * 3f64.powf(1.5) * alpha * u.omega_x * u.omega_x / (4.0 * PI) * sign;
    let fi = i as f64;
    let rr = r / fi;
    let lead = (rr.powu(3) - rr.conj().powu(3)) * 2.0;
    let second = nu2 * r.powu(5);
    let corr = (second - second.conj()) * (-24.0 / fi.powi(4));
    (p * (lead + corr)).re * h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Absorption at `(i, 0)`.
    Horizontal,
    /// Absorption at `(0, j)`.
    Vertical,
}

/// `C (p₁,₋₁ + p₀,₋₁ + p₋₁,₋₁) h(i₀,j₀) / i⁴`, or with
/// `(p₋₁,₁ + p₋₁,₀ + p₋₁,₋₁) / α⁵` on the vertical side.
pub fn absorption_asymptotic(model: &AsymptoticModel, k: &JumpKernel, i0: u32, j0: u32, side: Side, i: u32) -> f64 {
    let h = cubic_harmonic(model.alpha, model.beta, LatticePoint::new(i0, j0));
    let weight = match side {
        Side::Horizontal => k.p(1, -1) + k.p(0, -1) + k.p(-1, -1),
        Side::Vertical => (k.p(-1, 1) + k.p(-1, 0) + k.p(-1, -1)) / model.alpha.powi(5),
    };
    model.c * weight * h / (i as f64).powi(4)
}

/// `(i 3^{3/2} / 2) α Ω_x³ h(i₀, j₀)`, the `z³` coefficient of the orbit sum.
pub fn orbit_cubic_coefficient(u: &UniformizationData, alpha: f64, beta: f64, i0: u32, j0: u32) -> Complex64 {
    let h = cubic_harmonic(alpha, beta, LatticePoint::new(i0, j0));
    Complex64::new(0.0, 3f64.powf(1.5) / 2.0) * alpha * u.omega_x.powi(3) * h
}
