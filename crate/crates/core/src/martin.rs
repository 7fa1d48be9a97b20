//! Martin kernels `k^{(i₀,j₀)}_{(i,j)} = G^{i₀,j₀}_{i,j} / G^{ref}_{i,j}` and
//! their behaviour along escape directions.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::green::{green_value, GreenEstimate};
use crate::uniformization::UniformizationData;
use crate::walk::{cubic_harmonic, LatticePoint};
use crate::{Error, Result};

/// Ratio of two estimates with first-order error propagation.
pub fn martin_ratio(num: &GreenEstimate, den: &GreenEstimate) -> Result<(f64, f64)> {
    if den.value <= den.abs_error || den.value <= 0.0 {
        return Err(Error::DivisionInstability {
            value: den.value,
            abs_error: den.abs_error,
        });
    }
    let k = num.value / den.value;
    let rel = num.abs_error / num.value.abs().max(f64::MIN_POSITIVE) + den.abs_error / den.value;
    Ok((k, k.abs() * rel))
}

/// Martin kernel from two contour values.
pub fn martin_kernel(
    u: &UniformizationData,
    start: LatticePoint,
    reference: LatticePoint,
    i: u32,
    j: u32,
) -> Result<(f64, f64)> {
    if start == reference {
        green_value(u, reference.i, reference.j, i, j, None)?;
        return Ok((1.0, 0.0));
    }
    let num = green_value(u, start.i, start.j, i, j, None)?;
    let den = green_value(u, reference.i, reference.j, i, j, None)?;
    martin_ratio(&num, &den)
}

/// An escape direction in the quarter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Direction {
    /// `j/i = tan γ`, points rounded from `(r cos γ, r sin γ)`.
    Slope(f64),
    /// `j` fixed, `i = r`.
    FixedJ(u32),
    /// `i` fixed, `j = r`.
    FixedI(u32),
}

impl Direction {
    pub fn point(&self, radius: u32) -> (u32, u32) {
        match *self {
            Direction::Slope(s) => {
                let g = s.atan();
                let r = radius as f64;
                (((r * g.cos()).round() as u32).max(1), ((r * g.sin()).round() as u32).max(1))
            }
            Direction::FixedJ(j) => (radius, j),
            Direction::FixedI(i) => (i, radius),
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Slope(s) => write!(f, "slope={s}"),
            Direction::FixedJ(j) => write!(f, "j={j}"),
            Direction::FixedI(i) => write!(f, "i={i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartinConfig {
    pub reference: LatticePoint,
    pub directions: Vec<Direction>,
    pub radii: Vec<u32>,
}

impl Default for MartinConfig {
    fn default() -> Self {
        Self {
            reference: LatticePoint::new(1, 1),
            directions: Vec::from([
                Direction::Slope(0.125),
                Direction::Slope(1.0),
                Direction::Slope(8.0),
            ]),
            radii: Vec::from([25, 50, 100]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartinRow {
    pub direction: String,
    pub radius: u32,
    pub i: u32,
    pub j: u32,
    pub kernel: f64,
    pub abs_error: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartinDiagnostic {
    pub start: LatticePoint,
    pub reference: LatticePoint,
    pub limit_prediction: f64,
    pub table: Vec<MartinRow>,
    /// `(radius, max relative deviation from the prediction)`.
    pub max_deviation: Vec<(u32, f64)>,
}

impl MartinDiagnostic {
    /// Largest pairwise relative difference between directions at a radius.
    pub fn spread(&self, radius: u32) -> f64 {
        let ks: Vec<f64> = self.table.iter().filter(|r| r.radius == radius).map(|r| r.kernel).collect();
        let mut out = 0.0f64;
        for a in &ks {
            for b in &ks {
                out = out.max((a - b).abs() / a.abs().min(b.abs()));
            }
        }
        out
    }
}

/// `h(i₀, j₀) / h(ref)`.
pub fn limit_prediction(alpha: f64, beta: f64, start: LatticePoint, reference: LatticePoint) -> f64 {
    cubic_harmonic(alpha, beta, start) / cubic_harmonic(alpha, beta, reference)
}

/// Fills the table using any Green evaluator `green(i₀, j₀, i, j)`.
pub fn martin_limit_diagnostic_with(
    mut green: impl FnMut(u32, u32, u32, u32) -> Result<GreenEstimate>,
    alpha: f64,
    beta: f64,
    start: LatticePoint,
    cfg: &MartinConfig,
) -> Result<MartinDiagnostic> {
    start.require_interior()?;
    cfg.reference.require_interior()?;
    let prediction = limit_prediction(alpha, beta, start, cfg.reference);
    let mut table = Vec::new();
    let mut max_deviation = Vec::new();
    for &radius in &cfg.radii {
        let mut worst = 0.0f64;
        for d in &cfg.directions {
            let (i, j) = d.point(radius);
            let num = green(start.i, start.j, i, j)?;
            let den = green(cfg.reference.i, cfg.reference.j, i, j)?;
            let (kernel, abs_error) = martin_ratio(&num, &den)?;
            let deviation = (kernel - prediction).abs() / prediction.abs();
            worst = worst.max(deviation);
            table.push(MartinRow {
                direction: alloc::format!("{d}"),
                radius,
                i,
                j,
                kernel,
                abs_error,
                deviation,
            });
        }
        max_deviation.push((radius, worst));
    }
    Ok(MartinDiagnostic {
        start,
        reference: cfg.reference,
        limit_prediction: prediction,
        table,
        max_deviation,
    })
}

/// [`martin_limit_diagnostic_with`] using contour values.
pub fn martin_limit_diagnostic(
    u: &UniformizationData,
    alpha: f64,
    beta: f64,
    start: LatticePoint,
    cfg: &MartinConfig,
) -> Result<MartinDiagnostic> {
    martin_limit_diagnostic_with(|a, b, i, j| green_value(u, a, b, i, j, None), alpha, beta, start, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{constant_c_unchecked, green_asymptotic};
    use crate::green::{EstimateMeta, Method};
    use crate::uniformization::uniformize;
    use crate::walk::JumpKernel;

    #[test]
    fn identical_points_give_one() {
        let u = uniformize(&JumpKernel::su3()).unwrap();
        let p = LatticePoint::new(2, 2);
        assert_eq!(martin_kernel(&u, p, p, 5, 7).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn prediction_closed_form() {
        let p = limit_prediction(1.0, 0.0, LatticePoint::new(1, 2), LatticePoint::new(1, 1));
        assert_eq!(p, 3.0);
        let p = limit_prediction(1.0, 0.0, LatticePoint::new(2, 3), LatticePoint::new(1, 1));
        assert_eq!(p, 15.0);
    }

    #[test]
    fn asymptotic_kernels_are_exactly_the_prediction() {
        let u = uniformize(&JumpKernel::su3()).unwrap();
        let m = constant_c_unchecked(&u, 1.0, 0.0);
        let est = |i0, j0, i, j| {
            Ok(GreenEstimate {
                value: green_asymptotic(&m, i0, j0, i, j),
                abs_error: 0.0,
                method: Method::Asymptotic,
                meta: EstimateMeta::default(),
            })
        };
        let d = martin_limit_diagnostic_with(est, 1.0, 0.0, LatticePoint::new(2, 3), &MartinConfig::default()).unwrap();
        // Equal up to the rounding of one product and one quotient.
        assert!(d.table.iter().all(|r| (r.kernel - 15.0).abs() <= 4.0 * f64::EPSILON * 15.0));
    }

    #[test]
    fn unstable_denominator_is_an_error() {
        let g = |v: f64, e: f64| GreenEstimate {
            value: v,
            abs_error: e,
            method: Method::Contour,
            meta: EstimateMeta::default(),
        };
        assert!(matches!(
            martin_ratio(&g(1.0, 0.0), &g(1e-9, 1e-8)),
            Err(Error::DivisionInstability { .. })
        ));
        let (k, e) = martin_ratio(&g(2.0, 0.02), &g(1.0, 0.01)).unwrap();
        assert!((k - 2.0).abs() < 1e-15 && (e - 0.04).abs() < 1e-15);
    }

    #[test]
    fn direction_points() {
        assert_eq!(Direction::Slope(1.0).point(100), (71, 71));
        assert_eq!(Direction::FixedJ(2).point(25), (25, 2));
        assert_eq!(Direction::Slope(0.0).point(10), (10, 1));
    }
}
