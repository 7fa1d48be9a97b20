//! The kernel polynomial `Q(x, y) = x y [Σ p(i,j) xⁱ yʲ − 1]`, its coefficient
//! polynomials, the discriminants `d` and `d̃`, and their branch points.

use num_complex::Complex64;

use crate::walk::JumpKernel;
use crate::{Error, Result};

/// Below this magnitude the leading coefficient of a discriminant is taken to
/// be zero and the outer branch point sits at infinity.
pub const INFINITY_TOL: f64 = 1e-14;

/// `c2 t² + c1 t + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadratic {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl Quadratic {
    pub const fn new(c2: f64, c1: f64, c0: f64) -> Self {
        Self { c2, c1, c0 }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.c2 * t + self.c1) * t + self.c0
    }

    #[inline]
    pub fn eval_c(&self, t: Complex64) -> Complex64 {
        (t * self.c2 + self.c1) * t + self.c0
    }

    fn mul(&self, other: &Quadratic) -> Quartic {
        Quartic([
            self.c0 * other.c0,
            self.c0 * other.c1 + self.c1 * other.c0,
            self.c0 * other.c2 + self.c1 * other.c1 + self.c2 * other.c0,
            self.c1 * other.c2 + self.c2 * other.c1,
            self.c2 * other.c2,
        ])
    }
}

/// Polynomial of degree at most four, coefficients in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quartic(pub [f64; 5]);

impl Quartic {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn derivative_at(&self, t: f64) -> f64 {
        let c = &self.0;
        ((4.0 * c[4] * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| *c != 0.0)
    }
}

/// `Q = a(x) y² + b(x) y + c(x) = ã(y) x² + b̃(y) x + c̃(y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePolynomials {
    pub a: Quadratic,
    pub b: Quadratic,
    pub c: Quadratic,
    pub at: Quadratic,
    pub bt: Quadratic,
    pub ct: Quadratic,
}

impl CurvePolynomials {
    pub fn new(k: &JumpKernel) -> Self {
        let p = |i, j| k.p(i, j);
        Self {
            a: Quadratic::new(p(1, 1), p(0, 1), p(-1, 1)),
            b: Quadratic::new(p(1, 0), -1.0, p(-1, 0)),
            c: Quadratic::new(p(1, -1), p(0, -1), p(-1, -1)),
            at: Quadratic::new(p(1, 1), p(1, 0), p(1, -1)),
            bt: Quadratic::new(p(0, 1), -1.0, p(0, -1)),
            ct: Quadratic::new(p(-1, 1), p(-1, 0), p(-1, -1)),
        }
    }

    /// `a(x) y² + b(x) y + c(x)`.
    pub fn q_by_y(&self, x: Complex64, y: Complex64) -> Complex64 {
        (self.a.eval_c(x) * y + self.b.eval_c(x)) * y + self.c.eval_c(x)
    }

    /// `ã(y) x² + b̃(y) x + c̃(y)`.
    pub fn q_by_x(&self, x: Complex64, y: Complex64) -> Complex64 {
        (self.at.eval_c(y) * x + self.bt.eval_c(y)) * x + self.ct.eval_c(y)
    }

    /// `∂Q/∂y = 2 a(x) y + b(x)`.
    #[inline]
    pub fn dq_dy(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.a.eval_c(x) * y * 2.0 + self.b.eval_c(x)
    }

    /// `d(x) = b(x)² − 4 a(x) c(x)`.
    pub fn discriminant_x(&self) -> Quartic {
        discriminant(&self.a, &self.b, &self.c)
    }

    /// `d̃(y) = b̃(y)² − 4 ã(y) c̃(y)`.
    pub fn discriminant_y(&self) -> Quartic {
        discriminant(&self.at, &self.bt, &self.ct)
    }
}

fn discriminant(a: &Quadratic, b: &Quadratic, c: &Quadratic) -> Quartic {
    let bb = b.mul(b);
    let ac = a.mul(c);
    let mut out = [0.0; 5];
    for (o, (x, y)) in out.iter_mut().zip(bb.0.iter().zip(ac.0.iter())) {
        *o = x - 4.0 * y;
    }
    Quartic(out)
}

/// `Q(x, y) = x y [Σ p(i,j) xⁱ yʲ − 1]`, evaluated without dividing by `x` or `y`.
pub fn q_eval(k: &JumpKernel, x: Complex64, y: Complex64) -> Complex64 {
    let xs = [Complex64::new(1.0, 0.0), x, x * x];
    let ys = [Complex64::new(1.0, 0.0), y, y * y];
    let mut acc = -x * y;
    for (di, dj, p) in k.steps() {
        if p != 0.0 {
            acc += xs[(di + 1) as usize] * ys[(dj + 1) as usize] * p;
        }
    }
    acc
}

pub fn discriminant_d(k: &JumpKernel) -> Quartic {
    CurvePolynomials::new(k).discriminant_x()
}

pub fn discriminant_dt(k: &JumpKernel) -> Quartic {
    CurvePolynomials::new(k).discriminant_y()
}

/// A real number or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn finite(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }
}

/// Branch points of one projection: the simple root `inner ∈ (−1, 1)` and the
/// simple root `outer ∈ ℝ ∪ {∞} ∖ [−1, 1]` of a discriminant, besides its double
/// root at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPair {
    pub inner: f64,
    pub outer: ExtendedReal,
    /// Leading coefficient of the discriminant (`p₁₀² − 4p₁₁p₁,₋₁` for `d`).
    pub leading: f64,
    /// The discriminant divided by `(t − 1)²`; its `c2` is exactly zero when
    /// `outer` is infinite.
    pub deflated: Quadratic,
}

impl BranchPair {
    fn from_discriminant(d: &Quartic) -> Result<Self> {
        let [e0, e1, _, e3, e4] = d.0;
        let leading = e4;
        // Quotient by (t − 1)²; the two redundant equations are averaged.
        let c2 = if e4.abs() <= INFINITY_TOL { 0.0 } else { e4 };
        let c1 = 0.5 * ((e3 + 2.0 * e4) + (e1 + 2.0 * e0));
        let c0 = e0;
        let deflated = Quadratic::new(c2, c1, c0);

        if c2 == 0.0 {
            if c1 == 0.0 {
                return Err(Error::DegenerateCurve("deflated discriminant has no finite root"));
            }
            let inner = -c0 / c1;
            if inner.abs() >= 1.0 {
                return Err(Error::DegenerateCurve("inner branch point outside (-1, 1)"));
            }
            return Ok(Self {
                inner,
                outer: ExtendedReal::Infinity,
                leading,
                deflated,
            });
        }

        let delta = c1 * c1 - 4.0 * c2 * c0;
        if delta < 0.0 {
            return Err(Error::DegenerateCurve("complex branch points"));
        }
        let t = -0.5 * (c1 + c1.signum() * delta.sqrt());
        if t == 0.0 {
            return Err(Error::DegenerateCurve("deflated discriminant has a double root at 0"));
        }
        let (r1, r2) = (t / c2, c0 / t);
        let (inner, outer) = if r1.abs() <= r2.abs() { (r1, r2) } else { (r2, r1) };
        if inner.abs() >= 1.0 || outer.abs() <= 1.0 {
            return Err(Error::DegenerateCurve("branch points not separated by the unit interval"));
        }
        Ok(Self {
            inner,
            outer: ExtendedReal::Finite(outer),
            leading,
            deflated,
        })
    }

    /// `leading · (outer − inner)`, finite in all cases.
    pub fn scaled_gap(&self) -> f64 {
        let q = &self.deflated;
        -q.c1 - 2.0 * q.c2 * self.inner
    }

    /// `z₀ + 1/z₀` (resp. `z₂ + 1/z₂`): `2(2 − x₁ − x₄)/(x₄ − x₁)`.
    pub fn pole_sum(&self) -> f64 {
        let q = &self.deflated;
        2.0 * (2.0 * q.c2 + q.c1) / self.scaled_gap()
    }

    /// `z₁ + 1/z₁` (resp. `z₃ + 1/z₃`): `2(x₁ + x₄ − 2x₁x₄)/(x₄ − x₁)`.
    pub fn zero_sum(&self) -> f64 {
        let q = &self.deflated;
        2.0 * (-q.c1 - 2.0 * q.c0) / self.scaled_gap()
    }

    /// `4(x₄ − 1)(x₁ − 1)/(x₄ − x₁)`, with the limit `4(x₁ − 1)` when `x₄ = ∞`.
    pub fn omega(&self) -> f64 {
        match self.outer {
            ExtendedReal::Finite(x4) => 4.0 * (x4 - 1.0) * (self.inner - 1.0) / (x4 - self.inner),
            ExtendedReal::Infinity => 4.0 * (self.inner - 1.0),
        }
    }

    /// `|z₀ − 1/z₀| / |leading|^{1/2}`, finite in all cases.
    pub fn gap_over_root_leading(&self) -> f64 {
        let q = &self.deflated;
        let n = q.c2 + q.c1 + q.c2 * self.inner;
        4.0 * ((1.0 - self.inner) * n.abs()).sqrt() / self.scaled_gap().abs()
    }

    /// Whether `v` lies on the cut `[inner, outer]` of the extended real line
    /// (wrapping through infinity when `outer < 0`).
    pub fn on_cut(&self, v: f64, tol: f64) -> bool {
        match self.outer {
            ExtendedReal::Infinity => v >= self.inner - tol,
            ExtendedReal::Finite(o) if o > 0.0 => v >= self.inner - tol && v <= o + tol,
            ExtendedReal::Finite(o) => v >= self.inner - tol || v <= o + tol,
        }
    }
}

/// Branch points `x₁, x₄` of `d` and `y₁, y₄` of `d̃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoints {
    pub x: BranchPair,
    pub y: BranchPair,
}

impl BranchPoints {
    pub fn x1(&self) -> f64 {
        self.x.inner
    }
    pub fn x4(&self) -> ExtendedReal {
        self.x.outer
    }
    pub fn y1(&self) -> f64 {
        self.y.inner
    }
    pub fn y4(&self) -> ExtendedReal {
        self.y.outer
    }
    /// `p₁₀² − 4p₁₁p₁,₋₁`.
    pub fn disc_x(&self) -> f64 {
        self.x.leading
    }
    /// `p₀₁² − 4p₁₁p₋₁,₁`.
    pub fn disc_y(&self) -> f64 {
        self.y.leading
    }
}

/// Extracts the branch points by deflating the structural double root at 1.
pub fn branch_points(k: &JumpKernel) -> Result<BranchPoints> {
    let polys = CurvePolynomials::new(k);
    Ok(BranchPoints {
        x: BranchPair::from_discriminant(&polys.discriminant_x())?,
        y: BranchPair::from_discriminant(&polys.discriminant_y())?,
    })
}
