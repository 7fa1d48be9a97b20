//! Points of the Riemann sphere and Möbius maps acting on them.

use core::ops::Mul;

use num_complex::Complex64;

/// A point of `ℂ ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            SpherePoint::Finite(z) => Some(*z),
            SpherePoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Chordal distance on the unit sphere, in `[0, 2]`.
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        match (self, other) {
            (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
            (SpherePoint::Finite(z), SpherePoint::Infinity)
            | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

/// `z ↦ (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::new(o, z, z, o)
    }

    /// `z ↦ k / z`.
    pub fn inversion(k: Complex64) -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::new(z, k, o, z)
    }

    /// Applies the map to a finite point; poles give a non-finite value.
    #[inline]
    pub fn apply(&self, z: Complex64) -> Complex64 {
        if self.c == Complex64::new(0.0, 0.0) {
            return (self.a * z + self.b) / self.d;
        }
        let den = self.c * z + self.d;
        if den == Complex64::new(0.0, 0.0) {
            return Complex64::new(f64::INFINITY, f64::INFINITY);
        }
        (self.a * z + self.b) / den
    }

    pub fn apply_sphere(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        Mobius::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }
}

impl Mul for Mobius {
    type Output = Mobius;

    fn mul(self, rhs: Mobius) -> Mobius {
        self.compose(&rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inversion_is_an_involution_on_the_sphere() {
        let xi = Mobius::inversion(Complex64::new(1.0, 0.0));
        let z = SpherePoint::Finite(Complex64::new(0.3, -1.7));
        let back = xi.apply_sphere(xi.apply_sphere(z));
        assert!(back.chordal_distance(&z) < 1e-15);
        assert_eq!(xi.apply_sphere(SpherePoint::Finite(Complex64::new(0.0, 0.0))), SpherePoint::Infinity);
        assert_eq!(xi.apply_sphere(SpherePoint::Infinity), SpherePoint::Finite(Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let f = Mobius::new(
            Complex64::new(1.0, 2.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(-1.0, 0.3),
            Complex64::new(2.0, -1.0),
        );
        let g = Mobius::inversion(Complex64::new(0.0, 1.0));
        let z = Complex64::new(0.7, 0.2);
        let lhs = (f * g).apply(z);
        let rhs = f.apply(g.apply(z));
        assert!((lhs - rhs).norm() < 1e-14);
    }
}
