use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

/// A tangent vector at a vertex, stored in that vertex's angle-normalized
/// polar coordinates: the modulus is a length, the argument a normalized
/// angle measured from the vertex's reference direction.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TangentVec(pub Complex64);

impl TangentVec {
    pub const ZERO: TangentVec = TangentVec(Complex64 { re: 0.0, im: 0.0 });

    pub fn from_polar(r: f64, angle: f64) -> Self {
        TangentVec(Complex64::from_polar(r, angle))
    }
    pub fn norm(self) -> f64 {
        self.0.norm()
    }
    /// Normalized angle in `[0, 2π)`.
    pub fn angle(self) -> f64 {
        crate::math::wrap_angle(self.0.arg())
    }
    pub fn rotated(self, rot: Complex64) -> Self {
        TangentVec(self.0 * rot)
    }
}

impl Add for TangentVec {
    type Output = TangentVec;
    fn add(self, o: Self) -> Self {
        TangentVec(self.0 + o.0)
    }
}
impl Sub for TangentVec {
    type Output = TangentVec;
    fn sub(self, o: Self) -> Self {
        TangentVec(self.0 - o.0)
    }
}
impl Mul<f64> for TangentVec {
    type Output = TangentVec;
    fn mul(self, s: f64) -> Self {
        TangentVec(self.0 * s)
    }
}
