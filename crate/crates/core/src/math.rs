//! Scalar helpers and small planar geometry used by layouts and tracking.

use core::ops::{Add, Mul, Sub};

pub use core::f64::consts::TAU;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Relative slack used for the strict triangle inequality.
pub const TRIANGLE_SLACK: f64 = 1e-10;

/// `true` when the three lengths form a non-degenerate triangle.
#[inline]
pub fn triangle_valid(a: f64, b: f64, c: f64) -> bool {
    let m = a.max(b).max(c);
    let eps = TRIANGLE_SLACK * m;
    a > 0.0 && b > 0.0 && c > 0.0 && a + b - c > eps && b + c - a > eps && c + a - b > eps
}

/// Angle opposite to `opp` in a triangle with sides `opp`, `b`, `c`, by
/// Kahan's formula (accurate for needle-like triangles). Degenerate inputs
/// give 0 or π.
#[inline]
pub fn corner_angle(opp: f64, b: f64, c: f64) -> f64 {
    let (a, b) = if b >= c { (b, c) } else { (c, b) };
    let mu = if b >= opp { opp - (a - b) } else { b - (a - opp) };
    let num = ((a - b) + opp) * mu;
    let den = (a + (b + opp)) * ((a - opp) + b);
    if num <= 0.0 {
        return 0.0;
    }
    if den <= 0.0 {
        return core::f64::consts::PI;
    }
    2.0 * libm::atan(sqrt(num / den))
}

/// Heron's formula in its numerically stable form.
pub fn triangle_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * sqrt(p.max(0.0))
}

/// Cotangent of the angle opposite `opp`, from lengths only.
pub fn cot_from_lengths(opp: f64, b: f64, c: f64) -> f64 {
    let area = triangle_area(opp, b, c);
    (b * b + c * c - opp * opp) / (4.0 * area)
}

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    let r = a % TAU;
    if r < 0.0 {
        let w = r + TAU;
        if w >= TAU {
            0.0
        } else {
            w
        }
    } else {
        r
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }
    #[inline]
    pub fn from_polar(r: f64, angle: f64) -> Self {
        Vec2::new(r * cos(angle), r * sin(angle))
    }
    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }
    #[inline]
    pub fn norm(self) -> f64 {
        hypot(self.x, self.y)
    }
    #[inline]
    pub fn arg(self) -> f64 {
        atan2(self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}
impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}
impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// Places the apex of a triangle with base `p0 -> p1`, on the left side,
/// at distance `r0` from `p0` and `r1` from `p1`.
pub fn place_apex(p0: Vec2, p1: Vec2, r0: f64, r1: f64) -> Vec2 {
    let base = p1 - p0;
    let d = base.norm();
    let ex = base * (1.0 / d);
    let ey = Vec2::new(-ex.y, ex.x);
    let x = (d * d + r0 * r0 - r1 * r1) / (2.0 * d);
    let y = sqrt((r0 * r0 - x * x).max(0.0));
    p0 + ex * x + ey * y
}

/// Twice the signed area of `(a, b, c)`; positive for counter-clockwise.
#[inline]
pub fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

/// Barycentric coordinates of `p` in triangle `t`, computed from the three
/// edge determinants. Returns the raw (unclamped) coordinates.
pub fn barycentric(p: Vec2, t: [Vec2; 3]) -> [f64; 3] {
    let d0 = orient(p, t[1], t[2]);
    let d1 = orient(p, t[2], t[0]);
    let d2 = orient(p, t[0], t[1]);
    let s = d0 + d1 + d2;
    [d0 / s, d1 / s, d2 / s]
}

/// Clamps tiny negative coordinates and renormalizes to sum one.
pub fn clamp_barycentric(b: [f64; 3]) -> [f64; 3] {
    let c = [b[0].max(0.0), b[1].max(0.0), b[2].max(0.0)];
    let s = c[0] + c[1] + c[2];
    if s > 0.0 {
        [c[0] / s, c[1] / s, c[2] / s]
    } else {
        [1.0 / 3.0; 3]
    }
}
