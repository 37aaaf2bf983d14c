//! Planar vectors used for positions and velocities.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

/// A 2-D vector: a position in metres or a velocity in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Unit vector at `angle` radians from the +x axis.
    pub fn from_angle(angle: T) -> Self {
        Self::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    /// Angle from the +x axis, in radians.
    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    /// Unit vector along `self`, or `None` for a zero-length vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self * n.recip())
        } else {
            None
        }
    }

    pub fn cast<U: Real>(self) -> Vec2<U> {
        Vec2::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Real> Add for Vec2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

impl<T: Real> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Solves the symmetric 2x2 system `[a b; b c] x = r`.
///
/// Returns `None` when the determinant is small relative to the matrix
/// scale, which signals rank-deficient geometry.
pub(crate) fn solve_sym2<T: Real>(a: T, b: T, c: T, r: Vec2<T>, rel_tol: T) -> Option<Vec2<T>> {
    let det = a * c - b * b;
    let scale = (a * a + T::lit(2.0) * b * b + c * c).sqrt();
    if !(det.abs() > rel_tol * scale * scale) {
        return None;
    }
    Some(Vec2::new((c * r.x - b * r.y) / det, (a * r.y - b * r.x) / det))
}
