//! Planar vectors for positions, velocities and headings.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at `angle` radians from the +x axis.
    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(angle.cos(), angle.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Direction of `self`; the zero vector maps to the zero vector.
    pub fn unit(self) -> Vec2 {
        self.norm_dir().1
    }

    /// Euclidean length and direction. A zero vector has no direction and
    /// yields `(0, (0, 0))`.
    pub fn norm_dir(self) -> (f64, Vec2) {
        let n = self.norm();
        if n > 0.0 {
            (n, Vec2::new(self.x / n, self.y / n))
        } else {
            (0.0, Vec2::ZERO)
        }
    }

    /// Heading angle in (−π, π].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// `self` rescaled so its length does not exceed `max_norm`.
    pub fn clamp_norm(self, max_norm: f64) -> Vec2 {
        let n = self.norm();
        if n > max_norm && n > 0.0 {
            self * (max_norm / n)
        } else {
            self
        }
    }
}

/// `c1·v1 + c2·v2`, the one linear-combination primitive the update rules
/// are built from. Addition, negation and scaling are special cases.
pub fn vec_combine(c1: f64, v1: Vec2, c2: f64, v2: Vec2) -> Result<Vec2> {
    if !(c1.is_finite() && c2.is_finite() && v1.is_finite() && v2.is_finite()) {
        return Err(Error::invalid(format!(
            "vec_combine needs finite inputs, got {c1}·{v1:?} + {c2}·{v2:?}"
        )));
    }
    Ok(Vec2::new(c1 * v1.x + c2 * v2.x, c1 * v1.y + c2 * v2.y))
}

/// Checked form of [`Vec2::norm_dir`].
pub fn vec_norm_dir(v: Vec2) -> Result<(f64, Vec2)> {
    if !v.is_finite() {
        return Err(Error::invalid(format!("non-finite vector {v:?}")));
    }
    Ok(v.norm_dir())
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, rhs: Vec2) -> Vec2 {
        rhs * self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn combine_examples() {
        let u = Vec2::new(4.0, 1.0);
        let v = Vec2::new(1.0, 2.0);
        assert_eq!(vec_combine(1.0, u, 1.0, v).unwrap(), Vec2::new(5.0, 3.0));
        assert_eq!(vec_combine(1.0, u, -1.0, v).unwrap(), Vec2::new(3.0, -1.0));
        assert_eq!(vec_combine(1.0, u, 0.0, Vec2::new(9.0, -9.0)).unwrap(), u);
        assert_eq!(vec_combine(0.5, u, 0.5, v).unwrap(), Vec2::new(2.5, 1.5));
    }

    #[test]
    fn combine_rejects_non_finite() {
        let u = Vec2::new(4.0, 1.0);
        assert!(vec_combine(f64::NAN, u, 1.0, u).is_err());
        assert!(vec_combine(1.0, u, 1.0, Vec2::new(f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn norm_dir_examples() {
        assert_eq!(
            vec_norm_dir(Vec2::new(3.0, 4.0)).unwrap(),
            (5.0, Vec2::new(0.6, 0.8))
        );
        assert_eq!(vec_norm_dir(Vec2::ZERO).unwrap(), (0.0, Vec2::ZERO));
        assert_eq!(
            vec_norm_dir(Vec2::new(0.0, 7.0)).unwrap(),
            (7.0, Vec2::new(0.0, 1.0))
        );
        assert!(vec_norm_dir(Vec2::new(f64::NAN, 0.0)).is_err());
    }

    fn vec2() -> impl Strategy<Value = Vec2> {
        (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y)| Vec2::new(x, y))
    }

    fn small_vec2() -> impl Strategy<Value = Vec2> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(x, y)| Vec2::new(x, y))
    }

    proptest! {
        #[test]
        fn combine_is_linear_in_first_coefficient(
            c1 in -1.0..1.0f64, c1b in -1.0..1.0f64, c2 in -1.0..1.0f64,
            v in small_vec2(), w in small_vec2(),
        ) {
            let lhs = vec_combine(c1 + c1b, v, c2, w).unwrap();
            let rhs = vec_combine(c1, v, c2, w).unwrap() + v * c1b;
            prop_assert!((lhs.x - rhs.x).abs() <= 1e-12);
            prop_assert!((lhs.y - rhs.y).abs() <= 1e-12);
        }

        #[test]
        fn triangle_inequality(v in vec2(), w in vec2()) {
            let sum = vec_combine(1.0, v, 1.0, w).unwrap();
            prop_assert!(sum.norm() <= v.norm() + w.norm() + 1e-12);
        }

        #[test]
        fn unit_has_norm_one(v in vec2()) {
            prop_assume!(v.norm() > 1e-9);
            prop_assert!((v.unit().norm() - 1.0).abs() < 1e-12);
        }
    }
}
