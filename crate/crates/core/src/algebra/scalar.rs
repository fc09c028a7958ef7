//! Paracomplex scalars `x + εy` with `ε² = 1`.
//!
//! Values are stored in the `(1, ε)` basis. The canonical coordinates
//! `(z₊, z₋) = (x + y, x − y)` are the coefficients on the idempotents
//! `e₊ = (1 + ε)/2` and `e₋ = (1 − ε)/2`, and multiplication in those
//! coordinates is componentwise. [`Paracomplex::to_canonical`] and
//! [`Paracomplex::from_canonical`] make that isomorphism with `ℝ ⊕ ℝ`
//! explicit rather than hiding it in the storage format.
//!
//! The type is generic so the algebra laws can be checked exactly with
//! rationals:
//!
//! ```
//! use num_rational::Rational64;
//! use paraflat::algebra::Paracomplex;
//!
//! let ep = Paracomplex::<Rational64>::e_plus();
//! let em = Paracomplex::<Rational64>::e_minus();
//! assert_eq!(ep * ep, ep);
//! assert_eq!(ep * em, Paracomplex::zero());
//! assert_eq!(ep - em, Paracomplex::epsilon());
//! ```

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{Num, Signed};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Paracomplex<T> {
    /// Coefficient of `1`.
    pub x: T,
    /// Coefficient of `ε`.
    pub y: T,
}

/// Floating-point paracomplex scalar.
pub type Para64 = Paracomplex<f64>;

impl<T> Paracomplex<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }
}

impl<T: Num + Clone> Paracomplex<T> {
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn real(x: T) -> Self {
        Self::new(x, T::zero())
    }

    pub fn epsilon() -> Self {
        Self::new(T::zero(), T::one())
    }

    fn half() -> T {
        T::one() / (T::one() + T::one())
    }

    /// `e₊ = (1 + ε)/2`.
    pub fn e_plus() -> Self {
        Self::new(Self::half(), Self::half())
    }

    /// `e₋ = (1 − ε)/2`.
    pub fn e_minus() -> Self {
        let h = Self::half();
        Self::new(h.clone(), T::zero() - h)
    }

    /// Coefficients `(z₊, z₋)` on `(e₊, e₋)`.
    pub fn to_canonical(&self) -> (T, T) {
        (
            self.x.clone() + self.y.clone(),
            self.x.clone() - self.y.clone(),
        )
    }

    pub fn from_canonical(z_plus: T, z_minus: T) -> Self {
        let h = Self::half();
        Self::new(
            (z_plus.clone() + z_minus.clone()) * h.clone(),
            (z_plus - z_minus) * h,
        )
    }

    /// `ε ↦ −ε`. Swaps the canonical coordinates.
    pub fn conj(&self) -> Self {
        Self::new(self.x.clone(), T::zero() - self.y.clone())
    }

    /// `z z̄ = x² − y² = z₊ z₋`.
    pub fn modulus_sq(&self) -> T {
        self.x.clone() * self.x.clone() - self.y.clone() * self.y.clone()
    }

    /// Multiplicative inverse, `None` on the light cone `z₊ z₋ = 0`.
    pub fn checked_inv(&self) -> Option<Self> {
        let m = self.modulus_sq();
        if m.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(Self::new(c.x / m.clone(), c.y / m))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x.clone() * s.clone(), self.y.clone() * s)
    }
}

impl<T: Num + Clone + Signed + PartialOrd> Paracomplex<T> {
    /// Max-norm of the `(x, y)` coefficients.
    pub fn abs_max(&self) -> T {
        let (a, b) = (self.x.abs(), self.y.abs());
        if a > b {
            a
        } else {
            b
        }
    }
}

impl<T: Num + Clone> Add for Paracomplex<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Num + Clone> Sub for Paracomplex<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Num + Clone> Neg for Paracomplex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(T::zero() - self.x, T::zero() - self.y)
    }
}

impl<T: Num + Clone> Mul for Paracomplex<T> {
    type Output = Self;
    // (x₁ + εy₁)(x₂ + εy₂) = (x₁x₂ + y₁y₂) + ε(x₁y₂ + x₂y₁)
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.x.clone() * rhs.x.clone() + self.y.clone() * rhs.y.clone(),
            self.x * rhs.y + rhs.x * self.y,
        )
    }
}

impl<T: Num + Clone> AddAssign for Paracomplex<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.clone() + rhs;
    }
}

impl<T: Num + Clone> SubAssign for Paracomplex<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = self.clone() - rhs;
    }
}

impl<T: Num + Clone> MulAssign for Paracomplex<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.clone() * rhs;
    }
}

/// Free-function form of the product.
pub fn multiply<T: Num + Clone>(a: Paracomplex<T>, b: Paracomplex<T>) -> Paracomplex<T> {
    a * b
}

/// Canonical coordinates of `a`.
pub fn to_canonical<T: Num + Clone>(a: &Paracomplex<T>) -> (T, T) {
    a.to_canonical()
}

pub fn from_canonical<T: Num + Clone>(z_plus: T, z_minus: T) -> Paracomplex<T> {
    Paracomplex::from_canonical(z_plus, z_minus)
}

impl<T: fmt::Display + Signed> fmt::Display for Paracomplex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_negative() {
            write!(f, "{} - {}ε", self.x, self.y.abs())
        } else {
            write!(f, "{} + {}ε", self.x, self.y)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    type Q = Paracomplex<Rational64>;

    fn q(x: i64, y: i64) -> Q {
        Q::new(Rational64::from_integer(x), Rational64::from_integer(y))
    }

    #[test]
    fn product_examples() {
        assert_eq!(q(1, 1) * q(1, -1), Q::zero());
        assert_eq!(Q::one() * q(3, -7), q(3, -7));
        assert_eq!(Q::epsilon() * Q::epsilon(), Q::one());
    }

    #[test]
    fn canonical_examples() {
        let r = Rational64::from_integer;
        assert_eq!(Q::one().to_canonical(), (r(1), r(1)));
        assert_eq!(Q::epsilon().to_canonical(), (r(1), r(-1)));
        assert_eq!(q(3, 2).to_canonical(), (r(5), r(1)));
        assert_eq!(Q::from_canonical(r(5), r(1)), q(3, 2));
    }

    #[test]
    fn idempotent_relations_exact() {
        let (ep, em) = (Q::e_plus(), Q::e_minus());
        assert_eq!(ep * ep, ep);
        assert_eq!(em * em, em);
        assert_eq!(ep * em, Q::zero());
        assert_eq!(ep + em, Q::one());
        // e₊ − e₋ = ε follows from the definitions of e±.
        assert_eq!(ep - em, Q::epsilon());
        assert_eq!(em - ep, -Q::epsilon());
    }

    #[test]
    fn conjugation_swaps_idempotents() {
        assert_eq!(Q::e_plus().conj(), Q::e_minus());
        let (zp, zm) = q(4, 9).to_canonical();
        assert_eq!(q(4, 9).conj().to_canonical(), (zm, zp));
    }

    #[test]
    fn inverse_off_light_cone() {
        let a = Para64::new(3.0, 1.0);
        let inv = a.checked_inv().unwrap();
        let p = a * inv;
        assert!((p.x - 1.0).abs() < 1e-15 && p.y.abs() < 1e-15);
        assert!(Para64::new(1.0, 1.0).checked_inv().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(Para64::new(1.0, -2.0).to_string(), "1 - 2ε");
        assert_eq!(Para64::new(0.5, 0.5).to_string(), "0.5 + 0.5ε");
    }
}
