//! Exact Gaussian-rational scalars, the coefficient field Q(i).
//!
//! Step-function weights and group-algebra coefficients never leave Q(i) in
//! this engine, so complex floats are banished in favour of exact pairs of
//! big rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// An element a + b*i of Q(i) with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn zero() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        GaussianRational::new(BigRational::one(), BigRational::zero())
    }

    pub fn i() -> Self {
        GaussianRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        GaussianRational::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    pub fn from_rational(r: BigRational) -> Self {
        GaussianRational::new(r, BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussianRational::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// True for -1 + 0*i; used by the renderer to fold signs.
    pub fn is_minus_one(&self) -> bool {
        self.im.is_zero() && self.re == -BigRational::one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of 0 in Q(i)".into()));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Ok(GaussianRational::new(&self.re / &norm, -&self.im / &norm))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.clone() * other.inv()?)
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> Self {
        GaussianRational::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> Self {
        let re = &self.re * &rhs.re - &self.im * &rhs.im;
        let im = &self.re * &rhs.im + &self.im * &rhs.re;
        GaussianRational::new(re, im)
    }
}

/// Renders a rational as `a` or `a/b` (denominator one is omitted by the
/// underlying `Ratio` display).
pub fn rat_to_string(r: &BigRational) -> String {
    format!("{}", r)
}

impl fmt::Display for GaussianRational {
    /// Canonical form: `a/b`, `c/d*i`, or `a/b+c/d*i` (with `-` folded in).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        let im_str = if self.im.is_one() {
            "i".to_string()
        } else if self.im == -BigRational::one() {
            "-i".to_string()
        } else {
            format!("{}*i", self.im)
        };
        if self.re.is_zero() {
            return write!(f, "{}", im_str);
        }
        if self.im.is_negative() {
            // im_str already starts with '-'
            write!(f, "{}{}", self.re, im_str)
        } else {
            write!(f, "{}+{}", self.re, im_str)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussianRational::from_ratio(1, 2);
        let b = GaussianRational::i();
        let c = a.clone() + b.clone();
        assert_eq!(format!("{}", c), "1/2+i");
        let d = c.clone() * c.clone().inv().unwrap();
        assert!(d.is_one());
        assert_eq!(format!("{}", b.clone() * b), "-1");
    }

    #[test]
    fn display_edge_cases() {
        assert_eq!(format!("{}", GaussianRational::zero()), "0");
        assert_eq!(format!("{}", GaussianRational::from_integer(-3)), "-3");
        let z = GaussianRational::new(
            BigRational::new(BigInt::from(1), BigInt::from(3)),
            BigRational::new(BigInt::from(-2), BigInt::from(5)),
        );
        assert_eq!(format!("{}", z), "1/3-2/5*i");
    }

    #[test]
    fn zero_inverse_rejected() {
        assert!(GaussianRational::zero().inv().is_err());
    }
}
