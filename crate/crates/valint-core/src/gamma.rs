//! Exact arithmetic in the value field C(Gamma) for Gamma = Z^r with the
//! lexicographic order.
//!
//! Elements are fractions of Laurent polynomials in X_1..X_r with
//! Gaussian-rational coefficients. Every integral computed by this crate
//! lands here. Equality is decided by cross-multiplication; no multivariate
//! gcd is performed beyond the monomial/content normalisation that pins the
//! canonical form.

use num_rational::BigRational;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::qi::GaussianRational;

// ---------------------------------------------------------------------------
// GroupElement
// ---------------------------------------------------------------------------

/// An element of the value group Z^r. Comparison is lexicographic with the
/// leftmost coordinate most significant (derived `Ord` on `Vec<i64>`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement(pub Vec<i64>);

impl GroupElement {
    pub fn zero(rank: usize) -> Self {
        GroupElement(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.rank(), other.rank());
        GroupElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.rank(), other.rank());
        GroupElement(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        GroupElement(self.0.iter().map(|&a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        GroupElement(self.0.iter().map(|&a| k * a).collect())
    }

    /// Lexicographic minimum with 0; the tie-break rule used by the shear
    /// case analysis.
    pub fn min_with_zero(&self) -> Self {
        let zero = GroupElement::zero(self.rank());
        if *self < zero { self.clone() } else { zero }
    }

    pub fn sum(elems: &[GroupElement], rank: usize) -> Self {
        elems
            .iter()
            .fold(GroupElement::zero(rank), |acc, g| acc.add(g))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

// ---------------------------------------------------------------------------
// LaurentPoly
// ---------------------------------------------------------------------------

/// A finite Gaussian-rational linear combination of monomials X^gamma.
/// Invariant: no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<GroupElement, GaussianRational>,
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        LaurentPoly::monomial(GaussianRational::one(), GroupElement::zero(rank))
    }

    pub fn monomial(c: GaussianRational, g: GroupElement) -> Self {
        let rank = g.rank();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(g, c);
        }
        LaurentPoly { rank, terms }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(g, c)| g.is_zero() && c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The lexicographically least term, if any.
    pub fn lex_least(&self) -> Option<(&GroupElement, &GaussianRational)> {
        self.terms.iter().next()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.rank, other.rank);
        let mut terms = self.terms.clone();
        for (g, c) in &other.terms {
            let entry = terms.entry(g.clone()).or_insert_with(GaussianRational::zero);
            *entry = entry.clone() + c.clone();
            if entry.is_zero() {
                terms.remove(g);
            }
        }
        LaurentPoly { rank: self.rank, terms }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(g, c)| (g.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.rank, other.rank);
        let mut terms: BTreeMap<GroupElement, GaussianRational> = BTreeMap::new();
        for (g1, c1) in &self.terms {
            for (g2, c2) in &other.terms {
                let g = g1.add(g2);
                let c = c1.clone() * c2.clone();
                let entry = terms.entry(g.clone()).or_insert_with(GaussianRational::zero);
                *entry = entry.clone() + c;
                if entry.is_zero() {
                    terms.remove(&g);
                }
            }
        }
        LaurentPoly { rank: self.rank, terms }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero(self.rank);
        }
        LaurentPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(g, k)| (g.clone(), k.clone() * c.clone()))
                .collect(),
        }
    }

    /// Multiplies by the monomial X^g.
    pub fn shift(&self, g: &GroupElement) -> Self {
        LaurentPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.add(g), c.clone()))
                .collect(),
        }
    }

    /// `Some((c, g))` when the polynomial is the single term c*X^g.
    pub fn as_monomial(&self) -> Option<(GaussianRational, GroupElement)> {
        if self.terms.len() == 1 {
            let (g, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), g.clone()))
        } else {
            None
        }
    }
}

fn monomial_string(g: &GroupElement) -> String {
    let rank = g.rank();
    if rank == 1 {
        let e = g.0[0];
        if e == 0 {
            String::new()
        } else if e == 1 {
            "X".to_string()
        } else {
            format!("X^{}", e)
        }
    } else {
        let mut parts = Vec::new();
        for (i, &e) in g.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if e == 1 {
                parts.push(format!("X{}", i + 1));
            } else {
                parts.push(format!("X{}^{}", i + 1, e));
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for LaurentPoly {
    /// Terms in ascending lex order of exponents; this rendering is the
    /// golden-file contract.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (g, c) in &self.terms {
            let mono = monomial_string(g);
            let term = if mono.is_empty() {
                format!("{}", c)
            } else if c.is_one() {
                mono
            } else if c.is_minus_one() {
                format!("-{}", mono)
            } else if c.is_real() {
                format!("{}*{}", c, mono)
            } else {
                format!("({})*{}", c, mono)
            };
            if first {
                write!(f, "{}", term)?;
                first = false;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", term)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// GammaValue
// ---------------------------------------------------------------------------

/// An element of C(Gamma) in canonical form: numerator and denominator are
/// both divided by the lex-least monomial of the denominator and by that
/// monomial's coefficient, so the denominator's lex-least term is 1*X^0.
///
/// Values are immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaValue {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl GammaValue {
    /// Builds num/den and canonicalises. The denominator must be nonzero.
    pub fn from_fraction(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("zero denominator in C(Gamma)".into()));
        }
        let mut v = GammaValue { num, den };
        v.canonicalize();
        Ok(v)
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPoly::one(self.den.rank());
            return;
        }
        let (g0, c0) = {
            let (g, c) = self.den.lex_least().expect("nonzero denominator");
            (g.clone(), c.clone())
        };
        let inv = c0.inv().expect("leading coefficient nonzero");
        let shift = g0.neg();
        self.num = self.num.shift(&shift).scale(&inv);
        self.den = self.den.shift(&shift).scale(&inv);
    }

    pub fn zero(rank: usize) -> Self {
        GammaValue { num: LaurentPoly::zero(rank), den: LaurentPoly::one(rank) }
    }

    pub fn one(rank: usize) -> Self {
        GammaValue { num: LaurentPoly::one(rank), den: LaurentPoly::one(rank) }
    }

    /// The monomial c*X^g.
    pub fn monomial(c: GaussianRational, g: GroupElement) -> Self {
        let rank = g.rank();
        GammaValue { num: LaurentPoly::monomial(c, g), den: LaurentPoly::one(rank) }
    }

    /// The basis monomial X^g.
    pub fn x_power(g: GroupElement) -> Self {
        GammaValue::monomial(GaussianRational::one(), g)
    }

    pub fn from_rational(rank: usize, r: BigRational) -> Self {
        GammaValue::monomial(GaussianRational::from_rational(r), GroupElement::zero(rank))
    }

    pub fn from_integer(rank: usize, n: i64) -> Self {
        GammaValue::monomial(GaussianRational::from_integer(n), GroupElement::zero(rank))
    }

    pub fn rank(&self) -> usize {
        self.num.rank()
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        GammaValue::from_fraction(num, den).expect("denominators nonzero")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GammaValue { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let num = self.num.mul(&other.num);
        let den = self.den.mul(&other.den);
        GammaValue::from_fraction(num, den).expect("denominators nonzero")
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of 0 in C(Gamma)".into()));
        }
        GammaValue::from_fraction(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn scale_rat(&self, r: &BigRational) -> Self {
        self.mul(&GammaValue::from_rational(self.rank(), r.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e >= 0 { self.clone() } else { self.inv()? };
        let mut k = e.unsigned_abs();
        let mut acc = GammaValue::one(self.rank());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Equality by cross-multiplication; independent of canonical form.
    pub fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// `Some((c, g))` when the value is exactly the monomial c*X^g.
    pub fn as_monomial(&self) -> Option<(GaussianRational, GroupElement)> {
        if self.den.is_one() {
            self.num.as_monomial()
        } else {
            // A non-trivial denominator can still hide a monomial; decide by
            // testing divisibility of single-term numerators only.
            None
        }
    }
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else if self.num.num_terms() <= 1 {
            write!(f, "{}/({})", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(e: i64) -> GroupElement {
        GroupElement(vec![e])
    }

    fn x_pow(e: i64) -> GammaValue {
        GammaValue::x_power(g1(e))
    }

    #[test]
    fn monomial_canonical_form() {
        // 1*X^0 is the identity of the group algebra.
        let one = GammaValue::monomial(GaussianRational::one(), g1(0));
        assert!(one.eq(&GammaValue::one(1)));
        assert_eq!(format!("{}", one), "1");

        // X^2 * X^-2 = 1.
        let prod = x_pow(2).mul(&x_pow(-2));
        assert!(prod.eq(&GammaValue::one(1)));

        // (2/3) X1 X2^-1 renders canonically at rank 2.
        let m = GammaValue::monomial(
            GaussianRational::from_ratio(2, 3),
            GroupElement(vec![1, -1]),
        );
        assert_eq!(format!("{}", m), "2/3*X1*X2^-1");
        assert!(m.den().is_one());
    }

    #[test]
    fn add_mul_inv_laws() {
        // (X - 1) + 1 = X
        let x = x_pow(1);
        let xm1 = x.sub(&GammaValue::one(1));
        assert!(xm1.add(&GammaValue::one(1)).eq(&x));

        // 1/(1-X) * (1-X) = 1
        let one_minus_x = GammaValue::one(1).sub(&x);
        let inv = one_minus_x.inv().unwrap();
        assert!(inv.mul(&one_minus_x).eq(&GammaValue::one(1)));
    }

    #[test]
    fn eq_by_cross_multiplication() {
        // X/(X^2) == 1/X, the cross-multiplication oracle: X*X == X^2*1.
        let lhs = x_pow(1).div(&x_pow(2)).unwrap();
        let rhs = GammaValue::one(1).div(&x_pow(1)).unwrap();
        let cross_left = x_pow(1).mul(&x_pow(1));
        let cross_right = x_pow(2).mul(&GammaValue::one(1));
        assert!(cross_left.eq(&cross_right));
        assert!(lhs.eq(&rhs));
    }

    #[test]
    fn as_monomial_decomposition() {
        let m = GammaValue::monomial(GaussianRational::from_integer(3), g1(2));
        let (c, g) = m.as_monomial().unwrap();
        assert_eq!(c, GaussianRational::from_integer(3));
        assert_eq!(g, g1(2));

        let s = x_pow(1).add(&GammaValue::one(1));
        assert!(s.as_monomial().is_none());

        let half = GammaValue::monomial(
            GaussianRational::from_ratio(1, 2),
            GroupElement(vec![-1, 3]),
        );
        let (c, g) = half.as_monomial().unwrap();
        assert_eq!(c, GaussianRational::from_ratio(1, 2));
        assert_eq!(g, GroupElement(vec![-1, 3]));
    }

    #[test]
    fn monomial_product_law() {
        let m1 = GammaValue::monomial(GaussianRational::from_ratio(2, 3), g1(1));
        let m2 = GammaValue::monomial(GaussianRational::from_ratio(3, 4), g1(-2));
        let (c, g) = m1.mul(&m2).as_monomial().unwrap();
        assert_eq!(c, GaussianRational::from_ratio(1, 2));
        assert_eq!(g, g1(-1));
    }

    #[test]
    fn canonical_idempotent() {
        let num = LaurentPoly::monomial(GaussianRational::from_integer(2), g1(-1))
            .add(&LaurentPoly::monomial(GaussianRational::from_integer(2), g1(3)));
        let den = LaurentPoly::monomial(GaussianRational::from_integer(4), g1(2));
        let v = GammaValue::from_fraction(num.clone(), den.clone()).unwrap();
        let v2 = GammaValue::from_fraction(v.num().clone(), v.den().clone()).unwrap();
        assert_eq!(v, v2);
        assert!(v.den().is_one());
    }

    #[test]
    fn display_fraction() {
        let num = LaurentPoly::one(1);
        let den = LaurentPoly::one(1).add(&LaurentPoly::monomial(
            -GaussianRational::one(),
            g1(1),
        ));
        let v = GammaValue::from_fraction(num, den).unwrap();
        assert_eq!(format!("{}", v), "1/(1 - X)");
    }
}
