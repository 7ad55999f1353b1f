//! Exact, precision-tracked arithmetic in the residue local field K, and the
//! ball/coset geometry its step functions are built from.
//!
//! K is either Q_p (digit expansions in powers of p) or F_p((u)) (Laurent
//! expansions in u). Values carry one of two representations:
//!
//! * an exact closed form (a rational number, resp. a rational function of
//!   u), on which every operation is exact; or
//! * a truncated digit expansion with an explicit precision bound, on which
//!   operations propagate the largest justified precision and fail fast when
//!   a result is not determined by its inputs.
//!
//! Ball centres are always canonical exact values with finitely many digits
//! below the ball depth, so coset geometry is exact. The Haar measure is
//! normalised by mu(O_K) = 1.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Field specification
// ---------------------------------------------------------------------------

/// Which concrete local field is in play.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KKind {
    /// Q_p with uniformizer p.
    PAdic,
    /// F_p((u)) with uniformizer u.
    LaurentFF,
}

/// Residue-field model: the prime and the default number of significant
/// digits for truncated literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalFieldSpec {
    pub kind: KKind,
    pub p: u32,
    pub default_precision: usize,
}

impl LocalFieldSpec {
    pub fn padic(p: u32, default_precision: usize) -> Self {
        assert!(is_prime(p), "p must be prime");
        assert!(default_precision >= 1);
        LocalFieldSpec { kind: KKind::PAdic, p, default_precision }
    }

    pub fn laurent_ff(p: u32, default_precision: usize) -> Self {
        assert!(is_prime(p), "p must be prime");
        assert!(default_precision >= 1);
        LocalFieldSpec { kind: KKind::LaurentFF, p, default_precision }
    }

    /// p^k as an exact rational (k may be negative).
    pub fn p_pow(&self, k: i64) -> BigRational {
        let base = BigInt::from(self.p);
        if k >= 0 {
            BigRational::from_integer(base.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), base.pow((-k) as u32))
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // Fermat; p is prime and a is nonzero mod p.
    let mut result = 1u64;
    let mut base = (a % p) as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

// ---------------------------------------------------------------------------
// F_p[u] polynomials (exact closed forms for the Laurent field)
// ---------------------------------------------------------------------------

/// Little-endian coefficient vector over F_p, no trailing (high-degree)
/// zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    p: u32,
    c: Vec<u32>,
}

impl FpPoly {
    pub fn zero(p: u32) -> Self {
        FpPoly { p, c: Vec::new() }
    }

    pub fn one(p: u32) -> Self {
        FpPoly { p, c: vec![1] }
    }

    pub fn from_coeffs(p: u32, mut c: Vec<u32>) -> Self {
        for d in c.iter_mut() {
            *d %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FpPoly { p, c }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn deg(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.c.len() - 1
    }

    /// Index of the lowest nonzero coefficient.
    pub fn low(&self) -> usize {
        debug_assert!(!self.is_zero());
        self.c.iter().position(|&d| d != 0).unwrap()
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.c.len().max(other.c.len());
        let mut c = vec![0u32; n];
        for (i, d) in c.iter_mut().enumerate() {
            *d = (self.coeff(i) + other.coeff(i)) % self.p;
        }
        FpPoly::from_coeffs(self.p, c)
    }

    pub fn neg(&self) -> Self {
        FpPoly::from_coeffs(self.p, self.c.iter().map(|&d| (self.p - d) % self.p).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return FpPoly::zero(self.p);
        }
        let mut c = vec![0u64; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] = (c[i + j] + a as u64 * b as u64) % self.p as u64;
            }
        }
        FpPoly::from_coeffs(self.p, c.into_iter().map(|d| d as u32).collect())
    }

    pub fn scale(&self, k: u32) -> Self {
        FpPoly::from_coeffs(
            self.p,
            self.c.iter().map(|&d| (d as u64 * k as u64 % self.p as u64) as u32).collect(),
        )
    }

    /// Multiplies by u^k.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![0u32; k];
        c.extend_from_slice(&self.c);
        FpPoly { p: self.p, c }
    }

    /// Euclidean division (quotient, remainder) by a nonzero divisor.
    pub fn divmod(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero());
        let p = self.p;
        let mut r = self.c.clone();
        let dd = d.deg();
        let lead_inv = mod_inverse(d.c[dd], p);
        let mut q = vec![0u32; self.c.len().saturating_sub(dd)];
        while r.len() >= dd + 1 {
            let k = r.len() - 1;
            let coef = (r[k] as u64 * lead_inv as u64 % p as u64) as u32;
            if coef != 0 {
                let shift = k - dd;
                q[shift] = coef;
                for (i, &dc) in d.c.iter().enumerate() {
                    let sub = coef as u64 * dc as u64 % p as u64;
                    r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
            if r.len() < dd + 1 {
                break;
            }
        }
        (FpPoly::from_coeffs(p, q), FpPoly::from_coeffs(p, r))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let inv = mod_inverse(a.c[a.deg()], a.p);
            a.scale(inv)
        }
    }

    /// First k coefficients of the power-series quotient self/den, where den
    /// has nonzero constant term.
    pub fn series_quotient(&self, den: &Self, k: usize) -> Vec<u32> {
        assert!(den.coeff(0) != 0);
        let p = self.p as u64;
        let d0inv = mod_inverse(den.coeff(0), self.p) as u64;
        let mut out = vec![0u32; k];
        for i in 0..k {
            let mut acc = self.coeff(i) as u64 % p;
            for j in 1..=i {
                let sub = den.coeff(j) as u64 * out[i - j] as u64 % p;
                acc = (acc + p - sub) % p;
            }
            out[i] = (acc * d0inv % p) as u32;
        }
        out
    }
}

impl fmt::Display for FpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &d) in self.c.iter().enumerate() {
            if d == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (d, i) {
                (_, 0) => write!(f, "{}", d)?,
                (1, 1) => write!(f, "u")?,
                (_, 1) => write!(f, "{}*u", d)?,
                (1, _) => write!(f, "u^{}", i)?,
                _ => write!(f, "{}*u^{}", d, i)?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// KElem
// ---------------------------------------------------------------------------

/// Valuation of a residue-field element: finite, or +infinity for exact 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KVal {
    Finite(i64),
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum KRepr {
    /// Exact rational in Q_p.
    QExact(BigRational),
    /// Exact rational function num/den in F_p((u)); canonical: gcd-reduced,
    /// den monic and nonzero.
    RExact { num: FpPoly, den: FpPoly },
    /// Digit window: value = sum digits[i]*pi^(val+i) + O(pi^prec), with
    /// digits[0] != 0 when nonempty, trailing zeros stripped, and
    /// val + digits.len() <= prec. Empty digits mean "zero to precision".
    Approx { val: i64, digits: Vec<u32>, prec: i64 },
}

/// An element of the residue local field K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KElem {
    spec: LocalFieldSpec,
    repr: KRepr,
}

impl KElem {
    // -- constructors -------------------------------------------------------

    pub fn zero(spec: LocalFieldSpec) -> Self {
        match spec.kind {
            KKind::PAdic => KElem { spec, repr: KRepr::QExact(BigRational::zero()) },
            KKind::LaurentFF => KElem {
                spec,
                repr: KRepr::RExact { num: FpPoly::zero(spec.p), den: FpPoly::one(spec.p) },
            },
        }
    }

    pub fn one(spec: LocalFieldSpec) -> Self {
        KElem::from_integer(spec, 1)
    }

    /// The uniformizer: p, respectively u.
    pub fn uniformizer(spec: LocalFieldSpec) -> Self {
        match spec.kind {
            KKind::PAdic => KElem::from_rational(spec, BigRational::from_integer(BigInt::from(spec.p))),
            KKind::LaurentFF => KElem {
                spec,
                repr: KRepr::RExact {
                    num: FpPoly::from_coeffs(spec.p, vec![0, 1]),
                    den: FpPoly::one(spec.p),
                },
            },
        }
    }

    pub fn from_integer(spec: LocalFieldSpec, n: i64) -> Self {
        match spec.kind {
            KKind::PAdic => KElem::from_rational(spec, BigRational::from_integer(BigInt::from(n))),
            KKind::LaurentFF => {
                let c = n.rem_euclid(spec.p as i64) as u32;
                KElem {
                    spec,
                    repr: KRepr::RExact {
                        num: FpPoly::from_coeffs(spec.p, vec![c]),
                        den: FpPoly::one(spec.p),
                    },
                }
            }
        }
    }

    /// Exact rational constant. For F_p((u)) the denominator must be nonzero
    /// mod p.
    pub fn from_rational(spec: LocalFieldSpec, r: BigRational) -> Self {
        match spec.kind {
            KKind::PAdic => KElem { spec, repr: KRepr::QExact(r) },
            KKind::LaurentFF => {
                let p = BigInt::from(spec.p);
                let num = r.numer().mod_floor(&p).to_u32().unwrap();
                let den = r.denom().mod_floor(&p).to_u32().unwrap();
                assert!(den != 0, "denominator divisible by p in F_p");
                let c = (num as u64 * mod_inverse(den, spec.p) as u64 % spec.p as u64) as u32;
                KElem {
                    spec,
                    repr: KRepr::RExact {
                        num: FpPoly::from_coeffs(spec.p, vec![c]),
                        den: FpPoly::one(spec.p),
                    },
                }
            }
        }
    }

    /// Exact Laurent polynomial `sum coeffs[i] * u^(val+i)` (LaurentFF only).
    pub fn from_u_poly(spec: LocalFieldSpec, val: i64, coeffs: Vec<u32>) -> Self {
        assert_eq!(spec.kind, KKind::LaurentFF);
        let poly = FpPoly::from_coeffs(spec.p, coeffs);
        let e = KElem { spec, repr: KRepr::RExact { num: poly, den: FpPoly::one(spec.p) } };
        let shift = KElem::pi_pow(spec, val);
        e.mul(&shift)
    }

    /// The exact value `sum digits[i] * pi^(val+i)` (finite digit string).
    pub fn from_digit_value(spec: LocalFieldSpec, val: i64, digits: &[u32]) -> Self {
        match spec.kind {
            KKind::PAdic => {
                let mut acc = BigRational::zero();
                for (i, &d) in digits.iter().enumerate() {
                    acc += spec.p_pow(val + i as i64) * BigRational::from_integer(BigInt::from(d % spec.p));
                }
                KElem { spec, repr: KRepr::QExact(acc) }
            }
            KKind::LaurentFF => KElem::from_u_poly(spec, val, digits.to_vec()),
        }
    }

    /// A truncated literal: digits from position `val`, known modulo
    /// pi^`prec`.
    pub fn from_digits_approx(spec: LocalFieldSpec, val: i64, digits: Vec<u32>, prec: i64) -> Result<Self> {
        let digits: Vec<u32> = digits.into_iter().map(|d| d % spec.p).collect();
        if val + digits.len() as i64 > prec {
            return Err(Error::Domain("digit string longer than stated precision".into()));
        }
        Ok(KElem { spec, repr: normalize_approx(val, digits, prec) })
    }

    /// pi^k as an exact element.
    pub fn pi_pow(spec: LocalFieldSpec, k: i64) -> Self {
        match spec.kind {
            KKind::PAdic => KElem { spec, repr: KRepr::QExact(spec.p_pow(k)) },
            KKind::LaurentFF => {
                if k >= 0 {
                    KElem {
                        spec,
                        repr: KRepr::RExact {
                            num: FpPoly::one(spec.p).shift_up(k as usize),
                            den: FpPoly::one(spec.p),
                        },
                    }
                } else {
                    KElem {
                        spec,
                        repr: KRepr::RExact {
                            num: FpPoly::one(spec.p),
                            den: FpPoly::one(spec.p).shift_up((-k) as usize),
                        },
                    }
                }
            }
        }
    }

    pub fn spec(&self) -> LocalFieldSpec {
        self.spec
    }

    // -- predicates ---------------------------------------------------------

    pub fn is_exact(&self) -> bool {
        !matches!(self.repr, KRepr::Approx { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        match &self.repr {
            KRepr::QExact(r) => r.is_zero(),
            KRepr::RExact { num, .. } => num.is_zero(),
            KRepr::Approx { .. } => false,
        }
    }

    /// True when the element is zero as far as its precision can tell but is
    /// not exactly zero.
    pub fn is_apparent_zero(&self) -> bool {
        matches!(&self.repr, KRepr::Approx { digits, .. } if digits.is_empty())
    }

    pub fn known_nonzero(&self) -> bool {
        match &self.repr {
            KRepr::Approx { digits, .. } => !digits.is_empty(),
            _ => !self.is_exact_zero(),
        }
    }

    /// Absolute precision bound: the value is known modulo pi^bound.
    /// `None` means exact.
    pub fn prec_bound(&self) -> Option<i64> {
        match &self.repr {
            KRepr::Approx { prec, .. } => Some(*prec),
            _ => None,
        }
    }

    // -- valuation and absolute value ---------------------------------------

    /// The valuation; `Infinite` for exact zero, error for apparent zero.
    pub fn valuation(&self) -> Result<KVal> {
        match &self.repr {
            KRepr::QExact(r) => {
                if r.is_zero() {
                    Ok(KVal::Infinite)
                } else {
                    Ok(KVal::Finite(padic_val_rational(self.spec.p, r)))
                }
            }
            KRepr::RExact { num, den } => {
                if num.is_zero() {
                    Ok(KVal::Infinite)
                } else {
                    Ok(KVal::Finite(num.low() as i64 - den.low() as i64))
                }
            }
            KRepr::Approx { val, digits, prec } => {
                if digits.is_empty() {
                    Err(Error::PrecisionExhausted(format!(
                        "valuation of a value only known to be O(pi^{})",
                        prec
                    )))
                } else {
                    Ok(KVal::Finite(*val))
                }
            }
        }
    }

    /// Finite valuation or an error (exact zero included).
    pub fn val_finite(&self) -> Result<i64> {
        match self.valuation()? {
            KVal::Finite(v) => Ok(v),
            KVal::Infinite => Err(Error::Domain("valuation of zero".into())),
        }
    }

    /// Normalized absolute value |x| = p^(-v(x)) as an exact rational.
    pub fn abs(&self) -> Result<BigRational> {
        let v = self.val_finite()?;
        Ok(self.spec.p_pow(-v))
    }

    /// Lower bound on the valuation that is certain at current knowledge.
    fn min_possible_val(&self) -> i64 {
        match &self.repr {
            KRepr::Approx { val, digits, prec } => {
                if digits.is_empty() {
                    *prec
                } else {
                    *val
                }
            }
            _ => {
                if self.is_exact_zero() {
                    i64::MAX / 4
                } else {
                    self.val_finite().unwrap()
                }
            }
        }
    }

    // -- digit access -------------------------------------------------------

    /// Digits at positions lo..hi; error if not determined by precision.
    pub fn window(&self, lo: i64, hi: i64) -> Result<Vec<u32>> {
        if hi <= lo {
            return Ok(Vec::new());
        }
        if let Some(prec) = self.prec_bound() {
            if hi > prec {
                return Err(Error::PrecisionExhausted(format!(
                    "digits up to pi^{} requested, known modulo pi^{}",
                    hi, prec
                )));
            }
        }
        match &self.repr {
            KRepr::QExact(r) => Ok(padic_digits(self.spec.p, r, lo, hi)),
            KRepr::RExact { num, den } => Ok(laurent_digits(num, den, lo, hi)),
            KRepr::Approx { val, digits, .. } => {
                let mut out = vec![0u32; (hi - lo) as usize];
                for (i, &d) in digits.iter().enumerate() {
                    let pos = *val + i as i64;
                    if pos >= lo && pos < hi {
                        out[(pos - lo) as usize] = d;
                    }
                }
                Ok(out)
            }
        }
    }

    /// The value modulo pi^depth, as a canonical exact finite-digit element.
    pub fn truncate_to(&self, depth: i64) -> Result<KElem> {
        let lo = match &self.repr {
            KRepr::Approx { val, digits, prec } => {
                if digits.is_empty() {
                    *prec
                } else {
                    *val
                }
            }
            _ => {
                if self.is_exact_zero() {
                    depth
                } else {
                    self.val_finite().unwrap()
                }
            }
        };
        if lo >= depth {
            return Ok(KElem::zero(self.spec));
        }
        let digits = self.window(lo, depth)?;
        Ok(KElem::from_digit_value(self.spec, lo, &digits))
    }

    /// (valuation, digits) of an exact finite-digit value; panics otherwise.
    /// Used for ball keys and coset enumeration, where centres are canonical.
    pub fn finite_digits(&self, upto: i64) -> (i64, Vec<u32>) {
        if self.is_exact_zero() {
            return (upto, Vec::new());
        }
        let v = self.val_finite().expect("exact nonzero");
        let mut d = self.window(v, upto).expect("exact value");
        while d.last() == Some(&0) {
            d.pop();
        }
        (v, d)
    }

    // -- arithmetic ---------------------------------------------------------

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        match (&self.repr, &other.repr) {
            (KRepr::QExact(a), KRepr::QExact(b)) => {
                KElem { spec: self.spec, repr: KRepr::QExact(a + b) }
            }
            (KRepr::RExact { num: n1, den: d1 }, KRepr::RExact { num: n2, den: d2 }) => {
                let num = n1.mul(d2).add(&n2.mul(d1));
                let den = d1.mul(d2);
                KElem { spec: self.spec, repr: canonical_rexact(num, den) }
            }
            _ => {
                let prec = min_opt(self.prec_bound(), other.prec_bound()).expect("approx operand");
                let lo = self.min_possible_val().min(other.min_possible_val()).min(prec);
                if lo >= prec {
                    return KElem { spec: self.spec, repr: normalize_approx(prec, Vec::new(), prec) };
                }
                let wa = self.window(lo, prec).expect("within precision");
                let wb = other.window(lo, prec).expect("within precision");
                let sum = match self.spec.kind {
                    KKind::PAdic => digits_add_carry(self.spec.p, &wa, &wb),
                    KKind::LaurentFF => wa
                        .iter()
                        .zip(&wb)
                        .map(|(&x, &y)| (x + y) % self.spec.p)
                        .collect(),
                };
                KElem { spec: self.spec, repr: normalize_approx(lo, sum, prec) }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            KRepr::QExact(r) => KElem { spec: self.spec, repr: KRepr::QExact(-r.clone()) },
            KRepr::RExact { num, den } => KElem {
                spec: self.spec,
                repr: KRepr::RExact { num: num.neg(), den: den.clone() },
            },
            KRepr::Approx { val, digits, prec } => {
                let p = self.spec.p;
                let neg: Vec<u32> = match self.spec.kind {
                    KKind::PAdic => {
                        // p-complement: first digit p-d, later digits p-1-d.
                        let mut out = Vec::with_capacity(digits.len());
                        for (i, &d) in digits.iter().enumerate() {
                            if i == 0 {
                                out.push((p - d) % p);
                            } else {
                                out.push((p - 1 - d) % p);
                            }
                        }
                        // Trailing implied zeros become p-1 up to precision.
                        if !digits.is_empty() {
                            let k = (*prec - *val) as usize;
                            while out.len() < k {
                                out.push(p - 1);
                            }
                        }
                        out
                    }
                    KKind::LaurentFF => digits.iter().map(|&d| (p - d) % p).collect(),
                };
                KElem { spec: self.spec, repr: normalize_approx(*val, neg, *prec) }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.spec, other.spec);
        match (&self.repr, &other.repr) {
            (KRepr::QExact(a), KRepr::QExact(b)) => {
                KElem { spec: self.spec, repr: KRepr::QExact(a * b) }
            }
            (KRepr::RExact { num: n1, den: d1 }, KRepr::RExact { num: n2, den: d2 }) => {
                KElem { spec: self.spec, repr: canonical_rexact(n1.mul(n2), d1.mul(d2)) }
            }
            _ => {
                if self.is_exact_zero() || other.is_exact_zero() {
                    return KElem::zero(self.spec);
                }
                let va = self.min_possible_val();
                let vb = other.min_possible_val();
                let prec = [
                    self.prec_bound().map(|pa| pa.saturating_add(vb)),
                    other.prec_bound().map(|pb| pb.saturating_add(va)),
                ]
                .into_iter()
                .flatten()
                .min()
                .expect("approx operand");
                if !self.known_nonzero() || !other.known_nonzero() {
                    return KElem { spec: self.spec, repr: normalize_approx(prec, Vec::new(), prec) };
                }
                let val = va + vb;
                let k = prec - val;
                if k <= 0 {
                    // known nonzero but no digit is determined; refuse.
                    return KElem { spec: self.spec, repr: normalize_approx(prec, Vec::new(), prec) };
                }
                let wa = self.window(va, va + k).expect("within precision");
                let wb = other.window(vb, vb + k).expect("within precision");
                let prod = match self.spec.kind {
                    KKind::PAdic => digits_mul_carry(self.spec.p, &wa, &wb, k as usize),
                    KKind::LaurentFF => {
                        let p = self.spec.p as u64;
                        let mut out = vec![0u32; k as usize];
                        for i in 0..wa.len().min(k as usize) {
                            for j in 0..wb.len().min(k as usize - i) {
                                out[i + j] =
                                    ((out[i + j] as u64 + wa[i] as u64 * wb[j] as u64) % p) as u32;
                            }
                        }
                        out
                    }
                };
                KElem { spec: self.spec, repr: normalize_approx(val, prod, prec) }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.repr {
            KRepr::QExact(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero("inverse of 0 in K".into()))
                } else {
                    Ok(KElem { spec: self.spec, repr: KRepr::QExact(r.recip()) })
                }
            }
            KRepr::RExact { num, den } => {
                if num.is_zero() {
                    Err(Error::DivisionByZero("inverse of 0 in K".into()))
                } else {
                    Ok(KElem { spec: self.spec, repr: canonical_rexact(den.clone(), num.clone()) })
                }
            }
            KRepr::Approx { val, digits, prec } => {
                if digits.is_empty() {
                    return Err(Error::Domain(format!(
                        "inversion of apparent zero (known only modulo pi^{})",
                        prec
                    )));
                }
                let k = (*prec - *val) as usize;
                let out_val = -*val;
                let out_prec = prec - 2 * val;
                let inv_digits = match self.spec.kind {
                    KKind::PAdic => {
                        let p = BigInt::from(self.spec.p);
                        let modulus = p.pow(k as u32);
                        let mut n = BigInt::zero();
                        for &d in digits.iter().rev() {
                            n = n * &p + BigInt::from(d);
                        }
                        let m = bigint_mod_inverse(&n, &modulus);
                        bigint_digits(self.spec.p, &m, k)
                    }
                    KKind::LaurentFF => {
                        let one = FpPoly::one(self.spec.p);
                        let den = FpPoly::from_coeffs(self.spec.p, digits.clone());
                        one.series_quotient(&den, k)
                    }
                };
                Ok(KElem { spec: self.spec, repr: normalize_approx(out_val, inv_digits, out_prec) })
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Key for deterministic ordering of canonical exact finite values
    /// (ball centres). `upto` bounds the digit positions that can occur.
    fn order_key(&self, upto: i64) -> (i64, Vec<u32>) {
        self.finite_digits(upto)
    }

}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

fn normalize_approx(mut val: i64, mut digits: Vec<u32>, prec: i64) -> KRepr {
    // strip leading zeros
    let lead = digits.iter().position(|&d| d != 0);
    match lead {
        None => KRepr::Approx { val: prec, digits: Vec::new(), prec },
        Some(k) => {
            digits.drain(..k);
            val += k as i64;
            // strip trailing zeros (implied up to prec)
            while digits.last() == Some(&0) {
                digits.pop();
            }
            debug_assert!(val + digits.len() as i64 <= prec);
            KRepr::Approx { val, digits, prec }
        }
    }
}

fn canonical_rexact(num: FpPoly, den: FpPoly) -> KRepr {
    assert!(!den.is_zero());
    if num.is_zero() {
        return KRepr::RExact { num: FpPoly::zero(den.p), den: FpPoly::one(den.p) };
    }
    let g = num.gcd(&den);
    let (num, _) = num.divmod(&g);
    let (den, _) = den.divmod(&g);
    let lead_inv = mod_inverse(den.c[den.deg()], den.p);
    KRepr::RExact { num: num.scale(lead_inv), den: den.scale(lead_inv) }
}

fn digits_add_carry(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    let n = a.len().max(b.len());
    let mut out = vec![0u32; n];
    let mut carry = 0u32;
    for i in 0..n {
        let s = a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0) + carry;
        out[i] = s % p;
        carry = s / p;
    }
    out
}

fn digits_mul_carry(p: u32, a: &[u32], b: &[u32], k: usize) -> Vec<u32> {
    let mut acc = vec![0u64; k + 1];
    for i in 0..a.len().min(k) {
        for j in 0..b.len().min(k - i) {
            acc[i + j] += a[i] as u64 * b[j] as u64;
        }
    }
    let mut out = vec![0u32; k];
    let mut carry = 0u64;
    for i in 0..k {
        let s = acc[i] + carry;
        out[i] = (s % p as u64) as u32;
        carry = s / p as u64;
    }
    out
}

fn padic_val_rational(p: u32, r: &BigRational) -> i64 {
    fn val_int(p: &BigInt, n: &BigInt) -> i64 {
        let mut v = 0i64;
        let mut m = n.abs();
        loop {
            let (q, rem) = m.div_rem(p);
            if rem.is_zero() {
                v += 1;
                m = q;
            } else {
                return v;
            }
        }
    }
    let pb = BigInt::from(p);
    val_int(&pb, r.numer()) - val_int(&pb, r.denom())
}

/// p-adic digits of an exact rational at positions lo..hi.
fn padic_digits(p: u32, r: &BigRational, lo: i64, hi: i64) -> Vec<u32> {
    let mut out = vec![0u32; (hi - lo) as usize];
    if r.is_zero() {
        return out;
    }
    let v = padic_val_rational(p, r);
    let start = v.max(lo);
    if start >= hi {
        return out;
    }
    let pb = BigInt::from(p);
    // x = r / p^start, with v_p(x) >= 0; extract digits iteratively.
    let mut x = r / BigRational::from_integer(pb.pow(0)).clone();
    // divide by p^start exactly
    let scale = if start >= 0 {
        BigRational::new(BigInt::one(), pb.pow(start as u32))
    } else {
        BigRational::from_integer(pb.pow((-start) as u32))
    };
    x *= scale;
    for pos in start..hi {
        // digit = x mod p (denominator of x is coprime to p)
        let num = x.numer().mod_floor(&pb);
        let den = x.denom().mod_floor(&pb).to_u32().unwrap();
        let d = (num.to_u32().unwrap() as u64 * mod_inverse(den, p) as u64 % p as u64) as u32;
        if pos >= lo {
            out[(pos - lo) as usize] = d;
        }
        x = (x - BigRational::from_integer(BigInt::from(d))) / BigRational::from_integer(pb.clone());
    }
    out
}

/// Laurent-series digits of an exact rational function at positions lo..hi.
fn laurent_digits(num: &FpPoly, den: &FpPoly, lo: i64, hi: i64) -> Vec<u32> {
    let mut out = vec![0u32; (hi - lo) as usize];
    if num.is_zero() {
        return out;
    }
    let v = num.low() as i64 - den.low() as i64;
    let start = v.max(lo);
    if start >= hi {
        return out;
    }
    // strip u-powers: num/u^low(num), den/u^low(den)
    let n_shift = FpPoly::from_coeffs(num.p, num.c[num.low()..].to_vec());
    let d_shift = FpPoly::from_coeffs(den.p, den.c[den.low()..].to_vec());
    // series of (num'/den') starts at exponent v
    let need = (hi - v) as usize;
    let series = n_shift.series_quotient(&d_shift, need);
    for (i, &d) in series.iter().enumerate() {
        let pos = v + i as i64;
        if pos >= lo && pos < hi {
            out[(pos - lo) as usize] = d;
        }
    }
    out
}

fn bigint_mod_inverse(a: &BigInt, modulus: &BigInt) -> BigInt {
    // extended Euclid; gcd(a, modulus) = 1 by construction.
    let (mut r0, mut r1) = (modulus.clone(), a.mod_floor(modulus));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    s0.mod_floor(modulus)
}

fn bigint_digits(p: u32, n: &BigInt, k: usize) -> Vec<u32> {
    let pb = BigInt::from(p);
    let mut out = Vec::with_capacity(k);
    let mut m = n.mod_floor(&pb.pow(k as u32));
    for _ in 0..k {
        let (q, r) = m.div_rem(&pb);
        out.push(r.to_u32().unwrap());
        m = q;
    }
    out
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            KRepr::QExact(r) => write!(f, "{}", r),
            KRepr::RExact { num, den } => {
                if den.is_zero() || (den.deg() == 0 && den.coeff(0) == 1) {
                    if num.is_zero() || num.deg() == 0 {
                        write!(f, "{}", num)
                    } else {
                        write!(f, "{}", num)
                    }
                } else if num.is_zero() || num.deg() == 0 {
                    write!(f, "{}/({})", num, den)
                } else {
                    write!(f, "({})/({})", num, den)
                }
            }
            KRepr::Approx { val, digits, prec } => {
                if digits.is_empty() {
                    write!(f, "kelem(O(pi^{}))", prec)
                } else {
                    write!(
                        f,
                        "kelem(v={}, digits=[{}], prec={})",
                        val,
                        digits.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
                        prec
                    )
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Ball: a coset center + pi^depth * O_K
// ---------------------------------------------------------------------------

/// A coset a + pi^k O_K with canonical centre (digits at positions >= k are
/// zero and the centre is an exact finite-digit value).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    center: KElem,
    depth: i64,
}

impl Ball {
    pub fn new(center: &KElem, depth: i64) -> Result<Ball> {
        Ok(Ball { center: center.truncate_to(depth)?, depth })
    }

    /// The whole ring of integers O_K.
    pub fn unit(spec: LocalFieldSpec) -> Ball {
        Ball { center: KElem::zero(spec), depth: 0 }
    }

    pub fn center(&self) -> &KElem {
        &self.center
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    pub fn spec(&self) -> LocalFieldSpec {
        self.center.spec
    }

    /// Haar measure p^(-depth), normalised by measure(O_K) = 1.
    pub fn measure(&self) -> BigRational {
        self.spec().p_pow(-self.depth)
    }

    /// Membership x in center + pi^depth O_K; fails only if x's precision
    /// cannot decide it.
    pub fn member(&self, x: &KElem) -> Result<bool> {
        let d = x.sub(&self.center);
        if d.is_exact_zero() {
            return Ok(true);
        }
        if d.is_apparent_zero() {
            let prec = d.prec_bound().unwrap();
            if prec >= self.depth {
                return Ok(true);
            }
            return Err(Error::PrecisionExhausted(format!(
                "ball membership at depth {} undecidable at precision {}",
                self.depth, prec
            )));
        }
        Ok(d.val_finite()? >= self.depth)
    }

    /// The p^(m-depth) disjoint depth-m sub-balls covering this ball, in
    /// deterministic digit order.
    pub fn split(&self, m: i64) -> Result<Vec<Ball>> {
        if m < self.depth {
            return Err(Error::Domain(format!(
                "split depth {} above ball depth {}",
                m, self.depth
            )));
        }
        let spec = self.spec();
        let width = (m - self.depth) as u32;
        let count = (spec.p as u64).checked_pow(width).ok_or_else(|| {
            Error::DepthLimit("ball split count overflows".into())
        })?;
        let mut out = Vec::with_capacity(count as usize);
        for j in 0..count {
            let mut digits = Vec::with_capacity(width as usize);
            let mut jj = j;
            for _ in 0..width {
                digits.push((jj % spec.p as u64) as u32);
                jj /= spec.p as u64;
            }
            let offset = KElem::from_digit_value(spec, self.depth, &digits);
            let center = self.center.add(&offset);
            out.push(Ball { center, depth: m });
        }
        Ok(out)
    }

    /// True when `other` is contained in `self`.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        other.depth >= self.depth && self.member(&other.center).unwrap_or(false)
    }

    fn key(&self) -> (i64, i64, Vec<u32>) {
        let (v, d) = self.center.order_key(self.depth);
        (self.depth, v, d)
    }
}

impl PartialOrd for Ball {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ball {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ball({}, {})", self.center, self.depth)
    }
}
