//! Exact arithmetic over `Q` and quadratic fields `Q(sqrt d)`.
//!
//! A [`Scalar`] stores `p + q*sqrt(d)` with `p`, `q` reduced rationals. Rational
//! values always carry `d = 0`, so every value has exactly one representation
//! and structural equality is value equality. The ambient field is tracked by
//! the containers (varieties, representations) through a [`FieldDescriptor`].

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars from different fields: sqrt({0}) and sqrt({1})")]
    MixedFields(i64, i64),
    #[error("invalid field descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("automorphism {0} is not defined on {1}")]
    NotInGroup(FieldAutomorphism, FieldDescriptor),
}

/// `Q` or a quadratic extension `Q(sqrt d)` with `d` square-free and `d != 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldDescriptor {
    Rationals,
    Quadratic(i64),
}

fn is_square_free(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

impl FieldDescriptor {
    pub fn quadratic(d: i64) -> Result<Self, FieldError> {
        if d == 0 || d == 1 || !is_square_free(d) {
            return Err(FieldError::InvalidDescriptor(format!(
                "d = {d} must be square-free and different from 0 and 1"
            )));
        }
        Ok(FieldDescriptor::Quadratic(d))
    }

    /// The radicand, or `None` for `Q`.
    pub fn radicand(&self) -> Option<i64> {
        match self {
            FieldDescriptor::Rationals => None,
            FieldDescriptor::Quadratic(d) => Some(*d),
        }
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        x.d == 0 || Some(x.d) == self.radicand()
    }

    /// Generator of the field over `Q`: `sqrt(d)`, or `1` for `Q`.
    pub fn generator(&self) -> Scalar {
        match self {
            FieldDescriptor::Rationals => Scalar::one(),
            FieldDescriptor::Quadratic(d) => Scalar::sqrt(*d),
        }
    }

    /// Elements of `Aut k`: `[id]` for `Q`, `[id, conj]` for quadratic fields.
    pub fn automorphism_group(&self) -> Vec<FieldAutomorphism> {
        match self {
            FieldDescriptor::Rationals => vec![FieldAutomorphism::Identity],
            FieldDescriptor::Quadratic(_) => {
                vec![FieldAutomorphism::Identity, FieldAutomorphism::Conjugation]
            }
        }
    }

    /// Checked application of `phi`: the scalar must lie in this field and `phi`
    /// must belong to its automorphism group.
    pub fn apply_automorphism(
        &self,
        phi: FieldAutomorphism,
        x: &Scalar,
    ) -> Result<Scalar, FieldError> {
        if !self.contains(x) {
            return Err(FieldError::MixedFields(self.radicand().unwrap_or(0), x.d));
        }
        if phi == FieldAutomorphism::Conjugation && *self == FieldDescriptor::Rationals {
            return Err(FieldError::NotInGroup(phi, *self));
        }
        Ok(phi.apply(x))
    }

    /// Smallest field containing every scalar of the iterator.
    pub fn spanned_by<'a>(
        scalars: impl IntoIterator<Item = &'a Scalar>,
    ) -> Result<FieldDescriptor, FieldError> {
        let mut d = 0i64;
        for s in scalars {
            if s.d != 0 {
                if d != 0 && d != s.d {
                    return Err(FieldError::MixedFields(d, s.d));
                }
                d = s.d;
            }
        }
        Ok(if d == 0 {
            FieldDescriptor::Rationals
        } else {
            FieldDescriptor::Quadratic(d)
        })
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::Quadratic(d) => write!(f, "Q(sqrt {d})"),
        }
    }
}

impl FromStr for FieldDescriptor {
    type Err = FieldError;

    /// Accepts `Q`, `Q(sqrt 2)`, `Q(sqrt(2))` and `Q(sqrt -1)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact == "Q" {
            return Ok(FieldDescriptor::Rationals);
        }
        let inner = compact
            .strip_prefix("Q(sqrt")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| FieldError::InvalidDescriptor(s.to_string()))?;
        let inner = inner
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(inner);
        let d: i64 = inner
            .parse()
            .map_err(|_| FieldError::InvalidDescriptor(s.to_string()))?;
        FieldDescriptor::quadratic(d)
    }
}

impl Serialize for FieldDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Field automorphisms of `Q` and `Q(sqrt d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldAutomorphism {
    Identity,
    Conjugation,
}

impl FieldAutomorphism {
    /// Identity fixes `x`; conjugation maps `p + q sqrt(d)` to `p - q sqrt(d)`.
    pub fn apply(&self, x: &Scalar) -> Scalar {
        match self {
            FieldAutomorphism::Identity => x.clone(),
            FieldAutomorphism::Conjugation => x.conj(),
        }
    }

    pub fn compose(&self, other: &FieldAutomorphism) -> FieldAutomorphism {
        if self == other {
            FieldAutomorphism::Identity
        } else {
            FieldAutomorphism::Conjugation
        }
    }

    pub fn inverse(&self) -> FieldAutomorphism {
        *self
    }

    pub fn is_identity(&self) -> bool {
        *self == FieldAutomorphism::Identity
    }
}

impl fmt::Display for FieldAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldAutomorphism::Identity => write!(f, "id"),
            FieldAutomorphism::Conjugation => write!(f, "conj"),
        }
    }
}

impl FromStr for FieldAutomorphism {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "id" | "identity" => Ok(FieldAutomorphism::Identity),
            "conj" | "conjugation" => Ok(FieldAutomorphism::Conjugation),
            other => Err(FieldError::InvalidDescriptor(format!(
                "unknown automorphism `{other}` (expected `id` or `conj`)"
            ))),
        }
    }
}

impl Serialize for FieldAutomorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldAutomorphism {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact element `p + q*sqrt(d)`; `d == 0` exactly when `q == 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    p: BigRational,
    q: BigRational,
    d: i64,
}

fn compatible(d1: i64, d2: i64) -> Result<i64, FieldError> {
    match (d1, d2) {
        (0, d) | (d, 0) => Ok(d),
        (a, b) if a == b => Ok(a),
        (a, b) => Err(FieldError::MixedFields(a, b)),
    }
}

impl Scalar {
    fn normalized(p: BigRational, q: BigRational, d: i64) -> Scalar {
        if q.is_zero() {
            Scalar {
                p,
                q,
                d: 0,
            }
        } else {
            Scalar { p, q, d }
        }
    }

    pub fn zero() -> Scalar {
        Scalar {
            p: BigRational::zero(),
            q: BigRational::zero(),
            d: 0,
        }
    }

    pub fn one() -> Scalar {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(p: BigRational) -> Scalar {
        Scalar {
            p,
            q: BigRational::zero(),
            d: 0,
        }
    }

    /// `num / den`; panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Scalar {
        Scalar::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `sqrt(d)` for a valid radicand; `sqrt(1)` is `1` and `sqrt(0)` is `0`.
    pub fn sqrt(d: i64) -> Scalar {
        match d {
            0 => Scalar::zero(),
            1 => Scalar::one(),
            _ => Scalar::normalized(BigRational::zero(), BigRational::one(), d),
        }
    }

    /// `p + q*sqrt(d)`.
    pub fn quadratic(p: BigRational, q: BigRational, d: i64) -> Scalar {
        Scalar::normalized(p, q, d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.p
    }

    pub fn irrational_part(&self) -> &BigRational {
        &self.q
    }

    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.q.is_zero() && self.p.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.q.is_zero() && self.p.is_integer()
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.p.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn conj(&self) -> Scalar {
        Scalar::normalized(self.p.clone(), -self.q.clone(), self.d)
    }

    /// Smallest field containing this value.
    pub fn descriptor(&self) -> FieldDescriptor {
        if self.d == 0 {
            FieldDescriptor::Rationals
        } else {
            FieldDescriptor::Quadratic(self.d)
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        let d = compatible(self.d, other.d)?;
        Ok(Scalar::normalized(
            &self.p + &other.p,
            &self.q + &other.q,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        let d = compatible(self.d, other.d)?;
        Ok(Scalar::normalized(
            &self.p - &other.p,
            &self.q - &other.q,
            d,
        ))
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        let d = compatible(self.d, other.d)?;
        if self.q.is_zero() {
            return Ok(Scalar::normalized(
                &self.p * &other.p,
                &self.p * &other.q,
                d,
            ));
        }
        if other.q.is_zero() {
            return Ok(Scalar::normalized(
                &self.p * &other.p,
                &self.q * &other.p,
                d,
            ));
        }
        let dd = BigRational::from_integer(BigInt::from(d));
        Ok(Scalar::normalized(
            &self.p * &other.p + &self.q * &other.q * dd,
            &self.p * &other.q + &self.q * &other.p,
            d,
        ))
    }

    pub fn checked_inv(&self) -> Result<Scalar, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if self.q.is_zero() {
            return Ok(Scalar::from_rational(self.p.recip()));
        }
        let dd = BigRational::from_integer(BigInt::from(self.d));
        let norm = &self.p * &self.p - &self.q * &self.q * dd;
        Ok(Scalar::normalized(
            &self.p / &norm,
            -(&self.q / &norm),
            self.d,
        ))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, FieldError> {
        self.checked_mul(&other.checked_inv()?)
    }

    /// Inverse; panics on zero. Use [`Scalar::checked_inv`] for fallible code.
    pub fn inv(&self) -> Scalar {
        self.checked_inv().expect("inverse of zero scalar")
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Integer power, allowing negative exponents on nonzero values.
    pub fn powi(&self, n: i64) -> Scalar {
        if n >= 0 {
            self.pow(n as u32)
        } else {
            self.inv().pow((-n) as u32)
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", fmt_rational(&self.p));
        }
        let root = format!("sqrt({})", self.d);
        let mag = self.q.abs();
        let irr = if mag.is_one() {
            root
        } else {
            format!("{}*{}", fmt_rational(&mag), root)
        };
        if self.p.is_zero() {
            if self.q.is_negative() {
                write!(f, "-{irr}")
            } else {
                write!(f, "{irr}")
            }
        } else {
            let sign = if self.q.is_negative() { "-" } else { "+" };
            write!(f, "{} {} {}", fmt_rational(&self.p), sign, irr)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Scalar {
    type Err = crate::term::TermError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::term::parse_scalar(s)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

// Operator impls panic on mixed quadratic fields; containers guarantee a single
// ambient field, and the `checked_*` methods are available at API boundaries.
impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        self.checked_add(rhs).expect("mixed fields")
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        self.checked_sub(rhs).expect("mixed fields")
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        self.checked_mul(rhs).expect("mixed fields")
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero or mixed fields")
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::normalized(-self.p.clone(), -self.q.clone(), self.d)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        let d = compatible(self.d, rhs.d).expect("mixed fields");
        self.p += &rhs.p;
        self.q += &rhs.q;
        self.d = if self.q.is_zero() { 0 } else { d };
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        let d = compatible(self.d, rhs.d).expect("mixed fields");
        self.p -= &rhs.p;
        self.q -= &rhs.q;
        self.d = if self.q.is_zero() { 0 } else { d };
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn rational_addition() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
    }

    #[test]
    fn norm_identity() {
        let a = &Scalar::one() + &Scalar::sqrt(2);
        let b = &Scalar::one() - &Scalar::sqrt(2);
        assert_eq!(&a * &b, Scalar::from_int(-1));
        assert!((&a * &b).is_rational());
    }

    #[test]
    fn inverse_of_sqrt2() {
        let inv = Scalar::sqrt(2).inv();
        let expected = &q(1, 2) * &Scalar::sqrt(2);
        assert_eq!(inv, expected);
        assert_eq!(&Scalar::sqrt(2) * &expected, Scalar::one());
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert_eq!(Scalar::zero().checked_inv(), Err(FieldError::DivisionByZero));
        assert_eq!(
            Scalar::one().checked_div(&Scalar::zero()),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn mixed_fields_are_reported() {
        let r = Scalar::sqrt(2).checked_add(&Scalar::sqrt(3));
        assert_eq!(r, Err(FieldError::MixedFields(2, 3)));
        // rationals embed into every field
        assert!(Scalar::sqrt(2).checked_mul(&q(3, 7)).is_ok());
    }

    #[test]
    fn canonical_form_is_structural() {
        let a = &(&Scalar::sqrt(2) + &q(1, 2)) - &Scalar::sqrt(2);
        assert_eq!(a, q(2, 4));
        assert_eq!(a.radicand(), 0);
    }

    #[test]
    fn automorphism_groups() {
        assert_eq!(
            FieldDescriptor::Rationals.automorphism_group(),
            vec![FieldAutomorphism::Identity]
        );
        for d in [2, 5] {
            let f = FieldDescriptor::quadratic(d).unwrap();
            assert_eq!(
                f.automorphism_group(),
                vec![FieldAutomorphism::Identity, FieldAutomorphism::Conjugation]
            );
        }
    }

    #[test]
    fn conjugation_examples() {
        let f = FieldDescriptor::quadratic(2).unwrap();
        let x = &Scalar::from_int(3) + &(&Scalar::from_int(2) * &Scalar::sqrt(2));
        let y = &Scalar::from_int(3) - &(&Scalar::from_int(2) * &Scalar::sqrt(2));
        assert_eq!(f.apply_automorphism(FieldAutomorphism::Conjugation, &x), Ok(y));
        assert_eq!(FieldAutomorphism::Identity.apply(&q(7, 3)), q(7, 3));
        let s = Scalar::sqrt(2);
        let cs = FieldAutomorphism::Conjugation.apply(&s);
        assert_eq!(cs, -&s);
        assert_ne!(cs, s);
    }

    #[test]
    fn automorphism_checks_field() {
        let err = FieldDescriptor::Rationals
            .apply_automorphism(FieldAutomorphism::Conjugation, &Scalar::one());
        assert!(matches!(err, Err(FieldError::NotInGroup(..))));
        let f = FieldDescriptor::quadratic(2).unwrap();
        let err = f.apply_automorphism(FieldAutomorphism::Identity, &Scalar::sqrt(3));
        assert_eq!(err, Err(FieldError::MixedFields(2, 3)));
    }

    #[test]
    fn descriptor_parsing() {
        assert_eq!("Q".parse::<FieldDescriptor>(), Ok(FieldDescriptor::Rationals));
        assert_eq!(
            "Q(sqrt 2)".parse::<FieldDescriptor>(),
            Ok(FieldDescriptor::Quadratic(2))
        );
        assert_eq!(
            "Q(sqrt(5))".parse::<FieldDescriptor>(),
            Ok(FieldDescriptor::Quadratic(5))
        );
        assert!("Q(sqrt 4)".parse::<FieldDescriptor>().is_err());
        assert!("Q(sqrt 1)".parse::<FieldDescriptor>().is_err());
        assert_eq!(FieldDescriptor::Quadratic(2).to_string(), "Q(sqrt 2)");
    }

    #[test]
    fn display_forms() {
        assert_eq!(q(5, 6).to_string(), "5/6");
        let x = &Scalar::from_int(3) - &(&Scalar::from_int(2) * &Scalar::sqrt(2));
        assert_eq!(x.to_string(), "3 - 2*sqrt(2)");
        assert_eq!(Scalar::sqrt(2).inv().to_string(), "1/2*sqrt(2)");
        assert_eq!((-Scalar::sqrt(2)).to_string(), "-sqrt(2)");
    }

    #[test]
    fn group_table_closed() {
        let f = FieldDescriptor::quadratic(2).unwrap();
        let g = f.automorphism_group();
        for a in &g {
            assert!(g.contains(&a.inverse()));
            for b in &g {
                assert!(g.contains(&a.compose(b)));
            }
        }
        let c = FieldAutomorphism::Conjugation;
        assert_eq!(c.compose(&c), FieldAutomorphism::Identity);
    }
}
