use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use super::cyclotomic::{fmt_rational, Cyclotomic};
use crate::error::{Error, Result};

/// An exact scalar: a reduced rational, or an element of a cyclotomic field.
///
/// Cyclotomic values whose non-constant coordinates vanish are always stored
/// as `Rational`, so structural equality is value equality. Rationals mix
/// freely with any conductor; two cyclotomic values of different conductors
/// do not.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldScalar {
    Rational(BigRational),
    Cyclotomic(Cyclotomic),
}

impl FieldScalar {
    pub fn zero() -> Self {
        FieldScalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        FieldScalar::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        FieldScalar::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `num/den` in lowest terms with a positive denominator.
    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(FieldScalar::Rational(BigRational::new(num.into(), den)))
    }

    /// Residue of `Σ coeffs[k] ζ_m^k` modulo Φ_m.
    pub fn cyclotomic(m: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        Ok(Self::from_cyclotomic(Cyclotomic::new(m, coeffs)?))
    }

    /// ζ_m^k for any integer k.
    pub fn zeta_pow(m: u32, k: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("cyclotomic conductor must be at least 1".into()));
        }
        let e = k.rem_euclid(m as i64) as usize;
        let mut coeffs = vec![BigRational::zero(); e + 1];
        coeffs[e] = BigRational::one();
        Self::cyclotomic(m, coeffs)
    }

    pub fn zeta(m: u32) -> Result<Self> {
        Self::zeta_pow(m, 1)
    }

    fn from_cyclotomic(c: Cyclotomic) -> Self {
        match c.as_rational() {
            Some(r) => FieldScalar::Rational(r),
            None => FieldScalar::Cyclotomic(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldScalar::Rational(r) => r.is_zero(),
            FieldScalar::Cyclotomic(c) => c.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, FieldScalar::Rational(r) if r.is_one())
    }

    /// 1 for rationals.
    pub fn conductor(&self) -> u32 {
        match self {
            FieldScalar::Rational(_) => 1,
            FieldScalar::Cyclotomic(c) => c.conductor(),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldScalar::Rational(r) => Some(r),
            FieldScalar::Cyclotomic(_) => None,
        }
    }

    fn check_conductors(&self, other: &Self) -> Result<()> {
        if let (FieldScalar::Cyclotomic(a), FieldScalar::Cyclotomic(b)) = (self, other) {
            if a.conductor() != b.conductor() {
                return Err(Error::ConductorMismatch(a.conductor(), b.conductor()));
            }
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_conductors(other)?;
        Ok(match (self, other) {
            (FieldScalar::Rational(a), FieldScalar::Rational(b)) => FieldScalar::Rational(a + b),
            (FieldScalar::Rational(r), FieldScalar::Cyclotomic(c))
            | (FieldScalar::Cyclotomic(c), FieldScalar::Rational(r)) => {
                Self::from_cyclotomic(c.add_rational(r))
            }
            (FieldScalar::Cyclotomic(a), FieldScalar::Cyclotomic(b)) => Self::from_cyclotomic(a.add(b)),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_conductors(other)?;
        Ok(match (self, other) {
            (FieldScalar::Rational(a), FieldScalar::Rational(b)) => FieldScalar::Rational(a * b),
            (FieldScalar::Rational(r), FieldScalar::Cyclotomic(c))
            | (FieldScalar::Cyclotomic(c), FieldScalar::Rational(r)) => {
                if r.is_zero() {
                    FieldScalar::zero()
                } else {
                    FieldScalar::Cyclotomic(c.scale(r))
                }
            }
            (FieldScalar::Cyclotomic(a), FieldScalar::Cyclotomic(b)) => Self::from_cyclotomic(a.mul(b)),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    /// Multiplicative inverse; cyclotomic inverses use extended gcd against Φ_m.
    pub fn inv(&self) -> Result<Self> {
        match self {
            FieldScalar::Rational(r) if r.is_zero() => Err(Error::DivisionByZero),
            FieldScalar::Rational(r) => Ok(FieldScalar::Rational(r.recip())),
            FieldScalar::Cyclotomic(c) => Ok(Self::from_cyclotomic(c.inverse()?)),
        }
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = FieldScalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    /// Square root of a rational perfect square; `None` when not a square in Q
    /// or when the value is not rational.
    pub fn rational_sqrt(&self) -> Option<Self> {
        let r = self.as_rational()?;
        if r.is_negative() {
            return None;
        }
        let (n, d) = (r.numer(), r.denom());
        let (sn, sd) = (n.sqrt(), d.sqrt());
        if &(&sn * &sn) == n && &(&sd * &sd) == d {
            Some(FieldScalar::Rational(BigRational::new(sn, sd)))
        } else {
            None
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a FieldScalar> for &'a FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &'a FieldScalar) -> FieldScalar {
                self.$checked(rhs).expect("scalar arithmetic")
            }
        }
        impl $trait<FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$checked(&rhs).expect("scalar arithmetic")
            }
        }
        impl<'a> $trait<&'a FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &'a FieldScalar) -> FieldScalar {
                (&self).$checked(rhs).expect("scalar arithmetic")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        match self {
            FieldScalar::Rational(r) => FieldScalar::Rational(-r),
            FieldScalar::Cyclotomic(c) => FieldScalar::Cyclotomic(c.neg()),
        }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

impl From<i64> for FieldScalar {
    fn from(n: i64) -> Self {
        FieldScalar::from_int(n)
    }
}

impl From<BigRational> for FieldScalar {
    fn from(r: BigRational) -> Self {
        FieldScalar::Rational(r)
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Rational(r) => write!(f, "{}", fmt_rational(r)),
            FieldScalar::Cyclotomic(c) => write!(f, "{c}"),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Domain("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Serialize for FieldScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FieldScalar::Rational(r) => serializer.serialize_str(&fmt_rational(r)),
            FieldScalar::Cyclotomic(c) => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("m", &c.conductor())?;
                let coeffs: Vec<String> = c.coeffs().iter().map(fmt_rational).collect();
                map.serialize_entry("coeffs", &coeffs)?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for FieldScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Rational(String),
            Cyclotomic { m: u32, coeffs: Vec<String> },
        }
        match Repr::deserialize(deserializer)? {
            Repr::Rational(s) => parse_rational(&s)
                .map(FieldScalar::Rational)
                .map_err(de::Error::custom),
            Repr::Cyclotomic { m, coeffs } => {
                let coeffs = coeffs
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>>>()
                    .map_err(de::Error::custom)?;
                FieldScalar::cyclotomic(m, coeffs).map_err(de::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> FieldScalar {
        FieldScalar::rational(n, d).unwrap()
    }

    fn z3(a: (i64, i64), b: (i64, i64)) -> FieldScalar {
        let r = |(n, d): (i64, i64)| BigRational::new(n.into(), d.into());
        FieldScalar::cyclotomic(3, vec![r(a), r(b)]).unwrap()
    }

    #[test]
    fn rational_normalization() {
        assert_eq!(q(2, 4), q(1, 2));
        assert_eq!(q(0, 7).to_string(), "0");
        assert_eq!(q(-3, -6), q(1, 2));
        assert_eq!(q(-3, -6).to_string(), "1/2");
        assert!(matches!(FieldScalar::rational(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn cyclotomic_construction() {
        let zeta = FieldScalar::zeta(3).unwrap();
        assert_eq!(zeta, z3((0, 1), (1, 1)));
        let zeta2 = FieldScalar::zeta_pow(3, 2).unwrap();
        assert_eq!(zeta2, z3((-1, 1), (-1, 1)));
        let five = FieldScalar::cyclotomic(1, vec![BigRational::from_integer(5.into())]).unwrap();
        assert_eq!(five, FieldScalar::from_int(5));
        assert_eq!(&zeta * &zeta, zeta2);
        assert_eq!(FieldScalar::zeta_pow(3, 3).unwrap(), FieldScalar::one());
    }

    #[test]
    fn cyclotomic_inverse() {
        let zeta = FieldScalar::zeta(3).unwrap();
        assert_eq!(zeta.inv().unwrap(), z3((-1, 1), (-1, 1)));
        assert_eq!(FieldScalar::one().inv().unwrap(), FieldScalar::one());
        let a = z3((1, 1), (2, 1)); // 2ζ+1
        assert_eq!(&a * &a, FieldScalar::from_int(-3));
        assert_eq!(a.inv().unwrap(), &a / &FieldScalar::from_int(-3));
        assert_eq!(FieldScalar::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_conductors_rejected() {
        let a = FieldScalar::zeta(3).unwrap();
        let b = FieldScalar::zeta(5).unwrap();
        assert_eq!(a.checked_add(&b), Err(Error::ConductorMismatch(3, 5)));
        assert_eq!(a.checked_mul(&b), Err(Error::ConductorMismatch(3, 5)));
        // rationals embed in every field
        assert!(a.checked_add(&q(1, 2)).is_ok());
    }

    #[test]
    fn json_forms() {
        assert_eq!(serde_json::to_string(&q(-3, 4)).unwrap(), "\"-3/4\"");
        assert_eq!(serde_json::to_string(&q(5, 1)).unwrap(), "\"5\"");
        let a = z3((1, 3), (2, 3));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"m":3,"coeffs":["1/3","2/3"]}"#);
        let back: FieldScalar = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn rational_square_roots() {
        assert_eq!(q(9, 4).rational_sqrt(), Some(q(3, 2)));
        assert_eq!(q(2, 1).rational_sqrt(), None);
        assert_eq!(q(-4, 1).rational_sqrt(), None);
    }

    fn arb_scalar(cyclo: bool) -> impl Strategy<Value = FieldScalar> {
        let coord = (-20i64..20, 1i64..9);
        proptest::collection::vec(coord, if cyclo { 4 } else { 1 }).prop_map(move |v| {
            let coeffs = v
                .into_iter()
                .map(|(n, d)| BigRational::new(n.into(), d.into()))
                .collect();
            FieldScalar::cyclotomic(if cyclo { 5 } else { 1 }, coeffs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn field_axioms_rational(a in arb_scalar(false), b in arb_scalar(false), c in arb_scalar(false)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), FieldScalar::one());
            }
        }

        #[test]
        fn field_axioms_cyclotomic(a in arb_scalar(true), b in arb_scalar(true), c in arb_scalar(true)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), FieldScalar::one());
            }
        }
    }
}
