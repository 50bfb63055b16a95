use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{FieldScalar, Poly};
use crate::error::{Error, Result};

/// A univariate rational function kept in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g)?, den.div_exact(&g)?)
        };
        let lc_inv = den.leading().inv()?;
        Ok(RationalFunction {
            num: num.scale(&lc_inv),
            den: den.scale(&lc_inv),
        })
    }

    /// Skips the gcd; the caller guarantees `num` and `den` are coprime.
    pub fn from_coprime(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let lc_inv = den.leading().inv()?;
        Ok(RationalFunction {
            num: num.scale(&lc_inv),
            den: den.scale(&lc_inv),
        })
    }

    pub fn zero() -> Self {
        RationalFunction {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: FieldScalar) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn x() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn scale(&self, c: &FieldScalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        Ok(RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
        })
    }

    /// Formal derivative by the quotient rule.
    pub fn derivative(&self) -> Self {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(num, &self.den * &self.den).expect("nonzero denominator")
    }

    pub fn eval(&self, x: &FieldScalar) -> Result<FieldScalar> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(&self.num.eval(x) / &d)
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.display_in(var);
        }
        format!("({})/({})", self.num.display_in(var), self.den.display_in(var))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("L"))
    }
}

impl From<Poly> for RationalFunction {
    fn from(p: Poly) -> Self {
        Self::from_poly(p)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.den == rhs.den {
            return RationalFunction::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominator")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}
