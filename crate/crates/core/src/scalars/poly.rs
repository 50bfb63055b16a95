use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::FieldScalar;
use crate::error::{Error, Result};

/// Dense univariate polynomial over [`FieldScalar`], lowest degree first.
///
/// Trailing zero coefficients are never stored; the zero polynomial has an
/// empty coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<FieldScalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldScalar>) -> Self {
        while coeffs.last().is_some_and(FieldScalar::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(FieldScalar::one())
    }

    pub fn constant(c: FieldScalar) -> Self {
        Self::new(vec![c])
    }

    /// The indeterminate itself.
    pub fn x() -> Self {
        Self::monomial(FieldScalar::one(), 1)
    }

    pub fn monomial(c: FieldScalar, deg: usize) -> Self {
        let mut coeffs = vec![FieldScalar::zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs)
    }

    /// `scale * x + shift`
    pub fn linear(scale: FieldScalar, shift: FieldScalar) -> Self {
        Self::new(vec![shift, scale])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| FieldScalar::from_int(c)).collect())
    }

    /// ∏ (x - r) over the given roots.
    pub fn from_roots(roots: &[FieldScalar]) -> Self {
        roots.iter().fold(Poly::one(), |acc, r| {
            &acc * &Poly::linear(FieldScalar::one(), -r)
        })
    }

    pub fn coeffs(&self) -> &[FieldScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> FieldScalar {
        self.coeffs.get(k).cloned().unwrap_or_else(FieldScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> FieldScalar {
        self.coeffs.last().cloned().unwrap_or_else(FieldScalar::zero)
    }

    pub fn scale(&self, c: &FieldScalar) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().inv().expect("nonzero leading coefficient"))
    }

    pub fn eval(&self, x: &FieldScalar) -> FieldScalar {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldScalar::zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &FieldScalar::from_int(k as i64))
                .collect(),
        )
    }

    /// Polynomial antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut coeffs = vec![FieldScalar::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / &FieldScalar::from_int(k as i64 + 1)),
        );
        Poly::new(coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    /// p(q(x))
    pub fn compose(&self, inner: &Poly) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * inner) + &Poly::constant(c.clone()))
    }

    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let lc_inv = divisor.leading().inv()?;
        let mut rem = self.coeffs.clone();
        let mut quo = vec![FieldScalar::zero(); rem.len() - db];
        for k in (0..quo.len()).rev() {
            let c = &rem[k + db] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * d);
            }
            quo[k] = c;
        }
        rem.truncate(db);
        Ok((Poly::new(quo), Poly::new(rem)))
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Domain(format!("{divisor} does not divide {self}")));
        }
        Ok(q)
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.monic(), other.monic());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = std::mem::replace(&mut b, r.monic());
        }
        a
    }

    /// Returns `(g, s, t)` with `s*self + t*other = g`, g monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1).expect("nonzero divisor");
            let s2 = &s0 - &(&q * &s1);
            let t2 = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.leading().inv().expect("nonzero");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Multiplicative order of the root 0: the largest k with x^k | self.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides by x^k, dropping lower coefficients.
    pub fn shift_down(&self, k: usize) -> Poly {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldScalar::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly::new(coeffs)
    }

    /// Renders with the given variable name, e.g. `3*L^2 - 4`.
    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut text = c.to_string();
            let compound = text.contains(' ');
            let negative = !compound && text.starts_with('-');
            if negative {
                text.remove(0);
            }
            if compound {
                text = format!("({text})");
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let term = match (k, text.as_str()) {
                (0, _) => text,
                (_, "1") => mono,
                _ => format!("{text}*{mono}"),
            };
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldScalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_and_gcd() {
        // (x-1)(x-2) and (x-2)(x+3)
        let a = Poly::from_ints(&[2, -3, 1]);
        let b = Poly::from_ints(&[-6, 1, 1]);
        assert_eq!(a.gcd(&b), Poly::from_ints(&[-2, 1]));
        let (q, r) = a.div_rem(&Poly::from_ints(&[-1, 1])).unwrap();
        assert_eq!(q, Poly::from_ints(&[-2, 1]));
        assert!(r.is_zero());
        assert!(a.div_rem(&Poly::zero()).is_err());
    }

    #[test]
    fn extended_gcd_identity() {
        let a = Poly::from_ints(&[1, 0, 1]);
        let b = Poly::from_ints(&[3, 2]);
        let (g, s, t) = a.ext_gcd(&b);
        assert!(g.is_one());
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn rendering() {
        assert_eq!(Poly::from_ints(&[-4, 3]).display_in("L"), "3*L - 4");
        assert_eq!(Poly::from_ints(&[2, -3, 1]).display_in("L"), "L^2 - 3*L + 2");
        assert_eq!(Poly::from_ints(&[0, -1]).display_in("z"), "-z");
    }

    #[test]
    fn roots_and_composition() {
        let p = Poly::from_roots(&[FieldScalar::from_int(1), FieldScalar::from_int(2)]);
        assert_eq!(p, Poly::from_ints(&[2, -3, 1]));
        let shifted = p.compose(&Poly::from_ints(&[1, 1]));
        assert_eq!(shifted, Poly::from_ints(&[0, -1, 1]));
        assert_eq!(p.integral().derivative(), p);
    }
}
