//! Arithmetic in Q(ζ_m), stored as residues modulo the m-th cyclotomic polynomial.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Coefficients of Φ_m, lowest degree first. Monic, degree φ(m).
pub fn cyclotomic_polynomial(m: u32) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&m) {
        return p.clone();
    }
    assert!(m >= 1, "conductor must be positive");
    // x^m - 1 divided by Φ_d for every proper divisor d of m
    let mut poly = vec![BigInt::zero(); m as usize + 1];
    poly[0] = -BigInt::one();
    poly[m as usize] = BigInt::one();
    for d in 1..m {
        if m % d == 0 {
            poly = exact_div_monic(&poly, &cyclotomic_polynomial(d));
        }
    }
    let poly = Arc::new(poly);
    cache.write().unwrap().insert(m, poly.clone());
    poly
}

fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quo = vec![BigInt::zero(); num.len() - dn];
    for k in (0..quo.len()).rev() {
        let c = rem[k + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dc) in den.iter().enumerate() {
            rem[k + j] -= &c * dc;
        }
        quo[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quo
}

pub fn euler_phi(m: u32) -> usize {
    cyclotomic_polynomial(m).len() - 1
}

/// An element of Q(ζ_m) in the power basis 1, ζ, …, ζ^{φ(m)-1}, stored as
/// integer numerators over one positive denominator in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    conductor: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclotomic {
    /// Reduces an arbitrary coefficient vector modulo Φ_m.
    pub fn new(conductor: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::Domain("cyclotomic conductor must be at least 1".into()));
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Ok(Self::normalized(conductor, reduce(conductor, num), den))
    }

    fn normalized(conductor: u32, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if den.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for c in num.iter_mut() {
                *c /= &g;
            }
            den /= &g;
        }
        if num.iter().all(Zero::is_zero) {
            den = BigInt::one();
        }
        Self { conductor, num, den }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    /// The rational value when only the constant coordinate is nonzero.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub(crate) fn add(&self, other: &Self) -> Self {
        if self.den == other.den {
            let num = self.num.iter().zip(&other.num).map(|(a, b)| a + b).collect();
            return Self::normalized(self.conductor, num, self.den.clone());
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        Self::normalized(self.conductor, num, &self.den * &other.den)
    }

    pub(crate) fn neg(&self) -> Self {
        Self {
            conductor: self.conductor,
            num: self.num.iter().map(|a| -a).collect(),
            den: self.den.clone(),
        }
    }

    pub(crate) fn scale(&self, c: &BigRational) -> Self {
        let num = self.num.iter().map(|a| a * c.numer()).collect();
        Self::normalized(self.conductor, num, &self.den * c.denom())
    }

    pub(crate) fn add_rational(&self, c: &BigRational) -> Self {
        let mut num: Vec<BigInt> = self.num.iter().map(|a| a * c.denom()).collect();
        num[0] += c.numer() * &self.den;
        Self::normalized(self.conductor, num, &self.den * c.denom())
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        let n = self.num.len();
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::normalized(self.conductor, reduce(self.conductor, prod), &self.den * &other.den)
    }

    /// Inverse via the extended Euclidean algorithm against Φ_m.
    pub(crate) fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let modulus: Vec<BigRational> = cyclotomic_polynomial(self.conductor)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        // invariant: s * a ≡ r (mod Φ_m)
        let (mut r0, mut r1) = (modulus, trim(self.coeffs()));
        let (mut s0, mut s1) = (Vec::new(), vec![BigRational::one()]);
        while r1.len() > 1 {
            let (q, r) = divrem(&r0, &r1);
            let s2 = sub(&s0, &mul_raw(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r1 is a nonzero constant since Φ_m is irreducible
        let c = r1[0].recip();
        Self::new(self.conductor, s1.into_iter().map(|x| x * &c).collect())
    }
}

/// Reduces an integer coefficient vector modulo the monic Φ_m.
fn reduce(m: u32, mut coeffs: Vec<BigInt>) -> Vec<BigInt> {
    let phi_poly = cyclotomic_polynomial(m);
    let phi = phi_poly.len() - 1;
    for k in (phi..coeffs.len()).rev() {
        let c = std::mem::take(&mut coeffs[k]);
        if c.is_zero() {
            continue;
        }
        for (j, pc) in phi_poly[..phi].iter().enumerate() {
            if !pc.is_zero() {
                coeffs[k - phi + j] -= &c * pc;
            }
        }
    }
    coeffs.resize(phi, BigInt::zero());
    coeffs
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn mul_raw(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    if rem.len() <= db {
        return (Vec::new(), trim(rem));
    }
    let lc_inv = b[db].recip();
    let mut quo = vec![BigRational::zero(); rem.len() - db];
    for k in (0..quo.len()).rev() {
        let c = &rem[k + db] * &lc_inv;
        if c.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            rem[k + j] -= &c * bc;
        }
        quo[k] = c;
    }
    rem.truncate(db);
    (trim(quo), trim(rem))
}

pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl std::fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = fmt_rational(&c.abs());
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let gen = match k {
                0 => String::new(),
                1 => format!("zeta{}", self.conductor),
                _ => format!("zeta{}^{}", self.conductor, k),
            };
            match (k, c.abs().is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "{gen}")?,
                (_, false) => write!(f, "{mag}*{gen}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
