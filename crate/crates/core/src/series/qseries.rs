use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{FieldScalar, Poly, RationalFunction};

/// Truncated power series `c_0 + c_1 q + … + c_N q^N + O(q^{N+1})`.
///
/// The truncation order `N` is inclusive and always equals `coeffs.len() - 1`.
/// Binary operations truncate to the smaller of the two orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<FieldScalar>,
}

impl QSeries {
    /// Pads or cuts `coeffs` to exactly `trunc + 1` entries.
    pub fn new(mut coeffs: Vec<FieldScalar>, trunc: usize) -> Self {
        coeffs.resize(trunc + 1, FieldScalar::zero());
        QSeries { coeffs }
    }

    pub fn zero(trunc: usize) -> Self {
        Self::new(Vec::new(), trunc)
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(FieldScalar::one(), trunc)
    }

    pub fn constant(c: FieldScalar, trunc: usize) -> Self {
        Self::new(vec![c], trunc)
    }

    /// `c q^k`
    pub fn monomial(c: FieldScalar, k: usize, trunc: usize) -> Self {
        let mut coeffs = vec![FieldScalar::zero(); trunc + 1];
        if k <= trunc {
            coeffs[k] = c;
        }
        QSeries { coeffs }
    }

    /// The series `q` itself.
    pub fn q(trunc: usize) -> Self {
        Self::monomial(FieldScalar::one(), 1, trunc)
    }

    pub fn from_ints(coeffs: &[i64], trunc: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| FieldScalar::from_int(c)).collect(), trunc)
    }

    pub fn from_poly(p: &Poly, trunc: usize) -> Self {
        Self::new(p.coeffs().to_vec(), trunc)
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[FieldScalar] {
        &self.coeffs
    }

    /// Zero beyond the truncation order.
    pub fn coeff(&self, d: usize) -> FieldScalar {
        self.coeffs.get(d).cloned().unwrap_or_else(FieldScalar::zero)
    }

    pub fn constant_term(&self) -> &FieldScalar {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(FieldScalar::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        Self::new(self.coeffs.clone(), trunc.min(self.trunc()))
    }

    /// Raises the truncation order by zero padding; callers must know the
    /// padded coefficients are meaningful.
    pub(crate) fn extend_zero(&self, trunc: usize) -> Self {
        Self::new(self.coeffs.clone(), trunc)
    }

    pub fn scale(&self, c: &FieldScalar) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by `q^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![FieldScalar::zero(); k];
        coeffs.extend(self.coeffs.iter().take(self.coeffs.len().saturating_sub(k)).cloned());
        Self::new(coeffs, self.trunc())
    }

    /// Division by `q`; the truncation order drops by one.
    pub fn div_q(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain("division by q of a series with nonzero constant term".into()));
        }
        if self.trunc() == 0 {
            return Err(Error::Domain("no coefficients left after division by q".into()));
        }
        Ok(QSeries {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }

    /// Multiplicative inverse by the recurrence `b_d = -(Σ_{k≥1} a_k b_{d-k}) / a_0`.
    pub fn inverse(&self) -> Result<Self> {
        let a0_inv = self.coeffs[0]
            .inv()
            .map_err(|_| Error::Domain("inverting a series with zero constant term".into()))?;
        let n = self.coeffs.len();
        let mut out: Vec<FieldScalar> = Vec::with_capacity(n);
        out.push(a0_inv.clone());
        for d in 1..n {
            let mut acc = FieldScalar::zero();
            for k in 1..=d {
                let a = &self.coeffs[k];
                if !a.is_zero() {
                    acc = &acc + &(a * &out[d - k]);
                }
            }
            out.push(-&(&acc * &a0_inv));
        }
        Ok(QSeries { coeffs: out })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Square root whose constant term is the rational square root of `c_0`.
    ///
    /// Outside Q a root of the constant term must be supplied through
    /// [`QSeries::sqrt_with_root`], unless `c_0 = 1`.
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        let root = c0
            .rational_sqrt()
            .ok_or_else(|| Error::NonSquare(c0.to_string()))?;
        self.sqrt_with_root(&root)
    }

    pub fn sqrt_with_root(&self, root: &FieldScalar) -> Result<Self> {
        if root.is_zero() || &(root * root) != &self.coeffs[0] {
            return Err(Error::NonSquare(self.coeffs[0].to_string()));
        }
        let two_root_inv = (root + root).inv()?;
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n);
        out.push(root.clone());
        for d in 1..n {
            let mut acc = self.coeffs[d].clone();
            for k in 1..d {
                acc = &acc - &(&out[k] * &out[d - k]);
            }
            out.push(&acc * &two_root_inv);
        }
        Ok(QSeries { coeffs: out })
    }

    /// The substitution `q ↦ c q`.
    pub fn rescale_q(&self, c: &FieldScalar) -> Self {
        let mut pw = FieldScalar::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            coeffs.push(a * &pw);
            pw = &pw * c;
        }
        QSeries { coeffs }
    }

    /// Euler operator `D = q d/dq`: the q^d coefficient is multiplied by d.
    pub fn euler_d(&self) -> Self {
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(d, c)| c * &FieldScalar::from_int(d as i64))
                .collect(),
        }
    }

    /// The unique `x` with `D x = self` and `x(0) = c0`.
    pub fn euler_anti_d(&self, c0: &FieldScalar) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonIntegrable(self.coeffs[0].to_string()));
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        coeffs.push(c0.clone());
        for (d, c) in self.coeffs.iter().enumerate().skip(1) {
            coeffs.push(c / &FieldScalar::from_int(d as i64));
        }
        Ok(QSeries { coeffs })
    }

    /// `exp(self)` for a series without constant term, through `D e = e · D a`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::Domain(format!(
                "exp of a series with constant term {}",
                self.coeffs[0]
            )));
        }
        let da = self.euler_d();
        let n = self.coeffs.len();
        let mut out = Vec::with_capacity(n);
        out.push(FieldScalar::one());
        for d in 1..n {
            let mut acc = FieldScalar::zero();
            for k in 1..=d {
                if !da.coeffs[k].is_zero() {
                    acc = &acc + &(&da.coeffs[k] * &out[d - k]);
                }
            }
            out.push(&acc / &FieldScalar::from_int(d as i64));
        }
        Ok(QSeries { coeffs: out })
    }

    /// Logarithm of a series with constant term 1.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::Domain(format!(
                "log of a series with constant term {}",
                self.coeffs[0]
            )));
        }
        self.euler_d().checked_div(self)?.euler_anti_d(&FieldScalar::zero())
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QSeries::one(self.trunc());
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

    /// Substitutes this series into a polynomial.
    /// `p(self)`, expanded around the constant term so that powers of
    /// `self - c_0` beyond the truncation order are never formed.
    pub fn eval_poly(&self, p: &Poly) -> Self {
        let trunc = self.trunc();
        let c0 = &self.coeffs[0];
        let shifted = if c0.is_zero() {
            p.clone()
        } else {
            p.compose(&Poly::linear(FieldScalar::one(), c0.clone()))
        };
        let mut w = self.clone();
        w.coeffs[0] = FieldScalar::zero();
        let mut acc = QSeries::constant(shifted.coeff(0), trunc);
        let mut pow = QSeries::one(trunc);
        let top = shifted.degree().unwrap_or(0).min(trunc);
        for c in shifted.coeffs().iter().take(top + 1).skip(1) {
            pow = &pow * &w;
            if !c.is_zero() {
                acc = &acc + &pow.scale(c);
            }
        }
        acc
    }

    pub fn eval_rational(&self, r: &RationalFunction) -> Result<Self> {
        self.eval_poly(r.num()).checked_div(&self.eval_poly(r.den()))
    }

    /// Power-series root of `Σ_j poly[j] X^j = 0` with `X(0) = x0`, by Newton
    /// iteration doubling the precision at every step.
    pub fn newton_root(poly: &[QSeries], x0: &FieldScalar) -> Result<Self> {
        if poly.is_empty() {
            return Err(Error::Degenerate("empty polynomial".into()));
        }
        let trunc = poly.iter().map(QSeries::trunc).min().unwrap_or(0);
        let deriv: Vec<QSeries> = poly
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&FieldScalar::from_int(j as i64)))
            .collect();
        let eval_at = |coeffs: &[QSeries], x: &QSeries, prec: usize| -> QSeries {
            let mut acc = QSeries::zero(prec);
            for c in coeffs.iter().rev() {
                acc = &(&acc * x) + &c.truncate(prec);
            }
            acc
        };
        let x0_series = QSeries::constant(x0.clone(), 0);
        if !eval_at(poly, &x0_series, 0).is_zero() {
            return Err(Error::Degenerate(format!("{x0} is not a root at q = 0")));
        }
        if eval_at(&deriv, &x0_series, 0).is_zero() {
            return Err(Error::Degenerate(format!("{x0} is a multiple root at q = 0")));
        }
        let mut x = x0_series;
        let mut prec = 0usize;
        while prec < trunc {
            prec = (2 * prec + 1).min(trunc);
            x = x.extend_zero(prec);
            let value = eval_at(poly, &x, prec);
            let slope = eval_at(&deriv, &x, prec);
            x = &x - &(&value * &slope.inverse()?);
        }
        Ok(x)
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        QSeries {
            coeffs: (0..n).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        QSeries {
            coeffs: (0..n).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![FieldScalar::zero(); n];
        for (i, a) in self.coeffs[..n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        QSeries { coeffs: out }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = Poly::new(self.coeffs.clone());
        if poly.is_zero() {
            write!(f, "O(q^{})", self.trunc() + 1)
        } else {
            write!(f, "{} + O(q^{})", poly.display_in("q"), self.trunc() + 1)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct QSeriesJson {
    var: String,
    trunc: usize,
    coeffs: Vec<FieldScalar>,
}

impl Serialize for QSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QSeriesJson {
            var: "q".into(),
            trunc: self.trunc(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = QSeriesJson::deserialize(d)?;
        if raw.coeffs.len() != raw.trunc + 1 {
            return Err(serde::de::Error::custom(format!(
                "expected {} coefficients, found {}",
                raw.trunc + 1,
                raw.coeffs.len()
            )));
        }
        Ok(QSeries::new(raw.coeffs, raw.trunc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> FieldScalar {
        FieldScalar::rational(n, d).unwrap()
    }

    fn s(c: &[i64], n: usize) -> QSeries {
        QSeries::from_ints(c, n)
    }

    #[test]
    fn products() {
        assert_eq!(&s(&[1, 1], 6) * &s(&[1, -1], 6), s(&[1, 0, -1], 6));
        assert_eq!(&s(&[1; 7], 6) * &s(&[1, -1], 6), QSeries::one(6));
        // truncation aligns to the shorter operand
        assert_eq!((&s(&[1, 1], 6) * &s(&[1, 1], 2)).trunc(), 2);
    }

    #[test]
    fn inverses() {
        assert_eq!(s(&[1, -1], 5).inverse().unwrap(), s(&[1; 6], 5));
        assert_eq!(QSeries::one(4).inverse().unwrap(), QSeries::one(4));
        // long division of 1 / (1 + 3q - 9q^2)
        assert_eq!(s(&[1, 3, -9], 3).inverse().unwrap(), s(&[1, -3, 18, -81], 3));
        assert!(s(&[0, 1], 3).inverse().is_err());
    }

    #[test]
    fn square_roots() {
        // (1+8q)^{1/2} = 1 + 4q - 8q^2 + 32q^3 - 160q^4
        assert_eq!(s(&[1, 8], 4).sqrt().unwrap(), s(&[1, 4, -8, 32, -160], 4));
        assert_eq!(QSeries::one(3).sqrt().unwrap(), QSeries::one(3));
        let expected = QSeries::new(vec![q(2, 1), q(1, 1), q(-1, 4), q(1, 8)], 3);
        assert_eq!(s(&[4, 4], 3).sqrt().unwrap(), expected);
        assert!(matches!(s(&[2, 1], 3).sqrt(), Err(Error::NonSquare(_))));
    }

    #[test]
    fn euler_operator_and_inverse() {
        assert!(QSeries::one(4).euler_d().is_zero());
        assert_eq!(QSeries::monomial(q(1, 1), 3, 4).euler_d(), s(&[0, 0, 0, 3], 4));
        let l0 = s(&[1, -1, 3, -13], 3);
        let dl0 = s(&[0, -1, 6, -39], 3);
        assert_eq!(l0.euler_d(), dl0);
        assert_eq!(dl0.euler_anti_d(&q(1, 1)).unwrap(), l0);
        assert_eq!(QSeries::zero(3).euler_anti_d(&q(1, 1)).unwrap(), QSeries::one(3));
        let mu = (&l0 - &QSeries::one(3)).euler_anti_d(&FieldScalar::zero()).unwrap();
        assert_eq!(mu, QSeries::new(vec![q(0, 1), q(-1, 1), q(3, 2), q(-13, 3)], 3));
        assert!(matches!(l0.euler_anti_d(&q(0, 1)), Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn exponential() {
        assert_eq!(QSeries::zero(3).exp().unwrap(), QSeries::one(3));
        let a = QSeries::new(vec![q(0, 1), q(2, 1), q(3, 1), q(20, 3)], 3);
        assert_eq!(a.exp().unwrap(), s(&[1, 2, 5, 14], 3));
        assert!(QSeries::one(3).exp().is_err());
    }

    #[test]
    fn newton_on_quadratic() {
        // (1 - q) X^2 - 3 X + 2
        let poly = vec![s(&[2], 8), s(&[-3], 8), s(&[1, -1], 8)];
        let l0 = QSeries::newton_root(&poly, &q(1, 1)).unwrap();
        let l1 = QSeries::newton_root(&poly, &q(2, 1)).unwrap();
        assert_eq!(l0.truncate(3), s(&[1, -1, 3, -13], 3));
        assert_eq!(l1.truncate(3), s(&[2, 4, 0, 16], 3));
        let geometric = s(&[1, -1], 8).inverse().unwrap();
        assert_eq!(&l0 + &l1, geometric.scale(&q(3, 1)));
        assert_eq!(&l0 * &l1, geometric.scale(&q(2, 1)));
        for x in [&l0, &l1] {
            let residual = &(&(&poly[2] * &(x * x)) + &(&poly[1] * x)) + &poly[0];
            assert!(residual.is_zero());
        }
    }

    #[test]
    fn newton_rejects_bad_starts() {
        let poly = vec![s(&[1], 4), s(&[-2], 4), s(&[1, 1], 4)]; // (X-1)^2 + qX^2
        assert!(matches!(
            QSeries::newton_root(&poly, &q(1, 1)),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            QSeries::newton_root(&poly, &q(3, 1)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn json_shape() {
        let a = QSeries::new(vec![q(1, 1), q(-3, 2)], 1);
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"var":"q","trunc":1,"coeffs":["1","-3/2"]}"#);
        assert_eq!(serde_json::from_str::<QSeries>(&text).unwrap(), a);
        assert!(serde_json::from_str::<QSeries>(r#"{"var":"q","trunc":3,"coeffs":["1"]}"#).is_err());
    }

    fn arb_series(n: usize) -> impl Strategy<Value = QSeries> {
        proptest::collection::vec((-9i64..9, 1i64..5), n + 1).prop_map(move |v| {
            QSeries::new(v.into_iter().map(|(a, b)| q(a, b)).collect(), n)
        })
    }

    proptest! {
        #[test]
        fn anti_d_inverts_d(a in arb_series(10)) {
            let c0 = a.constant_term().clone();
            prop_assert_eq!(a.euler_d().euler_anti_d(&c0).unwrap(), a);
        }

        #[test]
        fn sqrt_squares_back(a in arb_series(10)) {
            let mut coeffs = a.coeffs().to_vec();
            coeffs[0] = FieldScalar::one();
            let unit = QSeries::new(coeffs, 10);
            let r = unit.sqrt().unwrap();
            prop_assert_eq!(&r * &r, unit);
        }

        #[test]
        fn log_exp_round_trip(a in arb_series(8)) {
            let mut coeffs = a.coeffs().to_vec();
            coeffs[0] = FieldScalar::zero();
            let a = QSeries::new(coeffs, 8);
            prop_assert_eq!(a.exp().unwrap().log().unwrap(), a);
        }
    }
}
