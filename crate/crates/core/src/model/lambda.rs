use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{parse_rational, FieldScalar, Poly};
use crate::series::QSeries;

/// Torus weights `λ_0..λ_n` of local P^n, specialized to exact scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaConfig {
    lambdas: Vec<FieldScalar>,
    /// `sym[k]` is the k-th elementary symmetric function; `sym[0] = 1`.
    sym: Vec<FieldScalar>,
}

impl LambdaConfig {
    /// Validates `n ≥ 1`, pairwise distinct and nonzero weights, and a single
    /// working field.
    pub fn new(lambdas: Vec<FieldScalar>) -> Result<Self> {
        if lambdas.len() < 2 {
            return Err(Error::Domain(format!(
                "need at least two weights (n >= 1), got {}",
                lambdas.len()
            )));
        }
        let mut conductor = 1;
        for l in &lambdas {
            if l.is_zero() {
                return Err(Error::Degenerate("weights must be nonzero".into()));
            }
            match (conductor, l.conductor()) {
                (_, 1) => {}
                (1, m) => conductor = m,
                (a, b) if a != b => return Err(Error::ConductorMismatch(a, b)),
                _ => {}
            }
        }
        for (i, a) in lambdas.iter().enumerate() {
            for b in &lambdas[i + 1..] {
                if a == b {
                    return Err(Error::Degenerate(format!("repeated weight {a}")));
                }
            }
        }
        // coefficients of ∏(x + λ_i) are the elementary symmetric functions
        let neg: Vec<FieldScalar> = lambdas.iter().map(|l| -l).collect();
        let p = Poly::from_roots(&neg);
        let deg = lambdas.len();
        let sym = (0..=deg).map(|k| p.coeff(deg - k)).collect();
        Ok(LambdaConfig { lambdas, sym })
    }

    /// `λ_i = ζ_m^i` for `i = 0..m-1`, i.e. n = m - 1.
    pub fn roots_of_unity(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain("roots-of-unity specialization needs m >= 2".into()));
        }
        let lambdas = (0..m as i64)
            .map(|i| FieldScalar::zeta_pow(m, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(lambdas)
    }

    /// The point `(1, -1, (2ζ_3 + 1)/3)` of the n = 2 locus `s_2^2 = 3 s_1 s_3`.
    pub fn spl2_canonical() -> Self {
        let third = BigRational::new(1.into(), 3.into());
        let two_thirds = BigRational::new(2.into(), 3.into());
        let l2 = FieldScalar::cyclotomic(3, vec![third, two_thirds]).expect("conductor 3");
        Self::new(vec![FieldScalar::from_int(1), FieldScalar::from_int(-1), l2]).expect("valid weights")
    }

    pub fn n(&self) -> usize {
        self.lambdas.len() - 1
    }

    pub fn lambdas(&self) -> &[FieldScalar] {
        &self.lambdas
    }

    pub fn lambda(&self, i: usize) -> &FieldScalar {
        &self.lambdas[i]
    }

    /// Elementary symmetric function `s_k`, with `s_0 = 1` and `s_k = 0` for `k > n + 1`.
    pub fn s(&self, k: usize) -> FieldScalar {
        self.sym.get(k).cloned().unwrap_or_else(FieldScalar::zero)
    }

    pub fn conductor(&self) -> u32 {
        self.lambdas.iter().map(FieldScalar::conductor).max().unwrap_or(1)
    }

    /// `λ_i = ζ_{n+1}^i` for every i.
    pub fn is_roots_of_unity(&self) -> bool {
        let m = (self.n() + 1) as u32;
        self.lambdas
            .iter()
            .enumerate()
            .all(|(i, l)| FieldScalar::zeta_pow(m, i as i64).is_ok_and(|z| &z == l))
    }

    /// n = 2 and `s_2^2 - 3 s_1 s_3 = 0`.
    pub fn is_spl2(&self) -> bool {
        self.n() == 2 && (&(&self.s(2) * &self.s(2)) - &(&FieldScalar::from_int(3) * &(&self.s(1) * &self.s(3)))).is_zero()
    }

    /// `p(L) = ∏ (L - λ_i)`.
    pub fn char_poly(&self) -> Poly {
        Poly::from_roots(&self.lambdas)
    }

    /// `f_n(L) = Σ_k (-1)^k (k+1) s_{k+1} L^{n-k}`, which equals `L p'(L) - (n+1) p(L)`.
    pub fn f_poly(&self) -> Poly {
        let n = self.n();
        let mut coeffs = vec![FieldScalar::zero(); n + 1];
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            coeffs[n - k] = &FieldScalar::from_int(sign * (k as i64 + 1)) * &self.s(k + 1);
        }
        Poly::new(coeffs)
    }

    /// `λ_i ∏_{j≠i} (λ_i - λ_j)`, the value of `f_n` at `λ_i`.
    pub fn f_at_root(&self, i: usize) -> FieldScalar {
        let li = &self.lambdas[i];
        self.lambdas
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(li.clone(), |acc, (_, lj)| &acc * &(li - lj))
    }

    /// Coefficient `c` of the q-term in the defining polynomial
    /// `p(L) - c q L^{n+1}` of the L-series: `c = (-(n+1))^{n+1}`.
    ///
    /// This is the normalization of q in which the hypergeometric series and
    /// its Picard–Fuchs operator are written.
    pub fn q_scale(&self) -> FieldScalar {
        let m = self.n() as i64 + 1;
        FieldScalar::from_int(-m).pow(m).expect("nonzero")
    }

    /// Coefficients (in L) of `p(L) - c q L^{n+1}` as q-series.
    pub fn defining_polynomial(&self, trunc: usize) -> Vec<QSeries> {
        let p = self.char_poly();
        let mut coeffs: Vec<QSeries> = (0..=self.n() + 1)
            .map(|k| QSeries::constant(p.coeff(k), trunc))
            .collect();
        let top = coeffs.last_mut().expect("degree n+1");
        *top = &*top - &QSeries::monomial(self.q_scale(), 1, trunc);
        coeffs
    }

    /// The root `L_i(q)` of the defining polynomial with `L_i(0) = λ_i`.
    pub fn l_series(&self, i: usize, trunc: usize) -> Result<QSeries> {
        QSeries::newton_root(&self.defining_polynomial(trunc), &self.lambdas[i])
    }

    /// `D L_i` from the closed form `L p(L) / f_n(L)` evaluated at `L_i`.
    pub fn dl_series(&self, l: &QSeries) -> Result<QSeries> {
        let lp = l * &l.eval_poly(&self.char_poly());
        lp.checked_div(&l.eval_poly(&self.f_poly()))
    }
}

impl Serialize for LambdaConfig {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.lambdas.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LambdaConfig {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lambdas = Vec::<FieldScalar>::deserialize(d)?;
        LambdaConfig::new(lambdas).map_err(serde::de::Error::custom)
    }
}

/// Command-line form of a weight configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaSpec {
    /// Explicit rational weights, e.g. `1,2,4`.
    List(Vec<BigRational>),
    /// `zeta:m`, the weights `ζ_m^i`.
    RootsOfUnity(u32),
    /// `spl2-canonical`
    Spl2Canonical,
}

impl LambdaSpec {
    /// Builds the configuration, checking it against the requested n.
    pub fn resolve(&self, n: Option<usize>) -> Result<LambdaConfig> {
        let cfg = match self {
            LambdaSpec::List(v) => {
                LambdaConfig::new(v.iter().cloned().map(FieldScalar::Rational).collect())?
            }
            LambdaSpec::RootsOfUnity(m) => LambdaConfig::roots_of_unity(*m)?,
            LambdaSpec::Spl2Canonical => LambdaConfig::spl2_canonical(),
        };
        if let Some(n) = n {
            if cfg.n() != n {
                return Err(Error::Domain(format!(
                    "--lambda {self} gives {} weights but n = {n} needs {}",
                    cfg.n() + 1,
                    n + 1
                )));
            }
        }
        Ok(cfg)
    }
}

impl FromStr for LambdaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "spl2-canonical" {
            return Ok(LambdaSpec::Spl2Canonical);
        }
        if let Some(m) = s.strip_prefix("zeta:") {
            let m = m
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad conductor in {s:?}")))?;
            return Ok(LambdaSpec::RootsOfUnity(m));
        }
        let values = s.split(',').map(parse_rational).collect::<Result<Vec<_>>>()?;
        Ok(LambdaSpec::List(values))
    }
}

impl fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaSpec::List(v) => {
                let parts: Vec<String> = v.iter().map(|r| FieldScalar::Rational(r.clone()).to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            LambdaSpec::RootsOfUnity(m) => write!(f, "zeta:{m}"),
            LambdaSpec::Spl2Canonical => write!(f, "spl2-canonical"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> LambdaConfig {
        LambdaConfig::new(v.iter().map(|&x| FieldScalar::from_int(x)).collect()).unwrap()
    }

    #[test]
    fn symmetric_functions_and_polynomials() {
        let cfg = ints(&[1, 2]);
        assert_eq!(cfg.s(1), FieldScalar::from_int(3));
        assert_eq!(cfg.s(2), FieldScalar::from_int(2));
        assert_eq!(cfg.char_poly(), Poly::from_ints(&[2, -3, 1]));
        assert_eq!(cfg.f_poly(), Poly::from_ints(&[-4, 3]));
        let cfg = ints(&[1, 2, 4]);
        // s1 L^2 - 2 s2 L + 3 s3 with s = (7, 14, 8)
        assert_eq!(cfg.f_poly(), Poly::from_ints(&[24, -28, 7]));
    }

    #[test]
    fn roots_of_unity_point() {
        let cfg = LambdaConfig::roots_of_unity(3).unwrap();
        assert_eq!(cfg.char_poly(), Poly::from_ints(&[-1, 0, 0, 1]));
        assert!(cfg.is_roots_of_unity());
        assert!(cfg.is_spl2());
        assert!(!ints(&[1, 2, 4]).is_roots_of_unity());
    }

    #[test]
    fn spl2_point() {
        let cfg = LambdaConfig::spl2_canonical();
        assert!(cfg.is_spl2());
        assert!(!cfg.is_roots_of_unity());
        assert!(!ints(&[1, 2, 4]).is_spl2());
    }

    #[test]
    fn f_identity_holds_at_every_weight() {
        let cfgs = [
            ints(&[1, 2]),
            ints(&[1, 2, 4]),
            ints(&[1, 2, 4, 5]),
            ints(&[-3, 7, 2]),
            LambdaConfig::roots_of_unity(3).unwrap(),
            LambdaConfig::spl2_canonical(),
        ];
        for cfg in &cfgs {
            let p = cfg.char_poly();
            let n1 = FieldScalar::from_int(cfg.n() as i64 + 1);
            let alt = &(&Poly::x() * &p.derivative()) - &p.scale(&n1);
            assert_eq!(alt, cfg.f_poly());
            for i in 0..=cfg.n() {
                assert_eq!(cfg.f_poly().eval(cfg.lambda(i)), cfg.f_at_root(i));
                assert!(p.eval(cfg.lambda(i)).is_zero());
            }
        }
    }

    #[test]
    fn invalid_weights() {
        assert!(matches!(
            LambdaConfig::new(vec![FieldScalar::one(), FieldScalar::one()]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            LambdaConfig::new(vec![FieldScalar::zero(), FieldScalar::one()]),
            Err(Error::Degenerate(_))
        ));
        assert!(LambdaConfig::new(vec![FieldScalar::one()]).is_err());
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("zeta:3".parse::<LambdaSpec>().unwrap(), LambdaSpec::RootsOfUnity(3));
        assert_eq!("spl2-canonical".parse::<LambdaSpec>().unwrap(), LambdaSpec::Spl2Canonical);
        let spec: LambdaSpec = "1, 2/3".parse().unwrap();
        assert_eq!(spec.to_string(), "1,2/3");
        assert!(spec.resolve(Some(2)).is_err());
        assert_eq!(spec.resolve(Some(1)).unwrap().n(), 1);
        assert!("1,x".parse::<LambdaSpec>().is_err());
    }

    #[test]
    fn l_series_in_hypergeometric_normalization() {
        // (1-4q)L^2 - 3L + 2: L_0 = 1 - 4q + 48q^2 - 832q^3, the q -> 4q
        // rescaling of the roots of (1-q)L^2 - 3L + 2
        let cfg = ints(&[1, 2]);
        let l0 = cfg.l_series(0, 3).unwrap();
        let l1 = cfg.l_series(1, 3).unwrap();
        assert_eq!(l0, QSeries::from_ints(&[1, -4, 48, -832], 3));
        assert_eq!(l1, QSeries::from_ints(&[2, 16, 0, 1024], 3));
    }

    #[test]
    fn l_series_in_unit_normalization() {
        // q ↦ q/4 gives the roots of (1-q)L^2 - 3L + 2
        let cfg = ints(&[1, 2]);
        let quarter = FieldScalar::rational(1, 4).unwrap();
        let l0 = cfg.l_series(0, 3).unwrap();
        assert_eq!(l0.rescale_q(&quarter), QSeries::from_ints(&[1, -1, 3, -13], 3));
        assert_eq!(cfg.l_series(1, 3).unwrap().rescale_q(&quarter), QSeries::from_ints(&[2, 4, 0, 16], 3));
        let dl = cfg.dl_series(&l0).unwrap();
        assert_eq!(dl, l0.euler_d());
        assert_eq!(dl.rescale_q(&quarter), QSeries::from_ints(&[0, -1, 6, -39], 3));
    }

    #[test]
    fn defining_polynomial_and_vieta() {
        let n_trunc = 12;
        for cfg in [ints(&[1, 2]), ints(&[1, 2, 4]), LambdaConfig::spl2_canonical()] {
            let poly = cfg.defining_polynomial(n_trunc);
            let mut sum = QSeries::zero(n_trunc);
            for i in 0..=cfg.n() {
                let l = cfg.l_series(i, n_trunc).unwrap();
                let mut acc = QSeries::zero(n_trunc);
                for c in poly.iter().rev() {
                    acc = &(&acc * &l) + c;
                }
                assert!(acc.is_zero());
                let dl = cfg.dl_series(&l).unwrap();
                assert_eq!(dl, l.euler_d());
                sum = &sum + &l;
            }
            // Σ L_i = s_1 / (1 - c q)
            let expected = QSeries::constant(cfg.s(1), n_trunc)
                .checked_div(&(&QSeries::one(n_trunc) - &QSeries::monomial(cfg.q_scale(), 1, n_trunc)))
                .unwrap();
            assert_eq!(sum, expected);
        }
    }
}
