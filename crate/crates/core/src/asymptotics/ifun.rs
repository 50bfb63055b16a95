use crate::error::Result;
use crate::model::LambdaConfig;
use crate::scalars::{FieldScalar, Poly, RationalFunction};
use crate::series::{zq_laurent_expand, QZSeries, ZLaurent};

/// Linear factors `a + b z` of a product, numerator or denominator.
fn numerator_factors(cfg: &LambdaConfig, i: usize, from: usize, to: usize) -> Vec<Poly> {
    let m = FieldScalar::from_int(cfg.n() as i64 + 1);
    let a = -&(&m * cfg.lambda(i));
    (from..to)
        .map(|k| Poly::linear(FieldScalar::from_int(-(k as i64)), a.clone()))
        .collect()
}

fn denominator_factors(cfg: &LambdaConfig, i: usize, from: usize, to: usize) -> Vec<Poly> {
    let li = cfg.lambda(i);
    let mut out = Vec::new();
    for lj in cfg.lambdas() {
        let shift = li - lj;
        for k in from..to {
            out.push(Poly::linear(FieldScalar::from_int(k as i64), shift.clone()));
        }
    }
    out
}

/// Whether two linear polynomials are scalar multiples of each other.
fn proportional(a: &Poly, b: &Poly) -> Option<FieldScalar> {
    let (a0, a1, b0, b1) = (a.coeff(0), a.coeff(1), b.coeff(0), b.coeff(1));
    if (&(&a0 * &b1) - &(&a1 * &b0)).is_zero() {
        let ratio = if b1.is_zero() { &a0 / &b0 } else { &a1 / &b1 };
        Some(ratio)
    } else {
        None
    }
}

/// Cancels proportional linear factors and multiplies out what is left.
fn reduce(mut num: Vec<Poly>, den: Vec<Poly>) -> Result<RationalFunction> {
    let mut scale = FieldScalar::one();
    let mut kept_den = Vec::new();
    for d in den {
        match num.iter().position(|n| proportional(n, &d).is_some()) {
            Some(k) => {
                let n = num.swap_remove(k);
                scale = &scale * &proportional(&n, &d).expect("checked");
            }
            None => kept_den.push(d),
        }
    }
    let n = num.iter().fold(Poly::constant(scale), |acc, f| &acc * f);
    let d = kept_den.iter().fold(Poly::one(), |acc, f| &acc * f);
    RationalFunction::from_coprime(n, d)
}

/// The q^d coefficient of the I-function restricted to `H = λ_i`:
/// `∏_{k=0}^{(n+1)d-1} (-(n+1)λ_i - kz) / ∏_j ∏_{k=1}^{d} (λ_i - λ_j + kz)`.
pub fn ifun_coeff(cfg: &LambdaConfig, i: usize, d: usize) -> Result<RationalFunction> {
    let top = (cfg.n() + 1) * d;
    reduce(numerator_factors(cfg, i, 0, top), denominator_factors(cfg, i, 1, d + 1))
}

/// Rows `0..=trunc` of the restricted I-function, each on `[-d, z_max]`.
pub fn ifun_series(cfg: &LambdaConfig, i: usize, trunc: usize, z_max: i64) -> Result<QZSeries> {
    let n1 = cfg.n() + 1;
    // every step lowers the exact range by one, so row d is kept on [-d, top - d]
    let top = z_max + trunc as i64;
    let mut row0 = ZLaurent::zero(0, top);
    row0.add_at(0, &FieldScalar::one());
    let mut rows = vec![row0];
    for d in 1..=trunc {
        // c_d / c_{d-1} has a simple pole from the j = i factor d·z
        let ratio = reduce(
            numerator_factors(cfg, i, n1 * (d - 1), n1 * d),
            denominator_factors(cfg, i, d, d + 1),
        )?;
        let zmin = -(d as i64);
        let step = zq_laurent_expand(ratio.num(), ratio.den(), 1, top - 1)?;
        rows.push(rows[d - 1].mul(&step, zmin, top - d as i64));
    }
    QZSeries::from_rows(rows, z_max)
}

/// `∏_j (M - λ_j) - q ∏_{k=0}^{n} (-(n+1)M - kz)` with `M = λ_i + zD`, applied
/// to a bi-graded series. On row d, M acts as multiplication by `λ_i + dz`.
pub fn pf_apply(cfg: &LambdaConfig, i: usize, target: &QZSeries) -> QZSeries {
    let n1 = cfg.n() as i64 + 1;
    let li = cfg.lambda(i);
    let m_at = |d: usize| Poly::linear(FieldScalar::from_int(d as i64), li.clone());
    let zmax = target.zmax();
    let mut rows = Vec::with_capacity(target.trunc() + 1);
    for d in 0..=target.trunc() {
        let m = m_at(d);
        let first = cfg
            .lambdas()
            .iter()
            .fold(Poly::one(), |acc, lj| &acc * &(&m - &Poly::constant(lj.clone())));
        let mut row = widen(target.row(d), -(d as i64), zmax).mul_poly(&first);
        if d > 0 {
            let m = m_at(d - 1);
            let second = (0..n1).fold(Poly::one(), |acc, k| {
                let factor = &m.scale(&FieldScalar::from_int(-n1)) - &Poly::monomial(FieldScalar::from_int(k), 1);
                &acc * &factor
            });
            let shifted = widen(target.row(d - 1), -(d as i64), zmax).mul_poly(&second);
            for (k, c) in shifted.coeffs.iter().enumerate() {
                row.add_at(shifted.zmin + k as i64, &-c);
            }
        }
        rows.push(row);
    }
    QZSeries::from_rows(rows, zmax).expect("rows keep their pole bound")
}

fn widen(row: &ZLaurent, zmin: i64, zmax: i64) -> ZLaurent {
    let mut w = ZLaurent::zero(zmin, zmax);
    for (k, c) in row.coeffs.iter().enumerate() {
        w.add_at(row.zmin + k as i64, c);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[i64]) -> LambdaConfig {
        LambdaConfig::new(v.iter().map(|&x| FieldScalar::from_int(x)).collect()).unwrap()
    }

    fn rf(num: &[i64], den: &[i64]) -> RationalFunction {
        RationalFunction::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    #[test]
    fn first_coefficients() {
        let c = cfg(&[1, 2]);
        assert_eq!(ifun_coeff(&c, 0, 0).unwrap(), RationalFunction::one());
        assert_eq!(ifun_coeff(&c, 0, 1).unwrap(), rf(&[4, 2], &[0, -1, 1]));
        // (-4)(-4-z) / ((1+z) z)
        assert_eq!(ifun_coeff(&c, 1, 1).unwrap(), rf(&[16, 4], &[0, 1, 1]));
    }

    #[test]
    fn coefficient_agrees_with_unreduced_products() {
        let c = cfg(&[1, 2, 4]);
        for i in 0..3 {
            for d in 0..4 {
                let num = numerator_factors(&c, i, 0, 3 * d).iter().fold(Poly::one(), |a, f| &a * f);
                let den = denominator_factors(&c, i, 1, d + 1).iter().fold(Poly::one(), |a, f| &a * f);
                assert_eq!(ifun_coeff(&c, i, d).unwrap(), RationalFunction::new(num, den).unwrap());
            }
        }
    }

    #[test]
    fn rows_match_coefficient_expansion() {
        let c = cfg(&[1, 2]);
        let s = ifun_series(&c, 0, 5, 4).unwrap();
        for d in 0..=5 {
            let coeff = ifun_coeff(&c, 0, d).unwrap();
            let direct = zq_laurent_expand(coeff.num(), coeff.den(), d as i64, 4).unwrap();
            assert_eq!(s.row(d), &direct, "row {d}");
        }
        let ints = |v: &[i64]| v.iter().map(|&x| FieldScalar::from_int(x)).collect::<Vec<_>>();
        assert_eq!(s.row(1).coeffs, ints(&[-4, -6, -6, -6, -6, -6]));
    }

    #[test]
    fn pf_annihilates_the_ifunction() {
        for (c, trunc) in [(cfg(&[1, 2]), 12), (cfg(&[1, 2, 4]), 8), (LambdaConfig::spl2_canonical(), 5)] {
            for i in 0..=c.n() {
                let s = ifun_series(&c, i, trunc, 3).unwrap();
                assert!(pf_apply(&c, i, &s).is_zero());
            }
        }
    }

    #[test]
    fn pf_on_constant_series() {
        let c = cfg(&[1, 2]);
        let out = pf_apply(&c, 0, &QZSeries::one(2, 2));
        assert!(out.row(0).is_zero());
        // -(-2·1)(-2·1 - z) = -(4 + 2z)
        assert_eq!(out.coeff(1, 0), FieldScalar::from_int(-4));
        assert_eq!(out.coeff(1, 1), FieldScalar::from_int(-2));
        assert!(out.row(2).is_zero());
    }

    #[test]
    fn pf_is_linear() {
        let c = cfg(&[1, 2]);
        let a = ifun_series(&c, 0, 4, 2).unwrap();
        let b = QZSeries::one(4, 2);
        assert_eq!(pf_apply(&c, 0, &a.add(&b)), pf_apply(&c, 0, &a).add(&pf_apply(&c, 0, &b)));
    }
}
