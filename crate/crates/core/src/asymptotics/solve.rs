use std::collections::BTreeMap;

use serde::Serialize;

use super::ifun::ifun_series;
use crate::error::{Error, Result};
use crate::model::LambdaConfig;
use crate::report::CheckReport;
use crate::scalars::FieldScalar;
use crate::series::{apply_layer, DiffOperator, DifferentialRing, EulerSeriesRing, QSeries, QZSeries, ZLaurent};

/// `μ_i`, `L_i` and `R_0..R_K` in `I|_{H=λ_i} = e^{μ/z} Σ R_k z^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AsymptoticData {
    #[serde(skip)]
    pub cfg: LambdaConfig,
    pub i: usize,
    pub trunc: usize,
    pub depth: usize,
    pub mu: QSeries,
    pub l: QSeries,
    pub r: Vec<QSeries>,
}

/// The operator `e^{-μ/z} P e^{μ/z}`, i.e. the Picard–Fuchs operator with
/// `M` replaced by `L_i + zD`.
pub fn conjugated_operator(cfg: &LambdaConfig, l: &QSeries) -> DiffOperator<QSeries> {
    let ring = EulerSeriesRing { trunc: l.trunc() };
    let m = DiffOperator::multiplication(&ring, l.clone()).add(&ring, &DiffOperator::term(&ring, 1, 1, ring.one()));
    let mut first = DiffOperator::identity(&ring);
    for lj in cfg.lambdas() {
        let factor = m.sub(&ring, &DiffOperator::multiplication(&ring, ring.scalar(lj)));
        first = first.compose(&ring, &factor);
    }
    let n1 = cfg.n() as i64 + 1;
    let mut second = DiffOperator::multiplication(&ring, QSeries::q(l.trunc()));
    for k in 0..n1 {
        let factor = m
            .scale(&ring, &FieldScalar::from_int(-n1))
            .sub(&ring, &DiffOperator::z_scalar(&ring, &FieldScalar::from_int(k), 1));
        second = second.compose(&ring, &factor);
    }
    first.sub(&ring, &second)
}

/// Solves the z-graded equations of the conjugated operator with
/// `R_0(0) = 1`, `R_k(0) = 0` and `μ(0) = 0`.
pub fn solve_asymptotics(cfg: &LambdaConfig, i: usize, depth: usize, trunc: usize) -> Result<AsymptoticData> {
    let ring = EulerSeriesRing { trunc };
    let l = cfg.l_series(i, trunc)?;
    let op = conjugated_operator(cfg, &l);
    if !op.layer(0).is_empty() {
        return Err(Error::Degenerate("z^0 layer does not vanish on the L-series".into()));
    }
    let q1 = op.layer(1);
    if q1.keys().any(|&p| p > 1) {
        return Err(Error::Domain("z^1 layer is not first order".into()));
    }
    let a = q1.get(&1).cloned().unwrap_or_else(|| ring.zero());
    let b = q1.get(&0).cloned().unwrap_or_else(|| ring.zero());
    let ratio = b.checked_div(&a)?;
    let r0 = (-&ratio).euler_anti_d(&FieldScalar::zero())?.exp()?;
    let a_r0 = &a * &r0;
    let layers: Vec<BTreeMap<u32, QSeries>> = (0..=op.max_z()).map(|m| op.layer(m)).collect();
    let mut r = vec![r0.clone()];
    for k in 1..=depth {
        let mut h = ring.zero();
        for (m, layer) in layers.iter().enumerate().skip(2) {
            if m > k + 1 {
                break;
            }
            h = &h - &apply_layer(&ring, layer, &r[k + 1 - m]);
        }
        let s = h.checked_div(&a_r0)?.euler_anti_d(&FieldScalar::zero())?;
        r.push(&r0 * &s);
    }
    let mu = (&l - &QSeries::constant(cfg.lambda(i).clone(), trunc)).euler_anti_d(&FieldScalar::zero())?;
    Ok(AsymptoticData {
        cfg: cfg.clone(),
        i,
        trunc,
        depth,
        mu,
        l,
        r,
    })
}

/// Expands `e^{μ/z} Σ_k R_k z^k`: row d, exponent e collects
/// `[q^d] μ^j/j! · R_{e+j}`. Row d is exact on `[-d, K - d]`.
pub fn expand_asymptotic(data: &AsymptoticData, rows: usize) -> Result<QZSeries> {
    let trunc = rows.min(data.trunc);
    let k_max = data.r.len() as i64 - 1;
    // μ^j / j! for j = 0..=trunc
    let mut mu_pows = vec![QSeries::one(trunc)];
    let mu = data.mu.truncate(trunc);
    for j in 1..=trunc {
        let next = (&mu_pows[j - 1] * &mu).scale(&FieldScalar::from_int(j as i64).inv()?);
        mu_pows.push(next);
    }
    let mut out = Vec::with_capacity(trunc + 1);
    for d in 0..=trunc {
        let zmin = -(d as i64);
        let mut row = ZLaurent::zero(zmin, k_max - d as i64);
        for e in zmin..=row.zmax() {
            let mut acc = FieldScalar::zero();
            for (j, mp) in mu_pows.iter().enumerate().take(d + 1) {
                let idx = e + j as i64;
                if idx < 0 || idx > k_max {
                    continue;
                }
                let rk = &data.r[idx as usize];
                for t in 0..=d {
                    let (x, y) = (mp.coeff(t), rk.coeff(d - t));
                    if !x.is_zero() && !y.is_zero() {
                        acc = &acc + &(&x * &y);
                    }
                }
            }
            row.add_at(e, &acc);
        }
        out.push(row);
    }
    QZSeries::from_rows(out, k_max)
}

/// Compares the expanded asymptotic form with the I-function on rows
/// `0..=rows`, exponents `[-d, K - d]` in row d.
pub fn verify_asymptotic(data: &AsymptoticData, rows: usize) -> Result<CheckReport> {
    let k_max = data.r.len() as i64 - 1;
    let lhs = ifun_series(&data.cfg, data.i, rows.min(data.trunc), k_max)?;
    let rhs = expand_asymptotic(data, rows)?;
    let mismatch = lhs.first_mismatch(&rhs, |d| k_max - d as i64);
    Ok(CheckReport::from_mismatch("asymptotic-form", mismatch))
}
