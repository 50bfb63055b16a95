use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use super::solve::AsymptoticData;
use crate::error::{Error, Result};
use crate::model::{GnBasis, LambdaConfig};
use crate::report::{CheckReport, Status};
use crate::scalars::{FieldScalar, Poly, RationalFunction};
use crate::series::{DiffOperator, DifferentialRing, Mismatch, QSeries, RationalFunctionRing};

/// The system `∂Φ_{k+1} = Σ_{l,p} A_{lp}(L) ∂^p Φ_{k-l}` satisfied by the
/// normalized coefficients `Φ_k = f(L)^{1/2} R_k`, where `∂ = d/dL`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LOdeSystem {
    pub n: usize,
    /// The linear factor (or `f` itself) whose powers carry the poles.
    pub f: Poly,
    pub table: BTreeMap<(u32, u32), RationalFunction>,
}

impl LOdeSystem {
    pub fn get(&self, l: u32, p: u32) -> RationalFunction {
        self.table.get(&(l, p)).cloned().unwrap_or_else(RationalFunction::zero)
    }

    /// Evaluates the system on q-series: `Φ̂_k = R_k (f(L)/f(λ_i))^{1/2}` and
    /// `∂ = (DL)^{-1} D`. Every application of ∂ costs one order of q.
    pub fn check_series(&self, data: &AsymptoticData) -> Result<CheckReport> {
        let basis = GnBasis::new(&data.cfg, data.i)?;
        let norm_inv = basis.half_power_series(&data.l)?.inverse()?;
        let phi: Vec<QSeries> = data.r.iter().map(|r| r * &norm_inv).collect();
        let dl_q = data.l.euler_d().div_q()?;
        let d_l = |x: &QSeries| -> Result<QSeries> { x.euler_d().div_q()?.checked_div(&dl_q.truncate(x.trunc() - 1)) };
        let max_p = self.table.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        // derivatives ∂^p Φ_k
        let mut derived: Vec<Vec<QSeries>> = Vec::with_capacity(phi.len());
        for x in &phi {
            let mut ds = vec![x.clone()];
            for _ in 0..max_p.max(1) {
                let next = d_l(ds.last().expect("nonempty"))?;
                ds.push(next);
            }
            derived.push(ds);
        }
        let coeffs: BTreeMap<(u32, u32), QSeries> = self
            .table
            .iter()
            .map(|(k, a)| Ok((*k, data.l.eval_rational(a)?)))
            .collect::<Result<_>>()?;
        let valid = data.trunc.saturating_sub(max_p.max(1));
        for k in 1..phi.len() {
            let mut residual = derived[k][1].truncate(valid);
            for (&(l, p), a) in &coeffs {
                let Some(src) = (k - 1).checked_sub(l as usize) else {
                    continue;
                };
                residual = &residual - &(a * &derived[src][p as usize]).truncate(valid);
            }
            if let Some(d) = residual.coeffs().iter().position(|c| !c.is_zero()) {
                return Ok(CheckReport {
                    check: "l-ode-residual".into(),
                    status: Status::Fail,
                    first_mismatch: Some(Mismatch {
                        d,
                        z: k as i64,
                        lhs: residual.coeff(d),
                        rhs: FieldScalar::zero(),
                    }),
                });
            }
        }
        Ok(CheckReport::from_mismatch("l-ode-residual", None))
    }
}

impl Serialize for LOdeSystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            l: u32,
            p: u32,
            value: String,
        }
        #[derive(Serialize)]
        struct Table {
            n: usize,
            f: String,
            entries: Vec<Entry>,
        }
        Table {
            n: self.n,
            f: self.f.display_in("L"),
            entries: self
                .table
                .iter()
                .map(|(&(l, p), a)| Entry {
                    l,
                    p,
                    value: render_over(a, &self.f),
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Renders `a` as `(f)^-k*(num)` when its denominator is a power of `f`
/// up to a unit and an `L`-power, otherwise as a plain quotient.
pub fn render_over(a: &RationalFunction, f: &Poly) -> String {
    let f_text = f.display_in("L");
    let fm = f.monic();
    let mut den = a.den().clone();
    let mut k = 0;
    if f.degree().unwrap_or(0) > 0 {
        while let Ok((q, r)) = den.div_rem(&fm) {
            if !r.is_zero() || den.degree() == Some(0) {
                break;
            }
            den = q;
            k += 1;
        }
    }
    if k == 0 || den.degree() != Some(0) {
        return a.display_in("L");
    }
    // num / (fm^k) = num · lc^k / f^k
    let num = a.num().scale(&f.leading().pow(k).expect("nonzero")).scale(&den.leading().inv().expect("nonzero"));
    format!("({f_text})^-{k}*({})", num.display_in("L"))
}

/// Derives the normalized L-variable system from the Picard–Fuchs operator.
///
/// n = 1 is unrestricted, n = 2 needs `s_2^2 = 3 s_1 s_3`, and larger n need
/// `f_n` to be a power of a linear polynomial.
pub fn derive_l_ode(cfg: &LambdaConfig) -> Result<LOdeSystem> {
    let n = cfg.n();
    let basis = GnBasis::new(cfg, 0)?;
    if n == 2 && !cfg.is_spl2() {
        return Err(Error::Specialization("n = 2 needs s_2^2 - 3 s_1 s_3 = 0".into()));
    }
    if n >= 3 && basis.kappa() as usize != n && basis.kappa() != 0 {
        return Err(Error::Specialization(format!(
            "f_{n} = {} is not a power of a linear polynomial",
            cfg.f_poly().display_in("L")
        )));
    }
    let table = derive_table(cfg)?;
    Ok(LOdeSystem {
        n,
        f: basis.base().clone(),
        table,
    })
}

/// The A-table with no specialization check.
pub fn derive_table(cfg: &LambdaConfig) -> Result<BTreeMap<(u32, u32), RationalFunction>> {
    let ring = RationalFunctionRing::plain();
    let p = cfg.char_poly();
    let f = cfg.f_poly();
    let n1 = cfg.n() as u32 + 1;
    let l = RationalFunction::x();
    // D = g ∂ with g = L p / f; conjugation by f^{1/2} subtracts g f'/(2f)
    let g = RationalFunction::new(&Poly::x() * &p, f.clone())?;
    let shift = &g * &RationalFunction::new(f.derivative().scale(&FieldScalar::rational(1, 2)?), f.clone())?;
    let m = DiffOperator::multiplication(&ring, l.clone())
        .add(&ring, &DiffOperator::term(&ring, 1, 1, g.clone()))
        .add(&ring, &DiffOperator::term(&ring, 1, 0, -&shift));
    let mut first = DiffOperator::identity(&ring);
    for lj in cfg.lambdas() {
        first = first.compose(&ring, &m.sub(&ring, &DiffOperator::multiplication(&ring, ring.scalar(lj))));
    }
    let q = RationalFunction::new(p.clone(), Poly::monomial(cfg.q_scale(), n1 as usize))?;
    let mut second = DiffOperator::multiplication(&ring, q);
    for k in 0..n1 {
        let factor = m
            .scale(&ring, &FieldScalar::from_int(-(n1 as i64)))
            .sub(&ring, &DiffOperator::z_scalar(&ring, &FieldScalar::from_int(k as i64), 1));
        second = second.compose(&ring, &factor);
    }
    let op = first.sub(&ring, &second);
    if !op.layer(0).is_empty() {
        return Err(Error::Domain("z^0 layer of the L-variable operator does not vanish".into()));
    }
    let q1 = op.layer(1);
    if q1.len() != 1 || !q1.contains_key(&1) {
        return Err(Error::Domain("z^1 layer is not a pure first derivative after normalization".into()));
    }
    let alpha = q1[&1].clone();
    let mut table = BTreeMap::new();
    for m_pow in 2..=op.max_z() {
        for (p_pow, c) in op.layer(m_pow) {
            let a = -&c.checked_div(&alpha)?;
            if !a.is_zero() {
                table.insert((m_pow - 2, p_pow), a);
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::solve_asymptotics;

    fn cfg(v: &[i64]) -> LambdaConfig {
        LambdaConfig::new(v.iter().map(|&x| FieldScalar::from_int(x)).collect()).unwrap()
    }

    #[test]
    fn n1_table_shape_and_orders() {
        let sys = derive_l_ode(&cfg(&[1, 2])).unwrap();
        assert_eq!(sys.table.keys().copied().collect::<Vec<_>>(), vec![(0, 0), (0, 1), (0, 2)]);
        // A_02 denominator (3L-4)^2 with f^-2 coefficient 4/9 at L = 4/3
        let a02 = sys.get(0, 2);
        assert_eq!(a02.den(), &Poly::from_ints(&[-4, 3]).monic().pow(2));
        let json = serde_json::to_string(&sys).unwrap();
        assert!(json.contains(r#""f":"3*L - 4""#), "{json}");
        assert!(json.contains("(3*L - 4)^-2*("), "{json}");
    }

    #[test]
    fn gate_on_specialization() {
        assert!(matches!(derive_l_ode(&cfg(&[1, 2, 4])), Err(Error::Specialization(_))));
        assert!(derive_l_ode(&LambdaConfig::spl2_canonical()).is_ok());
    }

    #[test]
    fn system_annihilates_the_computed_series() {
        for c in [cfg(&[1, 2]), cfg(&[3, -5])] {
            let sys = derive_l_ode(&c).unwrap();
            for i in 0..2 {
                let data = solve_asymptotics(&c, i, 4, 10).unwrap();
                let report = sys.check_series(&data).unwrap();
                assert!(report.status.passed(), "{report}");
            }
        }
    }

    #[test]
    fn residual_check_detects_a_wrong_entry() {
        let c = cfg(&[1, 2]);
        let mut sys = derive_l_ode(&c).unwrap();
        let bumped = &sys.get(0, 0) + &RationalFunction::one();
        sys.table.insert((0, 0), bumped);
        let data = solve_asymptotics(&c, 0, 3, 8).unwrap();
        assert_eq!(sys.check_series(&data).unwrap().status, Status::Fail);
    }
}
