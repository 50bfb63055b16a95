//! Recovers closed forms in `field[L^{±1}, f(L)^{-1/2}]` from q-series by
//! exact linear solving.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::solve_asymptotics;
use crate::error::{Error, Result};
use crate::linalg::{self, Solution};
use crate::model::{GnBasis, GnElement, LambdaConfig};
use crate::report::{CheckReport, Status};
use crate::scalars::{FieldScalar, Poly, RationalFunction};
use crate::series::{Mismatch, QSeries};

/// Coefficients held back from the solve and used only for verification.
pub const DEFAULT_SURPLUS: usize = 10;

/// Ansatz windows: `L^j f^e` with `j ∈ [j_min, j_max]`, `e ∈ [e_min, e_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FitWindows {
    pub j_min: i64,
    pub j_max: i64,
    pub e_min: i64,
    pub e_max: i64,
}

impl FitWindows {
    pub fn new(j_min: i64, j_max: i64, e_min: i64, e_max: i64) -> Result<Self> {
        if j_min > j_max || e_min > e_max {
            return Err(Error::Domain(format!("empty window j∈[{j_min},{j_max}], e∈[{e_min},{e_max}]")));
        }
        Ok(FitWindows { j_min, j_max, e_min, e_max })
    }

    /// `j ∈ [0, 3k+3]`, `e ∈ [-(3k+3), 0]`.
    pub fn default_for(k: usize) -> Self {
        let w = 3 * k as i64 + 3;
        FitWindows {
            j_min: 0,
            j_max: w,
            e_min: -w,
            e_max: 0,
        }
    }

    pub fn doubled(&self) -> Self {
        let grow = |x: i64| if x < 0 { 2 * x } else { x };
        let shrink = |x: i64| if x > 0 { 2 * x } else { x };
        FitWindows {
            j_min: grow(self.j_min),
            j_max: shrink(self.j_max),
            e_min: grow(self.e_min),
            e_max: shrink(self.e_max),
        }
    }

    /// `(T, S, U)`: the window spans `h(L) / (L^T base^S)` with `deg h < U`.
    ///
    /// In canonical terms that is `L^{-t}` for `t ≤ T` and digits
    /// `L^r base^s`, `deg r < deg base`, for `-S ≤ s ≤ s_max`.
    fn span(&self, basis: &GnBasis) -> (usize, usize, usize) {
        let delta = basis.base().degree().unwrap_or(1) as i64;
        let kappa = basis.kappa() as i64;
        let (t, s_min, s_max) = if basis.base_is_l() {
            (0, self.j_min.min(0), self.j_max.max(0))
        } else {
            let top = self.j_max + kappa * delta * self.e_max;
            ((-self.j_min).max(0), (kappa * self.e_min).min(0), top.div_euclid(delta).max(0))
        };
        let u = t + delta * (s_max - s_min + 1);
        (t as usize, (-s_min) as usize, u as usize)
    }

    pub fn unknown_count(&self, basis: &GnBasis) -> usize {
        self.span(basis).2
    }
}

/// A target series to be written as `body(L) · (norm/f)^{m/2}`.
#[derive(Clone, Debug)]
pub struct FitProblem {
    pub target: QSeries,
    pub l: QSeries,
    pub basis: GnBasis,
    pub windows: FitWindows,
    pub half_power: u8,
    pub surplus: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FitOutcome {
    /// `consumed` leading coefficients were used by the solve.
    Found { element: GnElement, consumed: usize },
    Infeasible,
}

impl FitProblem {
    pub fn new(target: QSeries, l: QSeries, basis: GnBasis, windows: FitWindows, half_power: u8) -> Self {
        FitProblem {
            target,
            l,
            basis,
            windows,
            half_power,
            surplus: DEFAULT_SURPLUS,
        }
    }
}

/// Solves for the window coefficients on the leading `trunc + 1 - surplus`
/// coefficients of the target.
pub fn fit_gn(problem: &FitProblem) -> Result<FitOutcome> {
    let basis = &problem.basis;
    let (t, s, unknowns) = problem.windows.span(basis);
    let trunc = problem.target.trunc().min(problem.l.trunc());
    let consumed = (trunc + 1).saturating_sub(problem.surplus);
    if unknowns > consumed {
        return Err(Error::Underdetermined {
            rank: consumed,
            unknowns,
        });
    }
    let l = problem.l.truncate(trunc);
    let mut body = problem.target.truncate(trunc);
    match problem.half_power {
        0 => {}
        1 => body = body.checked_div(&basis.half_power_series(&l)?)?,
        m => return Err(Error::Domain(format!("half power must be 0 or 1, got {m}"))),
    }
    // body · L^T base^S = Σ h_k (L - λ)^k; the columns have rising valuation
    let den = &Poly::monomial(FieldScalar::one(), t) * &basis.base().pow(s as u32);
    let lhs = &body * &l.eval_poly(&den);
    let lambda = l.constant_term().clone();
    let w = &l - &QSeries::constant(lambda.clone(), trunc);
    let mut columns = vec![QSeries::one(trunc)];
    while columns.len() < unknowns {
        let next = columns.last().expect("nonempty") * &w;
        columns.push(next);
    }
    let rows: Vec<Vec<FieldScalar>> = (0..consumed)
        .map(|d| columns.iter().map(|c| c.coeff(d)).collect())
        .collect();
    let rhs: Vec<FieldScalar> = (0..consumed).map(|d| lhs.coeff(d)).collect();
    let h = match linalg::solve(rows, rhs) {
        Solution::Unique(h) => h,
        Solution::Inconsistent => return Ok(FitOutcome::Infeasible),
        Solution::Underdetermined { rank, unknowns } => return Err(Error::Underdetermined { rank, unknowns }),
    };
    // back from powers of (L - λ) to powers of L
    let shift = Poly::linear(FieldScalar::one(), -&lambda);
    let mut num = Poly::zero();
    for c in h.iter().rev() {
        num = &(&num * &shift) + &Poly::constant(c.clone());
    }
    let element = GnElement::new(basis.clone(), RationalFunction::new(num, den)?, problem.half_power)?;
    Ok(FitOutcome::Found { element, consumed })
}

/// Checks `elem(L)` against every coefficient of `target`; at least `extra`
/// of them must lie beyond the `consumed` ones used by the fit.
pub fn verify_fit(elem: &GnElement, l: &QSeries, target: &QSeries, consumed: usize, extra: usize) -> Result<CheckReport> {
    let trunc = target.trunc().min(l.trunc());
    if trunc + 1 < consumed + extra {
        return Err(Error::Domain(format!(
            "only {} coefficients available, need {consumed} + {extra}",
            trunc + 1
        )));
    }
    let value = elem.eval(&l.truncate(trunc))?;
    let mismatch = (0..=trunc).find_map(|d| {
        let (a, b) = (value.coeff(d), target.coeff(d));
        (a != b).then(|| Mismatch { d, z: 0, lhs: a, rhs: b })
    });
    Ok(CheckReport::from_mismatch("gn-fit", mismatch))
}

/// Fits and re-verifies; `Ok(None)` means infeasible or failed verification.
pub fn fit_and_verify(problem: &FitProblem) -> Result<Option<GnElement>> {
    match fit_gn(problem)? {
        FitOutcome::Infeasible => Ok(None),
        FitOutcome::Found { element, consumed } => {
            let report = verify_fit(&element, &problem.l, &problem.target, consumed, problem.surplus)?;
            Ok(report.status.passed().then_some(element))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FitResult {
    pub i: usize,
    pub k: usize,
    pub status: Status,
    pub element: Option<GnElement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub lambda: LambdaConfig,
    pub results: Vec<FitResult>,
}

impl ConjectureReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status.passed())
    }
}

/// Extra coefficients on top of unknowns and surplus so that an inconsistent
/// window shows up in the solve itself.
const OVERDETERMINE: usize = 4;

/// Fits `R_{k,i}` for `k = 0..=depth` at one weight. Windows default to
/// [`FitWindows::default_for`] and are doubled once on failure.
pub fn conjecture_for_weight(
    cfg: &LambdaConfig,
    i: usize,
    depth: usize,
    windows: Option<FitWindows>,
) -> Result<Vec<FitResult>> {
    let basis = GnBasis::new(cfg, i)?;
    let window_for = |k: usize| windows.unwrap_or_else(|| FitWindows::default_for(k));
    let need = |w: FitWindows| w.unknown_count(&basis) + DEFAULT_SURPLUS + OVERDETERMINE;
    let mut trunc = (0..=depth).map(|k| need(window_for(k))).max().unwrap_or(0);
    let mut data = solve_asymptotics(cfg, i, depth, trunc)?;
    let mut out = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let mut element = None;
        for w in [window_for(k), window_for(k).doubled()] {
            if need(w) > trunc {
                trunc = need(w);
                data = solve_asymptotics(cfg, i, depth, trunc)?;
            }
            let t = need(w) - 1;
            let problem = FitProblem::new(data.r[k].truncate(t), data.l.truncate(t), basis.clone(), w, 1);
            element = match fit_and_verify(&problem) {
                Ok(e) => e,
                Err(Error::Underdetermined { .. }) => None,
                Err(e) => return Err(e),
            };
            if element.is_some() {
                break;
            }
        }
        out.push(FitResult {
            i,
            k,
            status: Status::from_bool(element.is_some()),
            element,
        });
    }
    Ok(out)
}

/// Runs [`conjecture_for_weight`] at every weight, in parallel.
pub fn conjecture_report(cfg: &LambdaConfig, depth: usize, windows: Option<FitWindows>) -> Result<ConjectureReport> {
    let per_weight: Vec<Vec<FitResult>> = (0..=cfg.n())
        .into_par_iter()
        .map(|i| conjecture_for_weight(cfg, i, depth, windows))
        .collect::<Result<_>>()?;
    Ok(ConjectureReport::merge(cfg, per_weight.into_iter().flatten().collect()))
}

impl ConjectureReport {
    /// Orders results by `(i, k)`.
    pub fn merge(cfg: &LambdaConfig, results: Vec<FitResult>) -> Self {
        let sorted: BTreeMap<(usize, usize), FitResult> = results.into_iter().map(|r| ((r.i, r.k), r)).collect();
        ConjectureReport {
            n: cfg.n(),
            lambda: cfg.clone(),
            results: sorted.into_values().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms;

    fn cfg(v: &[i64]) -> LambdaConfig {
        LambdaConfig::new(v.iter().map(|&x| FieldScalar::from_int(x)).collect()).unwrap()
    }

    fn problem(c: &LambdaConfig, i: usize, k: usize, w: FitWindows, trunc: usize) -> FitProblem {
        let data = solve_asymptotics(c, i, k, trunc).unwrap();
        FitProblem::new(data.r[k].clone(), data.l.clone(), GnBasis::new(c, i).unwrap(), w, 1)
    }

    fn found(p: &FitProblem) -> (GnElement, usize) {
        match fit_gn(p).unwrap() {
            FitOutcome::Found { element, consumed } => (element, consumed),
            FitOutcome::Infeasible => panic!("infeasible"),
        }
    }

    #[test]
    fn window_unknowns() {
        let b1 = GnBasis::new(&cfg(&[1, 2]), 0).unwrap();
        assert_eq!(FitWindows::default_for(0).unknown_count(&b1), 7);
        assert_eq!(FitWindows::new(-2, 1, -1, 0).unwrap().unknown_count(&b1), 2 + 3);
        let spl2 = GnBasis::new(&LambdaConfig::spl2_canonical(), 0).unwrap();
        // s ∈ [-6, 3]
        assert_eq!(FitWindows::default_for(0).unknown_count(&spl2), 10);
        let quad = GnBasis::new(&cfg(&[1, 2, 4]), 0).unwrap();
        // s ∈ [-3, 1], two digits each
        assert_eq!(FitWindows::default_for(0).unknown_count(&quad), 10);
        assert!(FitWindows::new(1, 0, 0, 0).is_err());
        assert_eq!(FitWindows::default_for(1).doubled(), FitWindows::new(0, 12, -12, 0).unwrap());
    }

    #[test]
    fn r0_fits_to_body_one() {
        for c in [cfg(&[1, 2]), cfg(&[1, 2, 4]), LambdaConfig::spl2_canonical()] {
            for i in 0..=c.n() {
                let p = problem(&c, i, 0, FitWindows::new(0, 0, 0, 0).unwrap(), 12);
                let (e, consumed) = found(&p);
                assert_eq!(e.body(), &RationalFunction::one());
                assert_eq!(e.half_power(), 1);
                assert!(verify_fit(&e, &p.l, &p.target, consumed, 10).unwrap().status.passed());
            }
        }
    }

    #[test]
    fn r1_matches_the_closed_form() {
        let c = cfg(&[1, 2]);
        for i in 0..2 {
            let p = problem(&c, i, 1, FitWindows::default_for(1), 24);
            let (e, _) = found(&p);
            assert_eq!(e, closed_forms::r1_n1(&c, i).unwrap());
        }
    }

    #[test]
    fn constant_series_with_integral_power() {
        let c = cfg(&[1, 2]);
        let l = c.l_series(0, 20).unwrap();
        let p = FitProblem::new(QSeries::one(20), l, GnBasis::new(&c, 0).unwrap(), FitWindows::new(0, 2, -2, 0).unwrap(), 0);
        let (e, _) = found(&p);
        assert_eq!(e.body(), &RationalFunction::one());
        assert_eq!(e.half_power(), 0);
    }

    #[test]
    fn perturbed_fit_fails_verification() {
        let c = cfg(&[1, 2]);
        let p = problem(&c, 0, 1, FitWindows::default_for(1), 24);
        let (e, consumed) = found(&p);
        let mut exp = e.expansion();
        let d = exp.digits.get_mut(&-3).expect("digit at -3");
        *d = &*d + &Poly::one();
        let bumped = GnElement::from_expansion(e.basis().clone(), &exp, 1).unwrap();
        let report = verify_fit(&bumped, &p.l, &p.target, consumed, 10).unwrap();
        assert_eq!(report.status, Status::Fail);
        assert!(report.first_mismatch.is_some());
    }

    #[test]
    fn r2_needs_sixth_order_pole() {
        let c = cfg(&[1, 2]);
        let short = problem(&c, 0, 2, FitWindows::new(0, 6, -5, 0).unwrap(), 30);
        assert_eq!(fit_gn(&short).unwrap(), FitOutcome::Infeasible);
        let wide = FitProblem {
            windows: FitWindows::new(0, 6, -6, 0).unwrap(),
            ..short
        };
        let (e, consumed) = found(&wide);
        assert!(verify_fit(&e, &wide.l, &wide.target, consumed, 10).unwrap().status.passed());
        assert_eq!(e.expansion().digits.keys().next(), Some(&-6));
    }

    #[test]
    fn too_few_coefficients_is_underdetermined() {
        let p = problem(&cfg(&[1, 2]), 0, 1, FitWindows::default_for(1), 12);
        assert!(matches!(fit_gn(&p), Err(Error::Underdetermined { .. })));
    }

    #[test]
    fn report_passes_for_n1() {
        let report = conjecture_report(&cfg(&[1, 2]), 2, None).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.results.len(), 6);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["n"], 1);
        assert_eq!(json["results"][0]["status"], "pass");
        assert!(json["results"][5]["element"]["digits"].is_array());
    }
}
