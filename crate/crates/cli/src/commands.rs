use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use lpn_core::admissibility::{IntegrationConstants, LevelOperator, LocalizedElement, RecursionOutcome};
use lpn_core::asymptotics::{derive_l_ode, derive_table, ifun_series, pf_apply, solve_asymptotics, verify_asymptotic, AsymptoticData};
use lpn_core::closed_forms;
use lpn_core::fitting::{conjecture_for_weight, ConjectureReport, FitWindows};
use lpn_core::mirror::mirror_map;
use lpn_core::model::{GnBasis, LambdaConfig};
use lpn_core::report::{CheckReport, Status};
use lpn_core::scalars::FieldScalar;
use lpn_core::series::{Mismatch, QSeries, QZSeries};

use crate::args::{Command, Common, FitArgs};
use crate::cache::{Cache, CacheKey, CONVENTION_VERSION};
use crate::CliError;

/// A rendered report and whether its checks passed.
pub struct Report {
    pub json: String,
    pub text: String,
    pub passed: bool,
}

impl Report {
    fn new<T: Serialize>(value: &T, text: String, passed: bool) -> Result<Self, CliError> {
        let json = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
        Ok(Report { json, text, passed })
    }
}

pub fn dispatch(command: &Command, cache: &Cache) -> Result<Report, CliError> {
    if let Command::MirrorMap(c) = command {
        return mirror(c);
    }
    let common = command.common();
    let cfg = resolve(common)?;
    let ctx = Context { common, cfg: &cfg, cache };
    match command {
        Command::Ifun(_) => ctx.ifun(),
        Command::Asymp(_) => ctx.asymp(),
        Command::VerifyPf(_) => ctx.verify_pf(),
        Command::VerifyAsymp(_) => ctx.verify_asymp(),
        Command::DeriveOde(_) => ctx.derive_ode(),
        Command::Fit(args) => ctx.fit(args),
        Command::Admissible(_) => ctx.admissible(),
        Command::MirrorMap(_) => unreachable!("handled above"),
    }
}

/// Checks the usage-level invariants, then builds the weights.
pub fn resolve(common: &Common) -> Result<LambdaConfig, CliError> {
    if common.order < 1 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    if common.n == Some(0) {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let spec = common
        .lambda
        .as_ref()
        .ok_or_else(|| CliError::Usage("--lambda is required".into()))?;
    if let (Some(n), lpn_core::model::LambdaSpec::List(v)) = (common.n, spec) {
        if v.len() != n + 1 {
            return Err(CliError::Usage(format!("n = {n} needs {} weights, got {}", n + 1, v.len())));
        }
    }
    Ok(spec.resolve(common.n)?)
}

struct Context<'a> {
    common: &'a Common,
    cfg: &'a LambdaConfig,
    cache: &'a Cache,
}

/// The cached part of [`AsymptoticData`].
#[derive(Serialize, Deserialize)]
struct AsymptoticBlob {
    mu: QSeries,
    l: QSeries,
    r: Vec<QSeries>,
}

#[derive(Serialize)]
struct WeightCheck {
    i: usize,
    #[serde(flatten)]
    report: CheckReport,
}

#[derive(Serialize)]
struct Aggregate<'a> {
    check: &'a str,
    n: usize,
    lambda: &'a LambdaConfig,
    status: Status,
    weights: Vec<WeightCheck>,
}

impl Aggregate<'_> {
    fn text(&self) -> String {
        if self.status.passed() {
            return format!("PASS {}\n", self.check);
        }
        let mut out = String::new();
        for w in self.weights.iter().filter(|w| !w.report.status.passed()) {
            let _ = writeln!(out, "{} i={}", w.report, w.i);
        }
        out
    }
}

#[derive(Serialize)]
struct Comparison {
    status: &'static str,
    detail: String,
}

impl Comparison {
    fn failed(&self) -> bool {
        self.status == "fail"
    }
}

impl<'a> Context<'a> {
    fn weights(&self) -> Vec<usize> {
        (0..=self.cfg.n()).collect()
    }

    fn key(&self, subcommand: &str, i: usize, zmax: i64) -> CacheKey {
        CacheKey {
            subcommand: subcommand.into(),
            n: self.cfg.n(),
            lambda: serde_json::to_string(self.cfg).expect("weights serialize"),
            order: self.common.order,
            k: self.common.k,
            zmax,
            i,
            convention: CONVENTION_VERSION,
        }
    }

    fn ifun_rows(&self, i: usize) -> Result<QZSeries, CliError> {
        let zmax = self.common.zmax();
        let key = self.key("ifun", i, zmax);
        let (s, _) = self
            .cache
            .get_or_compute(&key, || ifun_series(self.cfg, i, self.common.order, zmax))?;
        Ok(s)
    }

    fn asymptotics(&self, i: usize) -> Result<AsymptoticData, CliError> {
        let key = self.key("asymp", i, 0);
        let (blob, _) = self.cache.get_or_compute(&key, || {
            solve_asymptotics(self.cfg, i, self.common.k, self.common.order).map(|d| AsymptoticBlob {
                mu: d.mu,
                l: d.l,
                r: d.r,
            })
        })?;
        Ok(AsymptoticData {
            cfg: self.cfg.clone(),
            i,
            trunc: self.common.order,
            depth: self.common.k,
            mu: blob.mu,
            l: blob.l,
            r: blob.r,
        })
    }

    fn per_weight<T: Send>(&self, f: impl Fn(usize) -> Result<T, CliError> + Sync + Send) -> Result<Vec<T>, CliError> {
        self.weights().into_par_iter().map(f).collect()
    }

    fn aggregate(&self, check: &'a str, reports: Vec<CheckReport>) -> Aggregate<'_> {
        let weights: Vec<WeightCheck> = reports
            .into_iter()
            .enumerate()
            .map(|(i, report)| WeightCheck { i, report })
            .collect();
        Aggregate {
            check,
            n: self.cfg.n(),
            lambda: self.cfg,
            status: Status::from_bool(weights.iter().all(|w| w.report.status.passed())),
            weights,
        }
    }

    fn ifun(&self) -> Result<Report, CliError> {
        #[derive(Serialize)]
        struct Weight {
            i: usize,
            series: QZSeries,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            n: usize,
            lambda: &'a LambdaConfig,
            order: usize,
            zmax: i64,
            weights: Vec<Weight>,
        }
        let weights = self.per_weight(|i| Ok(Weight { i, series: self.ifun_rows(i)? }))?;
        let mut text = String::new();
        for w in &weights {
            for (d, row) in w.series.rows().iter().enumerate() {
                let coeffs: Vec<String> = row.coeffs.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(text, "i={} q^{d} z^[{}..{}]: {}", w.i, row.zmin, row.zmax(), coeffs.join(", "));
            }
        }
        let out = Out {
            n: self.cfg.n(),
            lambda: self.cfg,
            order: self.common.order,
            zmax: self.common.zmax(),
            weights,
        };
        Report::new(&out, text, true)
    }

    /// Derived A-table against the closed-form one where that exists.
    fn compare_closed_form(&self) -> Comparison {
        let cfg = self.cfg;
        let applicable = cfg.n() == 1 || (cfg.n() == 2 && cfg.is_spl2());
        if !applicable {
            return Comparison {
                status: "not-applicable",
                detail: "closed-form tables are known for n = 1 and for n = 2 with s_2^2 = 3 s_1 s_3".into(),
            };
        }
        if cfg.s(1).is_zero() {
            return Comparison {
                status: "singular",
                detail: "s_1 = 0 makes the closed-form denominators vanish; comparison skipped".into(),
            };
        }
        match (derive_table(cfg), closed_forms::a_table(cfg)) {
            (Ok(derived), Ok(reference)) if derived == reference => Comparison {
                status: "pass",
                detail: format!("{} entries agree", reference.len()),
            },
            (Ok(_), Ok(_)) => Comparison {
                status: "fail",
                detail: "derived and closed-form tables differ".into(),
            },
            (Err(e), _) | (_, Err(e)) => Comparison {
                status: "singular",
                detail: e.to_string(),
            },
        }
    }

    fn asymp(&self) -> Result<Report, CliError> {
        #[derive(Serialize)]
        struct Out<'a> {
            n: usize,
            lambda: &'a LambdaConfig,
            order: usize,
            k: usize,
            weights: Vec<AsymptoticData>,
            a_table: Comparison,
        }
        let weights = self.per_weight(|i| self.asymptotics(i))?;
        let a_table = self.compare_closed_form();
        let mut text = String::new();
        for w in &weights {
            let _ = writeln!(text, "i={} mu = {}", w.i, w.mu);
            for (k, r) in w.r.iter().enumerate() {
                let _ = writeln!(text, "i={} R_{k} = {r}", w.i);
            }
        }
        let _ = writeln!(text, "A-table comparison: {} ({})", a_table.status, a_table.detail);
        let passed = !a_table.failed();
        let out = Out {
            n: self.cfg.n(),
            lambda: self.cfg,
            order: self.common.order,
            k: self.common.k,
            weights,
            a_table,
        };
        Report::new(&out, text, passed)
    }

    fn verify_pf(&self) -> Result<Report, CliError> {
        let reports = self.per_weight(|i| {
            let residual = pf_apply(self.cfg, i, &self.ifun_rows(i)?);
            Ok(CheckReport::from_mismatch("pf-annihilation", first_nonzero(&residual)))
        })?;
        let agg = self.aggregate("pf-annihilation", reports);
        Report::new(&agg, agg.text(), agg.status.passed())
    }

    fn verify_asymp(&self) -> Result<Report, CliError> {
        let reports = self.per_weight(|i| Ok(verify_asymptotic(&self.asymptotics(i)?, self.common.order)?))?;
        let agg = self.aggregate("asymptotic-form", reports);
        Report::new(&agg, agg.text(), agg.status.passed())
    }

    fn derive_ode(&self) -> Result<Report, CliError> {
        let system = derive_l_ode(self.cfg)?;
        let reports = self.per_weight(|i| Ok(system.check_series(&self.asymptotics(i)?)?))?;
        let residual = self.aggregate("l-ode-residual", reports);
        let reference = self.compare_closed_form();
        #[derive(Serialize)]
        struct Out<'a> {
            system: &'a lpn_core::asymptotics::LOdeSystem,
            reference: &'a Comparison,
            residual: &'a Aggregate<'a>,
        }
        let mut text = String::new();
        let _ = writeln!(text, "f = {}", system.f.display_in("L"));
        for (&(l, p), a) in &system.table {
            let _ = writeln!(text, "A[{l},{p}] = {}", lpn_core::asymptotics::render_over(a, &system.f));
        }
        let _ = writeln!(text, "closed-form comparison: {} ({})", reference.status, reference.detail);
        text.push_str(&residual.text());
        let passed = residual.status.passed() && !reference.failed();
        Report::new(
            &Out {
                system: &system,
                reference: &reference,
                residual: &residual,
            },
            text,
            passed,
        )
    }

    fn fit(&self, args: &FitArgs) -> Result<Report, CliError> {
        let given = [args.j_min, args.j_max, args.e_min, args.e_max];
        let windows = if given.iter().any(Option::is_some) {
            let d = FitWindows::default_for(self.common.k);
            Some(FitWindows::new(
                args.j_min.unwrap_or(d.j_min),
                args.j_max.unwrap_or(d.j_max),
                args.e_min.unwrap_or(d.e_min),
                args.e_max.unwrap_or(d.e_max),
            )?)
        } else {
            None
        };
        let per = self.per_weight(|i| Ok(conjecture_for_weight(self.cfg, i, self.common.k, windows)?))?;
        let report = ConjectureReport::merge(self.cfg, per.into_iter().flatten().collect());
        let mut text = String::new();
        for r in &report.results {
            let elem = r.element.as_ref().map_or_else(|| "no closed form in window".to_string(), |e| e.render());
            let _ = writeln!(text, "{} i={} k={}: {elem}", r.status, r.i, r.k);
        }
        #[derive(Serialize)]
        struct Fit<'r> {
            status: Status,
            #[serde(flatten)]
            report: &'r ConjectureReport,
        }
        let fit = Fit { status: Status::from_bool(report.passed()), report: &report };
        Report::new(&fit, text, report.passed())
    }

    fn admissible(&self) -> Result<Report, CliError> {
        let system = derive_l_ode(self.cfg)?;
        let op = LevelOperator::from_system(&system)?;
        let conditions = match op.f.degree() {
            Some(2) => op.check_deg2_conditions()?,
            _ => op.check_deg1_conditions()?,
        };
        #[derive(Serialize)]
        struct Obstructed {
            k: usize,
            exponent: i64,
            residue: String,
        }
        #[derive(Serialize)]
        struct Weight {
            i: usize,
            status: Status,
            obstruction: Option<Obstructed>,
            /// Order of each solved `Φ_k`.
            orders: Vec<Option<i64>>,
            matches_series: bool,
            solutions: Vec<String>,
        }
        let weights = self.per_weight(|i| {
            let constants = IntegrationConstants::VanishAt(self.cfg.lambda(i).clone());
            let (solved, obstruction) = match op.run_recursion(self.common.k, &constants) {
                RecursionOutcome::Complete(s) => (s, None),
                RecursionOutcome::Obstructed { solved, k, obstruction } => (
                    solved,
                    Some(Obstructed {
                        k,
                        exponent: obstruction.exponent,
                        residue: obstruction.residue.display_in("L"),
                    }),
                ),
            };
            let data = self.asymptotics(i)?;
            let norm = GnBasis::new(self.cfg, i)?.half_power_series(&data.l)?;
            let mut matches = true;
            for (phi, r) in solved.iter().zip(&data.r) {
                matches &= &phi.eval(&data.l)? * &norm == *r;
            }
            Ok(Weight {
                i,
                status: Status::from_bool(obstruction.is_none() && matches),
                obstruction,
                orders: solved.iter().map(|x| x.order().ok()).collect(),
                matches_series: matches,
                solutions: solved.iter().map(render_localized).collect(),
            })
        })?;
        #[derive(Serialize)]
        struct Out<'a> {
            n: usize,
            lambda: &'a LambdaConfig,
            operator: &'a LevelOperator,
            conditions: &'a lpn_core::admissibility::ConditionReport,
            weights: &'a [Weight],
        }
        let passed = conditions.status.passed() && weights.iter().all(|w| w.status.passed());
        let mut text = format!("{} {}\n", conditions.status, conditions.check);
        for e in &conditions.entries {
            let order = e.order.map_or("-".into(), |o| o.to_string());
            let _ = writeln!(text, "  A[{},{}] order {order} bound {} {}", e.l, e.p, e.bound, e.status);
        }
        for w in &weights {
            let orders: Vec<String> = w.orders.iter().map(|o| o.map_or("-".into(), |o| o.to_string())).collect();
            let _ = writeln!(text, "{} recursion i={} orders [{}]", w.status, w.i, orders.join(", "));
        }
        let out = Out {
            n: self.cfg.n(),
            lambda: self.cfg,
            operator: &op,
            conditions: &conditions,
            weights: &weights,
        };
        Report::new(&out, text, passed)
    }
}

fn mirror(common: &Common) -> Result<Report, CliError> {
    if common.order < 1 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    #[derive(Serialize)]
    struct Out {
        order: usize,
        /// Coefficients of q^1..q^order.
        coefficients: Vec<FieldScalar>,
    }
    let q = mirror_map(common.order)?;
    let coefficients: Vec<FieldScalar> = (1..=common.order).map(|d| q.coeff(d)).collect();
    let text = format!("Q(q) = {q}\n");
    Report::new(&Out { order: common.order, coefficients }, text, true)
}

fn first_nonzero(s: &QZSeries) -> Option<Mismatch> {
    s.rows().iter().enumerate().find_map(|(d, row)| {
        row.coeffs.iter().enumerate().find(|(_, c)| !c.is_zero()).map(|(k, c)| Mismatch {
            d,
            z: row.zmin + k as i64,
            lhs: c.clone(),
            rhs: FieldScalar::zero(),
        })
    })
}

/// `Σ (r_i)·(f)^i` over the f-adic digits.
fn render_localized(x: &LocalizedElement) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let f = x.f().display_in("L");
    x.digits()
        .iter()
        .map(|(i, r)| match i {
            0 => format!("({})", r.display_in("L")),
            _ => format!("({})*({f})^{i}", r.display_in("L")),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}
