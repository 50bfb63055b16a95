//! Elements of `R[x]_f` for f of degree one or two, the order function, the
//! sufficient conditions for admissibility and a direct recursion executor.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::asymptotics::LOdeSystem;
use crate::error::{Error, Result};
use crate::report::Status;
use crate::scalars::{FieldScalar, Poly, RationalFunction};
use crate::series::QSeries;

/// `Σ_i a_i f^i` with `deg a_i < deg f`, finitely many nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizedElement {
    f: Poly,
    digits: BTreeMap<i64, Poly>,
}

/// How the free constant of an antiderivative is fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntegrationConstants {
    /// The constant term of the `f^0` digit is zero.
    Zero,
    /// The antiderivative vanishes at this point (which must not be a root of f).
    VanishAt(FieldScalar),
}

impl LocalizedElement {
    pub fn zero(f: &Poly) -> Self {
        LocalizedElement {
            f: f.clone(),
            digits: BTreeMap::new(),
        }
    }

    pub fn one(f: &Poly) -> Self {
        Self::new(f, Poly::one(), 0).expect("valid")
    }

    /// `num / f^e`.
    pub fn new(f: &Poly, num: Poly, e: i64) -> Result<Self> {
        match f.degree() {
            Some(1) | Some(2) => {}
            _ => return Err(Error::Domain(format!("localizing polynomial {f} must have degree 1 or 2"))),
        }
        let mut digits = BTreeMap::new();
        let mut rest = num;
        let mut i = -e;
        while !rest.is_zero() {
            let (q, r) = rest.div_rem(f)?;
            if !r.is_zero() {
                digits.insert(i, r);
            }
            rest = q;
            i += 1;
        }
        Ok(LocalizedElement { f: f.clone(), digits })
    }

    /// Accepts rational functions whose denominator is a power of f up to a unit.
    pub fn from_rational(f: &Poly, a: &RationalFunction) -> Result<Self> {
        let fm = f.monic();
        let mut den = a.den().clone();
        let mut e = 0i64;
        while den.degree().unwrap_or(0) > 0 {
            let (q, r) = den.div_rem(&fm)?;
            if !r.is_zero() {
                return Err(Error::NotLocalized(format!(
                    "denominator {} is not a power of {}",
                    a.den().display_in("x"),
                    f.display_in("x")
                )));
            }
            den = q;
            e += 1;
        }
        // a = num / (c · fm^e) = num · lc^e / (c · f^e)
        let scale = &f.leading().pow(e)? / &den.leading();
        Self::new(f, a.num().scale(&scale), e)
    }

    /// Builds `Σ c_i f^i` from scalar coefficients.
    pub fn from_scalar_digits(f: &Poly, coeffs: &[(i64, FieldScalar)]) -> Result<Self> {
        let mut out = Self::zero(f);
        for (i, c) in coeffs {
            out = out.add(&Self::new(f, Poly::constant(c.clone()), -i)?);
        }
        Ok(out)
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn digits(&self) -> &BTreeMap<i64, Poly> {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Smallest exponent with a nonzero digit.
    pub fn order(&self) -> Result<i64> {
        self.digits
            .keys()
            .next()
            .copied()
            .ok_or_else(|| Error::Domain("the zero element has no order".into()))
    }

    /// `(num, e)` with value `num / f^e` and `e ≥ 0`.
    pub fn to_parts(&self) -> (Poly, i64) {
        let e = self.digits.keys().next().map_or(0, |&i| (-i).max(0));
        let mut num = Poly::zero();
        for (i, a) in &self.digits {
            num = &num + &(a * &self.f.pow((i + e) as u32));
        }
        (num, e)
    }

    pub fn to_rational(&self) -> RationalFunction {
        let (num, e) = self.to_parts();
        RationalFunction::new(num, self.f.pow(e as u32)).expect("f is nonzero")
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut digits = self.digits.clone();
        for (i, a) in &other.digits {
            let slot = digits.entry(*i).or_insert_with(Poly::zero);
            *slot = &*slot + a;
            if slot.is_zero() {
                digits.remove(i);
            }
        }
        LocalizedElement { f: self.f.clone(), digits }
    }

    pub fn neg(&self) -> Self {
        LocalizedElement {
            f: self.f.clone(),
            digits: self.digits.iter().map(|(i, a)| (*i, -a)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut digits = BTreeMap::new();
        for (i, a) in &self.digits {
            for (j, b) in &other.digits {
                self.accumulate(&mut digits, i + j, a * b);
            }
        }
        LocalizedElement { f: self.f.clone(), digits }
    }

    /// `d(a f^i) = a' f^i + i a f' f^{i-1}`, digit by digit.
    pub fn derivative(&self) -> Self {
        let fp = self.f.derivative();
        let mut digits = BTreeMap::new();
        for (&i, a) in &self.digits {
            self.accumulate(&mut digits, i, a.derivative());
            if i != 0 {
                self.accumulate(&mut digits, i - 1, (a * &fp).scale(&FieldScalar::from_int(i)));
            }
        }
        LocalizedElement { f: self.f.clone(), digits }
    }

    /// Adds `p f^i` to `digits`, splitting `p` into f-adic digits.
    fn accumulate(&self, digits: &mut BTreeMap<i64, Poly>, mut i: i64, mut p: Poly) {
        while !p.is_zero() {
            let (q, r) = p.div_rem(&self.f).expect("nonzero f");
            if !r.is_zero() {
                let slot = digits.entry(i).or_insert_with(Poly::zero);
                *slot = &*slot + &r;
                if slot.is_zero() {
                    digits.remove(&i);
                }
            }
            p = q;
            i += 1;
        }
    }

    /// `Σ a_i(x0) f(x0)^i`, or `None` when `x0` is a root of f and a pole is present.
    pub fn eval_at(&self, x0: &FieldScalar) -> Option<FieldScalar> {
        let fx = self.f.eval(x0);
        let mut acc = FieldScalar::zero();
        for (&i, a) in &self.digits {
            let p = fx.pow(i).ok()?;
            acc = &acc + &(&a.eval(x0) * &p);
        }
        Some(acc)
    }

    /// Substitutes a q-series for x.
    pub fn eval(&self, x: &QSeries) -> Result<QSeries> {
        let (num, e) = self.to_parts();
        x.eval_poly(&num).checked_div(&x.eval_poly(&self.f.pow(e as u32)))
    }

    /// An antiderivative inside `R[x]_f`, or the exponent-(-1) residue that
    /// forces a logarithm.
    pub fn integrate(&self, constants: &IntegrationConstants) -> std::result::Result<Self, Obstruction> {
        let f = &self.f;
        let fp = f.derivative();
        // s f + t f' = 1 (f squarefree)
        let (g, _, t) = f.ext_gcd(&fp);
        let t = t.scale(&g.leading().inv().expect("nonzero gcd"));
        let mut pending = self.digits.clone();
        let mut out = Self::zero(f);
        let mut polynomial = Poly::zero();
        while let Some((&i, _)) = pending.iter().next() {
            let r = pending.remove(&i).expect("present");
            if i >= 0 {
                polynomial = &polynomial + &(&r * &f.pow(i as u32));
                continue;
            }
            if i == -1 {
                return Err(Obstruction { exponent: -1, residue: r });
            }
            // r = u f + v f' with deg v < deg f; ∫ v f' f^i = v f^{i+1}/(i+1) - ∫ v' f^{i+1}/(i+1)
            let v = (&r * &t).div_rem(f).expect("nonzero f").1;
            let u = (&r - &(&v * &fp)).div_exact(f).expect("exact by construction");
            let inv = FieldScalar::from_int(i + 1).inv().expect("i != -1");
            out = out.add(&Self::new(f, v.scale(&inv), -(i + 1)).expect("valid f"));
            let carry = &u - &v.derivative().scale(&inv);
            if !carry.is_zero() {
                let spill = Self::new(f, carry, -(i + 1)).expect("valid f");
                for (j, a) in spill.digits {
                    let slot = pending.entry(j).or_insert_with(Poly::zero);
                    *slot = &*slot + &a;
                    if slot.is_zero() {
                        pending.remove(&j);
                    }
                }
            }
        }
        out = out.add(&Self::new(f, polynomial.integral(), 0).expect("valid f"));
        let shift = match constants {
            IntegrationConstants::Zero => out.digits.get(&0).map(|a| a.coeff(0)).unwrap_or_else(FieldScalar::zero),
            IntegrationConstants::VanishAt(x0) => out.eval_at(x0).ok_or_else(|| Obstruction {
                exponent: 0,
                residue: Poly::constant(x0.clone()),
            })?,
        };
        Ok(out.add(&Self::new(f, Poly::constant(-&shift), 0).expect("valid f")))
    }
}

/// A term `residue · f^exponent` with no antiderivative in `R[x]_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub exponent: i64,
    pub residue: Poly,
}

/// Where a degree-two element sits relative to `R_f = span{f^i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `A = Σ b_i f^i`.
    InRf(BTreeMap<i64, FieldScalar>),
    /// `A = f' · Σ b_i f^i`.
    InDerivativeRf(BTreeMap<i64, FieldScalar>),
    Neither,
}

/// Decides membership in `R_f` or `f'·R_f` for a degree-two f.
pub fn rf_membership(a: &LocalizedElement) -> Result<Membership> {
    let f = a.f();
    if f.degree() != Some(2) {
        return Err(Error::Domain("membership in R_f is defined for quadratic f".into()));
    }
    if a.digits.values().all(|r| r.degree() == Some(0)) {
        return Ok(Membership::InRf(a.digits.iter().map(|(i, r)| (*i, r.coeff(0))).collect()));
    }
    // every digit must be a multiple of f' = 2a x + b
    let fp = f.derivative();
    let mut b = BTreeMap::new();
    for (i, r) in &a.digits {
        let (q, rem) = r.div_rem(&fp)?;
        if !rem.is_zero() {
            return Ok(Membership::Neither);
        }
        b.insert(*i, q.coeff(0));
    }
    Ok(Membership::InDerivativeRf(b))
}

/// `D X_{k+1} = Σ_{l,p} A_{lp} D^p X_{k-l}` over `R[x]_f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelOperator {
    pub level: usize,
    pub f: Poly,
    pub entries: BTreeMap<(u32, u32), LocalizedElement>,
}

/// Per-entry result of a condition check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryCheck {
    pub l: u32,
    pub p: u32,
    /// Order of A (degree one) or of B (degree two); `None` when the entry is
    /// outside the required subspace.
    pub order: Option<i64>,
    pub bound: i64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub check: String,
    pub status: Status,
    pub entries: Vec<EntryCheck>,
}

/// Outcome of the direct recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecursionOutcome {
    /// `R_0..R_K`.
    Complete(Vec<LocalizedElement>),
    /// `R_0..R_{k-1}` were found; integrating for `R_k` needs a logarithm.
    Obstructed {
        solved: Vec<LocalizedElement>,
        k: usize,
        obstruction: Obstruction,
    },
}

impl LevelOperator {
    pub fn new(level: usize, f: Poly) -> Self {
        LevelOperator {
            level,
            f,
            entries: BTreeMap::new(),
        }
    }

    pub fn with_entry(mut self, l: u32, p: u32, a: LocalizedElement) -> Result<Self> {
        if l as usize > self.level {
            return Err(Error::Domain(format!("entry l = {l} exceeds level {}", self.level)));
        }
        if a.f() != &self.f {
            return Err(Error::Domain("entry localized at a different polynomial".into()));
        }
        if !a.is_zero() {
            self.entries.insert((l, p), a);
        }
        Ok(self)
    }

    /// The level-(n-1) operator of an L-variable system, localized at its linear factor.
    pub fn from_system(sys: &LOdeSystem) -> Result<Self> {
        let level = sys.table.keys().map(|k| k.0 as usize).max().unwrap_or(0);
        let mut op = LevelOperator::new(level, sys.f.clone());
        for (&(l, p), a) in &sys.table {
            op = op.with_entry(l, p, LocalizedElement::from_rational(&sys.f, a)?)?;
        }
        Ok(op)
    }

    /// `Ord(A_{l0}) ≤ -2`, `Ord(A_{l1}) ≤ 0`, `Ord(A_{lp}) ≤ p + 1` for `p ≥ 2`.
    pub fn check_deg1_conditions(&self) -> Result<ConditionReport> {
        if self.f.degree() != Some(1) {
            return Err(Error::Domain("degree-one conditions need a linear f".into()));
        }
        let entries: Vec<EntryCheck> = self
            .entries
            .iter()
            .map(|(&(l, p), a)| {
                let bound = match p {
                    0 => -2,
                    1 => 0,
                    _ => p as i64 + 1,
                };
                let order = a.order().ok();
                let ok = order.is_some_and(|o| o <= bound);
                EntryCheck {
                    l,
                    p,
                    order,
                    bound,
                    status: Status::from_bool(ok),
                }
            })
            .collect();
        Ok(summarize("degree-one-conditions", entries))
    }

    /// Odd p: `A = B`; even p: `A = f'·B`; with `B ∈ R_f`, `Ord(B_{l0}) ≤ -2`
    /// and `Ord(B_{lp}) ≤ ⌊(p-1)/2⌋`.
    pub fn check_deg2_conditions(&self) -> Result<ConditionReport> {
        if self.f.degree() != Some(2) {
            return Err(Error::Domain("degree-two conditions need a quadratic f".into()));
        }
        let mut entries = Vec::new();
        for (&(l, p), a) in &self.entries {
            let bound = if p == 0 { -2 } else { (p as i64 - 1).div_euclid(2) };
            let b = match (rf_membership(a)?, p % 2) {
                (Membership::InRf(b), 1) => Some(b),
                (Membership::InDerivativeRf(b), 0) => Some(b),
                _ => None,
            };
            let order = b.and_then(|b| b.keys().next().copied());
            let ok = order.is_some_and(|o| o <= bound);
            entries.push(EntryCheck {
                l,
                p,
                order,
                bound,
                status: Status::from_bool(ok),
            });
        }
        Ok(summarize("degree-two-conditions", entries))
    }

    /// Integrates `D R_{k+1} = Σ A_{lp} D^p R_{k-l}` from `R_0 = 1`.
    pub fn run_recursion(&self, depth: usize, constants: &IntegrationConstants) -> RecursionOutcome {
        let max_p = self.entries.keys().map(|k| k.1).max().unwrap_or(0) as usize;
        let mut solved = vec![LocalizedElement::one(&self.f)];
        // derivatives D^p R_k, cached per k
        let derive_all = |x: &LocalizedElement| {
            let mut ds = vec![x.clone()];
            for _ in 0..max_p {
                let next = ds.last().expect("nonempty").derivative();
                ds.push(next);
            }
            ds
        };
        let mut derived = vec![derive_all(&solved[0])];
        for k in 0..depth {
            let mut rhs = LocalizedElement::zero(&self.f);
            for (&(l, p), a) in &self.entries {
                if let Some(src) = k.checked_sub(l as usize) {
                    rhs = rhs.add(&a.mul(&derived[src][p as usize]));
                }
            }
            match rhs.integrate(constants) {
                Ok(next) => {
                    derived.push(derive_all(&next));
                    solved.push(next);
                }
                Err(obstruction) => {
                    return RecursionOutcome::Obstructed {
                        solved,
                        k: k + 1,
                        obstruction,
                    }
                }
            }
        }
        RecursionOutcome::Complete(solved)
    }
}

fn summarize(check: &str, entries: Vec<EntryCheck>) -> ConditionReport {
    ConditionReport {
        check: check.into(),
        status: Status::from_bool(entries.iter().all(|e| e.status.passed())),
        entries,
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    l: u32,
    p: u32,
    num: Poly,
    fexp: i64,
}

#[derive(Serialize, Deserialize)]
struct LevelOperatorJson {
    level: usize,
    f: Poly,
    entries: Vec<EntryJson>,
}

impl Serialize for LevelOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LevelOperatorJson {
            level: self.level,
            f: self.f.clone(),
            entries: self
                .entries
                .iter()
                .map(|(&(l, p), a)| {
                    let (num, fexp) = a.to_parts();
                    EntryJson { l, p, num, fexp }
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LevelOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = LevelOperatorJson::deserialize(d)?;
        let mut op = LevelOperator::new(raw.level, raw.f.clone());
        for e in raw.entries {
            let a = LocalizedElement::new(&raw.f, e.num, e.fexp).map_err(serde::de::Error::custom)?;
            op = op.with_entry(e.l, e.p, a).map_err(serde::de::Error::custom)?;
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lin() -> Poly {
        Poly::from_ints(&[-4, 3])
    }

    fn quad() -> Poly {
        Poly::from_ints(&[1, 0, 1])
    }

    fn s(v: i64) -> FieldScalar {
        FieldScalar::from_int(v)
    }

    #[test]
    fn orders() {
        let f = lin();
        let a = LocalizedElement::from_scalar_digits(&f, &[(-3, s(1)), (-1, s(1))]).unwrap();
        assert_eq!(a.order().unwrap(), -3);
        let x = LocalizedElement::new(&f, Poly::x(), 0).unwrap();
        assert_eq!(x.order().unwrap(), 0);
        assert!(LocalizedElement::zero(&f).order().is_err());
    }

    #[test]
    fn membership() {
        let f = quad();
        let cube = LocalizedElement::new(&f, f.pow(3), 0).unwrap();
        assert_eq!(rf_membership(&cube).unwrap(), Membership::InRf([(3, s(1))].into()));
        let dfm2 = LocalizedElement::new(&f, f.derivative(), 2).unwrap();
        assert_eq!(rf_membership(&dfm2).unwrap(), Membership::InDerivativeRf([(-2, s(1))].into()));
        let x = LocalizedElement::new(&f, Poly::x(), 0).unwrap();
        let half = FieldScalar::rational(1, 2).unwrap();
        assert_eq!(rf_membership(&x).unwrap(), Membership::InDerivativeRf([(0, half)].into()));
        let mixed = LocalizedElement::new(&f, Poly::from_ints(&[1, 1]), 0).unwrap();
        assert_eq!(rf_membership(&mixed).unwrap(), Membership::Neither);
    }

    #[test]
    fn degree_one_thresholds() {
        let f = lin();
        let op = LevelOperator::new(0, f.clone());
        assert!(op.check_deg1_conditions().unwrap().status.passed());
        let bad = op
            .clone()
            .with_entry(0, 0, LocalizedElement::new(&f, Poly::one(), 1).unwrap())
            .unwrap();
        let report = bad.check_deg1_conditions().unwrap();
        assert_eq!(report.status, Status::Fail);
        assert_eq!(report.entries[0].order, Some(-1));
    }

    #[test]
    fn degree_two_thresholds() {
        let f = quad();
        let base = LevelOperator::new(0, f.clone());
        let odd = base
            .clone()
            .with_entry(0, 1, LocalizedElement::new(&f, Poly::one(), 2).unwrap())
            .unwrap();
        assert!(odd.check_deg2_conditions().unwrap().status.passed());
        let even = base
            .clone()
            .with_entry(0, 0, LocalizedElement::new(&f, f.derivative(), 2).unwrap())
            .unwrap();
        assert!(even.check_deg2_conditions().unwrap().status.passed());
        let weak = base
            .with_entry(0, 0, LocalizedElement::new(&f, f.derivative(), 1).unwrap())
            .unwrap();
        let report = weak.check_deg2_conditions().unwrap();
        assert_eq!(report.status, Status::Fail);
        assert_eq!(report.entries[0].order, Some(-1));
    }

    #[test]
    fn recursion_edge_cases() {
        let f = lin();
        match LevelOperator::new(0, f.clone()).run_recursion(3, &IntegrationConstants::Zero) {
            RecursionOutcome::Complete(r) => {
                assert!(r[0] == LocalizedElement::one(&f));
                assert!(r[1..].iter().all(LocalizedElement::is_zero));
            }
            other => panic!("{other:?}"),
        }
        let log = LevelOperator::new(0, f.clone())
            .with_entry(0, 0, LocalizedElement::new(&f, Poly::one(), 1).unwrap())
            .unwrap();
        match log.run_recursion(3, &IntegrationConstants::Zero) {
            RecursionOutcome::Obstructed { k, obstruction, .. } => {
                assert_eq!(k, 1);
                assert_eq!(obstruction.exponent, -1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quadratic_integration() {
        let f = quad();
        // x / f^2 = (1/2) f' f^-2 integrates to -(1/2) f^-1
        let a = LocalizedElement::new(&f, Poly::x(), 2).unwrap();
        let int = a.integrate(&IntegrationConstants::Zero).unwrap();
        assert_eq!(int.derivative(), a);
        // 1/f is arctan: obstruction
        let b = LocalizedElement::new(&f, Poly::one(), 1).unwrap();
        assert!(b.integrate(&IntegrationConstants::Zero).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = lin();
        let op = LevelOperator::new(1, f.clone())
            .with_entry(1, 3, LocalizedElement::new(&f, Poly::from_ints(&[1, 2]), 4).unwrap())
            .unwrap();
        let text = serde_json::to_string(&op).unwrap();
        assert!(text.starts_with(r#"{"level":1,"f":["-4","3"],"entries":[{"l":1,"p":3,"#), "{text}");
        assert_eq!(serde_json::from_str::<LevelOperator>(&text).unwrap(), op);
    }

    fn arb_element(f: Poly) -> impl Strategy<Value = LocalizedElement> {
        (proptest::collection::vec(-5i64..6, 1..6), 0i64..4)
            .prop_map(move |(num, e)| LocalizedElement::new(&f, Poly::from_ints(&num), e).unwrap())
    }

    #[test]
    fn recursion_matches_normalized_series() {
        use crate::asymptotics::{derive_l_ode, solve_asymptotics};
        use crate::model::{GnBasis, LambdaConfig};
        for cfg in [
            LambdaConfig::new(vec![s(1), s(2)]).unwrap(),
            LambdaConfig::spl2_canonical(),
        ] {
            let op = LevelOperator::from_system(&derive_l_ode(&cfg).unwrap()).unwrap();
            assert!(op.check_deg1_conditions().unwrap().status.passed());
            for i in 0..=cfg.n() {
                let data = solve_asymptotics(&cfg, i, 3, 6).unwrap();
                let norm = GnBasis::new(&cfg, i).unwrap().half_power_series(&data.l).unwrap();
                let constants = IntegrationConstants::VanishAt(cfg.lambda(i).clone());
                let RecursionOutcome::Complete(phi) = op.run_recursion(3, &constants) else {
                    panic!("obstructed");
                };
                for k in 0..=3 {
                    assert_eq!(&phi[k].eval(&data.l).unwrap() * &norm, data.r[k], "i={i} k={k}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn expansion_is_unique(a in arb_element(lin())) {
            let r = a.to_rational();
            prop_assert_eq!(LocalizedElement::from_rational(&lin(), &r).unwrap(), a);
        }

        #[test]
        fn integration_inverts_derivation(a in arb_element(quad())) {
            let da = a.derivative();
            let back = da.integrate(&IntegrationConstants::Zero).unwrap();
            prop_assert_eq!(back.derivative(), da);
        }

        #[test]
        fn product_rule(a in arb_element(lin()), b in arb_element(lin())) {
            let lhs = a.mul(&b).derivative();
            let rhs = a.derivative().mul(&b).add(&a.mul(&b.derivative()));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
