use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::LambdaConfig;
use crate::error::{Error, Result};
use crate::scalars::{FieldScalar, Poly, RationalFunction};
use crate::series::QSeries;

/// The localizing data of the ring `field[L^{±1}, f_n(L)^{-1/2}]` at one weight.
///
/// `f = unit · base^kappa`. When `f` is a power of a linear polynomial the
/// base is that linear factor; otherwise the base is `f` itself. A constant
/// `f` has `kappa = 0` and base `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnBasis {
    f: Poly,
    base: Poly,
    kappa: u32,
    /// `f_n(λ_i)`; the half power is normalized to `(norm / f)^{1/2}`.
    norm: FieldScalar,
}

impl GnBasis {
    pub fn new(cfg: &LambdaConfig, i: usize) -> Result<Self> {
        let f = cfg.f_poly();
        let norm = cfg.f_at_root(i);
        let (base, kappa) = linear_base(&f);
        Ok(GnBasis { f, base, kappa, norm })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn base(&self) -> &Poly {
        &self.base
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn norm(&self) -> &FieldScalar {
        &self.norm
    }

    /// Whether the base is `L` itself, so the body is a plain Laurent polynomial.
    pub fn base_is_l(&self) -> bool {
        self.base == Poly::x()
    }

    /// `norm / f` as a rational function: the square of the half power.
    pub fn half_power_square(&self) -> RationalFunction {
        RationalFunction::new(Poly::constant(self.norm.clone()), self.f.clone()).expect("f is nonzero")
    }

    /// `(norm / f(L))^{1/2}` with constant term 1.
    pub fn half_power_series(&self, l: &QSeries) -> Result<QSeries> {
        let ratio = l.eval_poly(&self.f).scale(&self.norm.inv()?);
        if !ratio.constant_term().is_one() {
            return Err(Error::Domain(format!(
                "f(L(0))/f(λ) = {} is not 1; wrong weight for this basis",
                ratio.constant_term()
            )));
        }
        ratio.sqrt_with_root(&FieldScalar::one())?.inverse()
    }

    pub fn element(&self, body: RationalFunction, half_power: u8) -> Result<GnElement> {
        GnElement::new(self.clone(), body, half_power)
    }

    pub fn one(&self) -> GnElement {
        GnElement {
            basis: self.clone(),
            body: RationalFunction::one(),
            half_power: 0,
        }
    }
}

/// Picks the base: `lc(f)·(L - r)` when `f = lc(f)·(L - r)^k`, else `f`.
fn linear_base(f: &Poly) -> (Poly, u32) {
    let deg = match f.degree() {
        None | Some(0) => return (Poly::x(), 0),
        Some(1) => return (f.clone(), 1),
        Some(deg) => deg,
    };
    // the only candidate root of a pure power is the mean of the roots
    let lead = f.leading();
    let root = -&(&f.coeff(deg - 1) / &(&lead * &FieldScalar::from_int(deg as i64)));
    let lin = Poly::linear(FieldScalar::one(), -&root);
    if lin.pow(deg as u32).scale(&lead) == *f {
        return (lin.scale(&lead), deg as u32);
    }
    (f.clone(), 1)
}

/// One element `body · (norm / f)^{half_power / 2}` of the ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnElement {
    basis: GnBasis,
    body: RationalFunction,
    half_power: u8,
}

/// The canonical expansion of a body: poles at `L = 0` and base-adic digits.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Expansion {
    /// `t ↦ c` for the term `c L^{-t}`, `t ≥ 1`.
    pub l_poles: BTreeMap<u32, FieldScalar>,
    /// `s ↦ r` for the term `r(L) base^s` with `deg r < deg base`.
    pub digits: BTreeMap<i64, Poly>,
}

impl GnElement {
    pub fn new(basis: GnBasis, body: RationalFunction, half_power: u8) -> Result<Self> {
        if half_power > 1 {
            return Err(Error::Domain(format!("half power must be 0 or 1, got {half_power}")));
        }
        expand(&basis, &body)?;
        Ok(GnElement {
            basis,
            body,
            half_power,
        })
    }

    /// Builds an element from its canonical expansion.
    pub fn from_expansion(basis: GnBasis, exp: &Expansion, half_power: u8) -> Result<Self> {
        let mut body = RationalFunction::zero();
        for (t, c) in &exp.l_poles {
            let term = RationalFunction::new(Poly::constant(c.clone()), Poly::monomial(FieldScalar::one(), *t as usize))?;
            body = &body + &term;
        }
        let base = RationalFunction::from_poly(basis.base.clone());
        for (s, r) in &exp.digits {
            body = &body + &(&RationalFunction::from_poly(r.clone()) * &base.pow(*s)?);
        }
        Self::new(basis, body, half_power)
    }

    pub fn basis(&self) -> &GnBasis {
        &self.basis
    }

    pub fn body(&self) -> &RationalFunction {
        &self.body
    }

    pub fn half_power(&self) -> u8 {
        self.half_power
    }

    pub fn expansion(&self) -> Expansion {
        expand(&self.basis, &self.body).expect("checked at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    fn with_body(&self, body: RationalFunction, half_power: u8) -> GnElement {
        GnElement {
            basis: self.basis.clone(),
            body,
            half_power,
        }
    }

    fn check_same(&self, other: &GnElement) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::Domain("elements over different bases".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &GnElement) -> Result<GnElement> {
        self.check_same(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.half_power != other.half_power {
            return Err(Error::Domain("sum mixes integral and half-integral powers".into()));
        }
        Ok(self.with_body(&self.body + &other.body, self.half_power))
    }

    pub fn neg(&self) -> GnElement {
        self.with_body(-&self.body, self.half_power)
    }

    pub fn mul(&self, other: &GnElement) -> Result<GnElement> {
        self.check_same(other)?;
        let mut body = &self.body * &other.body;
        let mut m = self.half_power + other.half_power;
        if m == 2 {
            body = &body * &self.basis.half_power_square();
            m = 0;
        }
        Ok(self.with_body(body, m))
    }

    pub fn scale(&self, c: &FieldScalar) -> GnElement {
        self.with_body(self.body.scale(c), self.half_power)
    }

    /// Substitutes the L-series of the basis weight.
    pub fn eval(&self, l: &QSeries) -> Result<QSeries> {
        let body = l.eval_rational(&self.body)?;
        if self.half_power == 0 {
            return Ok(body);
        }
        Ok(&body * &self.basis.half_power_series(l)?)
    }

    /// Text form, e.g. `(-1/(3*L - 4))^(1/2) * [(3*L - 4)^-1*(2) + 1]`.
    pub fn render(&self) -> String {
        let body = render_expansion(&self.basis, &self.expansion());
        if self.half_power == 0 {
            return body;
        }
        format!(
            "({}/({}))^(1/2) * [{}]",
            self.basis.norm,
            self.basis.f.display_in("L"),
            body
        )
    }
}

impl fmt::Display for GnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

fn expand(basis: &GnBasis, body: &RationalFunction) -> Result<Expansion> {
    let mut out = Expansion::default();
    if body.is_zero() {
        return Ok(out);
    }
    let b = &basis.base;
    let b_monic = b.monic();
    let den = body.den();
    let a = den.valuation();
    let mut rest = den.shift_down(a);
    let mut beta = 0i64;
    if !basis.base_is_l() {
        loop {
            let (q, r) = rest.div_rem(&b_monic)?;
            if !r.is_zero() || rest.degree() == Some(0) {
                break;
            }
            rest = q;
            beta += 1;
        }
    }
    if rest.degree() != Some(0) {
        return Err(Error::NotLocalized(format!(
            "denominator {} has factors other than L and {}",
            den.display_in("L"),
            b.display_in("L")
        )));
    }
    let num = body.num().scale(&rest.leading().inv()?);
    let la = Poly::monomial(FieldScalar::one(), a);
    let bb = b_monic.pow(beta as u32);
    // 1 = s L^a + t b^beta, so num / (L^a b^beta) = num s / b^beta + num t / L^a
    let (g, s, t) = la.ext_gcd(&bb);
    debug_assert!(g.is_one());
    let (q1, pole_part) = (&num * &t).div_rem(&la)?;
    let (q2, base_part) = (&num * &s).div_rem(&bb)?;
    for (k, c) in pole_part.coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.l_poles.insert((a - k) as u32, c.clone());
        }
    }
    let lc_inv = b.leading().inv()?;
    let mut push_digits = |mut p: Poly, start: i64| -> Result<()> {
        let mut s = start;
        while !p.is_zero() {
            let (q, r) = p.div_rem(&b_monic)?;
            if !r.is_zero() {
                // r · b_monic^s = r · lc^{-s} · b^s
                let digit = r.scale(&lc_inv.pow(s)?);
                let slot = out.digits.entry(s).or_insert_with(Poly::zero);
                *slot = &*slot + &digit;
                if slot.is_zero() {
                    out.digits.remove(&s);
                }
            }
            p = q;
            s += 1;
        }
        Ok(())
    };
    push_digits(base_part, -beta)?;
    push_digits(&q1 + &q2, 0)?;
    Ok(out)
}

fn render_expansion(basis: &GnBasis, exp: &Expansion) -> String {
    let mut parts = Vec::new();
    let b = basis.base.display_in("L");
    for (s, r) in &exp.digits {
        let r_text = r.display_in("L");
        parts.push(match s {
            0 => r_text,
            _ if basis.base_is_l() => format!("{r_text}*L^{s}"),
            _ => format!("({b})^{s}*({r_text})"),
        });
    }
    for (t, c) in exp.l_poles.iter().rev() {
        parts.push(format!("{c}*L^-{t}"));
    }
    if parts.is_empty() {
        return "0".into();
    }
    parts.join(" + ")
}

#[derive(Serialize, Deserialize)]
struct DigitJson {
    s: i64,
    r: Poly,
}

#[derive(Serialize, Deserialize)]
struct PoleJson {
    t: u32,
    c: FieldScalar,
}

#[derive(Serialize, Deserialize)]
struct GnElementJson {
    half_power: u8,
    f: Poly,
    base: Poly,
    norm: FieldScalar,
    l_poles: Vec<PoleJson>,
    digits: Vec<DigitJson>,
    text: String,
}

impl Serialize for GnElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let exp = self.expansion();
        GnElementJson {
            half_power: self.half_power,
            f: self.basis.f.clone(),
            base: self.basis.base.clone(),
            norm: self.basis.norm.clone(),
            l_poles: exp
                .l_poles
                .iter()
                .map(|(t, c)| PoleJson { t: *t, c: c.clone() })
                .collect(),
            digits: exp
                .digits
                .iter()
                .map(|(s, r)| DigitJson { s: *s, r: r.clone() })
                .collect(),
            text: self.render(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GnElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GnElementJson::deserialize(d)?;
        let kappa = match raw.f.degree() {
            Some(0) | None => 0,
            Some(deg) => {
                let bdeg = raw.base.degree().unwrap_or(1).max(1);
                (deg / bdeg) as u32
            }
        };
        let basis = GnBasis {
            f: raw.f,
            base: raw.base,
            kappa,
            norm: raw.norm,
        };
        let exp = Expansion {
            l_poles: raw.l_poles.into_iter().map(|p| (p.t, p.c)).collect(),
            digits: raw.digits.into_iter().map(|d| (d.s, d.r)).collect(),
        };
        GnElement::from_expansion(basis, &exp, raw.half_power).map_err(serde::de::Error::custom)
    }
}
