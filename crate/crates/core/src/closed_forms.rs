//! Closed forms for n = 1 and for n = 2 on the `s_2^2 = 3 s_1 s_3`
//! locus, kept as formula text in `s1`, `s2`, `L` and evaluated exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{GnBasis, GnElement, LambdaConfig};
use crate::scalars::{FieldScalar, RationalFunction};

/// `R_{1,i} / (λ_i ∏_{j≠i}(λ_i - λ_j) / f_1(L))^{1/2}` for n = 1, first part.
const R1_N1: &str = "(-16*s1^2*s2^2 + 88*s2^3 + (27*s1^3*s2 - 132*s1*s2^2)*L + (-12*s1^4 + 54*s1^2*s2)*L^2) \
    / (24*s1*(L*s1 - 2*s2)^3)";
/// Second part, with `b = λ_{i+1}` taken cyclically.
const R1_N1_CONST: &str = "(12*a^2 - 9*a*b + b^2) / (24*(a^3 - a*b^2))";

const A_N1: [((u32, u32), &str); 3] = [
    (
        (0, 0),
        "(-s1^2*s2^2 + (-s1^3*s2 + 8*s1*s2^2)*L + (2*s1^4 - 9*s1^2*s2)*L^2) / (4*(L*s1 - 2*s2)^4)",
    ),
    (
        (0, 1),
        "(2*s1*s2^2 + (-s1^2*s2 - 8*s2^2)*L + (-s1^3 + 10*s1*s2)*L^2 - s1^2*L^3) / (2*(L*s1 - 2*s2)^3)",
    ),
    (
        (0, 2),
        "(s2^2 - 2*(s1*s2)*L + (s1^2 + s2)*L^2 - s1*L^3) / (L*s1 - 2*s2)^2",
    ),
];

const A_N2_POLY10: &str = "((8*s1^2*s2^5 - 21*s2^6) + (-48*s1^3*s2^4 + 126*s1*s2^5)*L \
    + (120*s1^4*s2^3 - 315*s1^2*s2^4)*L^2 + (-124*s1^5*s2^2 + 264*s1^3*s2^3 + 144*s1*s2^4)*L^3 \
    + (12*s1^6*s2 + 153*s1^4*s2^2 - 432*s1^2*s2^3)*L^4 + (60*s1^7 - 342*s1^5*s2 + 432*s1^3*s2^2)*L^5 \
    + (-33*s1^6 + 108*s1^4*s2)*L^6)";

fn a_n2_text(key: (u32, u32)) -> String {
    match key {
        (0, 0) => "s1/(9*(s1*L - s2)^5) * (s1*s2^3 + (-4*s1^2*s2^2 + 3*s2^3)*L \
            + (-s1^3*s2 + 12*s1*s2^2)*L^2 + (11*s1^4 - 36*s1^2*s2)*L^3)"
            .into(),
        (0, 1) => "-s1/(3*(s1*L - s2)^4) * (s2^3 - 4*(s1*s2^2)*L + (3*s1^2*s2 + 9*s2^2)*L^2 \
            + (3*s1^3 - 21*s1*s2)*L^3 + 3*s1^2*L^4)"
            .into(),
        (0, 2) => "-1/(3*(s1*L - s2)^3) * (s2^3 - 5*(s1*s2^2)*L + 9*s1^2*s2*L^2 \
            + (-6*s1^3 - 3*s1*s2)*L^3 + 6*s1^2*L^4)"
            .into(),
        (1, 0) => format!("s1^2*L/(27*(s1*L - s2)^9) * {A_N2_POLY10}"),
        (1, 1) => format!("-s1*L/(27*(s1*L - s2)^8) * {A_N2_POLY10}"),
        (1, 2) => "s1/(9*(s1*L - s2)^7) * (-s2^6 + 9*s1*s2^5*L + (-32*s1^2*s2^4 - 9*s2^5)*L^2 \
            + (57*s1^3*s2^3 + 60*s1*s2^4)*L^3 + (-48*s1^4*s2^2 - 171*s1^2*s2^3)*L^4 \
            + (9*s1^5*s2 + 237*s1^3*s2^2 + 27*s1*s2^3)*L^5 + (9*s1^6 - 144*s1^4*s2 - 90*s1^2*s2^2)*L^6 \
            + (9*s1^5 + 108*s1^3*s2)*L^7 - 18*s1^4*L^8)"
            .into(),
        (1, 3) => "-(3*L^2*s1^2 - 3*L*s1*s2 + s2^2)*(-3*L^3*s1 + 3*L^2*s1^2 - 3*L*s1*s2 + s2^2)^2 \
            / (27*(s1*L - s2)^6)"
            .into(),
        _ => unreachable!("no such entry"),
    }
}

const A_N2_KEYS: [(u32, u32); 7] = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2), (1, 3)];

fn symmetric_vars(cfg: &LambdaConfig) -> Vec<(&'static str, RationalFunction)> {
    vec![
        ("s1", RationalFunction::constant(cfg.s(1))),
        ("s2", RationalFunction::constant(cfg.s(2))),
        ("L", RationalFunction::x()),
    ]
}

/// Closed-form R_0: `(λ_i ∏_{j≠i}(λ_i - λ_j) / f_n(L))^{1/2}`.
pub fn r0(cfg: &LambdaConfig, i: usize) -> Result<GnElement> {
    GnBasis::new(cfg, i)?.element(RationalFunction::one(), 1)
}

/// Closed-form R_1 for n = 1, with the convention `λ_2 = λ_0`.
pub fn r1_n1(cfg: &LambdaConfig, i: usize) -> Result<GnElement> {
    if cfg.n() != 1 {
        return Err(Error::Domain("the R_1 closed form is for n = 1".into()));
    }
    let vars = symmetric_vars(cfg);
    let body = eval_formula(R1_N1, &vars)?;
    let consts = [
        ("a", RationalFunction::constant(cfg.lambda(i).clone())),
        ("b", RationalFunction::constant(cfg.lambda((i + 1) % 2).clone())),
    ];
    let body = &body + &eval_formula(R1_N1_CONST, &consts)?;
    GnBasis::new(cfg, i)?.element(body, 1)
}

/// Closed-form A-table: n = 1 for any weights, n = 2 on the spl2 locus.
/// Returns `Specialization` when the formulas do not apply or are singular.
pub fn a_table(cfg: &LambdaConfig) -> Result<BTreeMap<(u32, u32), RationalFunction>> {
    let vars = symmetric_vars(cfg);
    match cfg.n() {
        1 => A_N1
            .iter()
            .map(|(k, text)| Ok((*k, eval_formula(text, &vars)?)))
            .collect(),
        2 if !cfg.is_spl2() => Err(Error::Specialization("n = 2 table needs s_2^2 = 3 s_1 s_3".into())),
        2 if cfg.s(1).is_zero() => Err(Error::Specialization(
            "n = 2 table is singular at s_1 = s_2 = 0 (denominators are powers of s_1 L - s_2)".into(),
        )),
        2 => A_N2_KEYS
            .iter()
            .map(|k| Ok((*k, eval_formula(&a_n2_text(*k), &vars)?)))
            .collect(),
        n => Err(Error::Specialization(format!("no closed-form table for n = {n}"))),
    }
}

/// Evaluates an arithmetic expression over rational functions in L.
///
/// Grammar: sums and differences of products and quotients of powers with
/// nonnegative integer exponents; atoms are integers, variables, or
/// parenthesized expressions; unary minus is allowed.
pub fn eval_formula(text: &str, vars: &[(&str, RationalFunction)]) -> Result<RationalFunction> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, vars };
    let value = parser.sum()?;
    if parser.pos != parser.tokens.len() {
        return Err(Error::Parse(format!("trailing input in {text:?}")));
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(i64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
            }
            out.push(Token::Int(s.parse().map_err(|_| Error::Parse(s.clone()))?));
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric()) {
                s.push(d);
                chars.next();
            }
            out.push(Token::Ident(s));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            chars.next();
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [(&'a str, RationalFunction)],
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<RationalFunction> {
        let mut acc = self.product()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.product()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' { &acc * &rhs } else { acc.checked_div(&rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Token::Int(e)) => {
                    self.pos += 1;
                    return base.pow(*e);
                }
                other => return Err(Error::Parse(format!("expected an exponent, found {other:?}"))),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        let token = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of formula".into()))?;
        self.pos += 1;
        match token {
            Token::Int(v) => Ok(RationalFunction::constant(FieldScalar::from_int(v))),
            Token::Ident(name) => self
                .vars
                .iter()
                .find(|(n, _)| *n == name)
                .map(|(_, v)| v.clone())
                .ok_or_else(|| Error::Parse(format!("unknown variable {name}"))),
            Token::Op('(') => {
                let inner = self.sum()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::Parse("missing closing parenthesis".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Token::Op(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Poly;

    #[test]
    fn formula_evaluation() {
        let vars = [("L", RationalFunction::x()), ("a", RationalFunction::constant(FieldScalar::from_int(3)))];
        let v = eval_formula("-(a*L - 4)^2 / (2*L) + -1", &vars).unwrap();
        let expected = RationalFunction::new(Poly::from_ints(&[-16, 22, -9]), Poly::from_ints(&[0, 2])).unwrap();
        assert_eq!(v, expected);
        assert!(eval_formula("1 +", &vars).is_err());
        assert!(eval_formula("x", &vars).is_err());
        assert!(eval_formula("(1", &vars).is_err());
    }

    #[test]
    fn tables_have_the_expected_shape() {
        let c = LambdaConfig::new(vec![FieldScalar::from_int(1), FieldScalar::from_int(2)]).unwrap();
        let t = a_table(&c).unwrap();
        assert_eq!(t.len(), 3);
        let a02 = &t[&(0, 2)];
        // f^-2 coefficient at L = 4/3 is 4/9
        let f2 = Poly::from_ints(&[-4, 3]).pow(2);
        let scaled = &RationalFunction::from_poly(f2) * a02;
        assert_eq!(scaled.eval(&FieldScalar::rational(4, 3).unwrap()).unwrap(), FieldScalar::rational(4, 9).unwrap());
        let t2 = a_table(&LambdaConfig::spl2_canonical()).unwrap();
        assert_eq!(t2.len(), 7);
        assert!(matches!(a_table(&LambdaConfig::roots_of_unity(3).unwrap()), Err(Error::Specialization(_))));
    }

    #[test]
    fn derived_tables_match() {
        use crate::asymptotics::derive_l_ode;
        let c = LambdaConfig::new(vec![FieldScalar::from_int(1), FieldScalar::from_int(2)]).unwrap();
        assert_eq!(derive_l_ode(&c).unwrap().table, a_table(&c).unwrap());
        let c = LambdaConfig::spl2_canonical();
        assert_eq!(derive_l_ode(&c).unwrap().table, a_table(&c).unwrap());
    }

    #[test]
    fn r1_matches_the_recursion() {
        use crate::asymptotics::solve_asymptotics;
        let c = LambdaConfig::new(vec![FieldScalar::from_int(1), FieldScalar::from_int(2)]).unwrap();
        for i in 0..2 {
            let data = solve_asymptotics(&c, i, 1, 8).unwrap();
            assert_eq!(r1_n1(&c, i).unwrap().eval(&data.l).unwrap(), data.r[1]);
        }
    }
}
