//! Symbolic expressions for the `t`, `f` and `M` columns: rational linear
//! combinations of products of generators raised to integer powers.
//!
//! Text syntax, used by the compiled-in registry and by override files:
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := factor (('*'|'/') factor)*
//! factor  := integer | generator ['^' ['-'] integer]
//! generator := eta(<eta quotient>) | theta(a,b,c) | E(k,chi,psi[,t]) | E4(t) | q
//! ```
//!
//! For example `eta(1^1 23^1) / theta(1,1,6)` or
//! `-1/24*E(3,1,chi23) - 23/24*E(3,chi23,1)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::eisenstein::{e4_series, eisenstein_series, EisensteinSpec};
use super::eta::{eta_quotient_series, EtaQuotient};
use super::theta::{theta_series, ThetaForm};
use crate::error::{Error, Result};
use crate::numeric::{rat_int, BigRational};
use crate::qseries::TruncatedSeries;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Eta(EtaQuotient),
    Theta(ThetaForm),
    Eisenstein(EisensteinSpec),
    /// `E_4(q^scale)` normalized to constant term 1.
    E4 { scale: u64 },
    /// The variable `q` itself.
    Q,
}

impl Generator {
    pub fn series(&self, order: i64) -> Result<TruncatedSeries> {
        match self {
            Generator::Eta(e) => eta_quotient_series(e, order),
            Generator::Theta(t) => theta_series(t, order),
            Generator::Eisenstein(e) => eisenstein_series(e, order),
            Generator::E4 { scale } => e4_series(*scale, order),
            Generator::Q => Ok(TruncatedSeries::monomial(BigRational::one(), 1, order)),
        }
    }

    /// Exponent of the leading term.
    pub fn valuation(&self) -> Result<i64> {
        match self {
            Generator::Eta(e) => e.shift(),
            Generator::Theta(_) | Generator::E4 { .. } => Ok(0),
            Generator::Eisenstein(e) => Ok(e.valuation()),
            Generator::Q => Ok(1),
        }
    }

    /// Scales `s` appearing as `eta(s z)` or `E(q^s)`.
    pub fn scales(&self) -> Vec<u64> {
        match self {
            Generator::Eta(e) => e.scales().collect(),
            Generator::Theta(_) => Vec::new(),
            Generator::Eisenstein(e) => vec![e.scale],
            Generator::E4 { scale } => vec![*scale],
            Generator::Q => Vec::new(),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Eta(e) => write!(f, "eta({e})"),
            Generator::Theta(t) => write!(f, "theta({t})"),
            Generator::Eisenstein(e) => write!(f, "{e}"),
            Generator::E4 { scale } => write!(f, "E4({scale})"),
            Generator::Q => f.write_str("q"),
        }
    }
}

/// `coefficient * prod generator^exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductTerm {
    pub coefficient: BigRational,
    /// Distinct generators with nonzero exponents, in first-seen order.
    pub factors: Vec<(Generator, i64)>,
}

impl ProductTerm {
    pub fn new(coefficient: BigRational, factors: impl IntoIterator<Item = (Generator, i64)>) -> Self {
        let mut merged: Vec<(Generator, i64)> = Vec::new();
        for (g, e) in factors {
            match merged.iter_mut().find(|(h, _)| *h == g) {
                Some((_, x)) => *x += e,
                None => merged.push((g, e)),
            }
        }
        merged.retain(|&(_, e)| e != 0);
        ProductTerm { coefficient, factors: merged }
    }

    pub fn eval(&self, order: i64) -> Result<TruncatedSeries> {
        let mut valuations = Vec::with_capacity(self.factors.len());
        let mut total = 0i64;
        for (g, e) in &self.factors {
            let v = g.valuation()?;
            valuations.push(v);
            total += v * e;
        }
        let precision = order - total;
        if precision < 0 || self.coefficient.is_zero() {
            return Ok(TruncatedSeries::zero(order));
        }
        let mut acc: Option<TruncatedSeries> = None;
        for ((g, e), v) in self.factors.iter().zip(valuations) {
            let s = g.series(v + precision)?.pow(*e)?;
            acc = Some(match acc {
                None => s,
                Some(a) => &a * &s,
            });
        }
        let product = match acc {
            Some(p) => p.scale(&self.coefficient),
            None => TruncatedSeries::monomial(self.coefficient.clone(), 0, order),
        };
        debug_assert!(product.order() >= order, "term lost precision");
        Ok(product.truncate(order))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormExpr {
    pub terms: Vec<ProductTerm>,
}

impl FormExpr {
    pub fn single(g: Generator) -> Self {
        FormExpr { terms: vec![ProductTerm::new(BigRational::one(), [(g, 1)])] }
    }

    pub fn generators(&self) -> impl Iterator<Item = (&Generator, i64)> {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|(g, e)| (g, *e)))
    }

    pub fn scales(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.generators().flat_map(|(g, _)| g.scales()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// `self + c q^exponent`; used to build perturbed controls.
    pub fn plus_monomial(&self, c: BigRational, exponent: i64) -> Self {
        let mut out = self.clone();
        out.terms.push(ProductTerm::new(c, [(Generator::Q, exponent)]));
        out
    }
}

pub fn eval_form_expr(expr: &FormExpr, order: i64) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::zero(order);
    for t in &expr.terms {
        acc = &acc + &t.eval(order)?;
    }
    Ok(acc)
}

impl fmt::Display for ProductTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // sign is printed by the caller
        let c = self.coefficient.abs();
        let num: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, e)| *e > 0)
            .map(|(g, e)| if *e == 1 { g.to_string() } else { format!("{g}^{e}") })
            .collect();
        let den: Vec<String> = self
            .factors
            .iter()
            .filter(|(_, e)| *e < 0)
            .map(|(g, e)| if *e == -1 { g.to_string() } else { format!("{g}^{}", -e) })
            .collect();
        let mut head = Vec::new();
        if !c.is_one() || num.is_empty() {
            head.push(format!("{}", c.numer()));
        }
        head.extend(num);
        let mut s = head.join("*");
        if !c.denom().is_one() {
            // 7/240*E4(1): the denominator belongs to the scalar
            s = match s.split_once('*') {
                Some((n, rest)) => format!("{n}/{}*{rest}", c.denom()),
                None => format!("{s}/{}", c.denom()),
            };
        }
        for d in den {
            s.push_str(" / ");
            s.push_str(&d);
        }
        f.write_str(&s)
    }
}

impl fmt::Display for FormExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let neg = t.coefficient.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at offset {} in '{}'", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += self.src[self.pos..].chars().next().unwrap().len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !pred(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn integer(&mut self) -> Result<BigInt> {
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits.parse().map_err(|_| self.err("expected integer"))
    }

    fn signed_small(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let v: i64 = self.take_while(|c| c.is_ascii_digit()).parse().map_err(|_| self.err("expected exponent"))?;
        Ok(if neg { -v } else { v })
    }

    fn parenthesized(&mut self) -> Result<&'a str> {
        if !self.eat('(') {
            return Err(self.err("expected '('"));
        }
        let body = self.take_while(|c| c != ')');
        if !self.eat(')') {
            return Err(self.err("expected ')'"));
        }
        Ok(body)
    }

    fn generator(&mut self) -> Result<Generator> {
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if name == "q" {
            return Ok(Generator::Q);
        }
        let body = self.parenthesized()?;
        let args: Vec<&str> = body.split(',').map(str::trim).collect();
        let int = |s: &str| -> Result<i64> { s.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'"))) };
        match name {
            "eta" => Ok(Generator::Eta(body.parse()?)),
            "theta" => match args.as_slice() {
                [a, b, c] => Ok(Generator::Theta(ThetaForm::new(int(a)?, int(b)?, int(c)?)?)),
                _ => Err(self.err("theta takes a,b,c")),
            },
            "E" => {
                let (k, chi, psi, scale) = match args.as_slice() {
                    [k, chi, psi] => (k, chi, psi, 1),
                    [k, chi, psi, t] => (k, chi, psi, int(t)?),
                    _ => return Err(self.err("E takes k,chi,psi[,t]")),
                };
                let k = u32::try_from(int(k)?).map_err(|_| self.err("bad weight"))?;
                let scale = u64::try_from(scale).map_err(|_| self.err("bad scale"))?;
                Ok(Generator::Eisenstein(EisensteinSpec::new(k, chi.parse()?, psi.parse()?, scale)?))
            }
            "E4" => {
                let scale = if body.trim().is_empty() { 1 } else { int(body.trim())? };
                if scale <= 0 {
                    return Err(self.err("bad E4 scale"));
                }
                Ok(Generator::E4 { scale: scale as u64 })
            }
            other => Err(self.err(&format!("unknown generator '{other}'"))),
        }
    }

    fn term(&mut self) -> Result<ProductTerm> {
        let mut coefficient = BigRational::one();
        let mut factors = Vec::new();
        let mut divide = false;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let v = rat_int(self.integer()?);
                    if divide {
                        if v.is_zero() {
                            return Err(self.err("division by zero"));
                        }
                        coefficient /= v;
                    } else {
                        coefficient *= v;
                    }
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let g = self.generator()?;
                    let e = if self.eat('^') { self.signed_small()? } else { 1 };
                    factors.push((g, if divide { -e } else { e }));
                }
                _ => return Err(self.err("expected factor")),
            }
            if self.eat('*') {
                divide = false;
            } else if self.eat('/') {
                divide = true;
            } else {
                break;
            }
        }
        Ok(ProductTerm::new(coefficient, factors))
    }

    fn expr(&mut self) -> Result<FormExpr> {
        let mut terms = Vec::new();
        let mut negative = self.eat('-');
        if !negative {
            self.eat('+');
        }
        loop {
            let mut t = self.term()?;
            if negative {
                t.coefficient = -t.coefficient;
            }
            terms.push(t);
            if self.eat('+') {
                negative = false;
            } else if self.eat('-') {
                negative = true;
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(FormExpr { terms })
    }
}

impl FromStr for FormExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Parser { src: s, pos: 0 }.expr()
    }
}
