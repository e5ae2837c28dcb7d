//! Expression parser for polynomial and rational-function text.
//!
//! Grammar: integers, names, `+ - * / ^`, parentheses. Exponents are
//! non-negative integer literals; `/` is only allowed by divisors that are
//! constant in the main indeterminates. Juxtaposition is rejected.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::{Coefficient, Poly, QPoly, VarSet};
use crate::ratfun::RationalFunction;
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Name { name: String, column: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, u32),
}

fn perr(column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        column,
        message: message.into(),
    }
}

fn lex(s: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((Tok::Int(text.parse().expect("digits")), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), col));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), col));
            i += 1;
        } else {
            return Err(perr(col, format!("unexpected character `{c}`")));
        }
    }
    for w in out.windows(2) {
        let left_operand = matches!(w[0].0, Tok::Int(_) | Tok::Name(_) | Tok::Op(')'));
        let right_operand = matches!(w[1].0, Tok::Int(_) | Tok::Name(_) | Tok::Op('('));
        if left_operand && right_operand {
            return Err(perr(
                w[1].1,
                "implicit multiplication is not allowed; use `*`",
            ));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Op('/')) {
                let col = self.col();
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), col);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let col = self.col();
            match self.toks.get(self.pos) {
                Some((Tok::Int(n), _)) => {
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| perr(col, "exponent out of range"))?;
                    self.pos += 1;
                    if self.peek() == Some(&Tok::Op('^')) {
                        return Err(perr(self.col(), "chained exponents need parentheses"));
                    }
                    Ok(Expr::Pow(Box::new(base), e))
                }
                _ => Err(perr(col, "expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Int(n), _)) => {
                self.pos += 1;
                Ok(Expr::Int(n))
            }
            Some((Tok::Name(name), _)) => {
                self.pos += 1;
                Ok(Expr::Name { name, column: col })
            }
            Some((Tok::Op('('), _)) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(perr(self.col(), "expected `)`"));
                }
                Ok(e)
            }
            Some((Tok::Op(c), _)) => Err(perr(col, format!("unexpected `{c}`"))),
            None => Err(perr(col, "unexpected end of expression")),
        }
    }
}

/// Parses expression text into a syntax tree.
pub fn parse_expr(s: &str) -> Result<Expr> {
    let toks = lex(s)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_col: s.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(perr(p.col(), "unexpected trailing input"));
    }
    Ok(e)
}

/// Polynomials in `main` with rational-function coefficients over `params`.
pub type MixedPoly = Poly<RationalFunction>;

/// Evaluates `e` with names resolved first in `main`, then in `params`.
pub fn eval_mixed(e: &Expr, main: &Arc<VarSet>, params: &Arc<VarSet>) -> Result<MixedPoly> {
    let ctx = params.clone();
    Ok(match e {
        Expr::Int(n) => MixedPoly::constant(
            RationalFunction::from_rational_over(Rational::from_integer(n.clone()), ctx.clone()),
            main.clone(),
            ctx,
        ),
        Expr::Name { name, column } => {
            if let Some(i) = main.index_of(name) {
                MixedPoly::var(i, main.clone(), ctx)
            } else if params.index_of(name).is_some() {
                let rf = RationalFunction::param(name, params.clone())?;
                MixedPoly::constant(rf, main.clone(), ctx)
            } else {
                return Err(perr(*column, format!("unknown name `{name}`")));
            }
        }
        Expr::Neg(a) => -eval_mixed(a, main, params)?,
        Expr::Add(a, b) => eval_mixed(a, main, params)? + eval_mixed(b, main, params)?,
        Expr::Sub(a, b) => eval_mixed(a, main, params)? - eval_mixed(b, main, params)?,
        Expr::Mul(a, b) => eval_mixed(a, main, params)? * eval_mixed(b, main, params)?,
        Expr::Pow(a, k) => eval_mixed(a, main, params)?.pow(*k),
        Expr::Div(a, b, col) => {
            let num = eval_mixed(a, main, params)?;
            let den = eval_mixed(b, main, params)?;
            if !den.is_constant() {
                return Err(perr(*col, "division by a non-constant expression"));
            }
            let d = den
                .constant_term()
                .cloned()
                .ok_or_else(|| perr(*col, "division by zero"))?;
            let inv = d.inv().map_err(|_| perr(*col, "division by zero"))?;
            num.mul_coeff(&inv)
        }
    })
}

/// Parses a polynomial with rational coefficients over `vars`.
pub fn parse_poly(s: &str, vars: &Arc<VarSet>) -> Result<QPoly> {
    let e = parse_expr(s)?;
    let mixed = eval_mixed(&e, vars, &VarSet::empty())?;
    Ok(mixed.map_coeffs((), |c| c.rational_value().expect("no parameters")))
}

/// Parses a rational function of the parameters.
pub fn parse_ratfun(s: &str, params: &Arc<VarSet>) -> Result<RationalFunction> {
    let e = parse_expr(s)?;
    let mixed = eval_mixed(&e, &VarSet::empty(), params)?;
    Ok(mixed
        .constant_term()
        .cloned()
        .unwrap_or_else(|| RationalFunction::zero_over(params.clone())))
}

/// Parses a polynomial in `main` whose coefficients are rational functions of `params`.
pub fn parse_mixed(s: &str, main: &Arc<VarSet>, params: &Arc<VarSet>) -> Result<MixedPoly> {
    eval_mixed(&parse_expr(s)?, main, params)
}
