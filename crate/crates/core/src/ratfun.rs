//! Rational functions over a parameter indeterminate set.
//!
//! The denominator is kept as a monomial times a product of primitive,
//! non-monomial factors with positive leading coefficients; every rational
//! constant lives in the numerator. Common factors are cancelled only when
//! they are recognized structurally (monomial content, or an exact division by
//! a stored factor). Equality is decided by cross-multiplication, so values
//! that are equal but differently represented still compare equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{Coefficient, Monomial, QPoly, VarSet};
use crate::scalar::{fmt_rational, Rational};

#[derive(Clone)]
pub struct RationalFunction {
    num: QPoly,
    den_mono: Monomial,
    den_factors: Vec<(QPoly, u32)>,
}

/// Total order on polynomials over one set: descending term lists compared lexicographically.
pub(crate) fn poly_cmp(a: &QPoly, b: &QPoly) -> Ordering {
    let mut ia = a.terms().rev();
    let mut ib = b.terms().rev();
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some((ma, ca)), Some((mb, cb))) => {
                let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
                if o != Ordering::Equal {
                    return o;
                }
            }
        }
    }
}

struct Builder {
    num: QPoly,
    mono: Monomial,
    factors: Vec<(QPoly, u32)>,
}

impl Builder {
    fn new(num: QPoly) -> Self {
        let mono = Monomial::one(num.vars());
        Self {
            num,
            mono,
            factors: Vec::new(),
        }
    }

    /// Multiplies the denominator by `f^e`.
    fn push(&mut self, f: QPoly, e: u32) -> Result<()> {
        if e == 0 {
            return Ok(());
        }
        if f.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (prim, c) = f.split_content();
        let ce = num_traits::pow(c, e as usize);
        self.num = self.num.scale(&ce.recip());
        let m = prim.monomial_content();
        self.mono = self.mono.mul(&m.pow(e));
        let rest = prim.div_monomial(&m);
        if rest.is_constant() {
            return Ok(());
        }
        match self.factors.iter_mut().find(|(g, _)| *g == rest) {
            Some((_, k)) => *k += e,
            None => self.factors.push((rest, e)),
        }
        Ok(())
    }

    fn finish(self) -> RationalFunction {
        let Builder {
            mut num,
            mut mono,
            mut factors,
        } = self;
        let vars = num.vars().clone();
        if num.is_zero() {
            return RationalFunction::zero_over(vars);
        }
        let g = num.monomial_content().gcd(&mono, &vars);
        if !g.is_one() {
            num = num.div_monomial(&g);
            mono = mono.div(&g).expect("gcd divides");
        }
        for (f, e) in factors.iter_mut() {
            while *e > 0 {
                match num.div_exact(f) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by(|a, b| poly_cmp(&a.0, &b.0));
        RationalFunction {
            num,
            den_mono: mono,
            den_factors: factors,
        }
    }
}

impl RationalFunction {
    pub fn zero_over(params: Arc<VarSet>) -> Self {
        let den_mono = Monomial::one(&params);
        Self {
            num: QPoly::zero_q(params),
            den_mono,
            den_factors: Vec::new(),
        }
    }

    pub fn from_poly(p: QPoly) -> Self {
        let den_mono = Monomial::one(p.vars());
        Self {
            num: p,
            den_mono,
            den_factors: Vec::new(),
        }
    }

    pub fn from_rational_over(r: Rational, params: Arc<VarSet>) -> Self {
        Self::from_poly(QPoly::constant_q(r, params))
    }

    pub fn param(name: &str, params: Arc<VarSet>) -> Result<Self> {
        Ok(Self::from_poly(QPoly::var_named(name, params, ())?))
    }

    /// `num / den`; fails when `den` is zero.
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if num.vars() != den.vars() {
            return Err(Error::VarSetMismatch {
                left: num.vars().names().join(","),
                right: den.vars().names().join(","),
            });
        }
        let mut b = Builder::new(num);
        b.push(den, 1)?;
        Ok(b.finish())
    }

    pub fn params(&self) -> &Arc<VarSet> {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den_mono.is_one() && self.den_factors.is_empty()
    }

    /// The numerator as stored (rational coefficients).
    pub fn numerator(&self) -> &QPoly {
        &self.num
    }

    /// The polynomial value when the denominator is one.
    pub fn as_poly(&self) -> Option<&QPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    /// Expanded denominator (primitive, positive leading coefficient).
    pub fn denominator(&self) -> QPoly {
        let vars = self.params().clone();
        let mut d = QPoly::monomial(self.den_mono.clone(), Rational::one(), vars, ());
        for (f, e) in &self.den_factors {
            d = &d * &f.pow(*e);
        }
        d
    }

    /// Irreducible-looking pieces of the denominator: one entry per variable
    /// of the monomial part and one per stored factor, with multiplicity.
    pub fn denominator_factors(&self) -> Vec<(QPoly, u32)> {
        let vars = self.params().clone();
        let mut out = Vec::new();
        for (i, &e) in self.den_mono.exps().iter().enumerate() {
            if e > 0 {
                out.push((QPoly::var_q(i, vars.clone()), e));
            }
        }
        out.extend(self.den_factors.iter().cloned());
        out
    }

    /// Integer-coefficient numerator and denominator with no common integer
    /// content and a positive leading denominator coefficient.
    pub fn num_den(&self) -> (QPoly, QPoly) {
        let (prim, c) = self.num.split_content();
        if c.is_zero() {
            return (self.num.clone(), QPoly::one_q(self.params().clone()));
        }
        let n = Rational::from_integer(c.numer().clone());
        let d = Rational::from_integer(c.denom().clone());
        (prim.scale(&n), self.denominator().scale(&d))
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_polynomial() && self.num.is_constant() {
            return self.num.constant_term().cloned();
        }
        None
    }

    fn lcm_parts(&self, other: &Self) -> (Monomial, Vec<(QPoly, u32)>) {
        let vars = self.params();
        let mono = self.den_mono.lcm(&other.den_mono, vars);
        let mut factors = self.den_factors.clone();
        for (f, e) in &other.den_factors {
            match factors.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k = (*k).max(*e),
                None => factors.push((f.clone(), *e)),
            }
        }
        (mono, factors)
    }

    /// Numerator rescaled to the common denominator `(mono, factors)`.
    fn lift(&self, mono: &Monomial, factors: &[(QPoly, u32)]) -> QPoly {
        let mut n = self
            .num
            .mul_monomial(&mono.div(&self.den_mono).expect("lcm"));
        for (f, e) in factors {
            let own = self
                .den_factors
                .iter()
                .find(|(g, _)| g == f)
                .map_or(0, |(_, k)| *k);
            if *e > own {
                n = &n * &f.pow(e - own);
            }
        }
        n
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        let (mono, factors) = self.lcm_parts(other);
        let a = self.lift(&mono, &factors);
        let b = other.lift(&mono, &factors);
        let num = if negate { &a - &b } else { &a + &b };
        Builder { num, mono, factors }.finish()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero_over(self.params().clone());
        }
        let num = &self.num * &other.num;
        let mono = self.den_mono.mul(&other.den_mono);
        let mut factors = self.den_factors.clone();
        for (f, e) in &other.den_factors {
            match factors.iter_mut().find(|(g, _)| g == f) {
                Some((_, k)) => *k += e,
                None => factors.push((f.clone(), *e)),
            }
        }
        Builder { num, mono, factors }.finish()
    }

    pub fn neg(&self) -> Self {
        Self {
            num: -&self.num,
            ..self.clone()
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero_over(self.params().clone());
        }
        Self {
            num: self.num.scale(r),
            ..self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut b = Builder::new(self.denominator());
        b.push(self.num.clone(), 1)?;
        Ok(b.finish())
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// `self / (c * f_1 * ... * f_k)`, keeping the factors separate in the denominator.
    pub fn div_by_factors(&self, c: &Rational, factors: &[QPoly]) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut b = Builder {
            num: self.num.scale(&c.recip()),
            mono: self.den_mono.clone(),
            factors: self.den_factors.clone(),
        };
        for f in factors {
            b.push(f.clone(), 1)?;
        }
        Ok(b.finish())
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::from_rational_over(Rational::one(), self.params().clone());
        for _ in 0..k {
            out = RationalFunction::mul(&out, self);
        }
        out
    }

    /// Substitutes rational values for some parameters. Fails when the
    /// denominator vanishes identically under the assignment.
    pub fn partial_eval(&self, assign: &[(usize, Rational)]) -> Result<Self> {
        let vars = self.params().clone();
        let mut b = Builder::new(self.num.partial_eval(assign));
        let mono = QPoly::monomial(self.den_mono.clone(), Rational::one(), vars, ());
        b.push(mono.partial_eval(assign), 1)?;
        for (f, e) in &self.den_factors {
            b.push(f.partial_eval(assign), *e)?;
        }
        Ok(b.finish())
    }

    /// Sets the listed parameters to zero.
    pub fn substitute_zero(&self, idx: &[usize]) -> Result<Self> {
        if idx.is_empty() {
            return Ok(self.clone());
        }
        let assign: Vec<(usize, Rational)> = idx.iter().map(|&i| (i, Rational::zero())).collect();
        self.partial_eval(&assign)
    }

    /// Whether any listed parameter occurs in numerator or denominator.
    pub fn involves(&self, idx: &[usize]) -> bool {
        self.num.involves(idx)
            || idx.iter().any(|&i| self.den_mono.exp(i) > 0)
            || self.den_factors.iter().any(|(f, _)| f.involves(idx))
    }

    /// Whether any listed parameter occurs in the denominator.
    pub fn denominator_involves(&self, idx: &[usize]) -> bool {
        idx.iter().any(|&i| self.den_mono.exp(i) > 0)
            || self.den_factors.iter().any(|(f, _)| f.involves(idx))
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let d = self.denominator().eval(point);
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Human-readable form with the numerator's rational content split between
    /// numerator and denominator, e.g. `-b1/(8*a1)`.
    pub fn render(&self) -> String {
        if self.is_polynomial() {
            return self.num.to_string();
        }
        let (prim, c) = self.num.split_content();
        let n = Rational::from_integer(c.numer().clone());
        let d = c.denom().clone();
        let numer = if prim.len() == 1 {
            prim.scale(&n).to_string()
        } else if n.is_one() {
            format!("({prim})")
        } else if n == -Rational::one() {
            format!("-({prim})")
        } else {
            format!("{}*({prim})", fmt_rational(&n))
        };
        let mut items = Vec::new();
        if !d.is_one() {
            items.push(d.to_string());
        }
        if !self.den_mono.is_one() {
            items.push(self.den_mono.render(self.params()));
        }
        for (f, e) in &self.den_factors {
            if *e == 1 {
                items.push(format!("({f})"));
            } else {
                items.push(format!("({f})^{e}"));
            }
        }
        let den = items.join("*");
        let single =
            items.len() == 1 && (items[0].starts_with('(') || !items[0].contains(['*', '^']));
        if single {
            format!("{numer}/{den}")
        } else {
            format!("{numer}/({den})")
        }
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.params() != other.params() {
            return false;
        }
        if self.den_mono == other.den_mono && self.den_factors == other.den_factors {
            return self.num == other.num;
        }
        let (mono, factors) = self.lcm_parts(other);
        self.lift(&mono, &factors) == other.lift(&mono, &factors)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({})", self.render())
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Coefficient for RationalFunction {
    type Ctx = Arc<VarSet>;

    fn zero_value(ctx: &Arc<VarSet>) -> Self {
        Self::zero_over(ctx.clone())
    }
    fn from_rational_value(r: Rational, ctx: &Arc<VarSet>) -> Self {
        Self::from_rational_over(r, ctx.clone())
    }
    fn is_zero_value(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add_value(&self, other: &Self) -> Self {
        RationalFunction::add(self, other)
    }
    fn sub_value(&self, other: &Self) -> Self {
        RationalFunction::sub(self, other)
    }
    fn mul_value(&self, other: &Self) -> Self {
        RationalFunction::mul(self, other)
    }
    fn neg_value(&self) -> Self {
        RationalFunction::neg(self)
    }
    fn scale_value(&self, r: &Rational) -> Self {
        RationalFunction::scale(self, r)
    }
    fn rational_value(&self) -> Option<Rational> {
        RationalFunction::as_rational(self)
    }
    fn render_parts(&self) -> (bool, String, bool) {
        if self.is_polynomial() && self.num.len() == 1 {
            let (m, c) = self.num.leading().expect("nonzero");
            let single = QPoly::monomial(m.clone(), c.abs(), self.params().clone(), ());
            return (c.is_negative(), single.to_string(), false);
        }
        if self.num.len() == 1 {
            let neg = self.num.leading().expect("nonzero").1.is_negative();
            let body = if neg {
                self.neg().render()
            } else {
                self.render()
            };
            return (neg, body, true);
        }
        (false, self.render(), true)
    }
}

macro_rules! rf_binop {
    ($tr:ident, $method:ident, $imp:expr) => {
        impl $tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                $imp(self, rhs)
            }
        }
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                $imp(&self, &rhs)
            }
        }
    };
}

rf_binop!(Add, add, RationalFunction::add);
rf_binop!(Sub, sub, RationalFunction::sub);
rf_binop!(Mul, mul, RationalFunction::mul);
rf_binop!(Div, div, |a: &RationalFunction, b: &RationalFunction| a
    .checked_div(b)
    .expect("division by a nonzero rational function"));

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(self)
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(&self)
    }
}
