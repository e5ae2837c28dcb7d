//! Sparse multivariate polynomials over a declared, weighted indeterminate set.
//!
//! Monomials are ordered by weighted degree first and then lexicographically
//! with the first declared indeterminate most significant. With unit weights
//! this is the usual graded lexicographic order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{denominator_lcm, fmt_rational, numerator_gcd, Rational};

/// An ordered list of indeterminate names with positive integer weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
    weights: Vec<u32>,
}

impl VarSet {
    /// Unit-weight indeterminates.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let weights = vec![1; names.len()];
        Arc::new(Self { names, weights })
    }

    /// Indeterminates with explicit weights. Panics on a zero weight or a length mismatch.
    pub fn weighted<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        weights: impl IntoIterator<Item = u32>,
    ) -> Arc<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let weights: Vec<u32> = weights.into_iter().collect();
        assert_eq!(names.len(), weights.len(), "one weight per indeterminate");
        assert!(weights.iter().all(|&w| w > 0), "weights must be positive");
        Arc::new(Self { names, weights })
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(Self {
            names: Vec::new(),
            weights: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weights[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownIndeterminate(name.to_string()))
    }

    /// Weighted degree of an exponent vector.
    pub fn degree_of(&self, exps: &[u32]) -> u32 {
        exps.iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }

    fn describe(&self) -> String {
        self.names.join(",")
    }
}

fn same_vars(a: &Arc<VarSet>, b: &Arc<VarSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_vars(a: &Arc<VarSet>, b: &Arc<VarSet>) -> Result<()> {
    if same_vars(a, b) {
        Ok(())
    } else {
        Err(Error::VarSetMismatch {
            left: a.describe(),
            right: b.describe(),
        })
    }
}

/// A power product, stored densely over its indeterminate set together with
/// its cached weighted degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    deg: u32,
    exps: Box<[u32]>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deg
            .cmp(&other.deg)
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one(vars: &VarSet) -> Self {
        Self {
            deg: 0,
            exps: vec![0; vars.len()].into_boxed_slice(),
        }
    }

    pub fn new(exps: Vec<u32>, vars: &VarSet) -> Self {
        assert_eq!(exps.len(), vars.len(), "exponent vector length");
        let deg = vars.degree_of(&exps);
        Self {
            deg,
            exps: exps.into_boxed_slice(),
        }
    }

    pub fn var(i: usize, vars: &VarSet) -> Self {
        let mut exps = vec![0; vars.len()];
        exps[i] = 1;
        Self::new(exps, vars)
    }

    /// Builds a monomial from `(name, exponent)` pairs.
    pub fn from_pairs<'a>(
        pairs: impl IntoIterator<Item = (&'a str, u32)>,
        vars: &VarSet,
    ) -> Result<Self> {
        let mut exps = vec![0; vars.len()];
        for (name, e) in pairs {
            exps[vars.index(name)?] += e;
        }
        Ok(Self::new(exps, vars))
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    /// Weighted degree.
    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Self) -> Self {
        let exps: Box<[u32]> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a + b)
            .collect();
        Self {
            deg: self.deg + other.deg,
            exps,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self {
            deg: self.deg * k,
            exps: self.exps.iter().map(|e| e * k).collect(),
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        let exps = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| a - b)
            .collect();
        Some(Self {
            deg: self.deg - other.deg,
            exps,
        })
    }

    pub fn gcd(&self, other: &Self, vars: &VarSet) -> Self {
        let exps: Vec<u32> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| *a.min(b))
            .collect();
        Self::new(exps, vars)
    }

    pub fn lcm(&self, other: &Self, vars: &VarSet) -> Self {
        let exps: Vec<u32> = self
            .exps
            .iter()
            .zip(other.exps.iter())
            .map(|(a, b)| *a.max(b))
            .collect();
        Self::new(exps, vars)
    }

    /// `x_i`-exponent lowered by one, when positive.
    pub fn lower(&self, i: usize, vars: &VarSet) -> Option<Self> {
        if self.exps[i] == 0 {
            return None;
        }
        let mut exps = self.exps.to_vec();
        exps[i] -= 1;
        Some(Self {
            deg: self.deg - vars.weight(i),
            exps: exps.into_boxed_slice(),
        })
    }

    pub fn render(&self, vars: &VarSet) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(vars.name(i).to_string()),
                _ => parts.push(format!("{}^{}", vars.name(i), e)),
            }
        }
        parts.join("*")
    }
}

/// All monomials over `vars` with weighted degree exactly `w`, ascending.
pub fn monomials_of_degree(vars: &VarSet, w: u32) -> Vec<Monomial> {
    fn rec(vars: &VarSet, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == vars.len() {
            if left == 0 {
                out.push(Monomial::new(cur.clone(), vars));
            }
            return;
        }
        let wi = vars.weight(i);
        let mut e = 0;
        while e * wi <= left {
            cur[i] = e;
            rec(vars, i + 1, left - e * wi, cur, out);
            e += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(vars, 0, w, &mut vec![0; vars.len()], &mut out);
    out.sort();
    out
}

/// Coefficient domains a [`Poly`] can be built over.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync {
    /// Data needed to manufacture constants (e.g. the parameter set).
    type Ctx: Clone + fmt::Debug + Send + Sync;

    fn zero_value(ctx: &Self::Ctx) -> Self;
    fn from_rational_value(r: Rational, ctx: &Self::Ctx) -> Self;
    fn is_zero_value(&self) -> bool;
    fn add_value(&self, other: &Self) -> Self;
    fn sub_value(&self, other: &Self) -> Self;
    fn mul_value(&self, other: &Self) -> Self;
    fn neg_value(&self) -> Self;
    fn scale_value(&self, r: &Rational) -> Self;

    /// The value as a rational number when it is one.
    fn rational_value(&self) -> Option<Rational>;

    /// Pieces for printing a term: `(negative, magnitude, needs_parens)`.
    fn render_parts(&self) -> (bool, String, bool);
}

impl Coefficient for Rational {
    type Ctx = ();

    fn zero_value(_: &()) -> Self {
        Rational::zero()
    }
    fn from_rational_value(r: Rational, _: &()) -> Self {
        r
    }
    fn is_zero_value(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_value(&self, other: &Self) -> Self {
        self + other
    }
    fn sub_value(&self, other: &Self) -> Self {
        self - other
    }
    fn mul_value(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_value(&self) -> Self {
        -self
    }
    fn scale_value(&self, r: &Rational) -> Self {
        self * r
    }
    fn rational_value(&self) -> Option<Rational> {
        Some(self.clone())
    }
    fn render_parts(&self) -> (bool, String, bool) {
        (self.is_negative(), fmt_rational(&self.abs()), false)
    }
}

/// A polynomial with coefficients in `C` over a named indeterminate set.
#[derive(Clone)]
pub struct Poly<C: Coefficient> {
    vars: Arc<VarSet>,
    ctx: C::Ctx,
    terms: BTreeMap<Monomial, C>,
}

/// Polynomials with rational coefficients.
pub type QPoly = Poly<Rational>;

impl<C: Coefficient> PartialEq for Poly<C> {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl<C: Coefficient> fmt::Debug for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl<C: Coefficient> Poly<C> {
    pub fn zero(vars: Arc<VarSet>, ctx: C::Ctx) -> Self {
        Self {
            vars,
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C, vars: Arc<VarSet>, ctx: C::Ctx) -> Self {
        let one = Monomial::one(&vars);
        Self::monomial(one, c, vars, ctx)
    }

    pub fn one(vars: Arc<VarSet>, ctx: C::Ctx) -> Self {
        let c = C::from_rational_value(Rational::one(), &ctx);
        Self::constant(c, vars, ctx)
    }

    pub fn monomial(m: Monomial, c: C, vars: Arc<VarSet>, ctx: C::Ctx) -> Self {
        let mut p = Self::zero(vars, ctx);
        p.add_term(m, c);
        p
    }

    /// The indeterminate with index `i`.
    pub fn var(i: usize, vars: Arc<VarSet>, ctx: C::Ctx) -> Self {
        let m = Monomial::var(i, &vars);
        let c = C::from_rational_value(Rational::one(), &ctx);
        Self::monomial(m, c, vars, ctx)
    }

    pub fn var_named(name: &str, vars: Arc<VarSet>, ctx: C::Ctx) -> Result<Self> {
        let i = vars.index(name)?;
        Ok(Self::var(i, vars, ctx))
    }

    pub fn from_terms(
        vars: Arc<VarSet>,
        ctx: C::Ctx,
        terms: impl IntoIterator<Item = (Monomial, C)>,
    ) -> Self {
        let mut p = Self::zero(vars, ctx);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + '_ {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl DoubleEndedIterator<Item = &Monomial> + '_ {
        self.terms.keys()
    }

    /// Largest term under the monomial order.
    pub fn leading(&self) -> Option<(&Monomial, &C)> {
        self.terms.last_key_value()
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&C> {
        self.terms.get(m)
    }

    pub fn coeff_or_zero(&self, m: &Monomial) -> C {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| C::zero_value(&self.ctx))
    }

    /// The constant coefficient, if nonzero.
    pub fn constant_term(&self) -> Option<&C> {
        self.terms
            .first_key_value()
            .filter(|(m, _)| m.is_one())
            .map(|(_, c)| c)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero_value() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add_value(&c);
                if s.is_zero_value() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Sets the coefficient of `m`, removing the term when `c` is zero.
    pub fn set_coeff(&mut self, m: Monomial, c: C) {
        if c.is_zero_value() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, c);
        }
    }

    /// Removes and returns the largest term.
    pub fn pop_leading(&mut self) -> Option<(Monomial, C)> {
        self.terms.pop_last()
    }

    pub fn remove_term(&mut self, m: &Monomial) -> Option<C> {
        self.terms.remove(m)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        check_vars(&self.vars, &other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        check_vars(&self.vars, &other.vars)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg_value());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        check_vars(&self.vars, &other.vars)?;
        let mut out = Self::zero(self.vars.clone(), self.ctx.clone());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1.mul_value(c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.vars.clone(), self.ctx.clone());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.vars.clone(), self.ctx.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.scale_value(r)))
            .collect();
        Self {
            vars: self.vars.clone(),
            ctx: self.ctx.clone(),
            terms,
        }
    }

    pub fn mul_coeff(&self, k: &C) -> Self {
        let mut out = Self::zero(self.vars.clone(), self.ctx.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.mul_value(k));
        }
        out
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.mul(mono), c.clone()))
            .collect();
        Self {
            vars: self.vars.clone(),
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Partial derivative with respect to indeterminate `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.vars.clone(), self.ctx.clone());
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if let Some(lowered) = m.lower(i, &self.vars) {
                out.add_term(
                    lowered,
                    c.scale_value(&Rational::from_integer(BigInt::from(e))),
                );
            }
        }
        out
    }

    /// All partial derivatives, in indeterminate order.
    pub fn gradient(&self) -> Vec<Self> {
        (0..self.vars.len()).map(|i| self.derivative(i)).collect()
    }

    /// Largest weighted degree of a term, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn homogeneous_component(&self, w: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == w)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self {
            vars: self.vars.clone(),
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Nonzero homogeneous components keyed by weighted degree.
    pub fn components(&self) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Self::zero(self.vars.clone(), self.ctx.clone()))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Drops every term of weighted degree above `n`.
    pub fn truncate(&self, n: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() <= n)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self {
            vars: self.vars.clone(),
            ctx: self.ctx.clone(),
            terms,
        }
    }

    /// Coefficient-wise map into another domain; zero images are dropped.
    pub fn map_coeffs<D: Coefficient>(&self, ctx: D::Ctx, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.vars.clone(), ctx);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn try_map_coeffs<D: Coefficient>(
        &self,
        ctx: D::Ctx,
        f: impl Fn(&C) -> Result<D>,
    ) -> Result<Poly<D>> {
        let mut out = Poly::zero(self.vars.clone(), ctx);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Substitutes `images[i]` for indeterminate `i`. The result lives over the
    /// images' indeterminate set.
    pub fn substitute(&self, images: &[QPoly]) -> Result<Self> {
        if images.len() != self.vars.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vars.len(),
                found: images.len(),
            });
        }
        let target = match images.first() {
            Some(p) => p.vars.clone(),
            None => {
                return Ok(Self {
                    vars: VarSet::empty(),
                    ..self.clone()
                })
            }
        };
        for p in images {
            check_vars(&target, &p.vars)?;
        }
        let mut powers: Vec<Vec<QPoly>> = images
            .iter()
            .map(|p| vec![QPoly::one(p.vars.clone(), ())])
            .collect();
        let mut out = Self::zero(target, self.ctx.clone());
        for (m, c) in &self.terms {
            let mut prod = QPoly::one(out.vars.clone(), ());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                prod = &prod * &powers[i][e as usize];
            }
            for (xm, r) in prod.terms {
                out.add_term(xm, c.scale_value(&r));
            }
        }
        Ok(out)
    }

    /// Moves the polynomial onto an indeterminate set with the same names,
    /// re-weighting (and so re-ordering) its monomials.
    pub fn with_vars(&self, vars: Arc<VarSet>) -> Result<Self> {
        if self.vars.names() != vars.names() {
            return Err(Error::VarSetMismatch {
                left: self.vars.describe(),
                right: vars.describe(),
            });
        }
        let mut out = Self::zero(vars.clone(), self.ctx.clone());
        for (m, c) in self.terms() {
            out.add_term(Monomial::new(m.exps().to_vec(), &vars), c.clone());
        }
        Ok(out)
    }
}

impl<C: Coefficient> fmt::Display for Poly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, body, parens) = c.render_parts();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                if parens {
                    write!(f, "({body})")?;
                } else {
                    write!(f, "{body}")?;
                }
            } else {
                let mono = m.render(&self.vars);
                if body == "1" && !parens {
                    write!(f, "{mono}")?;
                } else if parens {
                    write!(f, "({body})*{mono}")?;
                } else {
                    write!(f, "{body}*{mono}")?;
                }
            }
        }
        Ok(())
    }
}

impl QPoly {
    pub fn zero_q(vars: Arc<VarSet>) -> Self {
        Self::zero(vars, ())
    }

    pub fn one_q(vars: Arc<VarSet>) -> Self {
        Self::one(vars, ())
    }

    pub fn constant_q(r: Rational, vars: Arc<VarSet>) -> Self {
        Self::constant(r, vars, ())
    }

    pub fn var_q(i: usize, vars: Arc<VarSet>) -> Self {
        Self::var(i, vars, ())
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Substitutes rational values for some indeterminates; the result stays
    /// over the same indeterminate set.
    pub fn partial_eval(&self, assign: &[(usize, Rational)]) -> Self {
        let mut out = Self::zero(self.vars.clone(), ());
        for (m, c) in &self.terms {
            let mut exps = m.exps().to_vec();
            let mut k = c.clone();
            for (i, v) in assign {
                let e = exps[*i];
                if e > 0 {
                    k *= num_traits::pow(v.clone(), e as usize);
                    exps[*i] = 0;
                }
            }
            out.add_term(Monomial::new(exps, &self.vars), k);
        }
        out
    }

    /// Sets the listed indeterminates to zero.
    pub fn substitute_zero(&self, idx: &[usize]) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| idx.iter().all(|&i| m.exp(i) == 0))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Self {
            vars: self.vars.clone(),
            ctx: (),
            terms,
        }
    }

    /// Whether any listed indeterminate occurs.
    pub fn involves(&self, idx: &[usize]) -> bool {
        self.terms.keys().any(|m| idx.iter().any(|&i| m.exp(i) > 0))
    }

    /// Rational content, signed so that the primitive part has a positive
    /// leading coefficient. Zero for the zero polynomial.
    pub fn content(&self) -> Rational {
        let Some((_, lead)) = self.leading() else {
            return Rational::zero();
        };
        let den = denominator_lcm(self.terms.values());
        let scaled: Vec<Rational> = self
            .terms
            .values()
            .map(|c| c * Rational::from_integer(den.clone()))
            .collect();
        let g = numerator_gcd(&scaled);
        let mut content = Rational::new(g, den);
        if lead.is_negative() {
            content = -content;
        }
        content
    }

    /// `self / content()`: integer coefficients, gcd one, positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() {
            return self.clone();
        }
        self.scale(&c.recip())
    }

    /// Gcd of all monomials (one for the zero polynomial).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(&self.vars),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m, &self.vars)),
        }
    }

    /// Divides every monomial by `m`. Panics unless `m` divides each term.
    pub fn div_monomial(&self, m: &Monomial) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| (t.div(m).expect("monomial divides every term"), c.clone()))
            .collect();
        Self {
            vars: self.vars.clone(),
            ctx: (),
            terms,
        }
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (dm, dc) = d.leading()?;
        if !same_vars(&self.vars, &d.vars) {
            return None;
        }
        let dc_inv = dc.recip();
        let mut rem = self.clone();
        let mut quot = Self::zero(self.vars.clone(), ());
        while let Some((rm, rc)) = rem.leading() {
            let qm = rm.div(dm)?;
            if rm.degree() < dm.degree() {
                return None;
            }
            let qc = rc * &dc_inv;
            for (m, c) in &d.terms {
                rem.add_term(m.mul(&qm), -(c * &qc));
            }
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Integer-coefficient form: `(primitive part, content)`.
    pub fn split_content(&self) -> (Self, Rational) {
        let c = self.content();
        if c.is_zero() {
            return (self.clone(), c);
        }
        (self.scale(&c.recip()), c)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<C: Coefficient> $tr<&Poly<C>> for &Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: &Poly<C>) -> Poly<C> {
                self.$checked(rhs)
                    .expect("polynomial operands share an indeterminate set")
            }
        }
        impl<C: Coefficient> $tr<Poly<C>> for Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: Poly<C>) -> Poly<C> {
                (&self).$method(&rhs)
            }
        }
        impl<C: Coefficient> $tr<&Poly<C>> for Poly<C> {
            type Output = Poly<C>;
            fn $method(self, rhs: &Poly<C>) -> Poly<C> {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<C: Coefficient> Neg for &Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.neg_value()))
            .collect();
        Poly {
            vars: self.vars.clone(),
            ctx: self.ctx.clone(),
            terms,
        }
    }
}

impl<C: Coefficient> Neg for Poly<C> {
    type Output = Poly<C>;
    fn neg(self) -> Poly<C> {
        -&self
    }
}
