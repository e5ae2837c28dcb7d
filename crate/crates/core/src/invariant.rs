//! Invariant rings given by a minimal integrity basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::solve_rational;
use crate::orbit::OrbitPoly;
use crate::poly::{monomials_of_degree, Coefficient, Monomial, Poly, QPoly, VarSet};
use crate::ratfun::RationalFunction;
use crate::scalar::Rational;

/// An oriented rewrite rule `lhs -> rhs` among basic invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct SyzygyRule {
    pub lhs: Monomial,
    pub rhs: QPoly,
}

impl SyzygyRule {
    pub fn new(lhs: Monomial, rhs: QPoly) -> Self {
        Self { lhs, rhs }
    }

    pub fn render(&self) -> String {
        format!("{} -> {}", self.lhs.render(self.rhs.vars()), self.rhs)
    }
}

/// Outcome of [`InvariantBasis::check_invariance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvarianceCheck {
    pub ok: bool,
    /// `(generator index, invariant index)` of the first failure.
    pub counterexample: Option<(usize, usize)>,
}

/// A minimal integrity basis: homogeneous invariants `J_a(x)` with
/// non-decreasing degrees, optional syzygy rules and optional group generators.
#[derive(Debug, Clone)]
pub struct InvariantBasis {
    x_vars: Arc<VarSet>,
    j_vars: Arc<VarSet>,
    invariants: Vec<QPoly>,
    syzygies: Vec<SyzygyRule>,
    generators: Option<Vec<Vec<Vec<Rational>>>>,
    expansions: Arc<Mutex<HashMap<Monomial, QPoly>>>,
}

impl InvariantBasis {
    /// Validates and assembles a basis. Syzygy rules are checked for
    /// soundness (vanishing in x), homogeneity and orientation, in that order.
    pub fn new(
        x_vars: Arc<VarSet>,
        names: Vec<String>,
        invariants: Vec<QPoly>,
        syzygies: Vec<(QPoly, QPoly)>,
        generators: Option<Vec<Vec<Vec<Rational>>>>,
    ) -> Result<Self> {
        if names.len() != invariants.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                found: invariants.len(),
            });
        }
        let mut degrees = Vec::with_capacity(invariants.len());
        for (name, j) in names.iter().zip(&invariants) {
            if j.vars() != &x_vars {
                return Err(Error::VarSetMismatch {
                    left: x_vars.names().join(","),
                    right: j.vars().names().join(","),
                });
            }
            match j.degree() {
                Some(d) if d > 0 && j.is_homogeneous() => degrees.push(d),
                _ => return Err(Error::InhomogeneousInvariant { name: name.clone() }),
            }
        }
        if degrees.windows(2).any(|w| w[0] > w[1]) {
            let shown: Vec<String> = degrees.iter().map(u32::to_string).collect();
            return Err(Error::UnsortedDegrees(shown.join(", ")));
        }
        if let Some(gens) = &generators {
            let n = x_vars.len();
            for g in gens {
                if g.len() != n || g.iter().any(|row| row.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: g.len(),
                    });
                }
            }
        }
        let j_vars = VarSet::weighted(names, degrees);
        let mut basis = Self {
            x_vars,
            j_vars: j_vars.clone(),
            invariants,
            syzygies: Vec::new(),
            generators,
            expansions: Arc::new(Mutex::new(HashMap::new())),
        };
        let mut rules = Vec::new();
        for (lhs, rhs) in syzygies {
            let lhs = lhs.with_vars(j_vars.clone())?;
            let rhs = rhs.with_vars(j_vars.clone())?;
            rules.push(basis.validate_rule(lhs, rhs)?);
        }
        basis.syzygies = rules;
        Ok(basis)
    }

    fn validate_rule(&self, lhs: QPoly, rhs: QPoly) -> Result<SyzygyRule> {
        let text = format!("{lhs} -> {rhs}");
        let diff = &lhs - &rhs;
        if !self.expand(&diff)?.is_zero() {
            return Err(Error::UnsoundSyzygy { rule: text });
        }
        let m = match lhs.leading() {
            Some((m, c)) if lhs.len() == 1 && *c == Rational::from_integer(1.into()) => m.clone(),
            _ => return Err(Error::SyzygyLhs(lhs.to_string())),
        };
        if rhs.monomials().any(|r| r.degree() != m.degree()) {
            return Err(Error::InhomogeneousSyzygy { rule: text });
        }
        if rhs.monomials().any(|r| *r >= m) {
            return Err(Error::UnorientedSyzygy { rule: text });
        }
        Ok(SyzygyRule::new(m, rhs))
    }

    pub fn x_vars(&self) -> &Arc<VarSet> {
        &self.x_vars
    }

    pub fn j_vars(&self) -> &Arc<VarSet> {
        &self.j_vars
    }

    pub fn invariants(&self) -> &[QPoly] {
        &self.invariants
    }

    pub fn names(&self) -> &[String] {
        self.j_vars.names()
    }

    pub fn degrees(&self) -> &[u32] {
        self.j_vars.weights()
    }

    pub fn syzygies(&self) -> &[SyzygyRule] {
        &self.syzygies
    }

    pub fn group_generators(&self) -> Option<&[Vec<Vec<Rational>>]> {
        self.generators.as_deref()
    }

    /// Number of basic invariants.
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    /// Dimension of x-space.
    pub fn dim(&self) -> usize {
        self.x_vars.len()
    }

    /// `2 * max degree`.
    pub fn stability_order(&self) -> u32 {
        2 * self.degrees().iter().copied().max().unwrap_or(0)
    }

    /// Expansion of a J-monomial into x, memoized.
    pub fn expand_monomial(&self, m: &Monomial) -> QPoly {
        if let Some(p) = self.expansions.lock().expect("cache lock").get(m) {
            return p.clone();
        }
        let single = QPoly::monomial(
            m.clone(),
            Rational::from_integer(1.into()),
            self.j_vars.clone(),
            (),
        );
        let p = single
            .substitute(&self.invariants)
            .expect("invariants match the J indeterminates");
        self.expansions
            .lock()
            .expect("cache lock")
            .insert(m.clone(), p.clone());
        p
    }

    /// Substitutes `J_a(x)` into a J-polynomial.
    pub fn expand<C: Coefficient>(&self, p: &Poly<C>) -> Result<Poly<C>> {
        if p.vars() != &self.j_vars {
            return Err(Error::VarSetMismatch {
                left: self.j_vars.names().join(","),
                right: p.vars().names().join(","),
            });
        }
        let mut out = Poly::zero(self.x_vars.clone(), p.ctx().clone());
        for (m, c) in p.terms() {
            for (xm, r) in self.expand_monomial(m).terms() {
                out.add_term(xm.clone(), c.scale_value(r));
            }
        }
        Ok(out)
    }

    /// Checks `J_a(g x) = J_a(x)` for every generator `g` and invariant `a`.
    pub fn check_invariance(&self) -> Result<InvarianceCheck> {
        let gens = self
            .generators
            .as_ref()
            .ok_or(Error::MissingGroupGenerators)?;
        let n = self.dim();
        for (gi, g) in gens.iter().enumerate() {
            let images: Vec<QPoly> = (0..n)
                .map(|i| {
                    let terms = (0..n).map(|j| (Monomial::var(j, &self.x_vars), g[i][j].clone()));
                    QPoly::from_terms(self.x_vars.clone(), (), terms)
                })
                .collect();
            for (a, j) in self.invariants.iter().enumerate() {
                if j.substitute(&images)? != *j {
                    return Ok(InvarianceCheck {
                        ok: false,
                        counterexample: Some((gi, a)),
                    });
                }
            }
        }
        Ok(InvarianceCheck {
            ok: true,
            counterexample: None,
        })
    }

    /// Whether no syzygy left side divides `m`.
    pub fn is_normal(&self, m: &Monomial) -> bool {
        self.syzygies.iter().all(|r| !r.lhs.divides(m))
    }

    /// Normal-form J-monomials of weighted degree `w`, ascending.
    pub fn normal_monomials(&self, w: u32) -> Vec<Monomial> {
        monomials_of_degree(&self.j_vars, w)
            .into_iter()
            .filter(|m| self.is_normal(m))
            .collect()
    }

    pub fn normal_form<C: Coefficient>(&self, p: &Poly<C>) -> Poly<C> {
        normal_form(p, &self.syzygies)
    }

    /// Writes an invariant x-polynomial in terms of the basis, degree by degree.
    pub fn express_in_invariants(&self, p: &QPoly) -> Result<QPoly> {
        let mut out = QPoly::zero_q(self.j_vars.clone());
        for (w, comp) in p.components() {
            let candidates = self.normal_monomials(w);
            let expansions: Vec<QPoly> =
                candidates.iter().map(|m| self.expand_monomial(m)).collect();
            let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
            for e in expansions.iter().chain(std::iter::once(&comp)) {
                for m in e.monomials() {
                    let next = rows.len();
                    rows.entry(m.clone()).or_insert(next);
                }
            }
            let mut a = vec![vec![Rational::zero(); candidates.len()]; rows.len()];
            let mut b = vec![Rational::zero(); rows.len()];
            for (k, e) in expansions.iter().enumerate() {
                for (m, c) in e.terms() {
                    a[rows[m]][k] = c.clone();
                }
            }
            for (m, c) in comp.terms() {
                b[rows[m]] = c.clone();
            }
            let x = solve_rational(&a, &b).ok_or(Error::NotExpressible { degree: w })?;
            for (m, c) in candidates.into_iter().zip(x) {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// The matrix of gradient scalar products `<grad J_i, grad J_h>` written in invariants.
    pub fn p_matrix(&self) -> Result<PMatrix> {
        let r = self.rank();
        let grads: Vec<Vec<QPoly>> = self.invariants.iter().map(Poly::gradient).collect();
        let mut entries = vec![vec![QPoly::zero_q(self.j_vars.clone()); r]; r];
        for i in 0..r {
            for h in i..r {
                let dot = grads[i]
                    .iter()
                    .zip(&grads[h])
                    .fold(QPoly::zero_q(self.x_vars.clone()), |acc, (a, b)| {
                        &acc + &(a * b)
                    });
                let e = self.express_in_invariants(&dot)?;
                entries[h][i] = e.clone();
                entries[i][h] = e;
            }
        }
        Ok(PMatrix { entries })
    }

    /// The most general invariant potential up to weighted degree `n`: one
    /// fresh parameter `p{degree}_{index}` per normal-form monomial of
    /// weighted degree in `[d_1, n]`.
    pub fn general_potential(&self, n: u32) -> (OrbitPoly, Vec<String>) {
        let d1 = self.degrees().first().copied().unwrap_or(1);
        let mut monos = Vec::new();
        let mut names = Vec::new();
        for w in d1..=n {
            for (k, m) in self.normal_monomials(w).into_iter().enumerate() {
                names.push(format!("p{w}_{}", k + 1));
                monos.push(m);
            }
        }
        let params = VarSet::new(names.clone());
        let mut f = OrbitPoly::zero(self.j_vars.clone(), params.clone());
        for (i, m) in monos.into_iter().enumerate() {
            let c = RationalFunction::from_poly(QPoly::var_q(i, params.clone()));
            f.add_term(m, c);
        }
        (f, names)
    }
}

/// Rewrites `p` until no monomial is divisible by a rule's left side. The rule
/// set must terminate; oriented rules always do.
pub fn normal_form<C: Coefficient>(p: &Poly<C>, rules: &[SyzygyRule]) -> Poly<C> {
    if rules.is_empty() {
        return p.clone();
    }
    let mut work = p.clone();
    let mut out = Poly::zero(p.vars().clone(), p.ctx().clone());
    while let Some((m, c)) = work.pop_leading() {
        match rules.iter().find(|r| r.lhs.divides(&m)) {
            Some(rule) => {
                let q = m.div(&rule.lhs).expect("lhs divides");
                for (rm, rc) in rule.rhs.terms() {
                    work.add_term(rm.mul(&q), c.scale_value(rc));
                }
            }
            None => out.add_term(m, c),
        }
    }
    out
}

/// Symmetric matrix of gradient scalar products, over the J indeterminates.
#[derive(Debug, Clone, PartialEq)]
pub struct PMatrix {
    pub entries: Vec<Vec<QPoly>>,
}

impl PMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, h: usize) -> &QPoly {
        &self.entries[i][h]
    }

    pub fn is_symmetric(&self) -> bool {
        let r = self.size();
        (0..r).all(|i| (0..r).all(|h| self.entries[i][h] == self.entries[h][i]))
    }

    /// Entries as canonical strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(ToString::to_string).collect())
            .collect()
    }
}

impl fmt::Display for PMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.to_strings();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", padded.join("  "))?;
        }
        Ok(())
    }
}
