//! Transfer matrices, eliminable target sets and the term-level criterion.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invariant::{InvariantBasis, PMatrix};
use crate::linalg::{rank, solve_linear, split_factor, PolyMatrix};
use crate::orbit::{derivation_apply, derivation_raw, Generator, OrbitPoly, ParameterSpec};
use crate::poly::{Monomial, QPoly, VarSet};
use crate::ratfun::{poly_cmp, RationalFunction};

/// Enumeration is exhaustive up to this many target monomials.
pub const EXHAUSTIVE_TARGETS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EliminationMode {
    /// Parameters are held at one generic value.
    Fixed,
    /// Generators must stay regular as the critical parameters pass through zero.
    Varying,
}

impl EliminationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EliminationMode::Fixed => "fixed",
            EliminationMode::Varying => "varying",
        }
    }
}

impl fmt::Display for EliminationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EliminationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fixed" => Ok(EliminationMode::Fixed),
            "varying" => Ok(EliminationMode::Varying),
            other => Err(format!(
                "unknown mode `{other}` (expected fixed or varying)"
            )),
        }
    }
}

/// Explicit row and column monomial lists for [`build_transfer`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub targets: Option<Vec<Monomial>>,
    pub generators: Option<Vec<Monomial>>,
}

/// A polynomial in the non-critical parameters that must not vanish.
#[derive(Debug, Clone)]
pub struct ResonanceCondition {
    poly: QPoly,
}

impl ResonanceCondition {
    /// Normalizes to a primitive polynomial with positive leading coefficient.
    pub fn new(p: &QPoly) -> Self {
        Self {
            poly: p.primitive_part(),
        }
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn render(&self) -> String {
        format!("{} != 0", self.poly)
    }
}

impl PartialEq for ResonanceCondition {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

impl fmt::Display for ResonanceCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Appends `c` unless an equal condition is present.
pub fn push_condition(list: &mut Vec<ResonanceCondition>, c: ResonanceCondition) {
    if !c.poly.is_constant() && !list.contains(&c) {
        list.push(c);
    }
}

/// Linear map from generator coefficients to first-order changes of target
/// coefficients. The actual change is `scale * entries * h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub targets: Vec<Monomial>,
    pub generators: Vec<Monomial>,
    pub entries: PolyMatrix,
    pub scale: RationalFunction,
    pub source_degree: u32,
    pub target_degree: u32,
    pub generator_degree: u32,
    /// Whether the change was read off before syzygy reduction.
    pub raw: bool,
    j_vars: Arc<VarSet>,
    params: Arc<VarSet>,
}

impl TransferMatrix {
    pub fn params(&self) -> &Arc<VarSet> {
        &self.params
    }

    pub fn j_vars(&self) -> &Arc<VarSet> {
        &self.j_vars
    }

    pub fn rows(&self) -> usize {
        self.targets.len()
    }

    pub fn cols(&self) -> usize {
        self.generators.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(QPoly::is_zero)
    }

    /// Entries with the scale folded in.
    pub fn actual(&self) -> Vec<Vec<RationalFunction>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| &self.scale * &RationalFunction::from_poly(e.clone()))
                    .collect()
            })
            .collect()
    }

    /// Entries with critical parameters set to zero.
    pub fn at_locus(&self, critical: &[usize]) -> PolyMatrix {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.substitute_zero(critical)).collect())
            .collect()
    }

    /// The rows listed by index, in that order.
    pub fn select_rows(&self, rows: &[usize]) -> PolyMatrix {
        rows.iter().map(|&i| self.entries[i].clone()).collect()
    }
}

impl fmt::Display for TransferMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = self
            .generators
            .iter()
            .map(|g| g.render(&self.j_vars))
            .collect();
        writeln!(f, "columns: {}", cols.join(", "))?;
        for (t, row) in self.targets.iter().zip(&self.entries) {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}: [{}]", t.render(&self.j_vars), cells.join(", "))?;
        }
        Ok(())
    }
}

/// A choice of targets to zero together with the generator that does it.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationPlan {
    pub zeroed: Vec<Monomial>,
    pub zeroed_rows: Vec<usize>,
    /// Coefficient of each generator monomial.
    pub solution: Vec<(Monomial, RationalFunction)>,
    pub conditions: Vec<ResonanceCondition>,
    /// Product of the pivot minors with multiplicity.
    pub minor: QPoly,
}

impl EliminationPlan {
    /// The generator `sum h_g g`.
    pub fn generator(&self, j_vars: &Arc<VarSet>, params: &Arc<VarSet>) -> Result<Generator> {
        let mut h = OrbitPoly::zero(j_vars.clone(), params.clone());
        for (m, c) in &self.solution {
            h.add_term(m.clone(), c.clone());
        }
        Generator::new(h)
    }

    /// Product of the distinct condition polynomials.
    pub fn condition_product(&self) -> QPoly {
        self.conditions
            .iter()
            .fold(QPoly::one_q(self.minor.vars().clone()), |acc, c| {
                &acc * c.poly()
            })
    }
}

fn restrict(
    c: &RationalFunction,
    mode: EliminationMode,
    params: &ParameterSpec,
) -> Result<RationalFunction> {
    match mode {
        EliminationMode::Fixed => Ok(c.clone()),
        EliminationMode::Varying => c.substitute_zero(params.critical()),
    }
}

/// `F` with critical parameters set to zero (identity in fixed mode).
pub fn at_locus(f: &OrbitPoly, mode: EliminationMode, params: &ParameterSpec) -> Result<OrbitPoly> {
    f.try_map_coeffs(f.ctx().clone(), |c| restrict(c, mode, params))
}

/// The lowest-degree homogeneous component of `F` usable as the source of
/// first-order changes; in varying mode it is taken at the critical locus.
pub fn source_component(
    f: &OrbitPoly,
    mode: EliminationMode,
    params: &ParameterSpec,
) -> Result<OrbitPoly> {
    for (_, comp) in f.components() {
        let c = at_locus(&comp, mode, params)?;
        if !c.is_zero() {
            return Ok(c);
        }
    }
    Err(Error::NoUsableSource)
}

fn check_degrees(monos: &[Monomial], expected: u32, vars: &VarSet) -> Result<()> {
    for m in monos {
        if m.degree() != expected {
            return Err(Error::OverrideDegree {
                monomial: m.render(vars),
                found: m.degree(),
                expected,
            });
        }
    }
    Ok(())
}

/// Least common multiple of the denominators.
fn common_denominator<'a>(
    rfs: impl IntoIterator<Item = &'a RationalFunction>,
    params: &Arc<VarSet>,
) -> QPoly {
    let mut factors: Vec<(QPoly, u32)> = Vec::new();
    for r in rfs {
        for (f, e) in r.denominator_factors() {
            match factors.iter_mut().find(|(g, _)| *g == f) {
                Some(slot) => slot.1 = slot.1.max(e),
                None => factors.push((f, e)),
            }
        }
    }
    factors
        .iter()
        .fold(QPoly::one_q(params.clone()), |acc, (f, e)| {
            &acc * &f.pow(*e)
        })
}

/// Builds the transfer matrix from `source` into weighted degree `w_target`.
pub fn build_transfer(
    source: &OrbitPoly,
    w_target: u32,
    basis: &InvariantBasis,
    p: &PMatrix,
    overrides: &Overrides,
) -> Result<TransferMatrix> {
    let params = source.ctx().clone();
    let w_s = match (source.degree(), source.is_homogeneous()) {
        (Some(w), true) => w,
        _ => return Err(Error::NoUsableSource),
    };
    let w_h = i64::from(w_target) - i64::from(w_s) + 2;
    if w_h < 4 {
        return Err(Error::GeneratorDegree(format!("weighted degree {w_h}")));
    }
    let w_h = w_h as u32;
    let j = basis.j_vars();
    let targets = match &overrides.targets {
        Some(t) => t.clone(),
        None => basis.normal_monomials(w_target),
    };
    let generators = match &overrides.generators {
        Some(g) => g.clone(),
        None => basis.normal_monomials(w_h),
    };
    check_degrees(&targets, w_target, j)?;
    check_degrees(&generators, w_h, j)?;
    let raw = targets.iter().any(|m| !basis.is_normal(m));

    let one = RationalFunction::from_rational_over(crate::scalar::int(1), params.clone());
    let columns: Vec<Vec<RationalFunction>> = generators
        .par_iter()
        .map(|g| {
            let h = OrbitPoly::monomial(g.clone(), one.clone(), j.clone(), params.clone());
            let change = if raw {
                derivation_raw(source, &h, basis, p)
            } else {
                derivation_apply(source, &h, basis, p)
            }?;
            Ok(targets.iter().map(|t| change.coeff_or_zero(t)).collect())
        })
        .collect::<Result<_>>()?;

    let den = common_denominator(columns.iter().flatten(), &params);
    let den_rf = RationalFunction::from_poly(den.clone());
    let entries: PolyMatrix = (0..targets.len())
        .map(|t| {
            columns
                .iter()
                .map(|col| {
                    let v = &col[t] * &den_rf;
                    v.as_poly()
                        .cloned()
                        .expect("common denominator clears every entry")
                })
                .collect()
        })
        .collect();
    let scale = den_rf.inv()?;
    Ok(TransferMatrix {
        targets,
        generators,
        entries,
        scale,
        source_degree: w_s,
        target_degree: w_target,
        generator_degree: w_h,
        raw,
        j_vars: j.clone(),
        params,
    })
}

/// Current coefficients of the transfer targets (at the locus in varying mode).
pub fn target_coefficients(
    f: &OrbitPoly,
    t: &TransferMatrix,
    mode: EliminationMode,
    params: &ParameterSpec,
) -> Result<Vec<RationalFunction>> {
    t.targets
        .iter()
        .map(|m| restrict(&f.coeff_or_zero(m), mode, params))
        .collect()
}

/// Index subsets of `0..n` of size `k` in lexicographic order.
fn combinations(n: usize, k: usize, limit: Option<usize>) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if limit.is_some_and(|l| out.len() >= l) {
            break;
        }
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            break;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    out
}

/// Maximal target subsets that some generator zeroes at first order, each
/// with its solution and nondegeneracy conditions. `rhs` holds the current
/// target coefficients; `rows` restricts the candidate targets (all when `None`).
pub fn eliminable_sets(
    t: &TransferMatrix,
    rhs: &[RationalFunction],
    mode: EliminationMode,
    params: &ParameterSpec,
    max_sets: usize,
    rows: Option<&[usize]>,
) -> Result<Vec<EliminationPlan>> {
    if rhs.len() != t.rows() {
        return Err(Error::DimensionMismatch {
            expected: t.rows(),
            found: rhs.len(),
        });
    }
    let critical: &[usize] = match mode {
        EliminationMode::Fixed => &[],
        EliminationMode::Varying => params.critical(),
    };
    let t0 = t.at_locus(critical);
    let candidates: Vec<usize> = rows.map_or_else(|| (0..t.rows()).collect(), <[usize]>::to_vec);
    let sub: PolyMatrix = candidates.iter().map(|&i| t0[i].clone()).collect();
    let r = rank(&sub);
    if r == 0 {
        return Ok(Vec::new());
    }
    let rhs0: Vec<RationalFunction> = rhs
        .iter()
        .map(|c| restrict(c, mode, params))
        .collect::<Result<_>>()?;
    let limit = (candidates.len() > EXHAUSTIVE_TARGETS).then_some(max_sets);
    let subsets = combinations(candidates.len(), r, limit);
    let inv_scale = t.scale.inv()?;
    let plans: Vec<Option<EliminationPlan>> = subsets
        .par_iter()
        .map(|s| {
            let chosen: Vec<usize> = s.iter().map(|&k| candidates[k]).collect();
            let m: PolyMatrix = chosen.iter().map(|&i| t0[i].clone()).collect();
            let f: Vec<RationalFunction> =
                chosen.iter().map(|&i| -(&rhs0[i] * &inv_scale)).collect();
            let sol = solve_linear(&m, &f)?;
            if sol.rank < r {
                return Ok(None);
            }
            let minor = sol.minor_product(t.params());
            let xi = sol.solution.expect("full row rank systems are consistent");
            let mut conditions = Vec::new();
            for q in &sol.pivot_minors {
                push_condition(&mut conditions, ResonanceCondition::new(q));
            }
            Ok(Some(EliminationPlan {
                zeroed: chosen.iter().map(|&i| t.targets[i].clone()).collect(),
                zeroed_rows: chosen,
                solution: t.generators.iter().cloned().zip(xi).collect(),
                conditions,
                minor,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(plans.into_iter().flatten().collect())
}

/// Outcome of [`criterion_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub eliminable: bool,
    pub generator: Option<Generator>,
    /// `Q_i = dH/dJ_i`.
    pub q: Option<Vec<OrbitPoly>>,
    pub conditions: Vec<ResonanceCondition>,
    pub reason: Option<String>,
}

impl CriterionResult {
    fn no(reason: String) -> Self {
        Self {
            eliminable: false,
            generator: None,
            q: None,
            conditions: Vec::new(),
            reason: Some(reason),
        }
    }
}

/// Decides whether the single term `term` of `F` can be removed by a gradient
/// generator acting through the source component at first order.
pub fn criterion_check(
    term: &OrbitPoly,
    f: &OrbitPoly,
    basis: &InvariantBasis,
    p: &PMatrix,
    mode: EliminationMode,
    params: &ParameterSpec,
) -> Result<CriterionResult> {
    let j = basis.j_vars();
    let pv = f.ctx().clone();
    if term.is_zero() {
        let g = Generator::zero(j.clone(), pv.clone());
        let q = g.poly().gradient();
        return Ok(CriterionResult {
            eliminable: true,
            generator: Some(g),
            q: Some(q),
            conditions: Vec::new(),
            reason: None,
        });
    }
    if term.len() != 1 {
        return Err(Error::NotAMonomial(term.to_string()));
    }
    let (m, c) = term
        .leading()
        .map(|(m, c)| (m.clone(), c.clone()))
        .expect("nonzero");
    if !basis.is_normal(&m) {
        return Ok(CriterionResult::no(format!(
            "{} is not in syzygy normal form",
            m.render(j)
        )));
    }
    let src = source_component(f, mode, params)?;
    let w_s = src.degree().unwrap_or(0);
    let w = m.degree();
    let w_h = i64::from(w) - i64::from(w_s) + 2;
    if w_h < 4 {
        return Ok(CriterionResult::no(format!(
            "a generator for degree {w} would have weighted degree {w_h} < 4 through a source of degree {w_s}"
        )));
    }
    let t = build_transfer(&src, w, basis, p, &Overrides::default())?;
    let row = t
        .targets
        .iter()
        .position(|x| *x == m)
        .expect("normal monomial of degree w");
    let critical: &[usize] = match mode {
        EliminationMode::Fixed => &[],
        EliminationMode::Varying => params.critical(),
    };
    let t0 = t.at_locus(critical);
    let best = t0[row]
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .min_by(|(ia, a), (ib, b)| {
            a.len()
                .cmp(&b.len())
                .then_with(|| poly_cmp(a, b))
                .then(ia.cmp(ib))
        });
    let Some((col, entry)) = best else {
        return Ok(CriterionResult::no(format!(
            "no generator of degree {w_h} reaches {} at first order",
            m.render(j)
        )));
    };
    let denom = &t.scale * &RationalFunction::from_poly(entry.clone());
    let coeff = -(c.checked_div(&denom)?);
    let mut h = OrbitPoly::zero(j.clone(), pv);
    h.add_term(t.generators[col].clone(), coeff);
    let g = Generator::new(h)?;
    let q = g.poly().gradient();
    let mut conditions = Vec::new();
    for factor in split_factor(entry) {
        push_condition(&mut conditions, ResonanceCondition::new(&factor));
    }
    Ok(CriterionResult {
        eliminable: true,
        generator: Some(g),
        q: Some(q),
        conditions,
        reason: None,
    })
}
