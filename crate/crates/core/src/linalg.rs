//! Fraction-free linear algebra over polynomial entries.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{QPoly, VarSet};
use crate::ratfun::{poly_cmp, RationalFunction};
use crate::scalar::Rational;

pub type PolyMatrix = Vec<Vec<QPoly>>;

fn check_square(m: &[Vec<QPoly>]) -> Result<usize> {
    let n = m.len();
    for row in m {
        if row.len() != n {
            return Err(Error::NotSquare {
                rows: n,
                cols: row.len(),
            });
        }
    }
    Ok(n)
}

fn exact(p: &QPoly, d: &QPoly) -> QPoly {
    p.div_exact(d).expect("fraction-free step divides exactly")
}

/// Determinant by Bareiss elimination; every intermediate entry is a minor,
/// so each division is exact.
pub fn det_fraction_free(m: &[Vec<QPoly>]) -> Result<QPoly> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(QPoly::one_q(VarSet::empty()));
    }
    let vars = m[0][0].vars().clone();
    let mut a: PolyMatrix = m.to_vec();
    let mut prev = QPoly::one_q(vars.clone());
    let mut negate = false;
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by(|&i, &j| pivot_cmp(&a[i][k], &a[j][k]).then(i.cmp(&j)));
        let Some(p) = pivot else {
            return Ok(QPoly::zero_q(vars));
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = exact(&t, &prev);
            }
            a[i][k] = QPoly::zero_q(vars.clone());
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Pivot preference: fewer terms first, then smaller leading term.
fn pivot_cmp(a: &QPoly, b: &QPoly) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| poly_cmp(a, b))
}

/// Result of [`solve_linear`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    /// `None` when the system is inconsistent for generic parameter values.
    pub solution: Option<Vec<RationalFunction>>,
    pub rank: usize,
    /// Factors whose product is the final pivot minor, up to a rational constant.
    pub pivot_minors: Vec<QPoly>,
    /// `(row, column)` of each pivot in the original matrix, in elimination order.
    pub pivots: Vec<(usize, usize)>,
}

impl LinearSolution {
    pub fn is_consistent(&self) -> bool {
        self.solution.is_some()
    }

    /// Product of the pivot-minor factors.
    pub fn minor_product(&self, vars: &std::sync::Arc<VarSet>) -> QPoly {
        self.pivot_minors
            .iter()
            .fold(QPoly::one_q(vars.clone()), |acc, f| &acc * f)
    }
}

/// Normalized factors of `p`: one entry per variable of its monomial content
/// (with multiplicity) plus its primitive non-monomial remainder.
pub fn split_factor(p: &QPoly) -> Vec<QPoly> {
    let vars = p.vars().clone();
    let prim = p.primitive_part();
    let m = prim.monomial_content();
    let mut out = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        for _ in 0..e {
            out.push(QPoly::var_q(i, vars.clone()));
        }
    }
    let rest = prim.div_monomial(&m);
    if !rest.is_constant() {
        out.push(rest);
    }
    out
}

/// Solves `m * xi = f` over the fraction field of the parameter ring by
/// fraction-free Gauss-Jordan elimination with full pivoting. Free unknowns
/// are set to zero.
pub fn solve_linear(m: &[Vec<QPoly>], f: &[RationalFunction]) -> Result<LinearSolution> {
    let rows = m.len();
    if f.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            found: f.len(),
        });
    }
    let cols = m.first().map_or(0, Vec::len);
    for row in m {
        if row.len() != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                found: row.len(),
            });
        }
    }
    let vars = match (m.first().and_then(|r| r.first()), f.first()) {
        (Some(p), _) => p.vars().clone(),
        (None, Some(r)) => r.params().clone(),
        (None, None) => VarSet::empty(),
    };
    let mut a: PolyMatrix = m.to_vec();
    let mut b: Vec<RationalFunction> = f.to_vec();
    let mut row_of: Vec<usize> = (0..rows).collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut used_col = vec![false; cols];
    let mut prev = QPoly::one_q(vars.clone());
    let mut factors: Vec<QPoly> = Vec::new();

    for k in 0..rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in (0..cols).filter(|&j| !used_col[j]) {
                if a[i][j].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        if pivot_cmp(&a[i][j], &a[bi][bj]) == Ordering::Less {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let Some((pi, pc)) = best else { break };
        a.swap(k, pi);
        b.swap(k, pi);
        row_of.swap(k, pi);
        used_col[pc] = true;
        pivot_cols.push(pc);
        let p = a[k][pc].clone();
        let prev_rf = RationalFunction::from_poly(prev.clone());
        let p_rf = RationalFunction::from_poly(p.clone());
        for i in (0..rows).filter(|&i| i != k) {
            let lead = a[i][pc].clone();
            for j in 0..cols {
                let t = &(&a[i][j] * &p) - &(&lead * &a[k][j]);
                a[i][j] = exact(&t, &prev);
            }
            let lead_rf = RationalFunction::from_poly(lead);
            b[i] = (&b[i] * &p_rf - &lead_rf * &b[k])
                .checked_div(&prev_rf)
                .expect("previous pivot is nonzero");
        }
        if k > 0 {
            for i in 0..k {
                // rows already pivoted keep their pivot entry equal to the newest minor
                debug_assert_eq!(a[i][pivot_cols[i]], p);
            }
        }
        match p.div_exact(&prev) {
            Some(q) if !factors.is_empty() || prev.is_constant() => factors.push(q),
            _ => factors = vec![p.clone()],
        }
        prev = p;
    }

    let rank = pivot_cols.len();
    let pivot_minors: Vec<QPoly> = factors.iter().flat_map(split_factor).collect();
    let pivots = pivot_cols
        .iter()
        .enumerate()
        .map(|(k, &c)| (row_of[k], c))
        .collect();

    if b[rank..].iter().any(|r| !r.is_zero()) {
        return Ok(LinearSolution {
            solution: None,
            rank,
            pivot_minors,
            pivots,
        });
    }
    let mut xi = vec![RationalFunction::zero_over(vars.clone()); cols];
    if rank > 0 {
        let product = pivot_minors
            .iter()
            .fold(QPoly::one_q(vars.clone()), |acc, q| &acc * q);
        let c = constant_ratio(&prev, &product);
        for (k, &col) in pivot_cols.iter().enumerate() {
            xi[col] = b[k].div_by_factors(&c, &pivot_minors)?;
        }
    }
    Ok(LinearSolution {
        solution: Some(xi),
        rank,
        pivot_minors,
        pivots,
    })
}

/// `p / q` for polynomials known to differ by a rational constant.
fn constant_ratio(p: &QPoly, q: &QPoly) -> Rational {
    match (p.leading(), q.leading()) {
        (Some((_, a)), Some((_, b))) => a / b,
        _ => Rational::one(),
    }
}

/// Rank over the fraction field, by fraction-free elimination.
pub fn rank(m: &[Vec<QPoly>]) -> usize {
    let f: Vec<RationalFunction> = m
        .iter()
        .map(|r| {
            let vars = r.first().map_or_else(VarSet::empty, |p| p.vars().clone());
            RationalFunction::zero_over(vars)
        })
        .collect();
    solve_linear(m, &f).map_or(0, |s| s.rank)
}

/// Solves `a * x = b` over the rationals; free unknowns are set to zero.
/// Returns `None` when the system is inconsistent.
pub fn solve_rational(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut().skip(c) {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                for j in c..=cols {
                    let t = &m[r][j] * &factor;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (k, &c) in pivots.iter().enumerate() {
        x[c] = m[k][cols].clone();
    }
    Some(x)
}

/// Rank of a rational matrix.
pub fn rank_rational(m: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let factor = &a[i][c] / &a[r][c];
                for j in c..cols {
                    let t = &a[r][j] * &factor;
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}
