//! Graded potentials in orbit-space coordinates and the derivation induced
//! by a gradient generator.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::invariant::{InvariantBasis, PMatrix};
use crate::poly::{Poly, VarSet};
use crate::ratfun::RationalFunction;
use crate::scalar::Rational;

/// A J-polynomial whose coefficients are rational functions of the parameters.
pub type OrbitPoly = Poly<RationalFunction>;

/// Parameter names with the subset that vanishes at the transition point.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpec {
    vars: Arc<VarSet>,
    critical: Vec<usize>,
}

impl ParameterSpec {
    pub fn new<S: AsRef<str>>(vars: Arc<VarSet>, critical: &[S]) -> Result<Self> {
        let mut idx = Vec::new();
        for name in critical {
            let i = vars.index(name.as_ref())?;
            if !idx.contains(&i) {
                idx.push(i);
            }
        }
        idx.sort_unstable();
        Ok(Self {
            vars,
            critical: idx,
        })
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    pub fn critical(&self) -> &[usize] {
        &self.critical
    }

    pub fn critical_names(&self) -> Vec<String> {
        self.critical
            .iter()
            .map(|&i| self.vars.name(i).to_string())
            .collect()
    }

    pub fn is_critical(&self, i: usize) -> bool {
        self.critical.contains(&i)
    }
}

/// A homogeneous generating function of weighted degree at least 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    h: OrbitPoly,
    degree: u32,
}

impl Generator {
    pub fn new(h: OrbitPoly) -> Result<Self> {
        let degree = h.degree().unwrap_or(0);
        if h.is_zero() {
            return Ok(Self { h, degree: 0 });
        }
        if !h.is_homogeneous() || degree < 4 {
            return Err(Error::GeneratorDegree(h.to_string()));
        }
        Ok(Self { h, degree })
    }

    pub fn zero(j_vars: Arc<VarSet>, params: Arc<VarSet>) -> Self {
        Self {
            h: OrbitPoly::zero(j_vars, params),
            degree: 0,
        }
    }

    pub fn poly(&self) -> &OrbitPoly {
        &self.h
    }

    /// Weighted degree (0 for the zero generator).
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.h.is_zero()
    }

    pub fn negated(&self) -> Self {
        Self {
            h: -&self.h,
            degree: self.degree,
        }
    }
}

/// Weighted degree of a monomial given as `(name, exponent)` pairs.
pub fn weighted_degree(pairs: &[(&str, u32)], vars: &VarSet) -> Result<u32> {
    pairs.iter().try_fold(0, |acc, (name, e)| {
        Ok(acc + vars.weight(vars.index(name)?) * e)
    })
}

/// `2 * d_r`.
pub fn stability_order(basis: &InvariantBasis) -> u32 {
    basis.stability_order()
}

fn lift_p(p: &PMatrix, params: &Arc<VarSet>) -> Vec<Vec<OrbitPoly>> {
    p.entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    e.map_coeffs(params.clone(), |c| {
                        RationalFunction::from_rational_over(c.clone(), params.clone())
                    })
                })
                .collect()
        })
        .collect()
}

fn check_shapes(f: &OrbitPoly, basis: &InvariantBasis, p: &PMatrix) -> Result<()> {
    if f.vars() != basis.j_vars() {
        return Err(Error::VarSetMismatch {
            left: basis.j_vars().names().join(","),
            right: f.vars().names().join(","),
        });
    }
    if p.size() != basis.rank() {
        return Err(Error::DimensionMismatch {
            expected: basis.rank(),
            found: p.size(),
        });
    }
    Ok(())
}

/// `U_i = sum_k dF/dJ_k P_ki`, each in normal form.
pub fn u_vector(f: &OrbitPoly, basis: &InvariantBasis, p: &PMatrix) -> Result<Vec<OrbitPoly>> {
    check_shapes(f, basis, p)?;
    let params = f.ctx().clone();
    let pr = lift_p(p, &params);
    let df = f.gradient();
    let r = basis.rank();
    Ok((0..r)
        .map(|i| {
            let mut u = OrbitPoly::zero(f.vars().clone(), params.clone());
            for (k, d) in df.iter().enumerate() {
                if !d.is_zero() && !pr[k][i].is_zero() {
                    u = &u + &(d * &pr[k][i]);
                }
            }
            basis.normal_form(&u)
        })
        .collect())
}

/// `L_H F = sum_{a,b} dF/dJ_a P_ab dH/dJ_b`, in normal form.
pub fn derivation_apply(
    f: &OrbitPoly,
    h: &OrbitPoly,
    basis: &InvariantBasis,
    p: &PMatrix,
) -> Result<OrbitPoly> {
    Ok(basis.normal_form(&derivation_raw(f, h, basis, p)?))
}

/// The derivation without syzygy reduction.
pub fn derivation_raw(
    f: &OrbitPoly,
    h: &OrbitPoly,
    basis: &InvariantBasis,
    p: &PMatrix,
) -> Result<OrbitPoly> {
    check_shapes(f, basis, p)?;
    check_shapes(h, basis, p)?;
    let params = f.ctx().clone();
    let zero = OrbitPoly::zero(f.vars().clone(), params.clone());
    if f.is_zero() || h.is_zero() {
        return Ok(zero);
    }
    let pr = lift_p(p, &params);
    let dh = h.gradient();
    let df = f.gradient();
    let r = basis.rank();
    let mut out = zero.clone();
    for a in 0..r {
        if df[a].is_zero() {
            continue;
        }
        let mut w = zero.clone();
        for b in 0..r {
            if !dh[b].is_zero() && !pr[a][b].is_zero() {
                w = &w + &(&pr[a][b] * &dh[b]);
            }
        }
        if !w.is_zero() {
            out = &out + &(&df[a] * &w);
        }
    }
    Ok(out)
}

/// Truncation at weighted degree `n` of `exp(L_H) F`: the exact pullback of
/// `F` along the time-one gradient flow of `H`.
pub fn lie_transform(
    f: &OrbitPoly,
    h: &Generator,
    basis: &InvariantBasis,
    p: &PMatrix,
    n: u32,
) -> Result<OrbitPoly> {
    let mut result = f.truncate(n);
    let step = h.degree().saturating_sub(2);
    if h.is_zero() || n < step {
        return Ok(result);
    }
    let mut term = result.clone();
    let mut k = 1i64;
    loop {
        let src = term.truncate(n - step);
        if src.is_zero() {
            break;
        }
        term = derivation_apply(&src, h.poly(), basis, p)?
            .truncate(n)
            .scale(&Rational::new(1.into(), k.into()));
        if term.is_zero() {
            break;
        }
        result = &result + &term;
        k += 1;
    }
    Ok(result)
}
