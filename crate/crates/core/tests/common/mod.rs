#![allow(dead_code)]

use std::sync::Arc;

use num_traits::Zero;
use orbitred::catalog::{self, Model};
use orbitred::parse::{parse_mixed, parse_poly};
use orbitred::poly::monomials_of_degree;
use orbitred::*;

pub fn q(s: &str, vars: &Arc<VarSet>) -> QPoly {
    parse_poly(s, vars).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn mixed(s: &str, m: &Model) -> OrbitPoly {
    parse_mixed(s, m.basis.j_vars(), &m.params).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn mono(s: &str, j: &Arc<VarSet>) -> Monomial {
    let p = q(s, j);
    assert_eq!(p.len(), 1, "{s} is not a monomial");
    p.leading().unwrap().0.clone()
}

pub fn monos(list: &[&str], j: &Arc<VarSet>) -> Vec<Monomial> {
    list.iter().map(|s| mono(s, j)).collect()
}

pub fn matrix(rows: &[&[&str]], vars: &Arc<VarSet>) -> PolyMatrix {
    rows.iter()
        .map(|r| r.iter().map(|s| q(s, vars)).collect())
        .collect()
}

pub fn spec(m: &Model, critical: &[&str]) -> ParameterSpec {
    ParameterSpec::new(m.params.clone(), critical).unwrap()
}

/// `p` and `r` agree up to a nonzero rational factor.
pub fn proportional(p: &QPoly, r: &QPoly) -> bool {
    if p.is_zero() || r.is_zero() {
        return p.is_zero() && r.is_zero();
    }
    p.primitive_part() == r.primitive_part() || p.primitive_part() == (-r).primitive_part()
}

/// `p` and `r` have the same zero set as far as divisibility can tell:
/// each divides a power of the other.
pub fn same_radical(p: &QPoly, r: &QPoly) -> bool {
    let divides_power = |a: &QPoly, b: &QPoly| (1..=4).any(|k| b.pow(k).div_exact(a).is_some());
    divides_power(p, r) && divides_power(r, p)
}

/// Laplace expansion along the first row.
pub fn det_cofactor(m: &[Vec<QPoly>], vars: &Arc<VarSet>) -> QPoly {
    let n = m.len();
    if n == 0 {
        return QPoly::one_q(vars.clone());
    }
    let mut acc = QPoly::zero_q(vars.clone());
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<QPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][j] * &det_cofactor(&minor, vars);
        acc = if j % 2 == 0 {
            &acc + &term
        } else {
            &acc - &term
        };
    }
    acc
}

/// First-order coefficient changes computed in x-space: the target
/// coefficients of `<grad_x S, grad_x G>` for each generator monomial `G`,
/// with `S` the source. Source coefficients must be polynomial in the
/// parameters. No P-matrix is involved.
pub fn xspace_transfer(
    basis: &InvariantBasis,
    source: &OrbitPoly,
    targets: &[Monomial],
    generators: &[Monomial],
) -> PolyMatrix {
    let params = source.ctx().clone();
    let dot = |a: &QPoly, b: &QPoly| {
        a.gradient()
            .iter()
            .zip(b.gradient())
            .fold(QPoly::zero_q(basis.x_vars().clone()), |acc, (u, v)| {
                &acc + &(u * &v)
            })
    };
    let mut out = vec![vec![QPoly::zero_q(params.clone()); generators.len()]; targets.len()];
    for (col, g) in generators.iter().enumerate() {
        let gx = basis.expand_monomial(g);
        for (m, c) in source.terms() {
            let c = c.as_poly().expect("polynomial source coefficient").clone();
            let change = basis
                .express_in_invariants(&dot(&basis.expand_monomial(m), &gx))
                .unwrap();
            for (row, t) in targets.iter().enumerate() {
                let r = change.coeff_or_zero(t);
                if !r.is_zero() {
                    out[row][col] = &out[row][col] + &c.scale(&r);
                }
            }
        }
    }
    out
}

pub fn eval_matrix(m: &[Vec<QPoly>], point: &[Rational]) -> Vec<Vec<Rational>> {
    m.iter()
        .map(|r| r.iter().map(|e| e.eval(point)).collect())
        .collect()
}

/// The SGU model with its degree-2 and degree-4 source at `a = 0`.
pub fn cubic() -> (Model, ParameterSpec) {
    let m = catalog::cubic_model();
    let s = spec(&m, &["a"]);
    (m, s)
}

pub fn sgu_source(m: &Model) -> OrbitPoly {
    mixed("b1*J2 + b2*J1^2", m)
}

/// A polynomial over the J indeterminates from small integer coefficients,
/// one per normal monomial of weighted degree in `[lo, hi]`.
pub fn poly_from(basis: &InvariantBasis, lo: u32, hi: u32, coeffs: &[i64]) -> OrbitPoly {
    let params = VarSet::empty();
    let mut f = OrbitPoly::zero(basis.j_vars().clone(), params.clone());
    let mut k = 0;
    for w in lo..=hi {
        for m in basis.normal_monomials(w) {
            let c = coeffs.get(k).copied().unwrap_or(0);
            k += 1;
            if c != 0 {
                f.add_term(
                    m,
                    RationalFunction::from_rational_over(scalar::int(c), params.clone()),
                );
            }
        }
    }
    f
}

pub fn count_normal(basis: &InvariantBasis, lo: u32, hi: u32) -> usize {
    (lo..=hi).map(|w| basis.normal_monomials(w).len()).sum()
}

/// Raw J polynomial that may contain non-normal monomials.
pub fn raw_from(basis: &InvariantBasis, hi: u32, coeffs: &[i64]) -> QPoly {
    let j = basis.j_vars();
    let mut f = QPoly::zero_q(j.clone());
    let mut k = 0;
    for w in 1..=hi {
        for m in monomials_of_degree(j, w) {
            let c = coeffs.get(k).copied().unwrap_or(0);
            k += 1;
            if c != 0 {
                f.add_term(m, scalar::int(c));
            }
        }
    }
    f
}

pub fn count_raw(basis: &InvariantBasis, hi: u32) -> usize {
    (1..=hi)
        .map(|w| monomials_of_degree(basis.j_vars(), w).len())
        .sum()
}

pub fn example_bases() -> Vec<(&'static str, InvariantBasis)> {
    vec![
        ("plane reflections", catalog::plane_reflections()),
        ("plane inversion", catalog::plane_inversion()),
        ("space reflections", catalog::space_reflections()),
    ]
}

/// Size parameters for randomized instances over `basis`: the top degree of
/// `F`, `G` and the degree of `H`.
pub fn instance_degrees(basis: &InvariantBasis) -> (u32, u32) {
    if basis.degrees().iter().any(|&d| d > 2) {
        (8, 6)
    } else {
        (6, 4)
    }
}

pub fn homogeneous_from(basis: &InvariantBasis, w: u32, coeffs: &[i64]) -> OrbitPoly {
    poly_from(basis, w, w, coeffs)
}

fn lie(f: &OrbitPoly, h: &OrbitPoly, basis: &InvariantBasis, p: &PMatrix) -> OrbitPoly {
    derivation_apply(f, h, basis, p).unwrap()
}

/// `L_H (F G) = F L_H G + G L_H F` modulo syzygies.
pub fn check_leibniz(
    basis: &InvariantBasis,
    p: &PMatrix,
    f: &OrbitPoly,
    g: &OrbitPoly,
    h: &OrbitPoly,
) -> bool {
    let lhs = lie(&basis.normal_form(&(f * g)), h, basis, p);
    let rhs = basis.normal_form(&(&(f * &lie(g, h, basis, p)) + &(g * &lie(f, h, basis, p))));
    lhs == rhs
}

/// Linearity in both arguments.
#[allow(clippy::too_many_arguments)]
pub fn check_bilinear(
    basis: &InvariantBasis,
    p: &PMatrix,
    f: &OrbitPoly,
    g: &OrbitPoly,
    h1: &OrbitPoly,
    h2: &OrbitPoly,
    alpha: &Rational,
    beta: &Rational,
) -> bool {
    let comb = |a: &OrbitPoly, b: &OrbitPoly| &a.scale(alpha) + &b.scale(beta);
    let left = lie(&comb(f, g), h1, basis, p) == comb(&lie(f, h1, basis, p), &lie(g, h1, basis, p));
    let right =
        lie(f, &comb(h1, h2), basis, p) == comb(&lie(f, h1, basis, p), &lie(f, h2, basis, p));
    left && right
}

/// A generator of degree `d_H` maps each component of degree `w` into degree `w + d_H - 2`.
pub fn check_filtration(basis: &InvariantBasis, p: &PMatrix, f: &OrbitPoly, h: &OrbitPoly) -> bool {
    let Some(dh) = h.degree() else { return true };
    let mut total = OrbitPoly::zero(f.vars().clone(), f.ctx().clone());
    for (w, comp) in f.components() {
        let image = lie(&comp, h, basis, p);
        if !image.is_zero() && !(image.is_homogeneous() && image.degree() == Some(w + dh - 2)) {
            return false;
        }
        total = &total + &image;
    }
    let whole = lie(f, h, basis, p);
    let floor_ok = match (whole.min_degree(), f.min_degree()) {
        (Some(a), Some(b)) => a >= b + dh - 2,
        _ => true,
    };
    whole == total && floor_ok
}

/// `L_H F = sum_i U_i dH/dJ_i`, and both agree with the x-space scalar
/// product of gradients.
pub fn check_u_vector(basis: &InvariantBasis, p: &PMatrix, f: &OrbitPoly, h: &OrbitPoly) -> bool {
    let u = u_vector(f, basis, p).unwrap();
    let dh = h.gradient();
    let mut via_u = OrbitPoly::zero(f.vars().clone(), f.ctx().clone());
    for (ui, di) in u.iter().zip(&dh) {
        via_u = &via_u + &(ui * di);
    }
    let direct = lie(f, h, basis, p);
    if basis.normal_form(&via_u) != direct {
        return false;
    }
    let fx = basis.expand(f).unwrap();
    let hx = basis.expand(h).unwrap();
    let mut dot = OrbitPoly::zero(basis.x_vars().clone(), f.ctx().clone());
    for (a, b) in fx.gradient().iter().zip(hx.gradient()) {
        dot = &dot + &(a * &b);
    }
    basis.expand(&direct).unwrap() == dot
}

/// `dQ_a/dJ_b = dQ_b/dJ_a` for `Q = grad H`, and for the `Q` reported by the
/// criterion on a single term of `F`.
pub fn check_q_symmetry(h: &OrbitPoly, q_reported: Option<&[OrbitPoly]>) -> bool {
    let sym = |q: &[OrbitPoly]| {
        let r = q.len();
        (0..r).all(|a| (0..r).all(|b| q[a].derivative(b) == q[b].derivative(a)))
    };
    sym(&h.gradient()) && q_reported.is_none_or(sym)
}

/// Normal forms are fixed points and contain only normal monomials.
pub fn check_idempotent(basis: &InvariantBasis, raw: &QPoly) -> bool {
    let once = basis.normal_form(raw);
    basis.normal_form(&once) == once && once.monomials().all(|m| basis.is_normal(m))
}

/// Expanding in x and expressing back recovers the normal form.
pub fn check_round_trip(basis: &InvariantBasis, raw: &QPoly) -> bool {
    let x = basis.expand(raw).unwrap();
    basis.express_in_invariants(&x).unwrap() == basis.normal_form(raw)
}
