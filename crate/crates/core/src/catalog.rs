//! Ready-made bases and potentials for the reflection groups in the plane
//! and in space, and the cubic-reflection Landau model.

use std::sync::Arc;

use crate::error::Result;
use crate::invariant::InvariantBasis;
use crate::orbit::OrbitPoly;
use crate::parse::{parse_mixed, parse_poly};
use crate::poly::VarSet;
use crate::scalar::{int, Rational};

fn diag(entries: &[i64]) -> Vec<Vec<Rational>> {
    let n = entries.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { int(entries[i]) } else { int(0) })
                .collect()
        })
        .collect()
}

fn basis(
    x: &[&str],
    invariants: &[(&str, &str)],
    syzygies: &[(&str, &str)],
    generators: Vec<Vec<Vec<Rational>>>,
) -> Result<InvariantBasis> {
    let xv = VarSet::new(x.iter().copied());
    let names: Vec<String> = invariants.iter().map(|(n, _)| n.to_string()).collect();
    let polys = invariants
        .iter()
        .map(|(_, e)| parse_poly(e, &xv))
        .collect::<Result<Vec<_>>>()?;
    let jv = VarSet::new(names.clone());
    let rules = syzygies
        .iter()
        .map(|(l, r)| Ok((parse_poly(l, &jv)?, parse_poly(r, &jv)?)))
        .collect::<Result<Vec<_>>>()?;
    InvariantBasis::new(xv, names, polys, rules, Some(generators))
}

/// Independent reflections of the plane: `J1 = x^2`, `J2 = y^2`.
pub fn plane_reflections() -> InvariantBasis {
    basis(
        &["x", "y"],
        &[("J1", "x^2"), ("J2", "y^2")],
        &[],
        vec![diag(&[-1, 1]), diag(&[1, -1])],
    )
    .expect("valid basis")
}

/// The point reflection of the plane: `J1 = x^2`, `J2 = y^2`, `J3 = x*y`
/// with the relation `J1*J2 = J3^2`.
pub fn plane_inversion() -> InvariantBasis {
    basis(
        &["x", "y"],
        &[("J1", "x^2"), ("J2", "y^2"), ("J3", "x*y")],
        &[("J1*J2", "J3^2")],
        vec![diag(&[-1, -1])],
    )
    .expect("valid basis")
}

/// Independent reflections of space, with symmetric basic invariants of degrees 2, 4, 6.
pub fn space_reflections() -> InvariantBasis {
    basis(
        &["x", "y", "z"],
        &[
            ("J1", "x^2 + y^2 + z^2"),
            ("J2", "x^2*y^2 + y^2*z^2 + z^2*x^2"),
            ("J3", "x^2*y^2*z^2"),
        ],
        &[],
        vec![diag(&[-1, 1, 1]), diag(&[1, -1, 1]), diag(&[1, 1, -1])],
    )
    .expect("valid basis")
}

/// A named potential together with its parameter set.
#[derive(Debug, Clone)]
pub struct Model {
    pub basis: InvariantBasis,
    pub params: Arc<VarSet>,
    pub potential: OrbitPoly,
}

fn model(basis: InvariantBasis, params: &[&str], text: &str) -> Model {
    let params = VarSet::new(params.iter().copied());
    let potential = parse_mixed(text, basis.j_vars(), &params).expect("valid potential");
    Model {
        basis,
        params,
        potential,
    }
}

/// Quartic potential for [`plane_reflections`].
pub fn plane_reflections_model() -> Model {
    model(
        plane_reflections(),
        &["a1", "a2", "b1", "b2", "c"],
        "a1*J1 + a2*J2 + b1*J1^2 + b2*J2^2 + c*J1*J2",
    )
}

/// Quartic potential for [`plane_inversion`].
pub fn plane_inversion_model() -> Model {
    model(
        plane_inversion(),
        &["a1", "a2", "a3", "b1", "b2", "b3", "c1", "c2"],
        "a1*J1 + a2*J2 + a3*J3 + b1*J1^2 + b2*J2^2 + b3*J3^2 + c1*J1*J3 + c2*J2*J3",
    )
}

/// Parameter names of [`cubic_model`], in declaration order.
pub const CUBIC_PARAMS: [&str; 22] = [
    "a", "b1", "b2", "c1", "c2", "c3", "d1", "d2", "d3", "d4", "f1", "f2", "f3", "f4", "f5", "g1",
    "g2", "g3", "g4", "g5", "g6", "g7",
];

/// The degree-12 Landau potential for [`space_reflections`].
pub fn cubic_model() -> Model {
    model(
        space_reflections(),
        &CUBIC_PARAMS,
        "a*J1 + b1*J2 + b2*J1^2 \
         + c1*J3 + c2*J1^3 + c3*J1*J2 \
         + d1*J1^4 + d2*J2^2 + d3*J1^2*J2 + d4*J1*J3 \
         + f1*J1^5 + f2*J1^3*J2 + f3*J1^2*J3 + f4*J1*J2^2 + f5*J2*J3 \
         + g1*J1^6 + g2*J2^3 + g3*J3^2 + g4*J1^4*J2 + g5*J1^3*J3 + g6*J1^2*J2^2 + g7*J1*J2*J3",
    )
}
