mod common;

use std::sync::Arc;

use common::*;
use orbitred::catalog::{self, Model};
use orbitred::orbit::stability_order;
use orbitred::parse::parse_mixed;
use orbitred::{
    derivation_apply, lie_transform, u_vector, weighted_degree, Error, Generator, InvariantBasis,
    OrbitPoly, VarSet,
};

fn over(basis: &InvariantBasis, params: &[&str], text: &str) -> OrbitPoly {
    let pv = VarSet::new(params.iter().copied());
    parse_mixed(text, basis.j_vars(), &pv).unwrap()
}

#[test]
fn weighted_degrees() {
    let j = catalog::space_reflections().j_vars().clone();
    assert_eq!(weighted_degree(&[("J1", 2), ("J2", 1)], &j).unwrap(), 8);
    assert_eq!(weighted_degree(&[], &j).unwrap(), 0);
    assert_eq!(
        weighted_degree(&[("J1", 1), ("J2", 1), ("J3", 1)], &j).unwrap(),
        12
    );
    assert!(matches!(
        weighted_degree(&[("J9", 1)], &j),
        Err(Error::UnknownIndeterminate(_))
    ));
}

#[test]
fn stability_orders() {
    assert_eq!(stability_order(&catalog::space_reflections()), 12);
    assert_eq!(stability_order(&catalog::plane_reflections()), 4);
    let xv = VarSet::new(["x", "y"]);
    let norm = InvariantBasis::new(
        xv.clone(),
        vec!["J".into()],
        vec![q("x^2 + y^2", &xv)],
        vec![],
        None,
    )
    .unwrap();
    assert_eq!(stability_order(&norm), 4);
}

#[test]
fn u_vector_examples() {
    let m = catalog::plane_reflections_model();
    let p = m.basis.p_matrix().unwrap();
    let u = u_vector(&mixed("a1*J1 + a2*J2", &m), &m.basis, &p).unwrap();
    assert_eq!(u, vec![mixed("4*a1*J1", &m), mixed("4*a2*J2", &m)]);
    let u = u_vector(&mixed("7", &m), &m.basis, &p).unwrap();
    assert!(u.iter().all(OrbitPoly::is_zero));

    let (c, _) = cubic();
    let p = c.basis.p_matrix().unwrap();
    let u = u_vector(&mixed("a*J1", &c), &c.basis, &p).unwrap();
    assert_eq!(
        u,
        vec![
            mixed("4*a*J1", &c),
            mixed("8*a*J2", &c),
            mixed("12*a*J3", &c)
        ]
    );
}

#[test]
fn u_vector_rejects_foreign_polynomials() {
    let m = catalog::plane_reflections_model();
    let other = catalog::space_reflections();
    let p = other.p_matrix().unwrap();
    assert!(u_vector(&m.potential, &other, &p).is_err());
}

#[test]
fn first_order_change_in_the_plane() {
    let b = catalog::plane_reflections();
    let p = b.p_matrix().unwrap();
    let names = ["a1", "a2", "h1", "h2", "k1"];
    let f = over(&b, &names, "a1*J1 + a2*J2");
    let h = over(&b, &names, "h1*J1^2 + h2*J2^2 + k1*J1*J2");
    let got = derivation_apply(&f, &h, &b, &p).unwrap();
    assert_eq!(
        got,
        over(
            &b,
            &names,
            "8*a1*h1*J1^2 + 8*a2*h2*J2^2 + 4*(a1 + a2)*k1*J1*J2"
        )
    );
    // the x-space scalar product of gradients confirms J2^2 in the middle term
    let fx = b.expand(&f).unwrap();
    let hx = b.expand(&h).unwrap();
    let dot = fx.gradient().iter().zip(hx.gradient()).fold(
        OrbitPoly::zero(b.x_vars().clone(), f.ctx().clone()),
        |acc, (u, v)| &acc + &(u * &v),
    );
    assert_eq!(b.expand(&got).unwrap(), dot);
    let zero = over(&b, &names, "0");
    assert!(derivation_apply(&f, &zero, &b, &p).unwrap().is_zero());
}

#[test]
fn first_order_change_for_cubic_symmetry() {
    let b = catalog::space_reflections();
    let p = b.p_matrix().unwrap();
    let names = ["a", "beta1", "beta2"];
    let f = over(&b, &names, "a*J1");
    let h = over(&b, &names, "beta1*J2 + beta2*J1^2");
    let got = derivation_apply(&f, &h, &b, &p).unwrap();
    assert_eq!(got, over(&b, &names, "8*(a*beta2*J1^2 + a*beta1*J2)"));
}

#[test]
fn generators_must_be_homogeneous_of_degree_four_or_more() {
    let m = catalog::plane_reflections_model();
    assert!(matches!(
        Generator::new(mixed("b1*J1", &m)),
        Err(Error::GeneratorDegree(_))
    ));
    assert!(matches!(
        Generator::new(mixed("J1^2 + J1^3", &m)),
        Err(Error::GeneratorDegree(_))
    ));
    let g = Generator::new(mixed("b1*J1^2 + J1*J2", &m)).unwrap();
    assert_eq!(g.degree(), 4);
    assert!(Generator::new(mixed("0", &m)).unwrap().is_zero());
}

fn plane_model() -> (Model, Generator) {
    let m = catalog::plane_reflections_model();
    let h = Generator::new(mixed(
        "-b1/(8*a1)*J1^2 - b2/(8*a2)*J2^2 - c/(4*(a1 + a2))*J1*J2",
        &m,
    ))
    .unwrap();
    (m, h)
}

#[test]
fn zero_generator_is_the_identity() {
    let (m, _) = plane_model();
    let p = m.basis.p_matrix().unwrap();
    let g = Generator::zero(m.basis.j_vars().clone(), m.params.clone());
    assert_eq!(
        lie_transform(&m.potential, &g, &m.basis, &p, 8).unwrap(),
        m.potential
    );
}

#[test]
fn plane_solution_clears_the_quartic_part() {
    let (m, h) = plane_model();
    let p = m.basis.p_matrix().unwrap();
    let out = lie_transform(&m.potential, &h, &m.basis, &p, 6).unwrap();
    assert!(out.homogeneous_component(4).is_zero());
    assert_eq!(
        out.homogeneous_component(2),
        m.potential.homogeneous_component(2)
    );

    let l = |f: &OrbitPoly| derivation_apply(f, h.poly(), &m.basis, &p).unwrap();
    let f2 = m.potential.homogeneous_component(2);
    let f4 = m.potential.homogeneous_component(4);
    let half = orbitred::scalar::rat(1, 2);
    let second = l(&l(&f2)).scale(&half);
    assert_eq!(out.homogeneous_component(6), &l(&f4) + &second);
    assert_eq!(out.homogeneous_component(6), -second);
}

#[test]
fn inverse_flow_undoes_the_transform() {
    let (c, _) = cubic();
    let p = c.basis.p_matrix().unwrap();
    let h = Generator::new(mixed("b1*J3 + 2*J1^3 - c1*J1*J2", &c)).unwrap();
    let there = lie_transform(&c.potential, &h, &c.basis, &p, 12).unwrap();
    let back = lie_transform(&there, &h.negated(), &c.basis, &p, 12).unwrap();
    assert_eq!(back, c.potential);
}

#[test]
fn low_components_are_unchanged() {
    let (c, _) = cubic();
    let p = c.basis.p_matrix().unwrap();
    let h = Generator::new(mixed("d1*J1^4 + J2^2", &c)).unwrap();
    let out = lie_transform(&c.potential, &h, &c.basis, &p, 12).unwrap();
    // lowest degree 2 plus w_H - 2 = 8
    for w in [2, 4, 6] {
        assert_eq!(
            out.homogeneous_component(w),
            c.potential.homogeneous_component(w),
            "degree {w}"
        );
    }
    assert_ne!(
        out.homogeneous_component(8),
        c.potential.homogeneous_component(8)
    );
}

struct Suite {
    basis: InvariantBasis,
    p: orbitred::PMatrix,
    top: u32,
    dh: u32,
}

impl Suite {
    fn new(basis: InvariantBasis) -> Arc<Self> {
        let p = basis.p_matrix().unwrap();
        let (top, dh) = instance_degrees(&basis);
        Arc::new(Self { basis, p, top, dh })
    }

    fn f(&self, c: &[i64]) -> OrbitPoly {
        poly_from(&self.basis, self.basis.degrees()[0], self.top - 2, c)
    }

    fn h(&self, c: &[i64]) -> OrbitPoly {
        homogeneous_from(&self.basis, self.dh, c)
    }

    fn sizes(&self) -> (usize, usize) {
        let d1 = self.basis.degrees()[0];
        (
            count_normal(&self.basis, d1, self.top),
            count_normal(&self.basis, self.dh, self.dh),
        )
    }
}

macro_rules! property_suite {
    ($name:ident, $basis:expr) => {
        mod $name {
            use super::*;
            use proptest::prelude::*;

            fn suite() -> Arc<Suite> {
                Suite::new($basis)
            }

            fn coeffs(n: usize) -> impl Strategy<Value = Vec<i64>> {
                prop::collection::vec(prop_oneof![1 => Just(0i64), 1 => -4i64..=4], n)
            }

            fn instance() -> impl Strategy<Value = (Vec<i64>, Vec<i64>, Vec<i64>, Vec<i64>, (i64, i64))> {
                let (nf, nh) = suite().sizes();
                (coeffs(nf), coeffs(nf), coeffs(nh), coeffs(nh), (-6i64..=6, 1i64..=6))
            }

            proptest! {
                #![proptest_config(ProptestConfig::with_cases(200))]

                #[test]
                fn derivation_law((f, g, h, _, _) in instance()) {
                    let s = suite();
                    let half = s.top / 2;
                    prop_assert!(check_leibniz(&s.basis, &s.p, &s.f(&f).truncate(half), &s.f(&g).truncate(half), &s.h(&h)));
                }

                #[test]
                fn bilinearity((f, g, h1, h2, (n, d)) in instance()) {
                    let s = suite();
                    let alpha = orbitred::scalar::rat(n, d);
                    let beta = orbitred::scalar::rat(d, 7);
                    prop_assert!(check_bilinear(&s.basis, &s.p, &s.f(&f), &s.f(&g), &s.h(&h1), &s.h(&h2), &alpha, &beta));
                }

                #[test]
                fn filtration((f, _, h, _, _) in instance()) {
                    let s = suite();
                    let f = s.f(&f);
                    let h = s.h(&h);
                    prop_assert!(check_filtration(&s.basis, &s.p, &f, &h));
                    if let Ok(g) = Generator::new(h.clone()) {
                        let out = lie_transform(&f, &g, &s.basis, &s.p, s.top).unwrap();
                        if let (Some(lo), false) = (f.min_degree(), g.is_zero()) {
                            for w in lo..lo + s.dh - 2 {
                                prop_assert_eq!(out.homogeneous_component(w), f.homogeneous_component(w));
                            }
                            prop_assert!(out.min_degree().is_none_or(|m| m >= lo));
                        }
                    }
                }

                #[test]
                fn u_vector_consistency((f, _, h, _, _) in instance()) {
                    let s = suite();
                    prop_assert!(check_u_vector(&s.basis, &s.p, &s.f(&f), &s.h(&h)));
                }

                #[test]
                fn bracket_symmetry((f, _, h, _, _) in instance()) {
                    let s = suite();
                    let (f, h) = (s.f(&f), s.h(&h));
                    prop_assert_eq!(
                        derivation_apply(&f, &h, &s.basis, &s.p).unwrap(),
                        derivation_apply(&h, &f, &s.basis, &s.p).unwrap()
                    );
                    prop_assert!(check_q_symmetry(&h, None));
                }
            }
        }
    };
}

property_suite!(plane_reflections, catalog::plane_reflections());
property_suite!(plane_inversion, catalog::plane_inversion());
property_suite!(space_reflections, catalog::space_reflections());
