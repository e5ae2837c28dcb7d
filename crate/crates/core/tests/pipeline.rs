mod common;

use std::collections::BTreeSet;

use common::*;
use orbitred::catalog::{self, Model};
use orbitred::pipeline::replay;
use orbitred::{
    conditions_summary, lie_transform, reduce, EliminationMode, InvariantBasis, Monomial,
    OrbitPoly, ParameterSpec, ReductionOptions, ReductionReport, StageStatus, Strategy, VarSet,
};
use proptest::prelude::*;

use EliminationMode::{Fixed, Varying};

fn run(m: &Model, s: &ParameterSpec, mode: EliminationMode) -> ReductionReport {
    reduce(
        &m.potential,
        &m.basis,
        s,
        &ReductionOptions {
            mode,
            ..Default::default()
        },
    )
    .unwrap()
}

/// Stage invariants shared by every report.
fn check_report(r: &ReductionReport, basis: &InvariantBasis, s: &ParameterSpec) {
    assert_eq!(replay(r, basis).unwrap(), r.reduced, "replay");
    let at = orbitred::elimination::at_locus(&r.reduced, r.mode, s).unwrap();
    for z in r.zeroed() {
        assert!(
            at.coeff(z).is_none(),
            "{} survived",
            z.render(basis.j_vars())
        );
    }
    // components up to each stage degree are frozen from that stage on; in
    // varying mode later generators still act on purely critical terms such
    // as a*J1, so the frozen part is the one seen at the critical locus
    let frozen = |f: &OrbitPoly, w: u32| {
        orbitred::elimination::at_locus(&f.homogeneous_component(w), r.mode, s).unwrap()
    };
    let p = basis.p_matrix().unwrap();
    let mut f = r.original.clone();
    for stage in &r.stages {
        if let Some(g) = &stage.generator {
            f = basis.normal_form(&lie_transform(&f, g, basis, &p, r.truncation).unwrap());
        }
        for w in 0..=stage.target_degree {
            assert_eq!(frozen(&f, w), frozen(&r.reduced, w), "degree {w}");
        }
    }
    assert_eq!(r.conditions, conditions_summary(r));
}

#[test]
fn plane_reflections_without_critical_parameters() {
    let m = catalog::plane_reflections_model();
    let s = spec(&m, &[] as &[&str]);
    let r = run(&m, &s, Varying);
    check_report(&r, &m.basis, &s);
    assert_eq!(r.reduced, mixed("a1*J1 + a2*J2", &m));
    assert_eq!(r.zeroed().len(), 3);
    let want: Vec<_> = ["a1", "a2", "a1 + a2"]
        .iter()
        .map(|c| q(c, &m.params))
        .collect();
    assert_eq!(r.conditions.len(), 3);
    for c in &r.conditions {
        assert!(
            want.iter().any(|w| proportional(c.poly(), w)),
            "{}",
            c.render()
        );
    }
}

#[test]
fn cubic_model_varying_run() {
    let (m, s) = cubic();
    let r = run(&m, &s, Varying);
    check_report(&r, &m.basis, &s);
    assert!(!r.conditions.is_empty());
    let a = m.params.index_of("a").unwrap();
    for c in &r.conditions {
        assert!(
            c.poly().terms().all(|(mono, _)| mono.exps()[a] == 0),
            "{}",
            c.render()
        );
    }
    // the sextic stage keeps J3 and zeroes J1*J2 and J1^3
    for f in ["b2", "b1 + 4*b2"] {
        let f = q(f, &m.params);
        assert!(r.conditions.iter().any(|c| proportional(c.poly(), &f)));
    }
    let j = m.basis.j_vars();
    let sextic: BTreeSet<String> = r
        .surviving
        .iter()
        .filter(|x| x.degree() == 6)
        .map(|x| x.render(j))
        .collect();
    assert_eq!(sextic, BTreeSet::from(["J3".to_string()]));
}

#[test]
fn empty_report_has_no_conditions() {
    let m = catalog::plane_reflections_model();
    let s = spec(&m, &[] as &[&str]);
    let f = mixed("a1*J1 + a2*J2", &m);
    let opts = ReductionOptions {
        truncation: Some(2),
        ..Default::default()
    };
    let r = reduce(&f, &m.basis, &s, &opts).unwrap();
    assert!(r.stages.is_empty());
    assert!(conditions_summary(&r).is_empty());
    assert_eq!(r.reduced, f);
}

#[test]
fn keep_set_is_a_fixed_point() {
    let m = catalog::plane_reflections_model();
    let s = spec(&m, &[] as &[&str]);
    let f = mixed("a1*J1 + a2*J2 + b1*J1^2 + c*J1*J2", &m);
    let j = m.basis.j_vars();
    let keep = monos(&["J1^2", "J1*J2"], j);
    let opts = ReductionOptions {
        strategy: Strategy::keep_set(keep),
        ..Default::default()
    };
    let r = reduce(&f, &m.basis, &s, &opts).unwrap();
    assert!(r.stages.iter().all(|st| st.status != StageStatus::Applied));
    assert!(r.generators().is_empty());
    assert_eq!(r.reduced, f);
}

#[test]
fn keep_set_is_respected() {
    let (m, s) = cubic();
    let j = m.basis.j_vars();
    let keep = monos(&["J1*J2", "J1^4"], j);
    let opts = ReductionOptions {
        mode: Varying,
        strategy: Strategy::keep_set(keep.clone()),
        ..Default::default()
    };
    let r = reduce(&m.potential, &m.basis, &s, &opts).unwrap();
    check_report(&r, &m.basis, &s);
    for k in &keep {
        assert!(!r.zeroed().contains(&k));
        assert!(r.surviving.contains(k));
    }
}

#[test]
fn infeasible_keep_set_is_reported() {
    let m = catalog::plane_reflections_model();
    let s = spec(&m, &["a1"]);
    let keep = monos(&["J2^2", "J1*J2"], m.basis.j_vars());
    let opts = ReductionOptions {
        mode: Varying,
        strategy: Strategy::keep_set(keep),
        ..Default::default()
    };
    let r = reduce(&m.potential, &m.basis, &s, &opts).unwrap();
    assert_eq!(r.stages.len(), 1);
    assert_eq!(r.stages[0].status, StageStatus::Infeasible);
    assert!(r.stages[0].note.is_some());
    assert_eq!(r.reduced, m.potential);
}

#[test]
fn reports_are_deterministic() {
    let (m, s) = cubic();
    let a = run(&m, &s, Varying);
    let b = run(&m, &s, Varying);
    assert_eq!(a, b);
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

fn zeroed_set(r: &ReductionReport) -> BTreeSet<Monomial> {
    r.zeroed().into_iter().cloned().collect()
}

#[test]
fn fixed_mode_eliminates_at_least_as_much() {
    let four = catalog::plane_reflections_model();
    let five = catalog::plane_inversion_model();
    let (six, s6) = cubic();
    let cases = [
        (&four, spec(&four, &["a1"])),
        (&five, spec(&five, &["a1"])),
        (&six, s6),
    ];
    for (m, s) in cases {
        let fixed = run(m, &s, Fixed);
        let varying = run(m, &s, Varying);
        check_report(&fixed, &m.basis, &s);
        check_report(&varying, &m.basis, &s);
        let (zf, zv) = (zeroed_set(&fixed), zeroed_set(&varying));
        assert!(zv.is_subset(&zf), "{:?} vs {:?}", zv, zf);
    }
}

#[test]
fn mismatched_parameters_are_rejected() {
    let m = catalog::plane_reflections_model();
    let other = ParameterSpec::new(VarSet::new(["a"]), &[] as &[&str]).unwrap();
    assert!(reduce(&m.potential, &m.basis, &other, &ReductionOptions::default()).is_err());
}

fn empty_spec() -> ParameterSpec {
    ParameterSpec::new(VarSet::empty(), &[] as &[&str]).unwrap()
}

macro_rules! property_suite {
    ($name:ident, $basis:expr) => {
        mod $name {
            use super::*;

            fn potential() -> impl proptest::strategy::Strategy<Value = Vec<i64>> {
                let b = $basis;
                let (top, _) = instance_degrees(&b);
                let n = count_normal(&b, b.degrees()[0], top);
                prop::collection::vec(prop_oneof![1 => Just(0i64), 3 => -4i64..=4], n)
            }

            proptest! {
                #![proptest_config(ProptestConfig::with_cases(24))]

                #[test]
                fn reduction_invariants(c in potential()) {
                    let b = $basis;
                    let (top, _) = instance_degrees(&b);
                    let f: OrbitPoly = poly_from(&b, b.degrees()[0], top, &c);
                    let s = empty_spec();
                    let opts = ReductionOptions { truncation: Some(top), ..Default::default() };
                    match reduce(&f, &b, &s, &opts) {
                        Ok(r) => {
                            check_report(&r, &b, &s);
                            prop_assert_eq!(&reduce(&f, &b, &s, &opts).unwrap(), &r);
                        }
                        Err(e) => prop_assert!(f.is_zero(), "{e}"),
                    }
                }
            }
        }
    };
}

property_suite!(plane_reflections, catalog::plane_reflections());
property_suite!(plane_inversion, catalog::plane_inversion());
property_suite!(space_reflections, catalog::space_reflections());
