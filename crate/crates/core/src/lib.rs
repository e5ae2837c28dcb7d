//! Exact orbit-space reduction of symmetry-invariant polynomial potentials.

pub mod catalog;
pub mod elimination;
pub mod error;
pub mod invariant;
pub mod linalg;
pub mod numeric;
pub mod orbit;
pub mod parse;
pub mod pipeline;
pub mod poly;
pub mod ratfun;
pub mod scalar;

pub use elimination::{
    build_transfer, criterion_check, eliminable_sets, source_component, CriterionResult,
    EliminationMode, EliminationPlan, Overrides, ResonanceCondition, TransferMatrix,
};
pub use error::{Error, Result};
pub use invariant::{normal_form, InvariantBasis, PMatrix, SyzygyRule};
pub use linalg::{det_fraction_free, solve_linear, LinearSolution, PolyMatrix};
pub use numeric::{eval_potential, flow_map, verify_reduction, NumericContext, Verification};
pub use orbit::{
    derivation_apply, lie_transform, u_vector, weighted_degree, Generator, OrbitPoly, ParameterSpec,
};
pub use pipeline::{
    conditions_summary, reduce, ReductionOptions, ReductionReport, Stage, StageStatus, Strategy,
    StrategyKind, TieBreak,
};
pub use poly::{Coefficient, Monomial, Poly, QPoly, VarSet};
pub use ratfun::RationalFunction;
pub use scalar::Rational;
