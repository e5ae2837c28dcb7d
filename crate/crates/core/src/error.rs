use thiserror::Error;

/// Errors raised by the algebra, invariant and reduction layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("indeterminate sets differ: [{left}] vs [{right}]")]
    VarSetMismatch { left: String, right: String },

    #[error("unknown indeterminate `{0}`")]
    UnknownIndeterminate(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("group generators are required for this operation")]
    MissingGroupGenerators,

    #[error("polynomial of degree {degree} is not expressible in the invariant basis")]
    NotExpressible { degree: u32 },

    #[error("invariant `{name}` is not homogeneous")]
    InhomogeneousInvariant { name: String },

    #[error("invariant degrees must be non-decreasing (found {0})")]
    UnsortedDegrees(String),

    #[error("syzygy `{rule}` does not vanish identically in x")]
    UnsoundSyzygy { rule: String },

    #[error(
        "syzygy `{rule}` is not oriented: its left side must exceed every right-side monomial"
    )]
    UnorientedSyzygy { rule: String },

    #[error("syzygy left side `{0}` must be a single monomial with coefficient 1")]
    SyzygyLhs(String),

    #[error("syzygy `{rule}` is not weighted-homogeneous")]
    InhomogeneousSyzygy { rule: String },

    #[error("generator must be homogeneous of weighted degree >= 4 (found {0})")]
    GeneratorDegree(String),

    #[error("override monomial `{monomial}` has weighted degree {found}, expected {expected}")]
    OverrideDegree {
        monomial: String,
        found: u32,
        expected: u32,
    },

    #[error("no usable source component: every component vanishes at the critical locus")]
    NoUsableSource,

    #[error("parameter `{0}` has no assigned value")]
    UnassignedParameter(String),

    #[error("parameter assignment violates condition `{condition}` (value {value:e})")]
    ResonanceViolated { condition: String, value: f64 },

    #[error("non-critical parameter `{0}` must be assigned a nonzero value")]
    ZeroGenericParameter(String),

    #[error("numeric overflow while integrating a generator flow")]
    FlowOverflow,

    #[error("expected a single term, found `{0}`")]
    NotAMonomial(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
