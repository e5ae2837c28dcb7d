//! Problem files, report documents and command implementations for the
//! `orbitred` binary.

pub mod commands;
pub mod error;
pub mod problem;
pub mod report;

pub use error::{CliError, CliResult};
pub use problem::{parse_problem, Problem, ProblemFile};
pub use report::ReportDoc;
