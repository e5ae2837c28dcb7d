use thiserror::Error;

/// A failure reported to the user as one line, prefixed with the section of
/// the problem file (or the command stage) it concerns.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    /// Malformed input: syntax, unknown names, invalid bases, bad flags.
    #[error("{section}: {message}")]
    Input { section: String, message: String },

    /// Well-formed input on which the computation itself fails.
    #[error("{section}: {message}")]
    Domain { section: String, message: String },
}

impl CliError {
    pub fn input(section: &str, message: impl Into<String>) -> Self {
        CliError::Input {
            section: section.to_string(),
            message: one_line(message.into()),
        }
    }

    pub fn domain(section: &str, message: impl Into<String>) -> Self {
        CliError::Domain {
            section: section.to_string(),
            message: one_line(message.into()),
        }
    }

    /// 2 for input errors, 1 for domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Domain { .. } => 1,
        }
    }

    /// Classifies an engine error raised while working on `section`.
    pub fn from_core(section: &str, e: orbitred::Error) -> Self {
        use orbitred::Error as E;
        match e {
            E::NotExpressible { .. }
            | E::NoUsableSource
            | E::ResonanceViolated { .. }
            | E::ZeroGenericParameter(_)
            | E::FlowOverflow
            | E::DivisionByZero => CliError::domain(section, e.to_string()),
            other => CliError::input(section, other.to_string()),
        }
    }
}

fn one_line(s: String) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub type CliResult<T> = std::result::Result<T, CliError>;
