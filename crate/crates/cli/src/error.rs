use std::fmt;

use modent_core::Error as CoreError;

/// Kind of a configuration problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IssueKind {
    /// A line that is not `key = value`, or a value of the wrong type.
    Parse,
    UnknownKey,
    DuplicateKey,
    MissingKey,
    OutOfRange,
    UnknownMeasure,
    /// The parameters lie outside the model's domain.
    Domain,
}

/// One configuration problem, located by line when it comes from the text.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub field: String,
    pub kind: IssueKind,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{}", format_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("{scenario}: {source}")]
    Model {
        scenario: String,
        #[source]
        source: CoreError,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("self-check failed: {0}")]
    Check(String),
}

fn format_issues(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    /// Process exit code: 2 configuration, 3 numerical domain, 4 convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(issues) => {
                if issues.iter().all(|i| i.kind == IssueKind::Domain) {
                    3
                } else {
                    2
                }
            }
            CliError::Model { source: CoreError::NonConvergence { .. }, .. } => 4,
            CliError::Model { .. } => 3,
            CliError::Io { .. } | CliError::Check(_) => 1,
        }
    }
}
