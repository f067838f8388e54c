use thiserror::Error;

use crate::model::Violation;

pub type Result<T> = std::result::Result<T, FidError>;

#[derive(Debug, Error)]
pub enum FidError {
    #[error("invalid spec: {}", join_violations(.0))]
    InvalidSpec(Vec<Violation>),

    #[error("joint input domain has {rows} rows, above the cap of {cap}")]
    DomainTooLarge { rows: u128, cap: usize },

    #[error("coordinate selection is empty")]
    EmptyCoordinates,

    #[error("coordinate sets overlap")]
    OverlappingCoordinates,

    #[error("input index {index} out of range for {len} inputs")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("solo-synergy needs at least 2 inputs, spec has {inputs}")]
    SoloSynergyUndefined { inputs: usize },

    #[error("internal error: synergy {0} is negative beyond tolerance")]
    NegativeSynergy(f64),

    #[error("output alphabet of size {size} exceeds the coarse-graining cap of {cap}")]
    OutputAlphabetTooLarge { size: usize, cap: usize },

    #[error("invalid join: {0}")]
    InvalidJoin(String),

    #[error("{count} deterministic completions exceed the cap of {cap}")]
    CompletionCapExceeded { count: u128, cap: usize },

    #[error("dirichlet alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),

    #[error("invalid completion config: {0}")]
    InvalidConfig(String),

    #[error("no completions requested")]
    NoCompletionsRequested,

    #[error("grid refinement unsupported: {0}")]
    GridRefineUnsupported(String),

    #[error("variable {variable} collapses to a single state; drop it before analysis")]
    VariableBecameConstant { variable: String },

    #[error("inputs appear independent; merge unwarranted ({left} x {right} all observed)")]
    MergeUnwarranted { left: String, right: String },

    #[error("unknown builtin {0:?}")]
    UnknownBuiltin(String),

    #[error("spec is partial; use sweep")]
    SpecIsPartial,

    #[error("spec is complete; nothing to sweep")]
    SpecIsComplete,

    #[error("{}", format_parse(.line, .message))]
    Parse {
        line: Option<usize>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl FidError {
    pub fn parse(line: Option<usize>, message: impl Into<String>) -> Self {
        FidError::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by the content of an input file rather than by
    /// the analysis that was requested on it.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            FidError::InvalidSpec(_)
                | FidError::Parse { .. }
                | FidError::Io(_)
                | FidError::DomainTooLarge { .. }
        )
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn format_parse(line: &Option<usize>, message: &str) -> String {
    match line {
        Some(l) => format!("line {l}: {message}"),
        None => message.to_string(),
    }
}
