//! Functional Information Decomposition for discrete functions.
//!
//! A function is a table mapping every assignment of its discrete inputs to
//! a distribution over a discrete output. Under a uniform input measure the
//! information the inputs carry about the output splits into per-input
//! independent information, per-input solo-synergy and whole-system
//! synergy. Partially specified functions are handled by sweeping over
//! their completions.

pub mod builtin;
pub mod completion;
pub mod decomposition;
pub mod error;
pub mod formats;
pub mod info;
pub mod model;
pub mod observation;
pub mod structure;

pub use builtin::{gen_builtin, or_xor_partial, Builtin};
pub use completion::{sweep, CompletionCloud, CompletionConfig, CompletionKind, CompletionSample};
pub use decomposition::{
    decompose, join_inputs, verify_no_redundancy, FidReport, InvariantViolation,
};
pub use error::{FidError, Result};
pub use info::{entropy, mutual_information};
pub use model::{
    build_joint, marginal, AnySpec, Coord, Domain, FunctionSpec, JointDistribution,
    OutputDistribution, PartialFunctionSpec, SpecDraft, Variable,
};
pub use observation::{ingest, ObservationTable};
pub use structure::{
    analyze_structure, merge_degenerate, merge_dependent_inputs, InjectivityClass,
};
