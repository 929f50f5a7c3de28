use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("line count mismatch {source_lines} vs {target_lines}")]
    LineCountMismatch { source_lines: usize, target_lines: usize },

    #[error("line {line}: {message}")]
    EmptyLine { line: usize, message: String },

    #[error("empty inventory")]
    EmptyInventory,

    #[error("invalid connective `{surface}`: {reason}")]
    InvalidConnective { surface: String, reason: &'static str },

    #[error("invalid relation label `{0}`: labels must be non-empty and contain no whitespace or `-`")]
    InvalidRelationLabel(String),

    #[error("line {line}: unknown relation label `{label}`")]
    UnknownRelation { line: usize, label: String },

    #[error("record {record}: {message}")]
    InvalidAnnotation { record: usize, message: String },

    #[error("no default sense for connective `{0}`")]
    MissingDefaultSense(String),

    #[error("iterations must be at least 1")]
    ZeroIterations,

    #[error("cannot train on an empty corpus")]
    EmptyCorpus,

    #[error("sentence {0} has an empty side")]
    EmptySentence(usize),

    #[error("malformed fused token `{0}`")]
    MalformedFusedToken(String),

    #[error("connective `{0}` has aligned records but zero corpus frequency")]
    ZeroFrequency(String),

    #[error("empty gold set")]
    EmptyGold,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
