use alloc::string::String;

use crate::kb::EntryId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("span {start}..{end} out of bounds for document of {len} tokens")]
    SpanOutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("mention of {len} tokens cannot fit a {limit}-token window")]
    MentionTooLong { len: usize, limit: usize },
    #[error("rate {0} outside [0, 1]")]
    InvalidRate(f64),
    #[error("split ratios must be nonnegative and sum to 1, got {0}")]
    InvalidRatios(String),
    #[error("entry {0} has no annotated answer")]
    Unannotated(EntryId),
    #[error("annotation session needs exactly 3 distinct annotators and a distinct expert: {0}")]
    InvalidAnnotators(String),
    #[error("unknown annotator {0:?}")]
    UnknownAnnotator(String),
    #[error("{0:?} is not the session expert")]
    NotExpert(String),
    #[error("unknown entry {0}")]
    UnknownEntry(EntryId),
    #[error("choice {choice:?} is not a candidate of entry {entry}")]
    InvalidChoice { entry: EntryId, choice: String },
    #[error("NIL choice on entry {0} needs a NIL pattern")]
    MissingNilPattern(EntryId),
    #[error("entry {entry} is {status}, only disputed entries can be adjudicated")]
    NotDisputed {
        entry: EntryId,
        status: &'static str,
    },
    #[error("entry {0} is already adjudicated")]
    AlreadyAdjudicated(EntryId),
    #[error("session incomplete: {missing} annotations missing over {entries} entries")]
    IncompleteSession { missing: usize, entries: usize },
    #[error("cannot evaluate an empty split")]
    EmptySplit,
    #[error("training split is empty")]
    EmptyTrainingSet,
    #[error("non-finite loss in epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parameter shape mismatch: {0}")]
    Shape(String),
}
