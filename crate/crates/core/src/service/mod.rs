//! The request lifecycle behind the JSON API, plus its HTTP binding and on-disk logs.

mod engine;
pub mod envelope;
pub mod http;
pub mod store;

pub use engine::{
    audit, capability_text, AuditError, Clock, Engine, EngineConfig, ManualClock, Message, PendingStatus,
    ServiceError, SystemClock, MAX_COMMENT_CHARS, MAX_TEXT_BYTES,
};
pub use envelope::*;
pub use store::{FeedbackRecord, RetainedQuestion, Store};
