use std::io;

use thiserror::Error;

use crate::domain::{SessionState, Timestamp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("{0} must not be empty")]
    EmptyId(&'static str),
    #[error("text must not be empty")]
    EmptyText,
    #[error("trust value {0} outside [-10, 10]")]
    TrustOutOfRange(f64),
    #[error("contradictory feedback must carry trustworthiness -10, got {0}")]
    ContradictoryTrust(f64),
    #[error("appreciation {0} outside [1, 5]")]
    AppreciationOutOfRange(f64),
    #[error("blacklist end precedes account creation")]
    BlacklistBeforeCreation,
    #[error("unknown feedback category {0:?}")]
    UnknownCategory(String),
    #[error("unknown vote choice {0:?}")]
    UnknownChoice(String),
}

#[derive(Debug, Error)]
pub enum TextError {
    #[error("text has no content to analyse")]
    EmptyText,
    #[error("appreciation {0} outside [1, 5]")]
    AppreciationOutOfRange(f64),
    #[error("lexicon line {line}: {reason}")]
    LexiconSyntax { line: usize, reason: String },
    #[error("lexicon has no entries")]
    EmptyLexicon,
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Invalid(#[from] DomainError),
    #[error("user {0} already exists")]
    DuplicateUser(String),
    #[error("feedback {0} already exists")]
    DuplicateFeedback(String),
    #[error("unknown user {0}")]
    UnknownUser(String),
    #[error("unknown feedback {0}")]
    UnknownFeedback(String),
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("selection size {0} outside [4, 10]")]
    InvalidSelectionSize(usize),
    #[error("blacklist ttl must be positive, got {0}")]
    InvalidTtl(i64),
    #[error("journal line {line}: {reason}")]
    CorruptJournal { line: usize, reason: String },
    #[error("journal io: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Invalid(#[from] DomainError),
    #[error("user {user_id} is blacklisted for another {remaining_seconds}s")]
    Blacklisted {
        user_id: String,
        remaining_seconds: i64,
        until: Timestamp,
    },
    #[error("user {user_id} already voted on feedback {feedback_id}")]
    DuplicateVote {
        user_id: String,
        feedback_id: String,
    },
    #[error("feedback {feedback_id} was not served in session {session_id}")]
    NotInSelection {
        session_id: String,
        feedback_id: String,
    },
    #[error("session {session_id} belongs to another user")]
    SessionOwner { session_id: String },
    #[error("session {session_id} is {state:?}, expected {expected:?}")]
    SessionState {
        session_id: String,
        state: SessionState,
        expected: SessionState,
    },
    #[error("session {session_id} has unvoted feedbacks: {}", unvoted.join(", "))]
    IncompleteVotes {
        session_id: String,
        unvoted: Vec<String>,
    },
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error("unknown report format {0:?}")]
    UnknownFormat(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("config parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
