//! Trust-degree reputation engine for product reviews.
//!
//! Reviewers earn or lose trust by liking and disliking prefabricated
//! feedbacks of known trustworthiness; their trust then weights their own
//! rating in the product's score and becomes the trustworthiness of their
//! review.

pub mod domain;
pub mod engine;
pub mod error;
pub mod journal;
pub mod sim;
pub mod store;
pub mod text;

pub use domain::{
    Choice, FeedbackCategory, FeedbackRecord, ProductAggregate, ReviewSession, SessionState,
    Timestamp, UserRecord, Vote,
};
pub use engine::{
    apply_adjustment, trust_adjustment, update_product_score, Engine, EngineConfig, SessionOutcome,
    TrustAdjustment, VoteOutcome,
};
pub use error::{DomainError, EngineError, SimError, StoreError, TextError};
pub use store::{load_store, KnowledgeBase, Selection, Store};
pub use text::{classify_feedback, sentiment_score, test_concordance, Lexicon, SentimentReport};
