//! Shared domain types: users, feedbacks, product aggregates, votes and
//! review sessions.
//!
//! Timestamps are integer UTC seconds. Identifiers are opaque strings chosen
//! by the caller and never interpreted.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DomainError;

/// UTC seconds since the Unix epoch.
pub type Timestamp = i64;

/// Lower bound of both trust degrees and feedback trustworthiness.
pub const TRUST_MIN: f64 = -10.0;
/// Upper bound of both trust degrees and feedback trustworthiness.
pub const TRUST_MAX: f64 = 10.0;
/// Every participant starts neutral.
pub const INITIAL_TRUST: f64 = 0.0;

pub const APPRECIATION_MIN: f64 = 1.0;
pub const APPRECIATION_MAX: f64 = 5.0;

/// Smallest and largest selection size a reviewer may ask for.
pub const MIN_SELECTION: usize = 4;
pub const MAX_SELECTION: usize = 10;

pub fn trust_in_range(value: f64) -> bool {
    (TRUST_MIN..=TRUST_MAX).contains(&value)
}

pub fn appreciation_in_range(value: f64) -> bool {
    (APPRECIATION_MIN..=APPRECIATION_MAX).contains(&value)
}

pub fn clamp_trust(value: f64) -> f64 {
    value.clamp(TRUST_MIN, TRUST_MAX)
}

/// A participant and their current trust degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub trust_degree: f64,
    #[serde(default)]
    pub blacklist_until: Option<Timestamp>,
    pub created_at: Timestamp,
}

impl UserRecord {
    pub fn new(user_id: impl Into<String>, created_at: Timestamp) -> Result<Self, DomainError> {
        let user_id = user_id.into();
        if user_id.trim().is_empty() {
            return Err(DomainError::EmptyId("user_id"));
        }
        Ok(Self {
            user_id,
            trust_degree: INITIAL_TRUST,
            blacklist_until: None,
            created_at,
        })
    }

    /// The blacklist window is half-open: `[start, blacklist_until)`.
    pub fn is_blacklisted(&self, now: Timestamp) -> bool {
        matches!(self.blacklist_until, Some(until) if now < until)
    }

    /// Seconds left on an active blacklist, if any.
    pub fn blacklist_remaining(&self, now: Timestamp) -> Option<i64> {
        self.blacklist_until
            .filter(|until| now < *until)
            .map(|until| until - now)
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        if self.user_id.trim().is_empty() {
            return Err(DomainError::EmptyId("user_id"));
        }
        if !trust_in_range(self.trust_degree) {
            return Err(DomainError::TrustOutOfRange(self.trust_degree));
        }
        if let Some(until) = self.blacklist_until {
            if until < self.created_at {
                return Err(DomainError::BlacklistBeforeCreation);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackCategory {
    Positive,
    Negative,
    Mitigated,
    Contradictory,
}

impl FeedbackCategory {
    /// Round-robin order used when building a selection.
    pub const ALL: [FeedbackCategory; 4] = [
        FeedbackCategory::Positive,
        FeedbackCategory::Negative,
        FeedbackCategory::Mitigated,
        FeedbackCategory::Contradictory,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeedbackCategory::Positive => "positive",
            FeedbackCategory::Negative => "negative",
            FeedbackCategory::Mitigated => "mitigated",
            FeedbackCategory::Contradictory => "contradictory",
        }
    }
}

impl fmt::Display for FeedbackCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeedbackCategory {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "positive" => Ok(FeedbackCategory::Positive),
            "negative" => Ok(FeedbackCategory::Negative),
            "mitigated" => Ok(FeedbackCategory::Mitigated),
            "contradictory" => Ok(FeedbackCategory::Contradictory),
            _ => Err(DomainError::UnknownCategory(s.to_string())),
        }
    }
}

/// A stored review together with the trustworthiness inherited from its
/// author.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub feedback_id: String,
    pub product_id: String,
    pub author_id: String,
    pub text: String,
    pub category: FeedbackCategory,
    pub trustworthiness: f64,
    pub created_at: Timestamp,
    pub appreciation: f64,
}

impl FeedbackRecord {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.feedback_id.trim().is_empty() {
            return Err(DomainError::EmptyId("feedback_id"));
        }
        if self.product_id.trim().is_empty() {
            return Err(DomainError::EmptyId("product_id"));
        }
        if self.author_id.trim().is_empty() {
            return Err(DomainError::EmptyId("author_id"));
        }
        if self.text.trim().is_empty() {
            return Err(DomainError::EmptyText);
        }
        if !trust_in_range(self.trustworthiness) {
            return Err(DomainError::TrustOutOfRange(self.trustworthiness));
        }
        if self.category == FeedbackCategory::Contradictory && self.trustworthiness != TRUST_MIN {
            return Err(DomainError::ContradictoryTrust(self.trustworthiness));
        }
        if !appreciation_in_range(self.appreciation) {
            return Err(DomainError::AppreciationOutOfRange(self.appreciation));
        }
        Ok(())
    }
}

/// Running trust-weighted sums for one product.
///
/// `weighted_sum` accumulates `appreciation * trust` and `coefficient_sum`
/// accumulates `trust` over every included rater. Only strictly positive
/// trust degrees are ever included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductAggregate {
    pub product_id: String,
    pub weighted_sum: f64,
    pub coefficient_sum: f64,
    pub rating_count: u64,
}

impl ProductAggregate {
    pub fn empty(product_id: impl Into<String>) -> Self {
        Self {
            product_id: product_id.into(),
            weighted_sum: 0.0,
            coefficient_sum: 0.0,
            rating_count: 0,
        }
    }

    /// `None` means the product is unrated.
    pub fn score(&self) -> Option<f64> {
        (self.rating_count > 0).then(|| self.weighted_sum / self.coefficient_sum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Choice {
    Like,
    Dislike,
}

impl FromStr for Choice {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "like" => Ok(Choice::Like),
            "dislike" => Ok(Choice::Dislike),
            _ => Err(DomainError::UnknownChoice(s.to_string())),
        }
    }
}

/// One like/dislike act on a served feedback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vote {
    pub session_id: String,
    pub user_id: String,
    pub feedback_id: String,
    pub choice: Choice,
    pub cast_at: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionState {
    Submitted,
    Rejected,
    Voting,
    Finalized,
}

impl SessionState {
    pub fn can_transition_to(self, next: SessionState) -> bool {
        matches!(
            (self, next),
            (SessionState::Submitted, SessionState::Rejected)
                | (SessionState::Submitted, SessionState::Voting)
                | (SessionState::Voting, SessionState::Finalized)
        )
    }
}

/// A reviewer's full interaction for one submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewSession {
    pub session_id: String,
    pub user_id: String,
    pub product_id: String,
    pub appreciation: f64,
    pub text: String,
    pub selection: Vec<String>,
    pub votes: Vec<Vote>,
    pub state: SessionState,
    /// Fewer feedbacks were in stock than requested.
    #[serde(default)]
    pub thin: bool,
    pub created_at: Timestamp,
}

impl ReviewSession {
    pub fn has_vote_for(&self, feedback_id: &str) -> bool {
        self.votes.iter().any(|v| v.feedback_id == feedback_id)
    }

    /// Served feedbacks still waiting for a vote, in selection order.
    pub fn unvoted(&self) -> Vec<String> {
        self.selection
            .iter()
            .filter(|id| !self.has_vote_for(id))
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_user_is_neutral() {
        let user = UserRecord::new("u1", 100).unwrap();
        assert_eq!(user.trust_degree, 0.0);
        assert_eq!(user.blacklist_until, None);
        assert!(!user.is_blacklisted(100));
    }

    #[test]
    fn empty_user_id_rejected() {
        assert!(UserRecord::new("", 0).is_err());
        assert!(UserRecord::new("   ", 0).is_err());
    }

    #[test]
    fn blacklist_window_is_half_open() {
        let mut user = UserRecord::new("u1", 0).unwrap();
        user.blacklist_until = Some(1000);
        assert!(user.is_blacklisted(0));
        assert!(user.is_blacklisted(999));
        assert!(!user.is_blacklisted(1000));
        assert_eq!(user.blacklist_remaining(990), Some(10));
        assert_eq!(user.blacklist_remaining(1000), None);
    }

    fn feedback(category: FeedbackCategory, trust: f64) -> FeedbackRecord {
        FeedbackRecord {
            feedback_id: "f1".into(),
            product_id: "p1".into(),
            author_id: "a".into(),
            text: "fine".into(),
            category,
            trustworthiness: trust,
            created_at: 0,
            appreciation: 3.0,
        }
    }

    #[test]
    fn contradictory_feedback_must_sit_at_the_floor() {
        assert!(feedback(FeedbackCategory::Contradictory, -10.0)
            .validate()
            .is_ok());
        assert!(matches!(
            feedback(FeedbackCategory::Contradictory, -3.0).validate(),
            Err(DomainError::ContradictoryTrust(_))
        ));
        assert!(matches!(
            feedback(FeedbackCategory::Positive, 11.0).validate(),
            Err(DomainError::TrustOutOfRange(_))
        ));
    }

    #[test]
    fn state_machine_edges() {
        use SessionState::*;
        assert!(Submitted.can_transition_to(Voting));
        assert!(Submitted.can_transition_to(Rejected));
        assert!(Voting.can_transition_to(Finalized));
        assert!(!Rejected.can_transition_to(Voting));
        assert!(!Finalized.can_transition_to(Voting));
        assert!(!Voting.can_transition_to(Rejected));
    }

    #[test]
    fn unrated_aggregate_has_no_score() {
        assert_eq!(ProductAggregate::empty("p").score(), None);
    }
}
