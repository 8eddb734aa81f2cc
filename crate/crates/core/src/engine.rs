//! Reputation pipeline.
//!
//! A review runs through six steps: the appreciation/text concordance gate,
//! selection of fresh prefabricated feedbacks, per-click gathering of the
//! voted feedback's trustworthiness and the voter's current trust, the
//! trust-degree update, clamping to `[-10, 10]`, and the trust-weighted
//! product score update.
//!
//! The delta table works on `m = |trustworthiness|` with half-open bands
//! `(lo, hi]`:
//!
//! | m          | delta |
//! |------------|-------|
//! | (0, 3]     | 0.25  |
//! | (3, 5]     | 0.5   |
//! | (5, 7]     | 0.75  |
//! | (7, 8]     | 1     |
//! | (8, 9]     | 1.5   |
//! | (9, 10]    | 2     |
//!
//! Liking a trustworthy feedback or disliking an untrustworthy one earns
//! `+delta`; the opposite costs `-delta`. A zero-trust feedback carries no
//! evidence. Liking a feedback at exactly `-10` (a contradictory one) drops
//! the voter straight to `-10`.

use serde::{Deserialize, Serialize};

use crate::domain::{
    appreciation_in_range, clamp_trust, trust_in_range, Choice, FeedbackCategory, FeedbackRecord,
    ProductAggregate, ReviewSession, SessionState, Timestamp, UserRecord, Vote, MAX_SELECTION,
    MIN_SELECTION, TRUST_MIN,
};
use crate::error::{DomainError, EngineError, StoreError};
use crate::journal::JournalEntry;
use crate::store::{KnowledgeBase, Store, DEFAULT_BLACKLIST_TTL};
use crate::text::{self, Lexicon};

/// Selection size used when the caller does not pick one.
pub const DEFAULT_SELECTION: usize = 6;

const BANDS: [(f64, f64); 6] = [
    (3.0, 0.25),
    (5.0, 0.5),
    (7.0, 0.75),
    (8.0, 1.0),
    (9.0, 1.5),
    (10.0, 2.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "amount", rename_all = "lowercase")]
pub enum TrustAdjustment {
    /// Added to the current trust, then clamped.
    Delta(f64),
    /// Replaces the current trust outright.
    Override(f64),
}

/// Reward magnitude for a feedback of absolute trustworthiness `m`.
fn band_delta(m: f64) -> f64 {
    BANDS
        .iter()
        .find(|(hi, _)| m <= *hi)
        .map(|(_, d)| *d)
        .unwrap_or(2.0)
}

pub fn trust_adjustment(
    feedtrustworth: f64,
    choice: Choice,
) -> Result<TrustAdjustment, EngineError> {
    if !trust_in_range(feedtrustworth) {
        return Err(DomainError::TrustOutOfRange(feedtrustworth).into());
    }
    if feedtrustworth == TRUST_MIN && choice == Choice::Like {
        return Ok(TrustAdjustment::Override(TRUST_MIN));
    }
    if feedtrustworth == 0.0 {
        return Ok(TrustAdjustment::Delta(0.0));
    }
    let delta = band_delta(feedtrustworth.abs());
    let aligned = match choice {
        Choice::Like => feedtrustworth > 0.0,
        Choice::Dislike => feedtrustworth < 0.0,
    };
    Ok(TrustAdjustment::Delta(if aligned { delta } else { -delta }))
}

pub fn apply_adjustment(trust_before: f64, adjustment: TrustAdjustment) -> f64 {
    match adjustment {
        TrustAdjustment::Override(value) => value,
        TrustAdjustment::Delta(amount) => clamp_trust(trust_before + amount),
    }
}

/// Folds one rating into the running sums. A non-positive trust `b` leaves
/// the aggregate untouched.
pub fn update_product_score(
    aggregate: &ProductAggregate,
    appreciation: f64,
    trust: f64,
) -> Result<(ProductAggregate, Option<f64>), EngineError> {
    if !appreciation_in_range(appreciation) {
        return Err(DomainError::AppreciationOutOfRange(appreciation).into());
    }
    if !trust_in_range(trust) {
        return Err(DomainError::TrustOutOfRange(trust).into());
    }
    if trust <= 0.0 {
        return Ok((aggregate.clone(), aggregate.score()));
    }
    let next = ProductAggregate {
        product_id: aggregate.product_id.clone(),
        weighted_sum: aggregate.weighted_sum + appreciation * trust,
        coefficient_sum: aggregate.coefficient_sum + trust,
        rating_count: aggregate.rating_count + 1,
    };
    let score = next.score();
    Ok((next, score))
}

/// The three values gathered when a reviewer clicks like or dislike.
#[derive(Debug, Clone, PartialEq)]
pub struct ClickInfo {
    pub feedtrustworth: f64,
    pub choice: Choice,
    pub trust_before: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteOutcome {
    pub user_id: String,
    pub feedback_id: String,
    pub choice: Choice,
    pub feedtrustworth: f64,
    pub adjustment: TrustAdjustment,
    pub trust_before: f64,
    pub trust_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub session_id: String,
    pub feedback_id: String,
    pub category: FeedbackCategory,
    pub final_trust: f64,
    pub feedback_trustworthiness: f64,
    pub score_included: bool,
    pub new_product_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub blacklist_ttl: i64,
    pub default_k: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            blacklist_ttl: DEFAULT_BLACKLIST_TTL,
            default_k: DEFAULT_SELECTION,
        }
    }
}

/// Id under which a finalized session's own review is stored.
pub fn review_feedback_id(session_id: &str) -> String {
    format!("{session_id}-review")
}

#[derive(Debug)]
pub struct Engine {
    kb: KnowledgeBase,
    lexicon: Lexicon,
    config: EngineConfig,
}

impl Engine {
    pub fn new(kb: KnowledgeBase, lexicon: Lexicon, config: EngineConfig) -> Self {
        Self {
            kb,
            lexicon,
            config,
        }
    }

    pub fn in_memory(lexicon: Lexicon) -> Self {
        Self::new(KnowledgeBase::in_memory(), lexicon, EngineConfig::default())
    }

    pub fn store(&self) -> &Store {
        self.kb.store()
    }

    pub fn knowledge_base(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn knowledge_base_mut(&mut self) -> &mut KnowledgeBase {
        &mut self.kb
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn new_user(&mut self, user_id: &str, now: Timestamp) -> Result<UserRecord, EngineError> {
        Ok(self.kb.new_user(user_id, now)?)
    }

    pub fn store_feedback(&mut self, record: FeedbackRecord) -> Result<String, EngineError> {
        Ok(self.kb.store_feedback(record)?)
    }

    fn next_session_id(&self) -> String {
        format!("s{:06}", self.store().sessions.len() + 1)
    }

    /// Runs the concordance gate and, when it passes, serves a selection.
    ///
    /// A discordant pair is not an error: the session comes back `Rejected`
    /// and the user is blacklisted for the configured TTL.
    pub fn submit_review(
        &mut self,
        user_id: &str,
        product_id: &str,
        appreciation: f64,
        text: &str,
        k: Option<usize>,
        now: Timestamp,
    ) -> Result<ReviewSession, EngineError> {
        let user = self.store().user(user_id)?;
        if let Some(remaining) = user.blacklist_remaining(now) {
            return Err(EngineError::Blacklisted {
                user_id: user_id.to_string(),
                remaining_seconds: remaining,
                until: now + remaining,
            });
        }
        if product_id.trim().is_empty() {
            return Err(DomainError::EmptyId("product_id").into());
        }
        let k = k.unwrap_or(self.config.default_k);
        if !(MIN_SELECTION..=MAX_SELECTION).contains(&k) {
            return Err(StoreError::InvalidSelectionSize(k).into());
        }
        let concordant = text::test_concordance(appreciation, text, &self.lexicon)?;

        let mut session = ReviewSession {
            session_id: self.next_session_id(),
            user_id: user_id.to_string(),
            product_id: product_id.to_string(),
            appreciation,
            text: text.to_string(),
            selection: Vec::new(),
            votes: Vec::new(),
            state: SessionState::Submitted,
            thin: false,
            created_at: now,
        };

        if !concordant {
            session.state = SessionState::Rejected;
            self.kb.commit(vec![
                JournalEntry::Session(session.clone()),
                JournalEntry::Blacklist {
                    user_id: user_id.to_string(),
                    blacklist_until: now + self.config.blacklist_ttl,
                },
            ])?;
            return Ok(session);
        }

        let selection = self.kb.select_prefabricated(product_id, k, Some(user_id))?;
        session.selection = selection
            .feedbacks
            .iter()
            .map(|f| f.feedback_id.clone())
            .collect();
        session.thin = selection.thin;
        session.state = SessionState::Voting;
        self.kb
            .commit(vec![JournalEntry::Session(session.clone())])?;
        Ok(session)
    }

    /// Collects the voted feedback's trustworthiness and the voter's current
    /// trust degree.
    pub fn click_info(
        &self,
        user_id: &str,
        feedback_id: &str,
        choice: Choice,
    ) -> Result<ClickInfo, EngineError> {
        Ok(ClickInfo {
            feedtrustworth: self.store().feedback(feedback_id)?.trustworthiness,
            choice,
            trust_before: self.store().user(user_id)?.trust_degree,
        })
    }

    pub fn process_vote(
        &mut self,
        session_id: &str,
        user_id: &str,
        feedback_id: &str,
        choice: Choice,
        now: Timestamp,
    ) -> Result<VoteOutcome, EngineError> {
        let store = self.store();
        let session = store.session(session_id)?;
        let user = store.user(user_id)?;
        store.feedback(feedback_id)?;
        if session.user_id != user_id {
            return Err(EngineError::SessionOwner {
                session_id: session_id.to_string(),
            });
        }
        if session.state != SessionState::Voting {
            return Err(EngineError::SessionState {
                session_id: session_id.to_string(),
                state: session.state,
                expected: SessionState::Voting,
            });
        }
        if !session.selection.iter().any(|id| id == feedback_id) {
            return Err(EngineError::NotInSelection {
                session_id: session_id.to_string(),
                feedback_id: feedback_id.to_string(),
            });
        }
        if session.has_vote_for(feedback_id) {
            return Err(EngineError::DuplicateVote {
                user_id: user_id.to_string(),
                feedback_id: feedback_id.to_string(),
            });
        }

        let info = self.click_info(user_id, feedback_id, choice)?;
        let adjustment = trust_adjustment(info.feedtrustworth, choice)?;
        let trust_after = apply_adjustment(info.trust_before, adjustment);
        let mut updated = user.clone();
        updated.trust_degree = trust_after;

        self.kb.commit(vec![
            JournalEntry::Vote(Vote {
                session_id: session_id.to_string(),
                user_id: user_id.to_string(),
                feedback_id: feedback_id.to_string(),
                choice,
                cast_at: now,
            }),
            JournalEntry::User(updated),
        ])?;

        Ok(VoteOutcome {
            user_id: user_id.to_string(),
            feedback_id: feedback_id.to_string(),
            choice,
            feedtrustworth: info.feedtrustworth,
            adjustment,
            trust_before: info.trust_before,
            trust_after,
        })
    }

    /// Stores the reviewer's own feedback at their final trust degree,
    /// propagates that degree to their earlier feedbacks and folds the
    /// appreciation into the product score when the trust is positive.
    /// Everything lands in one journal transaction whose last record is the
    /// finalized session.
    pub fn finalize_session(
        &mut self,
        session_id: &str,
        now: Timestamp,
    ) -> Result<SessionOutcome, EngineError> {
        let store = self.store();
        let session = store.session(session_id)?;
        if session.state != SessionState::Voting {
            return Err(EngineError::SessionState {
                session_id: session_id.to_string(),
                state: session.state,
                expected: SessionState::Voting,
            });
        }
        let unvoted = session.unvoted();
        if !unvoted.is_empty() {
            return Err(EngineError::IncompleteVotes {
                session_id: session_id.to_string(),
                unvoted,
            });
        }
        let feedback_id = review_feedback_id(session_id);
        if store.feedbacks.contains_key(&feedback_id) {
            return Err(StoreError::DuplicateFeedback(feedback_id).into());
        }

        let final_trust = store.user(&session.user_id)?.trust_degree;
        let category = text::classify_feedback(&session.text, &self.lexicon)?;
        let feedback_trustworthiness = if category == FeedbackCategory::Contradictory {
            TRUST_MIN
        } else {
            final_trust
        };

        let mut entries = Vec::new();
        for earlier in store.feedbacks_by_author(&session.user_id) {
            if earlier.category != FeedbackCategory::Contradictory
                && earlier.trustworthiness != final_trust
            {
                let mut refreshed = earlier.clone();
                refreshed.trustworthiness = final_trust;
                entries.push(JournalEntry::Feedback(refreshed));
            }
        }
        entries.push(JournalEntry::Feedback(FeedbackRecord {
            feedback_id: feedback_id.clone(),
            product_id: session.product_id.clone(),
            author_id: session.user_id.clone(),
            text: session.text.clone(),
            category,
            trustworthiness: feedback_trustworthiness,
            created_at: now,
            appreciation: session.appreciation,
        }));

        let before = store.aggregate(&session.product_id);
        let (after, new_product_score) =
            update_product_score(&before, session.appreciation, final_trust)?;
        let score_included = final_trust > 0.0;
        if score_included {
            entries.push(JournalEntry::Aggregate(after));
        }

        let mut finalized = session.clone();
        finalized.state = SessionState::Finalized;
        entries.push(JournalEntry::Session(finalized));
        self.kb.commit(entries)?;

        Ok(SessionOutcome {
            session_id: session_id.to_string(),
            feedback_id,
            category,
            final_trust,
            feedback_trustworthiness,
            score_included,
            new_product_score,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use TrustAdjustment::*;

    #[test]
    fn anchored_adjustments() {
        assert_eq!(trust_adjustment(9.5, Choice::Like).unwrap(), Delta(2.0));
        assert_eq!(trust_adjustment(4.0, Choice::Dislike).unwrap(), Delta(-0.5));
        assert_eq!(
            trust_adjustment(-10.0, Choice::Like).unwrap(),
            Override(-10.0)
        );
        assert_eq!(
            trust_adjustment(-2.0, Choice::Dislike).unwrap(),
            Delta(0.25)
        );
        assert_eq!(trust_adjustment(0.0, Choice::Like).unwrap(), Delta(0.0));
        assert_eq!(trust_adjustment(0.0, Choice::Dislike).unwrap(), Delta(0.0));
    }

    #[test]
    fn band_edges_are_upper_inclusive() {
        assert_eq!(trust_adjustment(3.0, Choice::Like).unwrap(), Delta(0.25));
        assert_eq!(
            trust_adjustment(3.0, Choice::Dislike).unwrap(),
            Delta(-0.25)
        );
        assert_eq!(
            trust_adjustment(-3.0, Choice::Dislike).unwrap(),
            Delta(0.25)
        );
        assert_eq!(trust_adjustment(5.0, Choice::Like).unwrap(), Delta(0.5));
        assert_eq!(trust_adjustment(7.0, Choice::Like).unwrap(), Delta(0.75));
        assert_eq!(trust_adjustment(8.0, Choice::Like).unwrap(), Delta(1.0));
        assert_eq!(trust_adjustment(9.0, Choice::Like).unwrap(), Delta(1.5));
        assert_eq!(trust_adjustment(10.0, Choice::Like).unwrap(), Delta(2.0));
        assert_eq!(
            trust_adjustment(10.0, Choice::Dislike).unwrap(),
            Delta(-2.0)
        );
        assert_eq!(
            trust_adjustment(-10.0, Choice::Dislike).unwrap(),
            Delta(2.0)
        );
        assert_eq!(trust_adjustment(-9.5, Choice::Like).unwrap(), Delta(-2.0));
    }

    #[test]
    fn out_of_range_trustworthiness_rejected() {
        for ft in [10.01, -10.01, f64::NAN, f64::INFINITY] {
            assert!(trust_adjustment(ft, Choice::Like).is_err());
        }
    }

    #[test]
    fn clamp_examples() {
        assert_eq!(apply_adjustment(9.5, Delta(2.0)), 10.0);
        assert_eq!(apply_adjustment(-9.8, Delta(-0.5)), -10.0);
        assert_eq!(apply_adjustment(0.0, Delta(0.25)), 0.25);
        assert_eq!(apply_adjustment(7.0, Override(-10.0)), -10.0);
    }

    #[test]
    fn aggregate_examples() {
        let empty = ProductAggregate::empty("p");
        let (agg, score) = update_product_score(&empty, 4.0, 5.0).unwrap();
        assert_eq!(score, Some(4.0));
        assert_eq!(agg.rating_count, 1);

        let base = ProductAggregate {
            product_id: "p".into(),
            weighted_sum: 6.0,
            coefficient_sum: 2.0,
            rating_count: 1,
        };
        let (agg, score) = update_product_score(&base, 5.0, 8.0).unwrap();
        assert_eq!((agg.weighted_sum, agg.coefficient_sum), (46.0, 10.0));
        assert_eq!(score, Some(4.6));

        let (agg, score) = update_product_score(&base, 5.0, -1.0).unwrap();
        assert_eq!(agg, base);
        assert_eq!(score, Some(3.0));

        let (agg, score) = update_product_score(&empty, 5.0, 0.0).unwrap();
        assert_eq!(agg, empty);
        assert_eq!(score, None);

        assert!(update_product_score(&base, 5.5, 1.0).is_err());
        assert!(update_product_score(&base, 0.5, 1.0).is_err());
    }
}
