//! Knowledge base: users, categorized feedbacks, product aggregates, review
//! sessions and the blacklist, with every change written ahead to a journal.
//!
//! The in-memory [`Store`] is a pure function of the committed journal
//! transactions. [`KnowledgeBase`] is the single writer: it validates a
//! change, appends it to the journal and only then applies it.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::domain::{
    FeedbackCategory, FeedbackRecord, ProductAggregate, ReviewSession, Timestamp, UserRecord,
    MAX_SELECTION, MIN_SELECTION,
};
use crate::error::{DomainError, StoreError};
use crate::journal::{self, JournalEntry, JournalSink};

/// Default blacklist duration: 24 hours.
pub const DEFAULT_BLACKLIST_TTL: i64 = 86_400;

type FreshnessKey = (Reverse<Timestamp>, String);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Store {
    pub users: BTreeMap<String, UserRecord>,
    pub feedbacks: BTreeMap<String, FeedbackRecord>,
    pub aggregates: BTreeMap<String, ProductAggregate>,
    pub sessions: BTreeMap<String, ReviewSession>,
    // newest first, ties by feedback_id ascending
    by_product: BTreeMap<String, BTreeMap<FeedbackCategory, BTreeSet<FreshnessKey>>>,
    by_author: BTreeMap<String, BTreeSet<String>>,
}

/// Feedbacks served to a reviewer.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub feedbacks: Vec<FeedbackRecord>,
    /// Fewer feedbacks were available than requested.
    pub thin: bool,
}

impl Store {
    pub fn user(&self, user_id: &str) -> Result<&UserRecord, StoreError> {
        self.users
            .get(user_id)
            .ok_or_else(|| StoreError::UnknownUser(user_id.to_string()))
    }

    pub fn feedback(&self, feedback_id: &str) -> Result<&FeedbackRecord, StoreError> {
        self.feedbacks
            .get(feedback_id)
            .ok_or_else(|| StoreError::UnknownFeedback(feedback_id.to_string()))
    }

    pub fn session(&self, session_id: &str) -> Result<&ReviewSession, StoreError> {
        self.sessions
            .get(session_id)
            .ok_or_else(|| StoreError::UnknownSession(session_id.to_string()))
    }

    /// The product's aggregate, or an empty one for unknown products.
    pub fn aggregate(&self, product_id: &str) -> ProductAggregate {
        self.aggregates
            .get(product_id)
            .cloned()
            .unwrap_or_else(|| ProductAggregate::empty(product_id))
    }

    pub fn feedbacks_by_author(&self, author_id: &str) -> impl Iterator<Item = &FeedbackRecord> {
        self.by_author
            .get(author_id)
            .into_iter()
            .flatten()
            .filter_map(|id| self.feedbacks.get(id))
    }

    /// Product feedbacks, optionally restricted to one category, newest first.
    pub fn feedbacks_for_product(
        &self,
        product_id: &str,
        category: Option<FeedbackCategory>,
    ) -> Vec<&FeedbackRecord> {
        let Some(by_cat) = self.by_product.get(product_id) else {
            return Vec::new();
        };
        let mut out: Vec<&FeedbackRecord> = by_cat
            .iter()
            .filter(|(c, _)| category.is_none_or(|want| want == **c))
            .flat_map(|(_, keys)| keys.iter())
            .filter_map(|(_, id)| self.feedbacks.get(id))
            .collect();
        out.sort_by(|a, b| {
            b.created_at
                .cmp(&a.created_at)
                .then_with(|| a.feedback_id.cmp(&b.feedback_id))
        });
        out
    }

    pub fn is_blacklisted(&self, user_id: &str, now: Timestamp) -> Result<bool, StoreError> {
        Ok(self.user(user_id)?.is_blacklisted(now))
    }

    /// Round-robin over the four categories in fixed order, freshest first
    /// within each, skipping the requester's own feedbacks.
    pub fn select_prefabricated(
        &self,
        product_id: &str,
        k: usize,
        requester: Option<&str>,
    ) -> Result<Selection, StoreError> {
        if !(MIN_SELECTION..=MAX_SELECTION).contains(&k) {
            return Err(StoreError::InvalidSelectionSize(k));
        }
        let Some(by_cat) = self.by_product.get(product_id) else {
            return Ok(Selection {
                feedbacks: Vec::new(),
                thin: true,
            });
        };
        let mut queues: Vec<_> = FeedbackCategory::ALL
            .iter()
            .filter_map(|c| by_cat.get(c))
            .map(|keys| {
                keys.iter()
                    .filter_map(|(_, id)| self.feedbacks.get(id))
                    .filter(|f| requester != Some(f.author_id.as_str()))
            })
            .collect();

        let mut picked = Vec::with_capacity(k);
        'fill: loop {
            let mut progressed = false;
            for queue in queues.iter_mut() {
                if picked.len() == k {
                    break 'fill;
                }
                if let Some(f) = queue.next() {
                    picked.push(f.clone());
                    progressed = true;
                }
            }
            if !progressed {
                break;
            }
        }
        let thin = picked.len() < k;
        Ok(Selection {
            feedbacks: picked,
            thin,
        })
    }

    fn index_feedback(&mut self, record: &FeedbackRecord) {
        self.by_product
            .entry(record.product_id.clone())
            .or_default()
            .entry(record.category)
            .or_default()
            .insert((Reverse(record.created_at), record.feedback_id.clone()));
        self.by_author
            .entry(record.author_id.clone())
            .or_default()
            .insert(record.feedback_id.clone());
    }

    fn unindex_feedback(&mut self, record: &FeedbackRecord) {
        if let Some(keys) = self
            .by_product
            .get_mut(&record.product_id)
            .and_then(|m| m.get_mut(&record.category))
        {
            keys.remove(&(Reverse(record.created_at), record.feedback_id.clone()));
        }
        if let Some(ids) = self.by_author.get_mut(&record.author_id) {
            ids.remove(&record.feedback_id);
        }
    }

    /// Applies one committed change record. Records are upserts except
    /// `vote`, which appends to its session.
    pub fn apply(&mut self, entry: &JournalEntry) -> Result<(), StoreError> {
        match entry {
            JournalEntry::User(user) => {
                self.users.insert(user.user_id.clone(), user.clone());
            }
            JournalEntry::Feedback(record) => {
                if let Some(old) = self.feedbacks.get(&record.feedback_id).cloned() {
                    self.unindex_feedback(&old);
                }
                self.index_feedback(record);
                self.feedbacks
                    .insert(record.feedback_id.clone(), record.clone());
            }
            JournalEntry::Vote(vote) => {
                let session = self
                    .sessions
                    .get_mut(&vote.session_id)
                    .ok_or_else(|| StoreError::UnknownSession(vote.session_id.clone()))?;
                session.votes.push(vote.clone());
            }
            JournalEntry::Aggregate(agg) => {
                self.aggregates.insert(agg.product_id.clone(), agg.clone());
            }
            JournalEntry::Session(session) => {
                self.sessions
                    .insert(session.session_id.clone(), session.clone());
            }
            JournalEntry::Blacklist {
                user_id,
                blacklist_until,
            } => {
                let user = self
                    .users
                    .get_mut(user_id)
                    .ok_or_else(|| StoreError::UnknownUser(user_id.clone()))?;
                user.blacklist_until = Some(*blacklist_until);
            }
        }
        Ok(())
    }

    /// Rebuilds a store from journal text.
    pub fn replay(reader: impl std::io::BufRead) -> Result<(Store, u64), StoreError> {
        let replay = journal::read_transactions(reader)?;
        let mut store = Store::default();
        for txn in &replay.transactions {
            for entry in txn {
                store.apply(entry)?;
            }
        }
        Ok((store, replay.last_txn))
    }
}

/// Reads a journal file; an absent file yields an empty store.
pub fn load_store(path: impl AsRef<Path>) -> Result<Store, StoreError> {
    match journal::open_reader(path.as_ref())? {
        Some(reader) => Store::replay(reader).map(|(s, _)| s),
        None => Ok(Store::default()),
    }
}

/// The single writer over a [`Store`] and its journal.
#[derive(Debug)]
pub struct KnowledgeBase {
    store: Store,
    sink: JournalSink,
    last_txn: u64,
}

impl KnowledgeBase {
    pub fn in_memory() -> Self {
        Self {
            store: Store::default(),
            sink: JournalSink::memory(),
            last_txn: 0,
        }
    }

    /// Replays `path` (if present) and appends further changes to it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let (store, last_txn) = match journal::open_reader(path)? {
            Some(reader) => Store::replay(reader)?,
            None => (Store::default(), 0),
        };
        Ok(Self {
            store,
            sink: JournalSink::append_to(path)?,
            last_txn,
        })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn journal_text(&self) -> Result<String, StoreError> {
        Ok(self.sink.contents()?)
    }

    fn check(&self, entry: &JournalEntry, earlier: &[JournalEntry]) -> Result<(), StoreError> {
        match entry {
            JournalEntry::User(u) => u.validate()?,
            JournalEntry::Feedback(f) => f.validate()?,
            JournalEntry::Aggregate(a) => {
                let consistent = if a.rating_count == 0 {
                    a.weighted_sum == 0.0 && a.coefficient_sum == 0.0
                } else {
                    a.coefficient_sum > 0.0
                };
                if !consistent {
                    return Err(StoreError::Invalid(DomainError::TrustOutOfRange(
                        a.coefficient_sum,
                    )));
                }
            }
            JournalEntry::Vote(v) => {
                let session_known = self.store.sessions.contains_key(&v.session_id)
                    || earlier.iter().any(
                        |e| matches!(e, JournalEntry::Session(s) if s.session_id == v.session_id),
                    );
                if !session_known {
                    return Err(StoreError::UnknownSession(v.session_id.clone()));
                }
                self.store.user(&v.user_id)?;
                self.store.feedback(&v.feedback_id)?;
            }
            JournalEntry::Blacklist { user_id, .. } => {
                let user_known = self.store.users.contains_key(user_id)
                    || earlier
                        .iter()
                        .any(|e| matches!(e, JournalEntry::User(u) if &u.user_id == user_id));
                if !user_known {
                    return Err(StoreError::UnknownUser(user_id.clone()));
                }
            }
            JournalEntry::Session(_) => {}
        }
        Ok(())
    }

    /// Writes `entries` as one journal transaction, then applies them.
    /// Nothing is written unless every record passes validation.
    pub fn commit(&mut self, entries: Vec<JournalEntry>) -> Result<(), StoreError> {
        if entries.is_empty() {
            return Ok(());
        }
        for (i, entry) in entries.iter().enumerate() {
            self.check(entry, &entries[..i])?;
        }
        let txn = self.last_txn + 1;
        self.sink
            .write(&journal::encode_transaction(txn, &entries))?;
        self.last_txn = txn;
        for entry in &entries {
            self.store
                .apply(entry)
                .expect("records validated before commit");
        }
        Ok(())
    }

    pub fn new_user(&mut self, user_id: &str, now: Timestamp) -> Result<UserRecord, StoreError> {
        let user = UserRecord::new(user_id, now)?;
        if self.store.users.contains_key(user_id) {
            return Err(StoreError::DuplicateUser(user_id.to_string()));
        }
        self.commit(vec![JournalEntry::User(user.clone())])?;
        Ok(user)
    }

    pub fn store_feedback(&mut self, record: FeedbackRecord) -> Result<String, StoreError> {
        record.validate()?;
        if self.store.feedbacks.contains_key(&record.feedback_id) {
            return Err(StoreError::DuplicateFeedback(record.feedback_id));
        }
        let id = record.feedback_id.clone();
        self.commit(vec![JournalEntry::Feedback(record)])?;
        Ok(id)
    }

    pub fn blacklist_user(
        &mut self,
        user_id: &str,
        now: Timestamp,
        ttl_seconds: i64,
    ) -> Result<UserRecord, StoreError> {
        if ttl_seconds <= 0 {
            return Err(StoreError::InvalidTtl(ttl_seconds));
        }
        self.store.user(user_id)?;
        self.commit(vec![JournalEntry::Blacklist {
            user_id: user_id.to_string(),
            blacklist_until: now + ttl_seconds,
        }])?;
        Ok(self.store.user(user_id)?.clone())
    }

    pub fn is_blacklisted(&self, user_id: &str, now: Timestamp) -> Result<bool, StoreError> {
        self.store.is_blacklisted(user_id, now)
    }

    pub fn select_prefabricated(
        &self,
        product_id: &str,
        k: usize,
        requester: Option<&str>,
    ) -> Result<Selection, StoreError> {
        self.store.select_prefabricated(product_id, k, requester)
    }
}
