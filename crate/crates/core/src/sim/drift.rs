//! Batch recomputation of product scores from a journal.
//!
//! The live aggregate only ever moves forward: a rating is weighted by the
//! rater's trust at the moment they finalized. Two batch views are rebuilt
//! here from the committed transactions:
//!
//! * `forward`: the same contributions recomputed from scratch, which must
//!   agree with the incremental aggregate;
//! * `retroactive`: every finalized rating re-weighted by its author's
//!   trust at the end of the journal, which is what a system that reweights
//!   history would show. The gap between the two is the drift caused by
//!   forward-only accumulation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::SessionState;
use crate::error::StoreError;
use crate::journal::{read_transactions, JournalEntry};

#[derive(Debug, Clone, Default, PartialEq)]
struct Sums {
    weighted: f64,
    coefficients: f64,
    count: u64,
}

impl Sums {
    fn add(&mut self, appreciation: f64, trust: f64) {
        self.weighted += appreciation * trust;
        self.coefficients += trust;
        self.count += 1;
    }

    fn score(&self) -> Option<f64> {
        (self.count > 0).then(|| self.weighted / self.coefficients)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchScore {
    pub product_id: String,
    pub forward: Option<f64>,
    pub retroactive: Option<f64>,
}

impl BatchScore {
    /// `|forward - retroactive|` when both are rated.
    pub fn drift(&self) -> Option<f64> {
        Some((self.forward? - self.retroactive?).abs())
    }
}

pub fn batch_scores(journal: &str) -> Result<Vec<BatchScore>, StoreError> {
    let replay = read_transactions(journal.as_bytes())?;
    let mut trust: BTreeMap<String, f64> = BTreeMap::new();
    // (product, appreciation, author, trust at finalization)
    let mut ratings: Vec<(String, f64, String, f64)> = Vec::new();

    for txn in &replay.transactions {
        for entry in txn {
            match entry {
                JournalEntry::User(u) => {
                    trust.insert(u.user_id.clone(), u.trust_degree);
                }
                JournalEntry::Session(s) if s.state == SessionState::Finalized => {
                    let t = trust.get(&s.user_id).copied().unwrap_or(0.0);
                    ratings.push((s.product_id.clone(), s.appreciation, s.user_id.clone(), t));
                }
                _ => {}
            }
        }
    }

    let mut forward: BTreeMap<String, Sums> = BTreeMap::new();
    let mut retro: BTreeMap<String, Sums> = BTreeMap::new();
    for (product, appreciation, author, at_time) in &ratings {
        forward.entry(product.clone()).or_default();
        retro.entry(product.clone()).or_default();
        if *at_time > 0.0 {
            forward
                .get_mut(product)
                .unwrap()
                .add(*appreciation, *at_time);
        }
        let now = trust.get(author).copied().unwrap_or(0.0);
        if now > 0.0 {
            retro.get_mut(product).unwrap().add(*appreciation, now);
        }
    }

    Ok(forward
        .into_iter()
        .map(|(product_id, sums)| BatchScore {
            forward: sums.score(),
            retroactive: retro.get(&product_id).and_then(Sums::score),
            product_id,
        })
        .collect())
}
