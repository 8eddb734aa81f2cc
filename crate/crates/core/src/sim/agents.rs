//! Agent behaviour: what each strategy writes and how it votes.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::domain::{Choice, FeedbackCategory, FeedbackRecord, APPRECIATION_MAX, APPRECIATION_MIN};
use crate::text::{self, Lexicon, NEGATIVE_MAX_APPRECIATION, POSITIVE_MIN_APPRECIATION};

use super::config::AgentStrategy;

const ASPECTS: [&str; 8] = [
    "battery", "screen", "camera", "sound", "design", "price", "keyboard", "delivery",
];
const PRAISE: [&str; 5] = ["great", "excellent", "good", "reliable", "amazing"];
const COMPLAINT: [&str; 5] = ["terrible", "bad", "poor", "awful", "broken"];
// weights differ by at least 0.2 across the two pairs, so the mean of a
// strong and a mild sentence lands outside the dead band
const STRONG_PRAISE: [&str; 3] = ["excellent", "amazing", "great"];
const MILD_PRAISE: [&str; 2] = ["good", "reliable"];
const STRONG_COMPLAINT: [&str; 3] = ["terrible", "awful", "broken"];
const MILD_COMPLAINT: [&str; 2] = ["bad", "poor"];

/// Half-width of the uniform noise on honest appreciations.
pub const HONEST_NOISE: f64 = 0.5;

fn two_aspects(rng: &mut impl Rng) -> (&'static str, &'static str) {
    let picked: Vec<&&str> = ASPECTS.choose_multiple(rng, 2).collect();
    (picked[0], picked[1])
}

/// Synthetic review text that the lexicon classifier files under `category`.
pub fn review_text(category: FeedbackCategory, rng: &mut impl Rng) -> String {
    let praise = PRAISE.choose(rng).unwrap();
    let complaint = COMPLAINT.choose(rng).unwrap();
    let (a, b) = two_aspects(rng);
    match category {
        FeedbackCategory::Positive => {
            let praise2 = PRAISE.choose(rng).unwrap();
            format!("The {a} is {praise}. The {b} is {praise2} too.")
        }
        FeedbackCategory::Negative => {
            let complaint2 = COMPLAINT.choose(rng).unwrap();
            format!("The {a} is {complaint}. The {b} is {complaint2} too.")
        }
        FeedbackCategory::Mitigated => mixed_text(a, b, praise, complaint),
        FeedbackCategory::Contradictory => {
            format!("The {a} is {praise}. Honestly the {a} is {complaint}.")
        }
    }
}

fn mixed_text(a: &str, b: &str, praise: &str, complaint: &str) -> String {
    format!("The {a} is {praise}. The {b} is {complaint}.")
}

/// Mitigated text whose overall polarity has the sign of `lean`.
pub fn leaning_mixed_text(lean: f64, rng: &mut impl Rng) -> String {
    let (a, b) = two_aspects(rng);
    let (praise, complaint) = if lean >= 0.0 {
        (
            STRONG_PRAISE.choose(rng).unwrap(),
            MILD_COMPLAINT.choose(rng).unwrap(),
        )
    } else {
        (
            MILD_PRAISE.choose(rng).unwrap(),
            STRONG_COMPLAINT.choose(rng).unwrap(),
        )
    };
    mixed_text(a, b, praise, complaint)
}

/// The category whose concordance band holds `appreciation`.
pub fn category_for(appreciation: f64) -> FeedbackCategory {
    if appreciation >= POSITIVE_MIN_APPRECIATION {
        FeedbackCategory::Positive
    } else if appreciation <= NEGATIVE_MAX_APPRECIATION {
        FeedbackCategory::Negative
    } else {
        FeedbackCategory::Mitigated
    }
}

/// What an agent submits in one round.
#[derive(Debug, Clone)]
pub struct Submission {
    pub appreciation: f64,
    pub text: String,
}

pub fn submission(strategy: AgentStrategy, true_quality: f64, rng: &mut impl Rng) -> Submission {
    match strategy {
        AgentStrategy::Honest => {
            let noise = rng.random_range(-HONEST_NOISE..=HONEST_NOISE);
            let appreciation = (true_quality + noise).clamp(APPRECIATION_MIN, APPRECIATION_MAX);
            let text = match category_for(appreciation) {
                FeedbackCategory::Mitigated => leaning_mixed_text(appreciation - 3.0, rng),
                category => review_text(category, rng),
            };
            Submission { appreciation, text }
        }
        AgentStrategy::Random => {
            let appreciation = rng.random_range(APPRECIATION_MIN..=APPRECIATION_MAX);
            let category = *[
                FeedbackCategory::Positive,
                FeedbackCategory::Negative,
                FeedbackCategory::Mitigated,
            ]
            .choose(rng)
            .unwrap();
            Submission {
                appreciation,
                text: review_text(category, rng),
            }
        }
        AgentStrategy::BallotStuffer => Submission {
            appreciation: APPRECIATION_MAX,
            text: review_text(FeedbackCategory::Positive, rng),
        },
        AgentStrategy::BadMouther => Submission {
            appreciation: APPRECIATION_MIN,
            text: review_text(FeedbackCategory::Negative, rng),
        },
        AgentStrategy::ContradictoryBot => Submission {
            appreciation: rng.random_range(APPRECIATION_MIN..=APPRECIATION_MAX),
            text: review_text(FeedbackCategory::Contradictory, rng),
        },
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Whether the feedback's text agrees with the product's true quality, as an
/// honest reader would judge it.
pub fn honest_judgement(feedback: &FeedbackRecord, true_quality: f64, lexicon: &Lexicon) -> bool {
    if feedback.category == FeedbackCategory::Contradictory {
        return false;
    }
    let polarity = text::sentiment_score(&feedback.text, lexicon)
        .map(|r| r.overall)
        .unwrap_or(0.0);
    sign(polarity) == sign(true_quality - 3.0)
}

pub fn vote(
    strategy: AgentStrategy,
    feedback: &FeedbackRecord,
    true_quality: f64,
    lexicon: &Lexicon,
    rng: &mut impl Rng,
) -> Choice {
    match strategy {
        AgentStrategy::Honest => {
            if honest_judgement(feedback, true_quality, lexicon) {
                Choice::Like
            } else {
                Choice::Dislike
            }
        }
        AgentStrategy::Random | AgentStrategy::ContradictoryBot => {
            if rng.random_bool(0.5) {
                Choice::Like
            } else {
                Choice::Dislike
            }
        }
        AgentStrategy::BallotStuffer => Choice::Like,
        AgentStrategy::BadMouther => Choice::Dislike,
    }
}
