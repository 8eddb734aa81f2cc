//! Fixtures shared by the criterion benches.

use trustrep::{Engine, FeedbackCategory, FeedbackRecord, Lexicon};

/// An in-memory engine with `per_category` stored feedbacks in each category
/// for `product` and one user `reviewer`.
pub fn stocked_engine(product: &str, per_category: usize) -> Engine {
    let mut engine = Engine::in_memory(Lexicon::default_english());
    engine.new_user("reviewer", 0).expect("fresh user");
    let mut n = 0i64;
    for category in FeedbackCategory::ALL {
        for _ in 0..per_category {
            let trust = if category == FeedbackCategory::Contradictory {
                -10.0
            } else {
                (n % 19) as f64 - 9.0
            };
            engine
                .store_feedback(FeedbackRecord {
                    feedback_id: format!("f{n}"),
                    product_id: product.to_string(),
                    author_id: "seed".to_string(),
                    text: format!("stored feedback number {n}"),
                    category,
                    trustworthiness: trust,
                    created_at: n,
                    appreciation: 3.0,
                })
                .expect("valid fixture");
            n += 1;
        }
    }
    engine
}
