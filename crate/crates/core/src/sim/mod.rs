//! Agent-based robustness harness.
//!
//! Populations of honest and adversarial agents review synthetic products
//! through the real [`Engine`]. Every product starts with a seeded stock of
//! prefabricated feedbacks whose trustworthiness reflects whether their text
//! agrees with the product's true quality. Runs are single-threaded and fully
//! determined by `rng_seed`.

mod agents;
mod config;
pub mod drift;
mod report;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Choice, FeedbackCategory, FeedbackRecord, SessionState, Timestamp, TRUST_MIN};
use crate::engine::{Engine, EngineConfig};
use crate::error::SimError;
use crate::store::KnowledgeBase;
use crate::text::{self, Lexicon};

pub use agents::{category_for, honest_judgement, review_text, HONEST_NOISE};
pub use config::{AgentGroup, AgentStrategy, ProductSpec, ScenarioConfig};
pub use report::{
    emit_report, DriftFigure, ProductSnapshot, ReportFormat, RoundSnapshot, SimulationReport,
    Summary,
};

/// Simulated clock origin.
pub const EPOCH: Timestamp = 1_700_000_000;

#[derive(Debug, Clone)]
struct Agent {
    user_id: String,
    strategy: AgentStrategy,
    target: Option<String>,
}

fn expand_agents(config: &ScenarioConfig) -> Vec<Agent> {
    let default_target = config.products[0].product_id.clone();
    config
        .agents
        .iter()
        .flat_map(|group| {
            let target = match group.strategy {
                AgentStrategy::BallotStuffer
                | AgentStrategy::BadMouther
                | AgentStrategy::ContradictoryBot => Some(
                    group
                        .target_product
                        .clone()
                        .unwrap_or_else(|| default_target.clone()),
                ),
                AgentStrategy::Honest | AgentStrategy::Random => group.target_product.clone(),
            };
            (0..group.count).map(move |n| Agent {
                user_id: format!("{}-{n}", group.agent_id),
                strategy: group.strategy,
                target: target.clone(),
            })
        })
        .collect()
}

/// Seeds one product's prefabricated stock. Feedbacks whose text agrees with
/// the true quality get a positive trustworthiness, the others a negative
/// one, contradictory ones -10.
fn seed_product(
    engine: &mut Engine,
    product: &ProductSpec,
    per_category: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(), SimError> {
    let mut n = 0;
    for category in FeedbackCategory::ALL {
        for _ in 0..per_category {
            let text = review_text(category, rng);
            let classified = text::classify_feedback(&text, engine.lexicon())?;
            let appreciation = match classified {
                FeedbackCategory::Positive => 4.5,
                FeedbackCategory::Negative => 1.5,
                _ => 3.0,
            };
            let magnitude = rng.random_range(6.0..=9.5_f64);
            let mut record = FeedbackRecord {
                feedback_id: format!("seed-{}-{n}", product.product_id),
                product_id: product.product_id.clone(),
                author_id: format!("seed-author-{}", product.product_id),
                text,
                category: classified,
                trustworthiness: 0.0,
                created_at: EPOCH - 1 - n as Timestamp,
                appreciation,
            };
            record.trustworthiness = if classified == FeedbackCategory::Contradictory {
                TRUST_MIN
            } else if honest_judgement(&record, product.true_quality, engine.lexicon()) {
                magnitude
            } else {
                -magnitude
            };
            engine.store_feedback(record)?;
            n += 1;
        }
    }
    Ok(())
}

fn snapshot(
    engine: &Engine,
    config: &ScenarioConfig,
    agents: &[Agent],
    round: u32,
    now: Timestamp,
    counters: [u64; 3],
) -> RoundSnapshot {
    let store = engine.store();
    let products = config
        .products
        .iter()
        .map(|p| {
            let agg = store.aggregate(&p.product_id);
            let score = agg.score();
            ProductSnapshot {
                product_id: p.product_id.clone(),
                score,
                abs_error: score.map(|s| (s - p.true_quality).abs()),
                rating_count: agg.rating_count,
            }
        })
        .collect();

    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut blacklisted = 0;
    for agent in agents {
        let user = &store.users[&agent.user_id];
        let e = sums.entry(agent.strategy.name().to_string()).or_default();
        e.0 += user.trust_degree;
        e.1 += 1;
        if user.is_blacklisted(now) {
            blacklisted += 1;
        }
    }
    RoundSnapshot {
        round,
        submissions: counters[0],
        rejected: counters[1],
        finalized: counters[2],
        blacklisted,
        products,
        mean_trust: sums
            .into_iter()
            .map(|(k, (sum, n))| (k, sum / n as f64))
            .collect(),
    }
}

/// Runs a scenario against a fresh in-memory engine and returns the report
/// together with the engine for inspection.
pub fn run_with_engine(
    config: &ScenarioConfig,
    lexicon: Lexicon,
) -> Result<(SimulationReport, Engine), SimError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut engine = Engine::new(
        KnowledgeBase::in_memory(),
        lexicon,
        EngineConfig {
            blacklist_ttl: config.blacklist_ttl,
            default_k: config.k,
        },
    );

    for product in &config.products {
        seed_product(&mut engine, product, config.seed_feedbacks, &mut rng)?;
    }
    let agents = expand_agents(config);
    for agent in &agents {
        engine.new_user(&agent.user_id, EPOCH)?;
    }
    let quality: BTreeMap<&str, f64> = config
        .products
        .iter()
        .map(|p| (p.product_id.as_str(), p.true_quality))
        .collect();

    let mut strategies: Vec<AgentStrategy> = agents.iter().map(|a| a.strategy).collect();
    strategies.sort();
    strategies.dedup();

    let initial = snapshot(&engine, config, &agents, 0, EPOCH, [0; 3]);
    let mut rounds = Vec::with_capacity(config.rounds as usize);
    let mut contradictory_likes = 0u64;
    let mut order: Vec<usize> = (0..agents.len()).collect();

    for round in 1..=config.rounds {
        let round_start = EPOCH + i64::from(round) * config.round_seconds;
        order.shuffle(&mut rng);
        let mut counters = [0u64; 3];
        for (slot, &idx) in order.iter().enumerate() {
            let agent = &agents[idx];
            let now = round_start + slot as Timestamp;
            if engine.store().is_blacklisted(&agent.user_id, now)? {
                continue;
            }
            let product_id = match &agent.target {
                Some(t) => t.clone(),
                None => config.products[rng.random_range(0..config.products.len())]
                    .product_id
                    .clone(),
            };
            let true_quality = quality[product_id.as_str()];
            let sub = agents::submission(agent.strategy, true_quality, &mut rng);
            let session = engine.submit_review(
                &agent.user_id,
                &product_id,
                sub.appreciation,
                &sub.text,
                Some(config.k),
                now,
            )?;
            counters[0] += 1;
            if session.state == SessionState::Rejected {
                counters[1] += 1;
                continue;
            }
            for feedback_id in &session.selection {
                let feedback = engine.store().feedback(feedback_id)?.clone();
                let choice = agents::vote(
                    agent.strategy,
                    &feedback,
                    true_quality,
                    engine.lexicon(),
                    &mut rng,
                );
                let outcome = engine.process_vote(
                    &session.session_id,
                    &agent.user_id,
                    feedback_id,
                    choice,
                    now,
                )?;
                if choice == Choice::Like && feedback.trustworthiness == TRUST_MIN {
                    debug_assert_eq!(outcome.trust_after, TRUST_MIN);
                    contradictory_likes += 1;
                }
            }
            engine.finalize_session(&session.session_id, now)?;
            counters[2] += 1;
        }
        let round_end = round_start + config.round_seconds - 1;
        rounds.push(snapshot(
            &engine, config, &agents, round, round_end, counters,
        ));
    }

    let journal = engine.knowledge_base().journal_text()?;
    let batch = drift::batch_scores(&journal)?;
    let drift: Vec<DriftFigure> = config
        .products
        .iter()
        .map(|p| {
            let incremental = engine.store().aggregate(&p.product_id).score();
            match batch.iter().find(|b| b.product_id == p.product_id) {
                Some(b) => DriftFigure::new(incremental, b),
                None => DriftFigure {
                    product_id: p.product_id.clone(),
                    incremental,
                    batch_forward: None,
                    batch_retroactive: None,
                    drift: None,
                },
            }
        })
        .collect();
    let max_drift = drift.iter().filter_map(|d| d.drift).fold(0.0, f64::max);

    let last = rounds.last().unwrap_or(&initial);
    let honest = last.mean_trust.get(AgentStrategy::Honest.name()).copied();
    let worst_adversary = strategies
        .iter()
        .filter(|s| s.is_adversarial())
        .filter_map(|s| last.mean_trust.get(s.name()).copied())
        .reduce(f64::max);
    let separation = match (honest, worst_adversary) {
        (Some(h), Some(a)) => Some(h - a),
        _ => None,
    };

    let report = SimulationReport {
        rng_seed: config.rng_seed,
        products: config.products.clone(),
        strategies: strategies.iter().map(|s| s.name().to_string()).collect(),
        initial,
        rounds,
        summary: Summary {
            separation,
            drift,
            max_drift,
            contradictory_likes,
            journal_records: journal.lines().count() as u64,
        },
    };
    Ok((report, engine))
}

pub fn run_simulation(config: &ScenarioConfig) -> Result<SimulationReport, SimError> {
    run_with_engine(config, Lexicon::default_english()).map(|(r, _)| r)
}
