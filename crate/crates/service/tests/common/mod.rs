#![allow(dead_code)]

use std::net::SocketAddr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use trustrep::sim::review_text;
use trustrep::{
    Choice, Engine, EngineConfig, FeedbackCategory, FeedbackRecord, KnowledgeBase, Lexicon,
    SessionState, Timestamp,
};
use trustrep_service::{AppState, NOW_HEADER};

pub const TTL: i64 = 600;

/// One call against the engine, replayable over HTTP.
#[derive(Debug, Clone)]
pub enum Op {
    User {
        user_id: String,
        now: Timestamp,
    },
    Feedback {
        record: FeedbackRecord,
    },
    Submit {
        user_id: String,
        product_id: String,
        appreciation: f64,
        text: String,
        k: Option<usize>,
        now: Timestamp,
    },
    Vote {
        session_id: String,
        user_id: String,
        feedback_id: String,
        choice: Choice,
        now: Timestamp,
    },
    Finalize {
        session_id: String,
        now: Timestamp,
    },
}

/// What the library answered, reduced to what HTTP can be checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Ok,
    Rejected,
    Error,
}

pub fn config() -> EngineConfig {
    EngineConfig {
        blacklist_ttl: TTL,
        default_k: 4,
    }
}

pub fn engine() -> Engine {
    Engine::new(
        KnowledgeBase::in_memory(),
        Lexicon::default_english(),
        config(),
    )
}

pub fn apply(engine: &mut Engine, op: &Op) -> Expect {
    let ok = |r: bool| if r { Expect::Ok } else { Expect::Error };
    match op {
        Op::User { user_id, now } => ok(engine.new_user(user_id, *now).is_ok()),
        Op::Feedback { record } => ok(engine.store_feedback(record.clone()).is_ok()),
        Op::Submit {
            user_id,
            product_id,
            appreciation,
            text,
            k,
            now,
        } => match engine.submit_review(user_id, product_id, *appreciation, text, *k, *now) {
            Ok(s) if s.state == SessionState::Rejected => Expect::Rejected,
            Ok(_) => Expect::Ok,
            Err(_) => Expect::Error,
        },
        Op::Vote {
            session_id,
            user_id,
            feedback_id,
            choice,
            now,
        } => ok(engine
            .process_vote(session_id, user_id, feedback_id, *choice, *now)
            .is_ok()),
        Op::Finalize { session_id, now } => ok(engine.finalize_session(session_id, *now).is_ok()),
    }
}

/// A seeded multi-user scenario over two products, including discordant
/// submissions, blacklist refusals, duplicate votes and early finalizations.
/// Returns the ops, the library's answers and the library engine.
pub fn scripted_scenario(seed: u64, sessions: usize) -> (Vec<Op>, Vec<Expect>, Engine) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut engine = engine();
    let mut ops = Vec::new();
    let mut expects = Vec::new();
    let mut now: Timestamp = 1_700_000_000;
    let run = |engine: &mut Engine, op: Op, ops: &mut Vec<Op>, expects: &mut Vec<Expect>| {
        let e = apply(engine, &op);
        ops.push(op);
        expects.push(e);
        e
    };

    let products = ["phone", "kettle"];
    let mut n = 0;
    for product in products {
        for category in FeedbackCategory::ALL {
            for _ in 0..2 {
                let trust = if category == FeedbackCategory::Contradictory {
                    -10.0
                } else {
                    (rng.random_range(-100..=100) as f64) / 10.0
                };
                let record = FeedbackRecord {
                    feedback_id: format!("seed-{n}"),
                    product_id: product.into(),
                    author_id: "seed".into(),
                    text: review_text(category, &mut rng),
                    category,
                    trustworthiness: trust,
                    created_at: now,
                    appreciation: 3.0,
                };
                run(&mut engine, Op::Feedback { record }, &mut ops, &mut expects);
                n += 1;
                now += 1;
            }
        }
    }
    let users: Vec<String> = (0..5).map(|u| format!("user{u}")).collect();
    for u in &users {
        run(
            &mut engine,
            Op::User {
                user_id: u.clone(),
                now,
            },
            &mut ops,
            &mut expects,
        );
    }
    run(
        &mut engine,
        Op::User {
            user_id: "user0".into(),
            now,
        },
        &mut ops,
        &mut expects,
    );

    for _ in 0..sessions {
        now += rng.random_range(30..400);
        let user_id = users[rng.random_range(0..users.len())].clone();
        let product_id = products[rng.random_range(0..2)].to_string();
        let category = FeedbackCategory::ALL[rng.random_range(0..3)];
        let mut appreciation: f64 = match category {
            FeedbackCategory::Positive => rng.random_range(3.5..=5.0),
            FeedbackCategory::Negative => rng.random_range(1.0..=2.5),
            _ => rng.random_range(2.0..=4.0),
        };
        if rng.random_bool(0.1) {
            appreciation = 6.0 - appreciation;
        }
        let k = if rng.random_bool(0.5) {
            None
        } else {
            Some(rng.random_range(4..=6))
        };
        let submit = Op::Submit {
            user_id: user_id.clone(),
            product_id,
            appreciation,
            text: review_text(category, &mut rng),
            k,
            now,
        };
        if run(&mut engine, submit, &mut ops, &mut expects) != Expect::Ok {
            continue;
        }
        let session = engine
            .store()
            .sessions
            .values()
            .max_by(|a, b| a.session_id.cmp(&b.session_id))
            .unwrap()
            .clone();
        let sid = session.session_id.clone();
        if rng.random_bool(0.1) {
            run(
                &mut engine,
                Op::Finalize {
                    session_id: sid.clone(),
                    now,
                },
                &mut ops,
                &mut expects,
            );
        }
        for (i, feedback_id) in session.selection.iter().enumerate() {
            let choice = if rng.random_bool(0.6) {
                Choice::Like
            } else {
                Choice::Dislike
            };
            let vote = Op::Vote {
                session_id: sid.clone(),
                user_id: user_id.clone(),
                feedback_id: feedback_id.clone(),
                choice,
                now: now + i as i64,
            };
            run(&mut engine, vote.clone(), &mut ops, &mut expects);
            if rng.random_bool(0.05) {
                run(&mut engine, vote, &mut ops, &mut expects);
            }
        }
        if rng.random_bool(0.9) {
            run(
                &mut engine,
                Op::Finalize {
                    session_id: sid,
                    now: now + 10,
                },
                &mut ops,
                &mut expects,
            );
        }
    }
    (ops, expects, engine)
}

pub struct TestServer {
    pub addr: SocketAddr,
    pub state: AppState,
    pub client: reqwest::Client,
}

impl TestServer {
    pub async fn start(engine: Engine, test_mode: bool) -> Self {
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr = listener.local_addr().unwrap();
        let state = AppState::new(engine, test_mode);
        tokio::spawn(trustrep_service::serve(listener, state.clone()));
        Self {
            addr,
            state,
            client: reqwest::Client::new(),
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{path}", self.addr)
    }

    pub async fn get(&self, path: &str) -> (u16, Value) {
        let resp = self.client.get(self.url(path)).send().await.unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().await.unwrap_or(Value::Null))
    }

    pub async fn post(&self, path: &str, body: Value, now: Option<Timestamp>) -> (u16, Value) {
        let mut req = self.client.post(self.url(path)).json(&body);
        if let Some(now) = now {
            req = req.header(NOW_HEADER, now.to_string());
        }
        let resp = req.send().await.unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().await.unwrap_or(Value::Null))
    }

    pub async fn send(&self, op: &Op) -> (u16, Value) {
        match op {
            Op::User { user_id, now } => {
                self.post("/users", json!({ "user_id": user_id }), Some(*now))
                    .await
            }
            Op::Feedback { record } => {
                self.post(
                    "/feedbacks",
                    json!({
                        "feedback_id": record.feedback_id,
                        "product_id": record.product_id,
                        "author_id": record.author_id,
                        "text": record.text,
                        "appreciation": record.appreciation,
                        "trustworthiness": record.trustworthiness,
                        "category": record.category,
                    }),
                    Some(record.created_at),
                )
                .await
            }
            Op::Submit {
                user_id,
                product_id,
                appreciation,
                text,
                k,
                now,
            } => {
                let mut body = json!({
                    "user_id": user_id,
                    "product_id": product_id,
                    "appreciation": appreciation,
                    "text": text,
                });
                if let Some(k) = k {
                    body["k"] = json!(k);
                }
                self.post("/reviews", body, Some(*now)).await
            }
            Op::Vote {
                session_id,
                user_id,
                feedback_id,
                choice,
                now,
            } => {
                self.post(
                    &format!("/sessions/{session_id}/votes"),
                    json!({ "user_id": user_id, "feedback_id": feedback_id, "choice": choice }),
                    Some(*now),
                )
                .await
            }
            Op::Finalize { session_id, now } => {
                self.post(
                    &format!("/sessions/{session_id}/finalize"),
                    json!({}),
                    Some(*now),
                )
                .await
            }
        }
    }

    pub fn journal(&self) -> String {
        self.state.engine().knowledge_base().journal_text().unwrap()
    }
}

pub fn status_matches(expect: Expect, status: u16) -> bool {
    match expect {
        Expect::Ok => (200..300).contains(&status),
        Expect::Rejected => status == 409,
        Expect::Error => (400..500).contains(&status),
    }
}
