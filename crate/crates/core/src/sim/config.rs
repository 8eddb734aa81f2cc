use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{appreciation_in_range, MAX_SELECTION, MIN_SELECTION};
use crate::engine::DEFAULT_SELECTION;
use crate::error::SimError;
use crate::store::DEFAULT_BLACKLIST_TTL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AgentStrategy {
    /// Rates near the true quality and likes feedbacks that agree with it.
    Honest,
    /// Uniform appreciation, arbitrary text, coin-flip votes.
    Random,
    /// Rates its target 5 with praise and likes everything it is served.
    BallotStuffer,
    /// Rates its target 1 with complaints and dislikes everything.
    BadMouther,
    /// Submits reviews that praise and condemn the same aspect.
    ContradictoryBot,
}

impl AgentStrategy {
    pub fn is_adversarial(self) -> bool {
        self != AgentStrategy::Honest
    }

    pub fn name(self) -> &'static str {
        match self {
            AgentStrategy::Honest => "Honest",
            AgentStrategy::Random => "Random",
            AgentStrategy::BallotStuffer => "BallotStuffer",
            AgentStrategy::BadMouther => "BadMouther",
            AgentStrategy::ContradictoryBot => "ContradictoryBot",
        }
    }
}

impl fmt::Display for AgentStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductSpec {
    pub product_id: String,
    pub true_quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentGroup {
    /// Prefix for the group's members: `<agent_id>-<n>`.
    pub agent_id: String,
    pub strategy: AgentStrategy,
    pub count: usize,
    /// Product attacked by targeted strategies; defaults to the first one.
    #[serde(default)]
    pub target_product: Option<String>,
}

fn default_k() -> usize {
    DEFAULT_SELECTION
}

fn default_ttl() -> i64 {
    DEFAULT_BLACKLIST_TTL
}

fn default_round_seconds() -> i64 {
    3_600
}

fn default_seeds() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub rng_seed: u64,
    pub rounds: u32,
    pub products: Vec<ProductSpec>,
    pub agents: Vec<AgentGroup>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_ttl")]
    pub blacklist_ttl: i64,
    /// Simulated wall-clock length of one round.
    #[serde(default = "default_round_seconds")]
    pub round_seconds: i64,
    /// Prefabricated feedbacks seeded per product and category.
    #[serde(default = "default_seeds")]
    pub seed_feedbacks: usize,
}

impl ScenarioConfig {
    /// Parses TOML, or JSON when the path ends in `.json`.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let config: ScenarioConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| SimError::Parse(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| SimError::Parse(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::Config(msg));
        if self.products.is_empty() {
            return bad("at least one product is required".into());
        }
        let mut product_ids = BTreeSet::new();
        for p in &self.products {
            if p.product_id.trim().is_empty() {
                return bad("empty product_id".into());
            }
            if !product_ids.insert(p.product_id.as_str()) {
                return bad(format!("duplicate product {}", p.product_id));
            }
            if !appreciation_in_range(p.true_quality) {
                return bad(format!(
                    "true_quality {} of {} outside [1, 5]",
                    p.true_quality, p.product_id
                ));
            }
        }
        let mut agent_ids = BTreeSet::new();
        for a in &self.agents {
            if a.agent_id.trim().is_empty() {
                return bad("empty agent_id".into());
            }
            if !agent_ids.insert(a.agent_id.as_str()) {
                return bad(format!("duplicate agent group {}", a.agent_id));
            }
            if a.count == 0 {
                return bad(format!("agent group {} has count 0", a.agent_id));
            }
            if let Some(target) = &a.target_product {
                if !product_ids.contains(target.as_str()) {
                    return bad(format!(
                        "agent group {} targets unknown product {target}",
                        a.agent_id
                    ));
                }
            }
        }
        if !(MIN_SELECTION..=MAX_SELECTION).contains(&self.k) {
            return bad(format!("k = {} outside [4, 10]", self.k));
        }
        if self.blacklist_ttl <= 0 {
            return bad("blacklist_ttl must be positive".into());
        }
        if self.round_seconds <= 0 {
            return bad("round_seconds must be positive".into());
        }
        Ok(())
    }
}
