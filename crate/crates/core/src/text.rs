//! Lexicon-based text analysis.
//!
//! Sentences are split on `.`, `!`, `?` and `;`. Each sentence is tokenized
//! on non-alphanumeric characters and lowercased; its polarity is the sum of
//! lexicon weights clamped to `[-1, 1]`, where a weight is sign-flipped when a
//! negator occurs within the three preceding tokens. Intensifiers and
//! diminishers are not modelled.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{appreciation_in_range, FeedbackCategory};
use crate::error::TextError;

/// Tokens after a negator that have their weight flipped.
pub const NEGATION_WINDOW: usize = 3;
/// Sentences with `|polarity| <= POLARITY_DEAD_BAND` carry no polar claim.
pub const POLARITY_DEAD_BAND: f64 = 0.1;

pub const POSITIVE_MIN_APPRECIATION: f64 = 3.5;
pub const NEGATIVE_MAX_APPRECIATION: f64 = 2.5;
pub const MITIGATED_APPRECIATION: (f64, f64) = (2.0, 4.0);

const DEFAULT_LEXICON: &str = include_str!("../data/default.lexicon");

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lexicon {
    pub entries: BTreeMap<String, f64>,
    pub negators: BTreeSet<String>,
    pub aspect_terms: BTreeSet<String>,
}

#[derive(Clone, Copy)]
enum Section {
    Entries,
    Negators,
    Aspects,
}

impl Lexicon {
    /// The lexicon bundled with the crate.
    pub fn default_english() -> Self {
        DEFAULT_LEXICON
            .parse()
            .expect("bundled lexicon is well formed")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, TextError> {
        fs::read_to_string(path)?.parse()
    }

    pub fn with_entries<'a>(
        entries: impl IntoIterator<Item = (&'a str, f64)>,
        negators: impl IntoIterator<Item = &'a str>,
        aspects: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        Self {
            entries: entries
                .into_iter()
                .map(|(t, w)| (t.to_lowercase(), w))
                .collect(),
            negators: negators.into_iter().map(str::to_lowercase).collect(),
            aspect_terms: aspects.into_iter().map(str::to_lowercase).collect(),
        }
    }

    fn weight(&self, token: &str) -> Option<f64> {
        self.entries.get(token).copied()
    }
}

impl FromStr for Lexicon {
    type Err = TextError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lexicon = Lexicon::default();
        let mut section = Section::Entries;
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[entries]" => {
                    section = Section::Entries;
                    continue;
                }
                "[negators]" => {
                    section = Section::Negators;
                    continue;
                }
                "[aspects]" => {
                    section = Section::Aspects;
                    continue;
                }
                _ if line.starts_with('[') => {
                    return Err(TextError::LexiconSyntax {
                        line: line_no,
                        reason: format!("unknown section {line}"),
                    })
                }
                _ => {}
            }
            match section {
                Section::Negators => {
                    lexicon.negators.insert(line.to_lowercase());
                }
                Section::Aspects => {
                    lexicon.aspect_terms.insert(line.to_lowercase());
                }
                Section::Entries => {
                    let (token, weight) =
                        line.split_once('\t')
                            .ok_or_else(|| TextError::LexiconSyntax {
                                line: line_no,
                                reason: "expected token<TAB>weight".into(),
                            })?;
                    let weight: f64 =
                        weight
                            .trim()
                            .parse()
                            .map_err(|_| TextError::LexiconSyntax {
                                line: line_no,
                                reason: format!("bad weight {:?}", weight.trim()),
                            })?;
                    if !(-1.0..=1.0).contains(&weight) {
                        return Err(TextError::LexiconSyntax {
                            line: line_no,
                            reason: format!("weight {weight} outside [-1, 1]"),
                        });
                    }
                    lexicon.entries.insert(token.trim().to_lowercase(), weight);
                }
            }
        }
        if lexicon.entries.is_empty() {
            return Err(TextError::EmptyLexicon);
        }
        Ok(lexicon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentencePolarity {
    pub sentence: String,
    pub polarity: f64,
    pub aspect_tokens: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentReport {
    pub sentence_polarities: Vec<SentencePolarity>,
    /// Arithmetic mean of the sentence polarities.
    pub overall: f64,
}

fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn sentence_polarity(tokens: &[String], lexicon: &Lexicon) -> f64 {
    let mut sum = 0.0;
    let mut last_negator: Option<usize> = None;
    for (i, token) in tokens.iter().enumerate() {
        // negator role wins over any entry weight
        if lexicon.negators.contains(token) {
            last_negator = Some(i);
            continue;
        }
        if let Some(w) = lexicon.weight(token) {
            let negated = last_negator.is_some_and(|n| i - n <= NEGATION_WINDOW);
            sum += if negated { -w } else { w };
        }
    }
    sum.clamp(-1.0, 1.0)
}

pub fn sentiment_score(text: &str, lexicon: &Lexicon) -> Result<SentimentReport, TextError> {
    if text.trim().is_empty() {
        return Err(TextError::EmptyText);
    }
    let sentence_polarities: Vec<SentencePolarity> = text
        .split(['.', '!', '?', ';'])
        .filter_map(|raw| {
            let tokens = tokenize(raw);
            if tokens.is_empty() {
                return None;
            }
            let aspect_tokens = tokens
                .iter()
                .filter(|t| lexicon.aspect_terms.contains(*t))
                .cloned()
                .collect();
            Some(SentencePolarity {
                sentence: raw.trim().to_string(),
                polarity: sentence_polarity(&tokens, lexicon),
                aspect_tokens,
            })
        })
        .collect();
    if sentence_polarities.is_empty() {
        return Err(TextError::EmptyText);
    }
    let overall = sentence_polarities.iter().map(|s| s.polarity).sum::<f64>()
        / sentence_polarities.len() as f64;
    Ok(SentimentReport {
        sentence_polarities,
        overall,
    })
}

/// Applies the four-way rules to an already computed report.
pub fn classify_report(report: &SentimentReport) -> FeedbackCategory {
    let positive: Vec<&SentencePolarity> = report
        .sentence_polarities
        .iter()
        .filter(|s| s.polarity > POLARITY_DEAD_BAND)
        .collect();
    let negative: Vec<&SentencePolarity> = report
        .sentence_polarities
        .iter()
        .filter(|s| s.polarity < -POLARITY_DEAD_BAND)
        .collect();

    let shared_aspect = positive.iter().any(|p| {
        negative
            .iter()
            .any(|n| !p.aspect_tokens.is_disjoint(&n.aspect_tokens))
    });
    if shared_aspect {
        FeedbackCategory::Contradictory
    } else if !positive.is_empty() && !negative.is_empty() {
        FeedbackCategory::Mitigated
    } else if !positive.is_empty() {
        FeedbackCategory::Positive
    } else if !negative.is_empty() {
        FeedbackCategory::Negative
    } else {
        FeedbackCategory::Mitigated
    }
}

pub fn classify_feedback(text: &str, lexicon: &Lexicon) -> Result<FeedbackCategory, TextError> {
    sentiment_score(text, lexicon).map(|r| classify_report(&r))
}

/// Whether a category agrees with an appreciation on the 1-5 scale.
pub fn category_concordant(category: FeedbackCategory, appreciation: f64) -> bool {
    match category {
        FeedbackCategory::Positive => appreciation >= POSITIVE_MIN_APPRECIATION,
        FeedbackCategory::Negative => appreciation <= NEGATIVE_MAX_APPRECIATION,
        FeedbackCategory::Mitigated => {
            (MITIGATED_APPRECIATION.0..=MITIGATED_APPRECIATION.1).contains(&appreciation)
        }
        FeedbackCategory::Contradictory => false,
    }
}

pub fn test_concordance(
    appreciation: f64,
    text: &str,
    lexicon: &Lexicon,
) -> Result<bool, TextError> {
    if !appreciation_in_range(appreciation) {
        return Err(TextError::AppreciationOutOfRange(appreciation));
    }
    let category = classify_feedback(text, lexicon)?;
    Ok(category_concordant(category, appreciation))
}
