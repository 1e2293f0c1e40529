use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::SessionError;

pub const BANK_SIZE: usize = 9;
pub const BANK_SCHEMA: u32 = 1;

const PLACEHOLDER_BANK: &str = include_str!("../../assets/placeholder_bank.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionItem {
    pub id: String,
    pub prompt: String,
    pub options: Vec<String>,
    pub correct_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionBank {
    #[serde(default = "bank_schema")]
    pub schema: u32,
    /// False for any bank that is not the study's own questionnaire.
    #[serde(default)]
    pub canonical: bool,
    pub items: Vec<QuestionItem>,
}

fn bank_schema() -> u32 {
    BANK_SCHEMA
}

impl Default for QuestionBank {
    fn default() -> Self {
        QuestionBank::placeholder()
    }
}

impl QuestionBank {
    pub fn placeholder() -> Self {
        toml::from_str(PLACEHOLDER_BANK).expect("embedded bank parses")
    }

    pub fn from_toml(text: &str) -> Result<Self, SessionError> {
        let bank: QuestionBank =
            toml::from_str(text).map_err(|e| SessionError::Questionnaire(e.to_string()))?;
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<(), SessionError> {
        let bad = |m: String| Err(SessionError::Questionnaire(m));
        if self.schema != BANK_SCHEMA {
            return bad(format!("unsupported bank schema {}", self.schema));
        }
        if self.items.len() != BANK_SIZE {
            return bad(format!(
                "bank must hold {BANK_SIZE} items, found {}",
                self.items.len()
            ));
        }
        let mut ids = BTreeSet::new();
        for item in &self.items {
            if !ids.insert(item.id.as_str()) {
                return bad(format!("duplicate item id {}", item.id));
            }
            if item.options.len() < 2 || item.correct_index >= item.options.len() {
                return bad(format!("item {} has an invalid option list", item.id));
            }
        }
        Ok(())
    }

    pub fn item(&self, id: &str) -> Option<&QuestionItem> {
        self.items.iter().find(|i| i.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Response {
    pub item_id: String,
    pub chosen_index: usize,
    /// Self-assessed confidence, 1..=5.
    pub confidence: u8,
    /// Graded credit in [0, 1]; overrides the right/wrong check when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub pct_correct: f64,
    pub mean_confidence_pct: f64,
}

/// Confidence 1..=5 mapped linearly onto 0..=100 %.
pub fn confidence_pct(c: u8) -> f64 {
    (f64::from(c) - 1.0) * 25.0
}

pub fn score_questionnaire(
    bank: &QuestionBank,
    responses: &[Response],
) -> Result<ScoreReport, SessionError> {
    let bad = |m: String| Err(SessionError::Questionnaire(m));
    if responses.len() != bank.items.len() {
        return bad(format!(
            "expected {} responses, got {}",
            bank.items.len(),
            responses.len()
        ));
    }
    let mut seen = BTreeSet::new();
    let mut credit = 0.0;
    let mut confidence = 0.0;
    for r in responses {
        let Some(item) = bank.item(&r.item_id) else {
            return bad(format!("response to unknown item {}", r.item_id));
        };
        if !seen.insert(r.item_id.as_str()) {
            return bad(format!("duplicate response to {}", r.item_id));
        }
        if r.chosen_index >= item.options.len() {
            return bad(format!(
                "option {} out of range for {}",
                r.chosen_index, r.item_id
            ));
        }
        if !(1..=5).contains(&r.confidence) {
            return bad(format!("confidence {} outside 1..5", r.confidence));
        }
        credit += match r.credit {
            Some(c) if (0.0..=1.0).contains(&c) => c,
            Some(c) => return bad(format!("credit {c} outside [0, 1]")),
            None => f64::from(u8::from(r.chosen_index == item.correct_index)),
        };
        confidence += confidence_pct(r.confidence);
    }
    let n = bank.items.len() as f64;
    Ok(ScoreReport {
        pct_correct: 100.0 * credit / n,
        mean_confidence_pct: confidence / n,
    })
}

/// Responses for a bank: correct on the first `n_correct` items, all at
/// one confidence level.
pub fn answer_sheet(bank: &QuestionBank, n_correct: usize, confidence: u8) -> Vec<Response> {
    bank.items
        .iter()
        .enumerate()
        .map(|(i, item)| Response {
            item_id: item.id.clone(),
            chosen_index: if i < n_correct {
                item.correct_index
            } else {
                (item.correct_index + 1) % item.options.len()
            },
            confidence,
            credit: None,
        })
        .collect()
}
