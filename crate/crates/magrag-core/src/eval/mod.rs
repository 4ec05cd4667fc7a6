//! Scoring of modeling results under the five-metric 100-point rubric,
//! either by an LLM judge or imported from a score table.
//!
//! The rubric: completeness 30, standardization 20, correctness 30,
//! relevance 10, readability 10. A judge completion must contain one
//! `metric: score` line per metric; scores are clamped into `[0, weight]`
//! with a warning, and the total is the exact sum of the five metric
//! scores.

pub mod stats;

pub use stats::{
    gain_frequencies, render_report, suffix_grouping, winners_per_question, GainCounts,
    GainSummary, ScoreTable,
};

use crate::pipeline::ModelingResult;
use crate::prompts::PromptSet;
use crate::providers::{ChatProvider, ProviderError};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("rubric weights must be positive and sum to exactly 100, got {0}")]
    InvalidRubric(f64),

    #[error("modeling result text is empty")]
    EmptyResult,

    /// The judge completion was missing metric lines after the retry.
    #[error("malformed judgment: missing metric(s) {missing:?}")]
    MalformedJudgment { missing: Vec<String>, raw: String },

    #[error("row {row:?} has {got} cells, table wants {want}")]
    RaggedTable { row: String, got: usize, want: usize },

    #[error("non-numeric cell at row {row:?}, column {column:?}: {value:?}")]
    NonNumericCell {
        row: String,
        column: String,
        value: String,
    },

    #[error("incomplete grouping: base model {base:?} is missing its {missing} row")]
    IncompleteGrouping { base: String, missing: String },

    #[error("method label {0:?} does not end in a D/G/T mode suffix")]
    UnknownModeSuffix(String),

    #[error("score CSV: {0}")]
    Csv(String),

    #[error(transparent)]
    Provider(#[from] ProviderError),

    #[error("score file I/O: {0}")]
    Io(#[from] std::io::Error),
}

/// The five rubric metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Completeness,
    Standardization,
    Correctness,
    Relevance,
    Readability,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Completeness,
        Metric::Standardization,
        Metric::Correctness,
        Metric::Relevance,
        Metric::Readability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Completeness => "completeness",
            Metric::Standardization => "standardization",
            Metric::Correctness => "correctness",
            Metric::Relevance => "relevance",
            Metric::Readability => "readability",
        }
    }

    pub fn parse(s: &str) -> Option<Metric> {
        let normalized = s.trim().to_ascii_lowercase();
        Metric::ALL.into_iter().find(|m| m.name() == normalized)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Metric weights summing to exactly 100.
#[derive(Debug, Clone, PartialEq)]
pub struct Rubric {
    weights: BTreeMap<Metric, f64>,
}

impl Rubric {
    /// The standard 30/20/30/10/10 weights.
    pub fn standard() -> Self {
        let mut weights = BTreeMap::new();
        weights.insert(Metric::Completeness, 30.0);
        weights.insert(Metric::Standardization, 20.0);
        weights.insert(Metric::Correctness, 30.0);
        weights.insert(Metric::Relevance, 10.0);
        weights.insert(Metric::Readability, 10.0);
        Self { weights }
    }

    pub fn new(weights: BTreeMap<Metric, f64>) -> Result<Self, EvalError> {
        let sum: f64 = weights.values().sum();
        if weights.len() != 5 || sum != 100.0 || weights.values().any(|w| *w <= 0.0) {
            return Err(EvalError::InvalidRubric(sum));
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, metric: Metric) -> f64 {
        self.weights[&metric]
    }

    pub fn total_points(&self) -> f64 {
        self.weights.values().sum()
    }
}

/// Where a score card came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreSource {
    Judge,
    Imported,
}

/// Per-metric scores for one modeling result.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCard {
    pub query_id: String,
    pub method_label: String,
    pub per_metric: BTreeMap<Metric, f64>,
    pub total: f64,
    pub source: ScoreSource,
    pub warnings: Vec<String>,
}

impl ScoreCard {
    /// Clamps raw metric scores into `[0, weight]` (recording a warning per
    /// clamp) and totals them exactly.
    pub fn from_raw_metrics(
        query_id: impl Into<String>,
        method_label: impl Into<String>,
        raw: BTreeMap<Metric, f64>,
        rubric: &Rubric,
        source: ScoreSource,
    ) -> Self {
        let mut per_metric = BTreeMap::new();
        let mut warnings = Vec::new();
        for (metric, value) in raw {
            let weight = rubric.weight(metric);
            let clamped = value.clamp(0.0, weight);
            if clamped != value {
                warnings.push(format!(
                    "{metric} score {value} clamped to {clamped} (weight {weight})"
                ));
            }
            per_metric.insert(metric, clamped);
        }
        let total = per_metric.values().sum();
        Self {
            query_id: query_id.into(),
            method_label: method_label.into(),
            per_metric,
            total,
            source,
            warnings,
        }
    }
}

/// Parses `metric: score` lines out of a judge completion. Lines may carry
/// list markers and a `/max` suffix; metric names match case-insensitively.
fn parse_judgment(completion: &str) -> Result<BTreeMap<Metric, f64>, Vec<String>> {
    let mut raw: BTreeMap<Metric, f64> = BTreeMap::new();
    for line in completion.lines() {
        let cleaned = line.trim().trim_start_matches(['-', '*', '•']).trim();
        let Some((name, value)) = cleaned.split_once(':') else {
            continue;
        };
        let Some(metric) = Metric::parse(name) else {
            continue;
        };
        let numeric: String = value
            .trim()
            .chars()
            .take_while(|c| c.is_ascii_digit() || *c == '.' || *c == '-' || *c == '+')
            .collect();
        if let Ok(score) = numeric.parse::<f64>() {
            raw.entry(metric).or_insert(score);
        }
    }
    let missing: Vec<String> = Metric::ALL
        .into_iter()
        .filter(|m| !raw.contains_key(m))
        .map(|m| m.name().to_string())
        .collect();
    if missing.is_empty() {
        Ok(raw)
    } else {
        Err(missing)
    }
}

/// Judges a bare result text. One retry with a corrective instruction is
/// issued if the completion is missing metric lines.
pub fn judge_text(
    text: &str,
    query_id: &str,
    method_label: &str,
    rubric: &Rubric,
    chat: &dyn ChatProvider,
    prompts: &PromptSet,
) -> Result<ScoreCard, EvalError> {
    if text.trim().is_empty() {
        return Err(EvalError::EmptyResult);
    }
    let base_user = prompts.judge.render_user(&[("result", text)]);
    let mut corrective: Option<Vec<String>> = None;
    for attempt in 0..2 {
        let user = match &corrective {
            None => base_user.clone(),
            Some(missing) => format!(
                "{base_user}\n\nYour previous reply was missing score line(s) for: {}. \
                 Reply again with exactly five `metric: score` lines.",
                missing.join(", ")
            ),
        };
        let request = crate::providers::ChatRequest::new(prompts.judge.system.clone(), user)
            .with_temperature(prompts.judge.temperature)
            .with_max_output(prompts.judge.max_output);
        let completion = chat.chat(&request)?;
        match parse_judgment(&completion) {
            Ok(raw) => {
                return Ok(ScoreCard::from_raw_metrics(
                    query_id,
                    method_label,
                    raw,
                    rubric,
                    ScoreSource::Judge,
                ));
            }
            Err(missing) if attempt == 0 => corrective = Some(missing),
            Err(missing) => {
                return Err(EvalError::MalformedJudgment {
                    missing,
                    raw: completion,
                });
            }
        }
    }
    unreachable!("judge loop returns within two attempts");
}

/// Judges a pipeline result under the rubric.
pub fn judge(
    result: &ModelingResult,
    rubric: &Rubric,
    chat: &dyn ChatProvider,
    prompts: &PromptSet,
    method_label: &str,
) -> Result<ScoreCard, EvalError> {
    judge_text(
        &result.text,
        &result.query_id,
        method_label,
        rubric,
        chat,
        prompts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::providers::ScriptedChat;

    fn judge_reply(c: u32, s: u32, k: u32, r: u32, d: u32) -> String {
        format!(
            "completeness: {c}\nstandardization: {s}\ncorrectness: {k}\nrelevance: {r}\nreadability: {d}\n"
        )
    }

    #[test]
    fn standard_rubric_sums_to_100() {
        let rubric = Rubric::standard();
        assert_eq!(rubric.total_points(), 100.0);
        assert_eq!(rubric.weight(Metric::Completeness), 30.0);
        assert_eq!(rubric.weight(Metric::Standardization), 20.0);
        assert_eq!(rubric.weight(Metric::Correctness), 30.0);
        assert_eq!(rubric.weight(Metric::Relevance), 10.0);
        assert_eq!(rubric.weight(Metric::Readability), 10.0);
    }

    #[test]
    fn rubric_rejects_bad_weight_sums() {
        let mut weights = BTreeMap::new();
        for metric in Metric::ALL {
            weights.insert(metric, 10.0);
        }
        assert!(matches!(
            Rubric::new(weights),
            Err(EvalError::InvalidRubric(_))
        ));
    }

    #[test]
    fn maximum_judgment_totals_100() {
        let chat = ScriptedChat::new().with_entry("*", judge_reply(30, 20, 30, 10, 10));
        let card = judge_text(
            "a result",
            "q1",
            "m",
            &Rubric::standard(),
            &chat,
            &PromptSet::builtin(),
        )
        .unwrap();
        assert_eq!(card.total, 100.0);
        assert!(card.warnings.is_empty());
    }

    #[test]
    fn mid_judgment_totals_sum_of_metrics() {
        let chat = ScriptedChat::new().with_entry("*", judge_reply(15, 10, 20, 5, 5));
        let card = judge_text(
            "a result",
            "q1",
            "m",
            &Rubric::standard(),
            &chat,
            &PromptSet::builtin(),
        )
        .unwrap();
        assert_eq!(card.total, 55.0);
        assert_eq!(card.per_metric[&Metric::Correctness], 20.0);
    }

    #[test]
    fn over_weight_scores_clamp_with_warning() {
        let chat = ScriptedChat::new().with_entry("*", judge_reply(30, 20, 35, 10, 10));
        let card = judge_text(
            "a result",
            "q1",
            "m",
            &Rubric::standard(),
            &chat,
            &PromptSet::builtin(),
        )
        .unwrap();
        assert_eq!(card.per_metric[&Metric::Correctness], 30.0);
        assert_eq!(card.total, 100.0);
        assert_eq!(card.warnings.len(), 1);
        assert!(card.warnings[0].contains("correctness"));
    }

    #[test]
    fn negative_scores_clamp_to_zero() {
        let chat = ScriptedChat::new()
            .with_entry("*", "completeness: -3\nstandardization: 5\ncorrectness: 10\nrelevance: 2\nreadability: 1");
        let card = judge_text(
            "a result",
            "q1",
            "m",
            &Rubric::standard(),
            &chat,
            &PromptSet::builtin(),
        )
        .unwrap();
        assert_eq!(card.per_metric[&Metric::Completeness], 0.0);
        assert_eq!(card.total, 18.0);
    }

    #[test]
    fn malformed_judgment_retries_once_then_fails() {
        let chat = ScriptedChat::new().with_entry("*", "completeness: 10\nno other lines");
        let err = judge_text(
            "a result",
            "q1",
            "m",
            &Rubric::standard(),
            &chat,
            &PromptSet::builtin(),
        )
        .unwrap_err();
        match err {
            EvalError::MalformedJudgment { missing, .. } => {
                assert_eq!(missing.len(), 4);
                assert!(missing.contains(&"standardization".to_string()));
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert_eq!(chat.calls().len(), 2);
        assert!(chat.calls()[1].user_content.contains("missing score line"));
    }

    #[test]
    fn tolerant_parsing_handles_markers_and_slash_max() {
        let completion = "- Completeness: 24/30\n* standardization: 15\nCORRECTNESS: 22.5\n relevance: 8 points\nreadability: 9\n";
        let raw = parse_judgment(completion).unwrap();
        assert_eq!(raw[&Metric::Completeness], 24.0);
        assert_eq!(raw[&Metric::Correctness], 22.5);
        assert_eq!(raw[&Metric::Relevance], 8.0);
    }

    #[test]
    fn empty_result_is_rejected_before_any_call() {
        let chat = ScriptedChat::new().with_entry("*", "never used");
        let err = judge_text(
            "  ",
            "q1",
            "m",
            &Rubric::standard(),
            &chat,
            &PromptSet::builtin(),
        )
        .unwrap_err();
        assert!(matches!(err, EvalError::EmptyResult));
        assert!(chat.calls().is_empty());
    }
}
