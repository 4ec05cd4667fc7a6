//! Score tables and the comparison statistics computed over them.
//!
//! A [`ScoreTable`] holds method rows by question columns of total scores,
//! imported from (and exported to) CSV with a `method,Q1,...` header.
//! [`winners_per_question`] reports the per-column argmax set (ties kept)
//! and [`gain_frequencies`] counts the sign of the score change that the
//! knowledge-augmented modes achieve over the direct-answer baseline, per
//! base model.

use super::{EvalError, Metric, ScoreCard};
use crate::pipeline::RunMode;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

/// A rectangular method-by-question table of total scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    methods: Vec<String>,
    questions: Vec<String>,
    cells: Vec<Vec<f64>>,
}

impl ScoreTable {
    pub fn new(
        methods: Vec<String>,
        questions: Vec<String>,
        cells: Vec<Vec<f64>>,
    ) -> Result<Self, EvalError> {
        if cells.len() != methods.len() {
            return Err(EvalError::RaggedTable {
                row: "<table>".into(),
                got: cells.len(),
                want: methods.len(),
            });
        }
        for (method, row) in methods.iter().zip(&cells) {
            if row.len() != questions.len() {
                return Err(EvalError::RaggedTable {
                    row: method.clone(),
                    got: row.len(),
                    want: questions.len(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for method in &methods {
            if !seen.insert(method.clone()) {
                return Err(EvalError::Csv(format!("duplicate method row {method:?}")));
            }
        }
        Ok(Self {
            methods,
            questions,
            cells,
        })
    }

    pub fn methods(&self) -> &[String] {
        &self.methods
    }

    pub fn questions(&self) -> &[String] {
        &self.questions
    }

    pub fn get(&self, method: &str, question: &str) -> Option<f64> {
        let row = self.methods.iter().position(|m| m == method)?;
        let col = self.questions.iter().position(|q| q == question)?;
        Some(self.cells[row][col])
    }

    /// Parses the CSV wire format: header `method,Q1,...`, one method row
    /// per line.
    pub fn from_csv_str(text: &str) -> Result<Self, EvalError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(|e| EvalError::Csv(e.to_string()))?
            .clone();
        if header.len() < 2 {
            return Err(EvalError::Csv(
                "header must be `method` followed by at least one question column".into(),
            ));
        }
        let questions: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

        let mut methods = Vec::new();
        let mut cells = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| EvalError::Csv(e.to_string()))?;
            let method = record
                .get(0)
                .unwrap_or_default()
                .trim()
                .to_string();
            if record.len() != questions.len() + 1 {
                return Err(EvalError::RaggedTable {
                    row: method,
                    got: record.len().saturating_sub(1),
                    want: questions.len(),
                });
            }
            let mut row = Vec::with_capacity(questions.len());
            for (question, cell) in questions.iter().zip(record.iter().skip(1)) {
                let value: f64 =
                    cell.trim()
                        .parse()
                        .map_err(|_| EvalError::NonNumericCell {
                            row: method.clone(),
                            column: question.clone(),
                            value: cell.to_string(),
                        })?;
                row.push(value);
            }
            methods.push(method);
            cells.push(row);
        }
        Self::new(methods, questions, cells)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    /// Renders the CSV wire format; re-importing reproduces the table.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method");
        for question in &self.questions {
            out.push(',');
            out.push_str(question);
        }
        out.push('\n');
        for (method, row) in self.methods.iter().zip(&self.cells) {
            out.push_str(method);
            for value in row {
                out.push(',');
                out.push_str(&value.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Assembles a table from judged score cards when they form a complete
    /// method-by-question grid; `None` otherwise.
    pub fn try_from_cards(cards: &[ScoreCard]) -> Option<Self> {
        if cards.is_empty() {
            return None;
        }
        let methods: Vec<String> = {
            let mut seen = Vec::new();
            for card in cards {
                if !seen.contains(&card.method_label) {
                    seen.push(card.method_label.clone());
                }
            }
            seen
        };
        let questions: Vec<String> = {
            let mut seen = Vec::new();
            for card in cards {
                if !seen.contains(&card.query_id) {
                    seen.push(card.query_id.clone());
                }
            }
            seen
        };
        let mut cells = vec![vec![f64::NAN; questions.len()]; methods.len()];
        for card in cards {
            let row = methods.iter().position(|m| *m == card.method_label)?;
            let col = questions.iter().position(|q| *q == card.query_id)?;
            cells[row][col] = card.total;
        }
        if cells.iter().flatten().any(|v| v.is_nan()) {
            return None;
        }
        Self::new(methods, questions, cells).ok()
    }
}

/// Per question, the set of methods achieving the column maximum.
pub fn winners_per_question(table: &ScoreTable) -> BTreeMap<String, BTreeSet<String>> {
    let mut winners = BTreeMap::new();
    for (col, question) in table.questions.iter().enumerate() {
        let best = table
            .cells
            .iter()
            .map(|row| row[col])
            .fold(f64::NEG_INFINITY, f64::max);
        let set: BTreeSet<String> = table
            .methods
            .iter()
            .zip(&table.cells)
            .filter(|(_, row)| row[col] == best)
            .map(|(method, _)| method.clone())
            .collect();
        winners.insert(question.clone(), set);
    }
    winners
}

/// Sign counts for one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GainCounts {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl GainCounts {
    fn record(&mut self, delta: f64) {
        if delta > 0.0 {
            self.positive += 1;
        } else if delta < 0.0 {
            self.negative += 1;
        } else {
            self.zero += 1;
        }
    }

    pub fn total(&self) -> usize {
        self.positive + self.negative + self.zero
    }
}

/// Gains of the two knowledge-augmented modes over the direct baseline.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BaseGains {
    /// Graph-retrieval mode minus direct baseline.
    pub rag_vs_direct: GainCounts,
    /// Generated-knowledge mode minus direct baseline.
    pub ma_vs_direct: GainCounts,
}

/// Gain sign frequencies per base model plus the overall totals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GainSummary {
    pub per_base: BTreeMap<String, BaseGains>,
    pub overall: BaseGains,
}

/// Derives a `(base model, mode)` grouping from the `D`/`G`/`T` label
/// suffix convention (direct, graph-RAG, agent-chain).
pub fn suffix_grouping(
    methods: &[String],
) -> Result<BTreeMap<String, (String, RunMode)>, EvalError> {
    let mut grouping = BTreeMap::new();
    for label in methods {
        let mode = match label.chars().last() {
            Some('D') => RunMode::PureLlm,
            Some('G') => RunMode::MagRag,
            Some('T') => RunMode::PureMa,
            _ => return Err(EvalError::UnknownModeSuffix(label.clone())),
        };
        let base = label[..label.len() - 1].to_string();
        if base.is_empty() {
            return Err(EvalError::UnknownModeSuffix(label.clone()));
        }
        grouping.insert(label.clone(), (base, mode));
    }
    Ok(grouping)
}

/// Counts, over every `(base model, question)` pair, the sign of the score
/// gain each knowledge-augmented mode achieves over the direct baseline.
/// Every base model in the grouping must have all three mode rows.
pub fn gain_frequencies(
    table: &ScoreTable,
    grouping: &BTreeMap<String, (String, RunMode)>,
) -> Result<GainSummary, EvalError> {
    let mut rows_per_base: BTreeMap<&str, BTreeMap<RunMode, &str>> = BTreeMap::new();
    for (label, (base, mode)) in grouping {
        rows_per_base
            .entry(base.as_str())
            .or_default()
            .insert(*mode, label.as_str());
    }

    let mut summary = GainSummary::default();
    for (base, rows) in rows_per_base {
        let row_for = |mode: RunMode, name: &str| {
            rows.get(&mode)
                .copied()
                .ok_or_else(|| EvalError::IncompleteGrouping {
                    base: base.to_string(),
                    missing: name.to_string(),
                })
        };
        let direct = row_for(RunMode::PureLlm, "direct (D)")?;
        let rag = row_for(RunMode::MagRag, "graph-RAG (G)")?;
        let ma = row_for(RunMode::PureMa, "agent-chain (T)")?;

        let mut gains = BaseGains::default();
        for question in &table.questions {
            let cell = |method: &str| {
                table
                    .get(method, question)
                    .expect("grouping labels come from the table")
            };
            let d = cell(direct);
            gains.rag_vs_direct.record(cell(rag) - d);
            gains.ma_vs_direct.record(cell(ma) - d);
        }
        summary.overall.rag_vs_direct.positive += gains.rag_vs_direct.positive;
        summary.overall.rag_vs_direct.negative += gains.rag_vs_direct.negative;
        summary.overall.rag_vs_direct.zero += gains.rag_vs_direct.zero;
        summary.overall.ma_vs_direct.positive += gains.ma_vs_direct.positive;
        summary.overall.ma_vs_direct.negative += gains.ma_vs_direct.negative;
        summary.overall.ma_vs_direct.zero += gains.ma_vs_direct.zero;
        summary.per_base.insert(base.to_string(), gains);
    }
    Ok(summary)
}

/// Renders the evaluation report: fresh score cards with per-metric
/// aggregates when available, then table statistics when a score table is
/// present.
pub fn render_report(
    cards: &[ScoreCard],
    table: Option<&ScoreTable>,
    gains: Option<&GainSummary>,
) -> String {
    let mut out = String::from("# Evaluation report\n");

    if !cards.is_empty() {
        out.push_str("\n## Score cards\n\n");
        out.push_str("| query | method | completeness | standardization | correctness | relevance | readability | total |\n");
        out.push_str("|---|---|---|---|---|---|---|---|\n");
        for card in cards {
            out.push_str(&format!("| {} | {} |", card.query_id, card.method_label));
            for metric in Metric::ALL {
                out.push_str(&format!(
                    " {} |",
                    card.per_metric.get(&metric).copied().unwrap_or(0.0)
                ));
            }
            out.push_str(&format!(" {} |\n", card.total));
        }
        for card in cards {
            for warning in &card.warnings {
                out.push_str(&format!(
                    "\n> warning ({} / {}): {warning}\n",
                    card.query_id, card.method_label
                ));
            }
        }

        out.push_str("\n### Per-metric averages\n\n| metric | mean |\n|---|---|\n");
        for metric in Metric::ALL {
            let mean = cards
                .iter()
                .filter_map(|c| c.per_metric.get(&metric))
                .sum::<f64>()
                / cards.len() as f64;
            out.push_str(&format!("| {metric} | {mean:.2} |\n"));
        }
    }

    if let Some(table) = table {
        out.push_str("\n## Score table\n\n|  |");
        for question in table.questions() {
            out.push_str(&format!(" {question} |"));
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(table.questions().len()));
        out.push('\n');
        for method in table.methods() {
            out.push_str(&format!("| {method} |"));
            for question in table.questions() {
                out.push_str(&format!(" {} |", table.get(method, question).unwrap()));
            }
            out.push('\n');
        }

        out.push_str("\n## Winners per question\n\n| question | winner(s) | score |\n|---|---|---|\n");
        let winners = winners_per_question(table);
        for question in table.questions() {
            let set = &winners[question];
            let score = set
                .iter()
                .next()
                .and_then(|m| table.get(m, question))
                .unwrap_or(f64::NAN);
            out.push_str(&format!(
                "| {question} | {} | {score} |\n",
                set.iter().cloned().collect::<Vec<_>>().join(", ")
            ));
        }
    }

    if let Some(summary) = gains {
        out.push_str(
            "\n## Gain frequencies vs direct baseline\n\n| base | comparison | positive | negative | zero |\n|---|---|---|---|---|\n",
        );
        for (base, gains) in &summary.per_base {
            out.push_str(&format!(
                "| {base} | graph-RAG - direct | {} | {} | {} |\n",
                gains.rag_vs_direct.positive,
                gains.rag_vs_direct.negative,
                gains.rag_vs_direct.zero
            ));
            out.push_str(&format!(
                "| {base} | agent-chain - direct | {} | {} | {} |\n",
                gains.ma_vs_direct.positive, gains.ma_vs_direct.negative, gains.ma_vs_direct.zero
            ));
        }
        out.push_str(&format!(
            "| **all** | graph-RAG - direct | {} | {} | {} |\n",
            summary.overall.rag_vs_direct.positive,
            summary.overall.rag_vs_direct.negative,
            summary.overall.rag_vs_direct.zero
        ));
        out.push_str(&format!(
            "| **all** | agent-chain - direct | {} | {} | {} |\n",
            summary.overall.ma_vs_direct.positive,
            summary.overall.ma_vs_direct.negative,
            summary.overall.ma_vs_direct.zero
        ));
    }

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{Rubric, ScoreSource};

    fn small_table() -> ScoreTable {
        ScoreTable::from_csv_str(
            "method,Q1,Q2,Q3\nAD,10,20,30\nAG,15,20,25\nAT,5,20,35\n",
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip_is_identity() {
        let table = small_table();
        let again = ScoreTable::from_csv_str(&table.to_csv()).unwrap();
        assert_eq!(table, again);
    }

    #[test]
    fn missing_cell_is_a_ragged_table_naming_the_row() {
        let err = ScoreTable::from_csv_str("method,Q1,Q2\nAD,10\n").unwrap_err();
        match err {
            EvalError::RaggedTable { row, got, want } => {
                assert_eq!(row, "AD");
                assert_eq!(got, 1);
                assert_eq!(want, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_coordinates() {
        let err = ScoreTable::from_csv_str("method,Q1,Q2\nAD,10,oops\n").unwrap_err();
        match err {
            EvalError::NonNumericCell { row, column, value } => {
                assert_eq!(row, "AD");
                assert_eq!(column, "Q2");
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn winners_keep_ties_as_sets() {
        let winners = winners_per_question(&small_table());
        assert_eq!(
            winners["Q1"],
            BTreeSet::from(["AG".to_string()])
        );
        assert_eq!(
            winners["Q2"],
            BTreeSet::from(["AD".to_string(), "AG".to_string(), "AT".to_string()])
        );
        assert_eq!(winners["Q3"], BTreeSet::from(["AT".to_string()]));
    }

    #[test]
    fn single_row_table_wins_everywhere() {
        let table = ScoreTable::from_csv_str("method,Q1,Q2\nonlyD,1,2\n").unwrap();
        let winners = winners_per_question(&table);
        for question in table.questions() {
            assert_eq!(winners[question], BTreeSet::from(["onlyD".to_string()]));
        }
    }

    #[test]
    fn suffix_grouping_parses_modes() {
        let grouping = suffix_grouping(&[
            "HD".to_string(),
            "HG".to_string(),
            "HT".to_string(),
            "G3.5D".to_string(),
        ])
        .unwrap();
        assert_eq!(grouping["HD"], ("H".to_string(), RunMode::PureLlm));
        assert_eq!(grouping["HG"], ("H".to_string(), RunMode::MagRag));
        assert_eq!(grouping["HT"], ("H".to_string(), RunMode::PureMa));
        assert_eq!(grouping["G3.5D"], ("G3.5".to_string(), RunMode::PureLlm));
        assert!(matches!(
            suffix_grouping(&["weird".to_string()]),
            Err(EvalError::UnknownModeSuffix(_))
        ));
    }

    #[test]
    fn gains_count_signs_per_base() {
        let table = small_table();
        let grouping = suffix_grouping(table.methods()).unwrap();
        let summary = gain_frequencies(&table, &grouping).unwrap();
        let gains = &summary.per_base["A"];
        // G - D per question: +5, 0, -5; T - D: -5, 0, +5.
        assert_eq!(
            gains.rag_vs_direct,
            GainCounts {
                positive: 1,
                negative: 1,
                zero: 1
            }
        );
        assert_eq!(
            gains.ma_vs_direct,
            GainCounts {
                positive: 1,
                negative: 1,
                zero: 1
            }
        );
        assert_eq!(summary.overall.rag_vs_direct.total(), 3);
    }

    #[test]
    fn equal_rows_give_all_zero_gains() {
        let table =
            ScoreTable::from_csv_str("method,Q1,Q2\nXD,10,20\nXG,10,20\nXT,10,20\n").unwrap();
        let grouping = suffix_grouping(table.methods()).unwrap();
        let summary = gain_frequencies(&table, &grouping).unwrap();
        assert_eq!(summary.per_base["X"].rag_vs_direct.zero, 2);
        assert_eq!(summary.per_base["X"].ma_vs_direct.zero, 2);
    }

    #[test]
    fn missing_mode_row_is_incomplete_grouping() {
        let table = ScoreTable::from_csv_str("method,Q1\nXD,10\nXG,11\n").unwrap();
        let grouping = suffix_grouping(table.methods()).unwrap();
        let err = gain_frequencies(&table, &grouping).unwrap_err();
        assert!(matches!(err, EvalError::IncompleteGrouping { base, .. } if base == "X"));
    }

    #[test]
    fn table_from_complete_card_grid() {
        let rubric = Rubric::standard();
        let mut cards = Vec::new();
        for (method, query, score) in [
            ("m1", "q1", 10.0),
            ("m1", "q2", 20.0),
            ("m2", "q1", 30.0),
            ("m2", "q2", 15.0),
        ] {
            let mut per_metric = BTreeMap::new();
            per_metric.insert(Metric::Completeness, score);
            cards.push(ScoreCard::from_raw_metrics(
                query,
                method,
                per_metric,
                &rubric,
                ScoreSource::Judge,
            ));
        }
        let table = ScoreTable::try_from_cards(&cards).unwrap();
        assert_eq!(table.get("m2", "q1"), Some(30.0));

        // An incomplete grid is not a table.
        cards.pop();
        assert!(ScoreTable::try_from_cards(&cards).is_none());
    }

    #[test]
    fn report_renders_all_sections() {
        let table = small_table();
        let grouping = suffix_grouping(table.methods()).unwrap();
        let summary = gain_frequencies(&table, &grouping).unwrap();
        let report = render_report(&[], Some(&table), Some(&summary));
        assert!(report.contains("## Score table"));
        assert!(report.contains("## Winners per question"));
        assert!(report.contains("## Gain frequencies"));
        assert!(report.contains("| Q2 | AD, AG, AT | 20 |"));
    }
}
