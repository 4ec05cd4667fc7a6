//! Statistics over the bundled benchmark score table: twelve method rows
//! (four base models x three modes) by ten questions.

use magrag_core::eval::{
    gain_frequencies, suffix_grouping, winners_per_question, ScoreTable,
};
use std::collections::BTreeSet;
use std::path::PathBuf;

fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/benchmark_scores.csv")
}

fn fixture_table() -> ScoreTable {
    ScoreTable::from_csv_path(&fixture_path()).expect("bundled score fixture parses")
}

#[test]
fn fixture_is_twelve_methods_by_ten_questions() {
    let table = fixture_table();
    assert_eq!(table.methods().len(), 12);
    assert_eq!(table.questions().len(), 10);
    assert_eq!(table.get("SG", "Q8"), Some(96.0));
    assert_eq!(table.get("HD", "Q1"), Some(82.0));
    assert_eq!(table.get("G4T", "Q10"), Some(68.0));
}

#[test]
fn fixture_winners_match_the_published_maxima() {
    let table = fixture_table();
    let winners = winners_per_question(&table);
    let set = |methods: &[&str]| {
        methods
            .iter()
            .map(|m| m.to_string())
            .collect::<BTreeSet<String>>()
    };
    assert_eq!(winners["Q1"], set(&["G4G"]));
    assert_eq!(winners["Q2"], set(&["G4T"]));
    assert_eq!(winners["Q3"], set(&["SG"]));
    assert_eq!(winners["Q4"], set(&["SG"]));
    assert_eq!(winners["Q5"], set(&["SG"]));
    assert_eq!(winners["Q6"], set(&["SG"]));
    assert_eq!(winners["Q7"], set(&["SD"]));
    assert_eq!(winners["Q8"], set(&["SG"]));
    assert_eq!(winners["Q9"], set(&["HT", "SG"]));
    assert_eq!(winners["Q10"], set(&["SG"]));
}

#[test]
fn graph_rag_methods_win_or_tie_eight_of_ten() {
    let table = fixture_table();
    let winners = winners_per_question(&table);
    let rag_wins = table
        .questions()
        .iter()
        .filter(|q| winners[*q].iter().any(|m| m.ends_with('G')))
        .count();
    assert_eq!(rag_wins, 8);
}

#[test]
fn gain_signs_match_hand_computed_cells() {
    let table = fixture_table();
    let grouping = suffix_grouping(table.methods()).unwrap();
    let summary = gain_frequencies(&table, &grouping).unwrap();

    // Spot checks straight off the fixture cells.
    assert_eq!(
        table.get("HG", "Q3").unwrap() - table.get("HD", "Q3").unwrap(),
        30.0
    );
    assert_eq!(
        table.get("G3.5G", "Q1").unwrap() - table.get("G3.5D", "Q1").unwrap(),
        65.0
    );

    // Independent recomputation of the per-base sign counts.
    for (base, gains) in &summary.per_base {
        let mut expect_pos = 0;
        let mut expect_neg = 0;
        let mut expect_zero = 0;
        for question in table.questions() {
            let d = table.get(&format!("{base}D"), question).unwrap();
            let g = table.get(&format!("{base}G"), question).unwrap();
            match g.partial_cmp(&d).unwrap() {
                std::cmp::Ordering::Greater => expect_pos += 1,
                std::cmp::Ordering::Less => expect_neg += 1,
                std::cmp::Ordering::Equal => expect_zero += 1,
            }
        }
        assert_eq!(gains.rag_vs_direct.positive, expect_pos, "base {base}");
        assert_eq!(gains.rag_vs_direct.negative, expect_neg, "base {base}");
        assert_eq!(gains.rag_vs_direct.zero, expect_zero, "base {base}");
        assert_eq!(gains.rag_vs_direct.total(), 10);
        assert_eq!(gains.ma_vs_direct.total(), 10);
    }
    assert_eq!(summary.per_base.len(), 4);
    assert_eq!(summary.overall.rag_vs_direct.total(), 40);
}

#[test]
fn fixture_round_trips_through_csv_export() {
    let table = fixture_table();
    let again = ScoreTable::from_csv_str(&table.to_csv()).unwrap();
    assert_eq!(table, again);
}

mod random_table_properties {
    use magrag_core::eval::{gain_frequencies, suffix_grouping, winners_per_question, ScoreTable};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn arb_table() -> impl Strategy<Value = ScoreTable> {
        (2usize..5, 1usize..8).prop_flat_map(|(bases, questions)| {
            prop::collection::vec(0.0..100.0f64, bases * 3 * questions).prop_map(
                move |values| {
                    let methods: Vec<String> = (0..bases)
                        .flat_map(|b| {
                            ["D", "G", "T"].iter().map(move |m| format!("B{b}{m}"))
                        })
                        .collect();
                    let question_names: Vec<String> =
                        (1..=questions).map(|q| format!("Q{q}")).collect();
                    let cells: Vec<Vec<f64>> = values
                        .chunks(questions)
                        .map(|chunk| chunk.to_vec())
                        .collect();
                    ScoreTable::new(methods, question_names, cells).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn winners_agree_with_a_max_scan_oracle(table in arb_table()) {
            let winners = winners_per_question(&table);
            for question in table.questions() {
                // Independent max scan.
                let mut best = f64::NEG_INFINITY;
                for method in table.methods() {
                    best = best.max(table.get(method, question).unwrap());
                }
                let expected: BTreeSet<String> = table
                    .methods()
                    .iter()
                    .filter(|m| table.get(m, question).unwrap() == best)
                    .cloned()
                    .collect();
                prop_assert_eq!(&winners[question], &expected);
            }
        }

        #[test]
        fn swapping_g_and_d_rows_negates_every_gain_sign(table in arb_table()) {
            let grouping = suffix_grouping(table.methods()).unwrap();
            let original = gain_frequencies(&table, &grouping).unwrap();

            // Swap each base's D and G rows by relabeling.
            let swapped_methods: Vec<String> = table
                .methods()
                .iter()
                .map(|m| {
                    if let Some(base) = m.strip_suffix('D') {
                        format!("{base}G")
                    } else if let Some(base) = m.strip_suffix('G') {
                        format!("{base}D")
                    } else {
                        m.clone()
                    }
                })
                .collect();
            let cells: Vec<Vec<f64>> = table
                .methods()
                .iter()
                .map(|m| {
                    table
                        .questions()
                        .iter()
                        .map(|q| table.get(m, q).unwrap())
                        .collect()
                })
                .collect();
            let swapped =
                ScoreTable::new(swapped_methods, table.questions().to_vec(), cells).unwrap();
            let regroup = suffix_grouping(swapped.methods()).unwrap();
            let negated = gain_frequencies(&swapped, &regroup).unwrap();

            for (base, gains) in &original.per_base {
                let other = &negated.per_base[base];
                prop_assert_eq!(gains.rag_vs_direct.positive, other.rag_vs_direct.negative);
                prop_assert_eq!(gains.rag_vs_direct.negative, other.rag_vs_direct.positive);
                prop_assert_eq!(gains.rag_vs_direct.zero, other.rag_vs_direct.zero);
            }
        }
    }
}
