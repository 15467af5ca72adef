//! Corpus grammar and scoring, including the bundled end-to-end table.

use std::time::Instant;

use lmui_core::eval::{
    parse_corpus, parse_corpus_line, run_pipeline_eval, score, CorpusError, CorpusExample, EvalError,
};
use lmui_core::{bundled, Engine};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn extraction_lines_round_trip_byte_exactly() {
    let lines: Vec<&str> = bundled::EXTRACTION_CORPUS.lines().filter(|l| !l.is_empty()).collect();
    assert_eq!(lines.len(), 3);
    for line in lines {
        assert_eq!(parse_corpus_line(line).unwrap().to_line(), line);
    }
}

#[test]
fn extraction_line_fields() {
    let examples = parse_corpus(bundled::EXTRACTION_CORPUS).unwrap();
    let address = &examples[0];
    assert_eq!(address.task_prompt, "Extract the location");
    assert_eq!(address.expected, r#""Address": "Apartment 5A, 654 Peachtree Street in New Town""#);
    let arithmetic = &examples[1];
    assert_eq!(arithmetic.task_prompt, "Extract the arithmetic expression");
    assert_eq!(arithmetic.expected_value(), "$50 - $25");
    let weather = &examples[2];
    assert_eq!(weather.task_prompt, "Extract the location");
    assert_eq!(weather.expected_value(), "Zurich:B-CITY,Switzerland:B-COUNTRY");
    assert_eq!(weather.task_label, "Weather");
}

#[test]
fn malformed_lines() {
    for bad in [
        r#"Extract the location: "no separator here""#,
        "no input quotes || x",
        r#": "x" || y"#,
        r#"Extract: "x" || "#,
    ] {
        assert!(matches!(parse_corpus_line(bad), Err(CorpusError::MalformedLine { .. })), "{bad}");
    }
    let err = parse_corpus("#task=Weather\nok: \"x\" || y\nbroken line\n").unwrap_err();
    assert_eq!(err, CorpusError::MalformedLine { line: 3, reason: "missing ': \"' before the input".into() });
}

#[test]
fn arithmetic_spacing_is_ignored() {
    let e = parse_corpus_line(r#"Extract the arithmetic expression: "x" || "24/6""#).unwrap();
    assert!(e.is_arithmetic());
    assert_eq!(score(&[e.clone()], &["24 / 6".into()]).unwrap().total.passes, 1);
    let w = CorpusExample { task_label: "Weather".into(), ..e.clone() };
    assert_eq!(score(&[w], &["24 / 6".into()]).unwrap().total.passes, 0);
}

#[test]
fn score_basics() {
    let examples = parse_corpus(bundled::TASKS_CORPUS).unwrap();
    let perfect: Vec<String> = examples.iter().map(|e| e.expected.clone()).collect();
    let report = score(&examples, &perfect).unwrap();
    assert!(report.per_task.values().all(|s| s.accuracy == 1.0));
    assert_eq!(report.per_task.len(), 4);
    assert!(matches!(
        score(&examples, &perfect[1..]),
        Err(EvalError::LengthMismatch { .. })
    ));
    let empty = score(&[], &[]).unwrap();
    assert_eq!((empty.total.examples, empty.total.accuracy), (0, 0.0));
    assert!(empty.per_task.is_empty());
}

#[test]
fn score_is_order_independent() {
    let examples = parse_corpus(bundled::TASKS_CORPUS).unwrap();
    let produced: Vec<String> = examples
        .iter()
        .enumerate()
        .map(|(i, e)| if i % 3 == 0 { "wrong".into() } else { e.expected.clone() })
        .collect();
    let base = score(&examples, &produced).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let mut pairs: Vec<_> = examples.iter().cloned().zip(produced.iter().cloned()).collect();
        pairs.shuffle(&mut rng);
        let (e, p): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let shuffled = score(&e, &p).unwrap();
        for (task, s) in &base.per_task {
            assert_eq!(shuffled.per_task[task], *s);
        }
    }
}

#[test]
fn bundled_table_end_to_end() {
    let start = Instant::now();
    let engine = Engine::bundled();
    let examples = parse_corpus(bundled::REFERENCE_CORPUS).unwrap();
    let report = run_pipeline_eval(&engine, &examples).unwrap();
    assert!(start.elapsed().as_secs_f64() < 5.0);
    let classification = report.classification.unwrap();
    assert_eq!((classification.passes, classification.examples), (7, 7));
    assert_eq!((report.total.passes, report.total.examples), (6, 7));
    let failing: Vec<_> = report.verdicts.iter().filter(|v| !v.pass).collect();
    assert_eq!(failing.len(), 1);
    assert!(examples[5].input_text.contains("Great Pyramids"));
    assert_eq!(failing[0].expected, examples[5].expected);
}

#[test]
fn empty_and_trivial_pipeline_runs() {
    let engine = Engine::bundled();
    let empty = run_pipeline_eval(&engine, &[]).unwrap();
    assert_eq!(empty.total.examples, 0);
    let one = parse_corpus("#task=Weather\nExtract the location: \"What's the weather in Oslo?\" || Oslo\n").unwrap();
    let report = run_pipeline_eval(&engine, &one).unwrap();
    assert_eq!(report.total.accuracy, 1.0);
}

#[test]
fn table_rendering_lists_every_task() {
    let engine = Engine::bundled();
    let examples = parse_corpus(bundled::TASKS_CORPUS).unwrap();
    let report = run_pipeline_eval(&engine, &examples).unwrap();
    let table = report.render_table();
    for task in ["Weather", "AccountForm", "SimpleCalculator", "AdvancedCalculator", "total", "classification"] {
        assert!(table.lines().any(|l| l.starts_with(task)), "{task} missing from\n{table}");
    }
}

proptest! {
    #[test]
    fn well_formed_lines_round_trip(
        prompt in "[A-Za-z][A-Za-z ]{0,30}",
        input in "[A-Za-z0-9 ,.$?!']{1,60}",
        expected in "[A-Za-z0-9\" :,.$/*+-]{1,40}",
    ) {
        let line = format!("{prompt}: \"{input}\" || {expected}");
        prop_assume!(!expected.trim().is_empty());
        let e = parse_corpus_line(&line).unwrap();
        prop_assert_eq!(e.to_line(), line);
    }
}
