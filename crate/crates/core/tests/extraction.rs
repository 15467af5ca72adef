//! Rule backends and patch assembly on the bundled manifest.

use std::sync::LazyLock;

use lmui_core::extract::{Backend, ExtractError, ExtractionRequest};
use lmui_core::{bundled, classify, AnnotationTree, Extractor, StatePatch};
use proptest::prelude::*;

static SHARED: LazyLock<(AnnotationTree, Extractor)> =
    LazyLock::new(|| (bundled::tree(), bundled::extractor()));

fn answer(tree: &AnnotationTree, extractor: &Extractor, id: &str, text: &str) -> Option<String> {
    let node = tree.node(id).unwrap();
    let req = ExtractionRequest::new(text, node).unwrap();
    let a = extractor.extract(&req).unwrap();
    assert_eq!(a.value.is_none(), a.confidence == 0.0);
    a.value
}

#[test]
fn span_examples() {
    let (tree, ex) = (bundled::tree(), bundled::extractor());
    let text = "I'm registered under the name Alex J. Turner, but everyone sends their regards to my place at 768 Rolling Rock Street, and for a quicker response, they hit me up at alex.turns@rocknmail.com.";
    assert_eq!(answer(&tree, &ex, "AccountForm.Email", text).as_deref(), Some("alex.turns@rocknmail.com"));
    let text = "Could you tell me if I need an umbrella for my walk today around the canals of Amsterdam, Netherlands?";
    assert_eq!(answer(&tree, &ex, "Weather.City", text).as_deref(), Some("Amsterdam, Netherlands"));
    assert_eq!(answer(&tree, &ex, "AccountForm.Address", "no address mentioned here"), None);
}

#[test]
fn arithmetic_examples() {
    let (tree, ex) = (bundled::tree(), bundled::extractor());
    let id = "Calculator.promptSequence";
    let text = "If you have $50 and spend $25, how much money do you have left?";
    assert_eq!(answer(&tree, &ex, id, text).as_deref(), Some("$50 - $25"));
    let text = "I've got 24 cupcakes, and I need to divide them evenly among my 6 friends.";
    assert_eq!(answer(&tree, &ex, id, text).as_deref(), Some("24/6"));
    assert_eq!(answer(&tree, &ex, id, "what a lovely day"), None);
    let node = tree.node(id).unwrap();
    assert_eq!(ex.route(node), Backend::RuleArithmetic);
}

#[test]
fn full_account_row() {
    let (tree, ex) = (bundled::tree(), bundled::extractor());
    let text = "I'm registered under the name Alex J. Turner, but everyone sends their regards to my place at 768 Rolling Rock Street, and for a quicker response, they hit me up at alex.turns@rocknmail.com.";
    let result = classify(&tree, text).unwrap();
    let patch = ex.extract_all(&tree, &result, text).unwrap();
    let want = StatePatch::new("AccountForm")
        .with("Name", "Alex J. Turner")
        .with("Address", "768 Rolling Rock Street")
        .with("Email", "alex.turns@rocknmail.com");
    assert_eq!(patch, want);
}

#[test]
fn partial_and_empty_extraction() {
    let (tree, ex) = (bundled::tree(), bundled::extractor());
    let text = "Sign me up for an account, my email is pat@example.org";
    let result = classify(&tree, text).unwrap();
    assert_eq!(result.app_id, "AccountForm");
    let patch = ex.extract_all(&tree, &result, text).unwrap();
    assert_eq!(patch.config.keys().collect::<Vec<_>>(), ["Email"]);

    let text = "is it going to rain today";
    let result = classify(&tree, text).unwrap();
    assert_eq!(result.app_id, "Weather");
    assert_eq!(
        ex.extract_all(&tree, &result, text),
        Err(ExtractError::NoParametersExtracted { app: "Weather".into() })
    );
}

#[test]
fn application_nodes_are_not_extraction_targets() {
    let tree = bundled::tree();
    let app = tree.node("Weather").unwrap();
    assert!(matches!(
        ExtractionRequest::new("x", app),
        Err(ExtractError::NotAParameter(_))
    ));
}

#[test]
fn rule_backends_are_deterministic() {
    let (tree, ex) = (bundled::tree(), bundled::extractor());
    for e in lmui_core::eval::parse_corpus(bundled::TASKS_CORPUS).unwrap() {
        let r = classify(&tree, &e.input_text).unwrap();
        assert_eq!(
            ex.extract_all(&tree, &r, &e.input_text),
            ex.extract_all(&tree, &r, &e.input_text)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn patches_stay_within_the_schema(text in "[A-Za-z0-9 ,.$@'/+*-]{1,80}|(my name is|I live at|weather in|divide|spent) [A-Z][a-z]{2,8}( [0-9]{1,3})?") {
        let (tree, ex) = &*SHARED;
        let Ok(result) = classify(tree, &text) else { return Ok(()) };
        match ex.extract_all(tree, &result, &text) {
            Ok(patch) => {
                let app = tree.node(&result.app_id).unwrap();
                prop_assert_eq!(&patch.current_app, &app.name);
                prop_assert!(!patch.config.is_empty());
                for (k, v) in &patch.config {
                    let node = app.children.iter().find(|c| &c.name == k);
                    prop_assert!(node.is_some(), "unknown key {}", k);
                    if ex.route(node.unwrap()) == Backend::RuleSpan {
                        prop_assert!(text.contains(v.as_str()), "{:?} not in {:?}", v, text);
                    }
                }
                let round = StatePatch::from_json(&patch.to_json()).unwrap();
                prop_assert_eq!(round, patch);
            }
            Err(ExtractError::NoParametersExtracted { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
