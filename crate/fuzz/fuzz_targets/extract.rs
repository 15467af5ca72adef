#![no_main]

use std::sync::LazyLock;

use libfuzzer_sys::fuzz_target;
use lmui_core::extract::Backend;
use lmui_core::{bundled, classify, AnnotationTree, Extractor};

static ENGINE: LazyLock<(AnnotationTree, Extractor)> =
    LazyLock::new(|| (bundled::tree(), bundled::extractor()));

fuzz_target!(|text: &str| {
    let (tree, extractor) = &*ENGINE;
    let Ok(result) = classify(tree, text) else { return };
    let Ok(patch) = extractor.extract_all(tree, &result, text) else { return };
    let app = tree.node(&result.app_id).unwrap();
    for (name, value) in &patch.config {
        let node = app.children.iter().find(|c| &c.name == name).expect("key is a parameter");
        if extractor.route(node) == Backend::RuleSpan {
            assert!(text.contains(value.as_str()));
        }
    }
});
