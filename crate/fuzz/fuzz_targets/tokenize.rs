#![no_main]

use std::sync::LazyLock;

use libfuzzer_sys::fuzz_target;
use lmui_core::bundled;
use lmui_core::text::{tokenize, Vocabulary};

static VOCAB: LazyLock<Vocabulary> = LazyLock::new(bundled::vocabulary);

fuzz_target!(|text: &str| {
    let seq = tokenize(text, &VOCAB);
    assert_eq!(seq.tokens.len(), seq.ids.len());
    assert_eq!(seq.ids.first(), Some(&VOCAB.cls_id()));
    assert_eq!(seq.ids.last(), Some(&VOCAB.sep_id()));
});
