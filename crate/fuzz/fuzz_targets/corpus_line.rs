#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::eval::{parse_corpus, parse_corpus_line};

fuzz_target!(|text: &str| {
    if let Ok(example) = parse_corpus_line(text) {
        assert_eq!(example.to_line(), text);
    }
    let _ = parse_corpus(text);
});
