#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::text::Vocabulary;

fuzz_target!(|text: &str| {
    if let Ok(vocab) = Vocabulary::from_text(text) {
        assert_eq!(Vocabulary::from_text(&vocab.to_text()).unwrap().to_text(), vocab.to_text());
    }
});
