#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::extract::{find_span, Lexicon};

fuzz_target!(|data: (&str, &str)| {
    let (json, text) = data;
    if let Ok(lexicon) = Lexicon::from_json(json) {
        for class in lexicon.classes() {
            if let Some(m) = find_span(class, text) {
                assert!(m.start <= m.end && text.get(m.start..m.end).is_some());
            }
        }
    }
});
