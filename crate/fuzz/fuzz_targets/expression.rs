#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::apps::calc;

fuzz_target!(|text: &str| {
    if text.len() > 512 {
        return;
    }
    if let Ok(value) = calc::evaluate(text) {
        let _ = calc::render(&value);
    }
});
