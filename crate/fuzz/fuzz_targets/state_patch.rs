#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::StatePatch;

fuzz_target!(|text: &str| {
    if let Ok(patch) = StatePatch::from_json(text) {
        let canonical = patch.to_json();
        assert_eq!(StatePatch::from_json(&canonical).unwrap(), patch);
    }
});
