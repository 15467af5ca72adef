#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::tree::parse_manifest;

fuzz_target!(|data: &[u8]| {
    if let Ok(manifest) = parse_manifest(data) {
        let again = serde_json::to_vec(&manifest).unwrap();
        assert_eq!(parse_manifest(&again).unwrap(), manifest);
    }
});
