#![no_main]

use libfuzzer_sys::fuzz_target;
use lmui_core::bundled;
use lmui_core::store::{AppSchema, Store};

fuzz_target!(|data: &[u8]| {
    let store = Store::new(AppSchema::from_tree(&bundled::tree()));
    let _ = store.replay(data);
});
