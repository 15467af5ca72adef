//! Regenerates `data/vocab.txt` from the bundled manifest, lexicon and corpora.
//!
//! `cargo run -p lmui-core --example build_vocab > crates/core/data/vocab.txt`

fn main() {
    print!("{}", lmui_core::bundled::generate_vocabulary().to_text());
}
