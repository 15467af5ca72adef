use serde::Serialize;

use super::vocab::{Vocabulary, CLS, CONTINUATION, SEP, UNK};

/// Words longer than this many characters are mapped straight to `[UNK]`.
const MAX_WORD_CHARS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub ids: Vec<u32>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of tokens between `[CLS]` and `[SEP]`.
    pub fn content_len(&self) -> usize {
        self.tokens.len().saturating_sub(2)
    }

    /// Reassembles the word sequence: drops the specials, glues `##` pieces
    /// onto their word and joins words with single spaces.
    pub fn detokenize(&self) -> String {
        let mut out = String::new();
        for token in &self.tokens[1..self.tokens.len() - 1] {
            match token.strip_prefix(CONTINUATION) {
                Some(rest) => out.push_str(rest),
                None => {
                    if !out.is_empty() {
                        out.push(' ');
                    }
                    out.push_str(token);
                }
            }
        }
        out
    }
}

fn is_isolated(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Lowercases and splits on whitespace, isolating every non-alphanumeric
/// character (punctuation, `$`, operators) as its own word.
pub fn pre_tokenize(text: &str) -> Vec<String> {
    let mut words = Vec::new();
    let mut current = String::new();
    for raw in text.chars() {
        let c = if raw == '\u{2019}' || raw == '\u{2018}' { '\'' } else { raw };
        if c.is_whitespace() || c.is_control() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
        } else if is_isolated(c) {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            words.extend(c.to_lowercase().map(String::from));
        } else {
            current.extend(c.to_lowercase());
        }
    }
    if !current.is_empty() {
        words.push(current);
    }
    words
}

/// The text as the tokenizer sees it: pre-tokenized words joined by spaces.
pub fn normalize(text: &str) -> String {
    pre_tokenize(text).join(" ")
}

/// Greedy longest-match segmentation of one word. `None` when some suffix
/// cannot be matched.
fn wordpiece(word: &str, vocab: &Vocabulary) -> Option<Vec<String>> {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() > MAX_WORD_CHARS {
        return None;
    }
    let mut pieces = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let mut end = chars.len();
        let mut found = None;
        while end > start {
            let mut candidate: String = chars[start..end].iter().collect();
            if start > 0 {
                candidate.insert_str(0, CONTINUATION);
            }
            if vocab.contains(&candidate) {
                found = Some(candidate);
                break;
            }
            end -= 1;
        }
        pieces.push(found?);
        start = end;
    }
    Some(pieces)
}

pub fn tokenize(text: &str, vocab: &Vocabulary) -> TokenSequence {
    let mut tokens = vec![CLS.to_string()];
    for word in pre_tokenize(text) {
        match wordpiece(&word, vocab) {
            Some(pieces) => tokens.extend(pieces),
            None => tokens.push(UNK.to_string()),
        }
    }
    tokens.push(SEP.to_string());
    let ids = tokens
        .iter()
        .map(|t| vocab.id(t).unwrap_or_else(|| vocab.unk_id()))
        .collect();
    TokenSequence { tokens, ids }
}
