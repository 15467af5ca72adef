use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const UNK: &str = "[UNK]";
pub const CONTINUATION: &str = "##";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VocabError {
    #[error("vocabulary is missing special token {0}")]
    MissingSpecial(&'static str),
    #[error("duplicate vocabulary entry {token:?} on line {line}")]
    Duplicate { token: String, line: usize },
    #[error("empty vocabulary entry on line {0}")]
    EmptyEntry(usize),
}

/// Token table: `entries[k]` has id `k`.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    entries: Vec<String>,
    lookup: HashMap<String, u32>,
    cls: u32,
    sep: u32,
    unk: u32,
}

impl Vocabulary {
    pub fn new<I, S>(entries: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let entries: Vec<String> = entries.into_iter().map(Into::into).collect();
        let mut lookup = HashMap::with_capacity(entries.len());
        for (i, token) in entries.iter().enumerate() {
            if token.is_empty() {
                return Err(VocabError::EmptyEntry(i));
            }
            if lookup.insert(token.clone(), i as u32).is_some() {
                return Err(VocabError::Duplicate {
                    token: token.clone(),
                    line: i,
                });
            }
        }
        let special = |name: &'static str| {
            lookup
                .get(name)
                .copied()
                .ok_or(VocabError::MissingSpecial(name))
        };
        Ok(Self {
            cls: special(CLS)?,
            sep: special(SEP)?,
            unk: special(UNK)?,
            entries,
            lookup,
        })
    }

    /// Parses the one-token-per-line file format; line number is the id.
    pub fn from_text(text: &str) -> Result<Self, VocabError> {
        Self::new(text.lines().map(|l| l.trim_end_matches('\r')))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(entry);
            out.push('\n');
        }
        out
    }

    /// Builds a vocabulary that covers every word of `texts`.
    ///
    /// Layout: the three specials, then single characters (plain and `##`
    /// continuation) for lowercase ASCII letters, digits and punctuation seen
    /// in the texts, then whole words in sorted order. Any ASCII word therefore
    /// segments without falling back to `[UNK]`.
    pub fn generate<'a, I>(texts: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut words = BTreeSet::new();
        let mut chars = BTreeSet::new();
        for c in ('a'..='z').chain('0'..='9') {
            chars.insert(c.to_string());
        }
        for text in texts {
            for word in super::tokenize::pre_tokenize(text) {
                if word.chars().count() == 1 {
                    chars.insert(word);
                } else {
                    words.insert(word);
                }
            }
        }
        let mut entries = vec![CLS.to_string(), SEP.to_string(), UNK.to_string()];
        for c in &chars {
            entries.push(c.clone());
        }
        for c in ('a'..='z').chain('0'..='9') {
            entries.push(format!("{CONTINUATION}{c}"));
        }
        entries.extend(words.into_iter().filter(|w| !chars.contains(w)));
        Self::new(entries).expect("generated vocabulary is well formed")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.lookup.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.entries.get(id as usize).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.lookup.contains_key(token)
    }

    pub fn cls_id(&self) -> u32 {
        self.cls
    }

    pub fn sep_id(&self) -> u32 {
        self.sep
    }

    pub fn unk_id(&self) -> u32 {
        self.unk
    }

    pub fn is_special(&self, id: u32) -> bool {
        id == self.cls || id == self.sep
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }
}
