use indexmap::IndexMap;
use regex::Regex;
use serde::Deserialize;
use thiserror::Error;

/// Operator classes the arithmetic backend reads from the lexicon.
pub const OPERATOR_CLASSES: [(&str, char); 4] = [
    ("operator_add", '+'),
    ("operator_subtract", '-'),
    ("operator_multiply", '*'),
    ("operator_divide", '/'),
];

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("malformed lexicon: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("bad regex in class {class:?}: {source}")]
    BadRegex {
        class: String,
        #[source]
        source: regex::Error,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    #[serde(default)]
    cues: Vec<String>,
    #[serde(default)]
    regexes: Vec<String>,
    #[serde(default)]
    applies_to: Vec<String>,
    #[serde(default)]
    reject: Vec<String>,
}

/// One pattern class.
///
/// `regexes` are tried in order; a named group `span` narrows the match.
/// `cues` are lowercase phrases after which a run of capitalized words is
/// taken. Runs starting with a word in `reject` are ignored. `applies_to`
/// binds the class to parameter names.
#[derive(Debug, Clone)]
pub struct PatternClass {
    pub name: String,
    pub cues: Vec<String>,
    pub regexes: Vec<Regex>,
    pub applies_to: Vec<String>,
    pub reject: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    classes: IndexMap<String, PatternClass>,
}

impl Lexicon {
    pub fn from_json(text: &str) -> Result<Self, LexiconError> {
        let raw: IndexMap<String, RawClass> = serde_json::from_str(text)?;
        let mut classes = IndexMap::with_capacity(raw.len());
        for (name, class) in raw {
            let regexes = class
                .regexes
                .iter()
                .map(|r| Regex::new(r))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|source| LexiconError::BadRegex {
                    class: name.clone(),
                    source,
                })?;
            classes.insert(
                name.clone(),
                PatternClass {
                    name,
                    cues: class.cues.iter().map(|c| c.to_lowercase()).collect(),
                    regexes,
                    applies_to: class.applies_to,
                    reject: class.reject,
                },
            );
        }
        Ok(Self { classes })
    }

    pub fn class(&self, name: &str) -> Option<&PatternClass> {
        self.classes.get(name)
    }

    /// First class whose `applies_to` lists the parameter.
    pub fn class_for_parameter(&self, parameter: &str) -> Option<&PatternClass> {
        self.classes
            .values()
            .find(|c| c.applies_to.iter().any(|p| p == parameter))
    }

    pub fn classes(&self) -> impl Iterator<Item = &PatternClass> {
        self.classes.values()
    }
}
