use regex::Regex;

use super::lexicon::PatternClass;

pub const EXACT_CONFIDENCE: f64 = 0.9;
pub const CUE_CONFIDENCE: f64 = 0.6;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanMatch {
    pub start: usize,
    pub end: usize,
    pub confidence: f64,
}

const TRAILING: &[char] = &[',', '.', ';', ':', '!', '?', ')', '"'];

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '\'' | '\u{2019}' | '-')
}

fn capitalized(word: &str) -> bool {
    let mut chars = word.chars();
    matches!(chars.next(), Some(c) if c.is_uppercase()) && word.chars().all(is_name_char)
}

/// Run of capitalized words starting at byte `from`; single-letter initials
/// like `J.` continue the run, any other trailing punctuation ends it.
fn capitalized_run(text: &str, from: usize) -> Option<(usize, usize, &str)> {
    let mut pos = from;
    let mut start = None;
    let mut end = from;
    let mut first = "";
    loop {
        let rest = &text[pos..];
        let skip = rest.len() - rest.trim_start_matches([' ', '\t']).len();
        if start.is_some() && skip == 0 {
            break;
        }
        let word_start = pos + skip;
        let word_len = text[word_start..]
            .find(char::is_whitespace)
            .unwrap_or(text.len() - word_start);
        if word_len == 0 {
            break;
        }
        let word = &text[word_start..word_start + word_len];
        let core = word.trim_end_matches(TRAILING);
        let trailing = &word[core.len()..];
        if core.is_empty() || !capitalized(core) {
            break;
        }
        if start.is_none() {
            start = Some(word_start);
            first = core;
        }
        if trailing == "." && core.chars().count() == 1 {
            end = word_start + 2;
            pos = end;
            continue;
        }
        end = word_start + core.len();
        pos = word_start + word_len;
        if !trailing.is_empty() {
            break;
        }
    }
    start.map(|s| (s, end, first))
}

fn cue_regex(cue: &str) -> Regex {
    let escaped = regex::escape(cue).replace('\'', "['\u{2019}]");
    Regex::new(&format!(r"(?i)\b{escaped}\s+")).expect("escaped cue is a valid regex")
}

/// Finds the span a pattern class selects in `text`.
///
/// Regexes take priority, in lexicon order, earliest match first; then cues
/// in lexicon order, each followed by a capitalized run.
pub fn find_span(class: &PatternClass, text: &str) -> Option<SpanMatch> {
    for re in &class.regexes {
        for caps in re.captures_iter(text) {
            let m = caps.name("span").unwrap_or_else(|| caps.get(0).expect("group 0"));
            if m.as_str().trim().is_empty() {
                continue;
            }
            return Some(SpanMatch {
                start: m.start(),
                end: m.end(),
                confidence: EXACT_CONFIDENCE,
            });
        }
    }
    for cue in &class.cues {
        for m in cue_regex(cue).find_iter(text) {
            let Some((start, end, first)) = capitalized_run(text, m.end()) else {
                continue;
            };
            if class.reject.iter().any(|r| r == first) {
                continue;
            }
            return Some(SpanMatch {
                start,
                end,
                confidence: CUE_CONFIDENCE,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_stop_at_punctuation_and_lowercase() {
        let t = "as Alex J. Turner, but";
        let (s, e, first) = capitalized_run(t, 3).unwrap();
        assert_eq!(&t[s..e], "Alex J. Turner");
        assert_eq!(first, "Alex");
        let t = "in Sydney mentioned";
        let (s, e, _) = capitalized_run(t, 3).unwrap();
        assert_eq!(&t[s..e], "Sydney");
        assert!(capitalized_run("in the city", 3).is_none());
        let t = "I am Brian O'Connor residing";
        let (s, e, _) = capitalized_run(t, 5).unwrap();
        assert_eq!(&t[s..e], "Brian O'Connor");
    }

    #[test]
    fn cue_matches_curly_apostrophe() {
        assert!(cue_regex("i'm").is_match("I\u{2019}m Dana"));
        assert!(!cue_regex("in").is_match("within Rome"));
    }
}
