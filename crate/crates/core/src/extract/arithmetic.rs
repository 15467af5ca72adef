use std::sync::LazyLock;

use regex::Regex;

use super::lexicon::{Lexicon, OPERATOR_CLASSES};

pub const SYMBOL_CONFIDENCE: f64 = 0.9;
pub const CUE_CONFIDENCE: f64 = 0.75;

const NUMBER_WORDS: [&str; 21] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty",
];

static OPERAND: LazyLock<Regex> = LazyLock::new(|| {
    let words = NUMBER_WORDS.join("|");
    Regex::new(&format!(
        r"(?i)(?P<cur>\$)?(?P<num>\d+(?:\.\d+)?)|\b(?P<word>{words})\b"
    ))
    .expect("operand regex")
});

#[derive(Debug, Clone, PartialEq)]
struct Operand {
    text: String,
    currency: bool,
    start: usize,
    end: usize,
}

fn operands(text: &str) -> Vec<Operand> {
    OPERAND
        .captures_iter(text)
        .map(|c| {
            let whole = c.get(0).expect("group 0");
            let (value, currency) = match (c.name("num"), c.name("word")) {
                (Some(n), _) => (n.as_str().to_string(), c.name("cur").is_some()),
                (None, Some(w)) => {
                    let lower = w.as_str().to_lowercase();
                    let n = NUMBER_WORDS.iter().position(|x| *x == lower).expect("matched word");
                    (n.to_string(), false)
                }
                _ => unreachable!("operand regex has two alternatives"),
            };
            Operand {
                text: value,
                currency,
                start: whole.start(),
                end: whole.end(),
            }
        })
        .collect()
}

fn symbol(gap: &str) -> Option<char> {
    match gap.trim() {
        "+" => Some('+'),
        "-" | "\u{2212}" => Some('-'),
        "*" | "x" | "\u{d7}" => Some('*'),
        "/" | "\u{f7}" => Some('/'),
        _ => None,
    }
}

fn earliest_cue(text: &str, lexicon: &Lexicon) -> Option<char> {
    let mut best: Option<(usize, char)> = None;
    for (class, op) in OPERATOR_CLASSES {
        let Some(class) = lexicon.class(class) else { continue };
        for cue in &class.cues {
            let re = Regex::new(&format!(r"(?i)\b{}\b", regex::escape(cue))).expect("escaped cue");
            if let Some(m) = re.find(text) {
                if best.is_none_or(|(pos, _)| m.start() < pos) {
                    best = Some((m.start(), op));
                }
            }
        }
    }
    best.map(|(_, op)| op)
}

/// Rewrites an utterance into an infix expression.
///
/// Operands are taken in utterance order. Operators come from explicit
/// symbols between operands when every gap is one, otherwise from the
/// earliest cue word in the lexicon's operator classes. When every operand
/// carries `$` the sign is kept and operators are spaced (`$50 - $25`);
/// otherwise output is compact (`24/6`).
pub fn extract_expression(text: &str, lexicon: &Lexicon) -> Option<(String, f64)> {
    let ops = operands(text);
    if ops.len() < 2 {
        return None;
    }
    let symbols: Option<Vec<char>> = ops
        .windows(2)
        .map(|w| symbol(&text[w[0].end..w[1].start]))
        .collect();
    let (operators, confidence) = match symbols {
        Some(s) => (s, SYMBOL_CONFIDENCE),
        None => {
            let op = earliest_cue(text, lexicon)?;
            (vec![op; ops.len() - 1], CUE_CONFIDENCE)
        }
    };
    let currency = ops.iter().all(|o| o.currency);
    let render = |o: &Operand| {
        if currency {
            format!("${}", o.text)
        } else {
            o.text.clone()
        }
    };
    let mut out = render(&ops[0]);
    for (op, operand) in operators.iter().zip(&ops[1..]) {
        if currency {
            out.push(' ');
            out.push(*op);
            out.push(' ');
        } else {
            out.push(*op);
        }
        out.push_str(&render(operand));
    }
    Some((out, confidence))
}
