//! The calculator against a recursive-descent reference evaluator and direct
//! evaluation of randomly generated syntax trees.

use lmui_core::apps::calc::{self, CalcError};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
enum Ast {
    Leaf { text: String, value: BigRational },
    Bin(char, Box<Ast>, Box<Ast>),
}

fn leaf(rng: &mut ChaCha8Rng) -> Ast {
    let int = rng.random_range(0..200u32);
    let dollar = if rng.random_bool(0.1) { "$" } else { "" };
    if rng.random_bool(0.25) {
        let frac = rng.random_range(0..100u32);
        Ast::Leaf {
            text: format!("{dollar}{int}.{frac:02}"),
            value: BigRational::new(BigInt::from(int * 100 + frac), BigInt::from(100)),
        }
    } else {
        Ast::Leaf {
            text: format!("{dollar}{int}"),
            value: BigRational::from_integer(BigInt::from(int)),
        }
    }
}

fn random_ast(rng: &mut ChaCha8Rng, depth: u32) -> Ast {
    if depth == 0 || rng.random_bool(0.3) {
        return leaf(rng);
    }
    let op = ['+', '-', '*', '/'][rng.random_range(0..4)];
    Ast::Bin(
        op,
        Box::new(random_ast(rng, depth - 1)),
        Box::new(random_ast(rng, depth - 1)),
    )
}

fn space(rng: &mut ChaCha8Rng) -> &'static str {
    if rng.random_bool(0.5) { " " } else { "" }
}

/// Fully parenthesized rendering, so the tree's own structure is the only
/// reading.
fn render(ast: &Ast, rng: &mut ChaCha8Rng) -> String {
    match ast {
        Ast::Leaf { text, .. } => text.clone(),
        Ast::Bin(op, l, r) => {
            let wrap = |a: &Ast, rng: &mut ChaCha8Rng| match a {
                Ast::Leaf { .. } => render(a, rng),
                Ast::Bin(..) => format!("({})", render(a, rng)),
            };
            let (ls, rs) = (wrap(l, rng), wrap(r, rng));
            format!("{ls}{}{op}{}{rs}", space(rng), space(rng))
        }
    }
}

fn eval_ast(ast: &Ast) -> Option<BigRational> {
    match ast {
        Ast::Leaf { value, .. } => Some(value.clone()),
        Ast::Bin(op, l, r) => {
            let (a, b) = (eval_ast(l)?, eval_ast(r)?);
            binary(*op, a, b)
        }
    }
}

fn binary(op: char, a: BigRational, b: BigRational) -> Option<BigRational> {
    match op {
        '+' => Some(a + b),
        '-' => Some(a - b),
        '*' => Some(a * b),
        _ if b.is_zero() => None,
        _ => Some(a / b),
    }
}

/// expr := term (('+'|'-') term)*; term := atom (('*'|'/') atom)*;
/// atom := number | '(' expr ')'. Division by zero gives `Err(true)`,
/// syntax errors `Err(false)`.
struct Reference<'a> {
    s: &'a [u8],
    i: usize,
}

impl Reference<'_> {
    fn skip(&mut self) {
        while self.i < self.s.len() && self.s[self.i] == b' ' {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.i).copied()
    }

    fn expr(&mut self) -> Result<BigRational, bool> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let rhs = self.term()?;
            acc = binary(c as char, acc, rhs).ok_or(true)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BigRational, bool> {
        let mut acc = self.atom()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.i += 1;
            let rhs = self.atom()?;
            acc = binary(c as char, acc, rhs).ok_or(true)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<BigRational, bool> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(false);
                }
                self.i += 1;
                Ok(v)
            }
            Some(b'$' | b'0'..=b'9') => {
                if self.s[self.i] == b'$' {
                    self.i += 1;
                }
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let (int, frac) = text.split_once('.').unwrap_or((text, ""));
                if int.is_empty() {
                    return Err(false);
                }
                let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| false)?;
                let scale = num_traits::pow(BigInt::from(10), frac.len());
                Ok(BigRational::new(digits, scale))
            }
            _ => Err(false),
        }
    }

    fn run(text: &str) -> Result<BigRational, bool> {
        let mut r = Reference { s: text.as_bytes(), i: 0 };
        let v = r.expr()?;
        if r.peek().is_some() {
            return Err(false);
        }
        Ok(v)
    }
}

#[test]
fn random_trees_agree_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut divisions_by_zero = 0;
    for _ in 0..10_000 {
        let depth = rng.random_range(0..=4);
        let ast = random_ast(&mut rng, depth);
        let text = render(&ast, &mut rng);
        let got = calc::evaluate(&text);
        let reference = Reference::run(&text);
        let direct = eval_ast(&ast);
        match (got, reference, direct) {
            (Ok(a), Ok(b), Some(c)) => {
                assert_eq!(a, b, "{text}");
                assert_eq!(a, c, "{text}");
            }
            (Err(CalcError::DivisionByZero), Err(true), None) => divisions_by_zero += 1,
            (got, reference, direct) => panic!("{text}: {got:?} / {reference:?} / {direct:?}"),
        }
    }
    assert!(divisions_by_zero > 0);
}

#[test]
fn unparenthesized_chains_follow_precedence_and_left_associativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=6);
        let mut text = String::new();
        for k in 0..n {
            if k > 0 {
                let op = ['+', '-', '*', '/'][rng.random_range(0..4)];
                text.push_str(&format!("{}{op}{}", space(&mut rng), space(&mut rng)));
            }
            if let Ast::Leaf { text: t, .. } = leaf(&mut rng) {
                text.push_str(&t);
            }
        }
        match (calc::evaluate(&text), Reference::run(&text)) {
            (Ok(a), Ok(b)) => assert_eq!(a, b, "{text}"),
            (Err(CalcError::DivisionByZero), Err(true)) => {}
            (a, b) => panic!("{text}: {a:?} / {b:?}"),
        }
    }
}

#[test]
fn malformed_expressions_are_parse_errors() {
    for bad in ["", "1+", "(1", "1)", "2**3", "-1", "1 2", "$", "1.", "abc", "()"] {
        assert!(
            matches!(calc::evaluate(bad), Err(CalcError::ParseError { .. })),
            "{bad:?}"
        );
    }
}

#[test]
fn reference_examples() {
    assert_eq!(calc::eval_expression("24/6").unwrap(), "4");
    assert_eq!(calc::eval_expression("$50 - $25").unwrap(), "25");
    assert_eq!(calc::eval_expression("1/0"), Err(CalcError::DivisionByZero));
    assert_eq!(calc::eval_expression("(100-45)/5").unwrap(), "11");
    assert_eq!(calc::eval_expression("1/3").unwrap(), "0.3333333333");
    assert_eq!(calc::eval_expression("2/3").unwrap(), "0.6666666667");
    assert_eq!(calc::eval_expression("7/4").unwrap(), "1.75");
}
