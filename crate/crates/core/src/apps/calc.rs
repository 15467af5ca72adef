//! Calculator expressions: decimal operands with optional `$`, binary
//! `+ - * /` (left-associative, usual precedence) and parentheses. Evaluated
//! exactly over rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const SIGNIFICANT_DIGITS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalcError {
    #[error("parse error at byte {at}: {message}")]
    ParseError { at: usize, message: String },
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(BigRational),
    Op(char),
    Open,
    Close,
}

fn parse_error(at: usize, message: impl Into<String>) -> CalcError {
    CalcError::ParseError {
        at,
        message: message.into(),
    }
}

fn decimal(text: &str) -> BigRational {
    match text.split_once('.') {
        Some((int, frac)) => {
            let digits: BigInt = format!("{int}{frac}").parse().expect("digits");
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            BigRational::new(digits, scale)
        }
        None => BigRational::from_integer(text.parse().expect("digits")),
    }
}

fn lex(expr: &str) -> Result<Vec<(usize, Token)>, CalcError> {
    let bytes = expr.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' => {
                out.push((i, Token::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            b'$' | b'0'..=b'9' => {
                let start = i;
                if c == b'$' {
                    i += 1;
                }
                let digits_start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == digits_start {
                    return Err(parse_error(start, "expected digits"));
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if i == frac_start {
                        return Err(parse_error(i, "expected digits after '.'"));
                    }
                }
                out.push((start, Token::Number(decimal(&expr[digits_start..i]))));
            }
            _ => return Err(parse_error(i, format!("unexpected character {:?}", expr[i..].chars().next().unwrap_or('?')))),
        }
    }
    Ok(out)
}

fn precedence(op: char) -> u8 {
    match op {
        '+' | '-' => 1,
        _ => 2,
    }
}

fn apply(op: char, lhs: BigRational, rhs: BigRational) -> Result<BigRational, CalcError> {
    Ok(match op {
        '+' => lhs + rhs,
        '-' => lhs - rhs,
        '*' => lhs * rhs,
        '/' => {
            if rhs.is_zero() {
                return Err(CalcError::DivisionByZero);
            }
            lhs / rhs
        }
        _ => unreachable!("lexer only emits + - * /"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Stacked {
    Op(char),
    Open(usize),
}

/// Shunting-yard evaluation; values are reduced as operators pop.
pub fn evaluate(expr: &str) -> Result<BigRational, CalcError> {
    let tokens = lex(expr)?;
    let mut values: Vec<BigRational> = Vec::new();
    let mut ops: Vec<Stacked> = Vec::new();
    let mut expect_operand = true;

    let reduce_top = |values: &mut Vec<BigRational>, op: char| -> Result<(), CalcError> {
        let rhs = values.pop().expect("operand stack checked by grammar");
        let lhs = values.pop().expect("operand stack checked by grammar");
        values.push(apply(op, lhs, rhs)?);
        Ok(())
    };

    for (at, token) in tokens {
        match token {
            Token::Number(n) => {
                if !expect_operand {
                    return Err(parse_error(at, "expected an operator"));
                }
                values.push(n);
                expect_operand = false;
            }
            Token::Open => {
                if !expect_operand {
                    return Err(parse_error(at, "expected an operator"));
                }
                ops.push(Stacked::Open(at));
            }
            Token::Close => {
                if expect_operand {
                    return Err(parse_error(at, "expected an operand"));
                }
                loop {
                    match ops.pop() {
                        Some(Stacked::Op(op)) => reduce_top(&mut values, op)?,
                        Some(Stacked::Open(_)) => break,
                        None => return Err(parse_error(at, "unbalanced ')'")),
                    }
                }
            }
            Token::Op(op) => {
                if expect_operand {
                    return Err(parse_error(at, "expected an operand"));
                }
                while let Some(&Stacked::Op(top)) = ops.last() {
                    if precedence(top) < precedence(op) {
                        break;
                    }
                    ops.pop();
                    reduce_top(&mut values, top)?;
                }
                ops.push(Stacked::Op(op));
                expect_operand = true;
            }
        }
    }
    if expect_operand {
        return Err(parse_error(expr.len(), "expected an operand"));
    }
    while let Some(top) = ops.pop() {
        match top {
            Stacked::Op(op) => reduce_top(&mut values, op)?,
            Stacked::Open(at) => return Err(parse_error(at, "unbalanced '('")),
        }
    }
    Ok(values.pop().expect("one value left"))
}

fn pow10(k: i64) -> BigRational {
    let p = BigRational::from_integer(num_traits::pow(BigInt::from(10), k.unsigned_abs() as usize));
    if k >= 0 {
        p
    } else {
        p.recip()
    }
}

/// Integers print in full; other values round half away from zero to
/// [`SIGNIFICANT_DIGITS`] significant digits with trailing zeros trimmed.
pub fn render(value: &BigRational) -> String {
    if value.is_integer() {
        return value.to_integer().to_string();
    }
    let negative = value.is_negative();
    let r = value.abs();
    let digits = |n: &BigInt| n.to_string().len() as i64;
    let mut exp = digits(r.numer()) - digits(r.denom());
    if r < pow10(exp) {
        exp -= 1;
    }
    let sig = SIGNIFICANT_DIGITS as i64;
    let scaled = &r * pow10(sig - 1 - exp);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut rounded = (scaled + half).floor().to_integer();
    if rounded == num_traits::pow(BigInt::from(10), SIGNIFICANT_DIGITS) {
        rounded /= 10;
        exp += 1;
    }
    let ds = rounded.to_string();
    let mut out = if exp >= sig - 1 {
        format!("{ds}{}", "0".repeat((exp - (sig - 1)) as usize))
    } else if exp >= 0 {
        let split = (exp + 1) as usize;
        format!("{}.{}", &ds[..split], &ds[split..])
    } else {
        format!("0.{}{ds}", "0".repeat((-exp - 1) as usize))
    };
    if out.contains('.') {
        out = out.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if negative && out.chars().any(|c| c != '0' && c != '.') {
        out.insert(0, '-');
    }
    out
}

pub fn eval_expression(expr: &str) -> Result<String, CalcError> {
    evaluate(expr).map(|v| render(&v))
}

/// Lossy view for display code that wants a float.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}
