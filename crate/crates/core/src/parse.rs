//! Text input for germs: polynomial expressions in `x`, `y` with exact rational
//! coefficients.
//!
//! ```text
//! germ   := '(' expr ',' expr ')'
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | 'x' | 'y' | '(' expr ')'
//! ```
//!
//! Juxtaposition such as `2x` or `x y` is rejected, and division is only allowed by
//! a nonzero constant.

use crate::jets::Jet;
use crate::recognition::{MapGerm, RecognitionError};
use crate::scalar::{parse_q, Q};
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("unexpected character {ch:?} at offset {pos}")]
    BadChar { ch: char, pos: usize },
    #[error("unexpected {found} at offset {pos}, expected {expected}")]
    Unexpected { found: String, expected: &'static str, pos: usize },
    #[error("implicit multiplication at offset {0}; write `*` explicitly")]
    ImplicitMul(usize),
    #[error("invalid number {0:?}")]
    BadNumber(String),
    #[error("division by a non-constant or zero expression at offset {0}")]
    BadDivision(usize),
    #[error("exponent too large at offset {0}")]
    BadExponent(usize),
    #[error(transparent)]
    Germ(#[from] RecognitionError),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    X,
    Y,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(q) => format!("number {q}"),
            Tok::X => "`x`".into(),
            Tok::Y => "`y`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self, Tok::Num(_) | Tok::X | Tok::Y | Tok::LParen)
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().map(|c| c.1).collect();
            let q = parse_q(&text).ok_or_else(|| ParseError::BadNumber(text.clone()))?;
            out.push((Tok::Num(q), pos));
            continue;
        }
        let tok = match ch {
            'x' => Tok::X,
            'y' => Tok::Y,
            '+' => Tok::Plus,
            '-' | '\u{2212}' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => return Err(ParseError::BadChar { ch, pos }),
        };
        out.push((tok, pos));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    order: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.end)
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        let found = self.peek().map(Tok::describe).unwrap_or_else(|| "end of input".into());
        ParseError::Unexpected { found, expected, pos: self.pos() }
    }

    fn expect(&mut self, t: Tok, expected: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn expr(&mut self) -> Result<Jet<Q>, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Jet<Q>, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.at += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    let pos = self.pos();
                    self.at += 1;
                    let d = self.unary()?;
                    let c = d.constant_term();
                    if c.is_zero() || d.terms().any(|(i, j, _)| i + j > 0) {
                        return Err(ParseError::BadDivision(pos));
                    }
                    acc = acc.scale(&(Q::from_integer(1.into()) / c));
                }
                Some(t) if t.starts_atom() => return Err(ParseError::ImplicitMul(self.pos())),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Jet<Q>, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Jet<Q>, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.at += 1;
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(q)) if q.is_integer() => {
                self.at += 1;
                let e: u32 = q.to_integer().try_into().map_err(|_| ParseError::BadExponent(pos))?;
                if e > 64 {
                    return Err(ParseError::BadExponent(pos));
                }
                Ok(base.pow(e as usize))
            }
            _ => Err(self.unexpected("a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Jet<Q>, ParseError> {
        let tok = self.peek().cloned();
        let out = match tok {
            Some(Tok::Num(q)) => {
                self.at += 1;
                Jet::constant(self.order, q)
            }
            Some(Tok::X) => {
                self.at += 1;
                Jet::x(self.order)
            }
            Some(Tok::Y) => {
                self.at += 1;
                Jet::y(self.order)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                e
            }
            _ => return Err(self.unexpected("a number, `x`, `y` or `(`")),
        };
        Ok(out)
    }
}

fn parser(src: &str, order: usize) -> Result<Parser, ParseError> {
    Ok(Parser { toks: lex(src)?, at: 0, order, end: src.len() })
}

/// Parses one polynomial into a rational jet truncated at `order`.
pub fn parse_jet(src: &str, order: usize) -> Result<Jet<Q>, ParseError> {
    let mut p = parser(src, order)?;
    let j = p.expr()?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(j)
}

/// Parses `"(f1, f2)"` into a map-germ.
pub fn parse_germ(src: &str, order: usize) -> Result<MapGerm<Q>, ParseError> {
    let mut p = parser(src, order)?;
    p.expect(Tok::LParen, "`(`")?;
    let f1 = p.expr()?;
    p.expect(Tok::Comma, "`,`")?;
    let f2 = p.expr()?;
    p.expect(Tok::RParen, "`)`")?;
    if p.peek().is_some() {
        return Err(p.unexpected("end of input"));
    }
    Ok(MapGerm::new(f1, f2)?)
}
