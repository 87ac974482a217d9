//! Polynomial expression parsing.
//!
//! Grammar (tightest first): `^` with a non-negative integer exponent, unary
//! `-`, `*` (mandatory between factors), binary `+ -`. Literals are integers
//! or `p/q` rationals; `/` is not a general operator. Errors carry 1-based
//! line and column positions.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::poly::{Poly, Rational, RingRef};
use crate::{Error, Result};

/// Parsed expression tree; parentheses are kept so positions survive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(BigInt),
    Ratio(BigInt, BigInt),
    Var { name: String, line: usize, col: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Paren(Box<Expr>),
}

impl Expr {
    /// Evaluates over the registry; undeclared variables are an error.
    pub fn eval(&self, ring: &RingRef) -> Result<Poly> {
        match self {
            Expr::Int(n) => Ok(Poly::constant(ring, Rational::from_integer(n.clone()))),
            Expr::Ratio(n, d) => Ok(Poly::constant(ring, Rational::new(n.clone(), d.clone()))),
            Expr::Var { name, line, col } => match ring.var_index(name) {
                Some(i) => Ok(Poly::var(ring, i)),
                None => Err(Error::UndeclaredVariable {
                    name: name.clone(),
                    line: *line,
                    col: *col,
                }),
            },
            Expr::Neg(e) => Ok(-&e.eval(ring)?),
            Expr::Add(a, b) => Ok(&a.eval(ring)? + &b.eval(ring)?),
            Expr::Sub(a, b) => Ok(&a.eval(ring)? - &b.eval(ring)?),
            Expr::Mul(a, b) => Ok(&a.eval(ring)? * &b.eval(ring)?),
            Expr::Pow(e, k) => Ok(e.eval(ring)?.pow(*k)),
            Expr::Paren(e) => e.eval(ring),
        }
    }
}

/// Parses one expression occupying `text` at the given source position.
pub fn parse_expr(text: &str, line: usize, col0: usize) -> Result<Expr> {
    let mut p = Parser::new(text, line, col0)?;
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(tok) => Err(p.error_at(tok.col, format!("unexpected `{}` after expression", tok.text()))),
    }
}

/// Parses and evaluates in one step; positions start at 1:1.
pub fn parse_poly(text: &str, ring: &RingRef) -> Result<Poly> {
    parse_expr(text, 1, 1)?.eval(ring)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    col: usize,
}

impl Token {
    fn text(&self) -> String {
        match &self.kind {
            TokenKind::Int(n) => n.to_string(),
            TokenKind::Ident(s) => s.clone(),
            TokenKind::Plus => "+".into(),
            TokenKind::Minus => "-".into(),
            TokenKind::Star => "*".into(),
            TokenKind::Caret => "^".into(),
            TokenKind::Slash => "/".into(),
            TokenKind::LParen => "(".into(),
            TokenKind::RParen => ")".into(),
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Parser {
    fn new(text: &str, line: usize, col0: usize) -> Result<Parser> {
        let mut tokens = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let col = col0 + i;
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let kind = match c {
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '*' => TokenKind::Star,
                '^' => TokenKind::Caret,
                '/' => TokenKind::Slash,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                _ if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..i].iter().collect();
                    tokens.push(Token {
                        kind: TokenKind::Int(digits.parse().expect("digit run parses")),
                        col,
                    });
                    continue;
                }
                _ if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len()
                        && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                    {
                        i += 1;
                    }
                    tokens.push(Token {
                        kind: TokenKind::Ident(chars[start..i].iter().collect()),
                        col,
                    });
                    continue;
                }
                _ => {
                    return Err(Error::Parse {
                        line,
                        col,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            };
            tokens.push(Token { kind, col });
            i += 1;
        }
        Ok(Parser {
            tokens,
            pos: 0,
            line,
            end_col: col0 + chars.len(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, col: usize, msg: String) -> Error {
        Error::Parse { line: self.line, col, msg }
    }

    fn error_here(&self, msg: &str) -> Error {
        let col = self.peek().map(|t| t.col).unwrap_or(self.end_col);
        self.error_at(col, msg.to_string())
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek().map(|t| t.kind.clone()) {
                Some(TokenKind::Plus) => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(TokenKind::Minus) => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Star)) {
            self.bump();
            acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Caret)) {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            Some(Token { kind: TokenKind::Int(n), col }) => {
                if n.is_negative() {
                    unreachable!("lexer never produces negative literals");
                }
                let exp: u32 = n
                    .try_into()
                    .map_err(|_| self.error_at(col, "exponent too large".to_string()))?;
                Ok(Expr::Pow(Box::new(base), exp))
            }
            _ => Err(self.error_here("expected a non-negative integer exponent after `^`")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Token { kind: TokenKind::Int(n), .. }) => {
                if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Slash)) {
                    self.bump();
                    match self.bump() {
                        Some(Token { kind: TokenKind::Int(d), col }) => {
                            if d.is_zero() {
                                return Err(self.error_at(
                                    col,
                                    "zero denominator in rational literal".to_string(),
                                ));
                            }
                            Ok(Expr::Ratio(n, d))
                        }
                        _ => Err(self.error_here("expected an integer denominator after `/`")),
                    }
                } else {
                    Ok(Expr::Int(n))
                }
            }
            Some(Token { kind: TokenKind::Ident(name), col }) => {
                Ok(Expr::Var { name, line: self.line, col })
            }
            Some(Token { kind: TokenKind::LParen, col }) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token { kind: TokenKind::RParen, .. }) => {
                        Ok(Expr::Paren(Box::new(inner)))
                    }
                    _ => Err(self.error_at(col, "unclosed parenthesis".to_string())),
                }
            }
            Some(tok) => Err(self.error_at(
                tok.col,
                format!("expected a value, found `{}`", tok.text()),
            )),
            None => Err(self.error_here("expected an expression")),
        }
    }
}
