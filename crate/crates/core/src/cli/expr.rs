//! Impedance formulas over the surface parameters.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | atom
//! atom   := number | 'i' | 'pi' | 'theta' | 'phi' | 'θ' | 'φ'
//!         | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
//! ```

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(Complex64),
    Theta,
    Phi,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Sin(Box<Node>),
    Cos(Box<Node>),
}

/// A parsed impedance formula `γ(θ, φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaExpr {
    source: String,
    root: Node,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

fn err(pos: usize, reason: impl Into<String>) -> Error {
    Error::Expr {
        pos,
        reason: reason.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push((pos, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((pos, Token::Minus));
                i += 1;
            }
            '*' | '×' => {
                out.push((pos, Token::Star));
                i += 1;
            }
            '(' => {
                out.push((pos, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Token::RParen));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() {
                    let d = chars[i].1;
                    let exp_sign = (d == '+' || d == '-')
                        && i > start
                        && matches!(chars[i - 1].1, 'e' | 'E');
                    if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let end = chars.get(i).map_or(src.len(), |&(p, _)| p);
                let text = &src[pos..end];
                let v: f64 = text
                    .parse()
                    .map_err(|_| err(pos, format!("invalid number '{text}'")))?;
                out.push((pos, Token::Num(v)));
            }
            c if c.is_alphabetic() => {
                let start = pos;
                while i < chars.len() && chars[i].1.is_alphanumeric() {
                    i += 1;
                }
                let end = chars.get(i).map_or(src.len(), |&(p, _)| p);
                out.push((start, Token::Ident(src[start..end].to_string())));
            }
            other => return Err(err(pos, format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    at: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.at).map_or(self.len, |(p, _)| *p)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.at += 1;
            Ok(())
        } else {
            Err(err(self.pos(), format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.at += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.at += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::Star) {
            self.at += 1;
            lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek() == Some(&Token::Minus) {
            self.at += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node> {
        let pos = self.pos();
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| err(pos, "unexpected end of expression"))?;
        self.at += 1;
        match tok {
            Token::Num(v) => Ok(Node::Const(Complex64::new(v, 0.0))),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "i" => Ok(Node::Const(Complex64::new(0.0, 1.0))),
                "pi" => Ok(Node::Const(Complex64::new(std::f64::consts::PI, 0.0))),
                "theta" | "θ" => Ok(Node::Theta),
                "phi" | "φ" => Ok(Node::Phi),
                "sin" | "cos" => {
                    self.expect(Token::LParen, "'(' after function name")?;
                    let arg = Box::new(self.expr()?);
                    self.expect(Token::RParen, "')'")?;
                    Ok(if name == "sin" { Node::Sin(arg) } else { Node::Cos(arg) })
                }
                _ => Err(err(pos, format!("unknown identifier '{name}'"))),
            },
            other => Err(err(pos, format!("unexpected token {other:?}"))),
        }
    }
}

fn eval(node: &Node, theta: f64, phi: f64) -> Complex64 {
    match node {
        Node::Const(c) => *c,
        Node::Theta => Complex64::new(theta, 0.0),
        Node::Phi => Complex64::new(phi, 0.0),
        Node::Neg(a) => -eval(a, theta, phi),
        Node::Add(a, b) => eval(a, theta, phi) + eval(b, theta, phi),
        Node::Sub(a, b) => eval(a, theta, phi) - eval(b, theta, phi),
        Node::Mul(a, b) => eval(a, theta, phi) * eval(b, theta, phi),
        Node::Sin(a) => eval(a, theta, phi).sin(),
        Node::Cos(a) => eval(a, theta, phi).cos(),
    }
}

fn depends_on_position(node: &Node) -> bool {
    match node {
        Node::Const(_) => false,
        Node::Theta | Node::Phi => true,
        Node::Neg(a) | Node::Sin(a) | Node::Cos(a) => depends_on_position(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
            depends_on_position(a) || depends_on_position(b)
        }
    }
}

impl GammaExpr {
    pub fn parse(source: &str) -> Result<GammaExpr> {
        let tokens = tokenize(source)?;
        if tokens.is_empty() {
            return Err(err(0, "empty expression"));
        }
        let mut p = Parser {
            tokens: &tokens,
            at: 0,
            len: source.len(),
        };
        let root = p.expr()?;
        if p.at != tokens.len() {
            return Err(err(p.pos(), "trailing input"));
        }
        Ok(GammaExpr {
            source: source.to_string(),
            root,
        })
    }

    pub fn eval(&self, theta: f64, phi: f64) -> Complex64 {
        eval(&self.root, theta, phi)
    }

    /// The value when the formula does not involve `θ` or `φ`.
    pub fn constant(&self) -> Option<Complex64> {
        (!depends_on_position(&self.root)).then(|| self.eval(0.0, 0.0))
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl fmt::Display for GammaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
