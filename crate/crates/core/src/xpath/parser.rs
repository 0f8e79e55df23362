//! Recursive-descent parser for XPath-BE.
//!
//! Precedence, loosest first: comparison, union (`|`), path (`/`, `//`).

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{Axis, CmpOp, Expr, FnName, Literal, NodeTest, Step};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String>, found: String },
    #[error("function {name}() at byte {offset} takes {expected} argument(s), got {found}")]
    Arity { name: String, offset: usize, expected: String, found: usize },
    #[error("unknown axis {name:?} at byte {offset}")]
    UnknownAxis { name: String, offset: usize },
    #[error("unknown function {name:?} at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::UnknownAxis { offset, .. }
            | ParseError::UnknownFunction { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Slash,
    DoubleSlash,
    Pipe,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    At,
    Dot,
    DotDot,
    ColonColon,
    Star,
    Dollar,
    Op(CmpOp),
    Name(String),
    Str(String),
    Num(f64),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => alloc::format!("name {n:?}"),
            Tok::Str(s) => alloc::format!("string {s:?}"),
            Tok::Num(n) => alloc::format!("number {n}"),
            Tok::Op(op) => alloc::format!("{:?}", op.symbol()),
            Tok::Eof => "end of expression".into(),
            other => {
                let s = match other {
                    Tok::Slash => "/",
                    Tok::DoubleSlash => "//",
                    Tok::Pipe => "|",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Comma => ",",
                    Tok::At => "@",
                    Tok::Dot => ".",
                    Tok::DotDot => "..",
                    Tok::ColonColon => "::",
                    Tok::Star => "*",
                    Tok::Dollar => "$",
                    _ => unreachable!(),
                };
                alloc::format!("{s:?}")
            }
        }
    }
}

fn syntax(offset: usize, expected: &[&str], found: String) -> ParseError {
    ParseError::Syntax { offset, expected: expected.iter().map(|s| s.to_string()).collect(), found }
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let next = src[i + c.len_utf8()..].chars().next();
        let (tok, len) = match c {
            '/' if next == Some('/') => (Tok::DoubleSlash, 2),
            '/' => (Tok::Slash, 1),
            '|' => (Tok::Pipe, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '@' => (Tok::At, 1),
            '*' => (Tok::Star, 1),
            '$' => (Tok::Dollar, 1),
            ':' if next == Some(':') => (Tok::ColonColon, 2),
            ':' => return Err(syntax(i, &["\"::\""], "\":\" (namespace prefixes are not supported)".into())),
            '=' if next == Some('=') => (Tok::Op(CmpOp::EqEq), 2),
            '=' => (Tok::Op(CmpOp::Eq), 1),
            '!' if next == Some('=') => (Tok::Op(CmpOp::Ne), 2),
            '!' => return Err(syntax(i, &["\"!=\""], "\"!\"".into())),
            '<' if next == Some('=') => (Tok::Op(CmpOp::Le), 2),
            '<' => (Tok::Op(CmpOp::Lt), 1),
            '>' if next == Some('=') => (Tok::Op(CmpOp::Ge), 2),
            '>' => (Tok::Op(CmpOp::Gt), 1),
            '.' if next == Some('.') => (Tok::DotDot, 2),
            '.' if !next.is_some_and(|d| d.is_ascii_digit()) => (Tok::Dot, 1),
            '"' | '\'' => {
                let body = &src[i + 1..];
                let end = body.find(c).ok_or_else(|| syntax(i, &["closing quote"], "end of expression".into()))?;
                (Tok::Str(body[..end].into()), end + 2)
            }
            d if d.is_ascii_digit() || d == '.' => {
                let rest = &src[i..];
                let mut len = rest.bytes().take_while(u8::is_ascii_digit).count();
                if rest[len..].starts_with('.') {
                    len += 1;
                    len += rest[len..].bytes().take_while(u8::is_ascii_digit).count();
                }
                let n: f64 = rest[..len].parse().map_err(|_| syntax(i, &["number"], rest[..len].into()))?;
                (Tok::Num(n), len)
            }
            c if is_name_start(c) => {
                let rest = &src[i..];
                let len = rest.char_indices().find(|&(_, ch)| !is_name_char(ch)).map_or(rest.len(), |(j, _)| j);
                // a trailing '.' belongs to a following `..` or `.`, not the name
                let mut len = len;
                while rest[..len].ends_with('.') {
                    len -= 1;
                }
                (Tok::Name(rest[..len].into()), len)
            }
            other => return Err(syntax(i, &["expression"], alloc::format!("{other:?}"))),
        };
        toks.push((tok, i));
        let end = i + len;
        while chars.peek().is_some_and(|&(j, _)| j < end) {
            chars.next();
        }
    }
    toks.push((Tok::Eof, src.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

/// Parses an XPath-BE expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    if p.peek() == &Tok::Eof {
        return Err(syntax(0, &["expression"], "end of expression".into()));
    }
    let e = p.expr()?;
    if p.peek() != &Tok::Eof {
        return Err(p.unexpected(&["end of expression", "\"|\"", "comparison operator"]));
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        syntax(self.offset(), expected, self.peek().describe())
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.union()?;
        while let Tok::Op(op) = *self.peek() {
            self.advance();
            let right = self.union()?;
            left = Expr::compare(op, left, right);
        }
        Ok(left)
    }

    fn union(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.path()?;
        while *self.peek() == Tok::Pipe {
            self.advance();
            let right = self.path()?;
            left = Expr::union(left, right);
        }
        Ok(left)
    }

    fn starts_step(&self) -> bool {
        matches!(self.peek(), Tok::Dot | Tok::DotDot | Tok::At | Tok::Star | Tok::Name(_))
    }

    /// `text()` at the head of a path is the string function unless a step
    /// continuation (`/`, `//`, `[`) follows it.
    fn starts_primary(&self) -> bool {
        match self.peek() {
            Tok::Str(_) | Tok::Num(_) | Tok::Dollar | Tok::LParen => true,
            Tok::Name(n) if *self.peek_at(1) == Tok::LParen => match n.as_str() {
                "node" => false,
                "text" => *self.peek_at(2) == Tok::RParen && !matches!(self.peek_at(3), Tok::Slash | Tok::DoubleSlash | Tok::LBracket),
                _ => true,
            },
            _ => false,
        }
    }

    fn path(&mut self) -> Result<Expr, ParseError> {
        let mut items = Vec::new();
        match self.peek() {
            Tok::Slash => {
                self.advance();
                items.push(Expr::Root);
                if self.starts_step() {
                    self.relative(&mut items)?;
                }
            }
            Tok::DoubleSlash => {
                self.advance();
                items.push(Expr::Root);
                items.push(descendant_or_self());
                self.relative(&mut items)?;
            }
            _ if self.starts_primary() => {
                items.push(self.primary()?);
                self.continuation(&mut items)?;
            }
            _ => self.relative(&mut items)?,
        }
        Ok(Expr::path(items).expect("path has at least one item"))
    }

    fn relative(&mut self, items: &mut Vec<Expr>) -> Result<(), ParseError> {
        items.push(Expr::Step(self.step()?));
        self.continuation(items)
    }

    fn continuation(&mut self, items: &mut Vec<Expr>) -> Result<(), ParseError> {
        loop {
            match self.peek() {
                Tok::Slash => {
                    self.advance();
                }
                Tok::DoubleSlash => {
                    self.advance();
                    items.push(descendant_or_self());
                }
                _ => return Ok(()),
            }
            items.push(Expr::Step(self.step()?));
        }
    }

    fn step(&mut self) -> Result<Step, ParseError> {
        let mut step = match self.peek().clone() {
            Tok::Dot => {
                self.advance();
                Step::new(Axis::SelfAxis, NodeTest::AnyNode)
            }
            Tok::DotDot => {
                self.advance();
                Step::new(Axis::Parent, NodeTest::AnyNode)
            }
            Tok::At => {
                self.advance();
                Step::new(Axis::Attribute, self.node_test()?)
            }
            Tok::Name(name) if *self.peek_at(1) == Tok::ColonColon => {
                let offset = self.offset();
                let axis = Axis::from_name(&name).ok_or(ParseError::UnknownAxis { name, offset })?;
                self.advance();
                self.advance();
                Step::new(axis, self.node_test()?)
            }
            Tok::Name(_) | Tok::Star => Step::new(Axis::Child, self.node_test()?),
            _ => return Err(self.unexpected(&["step"])),
        };
        while *self.peek() == Tok::LBracket {
            self.advance();
            step.predicates.push(self.expr()?);
            self.expect(Tok::RBracket, "\"]\"")?;
        }
        Ok(step)
    }

    fn node_test(&mut self) -> Result<NodeTest, ParseError> {
        match self.peek().clone() {
            Tok::Star => {
                self.advance();
                Ok(NodeTest::AnyElement)
            }
            Tok::Name(name) => {
                self.advance();
                if *self.peek() != Tok::LParen {
                    return Ok(NodeTest::Name(name));
                }
                let test = match name.as_str() {
                    "node" => NodeTest::AnyNode,
                    "text" => NodeTest::Text,
                    _ => return Err(self.unexpected(&["node test"])),
                };
                self.advance();
                self.expect(Tok::RParen, "\")\"")?;
                Ok(test)
            }
            _ => Err(self.unexpected(&["node test"])),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.advance() {
            Tok::Str(s) => Ok(Expr::Literal(Literal::Str(s))),
            Tok::Num(n) => Ok(Expr::Literal(Literal::Num(n))),
            Tok::Dollar => match self.advance() {
                Tok::Name(n) => Ok(Expr::VarRef(n)),
                other => Err(syntax(offset + 1, &["variable name"], other.describe())),
            },
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "\")\"")?;
                Ok(e)
            }
            Tok::Name(name) => {
                let func = FnName::from_name(&name).ok_or(ParseError::UnknownFunction { name, offset })?;
                self.expect(Tok::LParen, "\"(\"")?;
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(self.expr()?);
                        if *self.peek() == Tok::Comma {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen, "\")\" or \",\"")?;
                let (min, max) = func.arity();
                if args.len() < min || max.is_some_and(|m| args.len() > m) {
                    let expected = match max {
                        Some(m) if m == min => alloc::format!("{min}"),
                        Some(m) => alloc::format!("{min}..{m}"),
                        None => alloc::format!("{min} or more"),
                    };
                    return Err(ParseError::Arity { name: func.name().into(), offset, expected, found: args.len() });
                }
                Ok(Expr::FnCall(func, args))
            }
            other => Err(syntax(offset, &["expression"], other.describe())),
        }
    }
}

fn descendant_or_self() -> Expr {
    Expr::step(Axis::DescendantOrSelf, NodeTest::AnyNode)
}
