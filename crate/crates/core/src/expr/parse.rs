use std::fmt;

use thiserror::Error;

use super::Expr;
use crate::numeric::Rational;

/// Parse failure at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(r) => write!(f, "number `{r}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Caret => f.write_str("`^`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn digits_end(&self, from: usize) -> usize {
        let bytes = self.src.as_bytes();
        let mut i = from;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        i
    }

    /// Next token and its starting offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
        let start = self.pos;
        let Some(c) = trimmed.chars().next() else {
            return Ok((Tok::End, start));
        };
        let single = |tok| (tok, c.len_utf8());
        let (tok, len) = match c {
            '+' => single(Tok::Plus),
            '-' => single(Tok::Minus),
            '*' => single(Tok::Star),
            '/' | '÷' => single(Tok::Slash),
            '^' => single(Tok::Caret),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            c if c.is_ascii_digit() => {
                let end = self.number_end(start);
                let text = &self.src[start..end];
                let value = text.parse::<Rational>().map_err(|_| ParseError {
                    offset: start,
                    expected: vec!["number".into()],
                    found: format!("`{text}`"),
                })?;
                (Tok::Num(value), end - start)
            }
            c if c.is_ascii_alphabetic() => {
                let len = trimmed
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                (Tok::Ident(trimmed[..len].to_string()), len)
            }
            other => {
                return Err(ParseError {
                    offset: start,
                    expected: vec!["expression".into()],
                    found: format!("`{other}`"),
                })
            }
        };
        self.pos += len;
        Ok((tok, start))
    }

    /// End of an integer, decimal `a.b` or fraction `p/q` literal. A fraction
    /// literal has no whitespace around its slash; `p / q` is a division.
    fn number_end(&self, start: usize) -> usize {
        let bytes = self.src.as_bytes();
        let end = self.digits_end(start);
        if end + 1 < bytes.len() && bytes[end] == b'.' && bytes[end + 1].is_ascii_digit() {
            return self.digits_end(end + 1);
        }
        if end + 1 < bytes.len() && bytes[end] == b'/' && bytes[end + 1].is_ascii_digit() {
            return self.digits_end(end + 1);
        }
        end
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
}

const OPERAND: &[&str] = &["number", "`x`", "function", "`(`", "`-`"];

/// Parses the expression grammar:
///
/// ```text
/// expr  := term (('+' | '-') term)*
/// term  := unary (('*' | '/' | '÷') unary)*
/// unary := '-' unary | power
/// power := atom ('^' exponent)*
/// atom  := number | p/q | 'x' | func '(' expr ')' | '(' expr ')'
/// func  := sqrt | sin | cos | abs | sgn
/// ```
///
/// `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Exponents
/// are integer literals, optionally negative and optionally parenthesised.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut lexer = Lexer { src: text, pos: 0 };
    let (tok, offset) = lexer.next()?;
    let mut p = Parser { lexer, tok, offset };
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<Tok, ParseError> {
        let (next, offset) = self.lexer.next()?;
        self.offset = offset;
        Ok(std::mem::replace(&mut self.tok, next))
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if self.tok == tok {
            self.bump()?;
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    lhs = Expr::add(lhs, self.term()?);
                }
                Tok::Minus => {
                    self.bump()?;
                    lhs = Expr::sub(lhs, self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.bump()?;
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Tok::Slash => {
                    self.bump()?;
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            let operand = self.unary()?;
            return Ok(match operand {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::mul(Expr::constant(-1), other),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.atom()?;
        while self.tok == Tok::Caret {
            self.bump()?;
            let n = self.exponent()?;
            base = Expr::pow(base, n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parenthesised = self.tok == Tok::LParen;
        if parenthesised {
            self.bump()?;
        }
        let negative = self.tok == Tok::Minus;
        if negative {
            self.bump()?;
        }
        let n = match &self.tok {
            Tok::Num(r) if r.is_integer() => {
                let n = i32::try_from(r.numer().clone())
                    .map_err(|_| self.error(&["exponent within i32"]))?;
                if negative {
                    -n
                } else {
                    n
                }
            }
            _ => return Err(self.error(&["integer exponent"])),
        };
        self.bump()?;
        if parenthesised {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(n)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(r) => {
                self.bump()?;
                Ok(Expr::Const(r))
            }
            Tok::Ident(name) => {
                if name == "x" {
                    self.bump()?;
                    return Ok(Expr::Var);
                }
                let build: fn(Expr) -> Expr = match name.as_str() {
                    "sqrt" => Expr::sqrt,
                    "sin" => Expr::sin,
                    "cos" => Expr::cos,
                    "abs" => Expr::abs,
                    "sgn" => Expr::sgn,
                    _ => return Err(self.error(&["`x`", "sqrt", "sin", "cos", "abs", "sgn"])),
                };
                self.bump()?;
                self.expect(Tok::LParen, "`(`")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(build(inner))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error(OPERAND)),
        }
    }
}
