//! Recursive-descent parser for the expression grammar.
//!
//! Grammar: integers; rationals `p/q`; symbols `[a-zA-Z][a-zA-Z0-9_]*`;
//! `+ - * / ^` with standard precedence (`^` right-associative and binding
//! tighter than unary minus); function application `name(expr)`;
//! parentheses. `sqrt(e)` parses as `e^(1/2)`.

use super::{normalize, Expr, Func};
use crate::error::{Error, ParseError, Result};

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    normalize(&e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                let t = self.term()?;
                terms.push(Expr::Mul(vec![Expr::num_i64(-1), t]));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut parts = vec![self.unary()?];
        loop {
            if self.eat(b'*') {
                parts.push(self.unary()?);
            } else if self.peek() == Some(b'/') {
                let slash_pos = self.pos;
                self.pos += 1;
                self.skip_ws();
                let d = self.unary()?;
                if d.is_num_zero() {
                    return Err(Error::Parse(ParseError {
                        pos: slash_pos,
                        msg: "zero denominator".into(),
                    }));
                }
                parts.push(Expr::Pow(Box::new(d), Box::new(Expr::num_i64(-1))));
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Expr::Mul(parts)
        })
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            let e = self.unary()?;
            return Ok(Expr::Mul(vec![Expr::num_i64(-1), e]));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // right-associative; allow a signed exponent
            let e = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("expected a number, symbol, function, or `(`")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: num_bigint::BigInt = text.parse().map_err(|_| Error::Parse(ParseError {
            pos: start,
            msg: "invalid integer".into(),
        }))?;
        self.skip_ws();
        Ok(Expr::Num(super::Rational::from_integer(n)))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == b'_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .to_string();
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            self.skip_ws();
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)` after function argument"));
            }
            if name == "sqrt" {
                return Ok(Expr::Pow(Box::new(arg), Box::new(Expr::rat(1, 2))));
            }
            match Func::from_name(&name) {
                Some(f) => Ok(Expr::Fun(f, Box::new(arg))),
                None => Err(Error::Parse(ParseError {
                    pos: start,
                    msg: format!("unknown function `{}`", name),
                })),
            }
        } else {
            Ok(Expr::sym(&name))
        }
    }
}
