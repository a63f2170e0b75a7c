//! Recursive-descent parser for the polynomial grammar:
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := INT | VAR | VAR '^' SINT | '(' expr ')'
//! VAR    := 'l' | 'm'
//! SINT   := '-'? INT
//! ```
//!
//! Whitespace is ignored and implicit multiplication is rejected.

use super::{Coeff, LaurentBiPoly, Var};
use crate::error::PolyError;

pub fn parse_poly(text: &str) -> Result<LaurentBiPoly, PolyError> {
    let chars: Vec<(usize, char)> = text
        .chars()
        .enumerate()
        .filter(|(_, ch)| !ch.is_whitespace())
        .map(|(i, ch)| (i + 1, ch))
        .collect();
    let mut p = Parser {
        chars,
        pos: 0,
        end_offset: text.chars().count() + 1,
    };
    let poly = p.expr()?;
    if let Some((offset, ch)) = p.peek() {
        return Err(PolyError::Syntax {
            offset,
            message: format!("unexpected '{ch}'"),
        });
    }
    Ok(poly)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<(usize, char)> {
        self.chars.get(self.pos).copied()
    }

    fn offset(&self) -> usize {
        self.peek().map(|(o, _)| o).unwrap_or(self.end_offset)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, want: char) -> bool {
        if matches!(self.peek(), Some((_, ch)) if ch == want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LaurentBiPoly, PolyError> {
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.checked_neg()?;
        }
        loop {
            if self.eat('+') {
                acc = acc.checked_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.checked_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<LaurentBiPoly, PolyError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.checked_mul(&self.factor()?)?;
        }
        if let Some((_, ch)) = self.peek() {
            if ch.is_ascii_digit() || ch == 'l' || ch == 'm' || ch == '(' {
                return self.error("implicit multiplication is not allowed; use '*'");
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentBiPoly, PolyError> {
        match self.peek() {
            Some((_, ch)) if ch.is_ascii_digit() => Ok(LaurentBiPoly::constant(self.int()?)),
            Some((_, 'l')) | Some((_, 'm')) => {
                let var = if self.peek().unwrap().1 == 'l' { Var::L } else { Var::M };
                self.pos += 1;
                let exp = if self.eat('^') {
                    let neg = self.eat('-');
                    let start = self.offset();
                    let mag = self.int()?;
                    let e = if neg { -mag } else { mag };
                    i32::try_from(e).map_err(|_| PolyError::Syntax {
                        offset: start,
                        message: "exponent out of range".into(),
                    })?
                } else {
                    1
                };
                Ok(match var {
                    Var::L => LaurentBiPoly::monomial(1, exp, 0),
                    Var::M => LaurentBiPoly::monomial(1, 0, exp),
                })
            }
            Some((_, '(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.error("expected ')'");
                }
                Ok(inner)
            }
            Some((_, ch)) => self.error(format!("unexpected '{ch}'")),
            None => self.error("unexpected end of input"),
        }
    }

    fn int(&mut self) -> Result<Coeff, PolyError> {
        let start = self.offset();
        let mut value: Coeff = 0;
        let mut digits = 0;
        while let Some((_, ch)) = self.peek() {
            let Some(d) = ch.to_digit(10) else { break };
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as Coeff))
                .ok_or_else(|| PolyError::Overflow(format!("integer literal at offset {start}")))?;
            digits += 1;
            self.pos += 1;
        }
        if digits == 0 {
            return self.error("expected an integer");
        }
        Ok(value)
    }
}
