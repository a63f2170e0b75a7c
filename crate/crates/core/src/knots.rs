//! Plain-text knot database.
//!
//! Each record is a `[name]` section of `key = value` lines; `#` starts a
//! comment line.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cplx::serde_pair;
use crate::error::ConfigError;
use crate::lobachevsky::lobachevsky;
use crate::poly::{parse_poly, LaurentBiPoly};

/// The database shipped with the crate.
pub const BUILTIN_DB: &str = include_str!("../data/knots.txt");

/// Seed of the geometric branch: `l_seed` solves `A(l, m0) = 0` with
/// `m0 = 1 + epsilon` close to the complete structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomSeed {
    #[serde(with = "serde_pair")]
    pub m0: Complex64,
    #[serde(with = "serde_pair")]
    pub l_seed: Complex64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotRecord {
    pub name: String,
    pub a_poly: String,
    pub vol_k: f64,
    pub cs_k: f64,
    pub geom_seed: GeomSeed,
}

impl KnotRecord {
    pub fn polynomial(&self) -> Result<LaurentBiPoly, ConfigError> {
        parse_poly(&self.a_poly).map_err(|e| ConfigError::Invalid(format!("knot {}: {e}", self.name)))
    }

    /// Parses the polynomial and checks that the geometric seed lies on the
    /// curve within `1e-6` of the term scale.
    pub fn validate(&self) -> Result<LaurentBiPoly, ConfigError> {
        let a = self.polynomial()?;
        let GeomSeed { m0, l_seed, .. } = self.geom_seed;
        let bad = |e: &dyn fmt::Display| ConfigError::Invalid(format!("knot {}: {e}", self.name));
        let value = a.eval(l_seed, m0).map_err(|e| bad(&e))?;
        let scale = a.term_scale(l_seed, m0).map_err(|e| bad(&e))?;
        if value.norm() > 1e-6 * scale {
            return Err(bad(&format!(
                "geometric seed residual {:.3e} exceeds 1e-6 of term scale {scale:.3e}",
                value.norm()
            )));
        }
        Ok(a)
    }
}

/// Records keyed by name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnotDb {
    records: BTreeMap<String, KnotRecord>,
}

impl KnotDb {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_DB, "builtin knots").expect("builtin knot database is valid")
    }

    pub fn get(&self, name: &str) -> Result<&KnotRecord, ConfigError> {
        self.records.get(name).ok_or_else(|| ConfigError::UnknownKnot(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.records.keys().map(String::as_str)
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self, ConfigError> {
        let err = |line: usize, message: String| ConfigError::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        // (header line, knot name, key -> (line, value))
        type Fields = BTreeMap<String, (usize, String)>;
        let mut sections: Vec<(usize, String, Fields)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, "unterminated section header".into()))?
                    .trim();
                if name.is_empty() {
                    return Err(err(line_no, "empty knot name".into()));
                }
                sections.push((line_no, name.to_string(), BTreeMap::new()));
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, format!("expected 'key = value', got '{line}'")))?;
            let (_, _, fields) = sections
                .last_mut()
                .ok_or_else(|| err(line_no, "field outside of a [knot] section".into()))?;
            if fields
                .insert(key.trim().to_string(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(err(line_no, format!("duplicate key '{}'", key.trim())));
            }
        }

        let mut records = BTreeMap::new();
        for (header_line, name, fields) in sections {
            let field = |key: &str| {
                fields
                    .get(key)
                    .ok_or_else(|| err(header_line, format!("knot {name}: missing '{key}'")))
            };
            let real = |key: &str| -> Result<f64, ConfigError> {
                let (line, v) = field(key)?;
                eval_expr(v).map_err(|m| err(*line, format!("{key}: {m}")))
            };
            let complex = |key: &str| -> Result<Complex64, ConfigError> {
                let (line, v) = field(key)?;
                parse_complex(v).map_err(|m| err(*line, format!("{key}: {m}")))
            };
            let record = KnotRecord {
                name: name.clone(),
                a_poly: field("a_poly")?.1.clone(),
                vol_k: real("vol_K")?,
                cs_k: real("cs_K")?,
                geom_seed: GeomSeed {
                    m0: complex("geom_m0")?,
                    l_seed: complex("geom_l")?,
                    epsilon: real("epsilon")?,
                },
            };
            record.validate().map_err(|e| err(header_line, e.to_string()))?;
            if records.insert(name.clone(), record).is_some() {
                return Err(err(header_line, format!("duplicate knot '{name}'")));
            }
        }
        Ok(Self { records })
    }
}

/// `re, im` or a single real expression.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    match text.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(eval_expr(re)?, eval_expr(im)?)),
        None => Ok(Complex64::new(eval_expr(text)?, 0.0)),
    }
}

/// Evaluates a real expression over `+ - * /`, parentheses, decimal numbers,
/// `pi` and `lobachevsky(x)`.
pub fn eval_expr(text: &str) -> Result<f64, String> {
    let mut p = ExprParser {
        s: text.as_bytes(),
        pos: 0,
    };
    let v = p.sum()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(format!("unexpected '{}' in '{text}'", &text[p.pos..]));
    }
    Ok(v)
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<f64, String> {
        let mut v = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            v = if op == b'+' { v + rhs } else { v - rhs };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            v = if op == b'*' { v * rhs } else { v / rhs };
        }
        Ok(v)
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.sum()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len() {
                    let c = self.s[self.pos];
                    let exp_sign = (c == b'+' || c == b'-') && matches!(self.s[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let lit = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                lit.parse().map_err(|_| format!("bad number '{lit}'"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                match std::str::from_utf8(&self.s[start..self.pos]).unwrap() {
                    "pi" => Ok(PI),
                    "lobachevsky" => {
                        self.expect(b'(')?;
                        let v = self.sum()?;
                        self.expect(b')')?;
                        Ok(lobachevsky(v))
                    }
                    other => Err(format!("unknown name '{other}'")),
                }
            }
            Some(c) => Err(format!("unexpected '{}'", c as char)),
            None => Err("unexpected end of expression".into()),
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected '{}'", c as char))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        assert_eq!(eval_expr("1 + 2*3").unwrap(), 7.0);
        assert_eq!(eval_expr("-(1 - 4)/2").unwrap(), 1.5);
        assert_eq!(eval_expr("1e-4").unwrap(), 1e-4);
        assert_eq!(eval_expr("2.5E+1").unwrap(), 25.0);
        assert!((eval_expr("pi/2").unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(eval_expr("foo").is_err());
        assert!(eval_expr("1 +").is_err());
        assert!(eval_expr("(1").is_err());
    }

    #[test]
    fn builtin_figure_eight() {
        let db = KnotDb::builtin();
        let k = db.get("figure-eight").unwrap();
        assert!((k.vol_k - 2.029_883_212_819_307).abs() < 1e-12);
        assert_eq!(k.cs_k, 0.0);
        assert_eq!(k.polynomial().unwrap().len(), 7);
        assert!(k.geom_seed.l_seed.im > 0.0);
        assert!(matches!(db.get("trefoil"), Err(ConfigError::UnknownKnot(_))));
    }

    #[test]
    fn reports_line_numbers() {
        let text = "[k]\na_poly = l - m\nvol_K = 1\ncs_K = 0\nepsilon = 1e-4\ngeom_m0 = 2, 0\ngeom_l = 3, 0\n";
        let e = KnotDb::parse(text, "t").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 1, .. }), "{e}");
        let e = KnotDb::parse("a = 1\n", "t").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 1, .. }));
        let e = KnotDb::parse("[k]\nvol_K = x\n", "t").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 1, .. }));
    }

    #[test]
    fn accepts_valid_custom_record() {
        let text = "[line]\na_poly = l - m\nvol_K = 0\ncs_K = 0\nepsilon = 0\ngeom_m0 = 2, 1\ngeom_l = 2, 1\n";
        let db = KnotDb::parse(text, "t").unwrap();
        assert_eq!(db.names().collect::<Vec<_>>(), vec!["line"]);
    }
}
