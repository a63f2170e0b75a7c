//! Bivariate Laurent polynomials in `l` and `m` with exact integer coefficients.
//!
//! The term map is keyed by `(l_exponent, m_exponent)`. Coefficients stay exact
//! (`i128`, checked arithmetic) until evaluation converts them to `f64`.

mod parse;
mod roots;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::PolyError;

pub use parse::parse_poly;
pub use roots::{cluster_roots, roots_in_l, RootCluster};

pub type Coeff = i128;

/// Choice of variable for differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    L,
    M,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LaurentBiPoly {
    terms: BTreeMap<(i32, i32), Coeff>,
}

impl LaurentBiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: Coeff, l_exp: i32, m_exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert((l_exp, m_exp), c);
        }
        Self { terms }
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::L => Self::monomial(1, 1, 0),
            Var::M => Self::monomial(1, 0, 1),
        }
    }

    /// Builds a polynomial from `(l_exp, m_exp, coeff)` triples, combining repeats.
    pub fn from_terms<I>(terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (i32, i32, Coeff)>,
    {
        let mut p = Self::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c)?;
        }
        Ok(p)
    }

    fn add_term(&mut self, i: i32, j: i32, c: Coeff) -> Result<(), PolyError> {
        if c == 0 {
            return Ok(());
        }
        let entry = self.terms.entry((i, j)).or_insert(0);
        *entry = entry
            .checked_add(c)
            .ok_or_else(|| PolyError::Overflow(format!("coefficient of l^{i}*m^{j}")))?;
        if *entry == 0 {
            self.terms.remove(&(i, j));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, l_exp: i32, m_exp: i32) -> Coeff {
        self.terms.get(&(l_exp, m_exp)).copied().unwrap_or(0)
    }

    /// Iterates `((l_exp, m_exp), coeff)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = ((i32, i32), Coeff)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        let mut out = self.clone();
        for (&(i, j), &c) in &other.terms {
            out.add_term(i, j, c)?;
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.checked_add(&other.checked_neg()?)
    }

    pub fn checked_neg(&self) -> Result<Self, PolyError> {
        let mut out = Self::zero();
        for (&k, &c) in &self.terms {
            let n = c
                .checked_neg()
                .ok_or_else(|| PolyError::Overflow("negation".into()))?;
            out.terms.insert(k, n);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        let mut out = Self::zero();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                let c = c1
                    .checked_mul(c2)
                    .ok_or_else(|| PolyError::Overflow("coefficient product".into()))?;
                let i = i1
                    .checked_add(i2)
                    .ok_or_else(|| PolyError::Overflow("l exponent".into()))?;
                let j = j1
                    .checked_add(j2)
                    .ok_or_else(|| PolyError::Overflow("m exponent".into()))?;
                out.add_term(i, j, c)?;
            }
        }
        Ok(out)
    }

    /// Formal partial derivative. Exponents shift by -1 in the chosen variable.
    pub fn partial(&self, var: Var) -> Result<Self, PolyError> {
        let mut out = Self::zero();
        for (&(i, j), &c) in &self.terms {
            let (e, ni, nj) = match var {
                Var::L => (i, i - 1, j),
                Var::M => (j, i, j - 1),
            };
            if e == 0 {
                continue;
            }
            let nc = c
                .checked_mul(e as Coeff)
                .ok_or_else(|| PolyError::Overflow("derivative coefficient".into()))?;
            out.add_term(ni, nj, nc)?;
        }
        Ok(out)
    }

    /// Value at `(l, m)`, term by term; each exact coefficient is converted to
    /// floating point only when its monomial is multiplied in.
    pub fn eval(&self, l: Complex64, m: Complex64) -> Result<Complex64, PolyError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(i, j), &c) in &self.terms {
            acc += monomial_value(l, m, i, j)? * (c as f64);
        }
        Ok(acc)
    }

    /// Largest absolute term value at `(l, m)`, the natural scale for residuals.
    pub fn term_scale(&self, l: Complex64, m: Complex64) -> Result<f64, PolyError> {
        let mut s: f64 = 0.0;
        for (&(i, j), &c) in &self.terms {
            s = s.max(monomial_value(l, m, i, j)?.norm() * (c as f64).abs());
        }
        Ok(s)
    }

    /// Minimal `(a, b)` with `a, b >= 0` such that `l^a m^b * self` has no
    /// negative exponents.
    pub fn denominator_shift(&self) -> (i32, i32) {
        let a = self.terms.keys().map(|&(i, _)| -i).max().unwrap_or(0).max(0);
        let b = self.terms.keys().map(|&(_, j)| -j).max().unwrap_or(0).max(0);
        (a, b)
    }

    /// `l^a m^b * self` with the shift from [`denominator_shift`](Self::denominator_shift),
    /// together with that shift.
    pub fn cleared(&self) -> (Self, (i32, i32)) {
        let (a, b) = self.denominator_shift();
        let terms = self.terms.iter().map(|(&(i, j), &c)| ((i + a, j + b), c)).collect();
        (Self { terms }, (a, b))
    }

    pub fn l_degree_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.keys().map(|k| k.0).min()?;
        let hi = self.terms.keys().map(|k| k.0).max()?;
        Some((lo, hi))
    }

    /// Coefficients of the univariate polynomial in `l` obtained by fixing `m`
    /// and dividing out the lowest power of `l`. Index `k` holds the
    /// coefficient of `l^k`; the returned offset is that lowest power.
    pub fn coefficients_in_l(&self, m: Complex64) -> Result<(i32, Vec<Complex64>), PolyError> {
        let Some((lo, hi)) = self.l_degree_range() else {
            return Ok((0, Vec::new()));
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (&(i, j), &c) in &self.terms {
            let mj = if j < 0 {
                if m == Complex64::new(0.0, 0.0) {
                    return Err(PolyError::Domain('m'));
                }
                m.powi(j)
            } else {
                m.powi(j)
            };
            coeffs[(i - lo) as usize] += mj * (c as f64);
        }
        Ok((lo, coeffs))
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }
}

fn monomial_value(l: Complex64, m: Complex64, i: i32, j: i32) -> Result<Complex64, PolyError> {
    let zero = Complex64::new(0.0, 0.0);
    if i < 0 && l == zero {
        return Err(PolyError::Domain('l'));
    }
    if j < 0 && m == zero {
        return Err(PolyError::Domain('m'));
    }
    Ok(l.powi(i) * m.powi(j))
}

impl fmt::Display for LaurentBiPoly {
    /// Canonical form: terms by descending l-exponent, then descending
    /// m-exponent; unit coefficients are omitted on non-constant monomials.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(i, j), &c)) in self.terms.iter().rev().enumerate() {
            let mag = c.unsigned_abs();
            match (n, c < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if mag != 1 || (i == 0 && j == 0) {
                factors.push(mag.to_string());
            }
            for (e, name) in [(i, 'l'), (j, 'm')] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl FromStr for LaurentBiPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

/// Value and low-order derivatives of a polynomial at one point.
#[derive(Debug, Clone, Copy)]
pub struct Jet {
    pub value: Complex64,
    pub d_l: Complex64,
    pub d_m: Complex64,
    pub d_ll: Complex64,
    /// Largest absolute term value.
    pub scale: f64,
}

/// Floating-point copy of a [`LaurentBiPoly`] for repeated evaluation of
/// value and partials, as used inside the path tracker.
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(i32, i32, f64)>,
}

impl CompiledPoly {
    pub fn new(p: &LaurentBiPoly) -> Self {
        Self {
            terms: p.terms().map(|((i, j), c)| (i, j, c as f64)).collect(),
        }
    }

    /// Caller guarantees `l` and `m` are non-zero.
    pub fn jet(&self, l: Complex64, m: Complex64) -> Jet {
        let mut jet = Jet {
            value: Complex64::new(0.0, 0.0),
            d_l: Complex64::new(0.0, 0.0),
            d_m: Complex64::new(0.0, 0.0),
            d_ll: Complex64::new(0.0, 0.0),
            scale: 0.0,
        };
        let (linv, minv) = (l.inv(), m.inv());
        for &(i, j, c) in &self.terms {
            let t = l.powi(i) * m.powi(j) * c;
            jet.value += t;
            jet.scale = jet.scale.max(t.norm());
            if i != 0 {
                jet.d_l += t * linv * i as f64;
                if i != 1 {
                    jet.d_ll += t * linv * linv * (i * (i - 1)) as f64;
                }
            }
            if j != 0 {
                jet.d_m += t * minv * j as f64;
            }
        }
        jet
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn fig8() -> LaurentBiPoly {
        parse_poly("m^4*l^2 - (m^8 - m^6 - 2*m^4 - m^2 + 1)*l + m^4").unwrap()
    }

    #[test]
    fn figure_eight_values() {
        let a = fig8();
        assert!((a.eval(c(1.0, 0.0), c(1.0, 0.0)).unwrap() - c(4.0, 0.0)).norm() < 1e-14);
        assert!(a.eval(c(-1.0, 0.0), c(1.0, 0.0)).unwrap().norm() < 1e-14);
        let al = a.partial(Var::L).unwrap();
        assert!(al.eval(c(-1.0, 0.0), c(1.0, 0.0)).unwrap().norm() < 1e-14);
        let am = a.partial(Var::M).unwrap();
        assert!(am.eval(c(-1.0, 0.0), c(1.0, 0.0)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn zero_poly_eval() {
        let z = LaurentBiPoly::zero();
        assert_eq!(z.eval(c(0.3, 1.0), c(-2.0, 0.5)).unwrap(), c(0.0, 0.0));
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn partial_power_rule() {
        let p = LaurentBiPoly::monomial(1, 2, 4);
        assert_eq!(p.partial(Var::L).unwrap(), LaurentBiPoly::monomial(2, 1, 4));
        let pure_l = parse_poly("l^3 - 2*l + 7").unwrap();
        assert!(pure_l.partial(Var::M).unwrap().is_zero());
        let laurent = parse_poly("l^-2").unwrap();
        assert_eq!(laurent.partial(Var::L).unwrap(), LaurentBiPoly::monomial(-2, -3, 0));
    }

    #[test]
    fn negative_exponent_at_zero_is_domain_error() {
        let p = parse_poly("l^-1 + m").unwrap();
        assert_eq!(p.eval(c(0.0, 0.0), c(1.0, 0.0)), Err(PolyError::Domain('l')));
        let q = parse_poly("l + m^-2").unwrap();
        assert_eq!(q.eval(c(1.0, 0.0), c(0.0, 0.0)), Err(PolyError::Domain('m')));
        // Non-negative exponents are fine at zero.
        assert_eq!(parse_poly("l*m").unwrap().eval(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn display_canonical() {
        assert_eq!(fig8().to_string(), "l^2*m^4 - l*m^8 + l*m^6 + 2*l*m^4 + l*m^2 - l + m^4");
        assert_eq!(parse_poly("-l*m^-1 + 3").unwrap().to_string(), "-l*m^-1 + 3");
        assert_eq!(parse_poly("1 - 1").unwrap().to_string(), "0");
    }

    #[test]
    fn clearing_denominators() {
        let p = parse_poly("l^-2*m + m^-3 + l").unwrap();
        let (q, shift) = p.cleared();
        assert_eq!(shift, (2, 3));
        assert_eq!(q, parse_poly("m^4 + l^2 + l^3*m^3").unwrap());
    }

    #[test]
    fn jet_matches_exact_partials() {
        let a = fig8();
        let (l, m) = (c(0.3, -1.1), c(1.2, 0.4));
        let jet = a.compile().jet(l, m);
        let al = a.partial(Var::L).unwrap();
        let am = a.partial(Var::M).unwrap();
        let all = al.partial(Var::L).unwrap();
        let rel = |x: Complex64, y: Complex64| (x - y).norm() / y.norm().max(1.0);
        assert!(rel(jet.value, a.eval(l, m).unwrap()) < 1e-13);
        assert!(rel(jet.d_l, al.eval(l, m).unwrap()) < 1e-13);
        assert!(rel(jet.d_m, am.eval(l, m).unwrap()) < 1e-13);
        assert!(rel(jet.d_ll, all.eval(l, m).unwrap()) < 1e-13);
        assert!((jet.scale - a.term_scale(l, m).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn overflow_is_reported() {
        let big = LaurentBiPoly::constant(i128::MAX / 2 + 1);
        assert!(matches!(big.checked_add(&big), Err(PolyError::Overflow(_))));
        assert!(matches!(big.checked_mul(&big), Err(PolyError::Overflow(_))));
    }
}
