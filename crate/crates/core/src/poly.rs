//! Sparse multivariate polynomials over the rationals, with a small parser
//! for inputs such as `(y^1*z - x^2)^3 - x^5*y`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::SeriesError;

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl Poly {
    pub fn zero(vars: &[&str]) -> Self {
        Poly { vars: vars.iter().map(|v| v.to_string()).collect(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: Rat) -> Self {
        let mut p = Poly::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn var(vars: &[&str], idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Poly::zero(vars);
        p.add_term(e, Rat::one());
        p
    }

    pub fn monomial(vars: &[&str], exps: Vec<u32>, c: Rat) -> Self {
        let mut p = Poly::zero(vars);
        p.add_term(exps, c);
        p
    }

    fn like(&self) -> Poly {
        Poly { vars: self.vars.clone(), terms: BTreeMap::new() }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rat)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        debug_assert_eq!(exps.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.like();
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), -c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Poly {
        let mut out = self.like();
        if k.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = self.like();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::constant(&self.var_refs(), Rat::one());
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn var_refs(&self) -> Vec<&str> {
        self.vars.iter().map(|s| s.as_str()).collect()
    }

    /// Replaces variable `i` by `subs[i]`; all substitutes share one variable set.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars());
        let target: Vec<&str> = subs[0].var_refs();
        let mut cache: Vec<Vec<Poly>> = subs
            .iter()
            .map(|s| vec![Poly::constant(&s.var_refs(), Rat::one())])
            .collect();
        let mut out = Poly::zero(&target);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(&target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&subs[i]);
                    cache[i].push(next);
                }
                term = term.mul(&cache[i][k as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                t *= num_traits::pow(x.clone(), k as usize);
            }
            acc += t;
        }
        acc
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = self.like();
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = e.clone();
                e2[var] -= 1;
                out.add_term(e2, c * rat(e[var] as i64));
            }
        }
        out
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars()];
        };
        let mut m = first.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    /// Divides by a monomial that divides every term.
    pub fn div_monomial(&self, m: &[u32]) -> Poly {
        let mut out = self.like();
        for (e, c) in &self.terms {
            let e2: Vec<u32> = e.iter().zip(m).map(|(a, b)| a - b).collect();
            out.terms.insert(e2, c.clone());
        }
        out
    }

    /// Rename variables without touching exponents.
    pub fn with_vars(&self, vars: &[&str]) -> Poly {
        assert_eq!(vars.len(), self.nvars());
        Poly { vars: vars.iter().map(|v| v.to_string()).collect(), terms: self.terms.clone() }
    }

    /// Parses an expression in the given variables. Supports integers,
    /// `+ - * ^`, parentheses and juxtaposition (`3t^2`).
    pub fn parse(text: &str, vars: &[&str]) -> Result<Poly, SeriesError> {
        let mut p = ExprParser { src: text.as_bytes(), pos: 0, vars };
        let out = p.sum()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("unexpected input"));
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], k)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{abs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

struct ExprParser<'a, 'v> {
    src: &'a [u8],
    pos: usize,
    vars: &'v [&'v str],
}

impl ExprParser<'_, '_> {
    fn err(&self, msg: &str) -> SeriesError {
        SeriesError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Poly, SeriesError> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.product()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Poly, SeriesError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let c = d.coeff(&vec![0; d.nvars()]);
                    if d.terms.len() != 1 || c.is_zero() {
                        return Err(self.err("can only divide by a nonzero constant"));
                    }
                    acc = acc.scale(&c.recip());
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly, SeriesError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly, SeriesError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let braced = self.peek() == Some(b'{');
            if braced {
                self.pos += 1;
            }
            let n = self.integer()?;
            if braced {
                if self.peek() != Some(b'}') {
                    return Err(self.err("expected `}`"));
                }
                self.pos += 1;
            }
            let n: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, SeriesError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().parse().unwrap())
    }

    fn atom(&mut self) -> Result<Poly, SeriesError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Poly::constant(self.vars, Rat::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                // Variables are single letters so that `xy` reads as `x*y`.
                self.pos += 1;
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Poly::var(self.vars, i)),
                    None => {
                        self.pos = start;
                        Err(self.err(&format!("unknown variable `{name}`")))
                    }
                }
            }
            _ => Err(self.err("expected a number, variable or `(`")),
        }
    }
}

/// Dense univariate polynomial helpers (coefficient of `x^i` at index `i`).
pub mod univariate {
    use super::Rat;
    use num_traits::{One, Zero};

    pub fn trim(p: &mut Vec<Rat>) {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
    }

    pub fn degree(p: &[Rat]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }

    pub fn rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = degree(b).expect("division by zero polynomial");
        let lead = b[db].clone();
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let k = &r[dr] / &lead;
            for i in 0..=db {
                let t = &k * &b[i];
                r[dr - db + i] -= t;
            }
            trim(&mut r);
        }
        r
    }

    pub fn div_exact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let db = degree(b).expect("division by zero polynomial");
        let mut r = a.to_vec();
        trim(&mut r);
        let Some(da) = degree(&r) else { return Vec::new() };
        if da < db {
            return Vec::new();
        }
        let mut q = vec![Rat::zero(); da - db + 1];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let k = &r[dr] / &b[db];
            for i in 0..=db {
                let t = &k * &b[i];
                r[dr - db + i] -= t;
            }
            q[dr - db] = k;
            trim(&mut r);
        }
        q
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while degree(&y).is_some() {
            let r = rem(&x, &y);
            x = y;
            y = r;
        }
        if let Some(d) = degree(&x) {
            let lead = x[d].clone();
            for c in x.iter_mut() {
                *c = &*c / &lead;
            }
            debug_assert!(x[d].is_one());
        }
        x
    }

    pub fn derivative(p: &[Rat]) -> Vec<Rat> {
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * super::rat(i as i64))
            .collect()
    }

    /// Number of distinct complex roots.
    pub fn distinct_roots(p: &[Rat]) -> usize {
        let Some(d) = degree(p) else { return 0 };
        let g = gcd(p, &derivative(p));
        d - degree(&g).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XYZ: &[&str] = &["x", "y", "z"];

    #[test]
    fn parses_and_expands() {
        let p = Poly::parse("(y^1*z - x^2)^2 - x^3*y", XYZ).unwrap();
        let q = Poly::parse("y^2*z^2 - 2*x^2*y*z + x^4 - x^3*y", XYZ).unwrap();
        assert_eq!(p, q);
        assert!(p.is_homogeneous());
        assert_eq!(p.total_degree(), 4);
        let j = Poly::parse("3t^{14} + 3s t^13 + 2s^2t^12", &["t", "s"]).unwrap();
        assert_eq!(j.eval(&[rat(1), rat(1)]), rat(8));
    }

    #[test]
    fn parse_errors_carry_position() {
        assert!(matches!(Poly::parse("x + w", XYZ), Err(SeriesError::Parse { pos: 4, .. })));
        assert!(Poly::parse("(x + y", XYZ).is_err());
        assert!(Poly::parse("x^", XYZ).is_err());
    }

    #[test]
    fn compose_translates() {
        let p = Poly::parse("x^2 - y", &["x", "y"]).unwrap();
        let v = &["u", "v"];
        let shifted = p.compose(&[
            Poly::parse("u + 1", v).unwrap(),
            Poly::parse("v + 1", v).unwrap(),
        ]);
        assert_eq!(shifted, Poly::parse("u^2 + 2u - v", v).unwrap());
    }

    #[test]
    fn univariate_gcd_and_roots() {
        // (x-1)^2 (x+2)
        let p = vec![rat(2), rat(-3), rat(0), rat(1)];
        assert_eq!(univariate::distinct_roots(&p), 2);
        let g = univariate::gcd(&p, &[rat(-1), rat(1)]);
        assert_eq!(g, vec![rat(-1), rat(1)]);
    }

    #[test]
    fn display_round_trips() {
        let p = Poly::parse("x*(y*x + z^2)^2 - z^5", XYZ).unwrap();
        assert_eq!(Poly::parse(&p.to_string(), XYZ).unwrap(), p);
    }
}
