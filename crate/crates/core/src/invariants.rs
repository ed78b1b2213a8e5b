//! Topological invariants of unibranch plane curve singularities.
//!
//! A cusp type has three interchangeable encodings: Newton pairs, the
//! characteristic exponents `(a; b_1, ..., b_r)` of a normalized
//! parametrization `x = t^a, y = sum t^{b_i}`, and the multiplicity sequence.
//! This module validates each encoding, converts between them, and evaluates
//! the global identities of a projective curve carrying such cusps (the
//! rationality test and the self-intersection of the resolved strict
//! transform).

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::InvariantError;

/// Upper bound on the length of any multiplicity sequence we materialize.
pub const MAX_SEQUENCE_LEN: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NewtonPairs {
    pairs: Vec<(u64, u64)>,
}

impl NewtonPairs {
    /// Validates a raw pair list. Pairs with `p = 1` are accepted.
    pub fn new(pairs: Vec<(u64, u64)>) -> Result<Self, InvariantError> {
        if pairs.is_empty() {
            return Err(InvariantError::EmptyPairs);
        }
        for &(p, q) in &pairs {
            if p == 0 || q == 0 {
                return Err(InvariantError::NonPositive(p, q));
            }
            if p.gcd(&q) != 1 {
                return Err(InvariantError::NotCoprime(p, q));
            }
        }
        let (p1, q1) = pairs[0];
        if p1 > 1 && p1 >= q1 {
            return Err(InvariantError::FirstPairOrder(p1, q1));
        }
        Ok(NewtonPairs { pairs })
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    /// True when some pair has `p = 1` and so carries no characteristic term.
    pub fn is_degenerate(&self) -> bool {
        self.pairs.iter().any(|&(p, _)| p == 1)
    }

    pub fn parse(text: &str) -> Result<Self, InvariantError> {
        let mut cur = Cursor::new(text);
        let mut pairs = Vec::new();
        cur.skip_ws();
        while !cur.at_end() {
            cur.expect('(')?;
            let p = cur.uint()?;
            cur.expect(',')?;
            let q = cur.uint()?;
            cur.expect(')')?;
            pairs.push((p, q));
            cur.skip_ws();
        }
        NewtonPairs::new(pairs)
    }
}

impl Serialize for NewtonPairs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[u64; 2]> = self.pairs.iter().map(|&(p, q)| [p, q]).collect();
        pairs.serialize(s)
    }
}

impl fmt::Display for NewtonPairs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, q) in &self.pairs {
            write!(f, "({p},{q})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CharacteristicExponents {
    a: u64,
    b: Vec<u64>,
}

impl CharacteristicExponents {
    /// `a = 1` with no exponents encodes a smooth germ.
    pub fn new(a: u64, b: Vec<u64>) -> Result<Self, InvariantError> {
        let bad = |m: String| Err(InvariantError::BadCharacteristic(m));
        if a == 0 {
            return bad("multiplicity must be positive".into());
        }
        let mut prev = a;
        let mut g = a;
        for &bi in &b {
            if bi <= prev {
                return bad(format!("exponents must increase strictly and exceed a={a}"));
            }
            let ng = g.gcd(&bi);
            if ng >= g {
                return bad(format!("exponent {bi} does not lower the gcd below {g}"));
            }
            g = ng;
            prev = bi;
        }
        if g != 1 {
            return bad(format!("gcd chain ends at {g}, not 1"));
        }
        Ok(CharacteristicExponents { a, b })
    }

    pub fn multiplicity(&self) -> u64 {
        self.a
    }

    pub fn exponents(&self) -> &[u64] {
        &self.b
    }

    pub fn is_smooth(&self) -> bool {
        self.a == 1
    }

    pub fn parse(text: &str) -> Result<Self, InvariantError> {
        let mut cur = Cursor::new(text);
        cur.skip_ws();
        cur.expect('(')?;
        let a = cur.uint()?;
        let mut b = Vec::new();
        cur.skip_ws();
        if cur.eat(';') {
            cur.skip_ws();
            if !cur.peek_is(')') {
                loop {
                    b.push(cur.uint()?);
                    cur.skip_ws();
                    if !cur.eat(',') {
                        break;
                    }
                }
            }
        }
        cur.expect(')')?;
        cur.skip_ws();
        if !cur.at_end() {
            return Err(cur.error("trailing input"));
        }
        CharacteristicExponents::new(a, b)
    }
}

impl fmt::Display for CharacteristicExponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.a)?;
        for (i, b) in self.b.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MultiplicitySequence(Vec<u64>);

impl MultiplicitySequence {
    pub fn new(entries: Vec<u64>) -> Result<Self, InvariantError> {
        if let Some(&m) = entries.iter().find(|&&m| m < 2) {
            return Err(InvariantError::BadMultiplicitySequence(format!(
                "entry {m} is below 2"
            )));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(InvariantError::BadMultiplicitySequence(
                "entries must be non-increasing".into(),
            ));
        }
        Ok(MultiplicitySequence(entries))
    }

    /// Drops entries equal to 0 or 1, then validates.
    pub fn normalized(entries: Vec<u64>) -> Result<Self, InvariantError> {
        MultiplicitySequence::new(entries.into_iter().filter(|&m| m > 1).collect())
    }

    /// Builds a sequence from `(value, count)` runs, as in the `n_k` shorthand.
    pub fn from_runs(runs: &[(u64, u64)]) -> Result<Self, InvariantError> {
        let mut out = Vec::new();
        for &(v, k) in runs {
            if out.len() as u64 + k > MAX_SEQUENCE_LEN as u64 {
                return Err(InvariantError::TooLong(MAX_SEQUENCE_LEN));
            }
            out.extend(std::iter::repeat_n(v, k as usize));
        }
        MultiplicitySequence::normalized(out)
    }

    pub fn smooth() -> Self {
        MultiplicitySequence(Vec::new())
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Multiplicity of the germ: first entry, or 1 for a smooth germ.
    pub fn multiplicity(&self) -> u64 {
        self.0.first().copied().unwrap_or(1)
    }

    /// Sequence of the strict transform after one blow-up.
    pub fn tail(&self) -> MultiplicitySequence {
        MultiplicitySequence(self.0.iter().skip(1).copied().collect())
    }

    /// Sequence of the image germ after contracting a curve it meets with
    /// intersection `m` (valid when `m >= 2` and `m` is at least the current
    /// multiplicity).
    pub fn prepend(&self, m: u64) -> Result<MultiplicitySequence, InvariantError> {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(m);
        v.extend_from_slice(&self.0);
        MultiplicitySequence::new(v)
    }

    /// Run-length form `[(value, count), ...]`.
    pub fn runs(&self) -> Vec<(u64, u64)> {
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for &m in &self.0 {
            match runs.last_mut() {
                Some((v, k)) if *v == m => *k += 1,
                _ => runs.push((m, 1)),
            }
        }
        runs
    }

    /// Accepts `[8,4,4,2,2]`, `[4_2,2_3]` and `[]`. Entries equal to 1 are
    /// dropped, zero-length runs vanish.
    pub fn parse(text: &str) -> Result<Self, InvariantError> {
        let mut cur = Cursor::new(text);
        cur.skip_ws();
        let runs = cur.multseq_runs()?;
        cur.skip_ws();
        if !cur.at_end() {
            return Err(cur.error("trailing input"));
        }
        MultiplicitySequence::from_runs(&runs)
    }

    /// Shorthand rendering, e.g. `[4_2,2_3]`.
    pub fn shorthand(&self) -> String {
        let parts: Vec<String> = self
            .runs()
            .into_iter()
            .map(|(v, k)| if k == 1 { v.to_string() } else { format!("{v}_{k}") })
            .collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for MultiplicitySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

/// Expands the nested fractional-power form into characteristic exponents.
///
/// Candidate exponents are `e_i = sum_{j<=i} q_j * prod_{k>j} p_k`; only the
/// ones that lower the running gcd are kept, which folds pairs with `p = 1`.
pub fn newton_to_char(np: &NewtonPairs) -> Result<CharacteristicExponents, InvariantError> {
    let overflow = || InvariantError::Overflow(np.to_string());
    let pairs = np.pairs();
    let a = pairs
        .iter()
        .try_fold(1u64, |acc, &(p, _)| acc.checked_mul(p))
        .ok_or_else(overflow)?;
    let mut b = Vec::new();
    let mut g = a;
    let mut e: u64 = 0;
    let mut rest = a;
    for &(p, q) in pairs {
        rest /= p;
        e = q
            .checked_mul(rest)
            .and_then(|t| t.checked_add(e))
            .ok_or_else(overflow)?;
        let ng = g.gcd(&e);
        if ng < g {
            b.push(e);
            g = ng;
        }
    }
    CharacteristicExponents::new(a, b)
}

/// Canonical Newton pairs of a singular germ; every returned `p_i >= 2`.
pub fn char_to_newton(ce: &CharacteristicExponents) -> Result<NewtonPairs, InvariantError> {
    if ce.is_smooth() {
        return Err(InvariantError::BadCharacteristic(
            "a smooth germ has no Newton pairs".into(),
        ));
    }
    let mut pairs = Vec::with_capacity(ce.b.len());
    let mut g_prev = ce.a;
    let mut b_prev = 0u64;
    for &bi in &ce.b {
        let g = g_prev.gcd(&bi);
        pairs.push((g_prev / g, (bi - b_prev) / g));
        g_prev = g;
        b_prev = bi;
    }
    NewtonPairs::new(pairs)
}

/// Multiplicity sequence via the Euclidean algorithm on successive
/// exponent differences against the running gcd.
pub fn char_to_multseq(ce: &CharacteristicExponents) -> Result<MultiplicitySequence, InvariantError> {
    let mut out: Vec<u64> = Vec::new();
    let mut push = |v: u64, k: u64| -> Result<(), InvariantError> {
        if v > 1 && k > 0 {
            if out.len() as u64 + k > MAX_SEQUENCE_LEN as u64 {
                return Err(InvariantError::TooLong(MAX_SEQUENCE_LEN));
            }
            out.extend(std::iter::repeat_n(v, k as usize));
        }
        Ok(())
    };
    let mut e = ce.a;
    let mut b_prev = 0u64;
    for &bi in &ce.b {
        let (mut num, mut den) = (bi - b_prev, e);
        while den > 0 {
            push(den, num / den)?;
            (num, den) = (den, num % den);
        }
        e = num;
        b_prev = bi;
    }
    MultiplicitySequence::new(out)
}

/// Inverse of [`char_to_multseq`]; rejects sequences that no unibranch germ
/// realizes.
pub fn multseq_to_char(ms: &MultiplicitySequence) -> Result<CharacteristicExponents, InvariantError> {
    if ms.is_empty() {
        return CharacteristicExponents::new(1, Vec::new());
    }
    let not_unibranch = || InvariantError::NotUnibranch(ms.to_string());
    // Runs with an unbounded tail of ones.
    let mut runs = ms.runs();
    runs.push((1, u64::MAX));
    let a = runs[0].0;
    let mut b = Vec::new();
    let mut b_prev = 0u64;
    let mut idx = 0usize;
    let mut leftover = runs[0].1;
    let mut e = a;
    while e > 1 {
        // Stage: e is the current gcd with `leftover` unused copies.
        let next = idx + 1;
        let r1 = runs.get(next).ok_or_else(not_unibranch)?.0;
        let diff = leftover
            .checked_mul(e)
            .and_then(|v| v.checked_add(r1))
            .ok_or_else(not_unibranch)?;
        if b.is_empty() && leftover == 0 {
            return Err(not_unibranch());
        }
        b_prev += diff;
        b.push(b_prev);
        // Walk the Euclidean chain r0 = e, r1, r2, ... until it divides out.
        let (mut r0, mut j) = (e, next);
        loop {
            let (rj, count) = runs[j];
            let full = r0 / rj;
            if r0 % rj == 0 && count >= full {
                leftover = count - full;
                idx = j;
                e = rj;
                break;
            }
            if count > full {
                return Err(not_unibranch());
            }
            let rem = r0 - count * rj;
            if runs.get(j + 1).map(|r| r.0) != Some(rem) {
                return Err(not_unibranch());
            }
            r0 = rj;
            j += 1;
        }
    }
    let ce = CharacteristicExponents::new(a, b).map_err(|_| not_unibranch())?;
    if char_to_multseq(&ce)? != *ms {
        return Err(not_unibranch());
    }
    Ok(ce)
}

/// Delta invariant `sum m_i (m_i - 1) / 2`.
pub fn multseq_delta(ms: &MultiplicitySequence) -> BigUint {
    ms.entries()
        .iter()
        .map(|&m| BigUint::from(m) * BigUint::from(m - 1) / 2u32)
        .sum()
}

/// One cusp, carried in all three encodings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CuspType {
    pub newton: NewtonPairs,
    pub char: CharacteristicExponents,
    pub multseq: MultiplicitySequence,
}

impl CuspType {
    pub fn from_newton(np: &NewtonPairs) -> Result<Self, InvariantError> {
        let ce = newton_to_char(np)?;
        CuspType::from_char(&ce)
    }

    pub fn from_char(ce: &CharacteristicExponents) -> Result<Self, InvariantError> {
        Ok(CuspType {
            newton: char_to_newton(ce)?,
            multseq: char_to_multseq(ce)?,
            char: ce.clone(),
        })
    }

    pub fn from_multseq(ms: &MultiplicitySequence) -> Result<Self, InvariantError> {
        let ce = multseq_to_char(ms)?;
        CuspType::from_char(&ce)
    }

    pub fn delta(&self) -> BigUint {
        multseq_delta(&self.multseq)
    }
}

impl Serialize for CuspType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CuspType", 4)?;
        st.serialize_field("newton", &self.newton)?;
        st.serialize_field("char", &self.char)?;
        st.serialize_field("multseq", &self.multseq)?;
        st.serialize_field("delta", &BigNumber(self.delta().into()))?;
        st.end()
    }
}

/// Serializes an arbitrary-precision integer as a bare JSON number.
pub(crate) struct BigNumber(pub BigInt);

impl Serialize for BigNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n: serde_json::Number = self
            .0
            .to_string()
            .parse()
            .map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveProfile {
    degree: u64,
    cusps: Vec<CuspType>,
}

impl CurveProfile {
    pub fn new(degree: u64, cusps: Vec<CuspType>) -> Result<Self, InvariantError> {
        if degree == 0 {
            return Err(InvariantError::ZeroDegree);
        }
        Ok(CurveProfile { degree, cusps })
    }

    /// Builds a profile from multiplicity sequences; smooth entries are skipped.
    pub fn from_multseqs(degree: u64, seqs: &[MultiplicitySequence]) -> Result<Self, InvariantError> {
        let cusps = seqs
            .iter()
            .filter(|s| !s.is_empty())
            .map(CuspType::from_multseq)
            .collect::<Result<Vec<_>, _>>()?;
        CurveProfile::new(degree, cusps)
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn cusps(&self) -> &[CuspType] {
        &self.cusps
    }

    /// Cusp sequences in canonical (descending) order.
    pub fn sorted_multseqs(&self) -> Vec<MultiplicitySequence> {
        let mut v: Vec<_> = self.cusps.iter().map(|c| c.multseq.clone()).collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenusReport {
    #[serde(serialize_with = "ser_big")]
    pub arithmetic_genus: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub delta_sum: BigInt,
    pub rational: bool,
}

pub(crate) fn ser_big<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    BigNumber(v.clone()).serialize(s)
}

pub(crate) fn ser_opt_big<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(|b| BigNumber(b.clone())).serialize(s)
}

impl fmt::Display for GenusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.rational { "=" } else { "!=" };
        write!(f, "{} {} {}", self.arithmetic_genus, rel, self.delta_sum)
    }
}

/// Degree-genus test: `(d-1)(d-2)/2 == sum of cusp deltas`.
pub fn genus_check(cp: &CurveProfile) -> GenusReport {
    let d = BigInt::from(cp.degree);
    let lhs = (&d - 1) * (&d - 2) / 2;
    let rhs: BigInt = cp.cusps.iter().map(|c| BigInt::from(c.delta())).sum();
    GenusReport {
        rational: lhs == rhs,
        arithmetic_genus: lhs,
        delta_sum: rhs,
    }
}

/// Self-intersection of the strict transform under the minimal good
/// resolution: `d^2 - sum m_i^2 - sum (last entry)`.
pub fn cbar_squared(cp: &CurveProfile) -> BigInt {
    let d = BigInt::from(cp.degree);
    let mut total = &d * &d;
    for c in &cp.cusps {
        for &m in c.multseq.entries() {
            total -= BigInt::from(m) * BigInt::from(m);
        }
        if let Some(&last) = c.multseq.entries().last() {
            total -= BigInt::from(last);
        }
    }
    total
}

/// Minimal cursor shared by the textual parsers of this module.
pub(crate) struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(s: &'a str) -> Self {
        Cursor { src: s.as_bytes(), pos: 0 }
    }

    pub(crate) fn error(&self, msg: &str) -> InvariantError {
        InvariantError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn peek_is(&self, c: char) -> bool {
        self.src.get(self.pos) == Some(&(c as u8))
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek_is(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<(), InvariantError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{c}`")))
        }
    }

    pub(crate) fn uint(&mut self) -> Result<u64, InvariantError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| InvariantError::Parse { pos: start, msg: "integer too large".into() })
    }

    /// Parses `[v, v_k, ...]` into runs.
    pub(crate) fn multseq_runs(&mut self) -> Result<Vec<(u64, u64)>, InvariantError> {
        self.expect('[')?;
        let mut runs = Vec::new();
        if self.eat(']') {
            return Ok(runs);
        }
        loop {
            let v = self.uint()?;
            let k = if self.eat('_') { self.uint()? } else { 1 };
            runs.push((v, k));
            if self.eat(']') {
                return Ok(runs);
            }
            self.expect(',')?;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn np(s: &str) -> NewtonPairs {
        NewtonPairs::parse(s).unwrap()
    }

    fn ce(s: &str) -> CharacteristicExponents {
        CharacteristicExponents::parse(s).unwrap()
    }

    fn ms(v: &[u64]) -> MultiplicitySequence {
        MultiplicitySequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validates_pairs() {
        assert!(!np("(2,3)").is_degenerate());
        assert_eq!(NewtonPairs::parse("(2,4)"), Err(InvariantError::NotCoprime(2, 4)));
        assert!(np("(1,2)(2,1)(2,1)").is_degenerate());
        assert_eq!(NewtonPairs::parse("(3,2)"), Err(InvariantError::FirstPairOrder(3, 2)));
        assert_eq!(NewtonPairs::parse("(0,1)"), Err(InvariantError::NonPositive(0, 1)));
        assert_eq!(NewtonPairs::parse(""), Err(InvariantError::EmptyPairs));
        assert!(matches!(NewtonPairs::parse("(2,3"), Err(InvariantError::Parse { .. })));
    }

    #[test]
    fn newton_to_char_examples() {
        assert_eq!(newton_to_char(&np("(2,3)")).unwrap(), ce("(2;3)"));
        assert_eq!(newton_to_char(&np("(2,3)(2,1)(2,1)")).unwrap(), ce("(8;12,14,15)"));
        assert_eq!(newton_to_char(&np("(1,2)(2,1)(2,1)")).unwrap(), ce("(4;10,11)"));
        assert_eq!(newton_to_char(&np("(2,5)(3,1)")).unwrap(), ce("(6;15,16)"));
    }

    #[test]
    fn char_to_newton_examples() {
        assert_eq!(char_to_newton(&ce("(2;3)")).unwrap(), np("(2,3)"));
        assert_eq!(char_to_newton(&ce("(4;10,11)")).unwrap(), np("(2,5)(2,1)"));
        assert_eq!(char_to_newton(&ce("(6;15,16)")).unwrap(), np("(2,5)(3,1)"));
    }

    #[test]
    fn char_to_multseq_examples() {
        assert_eq!(char_to_multseq(&ce("(2;3)")).unwrap(), ms(&[2]));
        assert_eq!(char_to_multseq(&ce("(8;12,14,15)")).unwrap(), ms(&[8, 4, 4, 2, 2]));
        assert_eq!(char_to_multseq(&ce("(6;15,16)")).unwrap(), ms(&[6, 6, 3, 3]));
        assert_eq!(char_to_multseq(&ce("(5;8)")).unwrap(), ms(&[5, 3, 2]));
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert!(CharacteristicExponents::parse("(4;6)").is_err());
        assert!(CharacteristicExponents::parse("(4;6,8)").is_err());
        assert!(CharacteristicExponents::parse("(4;3)").is_err());
        assert!(CharacteristicExponents::parse("(4;7,6)").is_err());
        assert!(CharacteristicExponents::parse("(1;)").unwrap().is_smooth());
    }

    #[test]
    fn multseq_inverse() {
        for s in ["(2;3)", "(8;12,14,15)", "(6;15,16)", "(5;8)", "(4;6,9)", "(3;8)"] {
            let c = ce(s);
            assert_eq!(multseq_to_char(&char_to_multseq(&c).unwrap()).unwrap(), c);
        }
        assert!(matches!(
            multseq_to_char(&ms(&[4, 2])),
            Err(InvariantError::NotUnibranch(_))
        ));
        assert!(multseq_to_char(&ms(&[3, 3, 3, 2])).is_ok());
        assert!(multseq_to_char(&ms(&[3, 2, 2])).is_err());
    }

    #[test]
    fn parses_shorthand() {
        assert_eq!(MultiplicitySequence::parse("[4_2,2_3]").unwrap(), ms(&[4, 4, 2, 2, 2]));
        assert_eq!(MultiplicitySequence::parse("[3, 1, 2_0, 1]").unwrap(), ms(&[3]));
        assert_eq!(MultiplicitySequence::parse("[]").unwrap(), MultiplicitySequence::smooth());
        assert!(MultiplicitySequence::parse("[2,3]").is_err());
        assert_eq!(ms(&[4, 4, 2, 2, 2]).shorthand(), "[4_2,2_3]");
    }

    #[test]
    fn delta_examples() {
        assert_eq!(multseq_delta(&ms(&[2])), 1u32.into());
        assert_eq!(multseq_delta(&ms(&[8, 4, 4, 2, 2])), 42u32.into());
        assert_eq!(multseq_delta(&ms(&[6, 6, 3, 3])), 36u32.into());
        assert_eq!(multseq_delta(&MultiplicitySequence::smooth()), 0u32.into());
    }

    fn profile(d: u64, seqs: &[&[u64]]) -> CurveProfile {
        let seqs: Vec<_> = seqs.iter().map(|s| ms(s)).collect();
        CurveProfile::from_multseqs(d, &seqs).unwrap()
    }

    #[test]
    fn genus_examples() {
        assert!(genus_check(&profile(3, &[&[2]])).rational);
        let r = genus_check(&profile(14, &[&[8, 4, 4, 2, 2], &[6, 6, 3, 3]]));
        assert!(r.rational);
        assert_eq!(r.arithmetic_genus, 78.into());
        assert!(genus_check(&profile(5, &[&[2, 2, 2, 2], &[2, 2]])).rational);
        let bad = genus_check(&profile(5, &[&[2]]));
        assert!(!bad.rational);
        assert_eq!((bad.arithmetic_genus, bad.delta_sum), (6.into(), 1.into()));
    }

    #[test]
    fn cbar_examples() {
        assert_eq!(cbar_squared(&profile(3, &[&[2]])), 3.into());
        assert_eq!(cbar_squared(&profile(5, &[&[2, 2, 2, 2], &[2, 2]])), (-3).into());
        assert_eq!(cbar_squared(&profile(2, &[])), 4.into());
        for l in 2..8u64 {
            for m in 2..8u64 {
                let mut p = vec![m; (l - 1) as usize];
                p.push(m - 1);
                let mut q = vec![(l - 1) * m];
                q.extend(vec![m; (l - 1) as usize]);
                let p = MultiplicitySequence::normalized(p).unwrap();
                let q = MultiplicitySequence::normalized(q).unwrap();
                let cp = CurveProfile::from_multseqs(l * m, &[p, q]).unwrap();
                assert_eq!(cbar_squared(&cp), 0.into(), "l={l} m={m}");
            }
        }
    }

    #[test]
    fn cusp_json_shape() {
        let c = CuspType::from_newton(&np("(2,5)(3,1)")).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"newton":[[2,5],[3,1]],"char":{"a":6,"b":[15,16]},"multseq":[6,6,3,3],"delta":36})
        );
    }
}
