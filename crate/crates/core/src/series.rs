//! Truncated power series over the rationals and branch-level algorithms.
//!
//! A [`TruncatedSeries`] knows its coefficients below a precision `N`; every
//! operation returns the largest precision it can vouch for, and queries that
//! would need an unknown term fail with [`SeriesError::PrecisionExhausted`].

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{InvariantError, SeriesError};
use crate::invariants::{CharacteristicExponents, MultiplicitySequence};
use crate::poly::{Poly, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: BTreeMap<u32, Rat>,
    prec: u32,
}

impl TruncatedSeries {
    pub fn zero(prec: u32) -> Self {
        TruncatedSeries { coeffs: BTreeMap::new(), prec }
    }

    pub fn monomial(c: Rat, exp: u32, prec: u32) -> Self {
        let mut s = TruncatedSeries::zero(prec);
        s.set(exp, c);
        s
    }

    pub fn from_coeffs(pairs: impl IntoIterator<Item = (u32, Rat)>, prec: u32) -> Self {
        let mut s = TruncatedSeries::zero(prec);
        for (e, c) in pairs {
            let cur = s.coeffs.get(&e).cloned().unwrap_or_else(Rat::zero);
            s.set(e, cur + c);
        }
        s
    }

    /// Sum of `t^e` for each exponent.
    pub fn from_exponents(exps: &[u32], prec: u32) -> Self {
        TruncatedSeries::from_coeffs(exps.iter().map(|&e| (e, Rat::one())), prec)
    }

    /// A univariate polynomial read as a series of the given precision.
    pub fn from_poly(p: &Poly, prec: u32) -> Self {
        assert_eq!(p.nvars(), 1);
        TruncatedSeries::from_coeffs(p.terms().map(|(e, c)| (e[0], c.clone())), prec)
    }

    fn set(&mut self, e: u32, c: Rat) {
        if e >= self.prec || c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Least exponent with a nonzero coefficient.
    pub fn order(&self) -> Result<u32, SeriesError> {
        self.coeffs
            .keys()
            .next()
            .copied()
            .ok_or(SeriesError::PrecisionExhausted(self.prec))
    }

    /// A lower bound on the order that is always available.
    pub fn order_bound(&self) -> u32 {
        self.coeffs.keys().next().copied().unwrap_or(self.prec)
    }

    pub fn coeff(&self, n: u32) -> Result<Rat, SeriesError> {
        if n >= self.prec {
            return Err(SeriesError::PrecisionExhausted(self.prec));
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_else(Rat::zero))
    }

    pub fn truncate(&self, prec: u32) -> Self {
        let prec = prec.min(self.prec);
        TruncatedSeries {
            coeffs: self.coeffs.range(..prec).map(|(e, c)| (*e, c.clone())).collect(),
            prec,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.min(other.prec);
        let mut out = self.truncate(prec);
        for (&e, c) in other.coeffs.range(..prec) {
            let cur = out.coeffs.get(&e).cloned().unwrap_or_else(Rat::zero);
            out.set(e, cur + c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return TruncatedSeries::zero(self.prec);
        }
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * k)).collect(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = (self.prec.saturating_add(other.order_bound()))
            .min(other.prec.saturating_add(self.order_bound()));
        let mut acc: BTreeMap<u32, Rat> = BTreeMap::new();
        for (&e1, c1) in &self.coeffs {
            if e1 >= prec {
                break;
            }
            for (&e2, c2) in other.coeffs.range(..prec - e1) {
                *acc.entry(e1 + e2).or_insert_with(Rat::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        TruncatedSeries { coeffs: acc, prec }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = TruncatedSeries::monomial(Rat::one(), 0, u32::MAX);
        for _ in 0..n {
            result = result.mul(self);
        }
        if n == 0 {
            result.prec = self.prec;
        }
        result
    }

    /// Multiplies by `t^k`.
    pub fn shift_up(&self, k: u32) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            prec: self.prec.saturating_add(k),
        }
    }

    /// Divides by `t^k`; every known coefficient below `k` must vanish.
    pub fn shift_down(&self, k: u32) -> Result<Self, SeriesError> {
        if k > self.prec || self.coeffs.range(..k).next().is_some() {
            return Err(SeriesError::NotDivisible);
        }
        Ok(TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e - k, c.clone())).collect(),
            prec: self.prec - k,
        })
    }

    /// `self / other`, where `other` has a known order not exceeding ours.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let k = other.order()?;
        if self.order_bound() < k {
            return Err(SeriesError::NotDivisible);
        }
        let num = self.shift_down(k)?;
        let den = other.shift_down(k)?;
        let prec = num.prec.min(den.prec);
        let lead_inv = den.coeff(0)?.recip();
        let mut q: BTreeMap<u32, Rat> = BTreeMap::new();
        for n in 0..prec {
            let mut acc = num.coeffs.get(&n).cloned().unwrap_or_else(Rat::zero);
            for (&j, dj) in den.coeffs.range(1..n + 1) {
                if let Some(qc) = q.get(&(n - j)) {
                    acc -= dj * qc;
                }
            }
            if !acc.is_zero() {
                q.insert(n, acc * &lead_inv);
            }
        }
        Ok(TruncatedSeries { coeffs: q, prec })
    }

    /// Subtracts the constant term.
    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.coeffs.remove(&0);
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match *e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.prec)
    }
}

/// Evaluates a polynomial at series arguments.
pub fn eval_poly(p: &Poly, args: &[TruncatedSeries]) -> TruncatedSeries {
    assert_eq!(p.nvars(), args.len());
    let prec = args.iter().map(|a| a.precision()).min().unwrap_or(u32::MAX);
    let mut powers: Vec<Vec<TruncatedSeries>> = args
        .iter()
        .map(|a| vec![TruncatedSeries::monomial(Rat::one(), 0, a.precision())])
        .collect();
    let mut acc = TruncatedSeries::zero(u32::MAX);
    let mut any = false;
    for (e, c) in p.terms() {
        let mut term = TruncatedSeries::monomial(c.clone(), 0, u32::MAX);
        for (i, &k) in e.iter().enumerate() {
            while powers[i].len() <= k as usize {
                let next = powers[i].last().unwrap().mul(&args[i]);
                powers[i].push(next);
            }
            term = term.mul(&powers[i][k as usize]);
        }
        acc = acc.add(&term);
        any = true;
    }
    if !any {
        acc = TruncatedSeries::zero(prec);
    }
    acc
}

/// A parametrized germ `t -> (x(t), y(t))` through the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalBranch {
    pub x: TruncatedSeries,
    pub y: TruncatedSeries,
}

impl LocalBranch {
    pub fn new(x: TruncatedSeries, y: TruncatedSeries) -> Result<Self, SeriesError> {
        if x.coeff(0).map(|c| !c.is_zero()).unwrap_or(false)
            || y.coeff(0).map(|c| !c.is_zero()).unwrap_or(false)
        {
            return Err(SeriesError::NotPrimitive);
        }
        if x.order().is_err() && y.order().is_err() {
            return Err(SeriesError::PrecisionExhausted(x.precision().min(y.precision())));
        }
        Ok(LocalBranch { x, y })
    }

    /// The monomial branch `(t^a, sum t^{b_i})`.
    pub fn monomial(a: u32, b: &[u32], prec: u32) -> Self {
        LocalBranch {
            x: TruncatedSeries::monomial(Rat::one(), a, prec),
            y: TruncatedSeries::from_exponents(b, prec),
        }
    }

    /// `min(ord x, ord y)`, answered whenever the smaller order is known.
    pub fn multiplicity(&self) -> Result<u32, SeriesError> {
        match (self.x.order(), self.y.order()) {
            (Ok(a), Ok(b)) => Ok(a.min(b)),
            (Ok(a), Err(_)) if a <= self.y.precision() => Ok(a),
            (Err(_), Ok(b)) if b <= self.x.precision() => Ok(b),
            (_, Err(e)) | (Err(e), _) => Err(e),
        }
    }

    /// Tangent line `ax + by` of the branch, as a linear form in `x, y`.
    pub fn tangent_line(&self) -> Result<Poly, SeriesError> {
        let vars = ["x", "y"];
        let m = self.multiplicity()?;
        let cx = self.x.coeff(m)?;
        let cy = self.y.coeff(m)?;
        // The point moves in direction (cx, cy); the line is cy*x - cx*y = 0.
        let mut p = Poly::zero(&vars);
        p.add_term(vec![1, 0], cy);
        p.add_term(vec![0, 1], -cx);
        Ok(p)
    }
}

/// One blow-up of a parametrized germ: returns its multiplicity and the
/// strict transform, translated back to the origin.
pub fn branch_blowup(b: &LocalBranch) -> Result<(u32, LocalBranch), SeriesError> {
    let m = b.multiplicity()?;
    let x_first = match b.x.order() {
        Ok(ox) => ox == m,
        Err(_) => false,
    };
    let next = if x_first {
        let q = b.y.div(&b.x)?;
        LocalBranch { x: b.x.clone(), y: q.without_constant() }
    } else {
        let q = b.x.div(&b.y)?;
        LocalBranch { x: q.without_constant(), y: b.y.clone() }
    };
    Ok((m, next))
}

/// Number of confirming blow-ups applied once multiplicity 1 is reached.
const SMOOTH_GUARD: usize = 3;

/// Multiplicity sequence of a primitive parametrization.
pub fn multseq_from_branch(b: &LocalBranch) -> Result<MultiplicitySequence, SeriesError> {
    let mut seq: Vec<u64> = Vec::new();
    let mut cur = b.clone();
    loop {
        let (m, next) = branch_blowup(&cur)?;
        if m == 0 {
            return Err(SeriesError::NotPrimitive);
        }
        if m == 1 {
            let mut guard = next;
            for _ in 0..SMOOTH_GUARD {
                match branch_blowup(&guard) {
                    Ok((1, n)) => guard = n,
                    Ok(_) => return Err(SeriesError::NotPrimitive),
                    Err(SeriesError::PrecisionExhausted(_)) => break,
                    Err(e) => return Err(e),
                }
            }
            break;
        }
        seq.push(m as u64);
        cur = next;
    }
    Ok(MultiplicitySequence::new(seq)?)
}

/// The monomial branch `(t^a, sum t^{b_i})` of a set of characteristic
/// exponents.
pub fn monomial_branch(ce: &CharacteristicExponents, prec: u32) -> LocalBranch {
    let b: Vec<u32> = ce.exponents().iter().map(|&e| e as u32).collect();
    LocalBranch::monomial(ce.multiplicity() as u32, &b, prec)
}

/// Multiplicity sequence of the monomial branch, computed by blow-ups.
///
/// Starts just above the last exponent and doubles on demand; coefficient
/// growth makes oversized precision far more costly than a retry.
pub fn oracle_multseq(ce: &CharacteristicExponents) -> Result<MultiplicitySequence, SeriesError> {
    let last = ce.exponents().last().copied().unwrap_or(1);
    let start = u32::try_from(last + ce.multiplicity())
        .map_err(|_| InvariantError::Overflow(ce.to_string()))?;
    let cap = start.saturating_mul(RETRY_CAP);
    let mut n = start;
    loop {
        match multseq_from_branch(&monomial_branch(ce, n)) {
            Err(SeriesError::PrecisionExhausted(_)) if n < cap => n = n.saturating_mul(2).min(cap),
            other => return other,
        }
    }
}

/// Local intersection multiplicity of the branch with `{g = 0}`.
pub fn pullback_order(b: &LocalBranch, g: &Poly) -> Result<u32, SeriesError> {
    assert_eq!(g.nvars(), 2);
    if !g.coeff(&[0, 0]).is_zero() {
        return Err(SeriesError::NotOnCurve);
    }
    eval_poly(g, &[b.x.clone(), b.y.clone()]).order()
}

/// Default working precision for an input of the given degree.
pub fn default_precision(degree: u32) -> u32 {
    4 * degree.max(1)
}

/// Maximum growth factor applied by [`with_precision_retry`].
pub const RETRY_CAP: u32 = 1 << 10;

/// Runs `f` at the starting precision, doubling on
/// [`SeriesError::PrecisionExhausted`] up to `RETRY_CAP` times the start.
pub fn with_precision_retry<T>(
    start: u32,
    mut f: impl FnMut(u32) -> Result<T, SeriesError>,
) -> Result<T, SeriesError> {
    let start = start.max(1);
    let cap = start.saturating_mul(RETRY_CAP);
    let mut n = start;
    loop {
        match f(n) {
            Err(SeriesError::PrecisionExhausted(_)) if n < cap => n = n.saturating_mul(2).min(cap),
            other => return other,
        }
    }
}
