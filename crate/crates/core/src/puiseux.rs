//! Newton–Puiseux expansion over the rationals, in the rational
//! (Duval) form: every branch is returned as `x = c·τ^e`, `y = y(τ)` with a
//! primitive parameter τ, so no fractional exponents or root extractions
//! are needed.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::SeriesError;
use crate::invariants::MultiplicitySequence;
use crate::poly::{univariate, Poly, Rat};
use crate::series::{multseq_from_branch, with_precision_retry, LocalBranch, TruncatedSeries};

const MAX_DEPTH: usize = 256;
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

const LOCAL_VARS: [&str; 2] = ["x", "y"];

/// `x = xc·τ^xe`, `y` a series in τ.
struct RawBranch {
    xc: Rat,
    xe: u32,
    y: TruncatedSeries,
}

/// All branches of `f = 0` through the origin, each parametrized to at
/// least `prec` terms in `y`.
pub fn newton_puiseux_rational(f: &Poly, prec: u32) -> Result<Vec<LocalBranch>, SeriesError> {
    assert_eq!(f.nvars(), 2, "expected a polynomial in two variables");
    if f.is_zero() {
        return Err(SeriesError::ZeroPolynomial);
    }
    if !f.coeff(&[0, 0]).is_zero() {
        return Err(SeriesError::NotOnCurve);
    }
    let f = f.with_vars(&LOCAL_VARS);
    let content = f.monomial_content();
    if content.iter().any(|&k| k > 1) {
        return Err(SeriesError::NoTermination);
    }
    let mut out = Vec::new();
    if content[0] == 1 {
        out.push(LocalBranch {
            x: TruncatedSeries::zero(prec),
            y: TruncatedSeries::monomial(Rat::one(), 1, prec),
        });
    }
    let rest = f.div_monomial(&[content[0], 0]);
    for b in expand(&rest, prec, 0)? {
        let xprec = b.xe.saturating_add(prec);
        out.push(LocalBranch { x: TruncatedSeries::monomial(b.xc, b.xe, xprec), y: b.y });
    }
    Ok(out)
}

/// Branches of `f` at the origin other than the `y`-axis; `x` must not
/// divide `f`.
fn expand(f: &Poly, prec: u32, depth: usize) -> Result<Vec<RawBranch>, SeriesError> {
    if depth > MAX_DEPTH {
        return Err(SeriesError::NoTermination);
    }
    let mut out = Vec::new();
    let content = f.monomial_content();
    if content[1] > 1 {
        return Err(SeriesError::NoTermination);
    }
    if content[1] == 1 {
        out.push(RawBranch {
            xc: Rat::one(),
            xe: 1,
            y: TruncatedSeries::zero(prec),
        });
    }
    let f = f.div_monomial(&[0, content[1]]);
    if !f.coeff(&[0, 0]).is_zero() {
        return Ok(out);
    }
    for (top, bottom) in lower_edges(&f) {
        let di = bottom.0 - top.0;
        let dj = top.1 - bottom.1;
        let g = di.gcd(&dj);
        let (a, b) = (dj / g, di / g);
        let phi: Vec<Rat> =
            (0..=g).map(|s| f.coeff(&[bottom.0 - b * s, bottom.1 + a * s])).collect();
        let (u, v) = bezout_weights(a, b);
        let l = a * bottom.0 + b * bottom.1;
        for (xi, r) in rational_roots(&phi)? {
            let xv = pow(&xi, v);
            let xu = pow(&xi, u);
            let x_sub = Poly::monomial(&LOCAL_VARS, vec![a, 0], xv.clone());
            let mut y_sub = Poly::monomial(&LOCAL_VARS, vec![b, 0], xu.clone());
            y_sub.add_term(vec![b, 1], Rat::one());
            let composed = f.compose(&[x_sub, y_sub]);
            let content = composed.monomial_content();
            if content[0] < l {
                return Err(SeriesError::NoTermination);
            }
            let f1 = composed.div_monomial(&[l, 0]);
            let inner = if r == 1 { vec![implicit_branch(&f1, prec)?] } else { expand(&f1, prec, depth + 1)? };
            for ib in inner {
                let xc = xv.clone() * pow(&ib.xc, a);
                let yc = pow(&ib.xc, b);
                let shifted = ib
                    .y
                    .add(&TruncatedSeries::monomial(xu.clone(), 0, ib.y.precision()))
                    .scale(&yc)
                    .shift_up(b * ib.xe);
                out.push(RawBranch { xc, xe: a * ib.xe, y: shifted });
            }
        }
    }
    Ok(out)
}

/// Lower-left edges of the Newton polygon, from the `y`-axis to the `x`-axis,
/// as (upper-left, lower-right) endpoint pairs `(i, j)` for `x^i y^j`.
fn lower_edges(f: &Poly) -> Vec<((u32, u32), (u32, u32))> {
    let pts: Vec<(u32, u32)> = f.terms().map(|(e, _)| (e[0], e[1])).collect();
    let j0 = pts.iter().filter(|p| p.0 == 0).map(|p| p.1).min().expect("x divides f");
    let mut cur = (0, j0);
    let mut edges = Vec::new();
    while cur.1 > 0 {
        let mut best: Option<(u32, u32)> = None;
        for &q in pts.iter().filter(|q| q.1 < cur.1) {
            best = match best {
                None => Some(q),
                Some(bq) => {
                    // Compare (q.i - c.i)/(c.j - q.j) against the current best.
                    let lhs = (q.0 - cur.0) as u64 * (cur.1 - bq.1) as u64;
                    let rhs = (bq.0 - cur.0) as u64 * (cur.1 - q.1) as u64;
                    if lhs < rhs || (lhs == rhs && q.1 < bq.1) {
                        Some(q)
                    } else {
                        Some(bq)
                    }
                }
            };
        }
        let next = best.expect("y divides f");
        edges.push((cur, next));
        cur = next;
    }
    edges
}

/// `(u, v)` with `u·a − v·b = 1` and `u, v ≥ 0`.
fn bezout_weights(a: u32, b: u32) -> (u32, u32) {
    if a == 1 {
        return (1, 0);
    }
    if b == 1 {
        return (1, a - 1);
    }
    let (a64, b64) = (a as i64, b as i64);
    let ext = a64.extended_gcd(&b64);
    let u = ext.x.rem_euclid(b64);
    let v = (u * a64 - 1) / b64;
    (u as u32, v as u32)
}

fn pow(x: &Rat, n: u32) -> Rat {
    num_traits::pow(x.clone(), n as usize)
}

/// Solves `g(x, y) = 0` for `y(x)` with `y(0) = 0`, given `∂g/∂y(0,0) ≠ 0`.
fn implicit_branch(g: &Poly, prec: u32) -> Result<RawBranch, SeriesError> {
    let gy = g.derivative(1);
    if gy.coeff(&[0, 0]).is_zero() {
        return Err(SeriesError::NoTermination);
    }
    let mut y = TruncatedSeries::zero(1);
    let mut n = 1u32;
    while n < prec {
        n = n.saturating_mul(2).min(prec);
        let x = TruncatedSeries::monomial(Rat::one(), 1, n);
        let y_ext = TruncatedSeries::from_coeffs(y.terms().map(|(e, c)| (e, c.clone())), n);
        let num = crate::series::eval_poly(g, &[x.clone(), y_ext.clone()]).truncate(n);
        let den = crate::series::eval_poly(&gy, &[x, y_ext.clone()]).truncate(n);
        y = y_ext.sub(&num.div(&den)?).truncate(n);
    }
    Ok(RawBranch { xc: Rat::one(), xe: 1, y: y.truncate(prec) })
}

/// Nonzero rational roots with multiplicities; fails unless they account
/// for the full degree.
fn rational_roots(phi: &[Rat]) -> Result<Vec<(Rat, u32)>, SeriesError> {
    let mut p = phi.to_vec();
    univariate::trim(&mut p);
    let deg = univariate::degree(&p).unwrap_or(0);
    let ints = integer_coefficients(&p);
    let c0 = ints[0].abs();
    let cn = ints[deg].abs();
    let nums = divisors(&c0)?;
    let dens = divisors(&cn)?;
    let mut roots = Vec::new();
    let mut found = 0usize;
    let mut seen: Vec<Rat> = Vec::new();
    for pn in &nums {
        for qd in &dens {
            for sign in [1, -1] {
                let cand = Rat::new(BigInt::from(sign) * pn, qd.clone());
                if seen.contains(&cand) {
                    continue;
                }
                seen.push(cand.clone());
                let lin = vec![-cand.clone(), Rat::one()];
                let mut mult = 0u32;
                while univariate::degree(&p).unwrap_or(0) > 0 && univariate::rem(&p, &lin).is_empty() {
                    p = univariate::div_exact(&p, &lin);
                    mult += 1;
                }
                if mult > 0 {
                    found += mult as usize;
                    roots.push((cand, mult));
                }
            }
        }
    }
    if found != deg {
        return Err(SeriesError::IrrationalCoefficient);
    }
    Ok(roots)
}

fn integer_coefficients(p: &[Rat]) -> Vec<BigInt> {
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    p.iter().map(|c| (c * Rat::from_integer(lcm.clone())).to_integer()).collect()
}

/// Positive divisors by trial division; large cofactors beyond the limit
/// are taken as prime, which can only hide roots, never invent them.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>, SeriesError> {
    if n.is_zero() {
        return Err(SeriesError::ZeroPolynomial);
    }
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut d = 2u64;
    while d <= TRIAL_DIVISION_LIMIT {
        let bd = BigInt::from(d);
        if &bd * &bd > rest {
            break;
        }
        let mut k = 0;
        while (&rest % &bd).is_zero() {
            rest /= &bd;
            k += 1;
        }
        if k > 0 {
            primes.push((bd, k));
        }
        d += 1;
    }
    if !rest.is_one() {
        primes.push((rest, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (pr, k) in primes {
        let mut next = Vec::new();
        for dv in &divs {
            let mut m = dv.clone();
            for _ in 0..=k {
                next.push(m.clone());
                m *= &pr;
            }
        }
        divs = next;
    }
    divs.sort();
    Ok(divs)
}

/// A branch with its multiplicity sequence.
#[derive(Debug, Clone)]
pub struct BranchReport {
    pub branch: LocalBranch,
    pub multseq: MultiplicitySequence,
}

/// Expands every branch of `f` at the origin and resolves it, doubling the
/// precision from `start` as needed.
pub fn analyze_origin(f: &Poly, start: u32) -> Result<Vec<BranchReport>, SeriesError> {
    with_precision_retry(start, |n| {
        newton_puiseux_rational(f, n)?
            .into_iter()
            .map(|branch| {
                let multseq = multseq_from_branch(&branch)?;
                Ok(BranchReport { branch, multseq })
            })
            .collect()
    })
}

/// Number of terms kept by a branch, used to size follow-up queries.
pub fn branch_precision(b: &LocalBranch) -> u32 {
    b.x.precision().min(b.y.precision())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use crate::series::eval_poly;

    fn local(text: &str) -> Poly {
        Poly::parse(text, &LOCAL_VARS).unwrap()
    }

    fn ms(v: &[u64]) -> MultiplicitySequence {
        MultiplicitySequence::new(v.to_vec()).unwrap()
    }

    fn vanishes(f: &Poly, b: &LocalBranch, prec: u32) {
        let v = eval_poly(f, &[b.x.clone(), b.y.clone()]);
        assert!(v.order_bound() >= prec, "f does not vanish on branch: {v}");
    }

    #[test]
    fn ordinary_cusp() {
        let f = local("y^2 - x^3");
        let bs = newton_puiseux_rational(&f, 20).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].x.order(), Ok(2));
        assert_eq!(bs[0].y.truncate(20), TruncatedSeries::monomial(rat(1), 3, 20));
        vanishes(&f, &bs[0], 20);
    }

    #[test]
    fn degenerate_edge_polynomial() {
        let f = local("(y + x^2)^2 - x^5");
        let bs = newton_puiseux_rational(&f, 20).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].x.truncate(10), TruncatedSeries::monomial(rat(1), 2, 10));
        let expect = TruncatedSeries::from_coeffs([(4, rat(-1)), (5, rat(1))], 20);
        assert_eq!(bs[0].y.truncate(20), expect);
        assert_eq!(multseq_from_branch(&bs[0]).unwrap(), ms(&[2, 2]));
    }

    #[test]
    fn several_branches_and_axes() {
        // Node y^2 - x^2 - x^3 plus the y-axis.
        let f = local("x*(y^2 - x^2 - x^3)");
        let bs = newton_puiseux_rational(&f, 16).unwrap();
        assert_eq!(bs.len(), 3);
        for b in &bs {
            vanishes(&f, b, 16);
            assert_eq!(multseq_from_branch(b).unwrap(), MultiplicitySequence::smooth());
        }
        assert_eq!(newton_puiseux_rational(&local("y*(y - x^3)"), 8).unwrap().len(), 2);
    }

    #[test]
    fn irrational_branches_are_reported() {
        assert_eq!(
            newton_puiseux_rational(&local("y^2 - 2*x^2 + x^3"), 10).unwrap_err(),
            SeriesError::IrrationalCoefficient
        );
        assert_eq!(newton_puiseux_rational(&local("y^2 - x^2 + 1"), 10).unwrap_err(), SeriesError::NotOnCurve);
        assert_eq!(newton_puiseux_rational(&local("(y^2 - x^3)^2"), 10).unwrap_err(), SeriesError::NoTermination);
    }

    #[test]
    fn rational_nonunit_roots() {
        // y = (3/2) x^(3/2)-type cusp with a scaled parameter.
        let f = local("4*y^2 - 9*x^3 + x^4*y");
        let bs = newton_puiseux_rational(&f, 30).unwrap();
        assert_eq!(bs.len(), 1);
        vanishes(&f, &bs[0], 30);
        assert_eq!(multseq_from_branch(&bs[0]).unwrap(), ms(&[2]));
    }

    #[test]
    fn higher_characteristic() {
        // (y^2 - x^3)^2 - x^7, type (4; 6, 7) → [4, 2, 2].
        let f = local("(y^2 - x^3)^2 - 4*x^5*y - x^7");
        let r = analyze_origin(&f, 28).unwrap();
        assert_eq!(r.len(), 1);
        vanishes(&f, &r[0].branch, 20);
        assert_eq!(r[0].multseq, ms(&[4, 2, 2]));
    }

    #[test]
    fn bezout_weights_solve() {
        for a in 1..12u32 {
            for b in 1..12u32 {
                if a.gcd(&b) == 1 {
                    let (u, v) = bezout_weights(a, b);
                    assert_eq!((u * a) as i64 - (v * b) as i64, 1, "a={a} b={b}");
                }
            }
        }
    }
}
