//! The ten families of bicuspidal rational curves, the two initial curves
//! their constructions start from, and the explicit degree-14 curve.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CatalogError, InvariantError};
use crate::invariants::{
    cbar_squared, char_to_multseq, genus_check, newton_to_char, CurveProfile, GenusReport, MultiplicitySequence,
    NewtonPairs,
};
use crate::error::SeriesError;
use crate::poly::Poly;
use crate::projective::{AffineChart, ProjectiveParametrization, ProjectivePoint, XYZ};
use crate::puiseux::{analyze_origin, branch_precision};
use crate::series::{pullback_order, with_precision_retry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    A1,
    A2,
    A3,
    A4,
    B,
    C,
    D1,
    D2,
    E,
    F,
}

impl Family {
    pub const ALL: [Family; 10] =
        [Family::A1, Family::A2, Family::A3, Family::A4, Family::B, Family::C, Family::D1, Family::D2, Family::E, Family::F];

    pub fn id(self) -> &'static str {
        match self {
            Family::A1 => "a1",
            Family::A2 => "a2",
            Family::A3 => "a3",
            Family::A4 => "a4",
            Family::B => "b",
            Family::C => "c",
            Family::D1 => "d1",
            Family::D2 => "d2",
            Family::E => "e",
            Family::F => "f",
        }
    }

    /// Three-parameter families `(u, l, m)`.
    pub fn is_ulm(self) -> bool {
        matches!(self, Family::A1 | Family::A2 | Family::A3 | Family::A4)
    }

    /// Least admissible `l` (three-parameter families) or `k`.
    fn min_l(self) -> u64 {
        match self {
            Family::A2 | Family::A3 => 1,
            _ => 2,
        }
    }

    fn min_k(self) -> u64 {
        match self {
            Family::B => 2,
            _ => 1,
        }
    }

    /// Degree formula, as a human-readable string.
    pub fn degree_formula(self) -> &'static str {
        match self {
            Family::A1 => "u(l-1)m + m - u + 1",
            Family::A2 => "ulm + m + 1",
            Family::A3 => "ulm + um + 1",
            Family::A4 => "ulm - u + 1",
            Family::B => "2k + 1",
            Family::C => "4k + 1",
            Family::D1 => "8k + 2",
            Family::D2 => "8k + 6",
            Family::E => "3k + 4",
            Family::F => "14",
        }
    }

    /// Cusp types, in shorthand.
    pub fn cusp_formulas(self) -> [&'static str; 2] {
        match self {
            Family::A1 => ["[(u-1)(l-1)m + m - u + 1, (m(l-1) - 1)_{u-1}, m_{l-2}, m - 1]", "[((l-1)m)_u, m_{l-1}]"],
            Family::A2 => ["[(lm + 1)_u, m_l]", "[(u-1)ml + m, (lm)_{u-1}, m_l]"],
            Family::A3 => ["[((l+1)m + 1)_{u-1}, lm + 1, m_l]", "[(u-1)(l+1)m, ((l+1)m)_{u-1}, m_{l+1}]"],
            Family::A4 => ["[(u-1)(lm-1), (lm-1)_{u-1}, m_{l-1}, m - 1]", "[(lm)_{u-1}, (l-1)m, m_{l-1}]"],
            Family::B => ["[k_4]", "[2_k]"],
            Family::C => ["[(2k)_3, 2_k]", "[2k, 2_k]"],
            Family::D1 => ["[4k + 2, 4k - 2, 4_{k-1}, 2_2]", "[(4k)_2, 4_k]"],
            Family::D2 => ["[4k + 4, 4k, 4_k]", "[(4k+2)_2, 4_k, 2_2]"],
            Family::E => ["[3k, 3_k]", "[4_k, 2_3]"],
            Family::F => ["[8,4,4,2,2]", "[6,6,3,3]"],
        }
    }

    /// Newton pairs, in the same order as [`Family::cusp_formulas`].
    pub fn pair_formulas(self) -> [&'static str; 2] {
        match self {
            Family::A1 => ["((u-1)(l-1)m + m - u + 1, u(l-1)m + m - u)", "(l-1, u(l-1) + 1)(m, 1)"],
            Family::A2 => ["(lm + 1, m(ul + 1) + u)", "((u-1)l + 1, ul + 1)(m, 1)"],
            Family::A3 => ["(m(l+1) + 1, m(u(l+1) - 1) + u)", "(u-1, u)(l+1, 1)(m, 1)"],
            Family::A4 => ["(u-1, u)(lm-1, m)", "(l, ul - 1)(m, 1)"],
            Family::B => ["(k, 4k + 1)", "(2, 2k + 1)"],
            Family::C => ["(k, 3k + 1)(2, 1)", "(k, k + 1)(2, 1)"],
            Family::D1 => ["(2k + 1, 4k)(2, 1)", "(k, 2k + 1)(4, 1)"],
            Family::D2 => ["(k + 1, 2k + 1)(4, 1)", "(2k + 1, 4k + 4)(2, 1)"],
            Family::E => ["(k, k + 1)(3, 1)", "(2, 2k + 1)(2, 3)"],
            Family::F => ["(2,3)(2,1)(2,1)", "(2,5)(3,1)"],
        }
    }

    /// Specializations to series found elsewhere in the literature; shipped
    /// as text only.
    pub fn remark(self) -> Option<&'static str> {
        match self {
            Family::A1 => Some("u = 2: Tono's first two-parameter series with C̄² = -1 (a = l-1); l = 2: Fenske's 6th series (a = u, d = m-1)."),
            Family::A2 => Some("u = 2: Tono's second two-parameter series with C̄² = -1 (a = l); l = 1: Fenske's 5th series (d = m, a = u)."),
            Family::A3 => Some("u = 2: Tono's third two-parameter series with C̄² = -1 (a = l+1); l = 0: Fenske's 4th series (d = m, a = u-1)."),
            Family::A4 => Some("u = 2: Tono's 4th two-parameter series with C̄² = -1 (a = l-1); Fenske type (d, d-k) with k = min(lm, (u-1)(lm-1))."),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FamilyParams {
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
}

impl FamilyParams {
    pub fn ulm(family: Family, u: u64, l: u64, m: u64) -> Self {
        FamilyParams { family, u: Some(u), l: Some(l), m: Some(m), k: None }
    }

    pub fn with_k(family: Family, k: u64) -> Self {
        FamilyParams { family, u: None, l: None, m: None, k: Some(k) }
    }

    pub fn f() -> Self {
        FamilyParams { family: Family::F, u: None, l: None, m: None, k: None }
    }

    fn out_of_range(&self, msg: impl Into<String>) -> CatalogError {
        CatalogError::OutOfRange { family: self.family.to_string(), msg: msg.into() }
    }

    /// Checks the parameter shape and ranges of the family.
    pub fn validate(&self) -> Result<(), CatalogError> {
        let fam = self.family;
        if fam.is_ulm() {
            let (Some(u), Some(l), Some(m), None) = (self.u, self.l, self.m, self.k) else {
                return Err(self.out_of_range("expects exactly u, l, m"));
            };
            if u < 2 || m < 2 || l < fam.min_l() {
                return Err(self.out_of_range(format!("need u >= 2, l >= {}, m >= 2", fam.min_l())));
            }
        } else if fam == Family::F {
            if self.u.is_some() || self.l.is_some() || self.m.is_some() || self.k.is_some() {
                return Err(self.out_of_range("takes no parameters"));
            }
        } else {
            let (None, None, None, Some(k)) = (self.u, self.l, self.m, self.k) else {
                return Err(self.out_of_range("expects exactly k"));
            };
            if k < fam.min_k() {
                return Err(self.out_of_range(format!("need k >= {}", fam.min_k())));
            }
        }
        Ok(())
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.family)?;
        let mut parts = Vec::new();
        for (name, v) in [("u", self.u), ("l", self.l), ("m", self.m), ("k", self.k)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        if !parts.is_empty() {
            write!(f, " {}", parts.join(","))?;
        }
        Ok(())
    }
}

/// One member of a family with the data claimed for it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyInstance {
    pub params: FamilyParams,
    pub degree: u64,
    /// Claimed multiplicity sequences, 1-entries dropped.
    pub multseqs: [MultiplicitySequence; 2],
    /// Claimed Newton pairs, as printed (possibly with `p = 1` pairs).
    pub newton: [NewtonPairs; 2],
}

impl FamilyInstance {
    pub fn profile(&self) -> Result<CurveProfile, InvariantError> {
        CurveProfile::from_multseqs(self.degree, &self.multseqs)
    }
}

/// Checked arithmetic on family parameters.
fn arith(p: &FamilyParams) -> impl Fn(Option<u64>) -> Result<u64, CatalogError> + '_ {
    move |v| v.ok_or_else(|| p.out_of_range("arithmetic overflow or negative value"))
}

fn runs(runs: &[(u64, u64)]) -> Result<MultiplicitySequence, CatalogError> {
    Ok(MultiplicitySequence::from_runs(runs)?)
}

fn pairs(p: &[(u64, u64)]) -> Result<NewtonPairs, CatalogError> {
    Ok(NewtonPairs::new(p.to_vec())?)
}

/// Evaluates the family formulas for the given parameters.
pub fn instantiate(p: &FamilyParams) -> Result<FamilyInstance, CatalogError> {
    p.validate()?;
    formulas(p)
}

/// The family formulas without range checks; used for boundary members
/// that occur as intermediate steps of the constructions (such as `k = 1`
/// in family (b)).
pub fn instantiate_unchecked(p: &FamilyParams) -> Result<FamilyInstance, CatalogError> {
    formulas(p)
}

fn formulas(p: &FamilyParams) -> Result<FamilyInstance, CatalogError> {
    let ok = arith(p);
    let get = |v: Option<u64>, n: &str| v.ok_or_else(|| p.out_of_range(format!("missing {n}")));
    let (degree, s1, s2, n1, n2) = match p.family {
        fam @ (Family::A1 | Family::A2 | Family::A3 | Family::A4) => {
            let (u, l, m) = (get(p.u, "u")?, get(p.l, "l")?, get(p.m, "m")?);
            let um = ok(u.checked_mul(m))?;
            let lm = ok(l.checked_mul(m))?;
            let ulm = ok(um.checked_mul(l))?;
            match fam {
                Family::A1 => {
                    let l1 = ok(l.checked_sub(1))?;
                    let l1m = ok(l1.checked_mul(m))?;
                    let d = ok(ok(ok(u.checked_mul(l1m))?.checked_add(m))?.checked_add(1))?;
                    let d = ok(d.checked_sub(u))?;
                    let first = ok(ok(ok(ok(u.checked_sub(1))?.checked_mul(l1m))?.checked_add(m + 1))?.checked_sub(u))?;
                    let s1 = runs(&[(first, 1), (ok(l1m.checked_sub(1))?, u - 1), (m, ok(l.checked_sub(2))?), (m - 1, 1)])?;
                    let s2 = runs(&[(l1m, u), (m, l1)])?;
                    let q1 = ok(ok(ok(u.checked_mul(l1m))?.checked_add(m))?.checked_sub(u))?;
                    let n1 = pairs(&[(first, q1)])?;
                    let n2 = pairs(&[(l1, ok(ok(u.checked_mul(l1))?.checked_add(1))?), (m, 1)])?;
                    (d, s1, s2, n1, n2)
                }
                Family::A2 => {
                    let d = ok(ok(ulm.checked_add(m))?.checked_add(1))?;
                    let lm1 = ok(lm.checked_add(1))?;
                    let s1 = runs(&[(lm1, u), (m, l)])?;
                    let first = ok(ok((u - 1).checked_mul(lm))?.checked_add(m))?;
                    let s2 = runs(&[(first, 1), (lm, u - 1), (m, l)])?;
                    let ul = ok(u.checked_mul(l))?;
                    let q1 = ok(ok(m.checked_mul(ul + 1))?.checked_add(u))?;
                    let n1 = pairs(&[(lm1, q1)])?;
                    let n2 = pairs(&[(ok((u - 1).checked_mul(l))? + 1, ul + 1), (m, 1)])?;
                    (d, s1, s2, n1, n2)
                }
                Family::A3 => {
                    let d = ok(ok(ulm.checked_add(um))?.checked_add(1))?;
                    let l1m = ok((l + 1).checked_mul(m))?;
                    let s1 = runs(&[(ok(l1m.checked_add(1))?, u - 1), (ok(lm.checked_add(1))?, 1), (m, l)])?;
                    let s2 = runs(&[(ok((u - 1).checked_mul(l1m))?, 1), (l1m, u - 1), (m, l + 1)])?;
                    let ul1 = ok(u.checked_mul(l + 1))?;
                    let q1 = ok(ok(m.checked_mul(ul1 - 1))?.checked_add(u))?;
                    let n1 = pairs(&[(ok(l1m.checked_add(1))?, q1)])?;
                    let n2 = pairs(&[(u - 1, u), (l + 1, 1), (m, 1)])?;
                    (d, s1, s2, n1, n2)
                }
                _ => {
                    let d = ok(ok(ulm.checked_sub(u))?.checked_add(1))?;
                    let lm_1 = ok(lm.checked_sub(1))?;
                    let s1 = runs(&[(ok((u - 1).checked_mul(lm_1))?, 1), (lm_1, u - 1), (m, l - 1), (m - 1, 1)])?;
                    let s2 = runs(&[(lm, u - 1), (ok((l - 1).checked_mul(m))?, 1), (m, l - 1)])?;
                    let n1 = pairs(&[(u - 1, u), (lm_1, m)])?;
                    let n2 = pairs(&[(l, ok(ok(u.checked_mul(l))?.checked_sub(1))?), (m, 1)])?;
                    (d, s1, s2, n1, n2)
                }
            }
        }
        Family::F => (
            14,
            runs(&[(8, 1), (4, 2), (2, 2)])?,
            runs(&[(6, 2), (3, 2)])?,
            pairs(&[(2, 3), (2, 1), (2, 1)])?,
            pairs(&[(2, 5), (3, 1)])?,
        ),
        fam => {
            let k = get(p.k, "k")?;
            let k2 = ok(k.checked_mul(2))?;
            let k3 = ok(k.checked_mul(3))?;
            let k4 = ok(k.checked_mul(4))?;
            let k8 = ok(k.checked_mul(8))?;
            match fam {
                Family::B => (
                    ok(k2.checked_add(1))?,
                    runs(&[(k, 4)])?,
                    runs(&[(2, k)])?,
                    pairs(&[(k, ok(k4.checked_add(1))?)])?,
                    pairs(&[(2, ok(k2.checked_add(1))?)])?,
                ),
                Family::C => (
                    ok(k4.checked_add(1))?,
                    runs(&[(k2, 3), (2, k)])?,
                    runs(&[(k2, 1), (2, k)])?,
                    pairs(&[(k, ok(k3.checked_add(1))?), (2, 1)])?,
                    pairs(&[(k, ok(k.checked_add(1))?), (2, 1)])?,
                ),
                Family::D1 => (
                    ok(k8.checked_add(2))?,
                    runs(&[(ok(k4.checked_add(2))?, 1), (ok(k4.checked_sub(2))?, 1), (4, k - 1), (2, 2)])?,
                    runs(&[(k4, 2), (4, k)])?,
                    pairs(&[(ok(k2.checked_add(1))?, k4), (2, 1)])?,
                    pairs(&[(k, ok(k2.checked_add(1))?), (4, 1)])?,
                ),
                Family::D2 => (
                    ok(k8.checked_add(6))?,
                    runs(&[(ok(k4.checked_add(4))?, 1), (k4, 1), (4, k)])?,
                    runs(&[(ok(k4.checked_add(2))?, 2), (4, k), (2, 2)])?,
                    pairs(&[(ok(k.checked_add(1))?, ok(k2.checked_add(1))?), (4, 1)])?,
                    pairs(&[(ok(k2.checked_add(1))?, ok(k4.checked_add(4))?), (2, 1)])?,
                ),
                _ => (
                    ok(k3.checked_add(4))?,
                    runs(&[(k3, 1), (3, k)])?,
                    runs(&[(4, k), (2, 3)])?,
                    pairs(&[(k, ok(k.checked_add(1))?), (3, 1)])?,
                    pairs(&[(2, ok(k2.checked_add(1))?), (2, 3)])?,
                ),
            }
        }
    };
    Ok(FamilyInstance { params: *p, degree, multseqs: [s1, s2], newton: [n1, n2] })
}

/// Outcome of checking one instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub params: FamilyParams,
    pub degree: u64,
    pub genus: Option<GenusReport>,
    /// Multiplicity sequences obtained from the claimed Newton pairs.
    pub derived_multseqs: Vec<Option<MultiplicitySequence>>,
    pub pairs_match: [bool; 2],
    #[serde(serialize_with = "crate::invariants::ser_opt_big")]
    pub cbar_squared: Option<BigInt>,
    pub errors: Vec<String>,
}

impl InstanceReport {
    pub fn passed(&self) -> bool {
        self.errors.is_empty() && self.genus.as_ref().is_some_and(|g| g.rational) && self.pairs_match.iter().all(|&b| b)
    }
}

pub fn verify_instance(fi: &FamilyInstance) -> InstanceReport {
    let mut errors = Vec::new();
    let (genus, cbar) = match fi.profile() {
        Ok(p) => {
            let g = genus_check(&p);
            if !g.rational {
                errors.push(format!("genus identity fails: {g}"));
            }
            (Some(g), Some(cbar_squared(&p)))
        }
        Err(e) => {
            errors.push(format!("claimed profile is invalid: {e}"));
            (None, None)
        }
    };
    let mut derived = Vec::new();
    let mut pairs_match = [false; 2];
    for i in 0..2 {
        let d = newton_to_char(&fi.newton[i]).and_then(|c| char_to_multseq(&c));
        match d {
            Ok(ms) => {
                pairs_match[i] = ms == fi.multseqs[i];
                if !pairs_match[i] {
                    errors.push(format!("pairs {} give {ms}, claimed {}", fi.newton[i], fi.multseqs[i]));
                }
                derived.push(Some(ms));
            }
            Err(e) => {
                errors.push(format!("pairs {} do not convert: {e}", fi.newton[i]));
                derived.push(None);
            }
        }
    }
    InstanceReport {
        params: fi.params,
        degree: fi.degree,
        genus,
        derived_multseqs: derived,
        pairs_match,
        cbar_squared: cbar,
        errors,
    }
}

/// Inclusive upper bounds of a verification grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridBounds {
    pub umax: u64,
    pub lmax: u64,
    pub mmax: u64,
    pub kmax: u64,
}

impl Default for GridBounds {
    fn default() -> Self {
        GridBounds { umax: 6, lmax: 6, mmax: 6, kmax: 12 }
    }
}

/// All in-range parameter tuples of the families within the bounds, in
/// family then lexicographic order.
pub fn grid(families: &[Family], b: GridBounds) -> Vec<FamilyParams> {
    let mut out = Vec::new();
    for &fam in families {
        if fam.is_ulm() {
            for u in 2..=b.umax {
                for l in fam.min_l()..=b.lmax {
                    for m in 2..=b.mmax {
                        out.push(FamilyParams::ulm(fam, u, l, m));
                    }
                }
            }
        } else if fam == Family::F {
            out.push(FamilyParams::f());
        } else {
            for k in fam.min_k()..=b.kmax {
                out.push(FamilyParams::with_k(fam, k));
            }
        }
    }
    out
}

/// Instantiates and verifies every grid member in parallel; output order
/// follows [`grid`].
pub fn verify_grid(families: &[Family], b: GridBounds) -> Vec<Result<InstanceReport, CatalogError>> {
    grid(families, b)
        .par_iter()
        .map(|p| instantiate(p).map(|fi| verify_instance(&fi)))
        .collect()
}

/// The two starting curves of the Cremona constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialSeries {
    /// `(y^{l-1}z - x^l)^m - x^{lm-1}y`, used by (a1) and (a4).
    A14,
    /// `x(yx^l + z^{l+1})^m - z^{(l+1)m+1}`, used by (a2) and (a3).
    A23,
}

impl InitialSeries {
    pub fn of(f: Family) -> Option<InitialSeries> {
        match f {
            Family::A1 | Family::A4 => Some(InitialSeries::A14),
            Family::A2 | Family::A3 => Some(InitialSeries::A23),
            _ => None,
        }
    }
}

/// A claimed singular point of an initial curve.
#[derive(Debug, Clone)]
pub struct InitialPoint {
    pub label: &'static str,
    pub point: ProjectivePoint,
    pub multseq: MultiplicitySequence,
    /// The tangent line, a linear form in `x, y, z`.
    pub tangent: Poly,
    pub tangent_order: u64,
}

#[derive(Debug, Clone)]
pub struct InitialCurve {
    pub series: InitialSeries,
    pub l: u64,
    pub m: u64,
    pub equation: String,
    pub polynomial: Poly,
    pub degree: u64,
    pub points: [InitialPoint; 2],
}

impl InitialCurve {
    pub fn profile(&self) -> Result<CurveProfile, InvariantError> {
        CurveProfile::from_multseqs(self.degree, &[self.points[0].multseq.clone(), self.points[1].multseq.clone()])
    }
}

fn point(text: &str) -> ProjectivePoint {
    ProjectivePoint::parse(text).expect("literal point")
}

fn linear(text: &str) -> Poly {
    Poly::parse(text, &XYZ).expect("literal form")
}

pub fn initial_curve(series: InitialSeries, l: u64, m: u64) -> Result<InitialCurve, CatalogError> {
    let range = |msg: &str| CatalogError::OutOfRange { family: "initial".into(), msg: msg.into() };
    if m < 2 || l > 64 || m > 64 {
        return Err(range("need 2 <= m <= 64 and l <= 64"));
    }
    match series {
        InitialSeries::A14 => {
            if l < 2 {
                return Err(range("need l >= 2"));
            }
            let equation = format!("(y^{}*z - x^{l})^{m} - x^{}*y", l - 1, l * m - 1);
            let polynomial = Poly::parse(&equation, &XYZ).map_err(|e| range(&e.to_string()))?;
            Ok(InitialCurve {
                series,
                l,
                m,
                equation,
                polynomial,
                degree: l * m,
                points: [
                    InitialPoint {
                        label: "p",
                        point: point("[0:1:0]"),
                        multseq: runs(&[(m, l - 1), (m - 1, 1)])?,
                        tangent: linear("z"),
                        tangent_order: l * m - 1,
                    },
                    InitialPoint {
                        label: "q",
                        point: point("[0:0:1]"),
                        multseq: runs(&[((l - 1) * m, 1), (m, l - 1)])?,
                        tangent: linear("y"),
                        tangent_order: l * m,
                    },
                ],
            })
        }
        InitialSeries::A23 => {
            if l < 1 {
                return Err(range("need l >= 1"));
            }
            let equation = format!("x*(y*x^{l} + z^{})^{m} - z^{}", l + 1, (l + 1) * m + 1);
            let polynomial = Poly::parse(&equation, &XYZ).map_err(|e| range(&e.to_string()))?;
            Ok(InitialCurve {
                series,
                l,
                m,
                equation,
                polynomial,
                degree: (l + 1) * m + 1,
                points: [
                    InitialPoint {
                        label: "p",
                        point: point("[0:1:0]"),
                        multseq: runs(&[(l * m + 1, 1), (m, l)])?,
                        tangent: linear("x"),
                        tangent_order: (l + 1) * m + 1,
                    },
                    InitialPoint {
                        label: "q",
                        point: point("[1:0:0]"),
                        multseq: runs(&[(m, l + 1)])?,
                        tangent: linear("y"),
                        tangent_order: (l + 1) * m,
                    },
                ],
            })
        }
    }
}

/// What the local expansion finds at a claimed point of an initial curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InitialPointCheck {
    pub label: &'static str,
    pub branches: usize,
    pub multseq: Option<MultiplicitySequence>,
    pub tangent_order: Option<u64>,
    pub matches: bool,
}

/// Expands the curve at each claimed point in its affine chart and compares
/// the multiplicity sequence and the contact order with the tangent line.
pub fn check_initial_curve(c: &InitialCurve, start: u32) -> Result<[InitialPointCheck; 2], SeriesError> {
    let check = |ip: &InitialPoint| -> Result<InitialPointCheck, SeriesError> {
        let chart = AffineChart::at(&ip.point)?;
        let local = chart.localize(&c.polynomial);
        let tangent = chart.localize(&ip.tangent);
        let (branches, found) = with_precision_retry(start, |n| {
            let branches = analyze_origin(&local, n)?;
            let found = match branches.as_slice() {
                [one] => {
                    let order = with_precision_retry(branch_precision(&one.branch), |_| {
                        pullback_order(&one.branch, &tangent)
                    })?;
                    Some((one.multseq.clone(), u64::from(order)))
                }
                _ => None,
            };
            Ok((branches.len(), found))
        })?;
        let (multseq, tangent_order) = found.map_or((None, None), |(m, o)| (Some(m), Some(o)));
        let matches = branches == 1
            && multseq.as_ref() == Some(&ip.multseq)
            && tangent_order == Some(ip.tangent_order);
        Ok(InitialPointCheck { label: ip.label, branches, multseq, tangent_order, matches })
    };
    Ok([check(&c.points[0])?, check(&c.points[1])?])
}

pub const PARAMETRIZATION_F: &str =
    "3t^14 + 3s t^13 + 2s^2 t^12, 3s^12 t^2 - 3s^13 t + s^14, 3s^6 t^8";

/// The degree-14 curve with cusps `[8,4,4,2,2]` and `[6,6,3,3]`.
pub fn parametrization_f() -> ProjectiveParametrization {
    ProjectiveParametrization::parse(PARAMETRIZATION_F).expect("literal parametrization")
}

/// Parameter values of the two cusps of [`parametrization_f`].
pub fn parametrization_f_cusps() -> [ProjectivePoint; 2] {
    [point("[0:1]"), point("[1:0]")]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn ms(s: &str) -> MultiplicitySequence {
        MultiplicitySequence::parse(s).unwrap()
    }

    #[test]
    fn instantiate_examples() {
        let b = instantiate(&FamilyParams::with_k(Family::B, 2)).unwrap();
        assert_eq!(b.degree, 5);
        assert_eq!(b.multseqs, [ms("[2,2,2,2]"), ms("[2,2]")]);
        assert_eq!(b.newton[0].to_string(), "(2,9)");
        assert_eq!(b.newton[1].to_string(), "(2,5)");

        let a1 = instantiate(&FamilyParams::ulm(Family::A1, 2, 2, 2)).unwrap();
        assert_eq!(a1.degree, 5);
        assert_eq!(a1.multseqs, [ms("[3]"), ms("[2,2,2]")]);

        let d2 = instantiate(&FamilyParams::with_k(Family::D2, 1)).unwrap();
        assert_eq!(d2.degree, 14);
        assert_eq!(d2.multseqs, [ms("[8,4,4]"), ms("[6,6,4,2,2]")]);
    }

    #[test]
    fn ranges_are_enforced() {
        assert!(instantiate(&FamilyParams::with_k(Family::B, 1)).is_err());
        assert!(instantiate(&FamilyParams::ulm(Family::A1, 2, 1, 2)).is_err());
        assert!(instantiate(&FamilyParams::ulm(Family::A2, 2, 1, 2)).is_ok());
        assert!(instantiate(&FamilyParams::ulm(Family::A3, 1, 2, 2)).is_err());
        assert!(instantiate(&FamilyParams::with_k(Family::C, 0)).is_err());
        assert!(instantiate(&FamilyParams::with_k(Family::F, 1)).is_err());
        let b1 = instantiate_unchecked(&FamilyParams::with_k(Family::B, 1)).unwrap();
        assert_eq!(b1.degree, 3);
        assert_eq!(b1.multseqs, [MultiplicitySequence::smooth(), ms("[2]")]);
    }

    #[test]
    fn verify_examples() {
        let f = verify_instance(&instantiate(&FamilyParams::f()).unwrap());
        assert!(f.passed(), "{:?}", f.errors);
        let g = f.genus.unwrap();
        assert_eq!((g.arithmetic_genus, g.delta_sum), (78.into(), 78.into()));

        let a3 = instantiate(&FamilyParams::ulm(Family::A3, 2, 1, 2)).unwrap();
        assert_eq!(a3.degree, 9);
        assert_eq!(a3.newton[1].to_string(), "(1,2)(2,1)(2,1)");
        assert_eq!(a3.multseqs[1], ms("[4,4,2,2]"));
        let r = verify_instance(&a3);
        assert!(r.passed(), "{:?}", r.errors);
        assert_eq!(r.genus.unwrap().delta_sum, 28.into());

        let mut bad = instantiate(&FamilyParams::with_k(Family::E, 3)).unwrap();
        bad.multseqs[1] = ms("[4,4,4,2,2]");
        let r = verify_instance(&bad);
        assert!(!r.passed());
        assert!(!r.pairs_match[1]);
    }

    #[test]
    fn large_parameters_do_not_overflow() {
        for fam in Family::ALL {
            let p = if fam.is_ulm() {
                FamilyParams::ulm(fam, 1000, 1000, 1000)
            } else if fam == Family::F {
                FamilyParams::f()
            } else {
                FamilyParams::with_k(fam, 1000)
            };
            let r = verify_instance(&instantiate(&p).unwrap());
            assert!(r.passed(), "{p}: {:?}", r.errors);
        }
    }

    #[test]
    fn grid_sizes() {
        let g = grid(&Family::ALL, GridBounds::default());
        assert_eq!(g.len(), 2 * 125 + 2 * 150 + 11 + 4 * 12 + 1);
        assert_eq!(g[0], FamilyParams::ulm(Family::A1, 2, 2, 2));
    }

    #[test]
    fn initial_curve_claims() {
        let c = initial_curve(InitialSeries::A14, 2, 2).unwrap();
        assert_eq!(c.equation, "(y^1*z - x^2)^2 - x^3*y");
        assert_eq!(c.polynomial, Poly::parse("(y*z - x^2)^2 - x^3*y", &XYZ).unwrap());
        assert_eq!(c.points[0].multseq, ms("[2]"));
        assert_eq!(c.points[1].multseq, ms("[2,2]"));
        assert_eq!((c.points[0].tangent_order, c.points[1].tangent_order), (3, 4));
        let c = initial_curve(InitialSeries::A23, 1, 2).unwrap();
        assert_eq!(c.degree, 5);
        assert_eq!(c.points[0].multseq, ms("[3,2]"));
        assert_eq!(c.points[1].multseq, ms("[2,2]"));
        for series in [InitialSeries::A14, InitialSeries::A23] {
            for l in 2..6 {
                for m in 2..6 {
                    let c = initial_curve(series, l, m).unwrap();
                    assert_eq!(cbar_squared(&c.profile().unwrap()), 0.into());
                    assert!(genus_check(&c.profile().unwrap()).rational);
                    assert_eq!(c.polynomial.total_degree() as u64, c.degree);
                }
            }
        }
    }

    #[test]
    fn initial_curves_expand_as_claimed() {
        for series in [InitialSeries::A14, InitialSeries::A23] {
            for l in 1..=3 {
                for m in 2..=3 {
                    let Ok(c) = initial_curve(series, l, m) else { continue };
                    let checks = check_initial_curve(&c, c.degree as u32).unwrap();
                    for ch in checks {
                        assert!(ch.matches, "{} l={l} m={m}: {ch:?}", c.equation);
                    }
                }
            }
        }
    }

    #[test]
    fn parametrization_f_data() {
        let f = parametrization_f();
        assert_eq!(f.forms()[0].eval(&[rat(1), rat(1)]), rat(8));
        assert_eq!(f.degree(), 14);
        assert_eq!(f.common_factor_degree(), 0);
    }

    #[test]
    fn families_parse() {
        assert_eq!("D1".parse::<Family>().unwrap(), Family::D1);
        assert!("g".parse::<Family>().is_err());
    }
}
