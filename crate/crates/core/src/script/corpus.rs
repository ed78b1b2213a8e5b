//! Generated replays of the constructions. Each script finalizes after
//! every round, so one file checks all intermediate members too.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{execute, parse, ExecutionReport};
use crate::catalog::{initial_curve, instantiate_unchecked, Family, FamilyParams, InitialSeries};
use crate::invariants::MultiplicitySequence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusScript {
    /// File stem, e.g. `b_k3`.
    pub name: String,
    pub family: Family,
    /// Replays that are part of the acceptance corpus; the (d1)/(d2)
    /// sketch replays are not.
    pub gated: bool,
    /// Catalog member expected at each `finalize`, in order (`None` for a
    /// start curve outside the catalog).
    pub expected: Vec<Option<FamilyParams>>,
    pub text: String,
}

struct Emitter {
    text: String,
    expected: Vec<Option<FamilyParams>>,
}

impl Emitter {
    fn new(header: &[&str]) -> Self {
        let mut text = String::new();
        for h in header {
            let _ = writeln!(text, "# {h}");
        }
        Emitter { text, expected: Vec::new() }
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn comment(&mut self, s: impl AsRef<str>) {
        self.line(format!("# {}", s.as_ref()));
    }

    fn blank(&mut self) {
        self.text.push('\n');
    }

    fn finalize(&mut self, degree: u64, cusps: &[MultiplicitySequence], member: Option<FamilyParams>) {
        let mut shown: Vec<String> = cusps.iter().filter(|c| !c.is_empty()).map(|c| c.shorthand()).collect();
        if shown.is_empty() {
            shown.push("[]".into());
        }
        self.line(format!("finalize expect degree {degree} cusps [{}]", shown.join(", ")));
        self.expected.push(member);
    }

    fn finalize_member(&mut self, p: FamilyParams) {
        let fi = instantiate_unchecked(&p).expect("corpus parameters are well formed");
        self.finalize(fi.degree, &fi.multseqs, Some(p));
    }

    fn finish(self, name: String, family: Family, gated: bool) -> CorpusScript {
        CorpusScript { name, family, gated, expected: self.expected, text: self.text }
    }
}

fn ms(runs: &[(u64, u64)]) -> String {
    MultiplicitySequence::from_runs(runs).expect("valid runs").shorthand()
}

/// Quadratic Cremona transformation with proper basepoints `s` (on both
/// lines) and `t` (on `L1` and the curve), and the third basepoint on `E`
/// and `L2`. Round `i` turns `L1_{i-1}, L2_{i-1}` into `L1_i, L2_i`.
fn cremona_round(em: &mut Emitter, i: u64) {
    let j = i - 1;
    em.line(format!("blowup s_{j} -> E_{i}"));
    em.line(format!("blowup t_{j} -> L1_{i}"));
    em.line(format!("name t_{i} = meet(C,L1_{i})"));
    em.line(format!("name w_{i} = meet(L2_{j},E_{i})"));
    em.line(format!("blowup w_{i} -> L2_{i}"));
    em.line(format!("assert selfint L1_{j} == -1"));
    em.line(format!("assert selfint L2_{j} == -1"));
    em.line(format!("assert selfint E_{i} == -2"));
    em.line(format!("blowdown L1_{j}"));
    em.line(format!("blowdown L2_{j}"));
    em.line(format!("blowdown E_{i}"));
    em.line(format!("name s_{i} = meet(L1_{i},L2_{i})"));
}

/// Replays (a1)-(a4) from the initial curve through `steps` Cremona
/// transformations, i.e. up to `u = steps + 1`.
pub fn cremona_series(family: Family, l: u64, m: u64, steps: u64) -> CorpusScript {
    let series = InitialSeries::of(family).expect("three-parameter family");
    let curve = initial_curve(series, l, m).expect("initial curve parameters in range");
    let [p, q] = &curve.points;
    let lm = l * m;
    let d = curve.degree;
    let mut em = Emitter::new(&[
        &format!("({family}) l={l}, m={m}: {steps} quadratic Cremona transformation(s) from the initial curve"),
        &format!("C: {} = 0, degree {d}", curve.equation),
        &format!("p = {}: {}, tangent order {}", p.point, p.multseq.shorthand(), p.tangent_order),
        &format!("q = {}: {}, tangent order {}", q.point, q.multseq.shorthand(), q.tangent_order),
        "local data verified by Puiseux expansion of the equation (see catalog::check_initial_curve)",
    ]);
    em.line("config {");
    em.line("  ambient p2");
    em.line(format!("  tracked C degree {d}"));
    em.line("  divisor L1_0 degree 1");
    em.line("  divisor L2_0 degree 1");
    match family {
        Family::A1 => {
            em.comment("L1_0: tangent at p, L2_0: the line pq; both proper basepoints are p and t");
            em.line(format!("  point p {{ C: {}, L1_0, L2_0 ; meets (C,L1_0) = {}, (C,L2_0) = {m}, (L1_0,L2_0) = 1 }}", ms(&[(m, l - 1), (m - 1, 1)]), lm - 1));
            em.line(format!("  point q {{ C: {}, L2_0 ; meets (C,L2_0) = {} }}", ms(&[((l - 1) * m, 1), (m, l - 1)]), (l - 1) * m));
            em.line("  point t_0 { C, L1_0 }");
        }
        Family::A4 => {
            em.comment("L1_0: tangent at p (z = 0), L2_0: tangent at q (y = 0), meeting off the curve at [1:0:0]");
            em.line(format!("  point p {{ C: {}, L1_0 ; meets (C,L1_0) = {} }}", ms(&[(m, l - 1), (m - 1, 1)]), lm - 1));
            em.line(format!("  point q {{ C: {}, L2_0 ; meets (C,L2_0) = {lm} }}", ms(&[((l - 1) * m, 1), (m, l - 1)])));
            em.line("  point t_0 { C, L1_0 }");
            em.line("  point o { L1_0, L2_0 }");
        }
        Family::A2 => {
            em.comment("L1_0: tangent at q (y = 0), L2_0: the line pq (z = 0); t_0 = [1:0:1]");
            em.line(format!("  point q {{ C: {}, L1_0, L2_0 ; meets (C,L1_0) = {}, (C,L2_0) = {m}, (L1_0,L2_0) = 1 }}", ms(&[(m, l + 1)]), (l + 1) * m));
            em.line(format!("  point p {{ C: {}, L2_0 ; meets (C,L2_0) = {} }}", ms(&[(lm + 1, 1), (m, l)]), lm + 1));
            em.line("  point t_0 { C, L1_0 }");
        }
        _ => {
            em.comment("L1_0: tangent at q (y = 0), L2_0: tangent at p (x = 0), meeting off the curve at [0:0:1]");
            em.line(format!("  point p {{ C: {}, L2_0 ; meets (C,L2_0) = {d} }}", ms(&[(lm + 1, 1), (m, l)])));
            em.line(format!("  point q {{ C: {}, L1_0 ; meets (C,L1_0) = {} }}", ms(&[(m, l + 1)]), (l + 1) * m));
            em.line("  point t_0 { C, L1_0 }");
            em.line("  point o { L1_0, L2_0 }");
        }
    }
    em.line("}");
    em.line("name s_0 = meet(L1_0,L2_0)");
    em.finalize(d, &[p.multseq.clone(), q.multseq.clone()], None);
    for i in 1..=steps {
        em.blank();
        em.comment(format!("transformation {i}: u = {} -> {}", i, i + 1));
        cremona_round(&mut em, i);
        em.finalize_member(FamilyParams::ulm(family, i + 1, l, m));
    }
    em.finish(format!("{family}_l{l}_m{m}"), family, true)
}

/// Two conics meeting in one point with multiplicity 4 and a line; round
/// `i` produces the member `k = i` (k = 1 is the cuspidal cubic).
pub fn b_series(k: u64) -> CorpusScript {
    let mut em = Emitter::new(&[
        &format!("(b) k={k}: conics C1, C2 with (C1.C2)_p = 4, line L tangent to C1 at q, meeting C2 at r and s"),
        "e.g. x^2 + y^2 - yz = 0, x^2 - y^2 - yz = 0, y - z = 0",
    ]);
    em.line("config {");
    em.line("  ambient p2");
    em.line("  tracked L degree 1");
    em.line("  divisor C1_0 degree 2");
    em.line("  divisor C2_0 degree 2");
    em.line("  point p { C1_0, C2_0 ; meets (C1_0,C2_0) = 4 }");
    em.line("  point q { C1_0, L ; meets (C1_0,L) = 2 }");
    em.line("  point r { C2_0, L }");
    em.line("  point s_0 { C2_0, L }");
    em.line("}");
    for i in 1..=k {
        let j = i - 1;
        let (a, b) = (format!("C1_{j}"), format!("C2_{j}"));
        em.blank();
        em.comment(format!("round {i}"));
        em.line(format!("name r_{i} = meet({a},{b})"));
        em.line(format!("blowup r_{i} -> E1_{i}"));
        for n in 1..=3 {
            em.line(format!("name x{n}_{i} = meet({a},E{n}_{i})"));
            em.line(format!("blowup x{n}_{i} -> E{}_{i}", n + 1));
        }
        em.line(format!("name y_{i} = meet({a},E4_{i})"));
        em.line(format!("blowup y_{i} -> C1_{i}"));
        em.line(format!("blowup s_{j} -> C2_{i}"));
        em.line(format!("name s_{i} = meet(L,C2_{i})"));
        for n in 1..=4 {
            em.line(format!("assert selfint E{n}_{i} == -2"));
        }
        for c in [&a, &b, &format!("C1_{i}"), &format!("C2_{i}")] {
            em.line(format!("assert selfint {c} == -1"));
        }
        for e in [a.clone(), b.clone(), format!("E4_{i}"), format!("E3_{i}"), format!("E2_{i}"), format!("E1_{i}")] {
            em.line(format!("blowdown {e}"));
        }
        em.finalize_member(FamilyParams::with_k(Family::B, i));
    }
    em.finish(format!("b_k{k}"), Family::B, true)
}

/// Two conics meeting at `p` (multiplicity 3) and `q`, and a line tangent to
/// both; round `i` produces the member `k = i`.
pub fn c_series(k: u64) -> CorpusScript {
    let mut em = Emitter::new(&[
        &format!("(c) k={k}: conics C1, C2 with (C1.C2)_p = 3 and a transverse point q, line L tangent to C1 at r and to C2 at s"),
        "e.g. x^2 + y^2 + xy - yz = 0, x^2 + y^2 - xy - yz = 0, 3y - 4z = 0",
        "the cusp points keep the names p and q: each contraction hands its centre name back",
    ]);
    em.line("config {");
    em.line("  ambient p2");
    em.line("  tracked L degree 1");
    em.line("  divisor C1_0 degree 2");
    em.line("  divisor C2_0 degree 2");
    em.line("  point p { C1_0, C2_0 ; meets (C1_0,C2_0) = 3 }");
    em.line("  point q { C1_0, C2_0 }");
    em.line("  point r { C1_0, L ; meets (C1_0,L) = 2 }");
    em.line("  point s { C2_0, L ; meets (C2_0,L) = 2 }");
    em.line("}");
    em.finalize(1, &[], None);
    for i in 1..=k {
        let j = i - 1;
        let (a, b) = (format!("C1_{j}"), format!("C2_{j}"));
        em.blank();
        em.comment(format!("round {i}"));
        em.line(format!("blowup p -> E1_{i}"));
        for n in 1..=2 {
            em.line(format!("name x{n}_{i} = meet({a},E{n}_{i})"));
            em.line(format!("blowup x{n}_{i} -> E{}_{i}", n + 1));
        }
        em.line(format!("blowup q -> E0_{i}"));
        em.line(format!("name y_{i} = meet({a},E3_{i})"));
        em.line(format!("blowup y_{i} -> C1_{i}"));
        em.line(format!("name z_{i} = meet({b},E0_{i})"));
        em.line(format!("blowup z_{i} -> C2_{i}"));
        for n in 0..=3 {
            em.line(format!("assert selfint E{n}_{i} == -2"));
        }
        for c in [&a, &b, &format!("C1_{i}"), &format!("C2_{i}")] {
            em.line(format!("assert selfint {c} == -1"));
        }
        for e in [a.clone(), b.clone(), format!("E0_{i}"), format!("E3_{i}"), format!("E2_{i}"), format!("E1_{i}")] {
            em.line(format!("blowdown {e}"));
        }
        em.line(format!("assert multseq L at p == {}", ms(&[(2 * i, 3), (2, i)])));
        em.line(format!("assert multseq L at q == {}", ms(&[(2 * i, 1), (2, i)])));
        em.finalize_member(FamilyParams::with_k(Family::C, i));
    }
    em.finish(format!("c_k{k}"), Family::C, true)
}

/// The unicuspidal quartic with cusp `[2_3]`, its inflectional tangent and
/// the line through the cusp; round `i` produces the member `k = i`.
pub fn e_series(k: u64) -> CorpusScript {
    let mut em = Emitter::new(&[
        &format!("(e) k={k}: quartic y^4 - 2xy^2z + x^2z^2 - yz^3 = 0 with cusp [2_3] at q"),
        "L1_0: tangent at a smooth inflection point p, meeting the curve again at t_0",
        "L2_0: the line meeting the curve only at q, with multiplicity 4",
    ]);
    em.line("config {");
    em.line("  ambient p2");
    em.line("  tracked C degree 4");
    em.line("  divisor L1_0 degree 1");
    em.line("  divisor L2_0 degree 1");
    em.line("  point q { C: [2_3], L2_0 ; meets (C,L2_0) = 4 }");
    em.line("  point p { C, L1_0 ; meets (C,L1_0) = 3 }");
    em.line("  point t_0 { C, L1_0 }");
    em.line("  point o { L1_0, L2_0 }");
    em.line("}");
    em.line("name s_0 = meet(L1_0,L2_0)");
    em.finalize(4, &[MultiplicitySequence::from_runs(&[(2, 3)]).expect("valid")], None);
    for i in 1..=k {
        em.blank();
        em.comment(format!("transformation {i}"));
        cremona_round(&mut em, i);
        em.finalize_member(FamilyParams::with_k(Family::E, i));
    }
    em.finish(format!("e_k{k}"), Family::E, true)
}

/// The (d1)/(d2) transformation: a conic `C` and a line `L` meeting at two
/// points; blow up one of them and three further points along `C`, blow up
/// the other, then contract `C`, `L` and the first three exceptional
/// divisors. The last exceptional divisor becomes the next line and the one
/// over the second point the next conic. Starting from a conic touching `C`
/// (multiplicity 4) and `L` (multiplicity 2), round `2k` gives (d1) and round
/// `2k+1` gives (d2) at `k`. Not part of the acceptance corpus: the start
/// configuration is taken from a sketch and not certified by equations.
pub fn d_series(rounds: u64) -> CorpusScript {
    let (family, k) = if rounds.is_multiple_of(2) { (Family::D1, rounds / 2) } else { (Family::D2, rounds / 2) };
    let mut em = Emitter::new(&[
        &format!("({family}) k={k}: {rounds} rounds of the sketched transformation"),
        "conic C and line L meeting at p and q; tracked conic D touching C at r (4) and L at s (2)",
        "the points of each round are the images of the previous C and of the previous exceptional chain",
    ]);
    em.line("config {");
    em.line("  ambient p2");
    em.line("  tracked D degree 2");
    em.line("  divisor C degree 2");
    em.line("  divisor L degree 1");
    em.line("  point p { C, L }");
    em.line("  point q { C, L }");
    em.line("  point r { D, C ; meets (D,C) = 4 }");
    em.line("  point s { D, L ; meets (D,L) = 2 }");
    em.line("}");
    em.finalize(2, &[], None);
    let mut second_points = vec!["q".to_string()];
    for i in 1..=rounds {
        let (c, l) = if i == 1 { ("C".to_string(), "L".to_string()) } else { (format!("F_{}", i - 1), format!("E4_{}", i - 1)) };
        let p = match i {
            1 => "p".to_string(),
            2 => "C@pt".to_string(),
            _ => second_points[(i - 3) as usize].clone(),
        };
        let q = second_points[(i - 1) as usize].clone();
        em.blank();
        em.comment(format!("round {i}"));
        em.line(format!("blowup {p} -> E1_{i}"));
        for n in 1..=3 {
            em.line(format!("name x{n}_{i} = meet({c},E{n}_{i})"));
            em.line(format!("blowup x{n}_{i} -> E{}_{i}", n + 1));
        }
        em.line(format!("blowup {q} -> F_{i}"));
        for e in [c, l, format!("E1_{i}"), format!("E2_{i}"), format!("E3_{i}")] {
            em.line(format!("blowdown {e}"));
        }
        second_points.push(format!("x2_{i}"));
        em.line(format!("assert selfint E4_{i} == 1"));
        em.line(format!("assert selfint F_{i} == 4"));
        if i == 1 {
            em.comment("(d2) at k = 0, outside the catalog range");
            let cusps = [MultiplicitySequence::from_runs(&[(4, 1)]).expect("valid"), MultiplicitySequence::from_runs(&[(2, 4)]).expect("valid")];
            em.finalize(6, &cusps, None);
        } else if i % 2 == 0 {
            em.finalize_member(FamilyParams::with_k(Family::D1, i / 2));
        } else {
            em.finalize_member(FamilyParams::with_k(Family::D2, i / 2));
        }
    }
    em.finish(format!("{family}_k{k}"), family, false)
}

/// Every shipped script, in a fixed order.
pub fn shipped() -> Vec<CorpusScript> {
    let mut out = Vec::new();
    for family in [Family::A1, Family::A2, Family::A3, Family::A4] {
        for l in [2, 3] {
            for m in [2, 3] {
                out.push(cremona_series(family, l, m, 2));
            }
        }
    }
    for k in 1..=6 {
        out.push(b_series(k));
    }
    for k in 1..=6 {
        out.push(c_series(k));
    }
    for k in 1..=6 {
        out.push(e_series(k));
    }
    for rounds in 2..=7 {
        out.push(d_series(rounds));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusResult {
    pub name: String,
    pub gated: bool,
    pub report: ExecutionReport,
    /// Every `finalize` agrees with the catalog formulas of its member.
    pub matches_catalog: bool,
}

impl CorpusResult {
    pub fn passed(&self) -> bool {
        self.report.passed() && self.matches_catalog && self.report.ledger_always_zero()
    }
}

pub fn run(script: &CorpusScript) -> CorpusResult {
    let report = match parse(&script.text) {
        Ok(s) => execute(&s),
        Err(e) => ExecutionReport {
            steps: Vec::new(),
            finalized: Vec::new(),
            assertions: 0,
            blowups_checked: 0,
            bezout_checks: 0,
            error: Some(e),
        },
    };
    let matches_catalog = report.finalized.len() == script.expected.len()
        && report.finalized.iter().zip(&script.expected).all(|(f, p)| match p {
            None => true,
            Some(p) => instantiate_unchecked(p).is_ok_and(|fi| {
                let mut want: Vec<MultiplicitySequence> =
                    fi.multseqs.iter().filter(|c| !c.is_empty()).cloned().collect();
                want.sort_by(|a, b| b.cmp(a));
                fi.degree == f.degree && want == f.cusps
            }),
        });
    CorpusResult { name: script.name.clone(), gated: script.gated, report, matches_catalog }
}

/// Runs the scripts in parallel; results keep the input order.
pub fn run_all(scripts: &[CorpusScript]) -> Vec<CorpusResult> {
    scripts.par_iter().map(run).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(s: &CorpusScript) {
        let r = run(s);
        assert!(r.passed(), "{}\n{}\n{}", s.name, s.text, r.report.to_text());
    }

    #[test]
    fn b_replays() {
        check(&b_series(2));
    }

    #[test]
    fn c_replays() {
        check(&c_series(2));
    }

    #[test]
    fn e_replays() {
        check(&e_series(2));
    }

    #[test]
    fn d_replays() {
        check(&d_series(3));
    }

    #[test]
    fn cremona_replays() {
        for f in [Family::A1, Family::A2, Family::A3, Family::A4] {
            check(&cremona_series(f, 2, 2, 2));
        }
    }
}
