//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cuspforge::catalog::{
    self, check_initial_curve, initial_curve, parametrization_f, parametrization_f_cusps, Family, FamilyParams,
    GridBounds, InitialSeries,
};
use cuspforge::invariants::{
    cbar_squared, char_to_multseq, newton_to_char, CharacteristicExponents, MultiplicitySequence, NewtonPairs,
};
use cuspforge::projective::{analyze_parameter, certify_singular_points};
use cuspforge::script::corpus;
use cuspforge::series::{default_precision, oracle_multseq};
use cuspforge::surface::check_blowup_laws;
use num_bigint::BigInt;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

struct Outcome {
    ok: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn verify_families(families: &[Family], bounds: GridBounds, budget: Duration, pairs: bool) -> Outcome {
    let t = Instant::now();
    let grid = catalog::grid(families, bounds);
    let results = catalog::verify_grid(families, bounds);
    let mut bad = Vec::new();
    for (p, r) in grid.iter().zip(&results) {
        match r {
            Ok(rep) if pairs && !rep.pairs_match.iter().all(|&b| b) => bad.push(format!("{p}: {:?}", rep.errors)),
            Ok(rep) if !pairs && !rep.genus.as_ref().is_some_and(|g| g.rational) => {
                bad.push(format!("{p}: {:?}", rep.errors))
            }
            Ok(_) => {}
            Err(e) => bad.push(format!("{p}: {e}")),
        }
    }
    let elapsed = t.elapsed();
    if !bad.is_empty() {
        return fail(format!("{} of {} instances fail: {}", bad.len(), grid.len(), bad.join("; ")));
    }
    if elapsed > budget {
        return fail(format!("{} instances took {elapsed:?}", grid.len()));
    }
    pass(format!("{} instances in {elapsed:?}", grid.len()))
}

fn genus_identity() -> Outcome {
    verify_families(&Family::ALL, GridBounds::default(), Duration::from_secs(5), false)
}

fn pairs_to_multseq() -> Outcome {
    verify_families(&Family::ALL, GridBounds::default(), Duration::from_secs(5), true)
}

fn initial_curves() -> Outcome {
    let t = Instant::now();
    let mut cases = Vec::new();
    for m in 2..=4 {
        for l in 2..=4 {
            cases.push((InitialSeries::A14, l, m));
        }
        for l in 1..=4 {
            cases.push((InitialSeries::A23, l, m));
        }
    }
    let mut bad = Vec::new();
    for &(series, l, m) in &cases {
        let c = match initial_curve(series, l, m) {
            Ok(c) => c,
            Err(e) => {
                bad.push(format!("{series:?} l={l} m={m}: {e}"));
                continue;
            }
        };
        match c.profile() {
            Ok(p) if cbar_squared(&p) == BigInt::from(0) => {}
            Ok(p) => bad.push(format!("{series:?} l={l} m={m}: cbar^2 = {}", cbar_squared(&p))),
            Err(e) => bad.push(format!("{series:?} l={l} m={m}: {e}")),
        }
        match check_initial_curve(&c, c.degree as u32) {
            Ok(checks) => {
                for ch in checks.iter().filter(|ch| !ch.matches) {
                    bad.push(format!("{series:?} l={l} m={m} at {}: {ch:?}", ch.label));
                }
            }
            Err(e) => bad.push(format!("{series:?} l={l} m={m}: {e}")),
        }
    }
    let elapsed = t.elapsed();
    if !bad.is_empty() {
        return fail(bad.join("; "));
    }
    if elapsed > Duration::from_secs(30) {
        return fail(format!("{} curves took {elapsed:?}", cases.len()));
    }
    pass(format!("{} curves, 2 points each, in {elapsed:?}", cases.len()))
}

fn curve_f() -> Outcome {
    let t = Instant::now();
    let p = parametrization_f();
    let at = parametrization_f_cusps();
    let start = default_precision(p.degree());
    let want = [("[8,4,4,2,2]", "(2,3)(2,1)(2,1)"), ("[6,6,3,3]", "(2,5)(3,1)")];
    for (param, (ms, np)) in at.iter().zip(want) {
        let r = match analyze_parameter(&p, param, start) {
            Ok(r) => r,
            Err(e) => return fail(format!("{param}: {e}")),
        };
        let ms = MultiplicitySequence::parse(ms).unwrap();
        let np = NewtonPairs::parse(np).unwrap();
        if r.multseq != ms {
            return fail(format!("{param}: multseq {} instead of {ms}", r.multseq));
        }
        if newton_to_char(&np).and_then(|c| char_to_multseq(&c)).ok() != Some(ms.clone()) {
            return fail(format!("{param}: pairs {np} do not give {ms}"));
        }
    }
    let cert = match certify_singular_points(&p, &at, start) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    if cert.degree != 14 || cert.delta_sum != num_bigint::BigUint::from(78u32) || !cert.exhaustive() {
        return fail(format!("degree {}, delta sum {}, exhaustive {}", cert.degree, cert.delta_sum, cert.exhaustive()));
    }
    let elapsed = t.elapsed();
    if elapsed > Duration::from_secs(5) {
        return fail(format!("took {elapsed:?}"));
    }
    pass(format!("[8,4,4,2,2] and [6,6,3,3], delta sum 78 = genus of degree 14, in {elapsed:?}"))
}

fn construction_replays() -> Outcome {
    let t = Instant::now();
    let scripts: Vec<_> = corpus::shipped().into_iter().filter(|s| s.gated).collect();
    let required: BTreeSet<String> = (1..=6)
        .flat_map(|k| [format!("b_k{k}"), format!("c_k{k}"), format!("e_k{k}")])
        .chain(["a1", "a2", "a3", "a4"].iter().flat_map(|f| {
            [(2, 2), (2, 3), (3, 2), (3, 3)].map(|(l, m)| format!("{f}_l{l}_m{m}"))
        }))
        .collect();
    let present: BTreeSet<String> = scripts.iter().map(|s| s.name.clone()).collect();
    if let Some(missing) = required.difference(&present).next() {
        return fail(format!("no script {missing}"));
    }
    for s in scripts.iter().filter(|s| s.family.is_ulm()) {
        let u: BTreeSet<u64> = s.expected.iter().flatten().filter_map(|p: &FamilyParams| p.u).collect();
        if !(u.contains(&2) && u.contains(&3)) {
            return fail(format!("{} does not step from u=2 to u=3", s.name));
        }
    }
    let results = corpus::run_all(&scripts);
    let bad: Vec<String> = results
        .iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{} (steps ok {}, catalog {}, ledger zero {})",
                r.name,
                r.report.passed(),
                r.matches_catalog,
                r.report.ledger_always_zero()
            )
        })
        .collect();
    let elapsed = t.elapsed();
    if !bad.is_empty() {
        return fail(bad.join("; "));
    }
    if elapsed > Duration::from_secs(10) {
        return fail(format!("took {elapsed:?}"));
    }
    let asserts: usize = results.iter().map(|r| r.report.assertions).sum();
    pass(format!("{} scripts, {asserts} assertions, ledger 0 throughout, in {elapsed:?}", results.len()))
}

fn engine_soundness() -> Outcome {
    let mut runner = TestRunner::deterministic();
    let strategy = common::spec();
    let mut configs = 0;
    let mut trips = 0;
    while configs < 200 {
        let s = strategy.new_tree(&mut runner).unwrap().current();
        let Some(cfg) = common::build(&s) else { continue };
        configs += 1;
        for p in cfg.points().keys() {
            let up = match cfg.blow_up(p, "E") {
                Ok(up) => up,
                Err(e) => return fail(format!("blow-up at {p}: {e}")),
            };
            if let Err(e) = check_blowup_laws(&cfg, p, &up, "E") {
                return fail(format!("laws at {p}: {e}"));
            }
            if up.blow_down("E").as_ref() != Ok(&cfg) {
                return fail(format!("round trip at {p} of {s:?}"));
            }
            trips += 1;
        }
    }
    let results = corpus::run_all(&corpus::shipped());
    let (mut blowups, mut bezout) = (0, 0);
    for r in &results {
        if !r.report.passed() {
            return fail(format!("{} has failing steps", r.name));
        }
        blowups += r.report.blowups_checked;
        bezout += r.report.bezout_checks;
    }
    if bezout == 0 || blowups == 0 {
        return fail("the corpus exercised no checks");
    }
    pass(format!(
        "{trips} round trips on {configs} random configurations; {blowups} corpus blow-ups obey both laws; {bezout} plane states pass Bezout"
    ))
}

fn oracle_agreement() -> Outcome {
    let mut cusps: BTreeSet<CharacteristicExponents> = BTreeSet::new();
    for p in catalog::grid(&Family::ALL, GridBounds::default()) {
        let Ok(fi) = catalog::instantiate(&p) else { return fail(format!("{p} does not instantiate")) };
        for np in &fi.newton {
            match newton_to_char(np) {
                Ok(ce) if !ce.is_smooth() => {
                    cusps.insert(ce);
                }
                Ok(_) => {}
                Err(e) => return fail(format!("{p}: {e}")),
            }
        }
    }
    let catalog_types = cusps.len();
    let mut runner = TestRunner::deterministic();
    let strategy = common::char_exponents();
    let mut random = 0;
    while random < 256 {
        let ce = strategy.new_tree(&mut runner).unwrap().current();
        if cusps.insert(ce) {
            random += 1;
        }
    }
    for ce in &cusps {
        let fast = char_to_multseq(ce);
        let slow = oracle_multseq(ce);
        match (fast, slow) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => return fail(format!("{ce}: {a:?} vs {b:?}")),
        }
    }
    pass(format!("{catalog_types} catalog cusp types and {random} random tuples (a <= 30)"))
}

fn d_families() -> Outcome {
    let bounds = GridBounds { kmax: 12, ..GridBounds::default() };
    let families = [Family::D1, Family::D2];
    let grid = catalog::grid(&families, bounds);
    let ks: BTreeSet<u64> = grid.iter().filter_map(|p| p.k).collect();
    if ks != (1..=12).collect() {
        return fail(format!("grid covers k in {ks:?}"));
    }
    for r in catalog::verify_grid(&families, bounds) {
        match r {
            Ok(rep) if rep.passed() => {}
            Ok(rep) => return fail(format!("{}: {:?}", rep.params, rep.errors)),
            Err(e) => return fail(e.to_string()),
        }
    }
    let replays: Vec<_> = corpus::shipped().into_iter().filter(|s| !s.gated).collect();
    let replayed = corpus::run_all(&replays).iter().filter(|r| r.passed()).count();
    pass(format!(
        "{} profiles pass genus and pair checks; best-effort sketch replays: {replayed}/{} pass",
        grid.len(),
        replays.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("genus identity over the family grid", genus_identity),
        ("Newton pairs reproduce the multiplicity sequences", pairs_to_multseq),
        ("initial curves: cbar^2 = 0, expansions and tangent orders", initial_curves),
        ("curve (f) from its parametrization", curve_f),
        ("construction replays", construction_replays),
        ("engine soundness", engine_soundness),
        ("oracle agreement", oracle_agreement),
        ("(d1)/(d2) numeric verification", d_families),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.ok {
            failed += 1;
        }
        println!("{} {}. {name}: {}", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
