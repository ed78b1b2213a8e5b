use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use super::{Decl, DivisorSize, Pos, Script, Stmt, TrackedSize};
use crate::error::{ScriptError, SurfaceError};
use crate::invariants::{genus_check, CurveProfile, MultiplicitySequence};
use crate::surface::{check_blowup_laws, Configuration};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StepOutcome {
    Ok,
    /// An assertion or a law check did not hold; execution continues.
    Failed { detail: String },
    /// The engine rejected the step; execution stops.
    Error { detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub pos: Pos,
    pub text: String,
    pub outcome: StepOutcome,
    #[serde(serialize_with = "ser_ledger")]
    pub ledger: Option<BigInt>,
    pub bezout_checked: bool,
}

fn ser_ledger<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(|b| b.to_string()).serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FinalizeReport {
    pub degree: u64,
    pub cusps: Vec<MultiplicitySequence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExecutionReport {
    pub steps: Vec<StepReport>,
    /// Profiles produced by `finalize` statements, in order.
    pub finalized: Vec<FinalizeReport>,
    pub assertions: usize,
    pub blowups_checked: usize,
    pub bezout_checks: usize,
    #[serde(serialize_with = "ser_error")]
    pub error: Option<ScriptError>,
}

fn ser_error<S: serde::Serializer>(v: &Option<ScriptError>, s: S) -> Result<S::Ok, S::Error> {
    v.as_ref().map(|e| e.to_string()).serialize(s)
}

impl ExecutionReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.steps.iter().all(|s| s.outcome == StepOutcome::Ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StepReport> {
        self.steps.iter().filter(|s| s.outcome != StepOutcome::Ok)
    }

    pub fn ledger_always_zero(&self) -> bool {
        self.steps.iter().all(|s| s.ledger.as_ref().is_none_or(|l| *l == BigInt::from(0)))
    }

    /// Human-readable report; byte-identical across runs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            let ledger = s.ledger.as_ref().map_or("-".to_string(), |l| l.to_string());
            let status = match &s.outcome {
                StepOutcome::Ok => "ok".to_string(),
                StepOutcome::Failed { detail } => format!("FAIL: {detail}"),
                StepOutcome::Error { detail } => format!("ERROR: {detail}"),
            };
            let _ = writeln!(out, "{:>4} {:>7}  {:<44} ledger {ledger:<3} {status}", s.index, s.pos.to_string(), s.text);
        }
        for f in &self.finalized {
            let cusps: Vec<String> = f.cusps.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(out, "finalized: degree {}, cusps {}", f.degree, cusps.join(" "));
        }
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
        }
        let _ = writeln!(
            out,
            "result: {} ({} steps, {} assertions, {} blow-ups checked, {} Bézout checks)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.steps.len(),
            self.assertions,
            self.blowups_checked,
            self.bezout_checks
        );
        out
    }
}

fn at(pos: Pos, source: SurfaceError) -> ScriptError {
    ScriptError::Surface { line: pos.line, col: pos.col, source }
}

fn build_config(s: &Script) -> Result<Configuration, ScriptError> {
    let p2 = s.config.iter().any(|d| d.node == Decl::AmbientP2);
    let mut cfg = Configuration::new(p2);
    for d in &s.config {
        let res = match &d.node {
            Decl::AmbientP2 => Ok(()),
            Decl::Tracked { name, size } => {
                let (si, kd) = match *size {
                    TrackedSize::Degree(n) => {
                        let n = i64::try_from(n).map_err(|_| SurfaceError::Invalid(format!("degree {n} too large")));
                        match n {
                            Ok(n) => (n * n, -3 * n),
                            Err(e) => return Err(at(d.pos, e)),
                        }
                    }
                    TrackedSize::Explicit { self_int, k_dot } => (self_int, k_dot),
                };
                cfg.add_tracked(name, si, kd)
            }
            Decl::Divisor { name, size } => {
                let si = match *size {
                    DivisorSize::Degree(n) => match i64::try_from(n) {
                        Ok(n) => n * n,
                        Err(_) => return Err(at(d.pos, SurfaceError::Invalid(format!("degree {n} too large")))),
                    },
                    DivisorSize::SelfInt(v) => v,
                };
                cfg.add_divisor(name, si)
            }
            Decl::Point { name, germs, meets } => cfg.add_point(
                name,
                germs.iter().map(|g| (g.owner.clone(), g.multseq.clone().unwrap_or_default())).collect(),
                meets.iter().map(|m| (m.a.clone(), m.b.clone(), m.mult)).collect(),
            ),
        };
        res.map_err(|e| at(d.pos, e))?;
    }
    Ok(cfg)
}

fn sorted_cusps(cusps: &[MultiplicitySequence]) -> Vec<MultiplicitySequence> {
    let mut v: Vec<MultiplicitySequence> = cusps.iter().filter(|c| !c.is_empty()).cloned().collect();
    v.sort_by(|a, b| b.cmp(a));
    v
}

/// Runs a script. Assertions and law checks that fail are recorded and
/// execution continues; an engine error stops it.
pub fn execute(s: &Script) -> ExecutionReport {
    execute_traced(s, |_, _| {})
}

/// Like [`execute`], calling `trace` with the step index and the
/// configuration after every step (index 0 is the initial configuration).
pub fn execute_traced(s: &Script, mut trace: impl FnMut(usize, &Configuration)) -> ExecutionReport {
    let mut report = ExecutionReport {
        steps: Vec::new(),
        finalized: Vec::new(),
        assertions: 0,
        blowups_checked: 0,
        bezout_checks: 0,
        error: None,
    };
    let config_pos = s.config.first().map_or(Pos { line: 1, col: 1 }, |d| d.pos);
    let mut cfg = match build_config(s) {
        Ok(cfg) => cfg,
        Err(e) => {
            report.steps.push(StepReport {
                index: 0,
                pos: config_pos,
                text: "config".into(),
                outcome: StepOutcome::Error { detail: e.to_string() },
                ledger: None,
                bezout_checked: false,
            });
            report.error = Some(e);
            return report;
        }
    };
    let push = |report: &mut ExecutionReport, cfg: &Configuration, index, pos, text, mut problems: Vec<String>| {
        let v = cfg.validate();
        problems.extend(v.issues);
        if v.bezout_checked {
            report.bezout_checks += 1;
        }
        let outcome =
            if problems.is_empty() { StepOutcome::Ok } else { StepOutcome::Failed { detail: problems.join("; ") } };
        report.steps.push(StepReport { index, pos, text, outcome, ledger: v.ledger, bezout_checked: v.bezout_checked });
    };
    push(&mut report, &cfg, 0, config_pos, "config".to_string(), Vec::new());
    trace(0, &cfg);

    for (i, st) in s.stmts.iter().enumerate() {
        let index = i + 1;
        let text = st.node.to_string();
        let mut problems = Vec::new();
        let step: Result<Option<Configuration>, SurfaceError> = (|| {
            match &st.node {
                Stmt::Blowup { point, divisor } => {
                    let next = cfg.blow_up(point, divisor)?;
                    if let Err(e) = check_blowup_laws(&cfg, point, &next, divisor) {
                        problems.push(format!("blow-up law: {e}"));
                    }
                    report.blowups_checked += 1;
                    Ok(Some(next))
                }
                Stmt::Name { name, a, b } => {
                    let p = cfg.meet(a, b)?;
                    let mut next = cfg.clone();
                    next.rename_point(&p, name)?;
                    Ok(Some(next))
                }
                Stmt::Blowdown { divisor } => Ok(Some(cfg.blow_down(divisor)?)),
                Stmt::AssertSelfInt { owner, value } => {
                    report.assertions += 1;
                    let found = cfg.owner(owner)?.self_int;
                    if found != *value {
                        problems.push(format!("self-intersection of `{owner}` is {found}"));
                    }
                    Ok(None)
                }
                Stmt::AssertMultseq { owner, point, expected } => {
                    report.assertions += 1;
                    cfg.owner(owner)?;
                    match cfg.point(point)?.germs().get(owner) {
                        Some(found) if found == expected => {}
                        Some(found) => problems.push(format!("`{owner}` has {found} at `{point}`")),
                        None => problems.push(format!("`{owner}` does not pass through `{point}`")),
                    }
                    Ok(None)
                }
                Stmt::AssertMeet { a, b, point, value } => {
                    report.assertions += 1;
                    cfg.owner(a)?;
                    cfg.owner(b)?;
                    match cfg.point(point)?.pairmult(a, b) {
                        Some(found) if found == *value => {}
                        Some(found) => problems.push(format!("({a}·{b}) at `{point}` is {found}")),
                        None => problems.push(format!("`{a}` and `{b}` do not both pass through `{point}`")),
                    }
                    Ok(None)
                }
                Stmt::Finalize { degree, cusps } => {
                    report.assertions += 1;
                    let profile: CurveProfile = cfg.finalize()?;
                    let found = sorted_cusps(&profile.sorted_multseqs());
                    if !genus_check(&profile).rational {
                        problems.push("genus check fails".into());
                    }
                    if profile.degree() != *degree || found != sorted_cusps(cusps) {
                        let shown: Vec<String> = found.iter().map(|c| c.to_string()).collect();
                        problems.push(format!("found degree {}, cusps [{}]", profile.degree(), shown.join(", ")));
                    }
                    report.finalized.push(FinalizeReport { degree: profile.degree(), cusps: found });
                    Ok(None)
                }
            }
        })();
        match step {
            Ok(next) => {
                if let Some(next) = next {
                    cfg = next;
                }
                push(&mut report, &cfg, index, st.pos, text, problems);
                trace(index, &cfg);
            }
            Err(e) => {
                let err = at(st.pos, e);
                report.steps.push(StepReport {
                    index,
                    pos: st.pos,
                    text,
                    outcome: StepOutcome::Error { detail: err.to_string() },
                    ledger: cfg.adjunction_ledger(),
                    bezout_checked: false,
                });
                report.error = Some(err);
                break;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::parse;

    const START_B: &str = "\
config {
  ambient p2
  tracked L degree 1
  divisor C1 degree 2
  divisor C2 degree 2
  point p { C1, C2 ; meets (C1,C2) = 4 }
  point q { C1, L ; meets (C1,L) = 2 }
  point r { C2, L }
  point s { C2, L }
}
";

    #[test]
    fn initial_configuration_is_valid() {
        let r = execute(&parse(START_B).unwrap());
        assert!(r.passed(), "{}", r.to_text());
        assert_eq!(r.bezout_checks, 1);
        assert_eq!(r.steps[0].ledger, Some(BigInt::from(0)));
    }

    #[test]
    fn wrong_assertion_fails_and_continues() {
        let text = format!("{START_B}blowup p -> E1\nassert selfint C1 == 4\nassert selfint E1 == -1\n");
        let r = execute(&parse(&text).unwrap());
        assert!(!r.passed());
        assert_eq!(r.failures().count(), 1);
        assert_eq!(r.steps.len(), 4);
        assert_eq!(r.assertions, 2);
        assert!(r.ledger_always_zero());
    }

    #[test]
    fn engine_errors_stop_with_position() {
        let text = format!("{START_B}blowdown C1\nblowup q -> E\n");
        let r = execute(&parse(&text).unwrap());
        assert_eq!(r.steps.len(), 2);
        assert!(matches!(r.error, Some(ScriptError::Surface { line: 11, col: 1, source: SurfaceError::NotExceptional(..) })));
    }

    #[test]
    fn reports_are_deterministic() {
        let text = format!("{START_B}blowup p -> E1\nname x = meet(C1,E1)\nassert meet(C1,C2) at x == 3\n");
        let s = parse(&text).unwrap();
        let (a, b) = (execute(&s), execute(&s));
        assert_eq!(a.to_text(), b.to_text());
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.passed(), "{}", a.to_text());
    }
}
