//! Combinatorial model of a blown-up plane: smooth rational divisors, one
//! tracked cuspidal curve, and the points where their germs meet.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use serde::Serialize;

use crate::error::SurfaceError;
use crate::invariants::{genus_check, multseq_delta, CurveProfile, MultiplicitySequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OwnerKind {
    Divisor,
    Tracked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnerRecord {
    pub name: String,
    pub kind: OwnerKind,
    pub self_int: i64,
    /// Intersection with the canonical class; tracked curve only.
    pub k_dot: i64,
    created: u64,
    /// Point whose blow-up produced this divisor.
    center: Option<String>,
}

impl OwnerRecord {
    pub fn center(&self) -> Option<&str> {
        self.center.as_deref()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PointRecord {
    germs: BTreeMap<String, MultiplicitySequence>,
    pairmult: BTreeMap<(String, String), u64>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl PointRecord {
    pub fn germs(&self) -> &BTreeMap<String, MultiplicitySequence> {
        &self.germs
    }

    pub fn multiplicity(&self, owner: &str) -> Option<u64> {
        self.germs.get(owner).map(|s| s.multiplicity())
    }

    pub fn pairmult(&self, a: &str, b: &str) -> Option<u64> {
        self.pairmult.get(&key(a, b)).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.pairmult.iter().map(|((a, b), m)| (a.as_str(), b.as_str(), *m))
    }
}

#[derive(Debug, Clone)]
pub struct Configuration {
    owners: BTreeMap<String, OwnerRecord>,
    points: BTreeMap<String, PointRecord>,
    tracked: Option<String>,
    base_p2: bool,
    /// Blow-ups minus blow-downs since the start.
    excess: i64,
    clock: u64,
}

impl PartialEq for Configuration {
    fn eq(&self, other: &Self) -> bool {
        self.owners == other.owners
            && self.points == other.points
            && self.tracked == other.tracked
            && self.base_p2 == other.base_p2
            && self.excess == other.excess
    }
}

impl Eq for Configuration {}

fn overflow(what: &str) -> SurfaceError {
    SurfaceError::Invalid(format!("integer overflow in {what}"))
}

impl Configuration {
    /// An empty configuration; `p2` declares the ambient surface to be the
    /// projective plane.
    pub fn new(p2: bool) -> Self {
        Configuration {
            owners: BTreeMap::new(),
            points: BTreeMap::new(),
            tracked: None,
            base_p2: p2,
            excess: 0,
            clock: 0,
        }
    }

    pub fn in_p2(&self) -> bool {
        self.base_p2 && self.excess == 0
    }

    pub fn owners(&self) -> impl Iterator<Item = &OwnerRecord> {
        let mut v: Vec<&OwnerRecord> = self.owners.values().collect();
        v.sort_by_key(|o| o.created);
        v.into_iter()
    }

    pub fn owner(&self, name: &str) -> Result<&OwnerRecord, SurfaceError> {
        self.owners.get(name).ok_or_else(|| SurfaceError::UnknownOwner(name.to_string()))
    }

    pub fn points(&self) -> &BTreeMap<String, PointRecord> {
        &self.points
    }

    pub fn point(&self, name: &str) -> Result<&PointRecord, SurfaceError> {
        self.points.get(name).ok_or_else(|| SurfaceError::UnknownPoint(name.to_string()))
    }

    pub fn tracked(&self) -> Option<&OwnerRecord> {
        self.tracked.as_ref().and_then(|t| self.owners.get(t))
    }

    /// Degree of an owner, defined while the ambient is the plane.
    pub fn degree(&self, name: &str) -> Option<u64> {
        let o = self.owners.get(name)?;
        if !self.in_p2() || o.self_int <= 0 {
            return None;
        }
        let d = (o.self_int as u64).sqrt();
        (d * d == o.self_int as u64).then_some(d)
    }

    fn check_fresh_name(&self, name: &str) -> Result<(), SurfaceError> {
        if self.owners.contains_key(name) || self.points.contains_key(name) {
            return Err(SurfaceError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    pub fn add_divisor(&mut self, name: &str, self_int: i64) -> Result<(), SurfaceError> {
        self.check_fresh_name(name)?;
        let created = self.tick();
        self.owners.insert(
            name.to_string(),
            OwnerRecord { name: name.to_string(), kind: OwnerKind::Divisor, self_int, k_dot: 0, created, center: None },
        );
        Ok(())
    }

    pub fn add_tracked(&mut self, name: &str, self_int: i64, k_dot: i64) -> Result<(), SurfaceError> {
        self.check_fresh_name(name)?;
        if let Some(t) = &self.tracked {
            return Err(SurfaceError::Invalid(format!("`{t}` is already the tracked curve")));
        }
        let created = self.tick();
        self.owners.insert(
            name.to_string(),
            OwnerRecord { name: name.to_string(), kind: OwnerKind::Tracked, self_int, k_dot, created, center: None },
        );
        self.tracked = Some(name.to_string());
        Ok(())
    }

    /// Adds a point; pairs not listed in `meets` meet transversally
    /// (intersection = product of multiplicities).
    pub fn add_point(
        &mut self,
        name: &str,
        germs: Vec<(String, MultiplicitySequence)>,
        meets: Vec<(String, String, u64)>,
    ) -> Result<(), SurfaceError> {
        self.check_fresh_name(name)?;
        let mut rec = PointRecord::default();
        for (owner, seq) in germs {
            let o = self.owner(&owner)?;
            if o.kind == OwnerKind::Divisor && !seq.is_empty() {
                return Err(SurfaceError::Invalid(format!("divisor `{owner}` must be smooth at `{name}`")));
            }
            if rec.germs.insert(owner.clone(), seq).is_some() {
                return Err(SurfaceError::Invalid(format!("`{owner}` listed twice at `{name}`")));
            }
        }
        let names: Vec<String> = rec.germs.keys().cloned().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let m = rec.multiplicity(a).unwrap() * rec.multiplicity(b).unwrap();
                rec.pairmult.insert(key(a, b), m);
            }
        }
        for (a, b, m) in meets {
            if a == b || !rec.germs.contains_key(&a) || !rec.germs.contains_key(&b) {
                return Err(SurfaceError::Invalid(format!("pair ({a},{b}) is not a pair of germs at `{name}`")));
            }
            rec.pairmult.insert(key(&a, &b), m);
        }
        self.points.insert(name.to_string(), rec);
        Ok(())
    }

    /// Gives a point a new name.
    pub fn rename_point(&mut self, old: &str, new: &str) -> Result<(), SurfaceError> {
        if old == new {
            return self.point(old).map(|_| ());
        }
        self.check_fresh_name(new)?;
        let rec = self.points.remove(old).ok_or_else(|| SurfaceError::UnknownPoint(old.to_string()))?;
        self.points.insert(new.to_string(), rec);
        Ok(())
    }

    /// The unique point where `a` and `b` both have germs.
    pub fn meet(&self, a: &str, b: &str) -> Result<String, SurfaceError> {
        self.owner(a)?;
        self.owner(b)?;
        let hits: Vec<&String> = self
            .points
            .iter()
            .filter(|(_, p)| p.germs.contains_key(a) && p.germs.contains_key(b))
            .map(|(n, _)| n)
            .collect();
        match hits.len() {
            0 => Err(SurfaceError::NoMeeting(a.to_string(), b.to_string())),
            1 => Ok(hits[0].clone()),
            n => Err(SurfaceError::AmbiguousMeeting(a.to_string(), b.to_string(), n)),
        }
    }

    /// Total intersection number of two owners over all shared points.
    pub fn intersection(&self, a: &str, b: &str) -> u64 {
        self.points.values().filter_map(|p| p.pairmult(a, b)).sum()
    }

    /// Blows up an existing point, creating the exceptional divisor `new`.
    pub fn blow_up(&self, p: &str, new: &str) -> Result<Configuration, SurfaceError> {
        let point = self.point(p)?.clone();
        let mut cfg = self.clone();
        cfg.points.remove(p);
        cfg.check_fresh_name(new)?;
        let created = cfg.tick();
        cfg.owners.insert(
            new.to_string(),
            OwnerRecord {
                name: new.to_string(),
                kind: OwnerKind::Divisor,
                self_int: -1,
                k_dot: 0,
                created,
                center: Some(p.to_string()),
            },
        );
        cfg.excess += 1;

        let mult: BTreeMap<&str, u64> =
            point.germs.iter().map(|(o, s)| (o.as_str(), s.multiplicity())).collect();
        for (owner, &m) in &mult {
            let rec = cfg.owners.get_mut(*owner).expect("germ owner exists");
            let sq = i64::try_from(m).ok().and_then(|m| m.checked_mul(m)).ok_or_else(|| overflow("blow-up"))?;
            rec.self_int = rec.self_int.checked_sub(sq).ok_or_else(|| overflow("blow-up"))?;
            if rec.kind == OwnerKind::Tracked {
                rec.k_dot = rec.k_dot.checked_add(m as i64).ok_or_else(|| overflow("blow-up"))?;
            }
        }

        let mut residual: BTreeMap<(String, String), u64> = BTreeMap::new();
        for ((a, b), &pm) in &point.pairmult {
            let prod = mult[a.as_str()] * mult[b.as_str()];
            let r = pm
                .checked_sub(prod)
                .ok_or_else(|| SurfaceError::NegativeResidual(a.clone(), b.clone(), p.to_string()))?;
            residual.insert((a.clone(), b.clone()), r);
        }
        let shares = |a: &str, b: &str| residual.get(&key(a, b)).is_some_and(|&r| r > 0);

        let owners: Vec<&str> = point.germs.keys().map(|s| s.as_str()).collect();
        for &a in &owners {
            for &b in &owners {
                for &c in &owners {
                    if a < c && a != b && b != c && shares(a, b) && shares(b, c) && !shares(a, c) {
                        return Err(SurfaceError::NonTransitive {
                            point: p.to_string(),
                            a: a.to_string(),
                            b: b.to_string(),
                            c: c.to_string(),
                        });
                    }
                }
            }
        }

        let mut classes: Vec<Vec<&str>> = Vec::new();
        for &g in &owners {
            match classes.iter_mut().find(|cl| shares(cl[0], g)) {
                Some(cl) => cl.push(g),
                None => classes.push(vec![g]),
            }
        }
        classes.sort_by_key(|cl| cl.iter().map(|o| cfg.owners[*o].created).min());

        for (i, cl) in classes.iter().enumerate() {
            let name = format!("{new}@{}", i + 1);
            cfg.check_fresh_name(&name)?;
            let mut rec = PointRecord::default();
            rec.germs.insert(new.to_string(), MultiplicitySequence::smooth());
            for &g in cl {
                rec.germs.insert(g.to_string(), point.germs[g].tail());
                rec.pairmult.insert(key(g, new), mult[g]);
            }
            for (j, &a) in cl.iter().enumerate() {
                for &b in &cl[j + 1..] {
                    rec.pairmult.insert(key(a, b), residual[&key(a, b)]);
                }
            }
            cfg.points.insert(name, rec);
        }
        Ok(cfg)
    }

    /// Blows up a general point, either off every curve or a general point
    /// of one owner. No name is recorded as its center.
    pub fn blow_up_fresh(&self, on: Option<&str>, new: &str) -> Result<Configuration, SurfaceError> {
        let mut cfg = self.clone();
        let tmp = format!("{new}@center");
        let germs = match on {
            Some(o) => {
                cfg.owner(o)?;
                vec![(o.to_string(), MultiplicitySequence::smooth())]
            }
            None => Vec::new(),
        };
        cfg.add_point(&tmp, germs, Vec::new())?;
        let mut out = cfg.blow_up(&tmp, new)?;
        out.owners.get_mut(new).expect("new divisor").center = None;
        Ok(out)
    }

    /// Contracts the (−1)-divisor `e`.
    pub fn blow_down(&self, e: &str) -> Result<Configuration, SurfaceError> {
        let rec = self.owner(e)?;
        if rec.kind != OwnerKind::Divisor {
            return Err(SurfaceError::NotADivisor(e.to_string()));
        }
        if rec.self_int != -1 {
            return Err(SurfaceError::NotExceptional(e.to_string(), rec.self_int));
        }
        let center = rec.center.clone();
        let on_e: Vec<String> =
            self.points.iter().filter(|(_, p)| p.germs.contains_key(e)).map(|(n, _)| n.clone()).collect();

        // Where each other owner meets e, and with what intersection.
        let mut at: BTreeMap<String, (String, u64)> = BTreeMap::new();
        for q in &on_e {
            let pr = &self.points[q];
            for owner in pr.germs.keys().filter(|o| o.as_str() != e) {
                let n = pr.pairmult(owner, e).expect("pair present");
                if at.insert(owner.clone(), (q.clone(), n)).is_some() {
                    return Err(SurfaceError::NodeCreation { e: e.to_string(), owner: owner.clone() });
                }
            }
        }

        let mut cfg = self.clone();
        cfg.owners.remove(e);
        for q in &on_e {
            cfg.points.remove(q);
        }
        cfg.excess -= 1;

        let mut image = PointRecord::default();
        for (owner, (q, n)) in &at {
            let old_seq = &self.points[q].germs[owner];
            let o = cfg.owners.get_mut(owner).expect("owner exists");
            let seq = match o.kind {
                OwnerKind::Divisor => {
                    if *n >= 2 {
                        return Err(SurfaceError::SingularDivisor { e: e.to_string(), owner: owner.clone() });
                    }
                    old_seq.clone()
                }
                OwnerKind::Tracked => {
                    if *n >= 2 {
                        if !old_seq.is_empty() && *n < old_seq.multiplicity() {
                            return Err(SurfaceError::BadMultiplicity {
                                e: e.to_string(),
                                new: *n,
                                first: old_seq.multiplicity(),
                            });
                        }
                        old_seq.prepend(*n).map_err(|_| overflow("blow-down"))?
                    } else {
                        if !old_seq.is_empty() {
                            return Err(SurfaceError::BadMultiplicity {
                                e: e.to_string(),
                                new: *n,
                                first: old_seq.multiplicity(),
                            });
                        }
                        old_seq.clone()
                    }
                }
            };
            let sq = i64::try_from(*n).ok().and_then(|n| n.checked_mul(n)).ok_or_else(|| overflow("blow-down"))?;
            o.self_int = o.self_int.checked_add(sq).ok_or_else(|| overflow("blow-down"))?;
            if o.kind == OwnerKind::Tracked {
                o.k_dot = o.k_dot.checked_sub(*n as i64).ok_or_else(|| overflow("blow-down"))?;
            }
            image.germs.insert(owner.clone(), seq);
        }
        let names: Vec<&String> = at.keys().collect();
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let (qa, na) = &at[*a];
                let (qb, nb) = &at[*b];
                let shared = if qa == qb { self.points[qa].pairmult(a, b).unwrap_or(0) } else { 0 };
                image.pairmult.insert(key(a, b), shared + na * nb);
            }
        }

        let reuse = center.filter(|c| !cfg.points.contains_key(c) && !cfg.owners.contains_key(c));
        let lone_smooth = image.germs.len() == 1 && image.germs.values().all(|s| s.is_empty());
        if image.germs.is_empty() || (lone_smooth && reuse.is_none()) {
            return Ok(cfg);
        }
        let name = reuse.unwrap_or_else(|| format!("{e}@pt"));
        cfg.check_fresh_name(&name)?;
        cfg.points.insert(name, image);
        Ok(cfg)
    }

    /// `(C² + K·C)/2 + 1 − Σδ` for the tracked curve.
    pub fn adjunction_ledger(&self) -> Option<BigInt> {
        let t = self.tracked()?;
        let sum = BigInt::from(t.self_int) + BigInt::from(t.k_dot);
        let deltas: BigInt = self
            .points
            .values()
            .filter_map(|p| p.germs.get(&t.name))
            .map(|s| BigInt::from(multseq_delta(s)))
            .sum();
        Some(sum.div_floor(&BigInt::from(2)) + 1 - deltas)
    }

    /// Cusp multiplicity sequences of the tracked curve, largest first.
    pub fn tracked_cusps(&self) -> Vec<MultiplicitySequence> {
        let Some(t) = &self.tracked else { return Vec::new() };
        let mut v: Vec<MultiplicitySequence> = self
            .points
            .values()
            .filter_map(|p| p.germs.get(t))
            .filter(|s| !s.is_empty())
            .cloned()
            .collect();
        v.sort_by(|a, b| b.cmp(a));
        v
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (pname, p) in &self.points {
            for (owner, seq) in &p.germs {
                match self.owners.get(owner) {
                    None => issues.push(format!("`{pname}` has a germ of unknown `{owner}`")),
                    Some(o) if o.kind == OwnerKind::Divisor && !seq.is_empty() => {
                        issues.push(format!("divisor `{owner}` is singular at `{pname}`"))
                    }
                    _ => {}
                }
            }
            let owners: Vec<&String> = p.germs.keys().collect();
            for (i, a) in owners.iter().enumerate() {
                for b in &owners[i + 1..] {
                    let need = p.multiplicity(a).unwrap() * p.multiplicity(b).unwrap();
                    match p.pairmult(a, b) {
                        None => issues.push(format!("missing intersection of `{a}` and `{b}` at `{pname}`")),
                        Some(m) if m < need => issues.push(format!(
                            "({a}·{b})_{pname} = {m} is below the product of multiplicities {need}"
                        )),
                        _ => {}
                    }
                }
            }
            for (a, b) in p.pairmult.keys() {
                if !p.germs.contains_key(a) || !p.germs.contains_key(b) {
                    issues.push(format!("intersection of `{a}` and `{b}` recorded at `{pname}` without both germs"));
                }
            }
        }
        let ledger = self.adjunction_ledger();
        if let Some(t) = self.tracked() {
            if (t.self_int + t.k_dot).rem_euclid(2) != 0 {
                issues.push(format!("C² + K·C is odd for `{}`", t.name));
            }
            if ledger.as_ref().is_some_and(|l| *l != BigInt::from(0)) {
                issues.push(format!("adjunction ledger is {} for `{}`", ledger.as_ref().unwrap(), t.name));
            }
        }
        let mut bezout_checked = false;
        if self.in_p2() {
            bezout_checked = true;
            let owners: Vec<&OwnerRecord> = self.owners().collect();
            for o in &owners {
                match self.degree(&o.name) {
                    None => issues.push(format!("`{}` has self-intersection {} in the plane", o.name, o.self_int)),
                    Some(d) if o.kind == OwnerKind::Tracked && o.k_dot != -3 * d as i64 => {
                        issues.push(format!("`{}` has K·C = {} but degree {d}", o.name, o.k_dot))
                    }
                    _ => {}
                }
            }
            for (i, a) in owners.iter().enumerate() {
                for b in &owners[i + 1..] {
                    if let (Some(da), Some(db)) = (self.degree(&a.name), self.degree(&b.name)) {
                        let total = self.intersection(&a.name, &b.name);
                        if total != da * db {
                            issues.push(format!(
                                "Bézout fails for `{}`·`{}`: {total} ≠ {da}·{db}",
                                a.name, b.name
                            ));
                        }
                    }
                }
            }
        }
        ValidationReport { issues, ledger, bezout_checked }
    }

    /// Degree and cusps of the tracked curve once back in the plane.
    pub fn finalize(&self) -> Result<CurveProfile, SurfaceError> {
        if !self.in_p2() {
            return Err(SurfaceError::Finalize(format!(
                "ambient is not the plane ({} uncontracted blow-ups)",
                self.excess
            )));
        }
        let t = self.tracked().ok_or_else(|| SurfaceError::Finalize("no tracked curve".into()))?;
        let d = self
            .degree(&t.name)
            .ok_or_else(|| SurfaceError::Finalize(format!("C² = {} is not a positive square", t.self_int)))?;
        if t.k_dot != -3 * d as i64 {
            return Err(SurfaceError::Finalize(format!("K·C = {} but degree {d}", t.k_dot)));
        }
        let profile = CurveProfile::from_multseqs(d, &self.tracked_cusps())
            .map_err(|e| SurfaceError::Finalize(e.to_string()))?;
        let report = genus_check(&profile);
        if !report.rational {
            return Err(SurfaceError::Finalize(format!("genus check fails: {report}")));
        }
        Ok(profile)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph configuration {\n");
        for o in self.owners() {
            let shape = if o.kind == OwnerKind::Tracked { "ellipse" } else { "box" };
            let _ = writeln!(out, "  \"{}\" [shape={shape}, label=\"{} ({})\"];", o.name, o.name, o.self_int);
        }
        let created = |n: &str| self.owners[n].created;
        for (pname, p) in &self.points {
            let mut pairs: Vec<(&str, &str, u64)> = p.pairs().collect();
            pairs.sort_by_key(|(a, b, _)| {
                let (x, y) = (created(a), created(b));
                (x.min(y), x.max(y))
            });
            for (a, b, m) in pairs {
                let (a, b) = if created(a) <= created(b) { (a, b) } else { (b, a) };
                let _ = writeln!(out, "  \"{a}\" -- \"{b}\" [label=\"{m} @{pname}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
    pub ledger: Option<BigInt>,
    pub bezout_checked: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks the blow-up laws between a configuration and its blow-up at `p`
/// with exceptional divisor `e`, independently of how it was computed.
pub fn check_blowup_laws(before: &Configuration, p: &str, after: &Configuration, e: &str) -> Result<(), String> {
    let old = before.point(p).map_err(|x| x.to_string())?;
    let erec = after.owner(e).map_err(|x| x.to_string())?;
    if erec.self_int != -1 {
        return Err(format!("E = `{e}` has self-intersection {}", erec.self_int));
    }
    let new_points: Vec<(&String, &PointRecord)> =
        after.points.iter().filter(|(_, q)| q.germs.contains_key(e)).collect();
    for (owner, seq) in &old.germs {
        let m = seq.multiplicity();
        let (qn, q) = new_points
            .iter()
            .find(|(_, q)| q.germs.contains_key(owner))
            .ok_or_else(|| format!("`{owner}` does not meet `{e}`"))?;
        if q.pairmult(owner, e) != Some(m) {
            return Err(format!("({owner}·{e})_{qn} = {:?}, expected {m}", q.pairmult(owner, e)));
        }
        if q.germs[owner] != seq.tail() {
            return Err(format!("`{owner}` at `{qn}` has {} instead of {}", q.germs[owner], seq.tail()));
        }
    }
    let owners: Vec<&String> = old.germs.keys().collect();
    for (i, a) in owners.iter().enumerate() {
        for b in &owners[i + 1..] {
            let expected = old.pairmult(a, b).unwrap_or(0) as i128
                - (old.multiplicity(a).unwrap() * old.multiplicity(b).unwrap()) as i128;
            if expected < 0 {
                return Err(format!("negative residual for `{a}`, `{b}`"));
            }
            let got: u64 = new_points.iter().filter_map(|(_, q)| q.pairmult(a, b)).sum();
            if got as i128 != expected {
                return Err(format!("residual ({a}·{b}) is {got}, expected {expected}"));
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OwnerView<'a> {
    name: &'a str,
    kind: OwnerKind,
    self_int: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_dot: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<u64>,
}

#[derive(Serialize)]
struct GermView<'a> {
    owner: &'a str,
    multseq: &'a MultiplicitySequence,
}

#[derive(Serialize)]
struct MeetView<'a> {
    a: &'a str,
    b: &'a str,
    mult: u64,
}

#[derive(Serialize)]
struct PointView<'a> {
    name: &'a str,
    germs: Vec<GermView<'a>>,
    meets: Vec<MeetView<'a>>,
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let owners: Vec<OwnerView> = self
            .owners()
            .map(|o| OwnerView {
                name: &o.name,
                kind: o.kind,
                self_int: o.self_int,
                k_dot: (o.kind == OwnerKind::Tracked).then_some(o.k_dot),
                degree: self.degree(&o.name),
            })
            .collect();
        let points: Vec<PointView> = self
            .points
            .iter()
            .map(|(n, p)| PointView {
                name: n,
                germs: p.germs.iter().map(|(o, m)| GermView { owner: o, multseq: m }).collect(),
                meets: p.pairs().map(|(a, b, mult)| MeetView { a, b, mult }).collect(),
            })
            .collect();
        let mut st = s.serialize_struct("Configuration", 5)?;
        st.serialize_field("ambient", if self.in_p2() { "p2" } else { "blown-up" })?;
        st.serialize_field("excess", &self.excess)?;
        st.serialize_field("owners", &owners)?;
        st.serialize_field("points", &points)?;
        st.serialize_field("ledger", &self.adjunction_ledger().map(crate::invariants::BigNumber))?;
        st.end()
    }
}

/// Owners of a point, for callers that only need names.
pub fn owners_at(cfg: &Configuration, p: &str) -> Result<BTreeSet<String>, SurfaceError> {
    Ok(cfg.point(p)?.germs.keys().cloned().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: &[u64]) -> MultiplicitySequence {
        MultiplicitySequence::new(v.to_vec()).unwrap()
    }

    fn g(o: &str, v: &[u64]) -> (String, MultiplicitySequence) {
        (o.to_string(), ms(v))
    }

    fn m(a: &str, b: &str, k: u64) -> (String, String, u64) {
        (a.to_string(), b.to_string(), k)
    }

    /// Two conics meeting at p (4) plus a line: the (b) start.
    fn conics() -> Configuration {
        let mut c = Configuration::new(true);
        c.add_divisor("C1", 4).unwrap();
        c.add_divisor("C2", 4).unwrap();
        c.add_tracked("L", 1, -3).unwrap();
        c.add_point("p", vec![g("C1", &[]), g("C2", &[])], vec![m("C1", "C2", 4)]).unwrap();
        c.add_point("q", vec![g("C1", &[]), g("L", &[])], vec![m("C1", "L", 2)]).unwrap();
        c.add_point("r", vec![g("C2", &[]), g("L", &[])], vec![]).unwrap();
        c.add_point("s", vec![g("C2", &[]), g("L", &[])], vec![]).unwrap();
        c
    }

    #[test]
    fn initial_conics_are_valid() {
        let c = conics();
        let r = c.validate();
        assert!(r.is_valid(), "{:?}", r.issues);
        assert!(r.bezout_checked);
        assert_eq!(c.degree("C1"), Some(2));
        let mut bad = Configuration::new(false);
        bad.add_tracked("L", 0, 0).unwrap();
        bad.add_divisor("A", -1).unwrap();
        bad.add_point("p", vec![g("L", &[2]), g("A", &[])], vec![m("L", "A", 1)]).unwrap();
        assert!(bad.validate().issues.iter().any(|i| i.contains("below the product")));
    }

    #[test]
    fn generic_blowup_adds_only_e() {
        let c = conics();
        let b = c.blow_up_fresh(None, "E").unwrap();
        assert_eq!(b.owner("E").unwrap().self_int, -1);
        assert_eq!(b.points().len(), c.points().len());
        assert_eq!(b.blow_down("E").unwrap(), c);
    }

    #[test]
    fn cusp_with_transverse_line() {
        let mut c = Configuration::new(false);
        c.add_tracked("L", 10, -6).unwrap();
        c.add_divisor("T", 1).unwrap();
        c.add_point("p", vec![g("L", &[2, 2]), g("T", &[])], vec![m("L", "T", 2)]).unwrap();
        let b = c.blow_up("p", "E").unwrap();
        check_blowup_laws(&c, "p", &b, "E").unwrap();
        assert_eq!(b.owner("T").unwrap().self_int, 0);
        assert_eq!(b.owner("L").unwrap().self_int, 6);
        let pl = b.meet("L", "E").unwrap();
        let pt = b.meet("T", "E").unwrap();
        assert_ne!(pl, pt);
        assert_eq!(b.point(&pl).unwrap().germs()["L"], ms(&[2]));
        assert_eq!(b.point(&pl).unwrap().pairmult("L", "E"), Some(2));
        assert_eq!(b.blow_down("E").unwrap(), c);
    }

    #[test]
    fn tangent_conics_separate_after_four() {
        let mut c = conics();
        let mut p = "p".to_string();
        for (i, expect) in [3u64, 2, 1].iter().enumerate() {
            let e = format!("E{}", i + 1);
            c = c.blow_up(&p, &e).unwrap();
            p = c.meet("C1", "C2").unwrap();
            assert_eq!(c.point(&p).unwrap().pairmult("C1", "C2"), Some(*expect));
            assert!(c.point(&p).unwrap().germs().contains_key(&e));
        }
        c = c.blow_up(&p, "E4").unwrap();
        assert!(c.meet("C1", "C2").is_err());
        assert_ne!(c.meet("C1", "E4").unwrap(), c.meet("C2", "E4").unwrap());
        assert_eq!(c.adjunction_ledger(), Some(BigInt::from(0)));
    }

    #[test]
    fn blow_down_merges_intersections() {
        let mut c = Configuration::new(false);
        c.add_tracked("A", 0, -2).unwrap();
        c.add_divisor("B", 0).unwrap();
        c.add_divisor("E", -1).unwrap();
        c.add_point("q1", vec![g("A", &[]), g("E", &[])], vec![m("A", "E", 2)]).unwrap();
        c.add_point("q2", vec![g("B", &[]), g("E", &[])], vec![]).unwrap();
        let d = c.blow_down("E").unwrap();
        let p = d.meet("A", "B").unwrap();
        assert_eq!(p, "E@pt");
        assert_eq!(d.point(&p).unwrap().pairmult("A", "B"), Some(2));
        assert_eq!(d.point(&p).unwrap().germs()["A"], ms(&[2]));
        assert_eq!(d.owner("A").unwrap().self_int, 4);
        assert_eq!(d.owner("A").unwrap().k_dot, -4);
    }

    #[test]
    fn blow_down_errors() {
        let c = conics();
        assert!(matches!(c.blow_down("L"), Err(SurfaceError::NotADivisor(_))));
        assert!(matches!(c.blow_down("C1"), Err(SurfaceError::NotExceptional(_, 4))));
        let mut n = Configuration::new(false);
        n.add_divisor("A", 0).unwrap();
        n.add_divisor("E", -1).unwrap();
        n.add_point("q1", vec![g("A", &[]), g("E", &[])], vec![]).unwrap();
        n.add_point("q2", vec![g("A", &[]), g("E", &[])], vec![]).unwrap();
        assert!(matches!(n.blow_down("E"), Err(SurfaceError::NodeCreation { .. })));
        let mut s = Configuration::new(false);
        s.add_divisor("A", 0).unwrap();
        s.add_divisor("E", -1).unwrap();
        s.add_point("q", vec![g("A", &[]), g("E", &[])], vec![m("A", "E", 2)]).unwrap();
        assert!(matches!(s.blow_down("E"), Err(SurfaceError::SingularDivisor { .. })));
        let mut b = Configuration::new(false);
        b.add_tracked("L", 0, 0).unwrap();
        b.add_divisor("E", -1).unwrap();
        b.add_point("q", vec![g("L", &[3]), g("E", &[])], vec![m("L", "E", 3)]).unwrap();
        b.add_point("r", vec![g("L", &[3])], vec![]).unwrap();
        let b2 = b.blow_up("r", "F").unwrap();
        let mut b3 = b2.clone();
        b3.rename_point("F@1", "x").unwrap();
        assert!(b3.blow_down("F").is_ok());
        let mut bad = Configuration::new(false);
        bad.add_tracked("L", 0, 0).unwrap();
        bad.add_divisor("E", -1).unwrap();
        bad.add_point("q", vec![g("L", &[3]), g("E", &[])], vec![m("L", "E", 2)]).unwrap();
        assert!(matches!(bad.blow_down("E"), Err(SurfaceError::BadMultiplicity { new: 2, first: 3, .. })));
    }

    #[test]
    fn non_transitive_tangency_is_rejected() {
        let mut c = Configuration::new(false);
        for d in ["A", "B", "C"] {
            c.add_divisor(d, 1).unwrap();
        }
        c.add_point("p", vec![g("A", &[]), g("B", &[]), g("C", &[])], vec![m("A", "B", 2), m("B", "C", 2)])
            .unwrap();
        assert!(matches!(c.blow_up("p", "E"), Err(SurfaceError::NonTransitive { .. })));
    }

    #[test]
    fn finalize_untouched_conic() {
        let mut c = Configuration::new(true);
        c.add_tracked("Q", 4, -6).unwrap();
        let p = c.finalize().unwrap();
        assert_eq!(p.degree(), 2);
        assert!(p.cusps().is_empty());
        assert!(c.blow_up_fresh(Some("Q"), "E").unwrap().finalize().is_err());
    }

    #[test]
    fn dot_and_json_are_deterministic() {
        let c = conics();
        let dot = c.to_dot();
        assert_eq!(dot, conics().to_dot());
        assert!(dot.contains("\"C1\" -- \"C2\" [label=\"4 @p\"]"));
        assert_eq!(Configuration::new(true).to_dot(), "graph configuration {\n}\n");
        let json = serde_json::to_value(&c).unwrap();
        assert_eq!(json["ambient"], "p2");
        assert_eq!(json["owners"][0]["degree"], 2);
        assert_eq!(json["ledger"], 0);
    }
}
