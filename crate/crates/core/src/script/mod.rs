//! A small construction language driving [`crate::surface::Configuration`].
//!
//! ```text
//! config {
//!   ambient p2
//!   tracked L degree 1
//!   divisor C1 degree 2
//!   point q { C1, L ; meets (C1,L) = 2 }
//! }
//! blowup q -> E
//! assert selfint E == -1
//! ```

use std::fmt;

use crate::invariants::MultiplicitySequence;

pub mod corpus;
mod exec;
mod parse;

pub use exec::{execute, execute_traced, ExecutionReport, StepOutcome, StepReport};
pub use parse::parse;

/// Line and column (both 1-based) of a construct in the source text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A node with its source position; equality ignores the position.
#[derive(Debug, Clone)]
pub struct Spanned<T> {
    pub node: T,
    pub pos: Pos,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.node == other.node
    }
}

impl<T: Eq> Eq for Spanned<T> {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrackedSize {
    Degree(u64),
    Explicit { self_int: i64, k_dot: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivisorSize {
    Degree(u64),
    SelfInt(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Germ {
    pub owner: String,
    pub multseq: Option<MultiplicitySequence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meet {
    pub a: String,
    pub b: String,
    pub mult: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decl {
    AmbientP2,
    Tracked { name: String, size: TrackedSize },
    Divisor { name: String, size: DivisorSize },
    Point { name: String, germs: Vec<Germ>, meets: Vec<Meet> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Blowup { point: String, divisor: String },
    Name { name: String, a: String, b: String },
    Blowdown { divisor: String },
    AssertSelfInt { owner: String, value: i64 },
    AssertMultseq { owner: String, point: String, expected: MultiplicitySequence },
    AssertMeet { a: String, b: String, point: String, value: u64 },
    Finalize { degree: u64, cusps: Vec<MultiplicitySequence> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub config: Vec<Spanned<Decl>>,
    pub stmts: Vec<Spanned<Stmt>>,
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::AmbientP2 => write!(f, "ambient p2"),
            Decl::Tracked { name, size: TrackedSize::Degree(d) } => write!(f, "tracked {name} degree {d}"),
            Decl::Tracked { name, size: TrackedSize::Explicit { self_int, k_dot } } => {
                write!(f, "tracked {name} selfint {self_int} kdot {k_dot}")
            }
            Decl::Divisor { name, size: DivisorSize::Degree(d) } => write!(f, "divisor {name} degree {d}"),
            Decl::Divisor { name, size: DivisorSize::SelfInt(s) } => write!(f, "divisor {name} selfint {s}"),
            Decl::Point { name, germs, meets } => {
                let germs: Vec<String> = germs
                    .iter()
                    .map(|g| match &g.multseq {
                        Some(ms) => format!("{}: {}", g.owner, ms.shorthand()),
                        None => g.owner.clone(),
                    })
                    .collect();
                write!(f, "point {name} {{ {}", germs.join(", "))?;
                if !meets.is_empty() {
                    let meets: Vec<String> = meets.iter().map(|m| format!("({},{}) = {}", m.a, m.b, m.mult)).collect();
                    write!(f, " ; meets {}", meets.join(", "))?;
                }
                write!(f, " }}")
            }
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Blowup { point, divisor } => write!(f, "blowup {point} -> {divisor}"),
            Stmt::Name { name, a, b } => write!(f, "name {name} = meet({a},{b})"),
            Stmt::Blowdown { divisor } => write!(f, "blowdown {divisor}"),
            Stmt::AssertSelfInt { owner, value } => write!(f, "assert selfint {owner} == {value}"),
            Stmt::AssertMultseq { owner, point, expected } => {
                write!(f, "assert multseq {owner} at {point} == {}", expected.shorthand())
            }
            Stmt::AssertMeet { a, b, point, value } => write!(f, "assert meet({a},{b}) at {point} == {value}"),
            Stmt::Finalize { degree, cusps } => {
                let cusps: Vec<String> = cusps.iter().map(|c| c.shorthand()).collect();
                write!(f, "finalize expect degree {degree} cusps [{}]", cusps.join(", "))
            }
        }
    }
}

/// Canonical text of a script; `parse(render(s)) == s`.
pub fn render(s: &Script) -> String {
    s.to_string()
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "config {{")?;
        for d in &self.config {
            writeln!(f, "  {}", d.node)?;
        }
        writeln!(f, "}}")?;
        for s in &self.stmts {
            writeln!(f, "{}", s.node)?;
        }
        Ok(())
    }
}
