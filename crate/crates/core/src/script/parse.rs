use std::collections::BTreeSet;

use super::{Decl, DivisorSize, Germ, Meet, Pos, Script, Spanned, Stmt, TrackedSize};
use crate::error::ScriptError;
use crate::invariants::MultiplicitySequence;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Sym(s) => format!("`{s}`"),
        }
    }
}

const SYMBOLS: [&str; 13] = ["==", "->", "{", "}", "(", ")", "[", "]", ",", ";", ":", "=", "_"];

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '@')
}

fn syntax(pos: Pos, msg: impl Into<String>) -> ScriptError {
    ScriptError::Syntax { line: pos.line, col: pos.col, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ScriptError> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let pos = Pos { line: li + 1, col: i + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if is_ident_start(c) {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
                continue;
            }
            let negative = c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit());
            if c.is_ascii_digit() || negative {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<i64>().map_err(|_| syntax(pos, format!("integer `{s}` is out of range")))?;
                out.push((Tok::Int(n), pos));
                continue;
            }
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push((Tok::Sym(s), pos));
                    i += s.len();
                }
                None => return Err(syntax(pos, format!("unexpected character `{c}`"))),
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
    defined: BTreeSet<String>,
}

impl Parser {
    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.1)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn unexpected(&self, what: &str) -> ScriptError {
        match self.peek() {
            Some(t) => syntax(self.pos(), format!("expected {what}, found {}", t.describe())),
            None => syntax(self.pos(), format!("expected {what}, found end of input")),
        }
    }

    fn sym(&mut self, s: &'static str) -> Result<(), ScriptError> {
        if self.peek() == Some(&Tok::Sym(s)) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{s}`")))
        }
    }

    fn eat_sym(&mut self, s: &'static str) -> bool {
        let hit = self.peek() == Some(&Tok::Sym(s));
        if hit {
            self.at += 1;
        }
        hit
    }

    fn keyword(&mut self, k: &str) -> Result<(), ScriptError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.at += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{k}`"))),
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), ScriptError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok((s, pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn int(&mut self) -> Result<i64, ScriptError> {
        match self.peek() {
            Some(&Tok::Int(n)) => {
                self.at += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn nonneg(&mut self) -> Result<u64, ScriptError> {
        let pos = self.pos();
        let n = self.int()?;
        u64::try_from(n).map_err(|_| syntax(pos, format!("expected a non-negative integer, found {n}")))
    }

    /// Introduces a name; each name is bound once per script.
    fn define(&mut self) -> Result<String, ScriptError> {
        let (name, pos) = self.ident()?;
        if !self.defined.insert(name.clone()) {
            return Err(ScriptError::Duplicate { line: pos.line, col: pos.col, name });
        }
        Ok(name)
    }

    /// A reference to a name. Names containing `@` are created by the engine
    /// at run time and are not checked here.
    fn reference(&mut self) -> Result<String, ScriptError> {
        let (name, pos) = self.ident()?;
        if !name.contains('@') && !self.defined.contains(&name) {
            return Err(ScriptError::Undefined { line: pos.line, col: pos.col, name });
        }
        Ok(name)
    }

    fn multseq(&mut self) -> Result<MultiplicitySequence, ScriptError> {
        let pos = self.pos();
        self.sym("[")?;
        let mut runs = Vec::new();
        if !self.eat_sym("]") {
            loop {
                let v = self.nonneg()?;
                let k = if self.eat_sym("_") { self.nonneg()? } else { 1 };
                runs.push((v, k));
                if self.eat_sym("]") {
                    break;
                }
                self.sym(",")?;
            }
        }
        MultiplicitySequence::from_runs(&runs)
            .map_err(|e| ScriptError::Multseq { line: pos.line, col: pos.col, msg: e.to_string() })
    }

    fn decl(&mut self) -> Result<Decl, ScriptError> {
        let (kw, pos) = self.ident()?;
        match kw.as_str() {
            "ambient" => {
                self.keyword("p2")?;
                Ok(Decl::AmbientP2)
            }
            "tracked" => {
                let name = self.define()?;
                let size = if self.eat_keyword("degree") {
                    TrackedSize::Degree(self.nonneg()?)
                } else {
                    self.keyword("selfint")?;
                    let self_int = self.int()?;
                    self.keyword("kdot")?;
                    TrackedSize::Explicit { self_int, k_dot: self.int()? }
                };
                Ok(Decl::Tracked { name, size })
            }
            "divisor" => {
                let name = self.define()?;
                let size = if self.eat_keyword("degree") {
                    DivisorSize::Degree(self.nonneg()?)
                } else {
                    self.keyword("selfint")?;
                    DivisorSize::SelfInt(self.int()?)
                };
                Ok(Decl::Divisor { name, size })
            }
            "point" => {
                let name = self.define()?;
                self.sym("{")?;
                let mut germs = Vec::new();
                loop {
                    let owner = self.reference()?;
                    let multseq = if self.eat_sym(":") { Some(self.multseq()?) } else { None };
                    germs.push(Germ { owner, multseq });
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                let mut meets = Vec::new();
                if self.eat_sym(";") {
                    self.keyword("meets")?;
                    loop {
                        self.sym("(")?;
                        let a = self.reference()?;
                        self.sym(",")?;
                        let b = self.reference()?;
                        self.sym(")")?;
                        self.sym("=")?;
                        meets.push(Meet { a, b, mult: self.nonneg()? });
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                }
                self.sym("}")?;
                Ok(Decl::Point { name, germs, meets })
            }
            other => Err(syntax(pos, format!("unknown declaration `{other}`"))),
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        let hit = matches!(self.peek(), Some(Tok::Ident(s)) if s == k);
        if hit {
            self.at += 1;
        }
        hit
    }

    fn stmt(&mut self) -> Result<Stmt, ScriptError> {
        let (kw, pos) = self.ident()?;
        match kw.as_str() {
            "blowup" => {
                let point = self.reference()?;
                self.sym("->")?;
                Ok(Stmt::Blowup { point, divisor: self.define()? })
            }
            "name" => {
                let name = self.define()?;
                self.sym("=")?;
                self.keyword("meet")?;
                let (a, b) = self.pair()?;
                Ok(Stmt::Name { name, a, b })
            }
            "blowdown" => Ok(Stmt::Blowdown { divisor: self.reference()? }),
            "assert" => {
                if self.eat_keyword("selfint") {
                    let owner = self.reference()?;
                    self.sym("==")?;
                    Ok(Stmt::AssertSelfInt { owner, value: self.int()? })
                } else if self.eat_keyword("multseq") {
                    let owner = self.reference()?;
                    self.keyword("at")?;
                    let point = self.reference()?;
                    self.sym("==")?;
                    Ok(Stmt::AssertMultseq { owner, point, expected: self.multseq()? })
                } else if self.eat_keyword("meet") {
                    let (a, b) = self.pair()?;
                    self.keyword("at")?;
                    let point = self.reference()?;
                    self.sym("==")?;
                    Ok(Stmt::AssertMeet { a, b, point, value: self.nonneg()? })
                } else {
                    Err(self.unexpected("`selfint`, `multseq` or `meet`"))
                }
            }
            "finalize" => {
                self.keyword("expect")?;
                self.keyword("degree")?;
                let degree = self.nonneg()?;
                self.keyword("cusps")?;
                self.sym("[")?;
                let mut cusps = Vec::new();
                if !self.eat_sym("]") {
                    cusps.push(self.multseq()?);
                    while self.eat_sym(",") {
                        cusps.push(self.multseq()?);
                    }
                    self.sym("]")?;
                }
                Ok(Stmt::Finalize { degree, cusps })
            }
            other => Err(syntax(pos, format!("unknown statement `{other}`"))),
        }
    }

    fn pair(&mut self) -> Result<(String, String), ScriptError> {
        self.sym("(")?;
        let a = self.reference()?;
        self.sym(",")?;
        let b = self.reference()?;
        self.sym(")")?;
        Ok((a, b))
    }
}

/// Parses a script, checking that every name is bound exactly once and
/// before it is used.
pub fn parse(text: &str) -> Result<Script, ScriptError> {
    let toks = lex(text)?;
    let end = Pos { line: text.lines().count().max(1), col: text.lines().last().map_or(1, |l| l.chars().count() + 1) };
    let mut p = Parser { toks, at: 0, end, defined: BTreeSet::new() };
    p.keyword("config")?;
    p.sym("{")?;
    let mut config = Vec::new();
    while !p.eat_sym("}") {
        let pos = p.pos();
        config.push(Spanned { node: p.decl()?, pos });
    }
    let mut stmts = Vec::new();
    while p.peek().is_some() {
        let pos = p.pos();
        stmts.push(Spanned { node: p.stmt()?, pos });
    }
    Ok(Script { config, stmts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::script::render;

    const SAMPLE: &str = "\
# two conics and a line
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
blowup p -> E1
name x = meet(C1,E1)   # residual 3
assert meet(C1,C2) at x == 3
assert selfint C1' == -1
";

    #[test]
    fn undefined_names_are_reported_with_position() {
        let err = parse(SAMPLE).unwrap_err();
        assert_eq!(err, ScriptError::Undefined { line: 15, col: 16, name: "C1'".into() });
    }

    #[test]
    fn parses_and_renders_back() {
        let text = SAMPLE.replace("C1' == -1", "C1 == 3\nassert multseq L at q == [4_2,2_3]");
        let s = parse(&text).unwrap();
        assert_eq!(s.config.len(), 8);
        assert_eq!(s.stmts.len(), 5);
        assert_eq!(s.stmts[1].pos, Pos { line: 13, col: 1 });
        match &s.stmts[4].node {
            Stmt::AssertMultseq { expected, .. } => assert_eq!(expected.entries(), &[4, 4, 2, 2, 2]),
            other => panic!("{other:?}"),
        }
        assert_eq!(parse(&render(&s)).unwrap(), s);
    }

    #[test]
    fn finalize_accepts_an_empty_cusp_list() {
        let s = parse("config {\n  ambient p2\n  tracked L degree 1\n}\nfinalize expect degree 1 cusps []\n").unwrap();
        assert_eq!(s.stmts[0].node, Stmt::Finalize { degree: 1, cusps: Vec::new() });
        assert_eq!(parse(&render(&s)).unwrap(), s);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse("config { }\nblowup p ->").unwrap_err();
        assert!(matches!(err, ScriptError::Undefined { line: 2, col: 8, .. }), "{err}");
        let err = parse("config { point p { } }").unwrap_err();
        assert!(matches!(err, ScriptError::Syntax { line: 1, col: 20, .. }), "{err}");
        let err = parse("config { divisor E selfint -1 point p { E } }\nblowup p ->").unwrap_err();
        assert_eq!(
            err,
            ScriptError::Syntax { line: 2, col: 12, msg: "expected an identifier, found end of input".into() }
        );
    }

    #[test]
    fn duplicates_and_bad_sequences() {
        let err = parse("config { divisor E selfint -1 divisor E selfint 1 }").unwrap_err();
        assert!(matches!(err, ScriptError::Duplicate { col: 39, .. }), "{err}");
        let err = parse("config { tracked C degree 3 point p { C: [2,3] } }").unwrap_err();
        assert!(matches!(err, ScriptError::Multseq { col: 42, .. }), "{err}");
        let err = parse("config { tracked C degree 3 point p { C: [2] } }\nblowup p -> p").unwrap_err();
        assert!(matches!(err, ScriptError::Duplicate { line: 2, col: 13, .. }), "{err}");
    }
}
