//! Text form of operator words.
//!
//! ```text
//! word    := symbols '|' core '|' symbols  |  core
//! core    := 'T' '[' item* ']'  |  ε
//! item    := symbol | normal | '(' (symbol | normal)+ ')'
//! normal  := ':' symbol+ ':'
//! symbol  := ladder | 'sm' INT | 'sp' INT | scalar | spinor | monopole
//! ladder  := ('a' | 'b') INT ['+'] '(' [IDENT '='] INT (',' INT)* [';' ('u' | 'd')] ')'
//! scalar  := 'phi' INT ['+'] '(' point ')'
//! spinor  := ('psi' | 'psibar') INT '_' (DIGIT | IDENT) '(' point ')'
//! monopole:= 'mu' INT '(' [IDENT '='] NUM ')'
//! point   := [IDENT '='] NUM [';' NUM (',' NUM)*]
//! ```

use super::symbol::{Group, GroupItem, OperatorSymbol, OperatorWord, Point, SpinorIndex};
use crate::error::{Error, Result};
use crate::lattice::ModeIndex;
use crate::spinor::{Charge, Spin};
use std::fmt;

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn starts_with(&mut self, lit: &str) -> bool {
        self.skip_ws();
        self.s[self.pos..].starts_with(lit.as_bytes())
    }

    fn error(&self, msg: &str) -> Error {
        Error::MalformedWord(format!("{msg} at byte {}", self.pos))
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        if start < self.s.len() && (self.s[start].is_ascii_alphabetic() || self.s[start] == b'_') {
            let mut end = start + 1;
            while end < self.s.len() && (self.s[end].is_ascii_alphanumeric() || self.s[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            Some(String::from_utf8_lossy(&self.s[start..end]).into_owned())
        } else {
            None
        }
    }

    /// `IDENT '='` if present, otherwise leaves the cursor untouched.
    fn label(&mut self) -> Option<String> {
        let save = self.pos;
        if let Some(id) = self.ident() {
            if self.eat(b'=') {
                return Some(id);
            }
        }
        self.pos = save;
        None
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("expected an unsigned integer"))
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("expected an integer"))
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && matches!(self.s[self.pos], b'0'..=b'9' | b'.' | b'-' | b'+' | b'e' | b'E') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("expected a number"))
    }

    fn point(&mut self) -> Result<Point> {
        let label = self.label();
        let t = self.number()?;
        let mut x = Vec::new();
        if self.eat(b';') {
            x.push(self.number()?);
            while self.eat(b',') {
                x.push(self.number()?);
            }
        }
        Ok(Point { label, t, x })
    }

    fn symbol(&mut self) -> Result<OperatorSymbol> {
        if self.starts_with("psibar") || self.starts_with("psi") {
            let conj = self.starts_with("psibar");
            self.pos += if conj { 6 } else { 3 };
            let field = self.uint()?;
            self.expect(b'_')?;
            let index = match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    self.pos += 1;
                    SpinorIndex::Fixed(c - b'0')
                }
                _ => SpinorIndex::Label(self.ident().ok_or_else(|| self.error("expected a spinor index"))?),
            };
            self.expect(b'(')?;
            let point = self.point()?;
            self.expect(b')')?;
            return Ok(OperatorSymbol::Spinor {
                field,
                point,
                conj,
                index,
            });
        }
        if self.starts_with("phi") {
            self.pos += 3;
            let field = self.uint()?;
            let dagger = self.eat(b'+');
            self.expect(b'(')?;
            let point = self.point()?;
            self.expect(b')')?;
            return Ok(OperatorSymbol::Scalar { field, point, dagger });
        }
        if self.starts_with("mu") {
            self.pos += 2;
            let detector = self.uint()?;
            self.expect(b'(')?;
            let label = self.label();
            let time = self.number()?;
            self.expect(b')')?;
            return Ok(OperatorSymbol::Monopole { detector, time, label });
        }
        if self.starts_with("sm") || self.starts_with("sp") {
            let raising = self.starts_with("sp");
            self.pos += 2;
            let detector = self.uint()?;
            return Ok(OperatorSymbol::Sigma { detector, raising });
        }
        if self.starts_with("a") || self.starts_with("b") {
            let charge = if self.starts_with("a") { Charge::Particle } else { Charge::Antiparticle };
            self.pos += 1;
            let field = self.uint()?;
            let dagger = self.eat(b'+');
            self.expect(b'(')?;
            let label = self.label();
            let mut comps = vec![self.int()?];
            while self.eat(b',') {
                comps.push(self.int()?);
            }
            let spin = if self.eat(b';') {
                match self.ident().as_deref() {
                    Some("u") => Some(Spin::Up),
                    Some("d") => Some(Spin::Down),
                    _ => return Err(self.error("spin must be `u` or `d`")),
                }
            } else {
                None
            };
            self.expect(b')')?;
            let mode = ModeIndex::new(&comps).map_err(|e| self.error(&e.to_string()))?;
            return Ok(OperatorSymbol::Ladder {
                field,
                charge,
                mode,
                spin,
                dagger,
                label,
            });
        }
        Err(self.error("unknown symbol"))
    }

    fn normal(&mut self) -> Result<Vec<OperatorSymbol>> {
        self.expect(b':')?;
        let mut v = Vec::new();
        while self.peek() != Some(b':') {
            if self.peek().is_none() {
                return Err(self.error("unterminated normal-ordered run"));
            }
            v.push(self.symbol()?);
        }
        self.expect(b':')?;
        Ok(v)
    }

    fn item(&mut self) -> Result<GroupItem> {
        if self.peek() == Some(b':') {
            Ok(GroupItem::Normal(self.normal()?))
        } else {
            Ok(GroupItem::Bare(self.symbol()?))
        }
    }

    fn symbols_until(&mut self, stop: u8) -> Result<Vec<OperatorSymbol>> {
        let mut v = Vec::new();
        while let Some(c) = self.peek() {
            if c == stop {
                break;
            }
            v.push(self.symbol()?);
        }
        Ok(v)
    }

    fn core(&mut self) -> Result<Vec<Group>> {
        let mut groups = Vec::new();
        if !self.eat(b'T') {
            return Ok(groups);
        }
        self.expect(b'[')?;
        loop {
            match self.peek() {
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                Some(b'(') => {
                    self.pos += 1;
                    let mut items = Vec::new();
                    while self.peek() != Some(b')') {
                        if self.peek().is_none() {
                            return Err(self.error("unterminated time slot"));
                        }
                        items.push(self.item()?);
                    }
                    self.pos += 1;
                    groups.push(Group { items });
                }
                Some(_) => groups.push(Group {
                    items: vec![self.item()?],
                }),
                None => return Err(self.error("unterminated `T[`")),
            }
        }
        Ok(groups)
    }
}

impl OperatorWord {
    /// Parses the text form. Field kinds are not part of the text; attach them
    /// with [`OperatorWord::with_kinds`].
    pub fn parse(text: &str) -> Result<OperatorWord> {
        let mut c = Cursor {
            s: text.as_bytes(),
            pos: 0,
        };
        let has_bars = text.contains('|');
        let (prefix, core, suffix) = if has_bars {
            let prefix = c.symbols_until(b'|')?;
            c.expect(b'|')?;
            let core = c.core()?;
            c.expect(b'|')?;
            let suffix = c.symbols_until(0)?;
            (prefix, core, suffix)
        } else {
            (Vec::new(), c.core()?, Vec::new())
        };
        if c.peek().is_some() {
            return Err(c.error("trailing input"));
        }
        Ok(OperatorWord::new(prefix, core, suffix))
    }
}

fn fmt_point(p: &Point, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if let Some(l) = &p.label {
        write!(f, "{l}=")?;
    }
    write!(f, "{:?}", p.t)?;
    if !p.x.is_empty() {
        let xs: Vec<String> = p.x.iter().map(|v| format!("{v:?}")).collect();
        write!(f, ";{}", xs.join(","))?;
    }
    Ok(())
}

impl fmt::Display for OperatorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorSymbol::Ladder {
                field,
                charge,
                mode,
                spin,
                dagger,
                label,
            } => {
                let c = if *charge == Charge::Particle { 'a' } else { 'b' };
                write!(f, "{c}{field}{}(", if *dagger { "+" } else { "" })?;
                if let Some(l) = label {
                    write!(f, "{l}=")?;
                }
                write!(f, "{mode}")?;
                if let Some(s) = spin {
                    write!(f, ";{}", s.symbol())?;
                }
                write!(f, ")")
            }
            OperatorSymbol::Sigma { detector, raising } => write!(f, "{}{detector}", if *raising { "sp" } else { "sm" }),
            OperatorSymbol::Scalar { field, point, dagger } => {
                write!(f, "phi{field}{}(", if *dagger { "+" } else { "" })?;
                fmt_point(point, f)?;
                write!(f, ")")
            }
            OperatorSymbol::Spinor {
                field,
                point,
                conj,
                index,
            } => {
                write!(f, "{}{field}_{index}(", if *conj { "psibar" } else { "psi" })?;
                fmt_point(point, f)?;
                write!(f, ")")
            }
            OperatorSymbol::Monopole { detector, time, label } => {
                write!(f, "mu{detector}(")?;
                if let Some(l) = label {
                    write!(f, "{l}=")?;
                }
                write!(f, "{time:?})")
            }
        }
    }
}

fn fmt_item(item: &GroupItem, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match item {
        GroupItem::Bare(s) => write!(f, "{s}"),
        GroupItem::Normal(v) => {
            let parts: Vec<String> = v.iter().map(|s| s.to_string()).collect();
            write!(f, ":{}:", parts.join(" "))
        }
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[OperatorSymbol]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{} | T[", join(&self.prefix))?;
        for g in &self.core {
            write!(f, " ")?;
            if g.items.len() == 1 {
                fmt_item(&g.items[0], f)?;
            } else {
                write!(f, "(")?;
                for (i, it) in g.items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    fmt_item(it, f)?;
                }
                write!(f, ")")?;
            }
        }
        write!(f, " ] | {}", join(&self.suffix))
    }
}
