//! Session files: a line-oriented declaration and command language.
//!
//! ```text
//! ring R p=32003 vars=[x,y] order=grevlex
//! ideal I = [x^2 - y, x*y]
//! module M = coker [[x, y]]
//! map f : M -> N = [[1]]
//! level k=1
//! small M
//! ```
//!
//! Names are resolved while parsing; polynomials are parsed in the ring
//! that is current at their line. Printing a session gives canonical text
//! that parses back to an equal session.

use std::collections::HashMap;
use std::fmt;

use codimcat::{Error, MonomialOrder, Poly, Result, Ring};

/// Either the name of a declared ideal or prime, or an inline generator
/// list.
#[derive(Clone, Debug, PartialEq)]
pub enum IdealRef {
    Name(String),
    Inline(Vec<Poly>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModuleDef {
    /// Rows of the presentation matrix.
    Coker { rows: usize, entries: Vec<Vec<Poly>> },
    Free(usize),
    /// `R/I`
    Quotient(String),
    /// `I` as a module.
    Ideal(String),
    Sum(String, String),
    Tensor(String, String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum RoofDef {
    Span { apex: String, s: String, t: String },
    Map(String),
    Compose { outer: String, inner: String },
    Fraction { prime: String, num: Poly, den: Poly },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Dim(String),
    Ann(String),
    Gb(String),
    Small(String),
    Weq(String),
    Zero(String),
    Iso(String),
    RoofComp(String, String),
    RoofEq(String, String),
    RoofIso(String),
    Minimal { module: String, prime: String },
    SuppK(String),
    Pic(String),
    Fitting { module: String, i: usize },
    HomSec { f: String, g: String, j: IdealRef, n: usize },
    Filtration { module: String, ideal: IdealRef },
    Verify { witness: String, k: i64 },
    Transport { witness: String, module: String },
    EquivCheck { witness: String, k: i64, random: usize, seed: Option<u64> },
    Act { autoeq: String, module: String },
    AutoLaw { first: String, second: String, module: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Ring { name: String, p: u64, vars: Vec<String>, order: MonomialOrder },
    Use(String),
    Ideal { name: String, gens: Vec<Poly> },
    Module { name: String, def: ModuleDef },
    Map { name: String, source: String, target: String, rows: usize, entries: Vec<Vec<Poly>> },
    Algebra { name: String, gens: Vec<Poly> },
    Chart(String),
    Level(i64),
    Prime { name: String, ideal: IdealRef },
    Roof { name: String, def: RoofDef },
    Witness {
        name: String,
        source: String,
        target: String,
        images: Vec<(Poly, Poly)>,
        prime: String,
        target_prime: String,
    },
    AutoEq { name: String, witness: String, line: String },
    Command(Command),
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub line: usize,
    pub kind: StmtKind,
}

/// A parsed session. Equality ignores line numbers.
#[derive(Clone, Debug, Default)]
pub struct Session {
    pub stmts: Vec<Stmt>,
}

impl PartialEq for Session {
    fn eq(&self, other: &Session) -> bool {
        self.stmts.len() == other.stmts.len()
            && self.stmts.iter().zip(&other.stmts).all(|(a, b)| a.kind == b.kind)
    }
}

/// Values used when a `ring` line leaves `p` or `order` out.
#[derive(Clone, Debug)]
pub struct ParseDefaults {
    pub prime: u64,
    pub order: MonomialOrder,
}

impl Default for ParseDefaults {
    fn default() -> Self {
        ParseDefaults {
            prime: codimcat::arith::DEFAULT_PRIME as u64,
            order: MonomialOrder::GrevLex,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Ring,
    Ideal,
    Module,
    Map,
    Algebra,
    Prime,
    Roof,
    Witness,
    AutoEq,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Ring => "ring",
            Kind::Ideal => "ideal",
            Kind::Module => "module",
            Kind::Map => "map",
            Kind::Algebra => "algebra",
            Kind::Prime => "prime",
            Kind::Roof => "roof",
            Kind::Witness => "witness",
            Kind::AutoEq => "autoeq",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    /// Raw text of a bracketed list, brackets included.
    List(String),
    Eq,
    Colon,
    Arrow,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(line: usize, text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c == '[' {
            let start = i;
            let mut depth = 0;
            while i < chars.len() {
                match chars[i] {
                    '[' => depth += 1,
                    ']' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            if i == chars.len() {
                return Err(perr(line, col, "unclosed '['"));
            }
            i += 1;
            out.push(Token {
                tok: Tok::List(chars[start..i].iter().collect()),
                col,
            });
        } else if c == ']' {
            return Err(perr(line, col, "unexpected ']'"));
        } else if c == '=' {
            out.push(Token { tok: Tok::Eq, col });
            i += 1;
        } else if c == ':' {
            out.push(Token { tok: Tok::Colon, col });
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, col });
            i += 2;
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && !"=[]:#".contains(chars[i]) {
                if chars[i] == '-' && chars.get(i + 1) == Some(&'>') {
                    break;
                }
                i += 1;
            }
            out.push(Token {
                tok: Tok::Word(chars[start..i].iter().collect()),
                col,
            });
        }
    }
    Ok(out)
}

/// Splits the inside of `[...]` at top-level commas; items come with their
/// 1-based column in the line.
fn split_list(line: usize, raw: &str, col: usize) -> Result<Vec<(String, usize)>> {
    let inner: Vec<char> = raw.chars().collect();
    let body = &inner[1..inner.len() - 1];
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, &c) in body.iter().enumerate() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                items.push((start, i));
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push((start, body.len()));
    let mut out = Vec::new();
    for (a, b) in items {
        let text: String = body[a..b].iter().collect();
        let lead = text.len() - text.trim_start().len();
        let trimmed = text.trim();
        if trimmed.is_empty() {
            if out.is_empty() && items_is_empty(body) {
                return Ok(Vec::new());
            }
            return Err(perr(line, col + 1 + a, "empty list item"));
        }
        out.push((trimmed.to_string(), col + 1 + a + lead));
    }
    Ok(out)
}

fn items_is_empty(body: &[char]) -> bool {
    body.iter().all(|c| c.is_whitespace())
}

fn relocate(err: Error, line: usize, col: usize) -> Error {
    match err {
        Error::Parse { col: c, msg, .. } => perr(line, col + c - 1, msg),
        other => other,
    }
}

struct Parser<'a> {
    line: usize,
    toks: Vec<Token>,
    pos: usize,
    end_col: usize,
    st: &'a mut State,
}

struct State {
    defaults: ParseDefaults,
    names: HashMap<String, (Kind, Option<String>)>,
    rings: HashMap<String, Ring>,
    current_ring: Option<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.col).unwrap_or(self.end_col)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(perr(self.line, self.col(), msg))
    }

    fn word(&mut self, what: &str) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Word(w)) => {
                self.pos += 1;
                Ok(w)
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn list(&mut self, what: &str) -> Result<(String, usize)> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::List(raw)) => {
                self.pos += 1;
                Ok((raw, col))
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn done(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            self.fail("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn ring(&self) -> Result<Ring> {
        match &self.st.current_ring {
            Some(r) => Ok(self.st.rings[r].clone()),
            None => Err(perr(self.line, 1, "no ring declared")),
        }
    }

    fn polys(&mut self, ring: &Ring) -> Result<Vec<Poly>> {
        let (raw, col) = self.list("a polynomial list")?;
        split_list(self.line, &raw, col)?
            .into_iter()
            .map(|(t, c)| ring.parse_poly(&t).map_err(|e| relocate(e, self.line, c)))
            .collect()
    }

    fn matrix(&mut self, ring: &Ring) -> Result<(usize, Vec<Vec<Poly>>)> {
        let (raw, col) = self.list("a matrix")?;
        let mut rows = Vec::new();
        for (row, c) in split_list(self.line, &raw, col)? {
            if !row.starts_with('[') || !row.ends_with(']') {
                return Err(perr(self.line, c, "matrix rows must be bracketed"));
            }
            let entries = split_list(self.line, &row, c)?
                .into_iter()
                .map(|(t, cc)| ring.parse_poly(&t).map_err(|e| relocate(e, self.line, cc)))
                .collect::<Result<Vec<_>>>()?;
            rows.push(entries);
        }
        if let Some(first) = rows.first() {
            let w = first.len();
            if rows.iter().any(|r| r.len() != w) {
                return Err(perr(self.line, col, "matrix rows have different lengths"));
            }
        }
        Ok((rows.len(), rows))
    }

    /// A reference to an existing name of one of the given kinds.
    fn reference(&mut self, kinds: &[Kind]) -> Result<String> {
        let col = self.col();
        let name = self.word(kinds[0].name())?;
        match self.st.names.get(&name) {
            None => Err(Error::Unresolved {
                name,
                line: self.line,
            }),
            Some((k, _)) if !kinds.contains(k) => Err(perr(
                self.line,
                col,
                format!("`{name}` is a {}, expected a {}", k.name(), kinds[0].name()),
            )),
            Some(_) => Ok(name),
        }
    }

    fn fresh(&mut self) -> Result<(String, usize)> {
        let col = self.col();
        let name = self.word("a name")?;
        if self.st.names.contains_key(&name) {
            return Err(perr(self.line, col, format!("`{name}` is already declared")));
        }
        if !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
            return Err(perr(self.line, col, format!("invalid name `{name}`")));
        }
        Ok((name, col))
    }

    fn declare(&mut self, name: &str, kind: Kind) {
        let ring = self.st.current_ring.clone();
        self.st.names.insert(name.to_string(), (kind, ring));
    }

    fn key(&mut self, key: &str) -> Result<()> {
        let col = self.col();
        let w = self.word(&format!("`{key}=`"))?;
        if w != key {
            return Err(perr(self.line, col, format!("expected `{key}=`, found `{w}`")));
        }
        self.expect(Tok::Eq, "'='")
    }

    fn int_arg<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.key(key)?;
        let col = self.col();
        let w = self.word("an integer")?;
        w.parse()
            .map_err(|_| perr(self.line, col, format!("invalid integer `{w}`")))
    }

    fn ideal_arg(&mut self, key: &str) -> Result<IdealRef> {
        self.key(key)?;
        if let Some(Tok::List(_)) = self.peek() {
            let ring = self.ring()?;
            Ok(IdealRef::Inline(self.polys(&ring)?))
        } else {
            Ok(IdealRef::Name(self.reference(&[Kind::Ideal, Kind::Prime])?))
        }
    }

    fn ring_of(&self, name: &str) -> Ring {
        let r = self.st.names[name].1.clone().expect("objects are declared inside a ring");
        self.st.rings[&r].clone()
    }

    fn stmt(&mut self) -> Result<StmtKind> {
        let kw = self.word("a keyword")?;
        let kind = match kw.as_str() {
            "ring" => self.ring_decl()?,
            "use" => {
                let name = self.reference(&[Kind::Ring])?;
                self.st.current_ring = Some(name.clone());
                StmtKind::Use(name)
            }
            "ideal" => {
                let ring = self.ring()?;
                let (name, _) = self.fresh()?;
                self.expect(Tok::Eq, "'='")?;
                let gens = self.polys(&ring)?;
                self.declare(&name, Kind::Ideal);
                StmtKind::Ideal { name, gens }
            }
            "module" => self.module_decl()?,
            "map" => {
                let (name, _) = self.fresh()?;
                self.expect(Tok::Colon, "':'")?;
                let source = self.reference(&[Kind::Module])?;
                self.expect(Tok::Arrow, "'->'")?;
                let target = self.reference(&[Kind::Module])?;
                self.expect(Tok::Eq, "'='")?;
                let ring = self.ring_of(&source);
                let (rows, entries) = self.matrix(&ring)?;
                let st_ring = self.st.current_ring.clone();
                self.st.current_ring = self.st.names[&source].1.clone();
                self.declare(&name, Kind::Map);
                self.st.current_ring = st_ring;
                StmtKind::Map {
                    name,
                    source,
                    target,
                    rows,
                    entries,
                }
            }
            "algebra" => {
                let ring = self.ring()?;
                let (name, _) = self.fresh()?;
                self.expect(Tok::Eq, "'='")?;
                let gens = self.polys(&ring)?;
                self.declare(&name, Kind::Algebra);
                StmtKind::Algebra { name, gens }
            }
            "chart" => {
                let name = self.reference(&[Kind::Algebra])?;
                self.st.current_ring = self.st.names[&name].1.clone();
                StmtKind::Chart(name)
            }
            "level" => StmtKind::Level(self.int_arg("k")?),
            "prime" => {
                self.ring()?;
                let (name, _) = self.fresh()?;
                self.expect(Tok::Eq, "'='")?;
                let ideal = if let Some(Tok::List(_)) = self.peek() {
                    let ring = self.ring()?;
                    IdealRef::Inline(self.polys(&ring)?)
                } else {
                    IdealRef::Name(self.reference(&[Kind::Ideal])?)
                };
                self.declare(&name, Kind::Prime);
                StmtKind::Prime { name, ideal }
            }
            "roof" => self.roof_decl()?,
            "witness" => {
                let (name, _) = self.fresh()?;
                self.expect(Tok::Colon, "':'")?;
                let source = self.reference(&[Kind::Algebra])?;
                self.expect(Tok::Arrow, "'->'")?;
                let target = self.reference(&[Kind::Algebra])?;
                self.key("images")?;
                let ring = self.ring_of(&source);
                let (raw, col) = self.list("an image list")?;
                let images = split_list(self.line, &raw, col)?
                    .into_iter()
                    .map(|(t, c)| ring.parse_fraction(&t).map_err(|e| relocate(e, self.line, c)))
                    .collect::<Result<Vec<_>>>()?;
                self.key("P")?;
                let prime = self.reference(&[Kind::Prime])?;
                self.key("Q")?;
                let target_prime = self.reference(&[Kind::Prime])?;
                self.declare(&name, Kind::Witness);
                StmtKind::Witness {
                    name,
                    source,
                    target,
                    images,
                    prime,
                    target_prime,
                }
            }
            "autoeq" => {
                let (name, _) = self.fresh()?;
                self.expect(Tok::Eq, "'='")?;
                let witness = self.reference(&[Kind::Witness])?;
                let line = self.reference(&[Kind::Module])?;
                self.declare(&name, Kind::AutoEq);
                StmtKind::AutoEq {
                    name,
                    witness,
                    line,
                }
            }
            _ => {
                self.pos -= 1;
                StmtKind::Command(self.command()?)
            }
        };
        self.done()?;
        Ok(kind)
    }

    fn ring_decl(&mut self) -> Result<StmtKind> {
        let name = match self.peek() {
            Some(Tok::Word(w)) if self.toks.get(self.pos + 1).map(|t| &t.tok) != Some(&Tok::Eq) => {
                let w = w.clone();
                let (n, _) = self.fresh()?;
                debug_assert_eq!(n, w);
                n
            }
            _ => {
                if self.st.names.contains_key("R") {
                    return self.fail("a second ring needs a name");
                }
                "R".to_string()
            }
        };
        let mut p = self.st.defaults.prime;
        let mut order = self.st.defaults.order;
        let mut vars: Option<Vec<String>> = None;
        while self.pos < self.toks.len() {
            let col = self.col();
            let key = self.word("a ring option")?;
            self.expect(Tok::Eq, "'='")?;
            match key.as_str() {
                "p" => {
                    let c = self.col();
                    let w = self.word("a prime")?;
                    p = w
                        .parse()
                        .map_err(|_| perr(self.line, c, format!("invalid prime `{w}`")))?;
                }
                "order" => {
                    let c = self.col();
                    let w = self.word("an order")?;
                    order = MonomialOrder::parse(&w)
                        .ok_or_else(|| perr(self.line, c, format!("unknown order `{w}`")))?;
                }
                "vars" => {
                    let (raw, c) = self.list("a variable list")?;
                    vars = Some(
                        split_list(self.line, &raw, c)?
                            .into_iter()
                            .map(|(v, _)| v)
                            .collect(),
                    );
                }
                _ => return Err(perr(self.line, col, format!("unknown ring option `{key}`"))),
            }
        }
        let vars = vars.ok_or_else(|| perr(self.line, self.end_col, "missing vars=[...]"))?;
        let ring = Ring::new(p, &vars, order).map_err(|e| perr(self.line, 1, e.to_string()))?;
        self.st.rings.insert(name.clone(), ring);
        self.st.current_ring = Some(name.clone());
        self.declare(&name, Kind::Ring);
        Ok(StmtKind::Ring {
            name,
            p,
            vars,
            order,
        })
    }

    fn module_decl(&mut self) -> Result<StmtKind> {
        let ring = self.ring()?;
        let (name, _) = self.fresh()?;
        self.expect(Tok::Eq, "'='")?;
        let col = self.col();
        let how = self.word("a module constructor")?;
        let def = match how.as_str() {
            "coker" => {
                let (rows, entries) = self.matrix(&ring)?;
                ModuleDef::Coker { rows, entries }
            }
            "free" => {
                let c = self.col();
                let w = self.word("a rank")?;
                ModuleDef::Free(
                    w.parse()
                        .map_err(|_| perr(self.line, c, format!("invalid rank `{w}`")))?,
                )
            }
            "quotient" => ModuleDef::Quotient(self.reference(&[Kind::Ideal, Kind::Prime])?),
            "ideal" => ModuleDef::Ideal(self.reference(&[Kind::Ideal, Kind::Prime])?),
            "sum" => {
                let a = self.reference(&[Kind::Module])?;
                ModuleDef::Sum(a, self.reference(&[Kind::Module])?)
            }
            "tensor" => {
                let a = self.reference(&[Kind::Module])?;
                ModuleDef::Tensor(a, self.reference(&[Kind::Module])?)
            }
            _ => return Err(perr(self.line, col, format!("unknown module constructor `{how}`"))),
        };
        self.declare(&name, Kind::Module);
        Ok(StmtKind::Module { name, def })
    }

    fn roof_decl(&mut self) -> Result<StmtKind> {
        let (name, _) = self.fresh()?;
        self.expect(Tok::Eq, "'='")?;
        let def = match self.peek() {
            Some(Tok::Word(w)) if w == "compose" => {
                self.pos += 1;
                let outer = self.reference(&[Kind::Roof])?;
                let inner = self.reference(&[Kind::Roof])?;
                RoofDef::Compose { outer, inner }
            }
            Some(Tok::Word(w)) if w == "map" => {
                self.pos += 1;
                RoofDef::Map(self.reference(&[Kind::Map])?)
            }
            Some(Tok::Word(w)) if w == "fraction" => {
                self.pos += 1;
                let prime = self.reference(&[Kind::Prime])?;
                let ring = self.ring_of(&prime);
                let num = self.single_poly(&ring)?;
                let den = self.single_poly(&ring)?;
                RoofDef::Fraction { prime, num, den }
            }
            _ => {
                let apex = self.reference(&[Kind::Module])?;
                let s = self.reference(&[Kind::Map])?;
                let t = self.reference(&[Kind::Map])?;
                RoofDef::Span { apex, s, t }
            }
        };
        self.declare(&name, Kind::Roof);
        Ok(StmtKind::Roof { name, def })
    }

    fn single_poly(&mut self, ring: &Ring) -> Result<Poly> {
        let col = self.col();
        let mut v = self.polys(ring)?;
        if v.len() != 1 {
            return Err(perr(self.line, col, "expected one bracketed polynomial"));
        }
        Ok(v.remove(0))
    }

    fn command(&mut self) -> Result<Command> {
        let col = self.col();
        let name = self.word("a command")?;
        use Kind::*;
        let cmd = match name.as_str() {
            "dim" => Command::Dim(self.reference(&[Module, Ideal, Prime, Algebra])?),
            "ann" => Command::Ann(self.reference(&[Module])?),
            "gb" => Command::Gb(self.reference(&[Ideal, Prime, Algebra])?),
            "small" => Command::Small(self.reference(&[Module])?),
            "weq" => Command::Weq(self.reference(&[Map])?),
            "zero" => Command::Zero(self.reference(&[Map])?),
            "iso" => Command::Iso(self.reference(&[Map])?),
            "roofcomp" => {
                let a = self.reference(&[Roof])?;
                Command::RoofComp(a, self.reference(&[Roof])?)
            }
            "roofeq" => {
                let a = self.reference(&[Roof])?;
                Command::RoofEq(a, self.reference(&[Roof])?)
            }
            "roofiso" => Command::RoofIso(self.reference(&[Roof])?),
            "minimal" => {
                let module = self.reference(&[Module])?;
                self.key("P")?;
                let prime = self.reference(&[Prime])?;
                Command::Minimal { module, prime }
            }
            "suppk" => Command::SuppK(self.reference(&[Module])?),
            "pic" => Command::Pic(self.reference(&[Module])?),
            "fitting" => {
                let module = self.reference(&[Module])?;
                Command::Fitting {
                    module,
                    i: self.int_arg("i")?,
                }
            }
            "homsec" => {
                let f = self.reference(&[Module])?;
                let g = self.reference(&[Module])?;
                let j = self.ideal_arg("J")?;
                let n = self.int_arg("n")?;
                Command::HomSec { f, g, j, n }
            }
            "filtration" => {
                let module = self.reference(&[Module])?;
                let ideal = self.ideal_arg("I")?;
                Command::Filtration { module, ideal }
            }
            "verify" => {
                let witness = self.reference(&[Witness])?;
                Command::Verify {
                    witness,
                    k: self.int_arg("k")?,
                }
            }
            "transport" => {
                let witness = self.reference(&[Witness])?;
                let module = self.reference(&[Module])?;
                Command::Transport { witness, module }
            }
            "equivcheck" => {
                let witness = self.reference(&[Witness])?;
                let k = self.int_arg("k")?;
                let random = self.int_arg("random")?;
                let seed = if self.pos < self.toks.len() {
                    Some(self.int_arg("seed")?)
                } else {
                    None
                };
                Command::EquivCheck {
                    witness,
                    k,
                    random,
                    seed,
                }
            }
            "act" => {
                let autoeq = self.reference(&[AutoEq])?;
                let module = self.reference(&[Module])?;
                Command::Act { autoeq, module }
            }
            "autolaw" => {
                let first = self.reference(&[AutoEq])?;
                let second = self.reference(&[AutoEq])?;
                let module = self.reference(&[Module])?;
                Command::AutoLaw {
                    first,
                    second,
                    module,
                }
            }
            _ => return Err(perr(self.line, col, format!("unknown keyword `{name}`"))),
        };
        Ok(cmd)
    }
}

pub fn parse_session(text: &str, defaults: &ParseDefaults) -> Result<Session> {
    let mut st = State {
        defaults: defaults.clone(),
        names: HashMap::new(),
        rings: HashMap::new(),
        current_ring: None,
    };
    let mut stmts = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = lex(line, raw)?;
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser {
            line,
            toks,
            pos: 0,
            end_col: raw.chars().count() + 1,
            st: &mut st,
        };
        let kind = p.stmt()?;
        stmts.push(Stmt { line, kind });
    }
    Ok(Session { stmts })
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn fmt_matrix(entries: &[Vec<Poly>]) -> String {
    let rows: Vec<String> = entries.iter().map(|r| format!("[{}]", join(r))).collect();
    format!("[{}]", rows.join(", "))
}

impl fmt::Display for IdealRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealRef::Name(n) => write!(f, "{n}"),
            IdealRef::Inline(g) => write!(f, "[{}]", join(g)),
        }
    }
}

fn fmt_fraction(num: &Poly, den: &Poly) -> String {
    let wrap = |p: &Poly| {
        if p.terms().len() > 1 {
            format!("({p})")
        } else {
            p.to_string()
        }
    };
    if den.is_one() {
        num.to_string()
    } else {
        format!("{}/{}", wrap(num), wrap(den))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Dim(x) => write!(f, "dim {x}"),
            Command::Ann(x) => write!(f, "ann {x}"),
            Command::Gb(x) => write!(f, "gb {x}"),
            Command::Small(x) => write!(f, "small {x}"),
            Command::Weq(x) => write!(f, "weq {x}"),
            Command::Zero(x) => write!(f, "zero {x}"),
            Command::Iso(x) => write!(f, "iso {x}"),
            Command::RoofComp(a, b) => write!(f, "roofcomp {a} {b}"),
            Command::RoofEq(a, b) => write!(f, "roofeq {a} {b}"),
            Command::RoofIso(a) => write!(f, "roofiso {a}"),
            Command::Minimal { module, prime } => write!(f, "minimal {module} P={prime}"),
            Command::SuppK(x) => write!(f, "suppk {x}"),
            Command::Pic(x) => write!(f, "pic {x}"),
            Command::Fitting { module, i } => write!(f, "fitting {module} i={i}"),
            Command::HomSec { f: a, g, j, n } => write!(f, "homsec {a} {g} J={j} n={n}"),
            Command::Filtration { module, ideal } => write!(f, "filtration {module} I={ideal}"),
            Command::Verify { witness, k } => write!(f, "verify {witness} k={k}"),
            Command::Transport { witness, module } => write!(f, "transport {witness} {module}"),
            Command::EquivCheck {
                witness,
                k,
                random,
                seed,
            } => {
                write!(f, "equivcheck {witness} k={k} random={random}")?;
                if let Some(s) = seed {
                    write!(f, " seed={s}")?;
                }
                Ok(())
            }
            Command::Act { autoeq, module } => write!(f, "act {autoeq} {module}"),
            Command::AutoLaw {
                first,
                second,
                module,
            } => write!(f, "autolaw {first} {second} {module}"),
        }
    }
}

impl fmt::Display for StmtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StmtKind::Ring {
                name,
                p,
                vars,
                order,
            } => write!(
                f,
                "ring {name} p={p} vars=[{}] order={}",
                vars.join(", "),
                order.name()
            ),
            StmtKind::Use(r) => write!(f, "use {r}"),
            StmtKind::Ideal { name, gens } => write!(f, "ideal {name} = [{}]", join(gens)),
            StmtKind::Module { name, def } => {
                write!(f, "module {name} = ")?;
                match def {
                    ModuleDef::Coker { entries, .. } => write!(f, "coker {}", fmt_matrix(entries)),
                    ModuleDef::Free(n) => write!(f, "free {n}"),
                    ModuleDef::Quotient(i) => write!(f, "quotient {i}"),
                    ModuleDef::Ideal(i) => write!(f, "ideal {i}"),
                    ModuleDef::Sum(a, b) => write!(f, "sum {a} {b}"),
                    ModuleDef::Tensor(a, b) => write!(f, "tensor {a} {b}"),
                }
            }
            StmtKind::Map {
                name,
                source,
                target,
                entries,
                ..
            } => write!(f, "map {name} : {source} -> {target} = {}", fmt_matrix(entries)),
            StmtKind::Algebra { name, gens } => write!(f, "algebra {name} = [{}]", join(gens)),
            StmtKind::Chart(a) => write!(f, "chart {a}"),
            StmtKind::Level(k) => write!(f, "level k={k}"),
            StmtKind::Prime { name, ideal } => write!(f, "prime {name} = {ideal}"),
            StmtKind::Roof { name, def } => {
                write!(f, "roof {name} = ")?;
                match def {
                    RoofDef::Span { apex, s, t } => write!(f, "{apex} {s} {t}"),
                    RoofDef::Map(m) => write!(f, "map {m}"),
                    RoofDef::Compose { outer, inner } => write!(f, "compose {outer} {inner}"),
                    RoofDef::Fraction { prime, num, den } => {
                        write!(f, "fraction {prime} [{num}] [{den}]")
                    }
                }
            }
            StmtKind::Witness {
                name,
                source,
                target,
                images,
                prime,
                target_prime,
            } => {
                let im: Vec<String> = images.iter().map(|(n, d)| fmt_fraction(n, d)).collect();
                write!(
                    f,
                    "witness {name} : {source} -> {target} images=[{}] P={prime} Q={target_prime}",
                    im.join(", ")
                )
            }
            StmtKind::AutoEq {
                name,
                witness,
                line,
            } => write!(f, "autoeq {name} = {witness} {line}"),
            StmtKind::Command(c) => write!(f, "{c}"),
        }
    }
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            writeln!(f, "{}", s.kind)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Session> {
        parse_session(text, &ParseDefaults::default())
    }

    #[test]
    fn ring_and_commands() {
        let s = parse("ring p=32003 vars=[x,y] order=grevlex\nideal I=[x^2-y]\ndim I\n").unwrap();
        assert_eq!(s.stmts.len(), 3);
        match &s.stmts[0].kind {
            StmtKind::Ring { vars, .. } => assert_eq!(vars.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(s.stmts[2].kind, StmtKind::Command(Command::Dim("I".into())));
    }

    #[test]
    fn parse_errors_point_at_the_token() {
        let err = parse("ring vars=[x]\nideal I=[x^^2]").unwrap_err();
        match err {
            Error::Parse { line, col, msg } => {
                assert_eq!(line, 2);
                assert_eq!(col, 11);
                assert!(msg.contains("^^"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("ring vars=[x]\ndim J"),
            Err(Error::Unresolved { line: 2, .. })
        ));
        assert!(matches!(parse("ring vars=[x]\nfoo"), Err(Error::Parse { line: 2, col: 1, .. })));
        assert!(parse("ideal I = [x]").is_err());
        assert!(parse("ring vars=[x]\nideal I = [x]\nideal I = [x]").is_err());
    }

    #[test]
    fn printing_round_trips() {
        let text = "\
ring R vars=[x, y]
ideal J = [x, y]
module F = free 1
module M = coker [[x, y], [y^2, 0]]
module Q = quotient J
map f : F -> Q = [[1]]
level k=1
prime P = [y]
roof r = map f
roof q = fraction P [x + 1] [x]
roof c = compose r r
minimal Q P=P
homsec F F J=[x, y] n=4
filtration Q I=J
algebra X = [y^2 - x^3]
prime PX = [y^2 - x^3]
ring S vars=[u]
algebra Y = []
prime QY = []
witness W : X -> Y images=[y/x] P=PX Q=QY
use R
equivcheck W k=1 random=5 seed=3
";
        let s = parse(text).unwrap();
        let printed = s.to_string();
        let again = parse(&printed).unwrap();
        assert_eq!(s, again);
        assert_eq!(again.to_string(), printed);
    }
}
