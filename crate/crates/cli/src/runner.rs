//! Executes a parsed session and builds the JSON report.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use codimcat::birgeom::{
    autoeq_apply, autoeq_compose, extend_local_iso, quotient_equiv_check, transport_module,
    verify_iso_witness, AffineAlgebra, AutoEq, IsoWitness,
};
use codimcat::fpmod::{annihilator, fitting_ideal, module_dim};
use codimcat::limits::{self, Limits};
use codimcat::serrequot::{
    hom_quotient_sections, ideal_power_filtration, is_minimal, is_small, is_weak_equivalence,
    is_zero_in_quotient, pic_member, roof_compose, roof_equal, roof_fraction, roof_is_iso,
    roof_is_zero, roof_make, supp_k, weq_dims, Chart, PrimeWitness, QuotientLevel, Roof,
};
use codimcat::{random, Error, FPModule, Ideal, Matrix, ModuleMap, MonomialOrder, Result, Ring};

use crate::session::{
    parse_session, Command, IdealRef, ModuleDef, ParseDefaults, RoofDef, Session, StmtKind,
};

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub prime: u64,
    pub order: MonomialOrder,
    pub limits: Limits,
    /// Worker threads for independent commands; 0 means one per core.
    pub jobs: usize,
    pub timing: bool,
    /// Seed for `equivcheck` commands that do not give one.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prime: codimcat::arith::DEFAULT_PRIME as u64,
            order: MonomialOrder::GrevLex,
            limits: Limits::default(),
            jobs: 0,
            timing: true,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn parse_defaults(&self) -> ParseDefaults {
        ParseDefaults {
            prime: self.prime,
            order: self.order,
        }
    }
}

/// A report together with whether it recorded any error.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub ok: bool,
}

impl Report {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone)]
enum Obj {
    Ring(Ring),
    Ideal(Ideal),
    Module(FPModule),
    Map(ModuleMap),
    Algebra(AffineAlgebra),
    Prime(PrimeWitness),
    Roof(Roof),
    Witness(IsoWitness),
    AutoEq(AutoEq),
}

/// What a command sees: the chart and level current at its line.
#[derive(Clone)]
struct Scope {
    chart: Option<Chart>,
    k: Option<i64>,
}

impl Scope {
    fn level(&self) -> Result<QuotientLevel> {
        let chart = self
            .chart
            .clone()
            .ok_or_else(|| Error::Structural("no ring declared".into()))?;
        let k = self
            .k
            .ok_or_else(|| Error::Structural("no level declared; add `level k=...`".into()))?;
        QuotientLevel::new(chart, k)
    }
}

struct Env {
    objs: HashMap<String, Obj>,
    failed: HashSet<String>,
}

fn error_entry(line: usize, cmd: &str, kind: &str, message: String) -> Value {
    json!({"line": line, "cmd": cmd, "kind": kind, "message": message})
}

impl Env {
    fn get(&self, name: &str) -> Result<&Obj> {
        if self.failed.contains(name) {
            return Err(Error::Structural(format!("`{name}` was not constructed")));
        }
        self.objs
            .get(name)
            .ok_or_else(|| Error::Structural(format!("`{name}` was not constructed")))
    }

    fn ring(&self, name: &str) -> Result<Ring> {
        match self.get(name)? {
            Obj::Ring(r) => Ok(r.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not a ring"))),
        }
    }

    fn ideal(&self, name: &str) -> Result<Ideal> {
        match self.get(name)? {
            Obj::Ideal(i) => Ok(i.clone()),
            Obj::Prime(p) => Ok(p.ideal().clone()),
            Obj::Algebra(a) => Ok(a.ideal().clone()),
            _ => Err(Error::Structural(format!("`{name}` is not an ideal"))),
        }
    }

    fn ideal_ref(&self, r: &IdealRef, ring: &Ring) -> Result<Ideal> {
        match r {
            IdealRef::Name(n) => self.ideal(n),
            IdealRef::Inline(g) => Ideal::new(ring, g.clone()),
        }
    }

    fn module(&self, name: &str) -> Result<FPModule> {
        match self.get(name)? {
            Obj::Module(m) => Ok(m.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not a module"))),
        }
    }

    fn map(&self, name: &str) -> Result<ModuleMap> {
        match self.get(name)? {
            Obj::Map(m) => Ok(m.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not a map"))),
        }
    }

    fn algebra(&self, name: &str) -> Result<AffineAlgebra> {
        match self.get(name)? {
            Obj::Algebra(a) => Ok(a.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not an algebra"))),
        }
    }

    fn prime(&self, name: &str) -> Result<PrimeWitness> {
        match self.get(name)? {
            Obj::Prime(p) => Ok(p.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not a prime"))),
        }
    }

    fn roof(&self, name: &str) -> Result<Roof> {
        match self.get(name)? {
            Obj::Roof(r) => Ok(r.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not a roof"))),
        }
    }

    fn witness(&self, name: &str) -> Result<IsoWitness> {
        match self.get(name)? {
            Obj::Witness(w) => Ok(w.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not a witness"))),
        }
    }

    fn autoeq(&self, name: &str) -> Result<AutoEq> {
        match self.get(name)? {
            Obj::AutoEq(e) => Ok(e.clone()),
            _ => Err(Error::Structural(format!("`{name}` is not an autoequivalence"))),
        }
    }
}

fn ideal_name(r: &IdealRef) -> Option<&str> {
    match r {
        IdealRef::Name(n) => Some(n.as_str()),
        IdealRef::Inline(_) => None,
    }
}

/// Names a statement reads.
fn dependencies(kind: &StmtKind) -> Vec<&str> {
    match kind {
        StmtKind::Ring { .. } | StmtKind::Ideal { .. } | StmtKind::Algebra { .. } | StmtKind::Level(_) => {
            vec![]
        }
        StmtKind::Use(r) | StmtKind::Chart(r) => vec![r],
        StmtKind::Module { def, .. } => match def {
            ModuleDef::Coker { .. } | ModuleDef::Free(_) => vec![],
            ModuleDef::Quotient(i) | ModuleDef::Ideal(i) => vec![i],
            ModuleDef::Sum(a, b) | ModuleDef::Tensor(a, b) => vec![a, b],
        },
        StmtKind::Map { source, target, .. } => vec![source, target],
        StmtKind::Prime { ideal, .. } => ideal_name(ideal).into_iter().collect(),
        StmtKind::Roof { def, .. } => match def {
            RoofDef::Span { apex, s, t } => vec![apex, s, t],
            RoofDef::Map(m) => vec![m],
            RoofDef::Compose { outer, inner } => vec![outer, inner],
            RoofDef::Fraction { prime, .. } => vec![prime],
        },
        StmtKind::Witness {
            source,
            target,
            prime,
            target_prime,
            ..
        } => vec![source, target, prime, target_prime],
        StmtKind::AutoEq { witness, line, .. } => vec![witness, line],
        StmtKind::Command(c) => match c {
            Command::Dim(x)
            | Command::Ann(x)
            | Command::Gb(x)
            | Command::Small(x)
            | Command::Weq(x)
            | Command::Zero(x)
            | Command::Iso(x)
            | Command::RoofIso(x)
            | Command::SuppK(x)
            | Command::Pic(x) => vec![x],
            Command::RoofComp(a, b) | Command::RoofEq(a, b) => vec![a, b],
            Command::Minimal { module, prime } => vec![module, prime],
            Command::Fitting { module, .. } => vec![module],
            Command::HomSec { f, g, j, .. } => {
                let mut v = vec![f.as_str(), g.as_str()];
                v.extend(ideal_name(j));
                v
            }
            Command::Filtration { module, ideal } => {
                let mut v = vec![module.as_str()];
                v.extend(ideal_name(ideal));
                v
            }
            Command::Verify { witness, .. } | Command::EquivCheck { witness, .. } => vec![witness],
            Command::Transport { witness, module } => vec![witness, module],
            Command::Act { autoeq, module } => vec![autoeq, module],
            Command::AutoLaw {
                first,
                second,
                module,
            } => vec![first, second, module],
        },
    }
}

fn declared_name(kind: &StmtKind) -> Option<&str> {
    match kind {
        StmtKind::Ring { name, .. }
        | StmtKind::Ideal { name, .. }
        | StmtKind::Module { name, .. }
        | StmtKind::Map { name, .. }
        | StmtKind::Algebra { name, .. }
        | StmtKind::Prime { name, .. }
        | StmtKind::Roof { name, .. }
        | StmtKind::Witness { name, .. }
        | StmtKind::AutoEq { name, .. } => Some(name),
        _ => None,
    }
}

fn on_chart(m: FPModule, scope: &Scope) -> Result<FPModule> {
    match &scope.chart {
        Some(c) if !c.ideal().is_zero() => m.on_chart(c.ideal()),
        _ => Ok(m),
    }
}

fn chart_ideal(scope: &Scope, ring: &Ring) -> Ideal {
    match &scope.chart {
        Some(c) if c.ring() == ring => c.ideal().clone(),
        _ => Ideal::zero(ring),
    }
}

fn declare(env: &Env, kind: &StmtKind, scope: &mut Scope) -> Result<Option<Obj>> {
    Ok(Some(match kind {
        StmtKind::Ring { p, vars, order, .. } => {
            let ring = Ring::new(*p, vars, *order)?;
            scope.chart = Some(Chart::affine(&ring));
            Obj::Ring(ring)
        }
        StmtKind::Use(r) => {
            scope.chart = Some(Chart::affine(&env.ring(r)?));
            return Ok(None);
        }
        StmtKind::Chart(a) => {
            scope.chart = Some(env.algebra(a)?.chart()?);
            return Ok(None);
        }
        StmtKind::Level(k) => {
            scope.k = Some(*k);
            if let Some(c) = &scope.chart {
                QuotientLevel::new(c.clone(), *k)?;
            }
            return Ok(None);
        }
        StmtKind::Ideal { gens, .. } => {
            let ring = current_ring(scope, gens.first().map(|g| g.ring()))?;
            Obj::Ideal(Ideal::new(&ring, gens.clone())?)
        }
        StmtKind::Algebra { gens, .. } => {
            let ring = current_ring(scope, gens.first().map(|g| g.ring()))?;
            Obj::Algebra(AffineAlgebra::new(Ideal::new(&ring, gens.clone())?)?)
        }
        StmtKind::Module { def, .. } => {
            let ring = current_ring(scope, None)?;
            let m = match def {
                ModuleDef::Coker { rows, entries } => {
                    let cols = entries.first().map(|r| r.len()).unwrap_or(0);
                    on_chart(
                        FPModule::new(Matrix::from_rows(&ring, *rows, cols, entries.clone())?),
                        scope,
                    )?
                }
                ModuleDef::Free(n) => on_chart(FPModule::free(&ring, *n), scope)?,
                ModuleDef::Quotient(i) => {
                    let i = env.ideal(i)?;
                    FPModule::cyclic(&i.sum(&chart_ideal(scope, i.ring()))?)
                }
                ModuleDef::Ideal(i) => on_chart(FPModule::from_ideal(&env.ideal(i)?)?, scope)?,
                ModuleDef::Sum(a, b) => env.module(a)?.direct_sum(&env.module(b)?),
                ModuleDef::Tensor(a, b) => env.module(a)?.tensor(&env.module(b)?)?,
            };
            Obj::Module(m)
        }
        StmtKind::Map {
            source,
            target,
            rows,
            entries,
            ..
        } => {
            let s = env.module(source)?;
            let t = env.module(target)?;
            let cols = entries.first().map(|r| r.len()).unwrap_or(0);
            let mat = Matrix::from_rows(s.ring(), *rows, cols, entries.clone())?;
            Obj::Map(ModuleMap::new(&s, &t, mat)?)
        }
        StmtKind::Prime { ideal, .. } => {
            let ring = current_ring(scope, None)?;
            let i = env.ideal_ref(ideal, &ring)?;
            let i = i.sum(&chart_ideal(scope, i.ring()))?;
            Obj::Prime(PrimeWitness::new(i)?)
        }
        StmtKind::Roof { def, .. } => {
            let r = match def {
                RoofDef::Span { apex, s, t } => {
                    roof_make(&env.module(apex)?, &env.map(s)?, &env.map(t)?, &scope.level()?)?
                }
                RoofDef::Map(m) => Roof::from_map(&env.map(m)?, &scope.level()?),
                RoofDef::Compose { outer, inner } => roof_compose(&env.roof(outer)?, &env.roof(inner)?)?,
                RoofDef::Fraction { prime, num, den } => {
                    roof_fraction(&env.prime(prime)?, num, den, &scope.level()?)?
                }
            };
            Obj::Roof(r)
        }
        StmtKind::Witness {
            source,
            target,
            images,
            prime,
            target_prime,
            ..
        } => Obj::Witness(extend_local_iso(
            &env.algebra(source)?,
            &env.algebra(target)?,
            images,
            &env.prime(prime)?,
            &env.prime(target_prime)?,
        )?),
        StmtKind::AutoEq { witness, line, .. } => {
            let w = env.witness(witness)?;
            let k = scope
                .k
                .ok_or_else(|| Error::Structural("no level declared; add `level k=...`".into()))?;
            let level = w.source_level(k)?;
            Obj::AutoEq(AutoEq::new(w, env.module(line)?, &level)?)
        }
        StmtKind::Command(_) => return Ok(None),
    }))
}

fn current_ring(scope: &Scope, hint: Option<&Ring>) -> Result<Ring> {
    if let Some(r) = hint {
        return Ok(r.clone());
    }
    scope
        .chart
        .as_ref()
        .map(|c| c.ring().clone())
        .ok_or_else(|| Error::Structural("no ring declared".into()))
}

pub fn anchor(cmd: &Command) -> &'static str {
    match cmd {
        Command::Dim(_) | Command::Ann(_) | Command::Gb(_) | Command::Fitting { .. } => "plumbing",
        Command::Small(_) => "Serre subcategory of small modules",
        Command::Weq(_) | Command::Zero(_) | Command::Iso(_) => "weak equivalences",
        Command::RoofComp(..) | Command::RoofEq(..) | Command::RoofIso(_) => "roof calculus",
        Command::Minimal { .. } => "minimal objects",
        Command::SuppK(_) => "topological k-support",
        Command::Pic(_) => "line bundles away from small loci",
        Command::HomSec { .. } => "quotient Hom sections",
        Command::Filtration { .. } => "ideal-power filtration",
        Command::Verify { .. } | Command::Transport { .. } | Command::EquivCheck { .. } => {
            "isomorphism outside dimension k-1"
        }
        Command::Act { .. } | Command::AutoLaw { .. } => {
            "autoequivalences from automorphisms and line bundles"
        }
    }
}

fn gb_strings(i: &Ideal) -> Result<Vec<String>> {
    Ok(i.groebner_basis()?.iter().map(|g| g.to_string()).collect())
}

fn verdict(b: bool) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("verdict".into(), Value::Bool(b));
    m
}

fn object(s: String) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("object".into(), Value::String(s));
    m
}

fn execute(env: &Env, cmd: &Command, scope: &Scope, seed: u64) -> Result<Map<String, Value>> {
    Ok(match cmd {
        Command::Dim(x) => {
            let d = match env.get(x)? {
                Obj::Module(m) => module_dim(m)?,
                Obj::Ideal(i) => i.krull_dim()?,
                Obj::Prime(p) => p.dim(),
                Obj::Algebra(a) => a.dim()?,
                _ => return Err(Error::Structural(format!("`{x}` has no dimension"))),
            };
            let mut m = Map::new();
            m.insert("dim".into(), json!(d));
            m
        }
        Command::Ann(x) => object(format!("({})", gb_strings(&annihilator(&env.module(x)?)?)?.join(", "))),
        Command::Gb(x) => {
            let mut m = Map::new();
            m.insert("gb".into(), json!(gb_strings(&env.ideal(x)?)?));
            m
        }
        Command::Fitting { module, i } => {
            object(format!("({})", gb_strings(&fitting_ideal(&env.module(module)?, *i)?)?.join(", ")))
        }
        Command::Small(x) => verdict(is_small(&env.module(x)?, &scope.level()?)?),
        Command::Weq(f) => {
            let phi = env.map(f)?;
            let level = scope.level()?;
            let (kd, cd) = weq_dims(&phi)?;
            let mut m = verdict(is_weak_equivalence(&phi, &level)?);
            m.insert("ker_dim".into(), json!(kd));
            m.insert("coker_dim".into(), json!(cd));
            m
        }
        Command::Zero(f) => verdict(is_zero_in_quotient(&env.map(f)?, &scope.level()?)?),
        Command::Iso(f) => verdict(roof_is_iso(&Roof::from_map(&env.map(f)?, &scope.level()?))?),
        Command::RoofComp(a, b) => {
            let r = roof_compose(&env.roof(a)?, &env.roof(b)?)?;
            let mut m = object(r.apex().render()?);
            m.insert("zero".into(), json!(roof_is_zero(&r)?));
            m.insert("iso".into(), json!(roof_is_iso(&r)?));
            m
        }
        Command::RoofEq(a, b) => verdict(roof_equal(&env.roof(a)?, &env.roof(b)?)?),
        Command::RoofIso(r) => verdict(roof_is_iso(&env.roof(r)?)?),
        Command::Minimal { module, prime } => {
            verdict(is_minimal(&env.module(module)?, &scope.level()?, &env.prime(prime)?)?)
        }
        Command::SuppK(x) => {
            let prof = supp_k(&env.module(x)?, &scope.level()?)?;
            let strata: Vec<Value> = prof
                .entries
                .iter()
                .map(|(d, i)| Ok(json!({"dim": d, "ideal": gb_strings(i)?})))
                .collect::<Result<_>>()?;
            let mut m = Map::new();
            m.insert("strata".into(), Value::Array(strata));
            m
        }
        Command::Pic(x) => verdict(pic_member(&env.module(x)?, &scope.level()?)?),
        Command::HomSec { f, g, j, n } => {
            let fm = env.module(f)?;
            let j = env.ideal_ref(j, fm.ring())?;
            let hs = hom_quotient_sections(&fm, &env.module(g)?, &scope.level()?, &j, *n)?;
            let mut m = Map::new();
            m.insert("stabilized".into(), json!(hs.stabilized));
            m.insert("sections".into(), json!(hs.module.render()?));
            m.insert("n_stop".into(), json!(hs.n_stop));
            m
        }
        Command::Filtration { module, ideal } => {
            let mm = env.module(module)?;
            let i = env.ideal_ref(ideal, mm.ring())?;
            let layers = ideal_power_filtration(&mm, &i)?
                .iter()
                .map(|l| l.render())
                .collect::<Result<Vec<_>>>()?;
            let mut m = Map::new();
            m.insert("layers".into(), json!(layers));
            m
        }
        Command::Verify { witness, k } => {
            let w = env.witness(witness)?;
            let (ok, reason) = verify_iso_witness(&w, *k);
            let mut m = Map::new();
            m.insert("verify".into(), json!(ok));
            m.insert("k".into(), json!(k));
            m.insert("reason".into(), json!(reason));
            m.insert("witness".into(), json!(w.render()));
            m
        }
        Command::Transport { witness, module } => {
            object(transport_module(&env.witness(witness)?, &env.module(module)?)?.render()?)
        }
        Command::EquivCheck {
            witness,
            k,
            random: count,
            seed: s,
        } => {
            let w = env.witness(witness)?;
            let mut rng = random::rng(s.unwrap_or(seed));
            let chart = w.source().ideal().clone();
            let sample: Vec<ModuleMap> =
                (0..*count).map(|_| random::chart_map(&chart, &mut rng, 2)).collect();
            let rep = quotient_equiv_check(&w, *k, &sample)?;
            let mut m = verdict(rep.disagreements.is_empty());
            m.insert("checked".into(), json!(rep.checked));
            m.insert("disagreements".into(), json!(rep.disagreements));
            m
        }
        Command::Act { autoeq, module } => {
            object(autoeq_apply(&env.autoeq(autoeq)?, &env.module(module)?)?.render()?)
        }
        Command::AutoLaw {
            first,
            second,
            module,
        } => {
            let e1 = env.autoeq(first)?;
            let e2 = env.autoeq(second)?;
            let mm = env.module(module)?;
            let k = scope
                .k
                .ok_or_else(|| Error::Structural("no level declared; add `level k=...`".into()))?;
            let level = e1.witness().source_level(k)?;
            let composed = autoeq_compose(&e1, &e2, &level)?;
            let lhs = autoeq_apply(&composed, &mm)?;
            let rhs = autoeq_apply(&e1, &autoeq_apply(&e2, &mm)?)?;
            verdict(same_in_quotient(&lhs, &rhs, &e1.witness().target_level(k)?)?)
        }
    })
}

/// Whether the identity on generators is a well-defined weak equivalence
/// from `a` to `b`.
pub fn same_in_quotient(a: &FPModule, b: &FPModule, level: &QuotientLevel) -> Result<bool> {
    if a.ngens() != b.ngens() {
        return Ok(false);
    }
    match ModuleMap::new(a, b, Matrix::identity(a.ring(), a.ngens())) {
        Ok(phi) => is_weak_equivalence(&phi, level),
        Err(Error::NotWellDefined(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

struct Pending<'a> {
    line: usize,
    cmd: &'a Command,
    scope: Scope,
    blocked: Option<String>,
}

pub fn run_text(text: &str, config: &RunConfig) -> Report {
    match parse_session(text, &config.parse_defaults()) {
        Ok(s) => run_session(&s, config),
        Err(e) => {
            let line = match &e {
                Error::Parse { line, .. } | Error::Unresolved { line, .. } => *line,
                _ => 0,
            };
            let col = match &e {
                Error::Parse { col, .. } => Some(*col),
                _ => None,
            };
            let mut entry = error_entry(line, "", e.kind(), e.to_string());
            if let Some(c) = col {
                entry["col"] = json!(c);
            }
            Report {
                json: json!({"ring": null, "results": [], "errors": [entry]}),
                ok: false,
            }
        }
    }
}

pub fn run_session(session: &Session, config: &RunConfig) -> Report {
    limits::set(config.limits);
    let mut env = Env {
        objs: HashMap::new(),
        failed: HashSet::new(),
    };
    let mut scope = Scope { chart: None, k: None };
    let mut errors: Vec<(usize, Value)> = Vec::new();
    let mut pending: Vec<Pending> = Vec::new();
    let mut first_ring: Option<Value> = None;

    for stmt in &session.stmts {
        let text = stmt.kind.to_string();
        let blocked = dependencies(&stmt.kind)
            .into_iter()
            .find(|d| env.failed.contains(*d))
            .map(|d| format!("depends on `{d}`, which failed"));
        if let StmtKind::Command(cmd) = &stmt.kind {
            pending.push(Pending {
                line: stmt.line,
                cmd,
                scope: scope.clone(),
                blocked,
            });
            continue;
        }
        let name = declared_name(&stmt.kind);
        if let Some(msg) = blocked {
            errors.push((stmt.line, error_entry(stmt.line, &text, "dependency", msg)));
            if let Some(n) = name {
                env.failed.insert(n.to_string());
            }
            continue;
        }
        match declare(&env, &stmt.kind, &mut scope) {
            Ok(Some(obj)) => {
                if let (Obj::Ring(r), None) = (&obj, &first_ring) {
                    first_ring = Some(json!({
                        "p": r.modulus(),
                        "vars": r.var_names(),
                        "order": r.order().name(),
                    }));
                }
                env.objs.insert(name.expect("objects have names").to_string(), obj);
            }
            Ok(None) => {}
            Err(e) => {
                errors.push((stmt.line, error_entry(stmt.line, &text, e.kind(), e.to_string())));
                if let Some(n) = name {
                    env.failed.insert(n.to_string());
                }
            }
        }
    }

    let run_one = |p: &Pending| -> std::result::Result<Value, Value> {
        let text = p.cmd.to_string();
        if let Some(msg) = &p.blocked {
            return Err(error_entry(p.line, &text, "dependency", msg.clone()));
        }
        let start = Instant::now();
        match execute(&env, p.cmd, &p.scope, config.seed) {
            Ok(mut fields) => {
                fields.insert("cmd".into(), json!(text));
                fields.insert("anchor".into(), json!(anchor(p.cmd)));
                fields.insert("line".into(), json!(p.line));
                if config.timing {
                    fields.insert("ms".into(), json!(start.elapsed().as_millis() as u64));
                }
                Ok(Value::Object(fields))
            }
            Err(e) => Err(error_entry(p.line, &text, e.kind(), e.to_string())),
        }
    };
    let outcomes: Vec<std::result::Result<Value, Value>> = match rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
    {
        Ok(pool) => pool.install(|| pending.par_iter().map(run_one).collect()),
        Err(_) => pending.iter().map(run_one).collect(),
    };

    let mut results = Vec::new();
    for (p, o) in pending.iter().zip(outcomes) {
        match o {
            Ok(v) => results.push(v),
            Err(e) => errors.push((p.line, e)),
        }
    }
    errors.sort_by_key(|(l, _)| *l);
    let ok = errors.is_empty();
    Report {
        json: json!({
            "ring": first_ring.unwrap_or(Value::Null),
            "results": results,
            "errors": errors.into_iter().map(|(_, e)| e).collect::<Vec<_>>(),
        }),
        ok,
    }
}
