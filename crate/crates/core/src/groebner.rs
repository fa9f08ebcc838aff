//! Gröbner bases of ideals and of submodules of free modules, together with
//! the ideal arithmetic built on them.
//!
//! Submodules of `R^n` use position-over-term: a lower component index is
//! larger, ties broken by the ring's monomial order.

use std::cmp::Ordering;
use std::sync::OnceLock;
use std::time::Instant;

use crate::arith::{inv_mod, mul_mod, neg_mod, sub_mod, Monomial, MonomialOrder, Poly, Ring};
use crate::error::{Error, Result};
use crate::limits;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Term {
    pub mono: Monomial,
    pub comp: u32,
    pub coeff: u32,
}

/// Sparse vector, terms strictly descending in the module order.
pub(crate) type Vect = Vec<Term>;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Ctx {
    pub p: u32,
    pub ord: MonomialOrder,
    /// Components below `split` dominate the others; inside each block
    /// the monomial is compared first, then the position.
    pub split: u32,
}

impl Ctx {
    /// Term over position. Position over term makes degrees explode on
    /// modules of rank above one.
    pub fn of(ring: &Ring) -> Ctx {
        Ctx {
            p: ring.modulus(),
            ord: ring.order(),
            split: 0,
        }
    }

    /// The block order used for augmented vectors `[g | e]` with `g` of
    /// rank `n`.
    fn augmented(ring: &Ring, n: usize) -> Ctx {
        Ctx {
            split: n as u32,
            ..Ctx::of(ring)
        }
    }

    #[inline]
    fn cmp(&self, am: &Monomial, ac: u32, bm: &Monomial, bc: u32) -> Ordering {
        match (bc >= self.split).cmp(&(ac >= self.split)) {
            Ordering::Equal => self.ord.compare(am, bm).then_with(|| bc.cmp(&ac)),
            o => o,
        }
    }

    #[inline]
    fn cmp_terms(&self, a: &Term, b: &Term) -> Ordering {
        self.cmp(&a.mono, a.comp, &b.mono, b.comp)
    }
}

/// `a - c * q * g`
fn sub_scaled(a: &[Term], c: u32, q: &Monomial, g: &[Term], ctx: Ctx) -> Vect {
    let p = ctx.p;
    let mut out = Vec::with_capacity(a.len() + g.len());
    let mut i = 0;
    let mut shifted = g.iter().map(|t| Term {
        mono: t.mono.mul(q),
        comp: t.comp,
        coeff: neg_mod(mul_mod(t.coeff, c, p), p),
    });
    let mut next = shifted.next();
    while let Some(b) = next.take() {
        if i >= a.len() {
            out.push(b);
            out.extend(shifted.by_ref());
            break;
        }
        match ctx.cmp_terms(&a[i], &b) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
                next = Some(b);
            }
            Ordering::Less => {
                out.push(b);
                next = shifted.next();
            }
            Ordering::Equal => {
                let s = sub_mod(a[i].coeff, neg_mod(b.coeff, p), p);
                if s != 0 {
                    out.push(Term {
                        mono: b.mono,
                        comp: b.comp,
                        coeff: s,
                    });
                }
                i += 1;
                next = shifted.next();
            }
        }
    }
    if i < a.len() {
        out.extend(a[i..].iter().cloned());
    }
    out
}

fn mul_term(g: &[Term], q: &Monomial) -> Vect {
    g.iter()
        .map(|t| Term {
            mono: t.mono.mul(q),
            comp: t.comp,
            coeff: t.coeff,
        })
        .collect()
}

fn make_monic(v: &mut Vect, p: u32) {
    if let Some(first) = v.first() {
        if first.coeff != 1 {
            let inv = inv_mod(first.coeff, p);
            for t in v.iter_mut() {
                t.coeff = mul_mod(t.coeff, inv, p);
            }
        }
    }
}

/// Full reduction against the basis elements selected by `mask`; the first
/// divisor in sequence is always used.
fn reduce_full(v: Vect, basis: &[Vect], mask: Option<&[bool]>, ctx: Ctx) -> Vect {
    let mut cur = v;
    let mut off = 0;
    let mut out = Vec::new();
    while off < cur.len() {
        let lt = &cur[off];
        let divisor = basis.iter().enumerate().find(|(k, g)| {
            mask.map_or(true, |m| m[*k])
                && g[0].comp == lt.comp
                && g[0].mono.divides(&lt.mono)
        });
        match divisor {
            Some((_, g)) => {
                let q = lt.mono.div(&g[0].mono).expect("divisibility checked");
                let c = mul_mod(lt.coeff, inv_mod(g[0].coeff, ctx.p), ctx.p);
                cur = sub_scaled(&cur[off..], c, &q, g, ctx);
                off = 0;
            }
            None => {
                out.push(cur[off].clone());
                off += 1;
            }
        }
    }
    out
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    comp: u32,
}

struct Engine {
    ctx: Ctx,
    ideal_mode: bool,
    gs: Vec<Vect>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    limits: limits::Limits,
    start: Instant,
}

impl Engine {
    fn check(&self) -> Result<()> {
        if self.start.elapsed() > self.limits.timeout {
            return Err(Error::ResourceExceeded(format!(
                "Gröbner basis timeout after {:?}",
                self.limits.timeout
            )));
        }
        if self.gs.len() > self.limits.max_basis {
            return Err(Error::ResourceExceeded(format!(
                "basis size exceeds {}",
                self.limits.max_basis
            )));
        }
        if self.pairs.len() > 50 * self.limits.max_basis {
            return Err(Error::ResourceExceeded("pair queue too long".into()));
        }
        Ok(())
    }

    fn insert(&mut self, mut h: Vect) -> Result<()> {
        make_monic(&mut h, self.ctx.p);
        // Cofactor blocks are not guarded; their degrees follow the reduction history.
        let split = self.ctx.split;
        let deg = h
            .iter()
            .filter(|t| split == 0 || t.comp < split)
            .map(|t| t.mono.degree())
            .max()
            .unwrap_or(0);
        if deg > self.limits.max_degree {
            return Err(Error::ResourceExceeded(format!(
                "basis element of degree {deg} exceeds the bound {}",
                self.limits.max_degree
            )));
        }
        let hi = self.gs.len();
        let hl = h[0].clone();
        self.gs.push(h);
        self.active.push(true);

        let coprime = |gs: &Vec<Vect>, p: &Pair, ideal_mode: bool| {
            ideal_mode && gs[p.i][0].mono.is_coprime(&hl.mono)
        };
        let mut c: Vec<Pair> = (0..hi)
            .filter(|&i| self.active[i] && self.gs[i][0].comp == hl.comp)
            .map(|i| Pair {
                i,
                j: hi,
                lcm: self.gs[i][0].mono.lcm(&hl.mono),
                comp: hl.comp,
            })
            .collect();
        let mut d: Vec<Pair> = Vec::new();
        while let Some(p) = c.pop() {
            if coprime(&self.gs, &p, self.ideal_mode)
                || (!c.iter().any(|q| q.lcm.divides(&p.lcm))
                    && !d.iter().any(|q| q.lcm.divides(&p.lcm)))
            {
                d.push(p);
            }
        }
        d.retain(|p| !coprime(&self.gs, p, self.ideal_mode));

        let gs = &self.gs;
        self.pairs.retain(|p| {
            !(p.comp == hl.comp
                && hl.mono.divides(&p.lcm)
                && gs[p.i][0].mono.lcm(&hl.mono) != p.lcm
                && gs[p.j][0].mono.lcm(&hl.mono) != p.lcm)
        });
        self.pairs.extend(d);

        for i in 0..hi {
            if self.active[i] && self.gs[i][0].comp == hl.comp && hl.mono.divides(&self.gs[i][0].mono)
            {
                self.active[i] = false;
            }
        }
        Ok(())
    }

    fn select(&self) -> usize {
        let ctx = self.ctx;
        let mut best = 0;
        for k in 1..self.pairs.len() {
            let (a, b) = (&self.pairs[k], &self.pairs[best]);
            let o = a
                .lcm
                .degree()
                .cmp(&b.lcm.degree())
                .then_with(|| ctx.cmp(&a.lcm, a.comp, &b.lcm, b.comp));
            if o == Ordering::Less {
                best = k;
            }
        }
        best
    }

    fn spoly(&self, p: &Pair) -> Vect {
        let (gi, gj) = (&self.gs[p.i], &self.gs[p.j]);
        let qi = p.lcm.div(&gi[0].mono).unwrap();
        let qj = p.lcm.div(&gj[0].mono).unwrap();
        sub_scaled(&mul_term(gi, &qi), 1, &qj, gj, self.ctx)
    }
}

fn spoly_of(a: &[Term], b: &[Term], ctx: Ctx) -> Option<Vect> {
    if a[0].comp != b[0].comp {
        return None;
    }
    let l = a[0].mono.lcm(&b[0].mono);
    let qa = l.div(&a[0].mono).unwrap();
    let qb = l.div(&b[0].mono).unwrap();
    let ca = inv_mod(a[0].coeff, ctx.p);
    let cb = inv_mod(b[0].coeff, ctx.p);
    let sa: Vect = mul_term(a, &qa)
        .into_iter()
        .map(|mut t| {
            t.coeff = mul_mod(t.coeff, ca, ctx.p);
            t
        })
        .collect();
    Some(sub_scaled(&sa, cb, &qb, b, ctx))
}

/// True when every S-vector of `basis` reduces to zero.
pub(crate) fn is_groebner(basis: &[Vect], ctx: Ctx) -> bool {
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            if let Some(s) = spoly_of(&basis[i], &basis[j], ctx) {
                if !reduce_full(s, basis, None, ctx).is_empty() {
                    return false;
                }
            }
        }
    }
    true
}

/// Reduced Gröbner basis, sorted by descending leading term.
pub(crate) fn groebner(input: Vec<Vect>, ctx: Ctx, ideal_mode: bool) -> Result<Vec<Vect>> {
    groebner_opts(input, ctx, ideal_mode, false)
}

/// With `cofactors_only`, elements whose leading term lies in the block
/// at or above `ctx.split` are discarded: the rest is a basis of the
/// leading block together with cofactors, which is all a lifter needs.
fn groebner_opts(input: Vec<Vect>, ctx: Ctx, ideal_mode: bool, cofactors_only: bool) -> Result<Vec<Vect>> {
    let keep = |h: &Vect| !cofactors_only || h[0].comp < ctx.split;
    let mut input: Vec<Vect> = input.into_iter().filter(|v| !v.is_empty()).collect();
    input.sort_by(|a, b| ctx.cmp_terms(&a[0], &b[0]));
    let mut e = Engine {
        ctx,
        ideal_mode,
        gs: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        limits: limits::current(),
        start: Instant::now(),
    };
    for v in input {
        e.check()?;
        let h = reduce_full(v, &e.gs, Some(&e.active), ctx);
        if !h.is_empty() && keep(&h) {
            e.insert(h)?;
        }
    }
    while !e.pairs.is_empty() {
        e.check()?;
        let k = e.select();
        let pair = e.pairs.swap_remove(k);
        let s = e.spoly(&pair);
        let h = reduce_full(s, &e.gs, Some(&e.active), ctx);
        if !h.is_empty() && keep(&h) {
            e.insert(h)?;
        }
    }

    let mut basis: Vec<Vect> = e
        .gs
        .into_iter()
        .zip(e.active)
        .filter_map(|(g, a)| a.then_some(g))
        .collect();
    basis.sort_by(|a, b| ctx.cmp_terms(&b[0], &a[0]));
    for i in 0..basis.len() {
        let mut mask = vec![true; basis.len()];
        mask[i] = false;
        let lead = basis[i][0].clone();
        let tail = reduce_full(basis[i][1..].to_vec(), &basis, Some(&mask), ctx);
        let mut r = vec![lead];
        r.extend(tail);
        basis[i] = r;
    }
    debug_assert!(cofactors_only || basis.len() > 40 || is_groebner(&basis, ctx));
    Ok(basis)
}

pub(crate) fn poly_to_vect(f: &Poly) -> Vect {
    f.terms()
        .iter()
        .map(|(m, c)| Term {
            mono: m.clone(),
            comp: 0,
            coeff: *c,
        })
        .collect()
}

pub(crate) fn vect_to_poly(ring: &Ring, v: &[Term]) -> Poly {
    Poly::from_sorted(ring, v.iter().map(|t| (t.mono.clone(), t.coeff)).collect())
}

/// An element of the free module `R^n`.
#[derive(Clone, PartialEq, Eq)]
pub struct FreeVector {
    ring: Ring,
    comps: Vec<Poly>,
}

impl std::fmt::Debug for FreeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for FreeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.comps.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl FreeVector {
    pub fn new(ring: &Ring, comps: Vec<Poly>) -> Result<FreeVector> {
        for c in &comps {
            ring.check_same(c.ring())?;
        }
        Ok(FreeVector {
            ring: ring.clone(),
            comps,
        })
    }

    pub fn zero(ring: &Ring, n: usize) -> FreeVector {
        FreeVector {
            ring: ring.clone(),
            comps: vec![ring.zero(); n],
        }
    }

    pub fn unit(ring: &Ring, n: usize, i: usize) -> FreeVector {
        let mut v = Self::zero(ring, n);
        v.comps[i] = ring.one();
        v
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn into_comps(self) -> Vec<Poly> {
        self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &FreeVector) -> FreeVector {
        assert_eq!(self.rank(), o.rank());
        FreeVector {
            ring: self.ring.clone(),
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &FreeVector) -> FreeVector {
        assert_eq!(self.rank(), o.rank());
        FreeVector {
            ring: self.ring.clone(),
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, f: &Poly) -> FreeVector {
        FreeVector {
            ring: self.ring.clone(),
            comps: self.comps.iter().map(|a| a * f).collect(),
        }
    }

    /// Terms in descending term-over-position order.
    pub(crate) fn to_vect(&self) -> Vect {
        let mut out = Vec::new();
        for (i, f) in self.comps.iter().enumerate() {
            out.extend(f.terms().iter().map(|(m, c)| Term {
                mono: m.clone(),
                comp: i as u32,
                coeff: *c,
            }));
        }
        let ctx = Ctx::of(&self.ring);
        out.sort_by(|a, b| ctx.cmp_terms(b, a));
        out
    }

    pub(crate) fn from_vect(ring: &Ring, n: usize, v: &[Term]) -> FreeVector {
        let mut buckets: Vec<Vec<(Monomial, u32)>> = vec![Vec::new(); n];
        for t in v {
            buckets[t.comp as usize].push((t.mono.clone(), t.coeff));
        }
        FreeVector {
            ring: ring.clone(),
            comps: buckets.into_iter().map(|b| Poly::from_sorted(ring, b)).collect(),
        }
    }
}

/// Division remainder of `f` by `g` in the given sequence.
pub fn normal_form(f: &Poly, g: &[Poly]) -> Result<Poly> {
    for h in g {
        f.ring().check_same(h.ring())?;
    }
    let basis: Vec<Vect> = g.iter().filter(|h| !h.is_zero()).map(poly_to_vect).collect();
    let r = reduce_full(poly_to_vect(f), &basis, None, Ctx::of(f.ring()));
    Ok(vect_to_poly(f.ring(), &r))
}

/// Division remainder of a vector by a sequence of vectors.
pub fn normal_form_vector(f: &FreeVector, g: &[FreeVector]) -> Result<FreeVector> {
    for h in g {
        f.ring().check_same(h.ring())?;
        if h.rank() != f.rank() {
            return Err(Error::Structural(format!(
                "rank {} vs {}",
                h.rank(),
                f.rank()
            )));
        }
    }
    let basis: Vec<Vect> = g.iter().filter(|h| !h.is_zero()).map(|h| h.to_vect()).collect();
    let r = reduce_full(f.to_vect(), &basis, None, Ctx::of(f.ring()));
    Ok(FreeVector::from_vect(f.ring(), f.rank(), &r))
}

/// An ideal of a polynomial ring with a lazily computed reduced Gröbner basis.
pub struct Ideal {
    ring: Ring,
    gens: Vec<Poly>,
    gb: OnceLock<Vec<Poly>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Ideal {
        let gb = OnceLock::new();
        if let Some(g) = self.gb.get() {
            let _ = gb.set(g.clone());
        }
        Ideal {
            ring: self.ring.clone(),
            gens: self.gens.clone(),
            gb,
        }
    }
}

impl std::fmt::Debug for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Ideal {
    pub fn new(ring: &Ring, gens: Vec<Poly>) -> Result<Ideal> {
        for g in &gens {
            ring.check_same(g.ring())?;
        }
        Ok(Ideal {
            ring: ring.clone(),
            gens: gens.into_iter().filter(|g| !g.is_zero()).collect(),
            gb: OnceLock::new(),
        })
    }

    pub fn zero(ring: &Ring) -> Ideal {
        Ideal::new(ring, Vec::new()).unwrap()
    }

    pub fn unit(ring: &Ring) -> Ideal {
        Ideal::new(ring, vec![ring.one()]).unwrap()
    }

    pub fn parse(ring: &Ring, gens: &[&str]) -> Result<Ideal> {
        let polys = gens.iter().map(|g| ring.parse_poly(g)).collect::<Result<Vec<_>>>()?;
        Ideal::new(ring, polys)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    /// The reduced Gröbner basis in the ring's order.
    pub fn groebner_basis(&self) -> Result<&[Poly]> {
        if let Some(g) = self.gb.get() {
            return Ok(g);
        }
        let ctx = Ctx::of(&self.ring);
        let basis = groebner(self.gens.iter().map(poly_to_vect).collect(), ctx, true)?;
        let polys = basis.iter().map(|v| vect_to_poly(&self.ring, v)).collect();
        let _ = self.gb.set(polys);
        Ok(self.gb.get().unwrap())
    }

    pub fn reduce(&self, f: &Poly) -> Result<Poly> {
        self.ring.check_same(f.ring())?;
        normal_form(f, self.groebner_basis()?)
    }

    pub fn contains(&self, f: &Poly) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.groebner_basis()?.iter().any(|g| g.is_constant()))
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_subset_of(&self, other: &Ideal) -> Result<bool> {
        self.ring.check_same(&other.ring)?;
        for g in &self.gens {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality as ideals, by comparing reduced Gröbner bases.
    pub fn same_as(&self, other: &Ideal) -> Result<bool> {
        self.ring.check_same(&other.ring)?;
        Ok(self.groebner_basis()? == other.groebner_basis()?)
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.ring.check_same(&other.ring)?;
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        Ideal::new(&self.ring, g)
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.ring.check_same(&other.ring)?;
        let mut g: Vec<Poly> = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                let ab = a * b;
                if !g.contains(&ab) {
                    g.push(ab);
                }
            }
        }
        Ideal::new(&self.ring, g)
    }

    pub fn power(&self, n: u32) -> Result<Ideal> {
        let mut acc = Ideal::unit(&self.ring);
        for _ in 0..n {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// Image of the ideal under the variable embedding `var_map`.
    pub fn map_vars(&self, target: &Ring, var_map: &[usize]) -> Ideal {
        Ideal::new(
            target,
            self.gens.iter().map(|g| g.map_vars(target, var_map)).collect(),
        )
        .unwrap()
    }

    /// `I ∩ J` via `t I + (1 - t) J` and elimination of `t`.
    pub fn intersect(&self, other: &Ideal) -> Result<Ideal> {
        self.ring.check_same(&other.ring)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Ideal::zero(&self.ring));
        }
        let (big, map) = self.ring.extend(&["t"], true, MonomialOrder::Elim(1));
        let t = big.var(0);
        let one_minus_t = &big.one() - &t;
        let mut gens: Vec<Poly> = self.gens.iter().map(|g| &t * &g.map_vars(&big, &map)).collect();
        gens.extend(other.gens.iter().map(|g| &one_minus_t * &g.map_vars(&big, &map)));
        let gb = Ideal::new(&big, gens)?.groebner_basis()?.to_vec();
        let back: Vec<usize> = std::iter::once(0).chain(0..self.ring.nvars()).collect();
        let kept = gb
            .into_iter()
            .filter(|g| g.degree_in(0) == 0)
            .map(|g| g.map_vars(&self.ring, &back))
            .collect();
        Ideal::new(&self.ring, kept)
    }

    /// `(I : J) = { f | f J ⊆ I }`
    pub fn colon(&self, other: &Ideal) -> Result<Ideal> {
        self.ring.check_same(&other.ring)?;
        let mut acc: Option<Ideal> = None;
        for g in &other.gens {
            let principal = Ideal::new(&self.ring, vec![g.clone()])?;
            let meet = self.intersect(&principal)?;
            let quot = meet
                .gens
                .iter()
                .map(|h| {
                    h.div_exact(g)
                        .ok_or_else(|| Error::Structural("inexact colon quotient".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            let q = Ideal::new(&self.ring, quot)?;
            acc = Some(match acc {
                None => q,
                Some(a) => a.intersect(&q)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Ideal::unit(&self.ring)))
    }

    /// `(I : J^∞)` and the first `n` with `(I : J^n) = (I : J^(n+1))`.
    pub fn saturate(&self, other: &Ideal) -> Result<(Ideal, usize)> {
        let mut cur = self.clone();
        let mut n = 0;
        loop {
            let next = cur.colon(other)?;
            if next.same_as(&cur)? {
                return Ok((cur, n));
            }
            cur = next;
            n += 1;
        }
    }

    /// `I ∩ k[remaining variables]`, still expressed in the full ring.
    pub fn eliminate(&self, vars: &[usize]) -> Result<Ideal> {
        if vars.is_empty() {
            return Ok(self.clone());
        }
        let n = self.ring.nvars();
        let mut perm: Vec<usize> = vars.to_vec();
        perm.sort_unstable();
        perm.dedup();
        if perm.iter().any(|&v| v >= n) {
            return Err(Error::Structural("elimination variable out of range".into()));
        }
        let elim_count = perm.len();
        perm.extend((0..n).filter(|i| !vars.contains(i)));
        // perm[new] = old
        let mut to_new = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            to_new[old] = new;
        }
        let names: Vec<&str> = perm.iter().map(|&i| self.ring.var_names()[i].as_str()).collect();
        let big = Ring::new(self.ring.modulus() as u64, &names, MonomialOrder::Elim(elim_count))?;
        let gb = self.map_vars(&big, &to_new).groebner_basis()?.to_vec();
        let kept = gb
            .into_iter()
            .filter(|g| (0..elim_count).all(|i| g.degree_in(i) == 0))
            .map(|g| g.map_vars(&self.ring, &perm))
            .collect();
        Ideal::new(&self.ring, kept)
    }

    /// Krull dimension of `R/I`; `-1` for the unit ideal.
    pub fn krull_dim(&self) -> Result<i64> {
        let gb = self.groebner_basis()?;
        if gb.iter().any(|g| g.is_constant()) {
            return Ok(-1);
        }
        let leads: Vec<&Monomial> = gb.iter().map(|g| g.lead_monomial().unwrap()).collect();
        Ok(max_independent_set(self.ring.nvars(), &leads) as i64)
    }

    /// Whether some power of `f` lies in the ideal.
    pub fn radical_contains(&self, f: &Poly) -> Result<bool> {
        self.ring.check_same(f.ring())?;
        if f.is_zero() {
            return Ok(true);
        }
        let (big, map) = self.ring.extend(&["t"], false, MonomialOrder::GrevLex);
        let t = big.var(self.ring.nvars());
        let mut gens: Vec<Poly> = self.gens.iter().map(|g| g.map_vars(&big, &map)).collect();
        gens.push(&big.one() - &(&t * &f.map_vars(&big, &map)));
        Ideal::new(&big, gens)?.is_unit()
    }
}

/// Largest set of variables containing no leading monomial's support.
pub(crate) fn max_independent_set(nvars: usize, leads: &[&Monomial]) -> usize {
    let masks: Vec<u32> = leads
        .iter()
        .map(|m| {
            m.exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .fold(0u32, |acc, (i, _)| acc | (1 << i))
        })
        .collect();
    let mut best = 0;
    for s in 0u32..(1u32 << nvars) {
        let size = s.count_ones() as usize;
        if size > best && masks.iter().all(|&m| m & !s != 0) {
            best = size;
        }
    }
    best
}

/// A submodule of `R^n` given by generators, with a lazily computed reduced
/// Gröbner basis.
pub struct Submodule {
    ring: Ring,
    rank: usize,
    gens: Vec<FreeVector>,
    gb: OnceLock<Vec<Vect>>,
}

impl Clone for Submodule {
    fn clone(&self) -> Submodule {
        let gb = OnceLock::new();
        if let Some(g) = self.gb.get() {
            let _ = gb.set(g.clone());
        }
        Submodule {
            ring: self.ring.clone(),
            rank: self.rank,
            gens: self.gens.clone(),
            gb,
        }
    }
}

impl std::fmt::Debug for Submodule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Submodule(rank {}, {:?})", self.rank, self.gens)
    }
}

impl Submodule {
    pub fn new(ring: &Ring, rank: usize, gens: Vec<FreeVector>) -> Result<Submodule> {
        for g in &gens {
            ring.check_same(g.ring())?;
            if g.rank() != rank {
                return Err(Error::Structural(format!(
                    "vector of rank {} in a submodule of R^{rank}",
                    g.rank()
                )));
            }
        }
        Ok(Submodule {
            ring: ring.clone(),
            rank,
            gens: gens.into_iter().filter(|g| !g.is_zero()).collect(),
            gb: OnceLock::new(),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gens(&self) -> &[FreeVector] {
        &self.gens
    }

    pub(crate) fn gb(&self) -> Result<&[Vect]> {
        if let Some(g) = self.gb.get() {
            return Ok(g);
        }
        let ctx = Ctx::of(&self.ring);
        let basis = groebner(
            self.gens.iter().map(|g| g.to_vect()).collect(),
            ctx,
            self.rank == 1,
        )?;
        let _ = self.gb.set(basis);
        Ok(self.gb.get().unwrap())
    }

    /// Position and monomial of the leading term of each basis element.
    pub(crate) fn leading_terms(&self) -> Result<Vec<(usize, Monomial)>> {
        Ok(self.gb()?.iter().map(|v| (v[0].comp as usize, v[0].mono.clone())).collect())
    }

    pub fn groebner_basis(&self) -> Result<Vec<FreeVector>> {
        Ok(self
            .gb()?
            .iter()
            .map(|v| FreeVector::from_vect(&self.ring, self.rank, v))
            .collect())
    }

    pub fn reduce(&self, v: &FreeVector) -> Result<FreeVector> {
        if v.rank() != self.rank {
            return Err(Error::Structural(format!(
                "vector of rank {} against R^{}",
                v.rank(),
                self.rank
            )));
        }
        self.ring.check_same(v.ring())?;
        let r = reduce_full(v.to_vect(), self.gb()?, None, Ctx::of(&self.ring));
        Ok(FreeVector::from_vect(&self.ring, self.rank, &r))
    }

    pub fn contains(&self, v: &FreeVector) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    pub fn contains_all(&self, other: &Submodule) -> Result<bool> {
        for g in &other.gens {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_as(&self, other: &Submodule) -> Result<bool> {
        Ok(self.contains_all(other)? && other.contains_all(self)?)
    }

    /// Whether the submodule is all of `R^n`.
    pub fn is_everything(&self) -> Result<bool> {
        for i in 0..self.rank {
            if !self.contains(&FreeVector::unit(&self.ring, self.rank, i))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `{ v | J v ⊆ U }` as a kernel of `R^n → (R^n / U)^r`.
    pub fn colon(&self, j: &Ideal) -> Result<Submodule> {
        let n = self.rank;
        let r = j.gens().len();
        if r == 0 {
            return Ok(Submodule::new(
                &self.ring,
                n,
                (0..n).map(|i| FreeVector::unit(&self.ring, n, i)).collect(),
            )?);
        }
        let big = n * r;
        let mut cols = Vec::new();
        for i in 0..n {
            let mut c = vec![self.ring.zero(); big];
            for (b, g) in j.gens().iter().enumerate() {
                c[b * n + i] = g.clone();
            }
            cols.push(FreeVector::new(&self.ring, c)?);
        }
        for b in 0..r {
            for u in &self.gens {
                let mut c = vec![self.ring.zero(); big];
                for (i, x) in u.comps().iter().enumerate() {
                    c[b * n + i] = x.clone();
                }
                cols.push(FreeVector::new(&self.ring, c)?);
            }
        }
        let syz = syzygies(&cols)?;
        let gens = syz
            .into_iter()
            .map(|s| FreeVector::new(&self.ring, s.into_comps()[..n].to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let mut gens = gens;
        gens.extend(self.gens.iter().cloned());
        Submodule::new(&self.ring, n, gens)
    }

    /// `(U : J^∞)` and the stabilization exponent.
    pub fn saturate(&self, j: &Ideal) -> Result<(Submodule, usize)> {
        let mut cur = self.clone();
        let mut n = 0;
        loop {
            let next = cur.colon(j)?;
            if cur.contains_all(&next)? {
                return Ok((cur, n));
            }
            cur = next;
            n += 1;
        }
    }

    /// `{ f | f v ∈ U }`
    pub fn ideal_quotient(&self, v: &FreeVector) -> Result<Ideal> {
        let mut cols = vec![v.clone()];
        cols.extend(self.gens.iter().cloned());
        let syz = syzygies(&cols)?;
        Ideal::new(&self.ring, syz.into_iter().map(|s| s.comps()[0].clone()).collect())
    }
}

/// Generators of the module of relations among `gens`.
///
/// Computed from a basis of the vectors `[g_i | e_i]`: with the `g` block
/// dominating the position order, the basis elements with vanishing `g`
/// block generate the syzygies.
pub fn syzygies(gens: &[FreeVector]) -> Result<Vec<FreeVector>> {
    let Some(first) = gens.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring().clone();
    let n = first.rank();
    let m = gens.len();
    for g in gens {
        ring.check_same(g.ring())?;
        if g.rank() != n {
            return Err(Error::Structural("syzygies of vectors of different rank".into()));
        }
    }
    let ctx = Ctx::augmented(&ring, n);
    let basis = groebner(augmented(gens, n, ctx), ctx, false)?;
    Ok(basis
        .iter()
        .filter(|v| v[0].comp as usize >= n)
        .map(|v| {
            let shifted: Vect = v
                .iter()
                .map(|t| Term {
                    mono: t.mono.clone(),
                    comp: t.comp - n as u32,
                    coeff: t.coeff,
                })
                .collect();
            FreeVector::from_vect(&ring, m, &shifted)
        })
        .collect())
}

fn augmented(gens: &[FreeVector], n: usize, ctx: Ctx) -> Vec<Vect> {
    gens.iter()
        .enumerate()
        .map(|(i, g)| {
            let mut v = g.to_vect();
            v.push(Term {
                mono: Monomial::one(g.ring().nvars()),
                comp: (n + i) as u32,
                coeff: 1,
            });
            v.sort_by(|a, b| ctx.cmp_terms(b, a));
            v
        })
        .collect()
}

/// Expresses vectors as combinations of a fixed generating list.
pub struct Lifter {
    ring: Ring,
    rank: usize,
    ngens: usize,
    ctx: Ctx,
    basis: Vec<Vect>,
}

impl Lifter {
    pub fn new(ring: &Ring, rank: usize, gens: &[FreeVector]) -> Result<Lifter> {
        for g in gens {
            ring.check_same(g.ring())?;
            if g.rank() != rank {
                return Err(Error::Structural("lifter generators of wrong rank".into()));
            }
        }
        // Membership does not depend on the order; elimination orders make
        // the cofactors far larger than grevlex does.
        let ctx = Ctx {
            ord: MonomialOrder::GrevLex,
            ..Ctx::augmented(ring, rank)
        };
        let basis = groebner_opts(augmented(gens, rank, ctx), ctx, false, true)?;
        Ok(Lifter {
            ring: ring.clone(),
            rank,
            ngens: gens.len(),
            ctx,
            basis,
        })
    }

    /// Coefficients `c` with `v = Σ c_i gens_i`, or `None` if `v` is not in
    /// the span.
    pub fn lift(&self, v: &FreeVector) -> Result<Option<Vec<Poly>>> {
        if v.rank() != self.rank {
            return Err(Error::Structural("lifting a vector of wrong rank".into()));
        }
        let ctx = self.ctx;
        let mut input = v.to_vect();
        input.sort_by(|a, b| ctx.cmp_terms(b, a));
        let r = reduce_full(input, &self.basis, None, ctx);
        if r.iter().any(|t| (t.comp as usize) < self.rank) {
            return Ok(None);
        }
        let p = self.ring.modulus();
        let mut coeffs: Vec<Vec<(Monomial, u32)>> = vec![Vec::new(); self.ngens];
        for t in r {
            coeffs[t.comp as usize - self.rank].push((t.mono, neg_mod(t.coeff, p)));
        }
        Ok(Some(
            coeffs
                .into_iter()
                .map(|terms| Poly::from_terms(&self.ring, terms))
                .collect(),
        ))
    }
}

pub fn buchberger(i: &Ideal) -> Result<Vec<Poly>> {
    Ok(i.groebner_basis()?.to_vec())
}

pub fn in_ideal(f: &Poly, i: &Ideal) -> Result<bool> {
    i.contains(f)
}

pub fn eliminate(i: &Ideal, vars: &[usize]) -> Result<Ideal> {
    i.eliminate(vars)
}

pub fn ideal_colon(i: &Ideal, j: &Ideal) -> Result<Ideal> {
    i.colon(j)
}

pub fn saturate(i: &Ideal, j: &Ideal) -> Result<(Ideal, usize)> {
    i.saturate(j)
}

pub fn krull_dim(i: &Ideal) -> Result<i64> {
    i.krull_dim()
}

pub fn radical_member(f: &Poly, i: &Ideal) -> Result<bool> {
    i.radical_contains(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(vars: &[&str], ord: MonomialOrder) -> Ring {
        Ring::new(32003, vars, ord).unwrap()
    }

    fn xy() -> Ring {
        ring(&["x", "y"], MonomialOrder::GrevLex)
    }

    fn id(r: &Ring, g: &[&str]) -> Ideal {
        Ideal::parse(r, g).unwrap()
    }

    fn p(r: &Ring, s: &str) -> Poly {
        r.parse_poly(s).unwrap()
    }

    #[test]
    fn normal_form_examples() {
        let r = xy();
        let nf = normal_form(&p(&r, "x^2 + y"), &[p(&r, "x"), p(&r, "y")]).unwrap();
        assert!(nf.is_zero());
        let f = p(&r, "x^2 + 1");
        assert_eq!(normal_form(&f, &[p(&r, "y")]).unwrap(), f);
        assert_eq!(normal_form(&p(&r, "x*y"), &[p(&r, "x - y")]).unwrap(), p(&r, "y^2"));
    }

    #[test]
    fn buchberger_examples() {
        let r = xy();
        assert_eq!(buchberger(&id(&r, &["x", "y"])).unwrap(), vec![p(&r, "x"), p(&r, "y")]);
        assert_eq!(buchberger(&id(&r, &["3*x^2 + y"])).unwrap(), vec![p(&r, "x^2 + 10668*y")]);
        let lex = ring(&["x", "y"], MonomialOrder::Lex);
        let gb = buchberger(&id(&lex, &["x*y - 1", "y^2 - 1"])).unwrap();
        assert_eq!(gb, vec![p(&lex, "x - y"), p(&lex, "y^2 - 1")]);
        assert!(buchberger(&Ideal::zero(&r)).unwrap().is_empty());
    }

    #[test]
    fn membership_examples() {
        let r = xy();
        assert!(in_ideal(&p(&r, "x^2 + x*y"), &id(&r, &["x"])).unwrap());
        assert!(!in_ideal(&r.one(), &id(&r, &["x", "y"])).unwrap());
        assert!(in_ideal(&p(&r, "x - y"), &id(&r, &["x*y - 1", "y^2 - 1"])).unwrap());
    }

    #[test]
    fn syzygy_examples() {
        let r = xy();
        let v = |s: &str| FreeVector::new(&r, vec![p(&r, s)]).unwrap();
        let s = syzygies(&[v("x"), v("y")]).unwrap();
        assert_eq!(s.len(), 1);
        let c = s[0].comps();
        assert!((&(&c[0] * &p(&r, "x")) + &(&c[1] * &p(&r, "y"))).is_zero());
        assert!(c[0] == p(&r, "y") || c[0] == p(&r, "-y"));
        assert!(syzygies(&[v("x^2 + y")]).unwrap().is_empty());
        let s = syzygies(&[v("x"), v("x")]).unwrap();
        assert_eq!(s.len(), 1);
        assert!((&s[0].comps()[0] + &s[0].comps()[1]).is_zero());
        assert!(s[0].comps()[0].is_constant());
    }

    #[test]
    fn elimination_examples() {
        let r = ring(&["t", "x", "y"], MonomialOrder::GrevLex);
        let i = id(&r, &["t - x", "t^2 - y"]);
        let e = eliminate(&i, &[0]).unwrap();
        assert!(e.same_as(&id(&r, &["x^2 - y"])).unwrap());
        assert!(eliminate(&i, &[]).unwrap().same_as(&i).unwrap());
        assert!(eliminate(&id(&r, &["t"]), &[0]).unwrap().is_zero());
    }

    #[test]
    fn colon_and_saturation_examples() {
        let r = xy();
        let c = ideal_colon(&id(&r, &["x^2", "x*y"]), &id(&r, &["x"])).unwrap();
        assert!(c.same_as(&id(&r, &["x", "y"])).unwrap());
        let i = id(&r, &["x^2 + y^3", "x*y"]);
        assert!(ideal_colon(&i, &Ideal::unit(&r)).unwrap().same_as(&i).unwrap());
        let c = ideal_colon(&id(&r, &["x*y"]), &id(&r, &["x"])).unwrap();
        assert!(c.same_as(&id(&r, &["y"])).unwrap());

        let (s, n) = saturate(&id(&r, &["x^2*y"]), &id(&r, &["y"])).unwrap();
        assert!(s.same_as(&id(&r, &["x^2"])).unwrap());
        assert_eq!(n, 1);
        let (s, n) = saturate(&i, &Ideal::unit(&r)).unwrap();
        assert!(s.same_as(&i).unwrap());
        assert_eq!(n, 0);
        let (s, _) = saturate(&id(&r, &["x^2", "x*y"]), &id(&r, &["x"])).unwrap();
        assert!(s.is_unit().unwrap());
    }

    #[test]
    fn intersection() {
        let r = xy();
        let m = id(&r, &["x"]).intersect(&id(&r, &["y"])).unwrap();
        assert!(m.same_as(&id(&r, &["x*y"])).unwrap());
    }

    #[test]
    fn dimension_examples() {
        let r = xy();
        assert_eq!(krull_dim(&id(&r, &["x*y"])).unwrap(), 1);
        assert_eq!(krull_dim(&id(&r, &["x", "y"])).unwrap(), 0);
        assert_eq!(krull_dim(&Ideal::zero(&r)).unwrap(), 2);
        assert_eq!(krull_dim(&Ideal::unit(&r)).unwrap(), -1);
    }

    #[test]
    fn radical_examples() {
        let r = xy();
        assert!(radical_member(&p(&r, "x"), &id(&r, &["x^2"])).unwrap());
        assert!(!radical_member(&p(&r, "y"), &id(&r, &["x^2"])).unwrap());
        assert!(radical_member(&p(&r, "x + y"), &id(&r, &["(x+y)^2"])).unwrap());
    }

    #[test]
    fn lifting() {
        let r = xy();
        let v = |s: &[&str]| FreeVector::new(&r, s.iter().map(|x| p(&r, x)).collect()).unwrap();
        let gens = [v(&["x", "0"]), v(&["y", "x"])];
        let l = Lifter::new(&r, 2, &gens).unwrap();
        let target = v(&["x^2 + y^2", "x*y"]);
        let c = l.lift(&target).unwrap().unwrap();
        let back = gens[0].scale(&c[0]).add(&gens[1].scale(&c[1]));
        assert_eq!(back, target);
        assert!(l.lift(&v(&["0", "1"])).unwrap().is_none());
    }

    #[test]
    fn submodule_colon() {
        // U = x R ⊕ x^2 R in R^2; (U : (x)) = R ⊕ x R
        let r = xy();
        let v = |a: &str, b: &str| FreeVector::new(&r, vec![p(&r, a), p(&r, b)]).unwrap();
        let u = Submodule::new(&r, 2, vec![v("x", "0"), v("0", "x^2")]).unwrap();
        let c = u.colon(&id(&r, &["x"])).unwrap();
        let expect = Submodule::new(&r, 2, vec![v("1", "0"), v("0", "x")]).unwrap();
        assert!(c.same_as(&expect).unwrap());
        let (s, n) = u.saturate(&id(&r, &["x"])).unwrap();
        assert!(s.is_everything().unwrap());
        assert_eq!(n, 2);
    }

    #[test]
    fn resource_guard() {
        let r = ring(&["x", "y", "z"], MonomialOrder::Lex);
        let tight = limits::Limits {
            max_degree: 3,
            ..Default::default()
        };
        let res = limits::with(tight, || {
            buchberger(&id(&r, &["x^2 - y*z", "y^2 - x*z", "z^3 - x*y"]))
        });
        assert!(matches!(res, Err(Error::ResourceExceeded(_))));
    }
}
