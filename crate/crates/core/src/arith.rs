//! Prime fields, monomials, monomial orders and canonical multivariate
//! polynomials over `F_p`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub const DEFAULT_PRIME: u32 = 32003;

/// Deterministic Miller-Rabin; bases 2, 7, 61 are exact below 4 759 123 141.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 7, 61] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = (x as u128 * x as u128 % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    if s >= p as u64 {
        (s - p as u64) as u32
    } else {
        s as u32
    }
}

#[inline]
pub(crate) fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    (a as u64 * b as u64 % p as u64) as u32
}

#[inline]
pub(crate) fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// Inverse of a nonzero residue by the extended Euclidean algorithm.
pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    assert!(a != 0, "inverse of zero in F_{p}");
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    t0.rem_euclid(p as i64) as u32
}

pub(crate) fn reduce_i64(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

/// An element of `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    residue: u32,
    modulus: u32,
}

impl FieldElem {
    pub fn new(value: i64, modulus: u32) -> Self {
        FieldElem {
            residue: reduce_i64(value, modulus),
            modulus,
        }
    }

    pub fn residue(self) -> u32 {
        self.residue
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.residue == 0
    }

    pub fn inverse(self) -> Option<Self> {
        (self.residue != 0).then(|| FieldElem {
            residue: inv_mod(self.residue, self.modulus),
            modulus: self.modulus,
        })
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: FieldElem) -> FieldElem {
        assert_eq!(self.modulus, o.modulus);
        FieldElem {
            residue: add_mod(self.residue, o.residue, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: FieldElem) -> FieldElem {
        assert_eq!(self.modulus, o.modulus);
        FieldElem {
            residue: mul_mod(self.residue, o.residue, self.modulus),
            modulus: self.modulus,
        }
    }
}

/// Dense exponent vector with cached total degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: SmallVec<[u32; 8]>,
    degree: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: SmallVec::from_elem(0, nvars),
            degree: 0,
        }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.exps[i] = 1;
        m.degree = 1;
        m
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial {
            exps: SmallVec::from_slice(exps),
            degree: exps.iter().sum(),
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
            degree: self.degree + other.degree,
        }
    }

    /// `self | other`
    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other`, if exact.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a - b).collect(),
            degree: self.degree - other.degree,
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps: SmallVec<[u32; 8]> = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| *a.max(b))
            .collect();
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Product of the variables occurring in `self`.
    pub fn radical(&self) -> Monomial {
        let exps: SmallVec<[u32; 8]> = self.exps.iter().map(|&e| e.min(1)).collect();
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn pow(&self, n: u32) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|e| e * n).collect(),
            degree: self.degree * n,
        }
    }
}

/// Term orders on monomials. Variable precedence follows the ring's
/// declaration order: the first variable is the largest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    GrevLex,
    /// Block order: the first `j` variables by grevlex, ties broken by
    /// grevlex on the remaining ones. Eliminates the first block.
    Elim(usize),
}

fn grevlex_slice(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

impl MonomialOrder {
    #[inline]
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::GrevLex => a.degree.cmp(&b.degree).then_with(|| {
                for i in (0..a.exps.len()).rev() {
                    if a.exps[i] != b.exps[i] {
                        return b.exps[i].cmp(&a.exps[i]);
                    }
                }
                Ordering::Equal
            }),
            MonomialOrder::Elim(j) => {
                let j = j.min(a.exps.len());
                grevlex_slice(&a.exps[..j], &b.exps[..j])
                    .then_with(|| grevlex_slice(&a.exps[j..], &b.exps[j..]))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            MonomialOrder::Lex => "lex".into(),
            MonomialOrder::GrevLex => "grevlex".into(),
            MonomialOrder::Elim(j) => format!("elim({j})"),
        }
    }

    pub fn parse(s: &str) -> Option<MonomialOrder> {
        match s {
            "lex" => Some(MonomialOrder::Lex),
            "grevlex" => Some(MonomialOrder::GrevLex),
            _ => s
                .strip_prefix("elim(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.parse().ok())
                .map(MonomialOrder::Elim),
        }
    }
}

/// Compares two monomials in `ord`.
pub fn cmp_monomials(a: &Monomial, b: &Monomial, ord: MonomialOrder) -> Result<Ordering> {
    if a.nvars() != b.nvars() {
        return Err(Error::Structural(format!(
            "monomials of length {} and {}",
            a.nvars(),
            b.nvars()
        )));
    }
    Ok(ord.compare(a, b))
}

#[derive(Debug, PartialEq, Eq, Hash)]
struct RingData {
    p: u32,
    vars: Vec<String>,
    order: MonomialOrder,
}

/// `F_p[vars]` with a fixed term order. Cheap to clone.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{}[{}] ({})",
            self.0.p,
            self.0.vars.join(","),
            self.0.order.name()
        )
    }
}

fn valid_var_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Ring {
    pub fn new<S: AsRef<str>>(p: u64, vars: &[S], order: MonomialOrder) -> Result<Ring> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not a prime below 2^31")));
        }
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in vars.iter().enumerate() {
            if !valid_var_name(v) {
                return Err(Error::InvalidRing(format!("bad variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidRing(format!("duplicate variable `{v}`")));
            }
        }
        if let MonomialOrder::Elim(j) = order {
            if j > vars.len() {
                return Err(Error::InvalidRing(format!("elimination block {j} too large")));
            }
        }
        Ok(Ring(Arc::new(RingData {
            p: p as u32,
            vars,
            order,
        })))
    }

    pub fn modulus(&self) -> u32 {
        self.0.p
    }

    pub fn nvars(&self) -> usize {
        self.0.vars.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.0.vars
    }

    pub fn order(&self) -> MonomialOrder {
        self.0.order
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn with_order(&self, order: MonomialOrder) -> Ring {
        Ring(Arc::new(RingData {
            p: self.0.p,
            vars: self.0.vars.clone(),
            order,
        }))
    }

    /// A variable name derived from `base` that does not clash with this ring.
    pub fn fresh_name(&self, base: &str) -> String {
        if self.var_index(base).is_none() {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| self.var_index(n).is_none())
            .unwrap()
    }

    /// Ring with `extra` fresh variables placed before (`front`) or after the
    /// existing ones. Returns the new ring and the indices of the old
    /// variables inside it.
    pub fn extend(&self, extra: &[&str], front: bool, order: MonomialOrder) -> (Ring, Vec<usize>) {
        let mut names: Vec<String> = Vec::new();
        let mut probe = self.clone();
        for e in extra {
            let n = probe.fresh_name(e);
            names.push(n.clone());
            let mut vs = probe.0.vars.clone();
            vs.push(n);
            probe = Ring(Arc::new(RingData {
                p: self.0.p,
                vars: vs,
                order: self.0.order,
            }));
        }
        let (vars, map) = if front {
            let mut vs = names;
            let k = vs.len();
            vs.extend(self.0.vars.iter().cloned());
            (vs, (k..k + self.nvars()).collect())
        } else {
            let mut vs = self.0.vars.clone();
            vs.extend(names);
            (vs, (0..self.nvars()).collect())
        };
        let ring = Ring(Arc::new(RingData {
            p: self.0.p,
            vars,
            order,
        }));
        (ring, map)
    }

    pub fn zero(&self) -> Poly {
        Poly {
            ring: self.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(&self) -> Poly {
        self.constant(1)
    }

    pub fn constant(&self, c: i64) -> Poly {
        let c = reduce_i64(c, self.0.p);
        let terms = if c == 0 {
            Vec::new()
        } else {
            vec![(Monomial::one(self.nvars()), c)]
        };
        Poly {
            ring: self.clone(),
            terms,
        }
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly {
            ring: self.clone(),
            terms: vec![(Monomial::var(self.nvars(), i), 1)],
        }
    }

    pub fn monomial(&self, m: Monomial, c: i64) -> Poly {
        Poly::from_terms(self, vec![(m, reduce_i64(c, self.0.p))])
    }

    pub fn parse_poly(&self, text: &str) -> Result<Poly> {
        crate::polyparse::parse_poly(self, text).map_err(|(col, msg)| Error::Parse {
            line: 1,
            col,
            msg,
        })
    }

    /// Parses `num` or `num / den`.
    pub fn parse_fraction(&self, text: &str) -> Result<(Poly, Poly)> {
        crate::polyparse::parse_fraction(self, text).map_err(|(col, msg)| Error::Parse {
            line: 1,
            col,
            msg,
        })
    }

    pub(crate) fn check_same(&self, other: &Ring) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "ring mismatch: {self:?} vs {other:?}"
            )))
        }
    }
}

/// A polynomial in canonical form: terms strictly descending in the ring's
/// order, no zero coefficients. The zero polynomial has no terms.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Ring,
    terms: Vec<(Monomial, u32)>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Poly {
    /// Builds a polynomial from arbitrary terms; sorts and combines them.
    pub fn from_terms(ring: &Ring, mut terms: Vec<(Monomial, u32)>) -> Poly {
        let ord = ring.order();
        let p = ring.modulus();
        terms.sort_by(|a, b| ord.compare(&b.0, &a.0));
        let mut out: Vec<(Monomial, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = add_mod(*lc, c, p),
                _ => {
                    if let Some((_, 0)) = out.last() {
                        out.pop();
                    }
                    out.push((m, c % p));
                }
            }
        }
        if let Some((_, 0)) = out.last() {
            out.pop();
        }
        Poly {
            ring: ring.clone(),
            terms: out,
        }
    }

    /// Wraps terms that are already canonical.
    pub(crate) fn from_sorted(ring: &Ring, terms: Vec<(Monomial, u32)>) -> Poly {
        debug_assert!(terms.iter().all(|t| t.1 != 0));
        debug_assert!(terms
            .windows(2)
            .all(|w| ring.order().compare(&w[0].0, &w[1].0) == Ordering::Greater));
        Poly {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == 1
    }

    /// Constant coefficient, when the polynomial is constant.
    pub fn constant_value(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if m.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn lead_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn lead_coeff(&self) -> Option<FieldElem> {
        self.terms
            .first()
            .map(|t| FieldElem::new(t.1 as i64, self.ring.modulus()))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.0.degree()).max()
    }

    /// Degree in variable `i`.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|t| t.0.exponents()[i]).max().unwrap_or(0)
    }

    pub fn monic(&self) -> Poly {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) => self.scale(inv_mod(*c, self.ring.modulus())),
        }
    }

    pub fn scale(&self, c: u32) -> Poly {
        let p = self.ring.modulus();
        let c = c % p;
        if c == 0 {
            return self.ring.zero();
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), mul_mod(*a, c, p)))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: u32) -> Poly {
        let p = self.ring.modulus();
        if c % p == 0 {
            return self.ring.zero();
        }
        Poly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, a)| (t.mul(m), mul_mod(*a, c, p)))
                .collect(),
        }
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let p = self.ring.modulus();
        let ord = self.ring.order();
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let fix = |c: u32| if negate { neg_mod(c, p) } else { c };
        while i < a.len() && j < b.len() {
            match ord.compare(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), fix(b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = add_mod(a[i].1, fix(b[j].1), p);
                    if c != 0 {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), fix(*c))));
        Poly {
            ring: self.ring.clone(),
            terms: out,
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.ring.check_same(&other.ring)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.ring.check_same(&other.ring)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.ring.check_same(&other.ring)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return self.ring.zero();
        }
        let (short, long) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = self.ring.zero();
        for (m, c) in &short.terms {
            acc = acc.merge(&long.mul_monomial(m, *c), false);
        }
        acc
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = self.ring.one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Ring homomorphism sending variable `i` to `images[i]`.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.ring.nvars() {
            return Err(Error::Structural(format!(
                "{} images for {} variables",
                images.len(),
                self.ring.nvars()
            )));
        }
        let target = match images.first() {
            Some(f) => f.ring.clone(),
            None => return Ok(self.clone()),
        };
        for f in images {
            target.check_same(&f.ring)?;
        }
        // powers are cached per variable
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|f| vec![target.one(), f.clone()]).collect();
        let mut acc = target.zero();
        for (m, c) in &self.terms {
            let mut t = target.constant(*c as i64);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = &powers[i][powers[i].len() - 1] * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Re-expresses the polynomial in `target`, sending variable `i` to
    /// target variable `var_map[i]`.
    pub fn map_vars(&self, target: &Ring, var_map: &[usize]) -> Poly {
        let n = target.nvars();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0u32; n];
                for (i, &x) in m.exponents().iter().enumerate() {
                    e[var_map[i]] += x;
                }
                (Monomial::from_exponents(&e), *c)
            })
            .collect();
        Poly::from_terms(target, terms)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.terms.first()?;
        let inv = inv_mod(*lc, self.ring.modulus());
        let mut rest = self.clone();
        let mut q = Vec::new();
        while let Some((m, c)) = rest.terms.first() {
            let qm = m.div(lm)?;
            let qc = mul_mod(*c, inv, self.ring.modulus());
            rest = rest.merge(&d.mul_monomial(&qm, qc), true);
            q.push((qm, qc));
        }
        Some(Poly::from_terms(&self.ring, q))
    }

    /// Variables occurring in the polynomial.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.ring.nvars())
            .filter(|&i| self.terms.iter().any(|t| t.0.exponents()[i] > 0))
            .collect()
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        self.checked_add(o).expect("polynomials over different rings")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self.checked_sub(o).expect("polynomials over different rings")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        self.checked_mul(o).expect("polynomials over different rings")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(self.ring.modulus() - 1)
    }
}

pub(crate) fn fmt_monomial(m: &Monomial, vars: &[String], out: &mut String) {
    let mut first = true;
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            out.push('*');
        }
        first = false;
        out.push_str(&vars[i]);
        if e > 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

/// Canonical rendering: terms descending, coefficients in `[0, p)`.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                s.push_str(" + ");
            }
            if m.is_one() {
                s.push_str(&c.to_string());
            } else {
                if *c != 1 {
                    s.push_str(&c.to_string());
                    s.push('*');
                }
                fmt_monomial(m, self.ring.var_names(), &mut s);
            }
        }
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2(order: MonomialOrder) -> Ring {
        Ring::new(32003, &["x", "y"], order).unwrap()
    }

    fn m(e: &[u32]) -> Monomial {
        Monomial::from_exponents(e)
    }

    #[test]
    fn primality() {
        assert!(is_prime(32003));
        assert!(is_prime(2));
        assert!(is_prime(2147483647));
        assert!(!is_prime(32001));
        assert!(!is_prime(1));
        assert!(Ring::new(32001, &["x"], MonomialOrder::GrevLex).is_err());
    }

    #[test]
    fn grevlex_degree_two() {
        // x^2 > xy > y^2 in grevlex with x > y
        let ord = MonomialOrder::GrevLex;
        let deg2 = [m(&[2, 0]), m(&[1, 1]), m(&[0, 2])];
        for w in deg2.windows(2) {
            assert_eq!(cmp_monomials(&w[0], &w[1], ord).unwrap(), Ordering::Greater);
        }
        // three variables: grevlex and lex differ on x*z vs y^2
        assert_eq!(ord.compare(&m(&[1, 0, 1]), &m(&[0, 2, 0])), Ordering::Less);
        assert_eq!(
            MonomialOrder::Lex.compare(&m(&[1, 0, 1]), &m(&[0, 2, 0])),
            Ordering::Greater
        );
    }

    #[test]
    fn order_basics() {
        for ord in [MonomialOrder::Lex, MonomialOrder::GrevLex, MonomialOrder::Elim(1)] {
            assert_eq!(ord.compare(&m(&[3, 1]), &m(&[3, 1])), Ordering::Equal);
        }
        assert_eq!(
            MonomialOrder::Lex.compare(&m(&[1, 0]), &m(&[0, 3])),
            Ordering::Greater
        );
        assert!(cmp_monomials(&m(&[1]), &m(&[1, 0]), MonomialOrder::Lex).is_err());
        // elimination order: anything with x beats pure y powers
        assert_eq!(
            MonomialOrder::Elim(1).compare(&m(&[1, 0]), &m(&[0, 9])),
            Ordering::Greater
        );
    }

    #[test]
    fn add_examples() {
        let r = r2(MonomialOrder::GrevLex);
        let x = r.var(0);
        let y = r.var(1);
        let f = &(&x + &y) + &x.scale(32002);
        assert_eq!(f, y);
        assert_eq!(&f + &r.zero(), f);
        let r2 = Ring::new(2, &["x"], MonomialOrder::GrevLex).unwrap();
        let x2 = r2.var(0);
        assert!((&x2 + &x2).is_zero());
    }

    #[test]
    fn mul_examples() {
        let r = r2(MonomialOrder::GrevLex);
        let x = r.var(0);
        let y = r.var(1);
        let f = &(&x + &y) * &(&x - &y);
        assert_eq!(f, r.parse_poly("x^2 - y^2").unwrap());
        assert_eq!(&f * &r.one(), f);
        assert!((&f * &r.zero()).is_zero());
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = r2(MonomialOrder::GrevLex);
        let b = Ring::new(32003, &["u"], MonomialOrder::GrevLex).unwrap();
        assert!(matches!(
            a.var(0).checked_add(&b.var(0)),
            Err(Error::Structural(_))
        ));
        assert!(a.var(0).checked_mul(&b.var(0)).is_err());
    }

    #[test]
    fn rendering() {
        let r = r2(MonomialOrder::GrevLex);
        let f = r.parse_poly("-x^2*y + 3*x - 1").unwrap();
        assert_eq!(f.to_string(), "32002*x^2*y + 3*x + 32002");
        assert_eq!(r.zero().to_string(), "0");
        assert_eq!(r.parse_poly(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn exact_division_and_substitution() {
        let r = r2(MonomialOrder::GrevLex);
        let f = r.parse_poly("x^3 - y^3").unwrap();
        let d = r.parse_poly("x - y").unwrap();
        assert_eq!(f.div_exact(&d).unwrap(), r.parse_poly("x^2 + x*y + y^2").unwrap());
        assert!(f.div_exact(&r.parse_poly("x + 2").unwrap()).is_none());
        let s = Ring::new(32003, &["u"], MonomialOrder::GrevLex).unwrap();
        let u = s.var(0);
        let cusp = r.parse_poly("y^2 - x^3").unwrap();
        assert!(cusp.substitute(&[u.pow(2), u.pow(3)]).unwrap().is_zero());
    }

    #[test]
    fn field_inverse() {
        for a in 1..200u32 {
            assert_eq!(mul_mod(a, inv_mod(a, 32003), 32003), 1);
        }
        assert_eq!(FieldElem::new(-1, 7).residue(), 6);
        assert!(FieldElem::new(0, 7).inverse().is_none());
    }
}
