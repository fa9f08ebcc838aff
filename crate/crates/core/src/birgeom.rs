//! Isomorphisms between open charts `Spec A_s ≅ Spec B_t`, their
//! certification, transport of modules along them, and the action of pairs
//! (chart automorphism, line bundle) on modules.

use rayon::prelude::*;

use crate::arith::{Monomial, MonomialOrder, Poly, Ring};
use crate::error::{Error, Result};
use crate::fpmod::{hom_module, localization_ring, localize, FPModule, ModuleMap};
use crate::groebner::{FreeVector, Ideal, Lifter};
use crate::matrix::Matrix;
use crate::serrequot::{
    is_weak_equivalence, is_zero_in_quotient, pic_member, stalk_zero_test, Chart, PrimeWitness,
    QuotientLevel,
};

/// `A = R/I`.
#[derive(Clone, Debug)]
pub struct AffineAlgebra {
    ideal: Ideal,
}

impl AffineAlgebra {
    pub fn new(ideal: Ideal) -> Result<AffineAlgebra> {
        if ideal.is_unit()? {
            return Err(Error::InvalidRing("defining ideal is the unit ideal".into()));
        }
        Ok(AffineAlgebra { ideal })
    }

    pub fn polynomial(ring: &Ring) -> AffineAlgebra {
        AffineAlgebra {
            ideal: Ideal::zero(ring),
        }
    }

    pub fn ring(&self) -> &Ring {
        self.ideal.ring()
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn dim(&self) -> Result<i64> {
        self.ideal.krull_dim()
    }

    pub fn chart(&self) -> Result<Chart> {
        Chart::new(self.ideal.clone())
    }

    fn same_as(&self, other: &AffineAlgebra) -> Result<bool> {
        Ok(self.ring() == other.ring() && self.ideal.same_as(&other.ideal)?)
    }
}

/// One side of a witness: `A` together with `A_s = R[T]/(I, sT - 1)`.
#[derive(Clone, Debug)]
struct Side {
    alg: AffineAlgebra,
    den: Poly,
    loc: Ring,
    map: Vec<usize>,
    /// `I + (sT - 1)` in `R[T]`.
    rel: Ideal,
}

impl Side {
    fn new(alg: &AffineAlgebra, den: &Poly) -> Result<Side> {
        alg.ring().check_same(den.ring())?;
        if den.is_zero() {
            return Err(Error::Structural("zero denominator".into()));
        }
        let (loc, map) = localization_ring(alg.ring());
        let t = loc.var(loc.nvars() - 1);
        let mut gens: Vec<Poly> = alg.ideal.gens().iter().map(|g| g.map_vars(&loc, &map)).collect();
        gens.push(&(&den.map_vars(&loc, &map) * &t) - &loc.one());
        let rel = Ideal::new(&loc, gens)?;
        Ok(Side {
            alg: alg.clone(),
            den: den.clone(),
            loc,
            map,
            rel,
        })
    }

    fn embed(&self, f: &Poly) -> Poly {
        f.map_vars(&self.loc, &self.map)
    }

    fn inv_var(&self) -> Poly {
        self.loc.var(self.loc.nvars() - 1)
    }

    fn is_global(&self) -> bool {
        self.den.is_constant()
    }

    /// `num · T^e`
    fn from_fraction(&self, num: &Poly, e: u32) -> Poly {
        &self.embed(num) * &self.inv_var().pow(e)
    }

    /// `h = num / s^e` with `e` the degree of `h` in `T`.
    fn to_fraction(&self, h: &Poly) -> (Poly, u32) {
        let n = self.alg.ring().nvars();
        let tv = self.loc.nvars() - 1;
        let e = h.degree_in(tv);
        let ring = self.alg.ring();
        let mut acc = ring.zero();
        let mut by_power: Vec<Vec<(Monomial, u32)>> = vec![Vec::new(); e as usize + 1];
        for (m, c) in h.terms() {
            let k = m.exponents()[tv] as usize;
            by_power[k].push((Monomial::from_exponents(&m.exponents()[..n]), *c));
        }
        for (k, terms) in by_power.into_iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let hk = Poly::from_terms(ring, terms);
            acc = &acc + &(&hk * &self.den.pow(e - k as u32));
        }
        (acc, e)
    }

    /// In the plain ring when the denominator is a constant.
    fn flatten(&self, h: &Poly) -> Result<Poly> {
        let ring = self.alg.ring();
        let c = self
            .den
            .constant_value()
            .ok_or_else(|| Error::Structural("flattening a localized image".into()))?;
        let inv = Poly::from_terms(
            ring,
            vec![(
                Monomial::one(ring.nvars()),
                crate::arith::inv_mod(c, ring.modulus()),
            )],
        );
        let mut images: Vec<Poly> = (0..ring.nvars()).map(|i| ring.var(i)).collect();
        images.push(inv);
        h.substitute(&images)
    }

    fn inverse_of(&self, f: &Poly) -> Result<Option<Poly>> {
        inverse_mod(f, &self.rel)
    }
}

/// `g` with `f g ≡ 1` modulo `rel`.
fn inverse_mod(f: &Poly, rel: &Ideal) -> Result<Option<Poly>> {
    let ring = rel.ring();
    let mut gens = vec![FreeVector::new(ring, vec![f.clone()])?];
    for g in rel.gens() {
        gens.push(FreeVector::new(ring, vec![g.clone()])?);
    }
    let lifter = Lifter::new(ring, 1, &gens)?;
    let one = FreeVector::unit(ring, 1, 0);
    Ok(lifter.lift(&one)?.map(|c| rel.reduce(&c[0])).transpose()?)
}

/// Drops constants, replaces monomials by their radical, makes the rest
/// monic and multiplies the distinct factors.
fn reduced_product(ring: &Ring, factors: &[Poly]) -> Poly {
    let mut seen: Vec<Poly> = Vec::new();
    for f in factors {
        if f.is_zero() || f.is_constant() {
            continue;
        }
        let g = if f.terms().len() == 1 {
            ring.monomial(f.terms()[0].0.radical(), 1)
        } else {
            f.monic()
        };
        if !seen.contains(&g) {
            seen.push(g);
        }
    }
    seen.iter().fold(ring.one(), |acc, f| &acc * f)
}

const MAX_DENOMINATOR_POWER: u32 = 64;

/// `(num · t^m / den, m)` for the least `m` with `den | t^m`.
fn over_power(num: &Poly, den: &Poly, t: &Poly) -> Result<(Poly, u32)> {
    let mut tm = t.ring().one();
    for m in 0..=MAX_DENOMINATOR_POWER {
        if let Some(q) = tm.div_exact(den) {
            return Ok((num * &q, m));
        }
        tm = &tm * t;
    }
    Err(Error::NotLocalIso(format!(
        "denominator {den} does not divide a power of {t}"
    )))
}

/// `p(n_1/d^{e_1}, ...)` as `N / d^E`.
fn substitute_fraction(p: &Poly, images: &[(Poly, u32)], d: &Poly) -> Result<(Poly, u32)> {
    let ring = d.ring();
    let mut parts: Vec<(Poly, u32)> = Vec::new();
    for (m, c) in p.terms() {
        let mut num = ring.constant(*c as i64);
        let mut e = 0;
        for (i, &k) in m.exponents().iter().enumerate() {
            if k > 0 {
                num = num.checked_mul(&images[i].0.pow(k))?;
                e += images[i].1 * k;
            }
        }
        parts.push((num, e));
    }
    let top = parts.iter().map(|p| p.1).max().unwrap_or(0);
    let mut acc = ring.zero();
    for (num, e) in parts {
        acc = &acc + &(&num * &d.pow(top - e));
    }
    Ok((acc, top))
}

/// An isomorphism `A_s ≅ B_t`: `forward` sends the variables of `B` into
/// `A_s`, `backward` the variables of `A` into `B_t`.
#[derive(Clone, Debug)]
pub struct IsoWitness {
    a: Side,
    b: Side,
    forward: Vec<Poly>,
    backward: Vec<Poly>,
    /// Inverse of the image of `t` in `A_s`, and of `s` in `B_t`.
    t_inv: Option<Poly>,
    s_inv: Option<Poly>,
    certified: bool,
    failure: Option<String>,
    bad_dims: (i64, i64),
}

impl IsoWitness {
    /// Builds a witness from images written as `num / s^e` and `num / t^e`
    /// and runs the certification.
    pub fn from_fractions(
        a: &AffineAlgebra,
        b: &AffineAlgebra,
        s: &Poly,
        t: &Poly,
        forward: &[(Poly, u32)],
        backward: &[(Poly, u32)],
    ) -> Result<IsoWitness> {
        let sa = Side::new(a, s)?;
        let sb = Side::new(b, t)?;
        if forward.len() != b.ring().nvars() || backward.len() != a.ring().nvars() {
            return Err(Error::Structural("one image per variable is required".into()));
        }
        for (f, _) in forward {
            a.ring().check_same(f.ring())?;
        }
        for (f, _) in backward {
            b.ring().check_same(f.ring())?;
        }
        let fw = forward.iter().map(|(n, e)| sa.from_fraction(n, *e)).collect();
        let bw = backward.iter().map(|(n, e)| sb.from_fraction(n, *e)).collect();
        IsoWitness::certify(sa, sb, fw, bw)
    }

    fn certify(a: Side, b: Side, forward: Vec<Poly>, backward: Vec<Poly>) -> Result<IsoWitness> {
        let bad_dims = (
            a.alg.ideal.sum(&Ideal::new(a.alg.ring(), vec![a.den.clone()])?)?.krull_dim()?,
            b.alg.ideal.sum(&Ideal::new(b.alg.ring(), vec![b.den.clone()])?)?.krull_dim()?,
        );
        let mut w = IsoWitness {
            a,
            b,
            forward,
            backward,
            t_inv: None,
            s_inv: None,
            certified: false,
            failure: None,
            bad_dims,
        };
        w.failure = w.first_failure()?;
        w.certified = w.failure.is_none();
        Ok(w)
    }

    fn first_failure(&mut self) -> Result<Option<String>> {
        let (a, b) = (&self.a, &self.b);
        for g in b.alg.ideal.gens() {
            if !a.rel.contains(&g.substitute(&self.forward)?)? {
                return Ok(Some(format!("forward map does not respect the relation {g}")));
            }
        }
        for g in a.alg.ideal.gens() {
            if !b.rel.contains(&g.substitute(&self.backward)?)? {
                return Ok(Some(format!("backward map does not respect the relation {g}")));
            }
        }
        let t_img = b.den.substitute(&self.forward)?;
        self.t_inv = a.inverse_of(&t_img)?;
        let t_inv = match &self.t_inv {
            Some(x) => x.clone(),
            None => return Ok(Some(format!("image of {} is not a unit", b.den))),
        };
        let s_img = a.den.substitute(&self.backward)?;
        self.s_inv = b.inverse_of(&s_img)?;
        let s_inv = match &self.s_inv {
            Some(x) => x.clone(),
            None => return Ok(Some(format!("image of {} is not a unit", a.den))),
        };
        let mut fw_full = self.forward.clone();
        fw_full.push(t_inv);
        let mut bw_full = self.backward.clone();
        bw_full.push(s_inv);
        for (i, h) in self.backward.iter().enumerate() {
            let back = h.substitute(&fw_full)?;
            if !a.rel.contains(&(&back - &a.loc.var(a.map[i])))? {
                let name = &a.alg.ring().var_names()[i];
                return Ok(Some(format!("{name} does not return to itself")));
            }
        }
        for (j, h) in self.forward.iter().enumerate() {
            let back = h.substitute(&bw_full)?;
            if !b.rel.contains(&(&back - &b.loc.var(b.map[j])))? {
                let name = &b.alg.ring().var_names()[j];
                return Ok(Some(format!("{name} does not return to itself")));
            }
        }
        Ok(None)
    }

    pub fn source(&self) -> &AffineAlgebra {
        &self.a.alg
    }

    pub fn target(&self) -> &AffineAlgebra {
        &self.b.alg
    }

    pub fn s(&self) -> &Poly {
        &self.a.den
    }

    pub fn t(&self) -> &Poly {
        &self.b.den
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn failure(&self) -> Option<&str> {
        self.failure.as_deref()
    }

    pub fn bad_dims(&self) -> (i64, i64) {
        self.bad_dims
    }

    pub fn is_global(&self) -> bool {
        self.a.is_global() && self.b.is_global()
    }

    /// Images of `B`'s variables as `num / s^e`.
    pub fn forward_fractions(&self) -> Vec<(Poly, u32)> {
        self.forward.iter().map(|h| self.a.to_fraction(h)).collect()
    }

    /// Images of `A`'s variables as `num / t^e`.
    pub fn backward_fractions(&self) -> Vec<(Poly, u32)> {
        self.backward.iter().map(|h| self.b.to_fraction(h)).collect()
    }

    /// The same isomorphism read from `B` to `A`.
    pub fn reverse(&self) -> IsoWitness {
        IsoWitness {
            a: self.b.clone(),
            b: self.a.clone(),
            forward: self.backward.clone(),
            backward: self.forward.clone(),
            t_inv: self.s_inv.clone(),
            s_inv: self.t_inv.clone(),
            certified: self.certified,
            failure: self.failure.clone(),
            bad_dims: (self.bad_dims.1, self.bad_dims.0),
        }
    }

    /// The chart of `A` at level `k`.
    pub fn source_level(&self, k: i64) -> Result<QuotientLevel> {
        QuotientLevel::new(self.a.alg.chart()?, k)
    }

    /// The chart on which transported modules live: `B` itself for a global
    /// witness, `B_t` otherwise.
    pub fn target_level(&self, k: i64) -> Result<QuotientLevel> {
        let chart = if self.b.is_global() {
            self.b.alg.chart()?
        } else {
            Chart::new(self.b.rel.clone())?
        };
        QuotientLevel::new(chart, k)
    }

    fn backward_images(&self) -> Result<Vec<Poly>> {
        if self.b.is_global() {
            self.backward.iter().map(|h| self.b.flatten(h)).collect()
        } else {
            Ok(self.backward.clone())
        }
    }

    fn target_relations(&self) -> Vec<Poly> {
        if self.b.is_global() {
            self.b.alg.ideal.gens().to_vec()
        } else {
            self.b.rel.gens().to_vec()
        }
    }

    pub fn render(&self) -> String {
        let show = |fr: Vec<(Poly, u32)>, den: &Poly, names: &[String]| -> String {
            fr.iter()
                .zip(names)
                .map(|((n, e), v)| format!("{v} -> {}", fmt_fraction(n, den, *e)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!(
            "s = {}, t = {}, forward [{}], backward [{}]",
            self.a.den,
            self.b.den,
            show(self.forward_fractions(), &self.a.den, self.b.alg.ring().var_names()),
            show(self.backward_fractions(), &self.b.den, self.a.alg.ring().var_names()),
        )
    }
}

fn wrap(p: &Poly) -> String {
    if p.terms().len() > 1 {
        format!("({p})")
    } else {
        p.to_string()
    }
}

/// `num / den^e` in session syntax.
pub fn fmt_fraction(num: &Poly, den: &Poly, e: u32) -> String {
    if e == 0 || den.is_one() {
        return num.to_string();
    }
    let d = den.pow(e);
    format!("{}/{}", wrap(num), wrap(&d))
}

/// Extends the map `B -> A_P` given by `gen_images` (one fraction per
/// variable of `B`) to an isomorphism of open charts.
pub fn extend_local_iso(
    a: &AffineAlgebra,
    b: &AffineAlgebra,
    gen_images: &[(Poly, Poly)],
    p: &PrimeWitness,
    q: &PrimeWitness,
) -> Result<IsoWitness> {
    let ra = a.ring();
    let rb = b.ring();
    if gen_images.len() != rb.nvars() {
        return Err(Error::Structural(format!(
            "{} images for {} variables",
            gen_images.len(),
            rb.nvars()
        )));
    }
    let dens: Vec<Poly> = gen_images.iter().map(|(_, d)| d.clone()).collect();
    let s = reduced_product(ra, &dens);
    let forward: Vec<(Poly, u32)> = gen_images
        .iter()
        .map(|(n, d)| over_power(n, d, &s))
        .collect::<Result<_>>()?;

    for g in q.ideal().gens() {
        let (num, _) = substitute_fraction(g, &forward, &s)?;
        if !p.ideal().sum(a.ideal())?.contains(&num)? {
            return Err(Error::NotLocalIso(format!("image of {g} is not in the prime")));
        }
    }

    let backward_raw = backward_search(a, b, &forward, &s)?;
    let t0 = reduced_product(rb, &backward_raw.iter().map(|(_, h)| h.clone()).collect::<Vec<_>>());
    let bw0: Vec<(Poly, u32)> = backward_raw
        .iter()
        .map(|(g, h)| over_power(g, h, &t0))
        .collect::<Result<_>>()?;
    let (s_num, _) = substitute_fraction(&s, &bw0, &t0)?;
    let mut factors: Vec<Poly> = backward_raw.iter().map(|(_, h)| h.clone()).collect();
    factors.push(s_num);
    let t = reduced_product(rb, &factors);
    let backward: Vec<(Poly, u32)> = backward_raw
        .iter()
        .map(|(g, h)| over_power(g, h, &t))
        .collect::<Result<_>>()?;

    let w = IsoWitness::from_fractions(a, b, &s, &t, &forward, &backward)?;
    if let Some(f) = w.failure() {
        return Err(Error::NotLocalIso(f.to_string()));
    }

    // degree one at P: the images of Q generate P locally
    let mut j_gens: Vec<Poly> = a.ideal().gens().to_vec();
    for g in q.ideal().gens() {
        j_gens.push(substitute_fraction(g, &forward, &s)?.0);
    }
    let target = FPModule::cyclic(&Ideal::new(ra, j_gens)?);
    let pg = p.ideal().gens();
    let row = Matrix::from_rows(ra, 1, pg.len(), vec![pg.to_vec()])?;
    let phi = ModuleMap::new(&FPModule::free(ra, pg.len()), &target, row)?;
    if !pg.is_empty() && !stalk_zero_test(&phi, p)? {
        return Err(Error::NotLocalIso("the map is not of degree one at P".into()));
    }
    Ok(w)
}

/// For each variable `x_i` of `A`, a relation `h x_i - g` with `g, h` in
/// `B` on the graph of the forward map.
fn backward_search(
    a: &AffineAlgebra,
    b: &AffineAlgebra,
    forward: &[(Poly, u32)],
    s: &Poly,
) -> Result<Vec<(Poly, Poly)>> {
    let ra = a.ring();
    let rb = b.ring();
    let na = ra.nvars();
    let nb = rb.nvars();
    let p = ra.modulus() as u64;
    let mut names: Vec<String> = (0..na).map(|i| format!("a{i}")).collect();
    names.push("w".into());
    names.extend((0..nb).map(|j| format!("b{j}")));
    let graph_ring = Ring::new(p, &names, MonomialOrder::GrevLex)?;
    let a_map: Vec<usize> = (0..na).collect();
    let b_map: Vec<usize> = (na + 1..na + 1 + nb).collect();
    let w = graph_ring.var(na);
    let sa = s.map_vars(&graph_ring, &a_map);
    let mut gens: Vec<Poly> = a.ideal().gens().iter().map(|g| g.map_vars(&graph_ring, &a_map)).collect();
    gens.extend(b.ideal().gens().iter().map(|g| g.map_vars(&graph_ring, &b_map)));
    gens.push(&(&sa * &w) - &graph_ring.one());
    for (j, (num, e)) in forward.iter().enumerate() {
        let lhs = &sa.pow(*e) * &graph_ring.var(na + 1 + j);
        gens.push(&lhs - &num.map_vars(&graph_ring, &a_map));
    }
    let graph = Ideal::new(&graph_ring, gens)?;

    let mut out = Vec::new();
    for i in 0..na {
        let drop: Vec<usize> = (0..=na).filter(|&l| l != i).collect();
        let elim = graph.eliminate(&drop)?;
        // order with x_i first, then B's variables
        let mut sub_names = vec![names[i].clone()];
        sub_names.extend(names[na + 1..].iter().cloned());
        let sub = Ring::new(p, &sub_names, MonomialOrder::Elim(1))?;
        let mut to_sub = vec![0usize; graph_ring.nvars()];
        to_sub[i] = 0;
        for j in 0..nb {
            to_sub[na + 1 + j] = 1 + j;
        }
        let sub_gens: Vec<Poly> = elim.gens().iter().map(|g| g.map_vars(&sub, &to_sub)).collect();
        let sub_ideal = Ideal::new(&sub, sub_gens)?;
        let mut best: Option<(Poly, Poly)> = None;
        for g in sub_ideal.groebner_basis()? {
            if g.degree_in(0) != 1 {
                continue;
            }
            let mut h_terms = Vec::new();
            let mut r_terms = Vec::new();
            for (m, c) in g.terms() {
                let rest = Monomial::from_exponents(&m.exponents()[1..]);
                if m.exponents()[0] == 1 {
                    h_terms.push((rest, *c));
                } else {
                    r_terms.push((rest, crate::arith::neg_mod(*c, rb.modulus())));
                }
            }
            let h = Poly::from_terms(rb, h_terms);
            let g0 = Poly::from_terms(rb, r_terms);
            let better = match &best {
                None => true,
                Some((_, bh)) => h.total_degree() < bh.total_degree(),
            };
            if better {
                best = Some((g0, h));
            }
        }
        match best {
            Some(pair) => out.push(pair),
            None => {
                return Err(Error::NotLocalIso(format!(
                    "no preimage found for {}",
                    ra.var_names()[i]
                )))
            }
        }
    }
    Ok(out)
}

/// Verdict and reason; true iff certified and both removed loci have
/// dimension at most `k - 1`.
pub fn verify_iso_witness(w: &IsoWitness, k: i64) -> (bool, String) {
    if let Some(f) = &w.failure {
        return (false, f.clone());
    }
    let (da, db) = w.bad_dims;
    if da > k - 1 || db > k - 1 {
        return (
            false,
            format!("removed loci have dimensions ({da}, {db}), must be at most {}", k - 1),
        );
    }
    (true, format!("certified; removed loci have dimensions ({da}, {db})"))
}

/// Whether the two witnesses agree after inverting all denominators.
pub fn witnesses_agree(w1: &IsoWitness, w2: &IsoWitness) -> Result<bool> {
    if !w1.a.alg.same_as(&w2.a.alg)? || !w1.b.alg.same_as(&w2.b.alg)? {
        return Err(Error::Structural("witnesses between different algebras".into()));
    }
    Ok(fractions_agree(&w1.a.alg, w1.s(), w2.s(), &w1.forward_fractions(), &w2.forward_fractions())?
        && fractions_agree(
            &w1.b.alg,
            w1.t(),
            w2.t(),
            &w1.backward_fractions(),
            &w2.backward_fractions(),
        )?)
}

fn fractions_agree(
    alg: &AffineAlgebra,
    d1: &Poly,
    d2: &Poly,
    f1: &[(Poly, u32)],
    f2: &[(Poly, u32)],
) -> Result<bool> {
    let side = Side::new(alg, &(d1 * d2))?;
    for ((n1, e1), (n2, e2)) in f1.iter().zip(f2) {
        let x1 = side.from_fraction(&(n1 * &d2.pow(*e1)), *e1);
        let x2 = side.from_fraction(&(n2 * &d1.pow(*e2)), *e2);
        if !side.rel.contains(&(&x1 - &x2))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn transport_matrix(w: &IsoWitness, m: &Matrix, images: &[Poly]) -> Result<Matrix> {
    let ring = images
        .first()
        .map(|p| p.ring().clone())
        .unwrap_or_else(|| w.b.loc.clone());
    m.map_entries(&ring, |p| p.substitute(images))
}

/// `M ⊗_A B_t`: substitutes the backward images into the presentation and
/// adjoins the relations of `B_t`.
pub fn transport_module(w: &IsoWitness, m: &FPModule) -> Result<FPModule> {
    if !w.certified {
        return Err(Error::UncertifiedWitness);
    }
    w.a.alg.ring().check_same(m.ring())?;
    let images = w.backward_images()?;
    let ring = if w.b.is_global() {
        w.b.alg.ring().clone()
    } else {
        w.b.loc.clone()
    };
    let pres = if images.is_empty() {
        Matrix::zero(&ring, m.ngens(), m.presentation().cols())
    } else {
        transport_matrix(w, m.presentation(), &images)?
    };
    let n = m.ngens();
    let mut extra = Matrix::zero(&ring, n, 0);
    for g in w.target_relations() {
        extra = extra.hconcat(&Matrix::identity(&ring, n).scale(&g))?;
    }
    Ok(FPModule::new(pres.hconcat(&extra)?))
}

pub fn transport_map(w: &IsoWitness, phi: &ModuleMap) -> Result<ModuleMap> {
    let source = transport_module(w, phi.source())?;
    let target = transport_module(w, phi.target())?;
    let images = w.backward_images()?;
    let matrix = transport_matrix(w, phi.matrix(), &images)?;
    if phi.is_certified() {
        Ok(ModuleMap::trusted(source, target, matrix))
    } else {
        ModuleMap::new(&source, &target, matrix)
    }
}

/// Disagreements between zero and weak-equivalence verdicts before and
/// after transport.
#[derive(Clone, Debug, Default)]
pub struct EquivReport {
    pub checked: usize,
    pub disagreements: Vec<String>,
}

pub fn quotient_equiv_check(w: &IsoWitness, k: i64, sample: &[ModuleMap]) -> Result<EquivReport> {
    let (ok, reason) = verify_iso_witness(w, k);
    if !ok {
        return Err(Error::VerificationFailed(reason));
    }
    let la = w.source_level(k)?;
    let lb = w.target_level(k)?;
    let verdicts: Vec<Option<String>> = sample
        .par_iter()
        .enumerate()
        .map(|(i, phi)| {
            let moved = transport_map(w, phi)?;
            let za = is_zero_in_quotient(phi, &la)?;
            let zb = is_zero_in_quotient(&moved, &lb)?;
            let wa = is_weak_equivalence(phi, &la)?;
            let wb = is_weak_equivalence(&moved, &lb)?;
            Ok(if za != zb || wa != wb {
                Some(format!(
                    "map {i}: zero {za} vs {zb}, weak equivalence {wa} vs {wb}"
                ))
            } else {
                None
            })
        })
        .collect::<Result<_>>()?;
    Ok(EquivReport {
        checked: sample.len(),
        disagreements: verdicts.into_iter().flatten().collect(),
    })
}

/// Composite of `inner: A -> B` followed by `outer: B -> C`.
pub fn compose_witnesses(outer: &IsoWitness, inner: &IsoWitness) -> Result<IsoWitness> {
    if !inner.b.alg.same_as(&outer.a.alg)? {
        return Err(Error::Structural("witnesses are not composable".into()));
    }
    let a = &inner.a.alg;
    let c = &outer.b.alg;
    // forward: C's variables -> B_{s_outer} -> A_{s_inner}
    let (fw, s) = compose_fractions(
        &outer.forward_fractions(),
        outer.s(),
        &inner.forward_fractions(),
        inner.s(),
        a.ring(),
    )?;
    // backward: A's variables -> B_{t_inner} -> C_{t_outer}
    let (bw, t) = compose_fractions(
        &inner.backward_fractions(),
        inner.t(),
        &outer.backward_fractions(),
        outer.t(),
        c.ring(),
    )?;
    IsoWitness::from_fractions(a, c, &s, &t, &fw, &bw)
}

/// Substitutes `second` (fractions over `d2`) into `first` (fractions over
/// `d1`), returning fractions over a common reduced denominator.
fn compose_fractions(
    first: &[(Poly, u32)],
    d1: &Poly,
    second: &[(Poly, u32)],
    d2: &Poly,
    ring: &Ring,
) -> Result<(Vec<(Poly, u32)>, Poly)> {
    let (d1_num, d1_e) = substitute_fraction(d1, second, d2)?;
    let d = reduced_product(ring, &[d2.clone(), d1_num.clone()]);
    let mut out = Vec::new();
    for (n, e) in first {
        let (nn, ne) = substitute_fraction(n, second, d2)?;
        // (nn / d2^ne) / (d1_num / d2^d1_e)^e
        let num = &nn * &d2.pow(d1_e * e);
        let den = &d2.pow(ne) * &d1_num.pow(*e);
        out.push(over_power(&num, &den, &d)?);
    }
    Ok((out, d))
}

/// A chart automorphism together with a line bundle, acting by
/// `F ↦ (f^{-1})^* F ⊗ L`.
#[derive(Clone, Debug)]
pub struct AutoEq {
    witness: IsoWitness,
    line: FPModule,
}

impl AutoEq {
    pub fn new(witness: IsoWitness, line: FPModule, level: &QuotientLevel) -> Result<AutoEq> {
        if !witness.a.alg.same_as(&witness.b.alg)? {
            return Err(Error::Structural("autoequivalence witness must be a self-map".into()));
        }
        let (ok, reason) = verify_iso_witness(&witness, level.k());
        if !ok {
            return Err(Error::VerificationFailed(reason));
        }
        if !pic_member(&line, level)? {
            return Err(Error::VerificationFailed(
                "L is not invertible away from the small locus".into(),
            ));
        }
        Ok(AutoEq { witness, line })
    }

    pub fn witness(&self) -> &IsoWitness {
        &self.witness
    }

    pub fn line(&self) -> &FPModule {
        &self.line
    }
}

fn line_on_target(e: &AutoEq) -> Result<FPModule> {
    if e.witness.b.is_global() {
        Ok(e.line.clone())
    } else {
        Ok(localize(&e.line, e.witness.t())?.module().clone())
    }
}

pub fn autoeq_apply(e: &AutoEq, m: &FPModule) -> Result<FPModule> {
    transport_module(&e.witness, m)?.tensor(&line_on_target(e)?)
}

/// `e1 ∘ e2`: first `e2`, then `e1`.
pub fn autoeq_compose(e1: &AutoEq, e2: &AutoEq, level: &QuotientLevel) -> Result<AutoEq> {
    if !e1.witness.is_global() || !e2.witness.is_global() {
        return Err(Error::Unsupported(
            "composition of autoequivalences with localized witnesses".into(),
        ));
    }
    let witness = compose_witnesses(&e1.witness, &e2.witness)?;
    let line = transport_module(&e1.witness, &e2.line)?.tensor(&e1.line)?;
    AutoEq::new(witness, line, level)
}

/// `(f^{-1}, f^*(L^∨))`.
pub fn autoeq_inverse(e: &AutoEq, level: &QuotientLevel) -> Result<AutoEq> {
    let rev = e.witness.reverse();
    let dual = hom_module(&e.line, &FPModule::free(e.line.ring(), 1))?.module;
    let line = transport_module(&rev, &dual)?;
    AutoEq::new(rev, line, level)
}

/// The evaluation map `M ⊗ f^*L ⊗ f^*(L^∨) -> M` comparing
/// `apply(e^{-1}, apply(e, M))` with `M` for a global self-map.
pub fn inverse_comparison(e: &AutoEq, m: &FPModule, level: &QuotientLevel) -> Result<ModuleMap> {
    let inv = autoeq_inverse(e, level)?;
    let round = autoeq_apply(&inv, &autoeq_apply(e, m)?)?;
    let rev = e.witness.reverse();
    let dual = hom_module(&e.line, &FPModule::free(e.line.ring(), 1))?;
    let nl = e.line.ngens();
    let nh = dual.module.ngens();
    let ring = m.ring();
    let n = m.ngens();
    let images = rev.backward_images()?;
    let mut mat = Matrix::zero(ring, n, n * nl * nh);
    for k in 0..nh {
        let psi = dual.generator_map(k)?;
        for j in 0..nl {
            let val = psi.matrix().get(0, j).substitute(&images)?;
            for i in 0..n {
                mat.set(i, (i * nl + j) * nh + k, val.clone());
            }
        }
    }
    ModuleMap::new(&round, m, mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpmod::{is_iso, module_dim};
    use crate::serrequot::Roof;

    fn r2() -> Ring {
        Ring::new(32003, &["x", "y"], MonomialOrder::GrevLex).unwrap()
    }

    fn r1() -> Ring {
        Ring::new(32003, &["u"], MonomialOrder::GrevLex).unwrap()
    }

    fn p(r: &Ring, s: &str) -> Poly {
        r.parse_poly(s).unwrap()
    }

    fn cusp() -> (AffineAlgebra, AffineAlgebra, IsoWitness) {
        let ra = r2();
        let rb = r1();
        let a = AffineAlgebra::new(Ideal::parse(&ra, &["y^2 - x^3"]).unwrap()).unwrap();
        let b = AffineAlgebra::polynomial(&rb);
        let pa = PrimeWitness::new(a.ideal().clone()).unwrap();
        let qb = PrimeWitness::new(Ideal::zero(&rb)).unwrap();
        let w = extend_local_iso(&a, &b, &[(p(&ra, "y"), p(&ra, "x"))], &pa, &qb).unwrap();
        (a, b, w)
    }

    #[test]
    fn cusp_witness() {
        let (_, _, w) = cusp();
        let rb = r1();
        let ra = r2();
        assert!(w.is_certified());
        assert_eq!(w.s(), &p(&ra, "x"));
        assert_eq!(w.t(), &p(&rb, "u"));
        let bw = w.backward_fractions();
        assert_eq!(bw[0], (p(&rb, "u^2"), 0));
        assert_eq!(bw[1], (p(&rb, "u^3"), 0));
        assert_eq!(w.bad_dims(), (0, 0));
        assert!(verify_iso_witness(&w, 1).0);
        assert!(!verify_iso_witness(&w, 0).0);
        assert_eq!(verify_iso_witness(&w.reverse(), 1).0, verify_iso_witness(&w, 1).0);
        assert_eq!(
            w.render(),
            "s = x, t = u, forward [u -> y/x], backward [x -> u^2, y -> u^3]"
        );
    }

    #[test]
    fn identity_and_linear_witnesses() {
        let r = r2();
        let a = AffineAlgebra::polynomial(&r);
        let pw = PrimeWitness::new(Ideal::zero(&r)).unwrap();
        let ids = vec![(p(&r, "x"), r.one()), (p(&r, "y"), r.one())];
        let w = extend_local_iso(&a, &a, &ids, &pw, &pw).unwrap();
        assert!(w.is_certified() && w.s().is_one() && w.t().is_one());
        let lin = vec![(p(&r, "x + y"), r.one()), (p(&r, "y"), r.one())];
        let w = extend_local_iso(&a, &a, &lin, &pw, &pw).unwrap();
        assert!(w.is_certified() && w.is_global());
        assert_eq!(w.backward_fractions()[0].0, p(&r, "x - y"));
        assert!(verify_iso_witness(&w, 0).0);
    }

    #[test]
    fn inversion_needs_a_denominator() {
        let r = Ring::new(32003, &["x"], MonomialOrder::GrevLex).unwrap();
        let a = AffineAlgebra::polynomial(&r);
        let pw = PrimeWitness::new(Ideal::zero(&r)).unwrap();
        let w = extend_local_iso(&a, &a, &[(r.one(), p(&r, "x"))], &pw, &pw).unwrap();
        assert!(w.is_certified());
        assert_eq!(w.t(), &p(&r, "x"));
        assert_eq!(w.bad_dims(), (0, 0));
    }

    #[test]
    fn failing_identity_is_reported() {
        let r = r2();
        let a = AffineAlgebra::polynomial(&r);
        let fw = vec![(p(&r, "x"), 0), (p(&r, "y"), 0)];
        let bw = vec![(p(&r, "y"), 0), (p(&r, "y"), 0)];
        let w = IsoWitness::from_fractions(&a, &a, &r.one(), &r.one(), &fw, &bw).unwrap();
        let (ok, reason) = verify_iso_witness(&w, 2);
        assert!(!ok);
        assert!(reason.contains("does not return"));
        assert!(matches!(
            transport_module(&w, &FPModule::free(&r, 1)),
            Err(Error::UncertifiedWitness)
        ));
    }

    #[test]
    fn denominators_agree_on_overlaps() {
        let (a, b, w) = cusp();
        let ra = r2();
        let pa = PrimeWitness::new(a.ideal().clone()).unwrap();
        let qb = PrimeWitness::new(Ideal::zero(b.ring())).unwrap();
        let w2 = extend_local_iso(
            &a,
            &b,
            &[(p(&ra, "x*y + y"), p(&ra, "x^2 + x"))],
            &pa,
            &qb,
        )
        .unwrap();
        assert!(w2.is_certified());
        assert!(witnesses_agree(&w, &w2).unwrap());
    }

    #[test]
    fn transport_along_cusp() {
        let (a, _, w) = cusp();
        let ra = r2();
        let m = FPModule::cyclic(&a.ideal().sum(&Ideal::parse(&ra, &["x"]).unwrap()).unwrap());
        let moved = transport_module(&w, &m).unwrap();
        assert!(moved.is_zero().unwrap());
        let free = FPModule::cyclic(a.ideal());
        let proj = ModuleMap::new(&free, &m, Matrix::identity(&ra, 1)).unwrap();
        let id = ModuleMap::identity(&free);
        let report = quotient_equiv_check(&w, 1, &[proj, id]).unwrap();
        assert_eq!(report.checked, 2);
        assert!(report.disagreements.is_empty());
        assert!(quotient_equiv_check(&w, 0, &[]).is_err());
        assert_eq!(module_dim(&transport_module(&w, &free).unwrap()).unwrap(), 1);
    }

    fn swap(r: &Ring) -> IsoWitness {
        let a = AffineAlgebra::polynomial(r);
        let im = vec![(p(r, "y"), 0), (p(r, "x"), 0)];
        IsoWitness::from_fractions(&a, &a, &r.one(), &r.one(), &im, &im).unwrap()
    }

    #[test]
    fn swap_transport_and_action() {
        let r = r2();
        let w = swap(&r);
        let m = FPModule::cyclic(&Ideal::parse(&r, &["x"]).unwrap());
        let moved = transport_module(&w, &m).unwrap();
        assert_eq!(moved.render().unwrap(), "R/(y)");
        let l1 = QuotientLevel::new(Chart::affine(&r), 1).unwrap();
        let e = AutoEq::new(w.clone(), FPModule::free(&r, 1), &l1).unwrap();
        assert_eq!(autoeq_apply(&e, &m).unwrap().render().unwrap(), "R/(y)");
        let ee = autoeq_compose(&e, &e, &l1).unwrap();
        assert_eq!(autoeq_apply(&ee, &m).unwrap().render().unwrap(), "R/(x)");
    }

    #[test]
    fn line_bundle_action() {
        let r = r2();
        let l1 = QuotientLevel::new(Chart::affine(&r), 1).unwrap();
        let a = AffineAlgebra::polynomial(&r);
        let im = vec![(p(&r, "x"), 0), (p(&r, "y"), 0)];
        let id = IsoWitness::from_fractions(&a, &a, &r.one(), &r.one(), &im, &im).unwrap();
        let ideal = FPModule::from_ideal(&Ideal::parse(&r, &["x", "y"]).unwrap()).unwrap();
        let e = AutoEq::new(id.clone(), ideal.clone(), &l1).unwrap();
        let m = FPModule::cyclic(&Ideal::parse(&r, &["x"]).unwrap());
        let twice = autoeq_apply(&e, &autoeq_apply(&e, &m).unwrap()).unwrap();
        let both = AutoEq::new(id, ideal.tensor(&ideal).unwrap(), &l1).unwrap();
        let once = autoeq_apply(&both, &m).unwrap();
        let n = once.ngens();
        let cmp = ModuleMap::new(&twice, &once, Matrix::identity(&r, n)).unwrap();
        assert!(crate::serrequot::roof_is_iso(&Roof::from_map(&cmp, &l1)).unwrap());

        let back = inverse_comparison(&e, &m, &l1).unwrap();
        assert!(is_weak_equivalence(&back, &l1).unwrap());
        let free = FPModule::free(&r, 1);
        let back = inverse_comparison(&e, &free, &l1).unwrap();
        assert!(is_weak_equivalence(&back, &l1).unwrap());
        assert!(!is_iso(&back).unwrap());
    }
}
