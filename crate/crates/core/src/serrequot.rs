//! The quotient `C_k(X) = Coh(X) / Coh_{<= k-1}(X)` on an affine chart:
//! smallness, weak equivalences, roofs, minimal objects, residue-field
//! fractions, k-supports, line bundles away from small loci and quotient
//! Hom-sections.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{Monomial, Poly, Ring};
use crate::error::{Error, Result};
use crate::fpmod::{
    annihilator, cokernel, fitting_ideal, hom_module, image, is_iso, kernel, module_dim,
    torsion_free_quotient, torsion_wrt, FPModule, HomModule, ModuleMap,
};
use crate::groebner::{FreeVector, Ideal};
use crate::matrix::Matrix;

/// `X = Spec R/I`.
#[derive(Clone, Debug)]
pub struct Chart {
    ideal: Ideal,
    dim: i64,
}

impl Chart {
    pub fn new(ideal: Ideal) -> Result<Chart> {
        let dim = ideal.krull_dim()?;
        if dim < 0 {
            return Err(Error::InvalidRing("the chart is empty".into()));
        }
        Ok(Chart { ideal, dim })
    }

    /// Affine space over `ring`.
    pub fn affine(ring: &Ring) -> Chart {
        Chart {
            ideal: Ideal::zero(ring),
            dim: ring.nvars() as i64,
        }
    }

    pub fn ring(&self) -> &Ring {
        self.ideal.ring()
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn dim(&self) -> i64 {
        self.dim
    }

    /// The structure sheaf `R/I`.
    pub fn structure_sheaf(&self) -> FPModule {
        FPModule::cyclic(&self.ideal)
    }

    /// `(R/I)^n`
    pub fn free(&self, n: usize) -> FPModule {
        FPModule::free_over(&self.ideal, n)
    }

    /// Runs the primality probes on the defining ideal.
    pub fn integrality(&self) -> Result<PrimeWitness> {
        PrimeWitness::new(self.ideal.clone()).map_err(|e| match e {
            Error::NotPrime(msg) => Error::IntegralityRequired(msg),
            other => other,
        })
    }
}

/// A dimension level `k` on a chart; the small objects are the modules of
/// dimension at most `k - 1`.
#[derive(Clone, Debug)]
pub struct QuotientLevel {
    k: i64,
    chart: Chart,
}

impl QuotientLevel {
    pub fn new(chart: Chart, k: i64) -> Result<QuotientLevel> {
        if k < 0 || k > chart.dim + 1 {
            return Err(Error::Structural(format!(
                "level k = {k} outside 0..={}",
                chart.dim + 1
            )));
        }
        Ok(QuotientLevel { k, chart })
    }

    /// The level of codimension `c`: `k = dim X - c`.
    pub fn from_codim(chart: Chart, c: i64) -> Result<QuotientLevel> {
        let k = chart.dim - c;
        QuotientLevel::new(chart, k)
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn codim(&self) -> i64 {
        self.chart.dim - self.k
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn ring(&self) -> &Ring {
        self.chart.ring()
    }

    fn same_level(&self, other: &QuotientLevel) -> Result<()> {
        if self.k != other.k {
            return Err(Error::LevelMismatch(self.k, other.k));
        }
        self.ring().check_same(other.ring())
    }
}

pub fn codim_to_k(chart: &Chart, c: i64) -> i64 {
    chart.dim - c
}

pub fn k_to_codim(chart: &Chart, k: i64) -> i64 {
    chart.dim - k
}

/// `M ≡ 0` in `C_k`.
pub fn is_small(m: &FPModule, level: &QuotientLevel) -> Result<bool> {
    Ok(module_dim(m)? <= level.k - 1)
}

/// Dimensions of kernel and cokernel.
pub fn weq_dims(phi: &ModuleMap) -> Result<(i64, i64)> {
    let coker_dim = module_dim(&cokernel(phi)?)?;
    let (k, _) = kernel(phi)?;
    Ok((module_dim(&k)?, coker_dim))
}

pub fn is_weak_equivalence(phi: &ModuleMap, level: &QuotientLevel) -> Result<bool> {
    if !is_small(&cokernel(phi)?, level)? {
        return Ok(false);
    }
    is_small(&kernel(phi)?.0, level)
}

pub fn is_zero_in_quotient(phi: &ModuleMap, level: &QuotientLevel) -> Result<bool> {
    is_small(&image(phi)?.0, level)
}

fn same_module(a: &FPModule, b: &FPModule) -> Result<bool> {
    if a.is_same(b) {
        return Ok(true);
    }
    if a.ngens() != b.ngens() || a.ring() != b.ring() {
        return Ok(false);
    }
    Ok(a.relations().contains_all(b.relations())? && b.relations().contains_all(a.relations())?)
}

fn require_same(a: &FPModule, b: &FPModule, what: &str) -> Result<()> {
    if same_module(a, b)? {
        Ok(())
    } else {
        Err(Error::Structural(format!("{what} do not match")))
    }
}

/// A span `F <-s- E -t-> G` with `s` a weak equivalence, representing
/// `t ∘ s^{-1}: F -> G` in `C_k`.
#[derive(Clone, Debug)]
pub struct Roof {
    level: QuotientLevel,
    s: ModuleMap,
    t: ModuleMap,
}

impl Roof {
    pub fn level(&self) -> &QuotientLevel {
        &self.level
    }

    pub fn apex(&self) -> &FPModule {
        self.s.source()
    }

    pub fn s(&self) -> &ModuleMap {
        &self.s
    }

    pub fn t(&self) -> &ModuleMap {
        &self.t
    }

    pub fn source(&self) -> &FPModule {
        self.s.target()
    }

    pub fn target(&self) -> &FPModule {
        self.t.target()
    }

    pub fn identity(f: &FPModule, level: &QuotientLevel) -> Roof {
        let id = ModuleMap::identity(f);
        Roof {
            level: level.clone(),
            s: id.clone(),
            t: id,
        }
    }

    /// The roof `(F, id, φ)` of an honest map.
    pub fn from_map(phi: &ModuleMap, level: &QuotientLevel) -> Roof {
        Roof {
            level: level.clone(),
            s: ModuleMap::identity(phi.source()),
            t: phi.clone(),
        }
    }
}

pub fn roof_make(e: &FPModule, s: &ModuleMap, t: &ModuleMap, level: &QuotientLevel) -> Result<Roof> {
    require_same(s.source(), e, "source of s and the apex")?;
    require_same(t.source(), e, "source of t and the apex")?;
    let (kd, cd) = weq_dims(s)?;
    if kd > level.k - 1 || cd > level.k - 1 {
        return Err(Error::NotWeakEquivalence {
            k: level.k,
            ker_dim: kd,
            coker_dim: cd,
        });
    }
    Ok(Roof {
        level: level.clone(),
        s: s.clone(),
        t: t.clone(),
    })
}

/// `E_1 ×_X E_2` for maps `a: E_1 -> X`, `b: E_2 -> X`, with projections.
fn pullback(a: &ModuleMap, b: &ModuleMap) -> Result<(ModuleMap, ModuleMap)> {
    let sum = a.source().direct_sum(b.source());
    let m = a.matrix().hconcat(&b.matrix().scale(&b.ring().constant(-1)))?;
    let diff = ModuleMap::new(&sum, a.target(), m)?;
    let (p, incl) = kernel(&diff)?;
    let n1 = a.source().ngens();
    let n2 = b.source().ngens();
    let top: Vec<usize> = (0..n1).collect();
    let bottom: Vec<usize> = (n1..n1 + n2).collect();
    let p1 = ModuleMap::new(&p, a.source(), incl.matrix().select_rows(&top))?;
    let p2 = ModuleMap::new(&p, b.source(), incl.matrix().select_rows(&bottom))?;
    Ok((p1, p2))
}

/// `r2 ∘ r1`
pub fn roof_compose(r2: &Roof, r1: &Roof) -> Result<Roof> {
    r1.level.same_level(&r2.level)?;
    require_same(r1.target(), r2.source(), "middle objects")?;
    let (p1, p2) = pullback(&r1.t, &r2.s)?;
    let s = r1.s.compose(&p1)?;
    let t = r2.t.compose(&p2)?;
    let e = p1.source().clone();
    roof_make(&e, &s, &t, &r1.level).map_err(|err| match err {
        Error::NotWeakEquivalence { .. } => Error::VerificationFailed(format!(
            "pullback of a weak equivalence is not one: {err}"
        )),
        other => other,
    })
}

fn common_refinement(r1: &Roof, r2: &Roof) -> Result<(ModuleMap, ModuleMap, ModuleMap)> {
    r1.level.same_level(&r2.level)?;
    require_same(r1.source(), r2.source(), "sources")?;
    require_same(r1.target(), r2.target(), "targets")?;
    let (p1, p2) = pullback(&r1.s, &r2.s)?;
    let a = r1.t.compose(&p1)?;
    let b = r2.t.compose(&p2)?.with_ends(a.source(), a.target())?;
    let u = r1.s.compose(&p1)?;
    Ok((a, b, u))
}

pub fn roof_equal(r1: &Roof, r2: &Roof) -> Result<bool> {
    let (a, b, _) = common_refinement(r1, r2)?;
    is_zero_in_quotient(&a.sub(&b)?, &r1.level)
}

/// `r1 + r2` on the common refinement of the left legs.
pub fn roof_add(r1: &Roof, r2: &Roof) -> Result<Roof> {
    let (a, b, u) = common_refinement(r1, r2)?;
    Ok(Roof {
        level: r1.level.clone(),
        s: u,
        t: a.add(&b)?,
    })
}

pub fn roof_is_zero(r: &Roof) -> Result<bool> {
    is_zero_in_quotient(&r.t, &r.level)
}

pub fn roof_is_iso(r: &Roof) -> Result<bool> {
    is_weak_equivalence(&r.t, &r.level)
}

/// An ideal asserted prime by the caller, with the probe record.
#[derive(Clone, Debug)]
pub struct PrimeWitness {
    ideal: Ideal,
    dim: i64,
    sanity_log: Vec<String>,
}

const PROBE_SEED: u64 = 0x5eed_c0d1;
const RANDOM_PROBES: usize = 32;

fn random_probe(ring: &Ring, rng: &mut ChaCha8Rng) -> Poly {
    let n = ring.nvars();
    let mut terms = Vec::new();
    for _ in 0..rng.gen_range(1..=4) {
        let mut e = vec![0u32; n];
        let deg = rng.gen_range(0..=3);
        for _ in 0..deg {
            e[rng.gen_range(0..n)] += 1;
        }
        terms.push((Monomial::from_exponents(&e), rng.gen_range(1..ring.modulus())));
    }
    Poly::from_terms(ring, terms)
}

impl PrimeWitness {
    /// Probes `(P : f) = P` for the variables, shifted variables `x_i - c`
    /// and seeded random polynomials of degree at most 3 outside `P`; a
    /// zero divisor modulo `P` is a hard error.
    pub fn new(ideal: Ideal) -> Result<PrimeWitness> {
        if ideal.is_unit()? {
            return Err(Error::NotPrime("the unit ideal".into()));
        }
        let dim = ideal.krull_dim()?;
        let ring = ideal.ring().clone();
        let mut probes: Vec<Poly> = Vec::new();
        for i in 0..ring.nvars() {
            probes.push(ring.var(i));
            for c in [1, 2] {
                probes.push(&ring.var(i) - &ring.constant(c));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        for _ in 0..RANDOM_PROBES {
            probes.push(random_probe(&ring, &mut rng));
        }
        let mut log = Vec::new();
        let mut passed = 0;
        for f in probes {
            if f.is_zero() || ideal.contains(&f)? {
                continue;
            }
            let c = ideal.colon(&Ideal::new(&ring, vec![f.clone()])?)?;
            if !c.is_subset_of(&ideal)? {
                let g = c
                    .gens()
                    .iter()
                    .find(|g| !ideal.contains(g).unwrap_or(true))
                    .cloned()
                    .unwrap_or_else(|| ring.zero());
                return Err(Error::NotPrime(format!(
                    "({f}) * ({g}) lies in the ideal but neither factor does"
                )));
            }
            passed += 1;
        }
        log.push(format!("{passed} nonzerodivisor probes passed"));
        Ok(PrimeWitness {
            ideal,
            dim,
            sanity_log: log,
        })
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn dim(&self) -> i64 {
        self.dim
    }

    pub fn sanity_log(&self) -> &[String] {
        &self.sanity_log
    }

    pub fn contains(&self, f: &Poly) -> Result<bool> {
        self.ideal.contains(f)
    }
}

/// The dimension-`d` parts of the support, for `d >= k`.
#[derive(Clone, Debug)]
pub struct SuppProfile {
    pub entries: Vec<(i64, Ideal)>,
}

pub fn supp_k(m: &FPModule, level: &QuotientLevel) -> Result<SuppProfile> {
    let mut entries = Vec::new();
    let dim = module_dim(m)?;
    if dim <= level.k - 1 {
        return Ok(SuppProfile { entries });
    }
    let mut above = Ideal::unit(m.ring());
    for d in (level.k..=dim).rev() {
        let a_d = annihilator(&torsion_free_quotient(m, d - 1)?)?;
        let (j, _) = a_d.saturate(&above)?;
        if !j.is_unit()? {
            let jd = j.krull_dim()?;
            if jd != d {
                return Err(Error::VerificationFailed(format!(
                    "support stratum of dimension {d} has dimension {jd}"
                )));
            }
            entries.push((d, Ideal::new(m.ring(), j.groebner_basis()?.to_vec())?));
        }
        above = a_d;
    }
    Ok(SuppProfile { entries })
}

fn radical_equal(a: &Ideal, b: &Ideal) -> Result<bool> {
    for g in a.gens() {
        if !b.radical_contains(g)? {
            return Ok(false);
        }
    }
    for g in b.gens() {
        if !a.radical_contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn some_gen_outside(i: &Ideal, p: &Ideal) -> Result<bool> {
    for g in i.groebner_basis()? {
        if !p.contains(g)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Whether `M ≡ O_{V(P)}` in `C_k` (or `M ≡ 0`).
pub fn is_minimal(m: &FPModule, level: &QuotientLevel, p: &PrimeWitness) -> Result<bool> {
    if p.dim != level.k {
        return Err(Error::DimensionMismatch {
            expected: level.k,
            found: p.dim,
        });
    }
    if is_small(m, level)? {
        return Ok(true);
    }
    let mp = torsion_free_quotient(m, level.k - 1)?;
    if !radical_equal(&annihilator(&mp)?, &p.ideal)? {
        return Ok(false);
    }
    if !some_gen_outside(&fitting_ideal(&mp, 1)?, &p.ideal)? {
        return Ok(false);
    }
    for g in p.ideal.gens() {
        let (im, _, _) = image(&ModuleMap::scalar(&mp, g))?;
        if !some_gen_outside(&annihilator(&im)?, &p.ideal)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The endomorphism `a/b` of `O_{V(P)}`: the roof `O_Z <-b- O_Z -a-> O_Z`.
pub fn roof_fraction(p: &PrimeWitness, a: &Poly, b: &Poly, level: &QuotientLevel) -> Result<Roof> {
    if p.dim != level.k {
        return Err(Error::DimensionMismatch {
            expected: level.k,
            found: p.dim,
        });
    }
    if p.contains(b)? {
        return Err(Error::DenominatorInPrime);
    }
    let oz = FPModule::cyclic(&p.ideal.sum(level.chart.ideal())?);
    let s = ModuleMap::scalar(&oz, b);
    let t = ModuleMap::scalar(&oz, a);
    roof_make(&oz, &s, &t, level)
}

/// Whether `L` is invertible away from a closed subset of dimension at most
/// `k - 1` (integral charts only).
pub fn pic_member(l: &FPModule, level: &QuotientLevel) -> Result<bool> {
    level.chart.integrality()?;
    let lp = torsion_free_quotient(l, level.k - 1)?;
    let chart_ideal = level.chart.ideal();
    if !fitting_ideal(&lp, 0)?.is_subset_of(chart_ideal)? {
        return Ok(false);
    }
    Ok(fitting_ideal(&lp, 1)?.sum(chart_ideal)?.krull_dim()? <= level.k - 1)
}

/// `V(Fitt_r(L))` is where the fibre rank exceeds `r`.
pub fn fiber_rank_locus(l: &FPModule, r: usize) -> Result<Ideal> {
    fitting_ideal(l, r)
}

/// Result of [`hom_quotient_sections`].
#[derive(Clone, Debug)]
pub struct HomSections {
    /// `Hom(J^n, Hom(F, G/Γ_J G))` at `n = n_stop`.
    pub module: FPModule,
    pub stabilized: bool,
    pub n_stop: usize,
    /// Composite of the transition maps from stage 0 to stage `n_stop`.
    pub from_start: ModuleMap,
}

/// Generators of `J^{n+1}` as products `g_i h_j` with `h_j` generators of
/// `J^n`, and the inclusion `J^{n+1} -> J^n` on generators.
fn next_power(j: &Ideal, cur: &[Poly]) -> (Vec<Poly>, Matrix) {
    let ring = j.ring();
    let mut gens: Vec<Poly> = Vec::new();
    let mut origin: Vec<(usize, usize)> = Vec::new();
    for (hj, h) in cur.iter().enumerate() {
        for (gi, g) in j.gens().iter().enumerate() {
            let prod = g * h;
            if !gens.contains(&prod) {
                gens.push(prod);
                origin.push((gi, hj));
            }
        }
    }
    let mut incl = Matrix::zero(ring, cur.len(), gens.len());
    for (c, &(gi, hj)) in origin.iter().enumerate() {
        incl.set(hj, c, j.gens()[gi].clone());
    }
    (gens, incl)
}

fn restriction(
    from: &HomModule,
    to: &HomModule,
    incl: &ModuleMap,
) -> Result<ModuleMap> {
    let ring = from.module.ring();
    let mut cols = Vec::new();
    for i in 0..from.module.ngens() {
        let psi = from.generator_map(i)?;
        let restricted = psi.compose(incl)?.with_ends(&to.source, &to.target)?;
        cols.push(to.encode(&restricted)?);
    }
    ModuleMap::new(
        &from.module,
        &to.module,
        Matrix::from_columns(ring, to.module.ngens(), &cols)?,
    )
}

/// Sections `colim_n Hom(J^n, Hom(F, G/Γ_J G))` of the quotient Hom on the
/// open complement of `V(J)`.
pub fn hom_quotient_sections(
    f: &FPModule,
    g: &FPModule,
    level: &QuotientLevel,
    j: &Ideal,
    n_max: usize,
) -> Result<HomSections> {
    let bad = j.sum(level.chart.ideal())?.krull_dim()?;
    if bad > level.k - 1 {
        return Err(Error::BadLocusTooBig {
            dim: bad,
            max: level.k - 1,
        });
    }
    let ring = f.ring();
    let (_, gamma_incl) = torsion_wrt(g, j)?;
    let g_clean = g.adjoin(gamma_incl.matrix())?;
    let h = hom_module(f, &g_clean)?.module;

    let mut powers: Vec<(Vec<Poly>, Option<Matrix>)> = vec![(vec![ring.one()], None)];
    for _ in 0..=n_max {
        let (next, incl) = next_power(j, &powers.last().unwrap().0);
        powers.push((next, Some(incl)));
    }
    let stages: Vec<(FPModule, HomModule)> = powers
        .par_iter()
        .map(|(gens, _)| {
            let jn = FPModule::from_ideal(&Ideal::new(ring, gens.clone())?)?;
            let hm = hom_module(&jn, &h)?;
            Ok((jn, hm))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut transitions: Vec<ModuleMap> = Vec::new();
    let mut iso_flags: Vec<bool> = Vec::new();
    let mut composite = ModuleMap::identity(&stages[0].1.module);
    for n in 0..=n_max {
        let incl = ModuleMap::new(
            &stages[n + 1].0,
            &stages[n].0,
            powers[n + 1].1.clone().expect("inclusion recorded"),
        )?;
        let rho = restriction(&stages[n].1, &stages[n + 1].1, &incl)?;
        iso_flags.push(is_iso(&rho)?);
        transitions.push(rho);
        if n >= 1 && iso_flags[n - 1] && iso_flags[n] {
            return Ok(HomSections {
                module: stages[n - 1].1.module.clone(),
                stabilized: true,
                n_stop: n - 1,
                from_start: composite,
            });
        }
        if n < n_max {
            composite = transitions[n].compose(&composite)?;
        }
    }
    Ok(HomSections {
        module: stages[n_max].1.module.clone(),
        stabilized: false,
        n_stop: n_max,
        from_start: composite,
    })
}

/// Whether the image of `φ` vanishes at the prime `P`.
pub fn stalk_zero_test(phi: &ModuleMap, p: &PrimeWitness) -> Result<bool> {
    let (im, _, _) = image(phi)?;
    some_gen_outside(&annihilator(&im)?, &p.ideal)
}

const MAX_FILTRATION_LENGTH: usize = 64;

/// Layers `I^a M / I^{a+1} M` until `I^{m+1} M = 0`.
pub fn ideal_power_filtration(m: &FPModule, i: &Ideal) -> Result<Vec<FPModule>> {
    let ann = annihilator(m)?;
    for g in i.gens() {
        if !ann.radical_contains(g)? {
            return Err(Error::SupportNotContained);
        }
    }
    let ring = m.ring();
    let n = m.ngens();
    let vectors_of = |gens: &[Poly]| -> Vec<FreeVector> {
        let mut out = Vec::new();
        for e in 0..n {
            for g in gens {
                out.push(FreeVector::unit(ring, n, e).scale(g));
            }
        }
        out
    };
    let mut layers = Vec::new();
    let mut cur: Vec<Poly> = vec![ring.one()];
    for _ in 0..MAX_FILTRATION_LENGTH {
        let vecs = vectors_of(&cur);
        let mut vanished = true;
        for v in &vecs {
            if !m.relations().contains(v)? {
                vanished = false;
                break;
            }
        }
        if vanished {
            return Ok(layers);
        }
        let (next, _) = next_power(i, &cur);
        let next_vecs = vectors_of(&next);
        let quotient = m.adjoin(&Matrix::from_columns(ring, n, &next_vecs)?)?;
        let (layer, _, _) = crate::fpmod::submodule_presentation(&vecs, &quotient)?;
        for g in i.gens() {
            if !ModuleMap::scalar(&layer, g).is_zero_map()? {
                return Err(Error::VerificationFailed(format!(
                    "layer {} is not killed by {g}",
                    layers.len()
                )));
            }
        }
        layers.push(layer);
        cur = next;
    }
    Err(Error::ResourceExceeded(format!(
        "filtration longer than {MAX_FILTRATION_LENGTH}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MonomialOrder;

    fn a2() -> Ring {
        Ring::new(32003, &["x", "y"], MonomialOrder::GrevLex).unwrap()
    }

    fn lvl(r: &Ring, k: i64) -> QuotientLevel {
        QuotientLevel::new(Chart::affine(r), k).unwrap()
    }

    fn id(r: &Ring, g: &[&str]) -> Ideal {
        Ideal::parse(r, g).unwrap()
    }

    fn cyc(r: &Ring, g: &[&str]) -> FPModule {
        FPModule::cyclic(&id(r, g))
    }

    fn p(r: &Ring, s: &str) -> Poly {
        r.parse_poly(s).unwrap()
    }

    fn row(r: &Ring, s: &[&str]) -> Matrix {
        Matrix::from_rows(r, 1, s.len(), vec![s.iter().map(|x| p(r, x)).collect()]).unwrap()
    }

    fn max_ideal_module(r: &Ring) -> (FPModule, ModuleMap) {
        let m = FPModule::from_ideal(&id(r, &["x", "y"])).unwrap();
        let incl = ModuleMap::new(&m, &FPModule::free(r, 1), row(r, &["x", "y"])).unwrap();
        (m, incl)
    }

    #[test]
    fn smallness_examples() {
        let r = a2();
        assert!(is_small(&cyc(&r, &["x", "y"]), &lvl(&r, 1)).unwrap());
        assert!(!is_small(&FPModule::free(&r, 1), &lvl(&r, 1)).unwrap());
        assert!(is_small(&FPModule::zero(&r), &lvl(&r, 0)).unwrap());
        assert!(QuotientLevel::new(Chart::affine(&r), 4).is_err());
        assert_eq!(QuotientLevel::from_codim(Chart::affine(&r), 1).unwrap().k(), 1);
    }

    #[test]
    fn weak_equivalence_examples() {
        let r = a2();
        let (_, incl) = max_ideal_module(&r);
        assert!(is_weak_equivalence(&incl, &lvl(&r, 1)).unwrap());
        let f = cyc(&r, &["x^2"]);
        assert!(is_weak_equivalence(&ModuleMap::identity(&f), &lvl(&r, 0)).unwrap());
        let mx = ModuleMap::scalar(&FPModule::free(&r, 1), &p(&r, "x"));
        assert!(!is_weak_equivalence(&mx, &lvl(&r, 1)).unwrap());
        assert!(is_weak_equivalence(&mx, &lvl(&r, 2)).unwrap());
    }

    #[test]
    fn zero_in_quotient_examples() {
        let r = a2();
        let free = FPModule::free(&r, 1);
        let proj = ModuleMap::new(&free, &cyc(&r, &["x", "y"]), row(&r, &["1"])).unwrap();
        assert!(is_zero_in_quotient(&proj, &lvl(&r, 1)).unwrap());
        for k in 0..=2 {
            assert!(!is_zero_in_quotient(&ModuleMap::identity(&free), &lvl(&r, k)).unwrap());
        }
        let proj = ModuleMap::new(&free, &cyc(&r, &["x"]), row(&r, &["1"])).unwrap();
        assert!(is_zero_in_quotient(&proj, &lvl(&r, 2)).unwrap());
    }

    #[test]
    fn roof_examples() {
        let r = a2();
        let l1 = lvl(&r, 1);
        let free = FPModule::free(&r, 1);
        let (m, incl) = max_ideal_module(&r);
        let hartogs = roof_make(&m, &incl, &incl, &l1).unwrap();
        let one = Roof::identity(&free, &l1);
        assert!(roof_equal(&hartogs, &one).unwrap());
        assert!(roof_is_iso(&hartogs).unwrap());
        let mx = ModuleMap::scalar(&free, &p(&r, "x"));
        let err = roof_make(&free, &mx, &ModuleMap::identity(&free), &l1).unwrap_err();
        assert!(matches!(err, Error::NotWeakEquivalence { coker_dim: 1, .. }));
        assert!(!roof_is_iso(&Roof::from_map(&mx, &l1)).unwrap());

        let two = Roof::from_map(&ModuleMap::scalar(&free, &p(&r, "2")), &l1);
        assert!(!roof_equal(&one, &two).unwrap());
        let composed = roof_compose(&one, &hartogs).unwrap();
        assert!(roof_equal(&composed, &hartogs).unwrap());
        let zero = Roof::from_map(&ModuleMap::zero(&free, &free), &l1);
        assert!(roof_is_zero(&roof_compose(&hartogs, &zero).unwrap()).unwrap());
        assert!(roof_equal(&roof_add(&one, &one).unwrap(), &two).unwrap());
        assert!(matches!(
            roof_compose(&one, &Roof::identity(&free, &lvl(&r, 2))),
            Err(Error::LevelMismatch(2, 1))
        ));
    }

    #[test]
    fn prime_probes() {
        let r = a2();
        assert!(PrimeWitness::new(id(&r, &["y"])).is_ok());
        assert!(PrimeWitness::new(id(&r, &["y^2 - x^3"])).is_ok());
        assert!(matches!(PrimeWitness::new(id(&r, &["x*y"])), Err(Error::NotPrime(_))));
        assert!(matches!(PrimeWitness::new(id(&r, &["y^2"])), Err(Error::NotPrime(_))));
        assert!(PrimeWitness::new(Ideal::unit(&r)).is_err());
    }

    #[test]
    fn support_profiles() {
        let r = a2();
        let l1 = lvl(&r, 1);
        let m = cyc(&r, &["x"]).direct_sum(&cyc(&r, &["x", "y"]));
        let s = supp_k(&m, &l1).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].0, 1);
        assert!(s.entries[0].1.same_as(&id(&r, &["x"])).unwrap());
        assert!(supp_k(&cyc(&r, &["x", "y"]), &l1).unwrap().entries.is_empty());
        let s = supp_k(&FPModule::free(&r, 1), &l1).unwrap();
        assert_eq!(s.entries.len(), 1);
        assert_eq!(s.entries[0].0, 2);
        assert!(s.entries[0].1.is_zero());
    }

    #[test]
    fn minimal_objects() {
        let r = a2();
        let l1 = lvl(&r, 1);
        let py = PrimeWitness::new(id(&r, &["y"])).unwrap();
        assert!(is_minimal(&cyc(&r, &["y"]), &l1, &py).unwrap());
        assert!(!is_minimal(&cyc(&r, &["y^2"]), &l1, &py).unwrap());
        assert!(is_minimal(&cyc(&r, &["x", "y"]), &l1, &py).unwrap());
        let sq = cyc(&r, &["y"]).direct_sum(&cyc(&r, &["y"]));
        assert!(!is_minimal(&sq, &l1, &py).unwrap());
        let with_point = cyc(&r, &["y"]).direct_sum(&cyc(&r, &["x", "y"]));
        assert!(is_minimal(&with_point, &l1, &py).unwrap());
        assert!(!is_minimal(&cyc(&r, &["x"]), &l1, &py).unwrap());
        assert!(matches!(
            is_minimal(&cyc(&r, &["y"]), &lvl(&r, 2), &py),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn residue_fractions() {
        let r = a2();
        let l1 = lvl(&r, 1);
        let py = PrimeWitness::new(id(&r, &["y"])).unwrap();
        let f = |a: &str, b: &str| roof_fraction(&py, &p(&r, a), &p(&r, b), &l1).unwrap();
        let one = f("1", "1");
        assert!(roof_equal(&roof_compose(&f("x", "1"), &f("1", "x")).unwrap(), &one).unwrap());
        assert!(roof_is_zero(&f("0", "x + 1")).unwrap());
        let c = roof_compose(&f("x", "x + y"), &f("x + y", "x")).unwrap();
        assert!(roof_equal(&c, &one).unwrap());
        assert!(roof_equal(&f("x*y + x", "x"), &f("1", "1")).unwrap());
        assert!(!roof_equal(&f("x", "1"), &f("1", "1")).unwrap());
        assert!(matches!(
            roof_fraction(&py, &r.one(), &p(&r, "x*y"), &l1),
            Err(Error::DenominatorInPrime)
        ));
    }

    #[test]
    fn line_bundles() {
        let r = a2();
        let l1 = lvl(&r, 1);
        let (m, _) = max_ideal_module(&r);
        assert!(pic_member(&m, &l1).unwrap());
        assert!(pic_member(&FPModule::free(&r, 1), &l1).unwrap());
        assert!(!pic_member(&cyc(&r, &["x"]), &l1).unwrap());
        assert!(fiber_rank_locus(&m, 1).unwrap().same_as(&id(&r, &["x", "y"])).unwrap());
        assert!(fiber_rank_locus(&FPModule::free(&r, 1), 0).unwrap().is_zero());
        assert!(fiber_rank_locus(&cyc(&r, &["x"]), 0).unwrap().same_as(&id(&r, &["x"])).unwrap());
        let nodal = Chart::new(id(&r, &["x*y"])).unwrap();
        let lv = QuotientLevel::new(nodal, 1).unwrap();
        assert!(matches!(
            pic_member(&FPModule::free(&r, 1), &lv),
            Err(Error::IntegralityRequired(_))
        ));
    }

    #[test]
    fn hartogs_sections() {
        let r = a2();
        let l1 = lvl(&r, 1);
        let free = FPModule::free(&r, 1);
        let h = hom_quotient_sections(&free, &free, &l1, &id(&r, &["x", "y"]), 4).unwrap();
        assert!(h.stabilized);
        assert!(h.n_stop <= 1);
        assert_eq!(h.module.render().unwrap(), "R");

        let r1 = Ring::new(32003, &["x"], MonomialOrder::GrevLex).unwrap();
        let free1 = FPModule::free(&r1, 1);
        let h = hom_quotient_sections(&free1, &free1, &lvl(&r1, 1), &id(&r1, &["x"]), 4).unwrap();
        assert!(!h.stabilized);

        let h = hom_quotient_sections(&free, &cyc(&r, &["x", "y"]), &l1, &id(&r, &["x", "y"]), 4)
            .unwrap();
        assert!(h.stabilized);
        assert_eq!(h.n_stop, 0);
        assert!(h.module.is_zero().unwrap());

        assert!(matches!(
            hom_quotient_sections(&free, &free, &l1, &id(&r, &["x"]), 2),
            Err(Error::BadLocusTooBig { dim: 1, max: 0 })
        ));
    }

    #[test]
    fn stalks() {
        let r = a2();
        let free = FPModule::free(&r, 1);
        let py = PrimeWitness::new(id(&r, &["y"])).unwrap();
        let px = PrimeWitness::new(id(&r, &["x"])).unwrap();
        assert!(!stalk_zero_test(&ModuleMap::identity(&free), &py).unwrap());
        let proj = ModuleMap::new(&free, &cyc(&r, &["x"]), row(&r, &["1"])).unwrap();
        assert!(stalk_zero_test(&proj, &py).unwrap());
        assert!(!stalk_zero_test(&proj, &px).unwrap());
    }

    #[test]
    fn filtrations() {
        let r = a2();
        let layers = ideal_power_filtration(&cyc(&r, &["x^2"]), &id(&r, &["x"])).unwrap();
        let shown: Vec<String> = layers.iter().map(|l| l.render().unwrap()).collect();
        assert_eq!(shown, vec!["R/(x)", "R/(x)"]);
        let m = cyc(&r, &["x", "y^2"]);
        let layers = ideal_power_filtration(&m, &id(&r, &["x"])).unwrap();
        assert_eq!(layers.len(), 1);
        let layers = ideal_power_filtration(&cyc(&r, &["x", "y"]), &id(&r, &["x", "y"])).unwrap();
        assert_eq!(layers.len(), 1);
        assert!(matches!(
            ideal_power_filtration(&FPModule::free(&r, 1), &id(&r, &["x"])),
            Err(Error::SupportNotContained)
        ));
    }
}
