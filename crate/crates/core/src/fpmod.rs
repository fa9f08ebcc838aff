//! Finitely presented modules `M = coker(A: R^m -> R^n)` and the maps
//! between them.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::arith::{inv_mod, MonomialOrder, Poly, Ring};
use crate::error::{Error, Result};
use crate::groebner::{syzygies, FreeVector, Ideal, Lifter, Submodule};
use crate::matrix::Matrix;

struct ModData {
    pres: Matrix,
    rel: OnceLock<Submodule>,
}

/// Cheap to clone; the relation module's Gröbner basis is cached.
#[derive(Clone)]
pub struct FPModule(Arc<ModData>);

impl fmt::Debug for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "coker {}", self.0.pres)
    }
}

impl FPModule {
    pub fn new(pres: Matrix) -> FPModule {
        FPModule(Arc::new(ModData {
            pres,
            rel: OnceLock::new(),
        }))
    }

    pub fn free(ring: &Ring, n: usize) -> FPModule {
        FPModule::new(Matrix::zero(ring, n, 0))
    }

    pub fn zero(ring: &Ring) -> FPModule {
        FPModule::free(ring, 0)
    }

    /// `R/I`
    pub fn cyclic(i: &Ideal) -> FPModule {
        let g = i.gens().to_vec();
        let cols = g.len();
        FPModule::new(Matrix::from_rows(i.ring(), 1, cols, vec![g]).unwrap())
    }

    /// `(R/I)^n`
    pub fn free_over(i: &Ideal, n: usize) -> FPModule {
        let row = Matrix::from_rows(i.ring(), 1, i.gens().len(), vec![i.gens().to_vec()]).unwrap();
        FPModule::new(Matrix::identity(i.ring(), n).kronecker(&row))
    }

    /// The ideal `I` as a module, generated by the generators of `I`.
    pub fn from_ideal(i: &Ideal) -> Result<FPModule> {
        let ring = i.ring();
        let gens: Vec<FreeVector> = i
            .gens()
            .iter()
            .map(|g| FreeVector::new(ring, vec![g.clone()]))
            .collect::<Result<_>>()?;
        let syz = syzygies(&gens)?;
        Ok(FPModule::new(Matrix::from_columns(ring, gens.len(), &syz)?))
    }

    pub fn ring(&self) -> &Ring {
        self.0.pres.ring()
    }

    /// Number of generators.
    pub fn ngens(&self) -> usize {
        self.0.pres.rows()
    }

    pub fn presentation(&self) -> &Matrix {
        &self.0.pres
    }

    /// The relation submodule of `R^n`.
    pub fn relations(&self) -> &Submodule {
        self.0.rel.get_or_init(|| {
            Submodule::new(self.ring(), self.ngens(), self.0.pres.columns()).expect("consistent")
        })
    }

    pub fn is_zero(&self) -> Result<bool> {
        self.relations().is_everything()
    }

    pub fn is_same(&self, other: &FPModule) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.pres == other.0.pres
    }

    pub fn direct_sum(&self, other: &FPModule) -> FPModule {
        FPModule::new(self.0.pres.block_diag(&other.0.pres))
    }

    /// Generator `(i, j)` of `M ⊗ N` has index `i * n_N + j`.
    pub fn tensor(&self, other: &FPModule) -> Result<FPModule> {
        let (nm, nn) = (self.ngens(), other.ngens());
        let ring = self.ring();
        let a = self.0.pres.kronecker(&Matrix::identity(ring, nn));
        let b = Matrix::identity(ring, nm).kronecker(&other.0.pres);
        Ok(FPModule::new(a.hconcat(&b)?))
    }

    /// `M / <columns of extra>`
    pub fn adjoin(&self, extra: &Matrix) -> Result<FPModule> {
        Ok(FPModule::new(self.0.pres.hconcat(extra)?))
    }

    /// Adds `I e_i` for every generator: the module viewed over `R/I`.
    pub fn on_chart(&self, i: &Ideal) -> Result<FPModule> {
        if i.is_zero() || self.ngens() == 0 {
            return Ok(self.clone());
        }
        let row = Matrix::from_rows(i.ring(), 1, i.gens().len(), vec![i.gens().to_vec()])?;
        self.adjoin(&Matrix::identity(self.ring(), self.ngens()).kronecker(&row))
    }

    /// The same presentation over a larger ring.
    pub fn map_vars(&self, ring: &Ring, var_map: &[usize]) -> Result<FPModule> {
        Ok(FPModule::new(
            self.0.pres.map_entries(ring, |p| Ok(p.map_vars(ring, var_map)))?,
        ))
    }

    /// Removes generators killed by unit entries, zero generators and
    /// redundant relations.
    pub fn minimize(&self) -> Result<Minimized> {
        let ring = self.ring().clone();
        let n = self.ngens();
        let mut a = self.0.pres.clone();
        let mut extra = Vec::new();
        for i in 0..n {
            let e = FreeVector::unit(&ring, n, i);
            if self.relations().contains(&e)? {
                extra.push(e);
            }
        }
        if !extra.is_empty() {
            a = a.hconcat(&Matrix::from_columns(&ring, n, &extra)?)?;
        }
        let mut cols: Vec<Vec<Poly>> = a.columns().into_iter().map(|c| c.into_comps()).collect();
        let mut alive: Vec<usize> = (0..n).collect();
        // express[o] = old generator o in terms of the current generators
        let mut express: Vec<Vec<Poly>> = (0..n)
            .map(|o| (0..n).map(|i| if i == o { ring.one() } else { ring.zero() }).collect())
            .collect();
        let p = ring.modulus();
        loop {
            let found = cols.iter().enumerate().find_map(|(j, c)| {
                c.iter()
                    .position(|x| !x.is_zero() && x.is_constant())
                    .map(|i| (i, j))
            });
            let Some((i, j)) = found else { break };
            let u = cols[j][i].constant_value().unwrap();
            let uinv = inv_mod(u, p);
            let pivot = cols.remove(j);
            for c in cols.iter_mut() {
                if !c[i].is_zero() {
                    let f = c[i].scale(uinv);
                    for (l, x) in c.iter_mut().enumerate() {
                        *x = &*x - &(&f * &pivot[l]);
                    }
                }
            }
            // e_i = -u^{-1} Σ_{l≠i} pivot[l] e_l
            for ex in express.iter_mut() {
                let xi = ex[i].clone();
                if !xi.is_zero() {
                    let f = -&xi.scale(uinv);
                    for (l, x) in ex.iter_mut().enumerate() {
                        if l != i {
                            *x = &*x + &(&f * &pivot[l]);
                        }
                    }
                }
                ex.remove(i);
            }
            for c in cols.iter_mut() {
                c.remove(i);
            }
            alive.remove(i);
        }
        let mut kept: Vec<Vec<Poly>> = Vec::new();
        for c in cols {
            if c.iter().any(|x| !x.is_zero()) && !kept.contains(&c) {
                kept.push(c);
            }
        }
        let rows = alive.len();
        let col_vecs = kept
            .into_iter()
            .map(|c| FreeVector::new(&ring, c))
            .collect::<Result<Vec<_>>>()?;
        let module = FPModule::new(Matrix::from_columns(&ring, rows, &col_vecs)?);
        let mut expr = Matrix::zero(&ring, rows, n);
        for (o, ex) in express.into_iter().enumerate() {
            for (l, x) in ex.into_iter().enumerate() {
                expr.set(l, o, x);
            }
        }
        Ok(Minimized {
            module,
            kept: alive,
            express: expr,
        })
    }

    /// Human-readable canonical form: `0`, `R`, `R^n`, `R/(...)` or
    /// `coker [[...]]` with the relation module's reduced basis as columns.
    pub fn render(&self) -> Result<String> {
        let m = self.minimize()?.module;
        let n = m.ngens();
        if n == 0 {
            return Ok("0".into());
        }
        let gb = m.relations().groebner_basis()?;
        if gb.is_empty() {
            return Ok(if n == 1 { "R".into() } else { format!("R^{n}") });
        }
        if n == 1 {
            let gens: Vec<String> = gb.iter().map(|v| v.comps()[0].to_string()).collect();
            return Ok(format!("R/({})", gens.join(", ")));
        }
        Ok(format!("coker {}", Matrix::from_columns(m.ring(), n, &gb)?))
    }
}

/// Result of [`FPModule::minimize`]: the generators of `module` are the
/// original generators listed in `kept`; column `o` of `express` writes
/// original generator `o` in the new generators.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub module: FPModule,
    pub kept: Vec<usize>,
    pub express: Matrix,
}

impl Minimized {
    /// Inclusion-of-generators isomorphism `module -> original`.
    pub fn to_original(&self, original: &FPModule) -> ModuleMap {
        let n = original.ngens();
        let mut m = Matrix::zero(original.ring(), n, self.kept.len());
        for (c, &o) in self.kept.iter().enumerate() {
            m.set(o, c, original.ring().one());
        }
        ModuleMap::trusted(self.module.clone(), original.clone(), m)
    }

    /// Inverse isomorphism `original -> module`.
    pub fn from_original(&self, original: &FPModule) -> ModuleMap {
        ModuleMap::trusted(original.clone(), self.module.clone(), self.express.clone())
    }
}

/// A module homomorphism given on generators.
#[derive(Clone)]
pub struct ModuleMap {
    source: FPModule,
    target: FPModule,
    matrix: Matrix,
    welldef_cert: bool,
}

impl fmt::Debug for ModuleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?} by {}", self.source, self.target, self.matrix)
    }
}

impl ModuleMap {
    /// Checks shape and well-definedness.
    pub fn new(source: &FPModule, target: &FPModule, matrix: Matrix) -> Result<ModuleMap> {
        if !is_well_defined(&matrix, source, target)? {
            return Err(Error::NotWellDefined(format!(
                "{matrix} does not carry the relations of the source into those of the target"
            )));
        }
        Ok(ModuleMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
            welldef_cert: true,
        })
    }

    /// For maps that are well defined by construction.
    pub(crate) fn trusted(source: FPModule, target: FPModule, matrix: Matrix) -> ModuleMap {
        debug_assert_eq!(matrix.rows(), target.ngens());
        debug_assert_eq!(matrix.cols(), source.ngens());
        ModuleMap {
            source,
            target,
            matrix,
            welldef_cert: true,
        }
    }

    pub fn identity(m: &FPModule) -> ModuleMap {
        ModuleMap::trusted(m.clone(), m.clone(), Matrix::identity(m.ring(), m.ngens()))
    }

    pub fn zero(source: &FPModule, target: &FPModule) -> ModuleMap {
        ModuleMap::trusted(
            source.clone(),
            target.clone(),
            Matrix::zero(source.ring(), target.ngens(), source.ngens()),
        )
    }

    /// Multiplication by `f` on `M`.
    pub fn scalar(m: &FPModule, f: &Poly) -> ModuleMap {
        ModuleMap::trusted(
            m.clone(),
            m.clone(),
            Matrix::identity(m.ring(), m.ngens()).scale(f),
        )
    }

    pub fn source(&self) -> &FPModule {
        &self.source
    }

    pub fn target(&self) -> &FPModule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn ring(&self) -> &Ring {
        self.source.ring()
    }

    pub fn is_certified(&self) -> bool {
        self.welldef_cert
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap> {
        if first.target.ngens() != self.source.ngens() {
            return Err(Error::Structural("composing maps with mismatched middle".into()));
        }
        Ok(ModuleMap::trusted(
            first.source.clone(),
            self.target.clone(),
            self.matrix.mul(&first.matrix)?,
        ))
    }

    fn same_ends(&self, o: &ModuleMap) -> Result<()> {
        if self.source.ngens() != o.source.ngens() || self.target.ngens() != o.target.ngens() {
            return Err(Error::Structural("maps between different modules".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &ModuleMap) -> Result<ModuleMap> {
        self.same_ends(o)?;
        Ok(ModuleMap::trusted(
            self.source.clone(),
            self.target.clone(),
            self.matrix.add(&o.matrix)?,
        ))
    }

    pub fn sub(&self, o: &ModuleMap) -> Result<ModuleMap> {
        self.same_ends(o)?;
        Ok(ModuleMap::trusted(
            self.source.clone(),
            self.target.clone(),
            self.matrix.sub(&o.matrix)?,
        ))
    }

    pub fn scale(&self, f: &Poly) -> ModuleMap {
        ModuleMap::trusted(self.source.clone(), self.target.clone(), self.matrix.scale(f))
    }

    /// Equality as homomorphisms: every generator image agrees modulo the
    /// target's relations.
    pub fn equals(&self, o: &ModuleMap) -> Result<bool> {
        let d = self.sub(o)?;
        for c in d.matrix.columns() {
            if !self.target.relations().contains(&c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero_map(&self) -> Result<bool> {
        for c in self.matrix.columns() {
            if !self.target.relations().contains(&c)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `φ ⊗ ψ`
    pub fn tensor(&self, o: &ModuleMap) -> Result<ModuleMap> {
        Ok(ModuleMap::trusted(
            self.source.tensor(&o.source)?,
            self.target.tensor(&o.target)?,
            self.matrix.kronecker(&o.matrix),
        ))
    }

    /// The same matrix read between other presentations of the same
    /// generator counts, re-checked.
    pub fn with_ends(&self, source: &FPModule, target: &FPModule) -> Result<ModuleMap> {
        ModuleMap::new(source, target, self.matrix.clone())
    }
}

/// Whether `phi` sends every relation of `m` into the relations of `n`.
pub fn is_well_defined(phi: &Matrix, m: &FPModule, n: &FPModule) -> Result<bool> {
    if phi.rows() != n.ngens() || phi.cols() != m.ngens() {
        return Err(Error::Structural(format!(
            "a {}x{} matrix cannot map {} generators to {}",
            phi.rows(),
            phi.cols(),
            m.ngens(),
            n.ngens()
        )));
    }
    m.ring().check_same(n.ring())?;
    m.ring().check_same(phi.ring())?;
    let image = phi.mul(m.presentation())?;
    for c in image.columns() {
        if !n.relations().contains(&c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The submodule of `m` generated by the classes of `vectors`, with its
/// inclusion; `express` writes each input vector in the new generators.
pub(crate) fn submodule_presentation(
    vectors: &[FreeVector],
    m: &FPModule,
) -> Result<(FPModule, ModuleMap, Matrix)> {
    let ring = m.ring();
    let n = m.ngens();
    let mut live = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if !m.relations().contains(v)? {
            live.push(i);
        }
    }
    let k = live.len();
    let mut cols: Vec<FreeVector> = live.iter().map(|&i| vectors[i].clone()).collect();
    cols.extend(m.relations().gens().iter().cloned());
    let syz = if k == 0 { Vec::new() } else { syzygies(&cols)? };
    let proj: Vec<FreeVector> = syz
        .into_iter()
        .map(|s| FreeVector::new(ring, s.into_comps()[..k].to_vec()))
        .collect::<Result<_>>()?;
    let raw = FPModule::new(Matrix::from_columns(ring, k, &proj)?);
    let min = raw.minimize()?;
    let kept_vectors: Vec<FreeVector> = min.kept.iter().map(|&c| vectors[live[c]].clone()).collect();
    let incl = ModuleMap::trusted(
        min.module.clone(),
        m.clone(),
        Matrix::from_columns(ring, n, &kept_vectors)?,
    );
    let mut express = Matrix::zero(ring, min.module.ngens(), vectors.len());
    for (c, &i) in live.iter().enumerate() {
        for r in 0..min.module.ngens() {
            express.set(r, i, min.express.get(r, c).clone());
        }
    }
    Ok((min.module, incl, express))
}

/// `ker φ` with its inclusion into the source.
pub fn kernel(phi: &ModuleMap) -> Result<(FPModule, ModuleMap)> {
    let src = &phi.source;
    let nm = src.ngens();
    let mut cols = phi.matrix.columns();
    cols.extend(phi.target.relations().gens().iter().cloned());
    let syz = if nm == 0 { Vec::new() } else { syzygies(&cols)? };
    let v: Vec<FreeVector> = syz
        .into_iter()
        .map(|s| FreeVector::new(phi.ring(), s.into_comps()[..nm].to_vec()))
        .collect::<Result<_>>()?;
    let (k, incl, _) = submodule_presentation(&v, src)?;
    Ok((k, incl))
}

/// `coker φ`, generated by the generators of the target.
pub fn cokernel(phi: &ModuleMap) -> Result<FPModule> {
    phi.target.adjoin(&phi.matrix)
}

/// `im φ` with the surjection from the source and the inclusion into the
/// target.
pub fn image(phi: &ModuleMap) -> Result<(FPModule, ModuleMap, ModuleMap)> {
    let (im, incl, express) = submodule_presentation(&phi.matrix.columns(), &phi.target)?;
    let epi = ModuleMap::trusted(phi.source.clone(), im.clone(), express);
    Ok((im, epi, incl))
}

/// `Ann(M) = ∩_i (Rel : e_i)`
pub fn annihilator(m: &FPModule) -> Result<Ideal> {
    let ring = m.ring();
    let n = m.ngens();
    if n == 0 {
        return Ok(Ideal::unit(ring));
    }
    if n == 1 {
        return Ideal::new(ring, m.presentation().row(0));
    }
    let mut acc: Option<Ideal> = None;
    for i in 0..n {
        let q = m.relations().ideal_quotient(&FreeVector::unit(ring, n, i))?;
        acc = Some(match acc {
            None => q,
            Some(a) => a.intersect(&q)?,
        });
        if acc.as_ref().unwrap().is_zero() {
            break;
        }
    }
    Ok(acc.unwrap())
}

/// Krull dimension of the support; `-1` for the zero module.
pub fn module_dim(m: &FPModule) -> Result<i64> {
    if m.is_zero()? {
        return Ok(-1);
    }
    annihilator(m)?.krull_dim()
}

/// Ideal of `(n - i)`-minors of the presentation.
pub fn fitting_ideal(m: &FPModule, i: usize) -> Result<Ideal> {
    let ring = m.ring();
    let n = m.ngens();
    if n <= i {
        return Ok(Ideal::unit(ring));
    }
    let k = n - i;
    if k > m.presentation().cols() {
        return Ok(Ideal::zero(ring));
    }
    Ideal::new(ring, m.presentation().minors(k))
}

/// Differentials `d_1, ..., d_len` of a free resolution of `M`, where `d_1`
/// is the presentation matrix.
pub fn free_resolution(m: &FPModule, len: usize) -> Result<Vec<Matrix>> {
    let ring = m.ring();
    let mut out = vec![m.presentation().clone()];
    while out.len() < len {
        let last = out.last().unwrap();
        let rank = last.cols();
        let syz = if rank == 0 { Vec::new() } else { syzygies(&last.columns())? };
        out.push(Matrix::from_columns(ring, rank, &syz)?);
    }
    Ok(out)
}

/// `Ext^i_R(M, R)` from the dual of a free resolution.
pub fn ext_module(m: &FPModule, i: usize) -> Result<FPModule> {
    let ring = m.ring();
    if i > ring.nvars() {
        return Err(Error::Structural(format!(
            "Ext^{i} requested over a ring of dimension {}",
            ring.nvars()
        )));
    }
    let min = m.minimize()?.module;
    let res = free_resolution(&min, i + 1)?;
    // F_i has rank rank_i; d_{i+1}: F_{i+1} -> F_i
    let rank_i = if i == 0 { min.ngens() } else { res[i - 1].cols() };
    let d_next = &res[i];
    let dual_next = d_next.transpose();
    let kernel_gens: Vec<FreeVector> = if dual_next.rows() == 0 {
        (0..rank_i).map(|j| FreeVector::unit(ring, rank_i, j)).collect()
    } else if rank_i == 0 {
        Vec::new()
    } else {
        syzygies(&dual_next.columns())?
    };
    let boundary = if i == 0 {
        FPModule::free(ring, rank_i)
    } else {
        FPModule::new(res[i - 1].transpose())
    };
    let (e, _, _) = submodule_presentation(&kernel_gens, &boundary)?;
    Ok(e)
}

/// `0 :_M J^∞` with its inclusion.
pub fn torsion_wrt(m: &FPModule, j: &Ideal) -> Result<(FPModule, ModuleMap)> {
    let (sat, _) = m.relations().saturate(j)?;
    let (t, incl, _) = submodule_presentation(sat.gens(), m)?;
    Ok((t, incl))
}

fn zero_submodule(m: &FPModule) -> (FPModule, ModuleMap) {
    let z = FPModule::zero(m.ring());
    let incl = ModuleMap::zero(&z, m);
    (z, incl)
}

fn ext_candidate(m: &FPModule, d: i64) -> Result<Ideal> {
    let n = m.ring().nvars() as i64;
    let mut acc = Ideal::unit(m.ring());
    for dp in 0..=d.min(n) {
        let e = ext_module(m, (n - dp) as usize)?;
        let a = annihilator(&e)?;
        if !a.is_unit()? {
            acc = acc.product(&a)?;
        }
    }
    Ok(acc)
}

/// The largest submodule of dimension at most `d`, with its inclusion.
pub fn torsion_part(m: &FPModule, d: i64) -> Result<(FPModule, ModuleMap)> {
    if d < 0 {
        return Ok(zero_submodule(m));
    }
    let dim = module_dim(m)?;
    if d >= dim {
        return Ok((m.clone(), ModuleMap::identity(m)));
    }
    let j = ext_candidate(m, d)?;
    let (t, incl) = torsion_wrt(m, &j)?;
    let tdim = module_dim(&t)?;
    if tdim > d {
        return Err(Error::VerificationFailed(format!(
            "candidate torsion has dimension {tdim} > {d}"
        )));
    }
    let q = m.adjoin(incl.matrix())?;
    if module_dim(&q)? > d {
        let j2 = ext_candidate(&q, d)?;
        let (t2, _) = torsion_wrt(&q, &j2)?;
        if !t2.is_zero()? {
            return Err(Error::VerificationFailed(
                "quotient by the candidate torsion still has small submodules".into(),
            ));
        }
    } else if !q.is_zero()? {
        return Err(Error::VerificationFailed(
            "quotient by the candidate torsion is small but nonzero".into(),
        ));
    }
    Ok((t, incl))
}

/// `M / T_d(M)`, generated by the generators of `M`.
pub fn torsion_free_quotient(m: &FPModule, d: i64) -> Result<FPModule> {
    let (_, incl) = torsion_part(m, d)?;
    m.adjoin(incl.matrix())
}

/// `M_f`, realized over `R[t]/(t f - 1)`.
#[derive(Clone, Debug)]
pub struct LocalizedModule {
    base: FPModule,
    f: Poly,
    module: FPModule,
}

impl LocalizedModule {
    pub fn base(&self) -> &FPModule {
        &self.base
    }

    pub fn inverted(&self) -> &Poly {
        &self.f
    }

    /// The module over the extended ring.
    pub fn module(&self) -> &FPModule {
        &self.module
    }
}

/// `R[t]` for localizing at one element; the new variable comes last.
pub fn localization_ring(ring: &Ring) -> (Ring, Vec<usize>) {
    let ord = match ring.order() {
        MonomialOrder::Lex => MonomialOrder::Lex,
        _ => MonomialOrder::GrevLex,
    };
    ring.extend(&["t"], false, ord)
}

fn localize_matrix(a: &Matrix, big: &Ring, map: &[usize]) -> Result<Matrix> {
    a.map_entries(big, |p| Ok(p.map_vars(big, map)))
}

pub fn localize(m: &FPModule, f: &Poly) -> Result<LocalizedModule> {
    if f.is_zero() {
        return Err(Error::Structural("localizing at zero".into()));
    }
    m.ring().check_same(f.ring())?;
    let (big, map) = localization_ring(m.ring());
    let t = big.var(big.nvars() - 1);
    let rel = &(&t * &f.map_vars(&big, &map)) - &big.one();
    let n = m.ngens();
    let first = Matrix::identity(&big, n).scale(&rel);
    let pres = first.hconcat(&localize_matrix(m.presentation(), &big, &map)?)?;
    Ok(LocalizedModule {
        base: m.clone(),
        f: f.clone(),
        module: FPModule::new(pres),
    })
}

/// `φ_f` between the localizations of source and target.
pub fn localize_map(phi: &ModuleMap, f: &Poly) -> Result<ModuleMap> {
    let s = localize(&phi.source, f)?;
    let t = localize(&phi.target, f)?;
    let (big, map) = localization_ring(phi.ring());
    Ok(ModuleMap::trusted(
        s.module,
        t.module,
        localize_matrix(&phi.matrix, &big, &map)?,
    ))
}

/// `Hom_R(M, N)` with its embedding into `N^{n_M}`.
#[derive(Clone, Debug)]
pub struct HomModule {
    pub module: FPModule,
    pub source: FPModule,
    pub target: FPModule,
    embedding: ModuleMap,
}

impl HomModule {
    /// The homomorphism represented by an element given in the generators of
    /// `module`.
    pub fn decode(&self, element: &FreeVector) -> Result<ModuleMap> {
        let v = self.embedding.matrix().apply(element)?;
        let (nm, nn) = (self.source.ngens(), self.target.ngens());
        let mut m = Matrix::zero(self.source.ring(), nn, nm);
        for j in 0..nm {
            for l in 0..nn {
                m.set(l, j, v.comps()[j * nn + l].clone());
            }
        }
        ModuleMap::new(&self.source, &self.target, m)
    }

    pub fn generator_map(&self, i: usize) -> Result<ModuleMap> {
        self.decode(&FreeVector::unit(self.source.ring(), self.module.ngens(), i))
    }

    /// Coordinates of `f` in the generators of `module`.
    pub fn encode(&self, f: &ModuleMap) -> Result<FreeVector> {
        let (nm, nn) = (self.source.ngens(), self.target.ngens());
        let ring = self.source.ring();
        let mut v = vec![ring.zero(); nm * nn];
        for j in 0..nm {
            for l in 0..nn {
                v[j * nn + l] = f.matrix().get(l, j).clone();
            }
        }
        let v = FreeVector::new(ring, v)?;
        let mut gens = self.embedding.matrix().columns();
        let k = gens.len();
        gens.extend(self.embedding.target().relations().gens().iter().cloned());
        let lifter = Lifter::new(ring, nm * nn, &gens)?;
        let c = lifter
            .lift(&v)?
            .ok_or_else(|| Error::Structural("map is not a homomorphism between these modules".into()))?;
        FreeVector::new(ring, c[..k].to_vec())
    }
}

pub fn hom_module(m: &FPModule, n: &FPModule) -> Result<HomModule> {
    let ring = m.ring();
    let (nm, nn) = (m.ngens(), n.ngens());
    let mm = m.presentation().cols();
    let big_src = FPModule::new(Matrix::identity(ring, nm).kronecker(n.presentation()));
    let big_tgt = FPModule::new(Matrix::identity(ring, mm).kronecker(n.presentation()));
    let phi = m
        .presentation()
        .transpose()
        .kronecker(&Matrix::identity(ring, nn));
    let phi = ModuleMap::trusted(big_src, big_tgt, phi);
    let (k, incl) = kernel(&phi)?;
    Ok(HomModule {
        module: k,
        source: m.clone(),
        target: n.clone(),
        embedding: incl,
    })
}

pub fn is_iso(phi: &ModuleMap) -> Result<bool> {
    if !cokernel(phi)?.is_zero()? {
        return Ok(false);
    }
    let (k, _) = kernel(phi)?;
    k.is_zero()
}

pub fn is_injective(phi: &ModuleMap) -> Result<bool> {
    kernel(phi)?.0.is_zero()
}

/// `dim_k M` for a module supported in dimension at most zero.
pub fn vector_space_dim(m: &FPModule) -> Result<u64> {
    let n = m.ngens();
    let nv = m.ring().nvars();
    let lt = m.relations().leading_terms()?;
    let mut total = 0u64;
    for c in 0..n {
        let leads: Vec<Vec<u32>> = lt
            .iter()
            .filter(|(comp, _)| *comp == c)
            .map(|(_, mono)| mono.exponents().to_vec())
            .collect();
        let mut bounds = vec![u32::MAX; nv];
        for l in &leads {
            let support: Vec<usize> = (0..nv).filter(|&i| l[i] > 0).collect();
            if support.is_empty() {
                bounds = vec![0; nv];
            } else if support.len() == 1 {
                let i = support[0];
                bounds[i] = bounds[i].min(l[i]);
            }
        }
        if bounds.contains(&0) {
            continue;
        }
        if bounds.contains(&u32::MAX) {
            return Err(Error::Structural("module has positive-dimensional support".into()));
        }
        let mut e = vec![0u32; nv];
        loop {
            if !leads.iter().any(|l| l.iter().zip(&e).all(|(a, b)| a <= b)) {
                total += 1;
            }
            let mut i = 0;
            loop {
                if i == nv {
                    break;
                }
                e[i] += 1;
                if e[i] < bounds[i] {
                    break;
                }
                e[i] = 0;
                i += 1;
            }
            if i == nv {
                break;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r() -> Ring {
        Ring::new(32003, &["x", "y"], MonomialOrder::GrevLex).unwrap()
    }

    fn p(r: &Ring, s: &str) -> Poly {
        r.parse_poly(s).unwrap()
    }

    fn cyc(r: &Ring, g: &[&str]) -> FPModule {
        FPModule::cyclic(&Ideal::parse(r, g).unwrap())
    }

    fn mat(r: &Ring, rows: &[&[&str]]) -> Matrix {
        let cols = rows.first().map_or(0, |x| x.len());
        Matrix::from_rows(
            r,
            rows.len(),
            cols,
            rows.iter().map(|row| row.iter().map(|s| p(r, s)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn well_definedness() {
        let r = r();
        let m = cyc(&r, &["y"]);
        assert!(is_well_defined(&Matrix::identity(&r, 1), &m, &m).unwrap());
        assert!(is_well_defined(&mat(&r, &[&["x"]]), &m, &m).unwrap());
        assert!(!is_well_defined(&mat(&r, &[&["1"]]), &cyc(&r, &["x"]), &cyc(&r, &["x^2"])).unwrap());
        assert!(is_well_defined(&mat(&r, &[&["1", "0"]]), &m, &m).is_err());
    }

    #[test]
    fn kernel_examples() {
        let r = r();
        let free = FPModule::free(&r, 1);
        let mx = ModuleMap::new(&free, &free, mat(&r, &[&["x"]])).unwrap();
        assert!(kernel(&mx).unwrap().0.is_zero().unwrap());

        let proj = ModuleMap::new(&free, &cyc(&r, &["x"]), mat(&r, &[&["1"]])).unwrap();
        let (k, incl) = kernel(&proj).unwrap();
        assert_eq!(k.ngens(), 1);
        assert_eq!(k.render().unwrap(), "R");
        assert!(Ideal::parse(&r, &["x"]).unwrap().contains(incl.matrix().get(0, 0)).unwrap());

        let to_sq = ModuleMap::new(&free, &cyc(&r, &["x^2"]), mat(&r, &[&["x"]])).unwrap();
        let (_, incl) = kernel(&to_sq).unwrap();
        let gen = incl.matrix().get(0, 0).clone();
        assert!(Ideal::parse(&r, &["x"]).unwrap().contains(&gen).unwrap());
        assert!(Ideal::new(&r, vec![gen]).unwrap().contains(&p(&r, "x")).unwrap());
    }

    #[test]
    fn cokernel_and_image_examples() {
        let r = r();
        let free = FPModule::free(&r, 1);
        let n = cyc(&r, &["x^2 + y"]);
        let z = ModuleMap::zero(&FPModule::zero(&r), &n);
        assert_eq!(cokernel(&z).unwrap().render().unwrap(), n.render().unwrap());
        let mx = ModuleMap::new(&free, &free, mat(&r, &[&["x"]])).unwrap();
        assert_eq!(cokernel(&mx).unwrap().render().unwrap(), "R/(x)");
        let m = FPModule::from_ideal(&Ideal::parse(&r, &["x", "y"]).unwrap()).unwrap();
        let incl = ModuleMap::new(&m, &free, mat(&r, &[&["x", "y"]])).unwrap();
        assert_eq!(cokernel(&incl).unwrap().render().unwrap(), "R/(x, y)");

        let proj = ModuleMap::new(&free, &cyc(&r, &["x"]), mat(&r, &[&["x"]])).unwrap();
        assert!(image(&proj).unwrap().0.is_zero().unwrap());
        let col = ModuleMap::new(&free, &FPModule::free(&r, 2), mat(&r, &[&["x"], &["y"]])).unwrap();
        assert_eq!(image(&col).unwrap().0.render().unwrap(), "R");
    }

    #[test]
    fn annihilator_and_dimension() {
        let r = r();
        let i = Ideal::parse(&r, &["x^2 - y", "x*y"]).unwrap();
        assert!(annihilator(&FPModule::cyclic(&i)).unwrap().same_as(&i).unwrap());
        assert!(annihilator(&FPModule::free(&r, 1)).unwrap().is_zero());
        let sum = cyc(&r, &["x"]).direct_sum(&cyc(&r, &["y"]));
        let a = annihilator(&sum).unwrap();
        assert!(a.same_as(&Ideal::parse(&r, &["x*y"]).unwrap()).unwrap());
        assert_eq!(module_dim(&cyc(&r, &["x", "y"])).unwrap(), 0);
        assert_eq!(module_dim(&FPModule::free(&r, 1)).unwrap(), 2);
        assert_eq!(module_dim(&FPModule::zero(&r)).unwrap(), -1);
    }

    #[test]
    fn fitting_examples() {
        let r = r();
        let i = Ideal::parse(&r, &["x^2", "y"]).unwrap();
        assert!(fitting_ideal(&FPModule::cyclic(&i), 0).unwrap().same_as(&i).unwrap());
        let m = FPModule::new(mat(&r, &[&["y"], &["-x"]]));
        let f1 = fitting_ideal(&m, 1).unwrap();
        assert!(f1.same_as(&Ideal::parse(&r, &["x", "y"]).unwrap()).unwrap());
        assert!(fitting_ideal(&m, 0).unwrap().is_zero());
        assert!(fitting_ideal(&m, 2).unwrap().is_unit().unwrap());
    }

    #[test]
    fn ext_examples() {
        let r = r();
        assert_eq!(ext_module(&FPModule::free(&r, 1), 0).unwrap().render().unwrap(), "R");
        assert_eq!(ext_module(&cyc(&r, &["x"]), 1).unwrap().render().unwrap(), "R/(x)");
        assert!(ext_module(&cyc(&r, &["x"]), 0).unwrap().is_zero().unwrap());
        assert_eq!(ext_module(&cyc(&r, &["x", "y"]), 2).unwrap().render().unwrap(), "R/(x, y)");
        assert!(ext_module(&cyc(&r, &["x", "y"]), 1).unwrap().is_zero().unwrap());
    }

    #[test]
    fn torsion_examples() {
        let r = r();
        let m = cyc(&r, &["x"]).direct_sum(&cyc(&r, &["x", "y"]));
        let (t, incl) = torsion_wrt(&m, &Ideal::parse(&r, &["x", "y"]).unwrap()).unwrap();
        assert_eq!(t.render().unwrap(), "R/(x, y)");
        // the torsion sits in the second summand
        let v = incl.matrix().column(0);
        assert!(Ideal::parse(&r, &["x"]).unwrap().contains(&v.comps()[0]).unwrap());
        assert!(!Ideal::parse(&r, &["x", "y"]).unwrap().contains(&v.comps()[1]).unwrap());

        let free = FPModule::free(&r, 1);
        assert!(torsion_wrt(&free, &Ideal::parse(&r, &["x"]).unwrap()).unwrap().0.is_zero().unwrap());
        assert!(torsion_wrt(&m, &Ideal::unit(&r)).unwrap().0.is_zero().unwrap());
        let (all, _) = torsion_wrt(&m, &Ideal::zero(&r)).unwrap();
        assert_eq!(all.render().unwrap(), m.render().unwrap());

        let (t0, _) = torsion_part(&m, 0).unwrap();
        assert_eq!(t0.render().unwrap(), "R/(x, y)");
        let (t1, _) = torsion_part(&m, 1).unwrap();
        assert_eq!(t1.render().unwrap(), m.render().unwrap());
        assert!(torsion_part(&free, 0).unwrap().0.is_zero().unwrap());
    }

    #[test]
    fn localization_examples() {
        let r = r();
        assert!(localize(&cyc(&r, &["x"]), &p(&r, "x")).unwrap().module().is_zero().unwrap());
        let l = localize(&FPModule::free(&r, 1), &p(&r, "x")).unwrap();
        assert!(!l.module().is_zero().unwrap());
        // (x, y) becomes free after inverting x: generated by x alone
        let m = FPModule::from_ideal(&Ideal::parse(&r, &["x", "y"]).unwrap()).unwrap();
        let free = FPModule::free(&r, 1);
        let incl = ModuleMap::new(&m, &free, mat(&r, &[&["x", "y"]])).unwrap();
        let li = localize_map(&incl, &p(&r, "x")).unwrap();
        assert!(is_iso(&li).unwrap());
        let mx = ModuleMap::scalar(&free, &p(&r, "x"));
        assert!(!is_iso(&mx).unwrap());
        assert!(is_iso(&localize_map(&mx, &p(&r, "x")).unwrap()).unwrap());
        assert!(is_iso(&ModuleMap::identity(&m)).unwrap());
    }

    #[test]
    fn hom_examples() {
        let r = r();
        let n = cyc(&r, &["x^2 + y"]);
        let h = hom_module(&FPModule::free(&r, 1), &n).unwrap();
        assert_eq!(h.module.render().unwrap(), n.render().unwrap());
        let h = hom_module(&cyc(&r, &["x"]), &FPModule::free(&r, 1)).unwrap();
        assert!(h.module.is_zero().unwrap());
        let rx = cyc(&r, &["x"]);
        let h = hom_module(&rx, &rx).unwrap();
        assert_eq!(h.module.render().unwrap(), "R/(x)");
        let g = h.generator_map(0).unwrap();
        let back = h.encode(&g).unwrap();
        assert!(h.module.relations().contains(&back.sub(&FreeVector::unit(&r, 1, 0))).unwrap());
    }

    #[test]
    fn vector_space_dimension() {
        let r = r();
        assert_eq!(vector_space_dim(&cyc(&r, &["x^2", "y^3"])).unwrap(), 6);
        assert_eq!(vector_space_dim(&cyc(&r, &["x", "y"]).direct_sum(&cyc(&r, &["x^2", "x*y", "y^2"]))).unwrap(), 4);
        assert!(vector_space_dim(&cyc(&r, &["x"])).is_err());
        assert_eq!(vector_space_dim(&FPModule::zero(&r)).unwrap(), 0);
    }
}
