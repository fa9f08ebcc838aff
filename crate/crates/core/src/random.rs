//! Seeded generators for the randomized suites. Every generator records
//! what it knows about its output by construction, so the suites can
//! compare the library against that knowledge.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{Monomial, Poly, Ring};
use crate::error::Result;
use crate::fpmod::{submodule_presentation, FPModule, ModuleMap};
use crate::groebner::{FreeVector, Ideal};
use crate::matrix::Matrix;

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero field element, small most of the time so that outputs stay
/// readable.
pub fn coeff(ring: &Ring, rng: &mut SuiteRng) -> i64 {
    if rng.gen_bool(0.8) {
        let c = rng.gen_range(1..=5);
        if rng.gen_bool(0.3) {
            -c
        } else {
            c
        }
    } else {
        rng.gen_range(1..ring.modulus() as i64)
    }
}

pub fn monomial(ring: &Ring, rng: &mut SuiteRng, deg: u32) -> Monomial {
    let mut e = vec![0u32; ring.nvars()];
    for _ in 0..deg {
        e[rng.gen_range(0..ring.nvars())] += 1;
    }
    Monomial::from_exponents(&e)
}

/// Up to `max_terms` terms of degree at most `max_deg`; may be zero.
pub fn poly(ring: &Ring, rng: &mut SuiteRng, max_deg: u32, max_terms: usize) -> Poly {
    let n = rng.gen_range(1..=max_terms.max(1));
    let mut f = ring.zero();
    for _ in 0..n {
        let d = rng.gen_range(0..=max_deg);
        let m = monomial(ring, rng, d);
        f = &f + &ring.monomial(m, coeff(ring, rng));
    }
    f
}

pub fn nonconstant_poly(ring: &Ring, rng: &mut SuiteRng, max_deg: u32, max_terms: usize) -> Poly {
    loop {
        let f = poly(ring, rng, max_deg.max(1), max_terms);
        if !f.is_constant() {
            return f;
        }
    }
}

/// A nonconstant polynomial in variable `i` alone.
pub fn univariate(ring: &Ring, rng: &mut SuiteRng, i: usize, max_deg: u32) -> Poly {
    let d = rng.gen_range(1..=max_deg.max(1));
    let mut f = ring.var(i).pow(d);
    for k in 0..d {
        if rng.gen_bool(0.5) {
            f = &f + &ring.var(i).pow(k).scale(coeff(ring, rng).rem_euclid(ring.modulus() as i64) as u32);
        }
    }
    f
}

fn small_constant(ring: &Ring, rng: &mut SuiteRng) -> Poly {
    ring.constant(rng.gen_range(-3..=3))
}

/// The maximal ideal of a point with small coordinates.
pub fn point(ring: &Ring, rng: &mut SuiteRng) -> Ideal {
    let gens = (0..ring.nvars())
        .map(|i| &ring.var(i) - &small_constant(ring, rng))
        .collect();
    Ideal::new(ring, gens).expect("same ring")
}

/// An irreducible curve in the plane: a line or a graph `y = q(x)`
/// (or `x = q(y)`).
pub fn prime_curve(ring: &Ring, rng: &mut SuiteRng) -> Poly {
    assert_eq!(ring.nvars(), 2, "plane curves need two variables");
    let (u, v) = if rng.gen_bool(0.5) { (0, 1) } else { (1, 0) };
    if rng.gen_bool(0.5) {
        let a = ring.constant(coeff(ring, rng));
        let b = ring.constant(rng.gen_range(0..=3));
        let c = small_constant(ring, rng);
        &(&(&a * &ring.var(v)) + &(&b * &ring.var(u))) + &c
    } else {
        let q = univariate(ring, rng, u, 2);
        &ring.var(v) - &q
    }
}

/// Multiplies the presentation by an elementary matrix `U` on the left; the
/// cokernel does not change.
pub fn scramble(m: &FPModule, rng: &mut SuiteRng) -> FPModule {
    scramble_with_iso(m, rng).0
}

/// [`scramble`] together with the isomorphism `U^{-1}` back to `m`.
pub fn scramble_with_iso(m: &FPModule, rng: &mut SuiteRng) -> (FPModule, ModuleMap) {
    let n = m.ngens();
    let ring = m.ring();
    if n < 2 {
        return (m.clone(), ModuleMap::identity(m));
    }
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    let c = poly(ring, rng, 1, 2);
    let mut u = Matrix::identity(ring, n);
    u.set(i, j, c.clone());
    let mut u_inv = Matrix::identity(ring, n);
    u_inv.set(i, j, -&c);
    let e = FPModule::new(u.mul(m.presentation()).expect("square times presentation"));
    let back = ModuleMap::new(&e, m, u_inv).expect("U^{-1} carries U P onto P");
    (e, back)
}

/// A module over a plane ring together with its dimension, known by
/// construction: a direct sum of pieces `R` (2), `R/(f)` (1),
/// `R/(g(x), h(y))` or a power of a point (0) and `0` (-1).
pub fn module_with_dim(ring: &Ring, rng: &mut SuiteRng) -> (FPModule, i64) {
    assert_eq!(ring.nvars(), 2, "planar generator");
    let pieces = rng.gen_range(1..=2);
    let mut m = FPModule::zero(ring);
    let mut dim = -1;
    for _ in 0..pieces {
        let (piece, d) = match rng.gen_range(0..5) {
            0 => (FPModule::free(ring, 1), 2),
            1 => {
                let f = nonconstant_poly(ring, rng, 2, 3);
                (FPModule::cyclic(&Ideal::new(ring, vec![f]).unwrap()), 1)
            }
            2 => {
                let g = univariate(ring, rng, 0, 2);
                let h = univariate(ring, rng, 1, 2);
                (FPModule::cyclic(&Ideal::new(ring, vec![g, h]).unwrap()), 0)
            }
            3 => {
                let p = point(ring, rng).power(rng.gen_range(1..=2)).unwrap();
                (FPModule::cyclic(&p), 0)
            }
            _ => (FPModule::cyclic(&Ideal::unit(ring)), -1),
        };
        m = m.direct_sum(&piece);
        dim = dim.max(d);
    }
    (scramble(&m, rng), dim)
}

/// A module of the chart `R/I`: random relations of degree at most 2 plus
/// `I e_i`.
pub fn chart_module(chart: &Ideal, rng: &mut SuiteRng) -> FPModule {
    let ring = chart.ring();
    let n = rng.gen_range(1..=2);
    let cols = rng.gen_range(0..=2);
    let mut entries = vec![Vec::new(); n];
    for row in entries.iter_mut() {
        for _ in 0..cols {
            row.push(if rng.gen_bool(0.6) { poly(ring, rng, 2, 2) } else { ring.zero() });
        }
    }
    let pres = Matrix::from_rows(ring, n, cols, entries).unwrap();
    FPModule::new(pres).on_chart(chart).unwrap()
}

/// A random matrix with entries of degree at most `max_deg`.
pub fn matrix(ring: &Ring, rng: &mut SuiteRng, rows: usize, cols: usize, max_deg: u32) -> Matrix {
    let entries = (0..rows)
        .map(|_| (0..cols).map(|_| poly(ring, rng, max_deg, 2)).collect())
        .collect();
    Matrix::from_rows(ring, rows, cols, entries).unwrap()
}

/// A map between modules of the chart `R/I`: either from a free chart
/// module with arbitrary entries, a scalar endomorphism, or a scaled
/// projection onto a quotient.
pub fn chart_map(chart: &Ideal, rng: &mut SuiteRng, max_deg: u32) -> ModuleMap {
    let ring = chart.ring();
    match rng.gen_range(0..3) {
        0 => {
            let a = rng.gen_range(1..=2);
            let target = chart_module(chart, rng);
            let src = FPModule::free_over(chart, a);
            let mat = matrix(ring, rng, target.ngens(), a, max_deg);
            ModuleMap::new(&src, &target, mat).unwrap()
        }
        1 => {
            let m = chart_module(chart, rng);
            ModuleMap::scalar(&m, &poly(ring, rng, max_deg, 2))
        }
        _ => {
            let m = chart_module(chart, rng);
            let extra = matrix(ring, rng, m.ngens(), 1, max_deg);
            let q = m.adjoin(&extra).unwrap();
            let f = poly(ring, rng, max_deg, 2);
            ModuleMap::new(&m, &q, Matrix::identity(ring, m.ngens()).scale(&f)).unwrap()
        }
    }
}

/// A scaled projection `F -> F / <random column>`.
pub fn quotient_map(f: &FPModule, rng: &mut SuiteRng) -> ModuleMap {
    let ring = f.ring();
    let cols = rng.gen_range(0..=1);
    let extra = matrix(ring, rng, f.ngens(), cols, 1);
    let g = f.adjoin(&extra).unwrap();
    let c = poly(ring, rng, 1, 2);
    ModuleMap::new(f, &g, Matrix::identity(ring, f.ngens()).scale(&c)).unwrap()
}

/// A weak equivalence `s: E -> F` at level `k` on the plane: an
/// isomorphism for `k = 0`, `J F ⊆ F` with `V(J)` finite for `k = 1`, a
/// multiplication by a nonconstant polynomial for `k = 2`.
pub fn weak_equivalence(f: &FPModule, k: i64, rng: &mut SuiteRng) -> Result<ModuleMap> {
    let ring = f.ring();
    match k {
        0 => {
            if rng.gen_bool(0.5) {
                let c = ring.constant(coeff(ring, rng));
                Ok(ModuleMap::scalar(f, &c))
            } else {
                Ok(scramble_with_iso(f, rng).1)
            }
        }
        1 => {
            let j = if rng.gen_bool(0.5) {
                point(ring, rng)
            } else {
                Ideal::new(ring, vec![univariate(ring, rng, 0, 2), univariate(ring, rng, 1, 2)])?
            };
            let mut vecs = Vec::new();
            for i in 0..f.ngens() {
                for g in j.gens() {
                    vecs.push(FreeVector::unit(ring, f.ngens(), i).scale(g));
                }
            }
            let (_, incl, _) = submodule_presentation(&vecs, f)?;
            Ok(incl)
        }
        _ => Ok(ModuleMap::scalar(f, &nonconstant_poly(ring, rng, 2, 2))),
    }
}

/// A roof `F <- E -> G` at level `k` for the given `φ: F -> G`:
/// `t = g φ s` or, when `E = F`, `t = g φ`.
pub fn roof_parts(
    phi: &ModuleMap,
    k: i64,
    rng: &mut SuiteRng,
) -> Result<(FPModule, ModuleMap, ModuleMap)> {
    let ring = phi.ring();
    let s = weak_equivalence(phi.source(), k, rng)?;
    let g = poly(ring, rng, 1, 2);
    let t = if s.source().is_same(phi.source()) && rng.gen_bool(0.5) {
        phi.scale(&g)
    } else {
        phi.compose(&s)?.scale(&g)
    };
    Ok((s.source().clone(), s, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::MonomialOrder;
    use crate::fpmod::module_dim;
    use crate::serrequot::{is_weak_equivalence, Chart, QuotientLevel};

    fn plane() -> Ring {
        Ring::new(32003, &["x", "y"], MonomialOrder::GrevLex).unwrap()
    }

    #[test]
    fn generators_are_deterministic() {
        let r = plane();
        let a: Vec<String> = (0..5).map(|_| 0).scan(rng(7), |g, _| Some(poly(&r, g, 3, 3).to_string())).collect();
        let b: Vec<String> = (0..5).map(|_| 0).scan(rng(7), |g, _| Some(poly(&r, g, 3, 3).to_string())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn known_dimensions_hold() {
        let r = plane();
        let mut g = rng(11);
        for _ in 0..15 {
            let (m, d) = module_with_dim(&r, &mut g);
            assert_eq!(module_dim(&m).unwrap(), d);
        }
    }

    #[test]
    fn generated_weak_equivalences() {
        let r = plane();
        let mut g = rng(3);
        for k in 0..=2 {
            let level = QuotientLevel::new(Chart::affine(&r), k).unwrap();
            for _ in 0..4 {
                let (f, _) = module_with_dim(&r, &mut g);
                let s = weak_equivalence(&f, k, &mut g).unwrap();
                assert!(is_weak_equivalence(&s, &level).unwrap());
            }
        }
    }
}
