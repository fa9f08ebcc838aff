//! Seeded property suites run by `codim-cat selftest`.

use codimcat::fpmod::module_dim;
use codimcat::random::{self, SuiteRng};
use codimcat::serrequot::{
    is_weak_equivalence, is_zero_in_quotient, roof_compose, roof_equal, roof_fraction, roof_make,
    Chart, PrimeWitness, QuotientLevel, Roof,
};
use codimcat::{Ideal, ModuleMap, MonomialOrder, Result, Ring};

use crate::corpus::CORPUS;
use crate::session::{parse_session, ParseDefaults};

pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn plane() -> Ring {
    Ring::new(32003, &["x", "y"], MonomialOrder::GrevLex).expect("valid ring")
}

fn suite(
    name: &'static str,
    cases: usize,
    rng: &mut SuiteRng,
    mut case: impl FnMut(usize, &mut SuiteRng) -> Result<Option<String>>,
) -> SuiteResult {
    let mut failures = Vec::new();
    for i in 0..cases {
        match case(i, rng) {
            Ok(None) => {}
            Ok(Some(msg)) => failures.push(format!("case {i}: {msg}")),
            Err(e) => failures.push(format!("case {i}: {e}")),
        }
    }
    SuiteResult {
        name,
        cases,
        failures,
    }
}

fn level(ring: &Ring, k: i64) -> QuotientLevel {
    QuotientLevel::new(Chart::affine(ring), k).expect("k within range")
}

pub fn run(seed: u64) -> Vec<SuiteResult> {
    let ring = plane();
    let mut rng = random::rng(seed);
    let mut out = Vec::new();

    out.push(suite("small iff dim <= k-1", 30, &mut rng, |_, rng| {
        let (m, d) = random::module_with_dim(&ring, rng);
        if module_dim(&m)? != d {
            return Ok(Some(format!("dimension of {} is not {d}", m.render()?)));
        }
        for k in 0..=2 {
            let zero = is_zero_in_quotient(&ModuleMap::identity(&m), &level(&ring, k))?;
            if zero != (d <= k - 1) {
                return Ok(Some(format!("k={k}, dim={d}, zero={zero}")));
            }
        }
        Ok(None)
    }));

    out.push(suite("generated weak equivalences", 15, &mut rng, |i, rng| {
        let k = (i % 3) as i64;
        let (f, _) = random::module_with_dim(&ring, rng);
        let s = random::weak_equivalence(&f, k, rng)?;
        Ok((!is_weak_equivalence(&s, &level(&ring, k))?).then(|| format!("k={k}")))
    }));

    out.push(suite("roof unit laws", 12, &mut rng, |i, rng| {
        let k = (i % 3) as i64;
        let lv = level(&ring, k);
        let (f, _) = random::module_with_dim(&ring, rng);
        let phi = random::quotient_map(&f, rng);
        let (e, s, t) = random::roof_parts(&phi, k, rng)?;
        let r = roof_make(&e, &s, &t, &lv)?;
        let left = roof_compose(&Roof::identity(r.target(), &lv), &r)?;
        let right = roof_compose(&r, &Roof::identity(r.source(), &lv))?;
        let ss = roof_make(&e, &s, &s, &lv)?;
        if !roof_equal(&left, &r)? || !roof_equal(&right, &r)? {
            return Ok(Some(format!("unit law at k={k}")));
        }
        Ok((!roof_equal(&ss, &Roof::identity(s.target(), &lv))?).then(|| "(E,s,s) is not 1".into()))
    }));

    let p = PrimeWitness::new(Ideal::new(&ring, vec![ring.var(1)]).expect("same ring"))
        .expect("(y) is prime");
    out.push(suite("fractions along y=0", 20, &mut rng, |_, rng| {
        let lv = level(&ring, 1);
        let draw = |rng: &mut SuiteRng| loop {
            let f = random::poly(&ring, rng, 2, 3);
            if !p.contains(&f).unwrap_or(true) {
                return f;
            }
        };
        let (a, b, c, d) = (random::poly(&ring, rng, 2, 3), draw(rng), random::poly(&ring, rng, 2, 3), draw(rng));
        let r1 = roof_fraction(&p, &a, &b, &lv)?;
        let r2 = roof_fraction(&p, &c, &d, &lv)?;
        let expected = p.contains(&(&(&a * &d) - &(&b * &c)))?;
        let got = roof_equal(&r1, &r2)?;
        Ok((expected != got).then(|| format!("{a}/{b} vs {c}/{d}")))
    }));

    out.push(suite("corpus round trip", CORPUS.len(), &mut rng, |i, _| {
        let d = ParseDefaults::default();
        let s = parse_session(CORPUS[i].session, &d)?;
        let again = parse_session(&s.to_string(), &d)?;
        Ok((s != again).then(|| CORPUS[i].name.to_string()))
    }));

    out
}
