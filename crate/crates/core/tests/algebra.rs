use codimcat::arith::FieldElem;
use codimcat::fpmod::{fitting_ideal, module_dim, vector_space_dim};
use codimcat::groebner::{syzygies, Lifter};
use codimcat::random::{self, SuiteRng};
use codimcat::{FPModule, FreeVector, Ideal, Matrix, Monomial, MonomialOrder, Poly, Ring};
use proptest::prelude::*;
use rand::Rng;

const P: u64 = 32003;

fn ring(nv: usize, order: MonomialOrder) -> Ring {
    Ring::new(P, &["x", "y", "z"][..nv], order).unwrap()
}

fn order_of(i: u8) -> MonomialOrder {
    match i % 3 {
        0 => MonomialOrder::GrevLex,
        1 => MonomialOrder::Lex,
        _ => MonomialOrder::Elim(1),
    }
}

// Small ideals whose bases stay far below the degree guard.
fn small_ideal(r: &Ring, rng: &mut SuiteRng) -> Ideal {
    let n = rng.gen_range(1..=3);
    let gens = (0..n).map(|_| random::nonconstant_poly(r, rng, 2, 3)).collect();
    Ideal::new(r, gens).unwrap()
}

fn exps(nv: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..5, nv)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_inverse_and_distributivity(a in 1i64..32003, b in any::<i64>(), c in any::<i64>()) {
        let a = FieldElem::new(a, P as u32);
        let b = FieldElem::new(b, P as u32);
        let c = FieldElem::new(c, P as u32);
        prop_assert_eq!((a * a.inverse().unwrap()).residue(), 1);
        prop_assert_eq!(a * (b + c), a * b + a * c);
    }

    #[test]
    fn orders_are_multiplicative(a in exps(3), b in exps(3), c in exps(3), o in 0u8..3) {
        let ord = order_of(o);
        let (a, b, c) = (Monomial::from_exponents(&a), Monomial::from_exponents(&b), Monomial::from_exponents(&c));
        prop_assert_eq!(ord.compare(&a, &b), ord.compare(&a.mul(&c), &b.mul(&c)));
        prop_assert!(ord.compare(&a.mul(&c), &a) != std::cmp::Ordering::Less);
    }

    #[test]
    fn ring_laws(seed in any::<u64>(), nv in 1usize..=3) {
        let r = ring(nv, MonomialOrder::GrevLex);
        let mut rng = random::rng(seed);
        let f = random::poly(&r, &mut rng, 3, 4);
        let g = random::poly(&r, &mut rng, 3, 4);
        let h = random::poly(&r, &mut rng, 3, 4);
        prop_assert_eq!(&f * &g, &g * &f);
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        prop_assert_eq!(&(&f - &g) + &g, f.clone());
        prop_assert!((&f + &(-&f)).is_zero());
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), nv in 1usize..=3, o in 0u8..3) {
        let r = ring(nv, order_of(o));
        let mut rng = random::rng(seed);
        let f = random::poly(&r, &mut rng, 4, 5);
        prop_assert_eq!(r.parse_poly(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn groebner_basis_invariants(seed in any::<u64>(), nv in 1usize..=3, o in 0u8..3) {
        let r = ring(nv, order_of(o));
        let mut rng = random::rng(seed);
        let i = small_ideal(&r, &mut rng);
        let gb = i.groebner_basis().unwrap().to_vec();
        for g in i.gens() {
            prop_assert!(i.contains(g).unwrap());
        }
        for (a, g) in gb.iter().enumerate() {
            prop_assert!(g.lead_coeff().unwrap().residue() == 1);
            for (b, h) in gb.iter().enumerate() {
                if a != b {
                    prop_assert!(!h.lead_monomial().unwrap().divides(g.lead_monomial().unwrap()));
                }
            }
        }
        let f = random::poly(&r, &mut rng, 3, 4);
        let nf = i.reduce(&f).unwrap();
        prop_assert_eq!(i.reduce(&nf).unwrap(), nf.clone());
        prop_assert!(i.contains(&(&f - &nf)).unwrap());
    }

    #[test]
    fn syzygies_vanish(seed in any::<u64>(), nv in 1usize..=3) {
        let r = ring(nv, MonomialOrder::GrevLex);
        let mut rng = random::rng(seed);
        let i = small_ideal(&r, &mut rng);
        let cols: Vec<FreeVector> = i.gens().iter().map(|g| FreeVector::new(&r, vec![g.clone()]).unwrap()).collect();
        for s in syzygies(&cols).unwrap() {
            let sum = s.comps().iter().zip(i.gens()).fold(r.zero(), |acc, (c, g)| &acc + &(c * g));
            prop_assert!(sum.is_zero());
        }
    }

    #[test]
    fn colon_between_ideal_and_saturation(seed in any::<u64>(), nv in 1usize..=2) {
        let r = ring(nv, MonomialOrder::GrevLex);
        let mut rng = random::rng(seed);
        let i = small_ideal(&r, &mut rng);
        let j = Ideal::new(&r, vec![random::nonconstant_poly(&r, &mut rng, 1, 2)]).unwrap();
        let colon = i.colon(&j).unwrap();
        let (sat, _) = i.saturate(&j).unwrap();
        prop_assert!(i.is_subset_of(&colon).unwrap());
        prop_assert!(colon.is_subset_of(&sat).unwrap());
        prop_assert!(i.product(&j).unwrap().is_subset_of(&i).unwrap());
        prop_assert!(colon.product(&j).unwrap().is_subset_of(&i).unwrap());
    }

    #[test]
    fn lifter_recovers_combinations(seed in any::<u64>(), nv in 1usize..=3, o in 0u8..3) {
        let r = ring(nv, order_of(o));
        let mut rng = random::rng(seed);
        let i = small_ideal(&r, &mut rng);
        let cols: Vec<FreeVector> = i.gens().iter().map(|g| FreeVector::new(&r, vec![g.clone()]).unwrap()).collect();
        let lifter = Lifter::new(&r, 1, &cols).unwrap();
        let target = i.gens().iter().fold(r.zero(), |acc, g| &acc + &(&random::poly(&r, &mut rng, 2, 3) * g));
        let coeffs = lifter.lift(&FreeVector::new(&r, vec![target.clone()]).unwrap()).unwrap().unwrap();
        let combo = coeffs.iter().zip(i.gens()).fold(r.zero(), |acc, (c, g)| &acc + &(c * g));
        prop_assert_eq!(combo, target);
    }

    #[test]
    fn fitting_ideals_increase(seed in any::<u64>()) {
        let r = ring(2, MonomialOrder::GrevLex);
        let mut rng = random::rng(seed);
        let rows = rng.gen_range(1..=3);
        let cols = rng.gen_range(1..=3);
        let m = FPModule::new(random::matrix(&r, &mut rng, rows, cols, 2));
        let chain: Vec<Ideal> = (0..=rows).map(|k| fitting_ideal(&m, k).unwrap()).collect();
        for w in chain.windows(2) {
            prop_assert!(w[0].is_subset_of(&w[1]).unwrap());
        }
        prop_assert!(chain[rows].is_unit().unwrap());
    }
}

#[test]
fn point_powers_have_staircase_length() {
    let r = ring(2, MonomialOrder::GrevLex);
    let m = Ideal::parse(&r, &["x", "y"]).unwrap();
    for n in 1..=4u32 {
        let q = FPModule::cyclic(&m.power(n).unwrap());
        assert_eq!(vector_space_dim(&q).unwrap(), (n * (n + 1) / 2) as u64);
        assert_eq!(module_dim(&q).unwrap(), 0);
    }
}

#[test]
fn dimensions_of_plane_modules() {
    let r = ring(2, MonomialOrder::GrevLex);
    let line = Ideal::parse(&r, &["x*y - 1"]).unwrap();
    assert_eq!(line.krull_dim().unwrap(), 1);
    assert_eq!(Ideal::unit(&r).krull_dim().unwrap(), -1);
    assert_eq!(module_dim(&FPModule::free(&r, 2)).unwrap(), 2);
    assert_eq!(module_dim(&FPModule::zero(&r)).unwrap(), -1);
    let x = r.var(0);
    let cols = [
        FreeVector::new(&r, vec![x.clone(), r.zero()]).unwrap(),
        FreeVector::new(&r, vec![r.zero(), x.clone()]).unwrap(),
    ];
    let m = FPModule::new(Matrix::from_columns(&r, 2, &cols).unwrap());
    assert_eq!(module_dim(&m).unwrap(), 1);
}

#[test]
fn saturation_removes_embedded_point() {
    let r = ring(2, MonomialOrder::GrevLex);
    let i = Ideal::parse(&r, &["x^2", "x*y"]).unwrap();
    let m = Ideal::parse(&r, &["x", "y"]).unwrap();
    let (sat, _) = i.saturate(&m).unwrap();
    assert!(sat.same_as(&Ideal::parse(&r, &["x"]).unwrap()).unwrap());
    let f: Poly = r.parse_poly("x").unwrap();
    assert!(!i.contains(&f).unwrap());
    assert!(i.radical_contains(&f).unwrap());
}
