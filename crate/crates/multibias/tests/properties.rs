//! Property suites: the algebraic laws behind the public contracts,
//! checked on seeded random instances.

mod common;

use multibias::battery::random_group;
use multibias::bias::bias;
use multibias::cyclo::CycloValue;
use multibias::format::{emit_mlmap, parse_mlmap, MlmapDocument};
use multibias::group::{pair, quotient, FinAbGroup, GroupElement};
use multibias::map::{domain_tuples, from_group_map, random_map_g, random_map_t, to_group_map};
use multibias::torus::TorusValue;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_group(seed: u64, max_order: u64) -> FinAbGroup {
    random_group(&mut ChaCha8Rng::seed_from_u64(seed), max_order)
}

proptest! {
    #[test]
    fn torus_is_a_group(an in 0i128..1000, ad in 1i128..1000, bn in 0i128..1000, bd in 1i128..1000) {
        let a = TorusValue::new(an, ad).unwrap();
        let b = TorusValue::new(bn, bd).unwrap();
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert!(a.add(&a.neg()).is_zero());
        prop_assert_eq!(a.add(&TorusValue::zero()), a);
    }

    #[test]
    fn exponential_is_a_character(an in 0i128..24, bn in 0i128..24, d in 1i128..=24) {
        let s = TorusValue::new(an, d).unwrap();
        let t = TorusValue::new(bn, d).unwrap();
        let lhs = CycloValue::root_of_unity(&s.add(&t));
        let rhs = CycloValue::root_of_unity(&s).mul(&CycloValue::root_of_unity(&t));
        prop_assert_eq!(lhs, rhs);
    }


    #[test]
    fn canonical_form_is_idempotent(orders in proptest::collection::vec(1u64..=64, 1..4)) {
        let g = FinAbGroup::new(&orders).unwrap();
        let again = FinAbGroup::new(g.factors()).unwrap();
        prop_assert_eq!(&g, &again);
        let count = g.elements().count() as u128;
        prop_assert_eq!(count, g.order());
    }

    #[test]
    fn quotient_order_identity(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_group(&mut rng, 32);
        use rand::Rng;
        let n_gens = rng.gen_range(0..=2usize);
        let gens: Vec<GroupElement> = (0..n_gens)
            .map(|_| {
                let coords: Vec<u64> =
                    g.factors().iter().map(|&f| rng.gen_range(0..f)).collect();
                g.element(&coords)
            })
            .collect();
        let (q, proj) = quotient(&g, &gens).unwrap();
        // kernel size times quotient order is the group order
        let kernel = g
            .elements()
            .filter(|x| q.is_zero(&proj.apply(x)))
            .count() as u128;
        prop_assert_eq!(q.order() * kernel, g.order());
    }

    #[test]
    fn duality_separates_points(seed in 0u64..100) {
        let g = small_group(seed, 24);
        for x in g.elements() {
            if g.is_zero(&x) {
                continue;
            }
            let found = g.elements().any(|chi| !pair(&g, &chi, &x).unwrap().is_zero());
            prop_assert!(found);
        }
    }

    #[test]
    fn evaluate_is_multilinear(seed in 0u64..150) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let k = rng.gen_range(1..=3usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 8)).collect();
        if multibias::map::total_points(&domains) > 256 {
            return Ok(());
        }
        let map = random_map_t(&domains, &mut rng);
        for axis in 0..k {
            for x in domain_tuples(&domains) {
                for y in domains[axis].elements() {
                    let mut shifted = x.clone();
                    shifted[axis] = domains[axis].add(&x[axis], &y);
                    let mut swapped = x.clone();
                    swapped[axis] = y.clone();
                    let lhs = map.evaluate(&shifted).unwrap();
                    let rhs = map.evaluate(&x).unwrap().add(&map.evaluate(&swapped).unwrap());
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn restriction_is_consistent(seed in 0u64..150) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let k = rng.gen_range(2..=3usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 6)).collect();
        if multibias::map::total_points(&domains) > 216 {
            return Ok(());
        }
        let map = random_map_t(&domains, &mut rng);
        let axis = rng.gen_range(0..k);
        let coords: Vec<u64> =
            domains[axis].factors().iter().map(|&f| rng.gen_range(0..f)).collect();
        let fixed = domains[axis].element(&coords);
        let restricted = map.restrict_fix(&[axis], &[fixed.clone()]).unwrap();
        for rest in domain_tuples(&restricted.domains().to_vec()) {
            let mut full = Vec::with_capacity(k);
            let mut it = rest.iter();
            for i in 0..k {
                if i == axis {
                    full.push(fixed.clone());
                } else {
                    full.push(it.next().unwrap().clone());
                }
            }
            prop_assert_eq!(restricted.evaluate(&rest).unwrap(), map.evaluate(&full).unwrap());
        }
    }

    #[test]
    fn primary_parts_reassemble(seed in 0u64..150) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let k = rng.gen_range(1..=2usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 16)).collect();
        if multibias::map::total_points(&domains) > 256 {
            return Ok(());
        }
        let map = random_map_t(&domains, &mut rng);
        let parts = map.primary_split();
        for x in domain_tuples(&domains) {
            let mut acc = TorusValue::zero();
            for part in &parts {
                let projected: Vec<GroupElement> =
                    part.projections.iter().zip(&x).map(|(p, xi)| p.apply(xi)).collect();
                acc = acc.add(&part.part.evaluate(&projected).unwrap());
            }
            prop_assert_eq!(acc, map.evaluate(&x).unwrap());
        }
    }

    #[test]
    fn duality_roundtrip_is_identity(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let k = rng.gen_range(1..=2usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 12)).collect();
        let codomain = random_group(&mut rng, 12);
        let f = random_map_g(&domains, &codomain, &mut rng);
        let phi = from_group_map(&f).unwrap();
        let back = to_group_map(&phi, k).unwrap();
        prop_assert_eq!(back, f.clone());
        // and the kernel probability identity holds
        let mut zeros = 0u64;
        let mut total = 0u64;
        for x in domain_tuples(&domains) {
            total += 1;
            if codomain.is_zero(&f.evaluate(&x).unwrap()) {
                zeros += 1;
            }
        }
        use num_rational::BigRational;
        prop_assert_eq!(BigRational::new(zeros.into(), total.into()), bias(&phi));
    }

    #[test]
    fn kernel_subgroup_is_a_subgroup(seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let k = rng.gen_range(1..=2usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 12)).collect();
        let map = random_map_t(&domains, &mut rng);
        let axis = rng.gen_range(0..k);
        let kernel = map.kernel_subgroup(axis);
        prop_assert!(kernel.contains(&domains[axis].zero()));
        for a in &kernel {
            for b in &kernel {
                prop_assert!(kernel.contains(&domains[axis].add(a, b)));
            }
        }
    }

    #[test]
    fn mlmap_roundtrip(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let k = rng.gen_range(1..=3usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 16)).collect();
        let map = random_map_t(&domains, &mut rng);
        let doc = MlmapDocument::Linear(map.clone());
        let text = emit_mlmap(&doc);
        let parsed = parse_mlmap(&text).unwrap();
        let MlmapDocument::Linear(back) = &parsed else {
            return Err(TestCaseError::fail("parsed a different document kind"));
        };
        prop_assert_eq!(back, &map);
        // emission of the reparse is byte-identical
        prop_assert_eq!(emit_mlmap(&parsed), text);
    }

    #[test]
    fn group_valued_mlmap_roundtrip(seed in 0u64..150) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        use rand::Rng;
        let k = rng.gen_range(1..=2usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 12)).collect();
        let codomain = random_group(&mut rng, 12);
        let map = random_map_g(&domains, &codomain, &mut rng);
        let doc = MlmapDocument::GroupValued(map.clone());
        let text = emit_mlmap(&doc);
        let parsed = parse_mlmap(&text).unwrap();
        let MlmapDocument::GroupValued(back) = &parsed else {
            return Err(TestCaseError::fail("parsed a different document kind"));
        };
        prop_assert_eq!(back, &map);
    }
}

#[test]
fn cyclo_equality_agrees_with_enclosures() {
    // exact equality vs. certified numerics on 1000 random pairs:
    // disjoint enclosures imply inequality, and equal values never
    // separate numerically
    let mut rng = ChaCha8Rng::seed_from_u64(0xace);
    let rand_val = |rng: &mut ChaCha8Rng| {
        use rand::Rng;
        let den = rng.gen_range(1i128..=12);
        let num = rng.gen_range(0i128..den);
        let scale = rng.gen_range(-3i64..=3);
        CycloValue::root_of_unity(&TorusValue::new(num, den).unwrap())
            .scale_int(&num_bigint::BigInt::from(scale))
    };
    for _ in 0..1000 {
        let a = rand_val(&mut rng);
        let b = rand_val(&mut rng);
        let enc_a = multibias::enclose::enclose(&a, 96);
        let enc_b = multibias::enclose::enclose(&b, 96);
        let re_disjoint = enc_a.re.hi < enc_b.re.lo || enc_b.re.hi < enc_a.re.lo;
        let im_disjoint = enc_a.im.hi < enc_b.im.lo || enc_b.im.hi < enc_a.im.lo;
        if re_disjoint || im_disjoint {
            assert_ne!(a, b, "disjoint enclosures imply inequality");
        }
        if a == b {
            assert!(!re_disjoint && !im_disjoint, "equal values must not separate");
        }
    }
}

#[test]
fn orbit_sums_and_unit_moduli() {
    // Σ_j e(j/N) = 0 for N > 1, = 1 for N = 1; |e(j/N)| = 1
    for n in 1..=24i128 {
        let mut acc = CycloValue::zero();
        for j in 0..n {
            acc = acc.add(&CycloValue::root_of_unity(&TorusValue::new(j, n).unwrap()));
        }
        if n == 1 {
            assert_eq!(acc, CycloValue::one());
        } else {
            assert!(acc.is_zero(), "orbit sum at N = {n}");
        }
    }
}

#[test]
fn times_p_and_torsion_sizes() {
    // |pA|·|A[p]| = |A| on the p-primary part, exhaustive for |A| <= 64
    for orders in [vec![4u64], vec![8], vec![16, 4], vec![2, 2, 2], vec![9, 3], vec![27]] {
        let a = FinAbGroup::new(&orders).unwrap();
        assert!(a.order() <= 64);
        for p in [2u64, 3, 5] {
            let (pa, _) = multibias::group::times_p_subgroup(&a, p);
            let (tor, _) = multibias::group::p_torsion(&a, p);
            let (pa_p, _, _) = multibias::group::primary_component(&pa, p);
            let (prim, _, _) = multibias::group::primary_component(&a, p);
            assert_eq!(pa_p.order() * tor.order(), prim.order(), "{orders:?} at p = {p}");
        }
    }
}

#[test]
fn bias_values_lie_in_unit_interval() {
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for _ in 0..100 {
        use rand::Rng;
        let k = rng.gen_range(1..=3usize);
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 12)).collect();
        let map = random_map_t(&domains, &mut rng);
        let b = bias(&map);
        assert!(b >= num_rational::BigRational::from_integer(0.into()));
        assert!(b <= num_rational::BigRational::from_integer(1.into()));
    }
}
