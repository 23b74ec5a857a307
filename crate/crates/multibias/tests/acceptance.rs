//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Run with: cargo test -p multibias --test acceptance -- --nocapture

mod common;

use common::{golden_corpus, tv, z};
use multibias::battery::{
    random_group, run_extension_battery, run_lemma_battery, run_main_term_battery, BatteryConfig,
};
use multibias::bias::{bias, bias_oracle, bias_oracle_affine, modulus_within};
use multibias::cyclo::CycloValue;
use multibias::map::{random_map_t, total_points, MultiAffine, MultiMapT};
use multibias::spectrum::{enumerate_bias_set, gauss_sum};
use multibias::structure::{
    crush_decomposition, search_decomposition, verify_certificate, verify_crush,
};
use multibias::{Budget, group::FinAbGroup};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn c1_exact_bias_of_multiplication_maps() {
    let budget = Budget::default();
    for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
        let map = multibias::map::m_q(q).unwrap();
        let expected = rat(1, q as i64);
        let kernel = bias(&map);
        assert_eq!(kernel, expected, "kernel bias of m_{q}");
        let oracle = bias_oracle(&map, &budget).unwrap();
        assert_eq!(oracle.as_rational(), Some(expected), "oracle bias of m_{q}");
    }
    println!("ACCEPTANCE 1: bias(m_q) = 1/q for prime powers q <= 16, both methods, exact: pass");
}

#[test]
fn c2_gauss_sum_reproduction() {
    let budget = Budget::default();
    for p in [3u64, 5, 7] {
        let g = z(p);
        let pairing =
            MultiMapT::new(vec![g.clone(), g.clone()], vec![tv(1, p as i128)]).unwrap();
        let mut terms = BTreeMap::new();
        terms.insert(0b011u32, pairing.clone());
        terms.insert(0b101u32, pairing.clone());
        terms.insert(0b110u32, pairing);
        let phi = MultiAffine::new(vec![g.clone(), g.clone(), g], terms).unwrap();
        let value = bias_oracle_affine(&phi, &budget).unwrap();

        // exact identity with p^{-2}·conj(G(p))
        let expected = gauss_sum(p)
            .unwrap()
            .conj()
            .scale_rational(&rat(1, (p * p) as i64));
        assert_eq!(value, expected, "bias identity at p = {p}");

        // certified modulus within 1e-12 of p^{-3/2}
        let target_sq = rat(1, (p * p * p) as i64);
        let tol = BigRational::new(1.into(), 1_000_000_000_000u64.into());
        assert!(
            modulus_within(&value, &target_sq, &tol),
            "modulus differs from p^{{-3/2}} at p = {p}"
        );
        // and the squared modulus is exactly p^{-3}
        assert_eq!(value.abs_sq(), CycloValue::from_rational(&target_sq));
    }
    println!("ACCEPTANCE 2: Gauss-sum biases p^-2·conj(G(p)) for p in {{3,5,7}}, exact: pass");
}

#[test]
fn c3_lemma_battery_thousand_maps() {
    let cfg = BatteryConfig {
        trials: 1000,
        seed: 20240801,
        max_order: 16,
        max_k: 3,
        budget: Budget::default(),
    };
    let report = run_lemma_battery(&cfg).unwrap();
    // every lemma family must be exercised and clean
    for name in [
        "bias recursion",
        "elementary bounds",
        "subadditivity",
        "factoring monotonicity",
        "certificate bound",
        "restriction monotonicity",
        "exponent bound",
        "primary multiplicativity",
        "kernel probability",
    ] {
        let stat = report
            .stats
            .iter()
            .find(|s| s.name == name)
            .unwrap_or_else(|| panic!("missing battery item {name}"));
        assert!(stat.checks > 0, "{name} never ran");
        assert!(
            stat.violations.is_empty(),
            "{name} violated:\n{}",
            stat.violations.join("\n")
        );
    }
    assert_eq!(report.total_violations(), 0, "\n{}", report.render());
    println!("ACCEPTANCE 3: lemma battery over 1000 seeded maps, zero violations: pass");
}

#[test]
fn c4_main_term_battery() {
    let cfg = BatteryConfig {
        trials: 200,
        seed: 9090,
        max_order: 8,
        max_k: 3,
        budget: Budget::default(),
    };
    let report = run_main_term_battery(&cfg).unwrap();
    assert!(report.stats[0].checks >= 200);
    assert_eq!(report.total_violations(), 0, "\n{}", report.render());
    println!("ACCEPTANCE 4: |bias| <= bias(main term) on 200 multiaffine maps: pass");
}

#[test]
fn c5_extension_battery() {
    let cfg = BatteryConfig {
        trials: 200,
        seed: 515,
        max_order: 16,
        max_k: 3,
        budget: Budget::default(),
    };
    let report = run_extension_battery(&cfg).unwrap();
    for name in ["domain enlargement", "range enlargement", "rank-one extension", "lift determinism"]
    {
        let stat = report
            .stats
            .iter()
            .find(|s| s.name == name)
            .unwrap_or_else(|| panic!("missing extension item {name}"));
        assert!(stat.checks >= 200, "{name} ran only {} times", stat.checks);
        assert!(
            stat.violations.is_empty(),
            "{name} violated:\n{}",
            stat.violations.join("\n")
        );
    }
    println!("ACCEPTANCE 5: extension squares on 200 seeded inputs, deterministic lifts: pass");
}

#[test]
fn c6_golden_decomposition_corpus() {
    let budget = Budget::default();
    let corpus = golden_corpus();
    assert_eq!(corpus.len(), 10);
    for case in &corpus {
        let cert = search_decomposition(&case.map, case.max_q, case.max_rank, &budget)
            .unwrap()
            .unwrap_or_else(|| panic!("{}: no certificate found", case.name));
        assert_eq!(cert.rank(), case.golden_rank, "{}: wrong rank", case.name);
        assert!(
            verify_certificate(&case.map, &cert).unwrap().is_verified(),
            "{}: certificate does not verify",
            case.name
        );
        assert!(
            cert.bias_bound() <= bias(&case.map),
            "{}: certificate bound above the bias",
            case.name
        );

        // crush roundtrip through the dual reading of the last axis
        let f = multibias::map::to_group_map(&case.map, case.map.arity() - 1).unwrap();
        let d = crush_decomposition(&f, &cert)
            .unwrap_or_else(|e| panic!("{}: crush failed: {e}", case.name));
        assert!(
            verify_crush(&f, &d).unwrap().is_verified(),
            "{}: crush does not reconstruct",
            case.name
        );
    }
    println!("ACCEPTANCE 6: golden corpus of 10 maps, search ranks and crush roundtrips: pass");
}

#[test]
fn c7_spectrum_slices() {
    let budget = Budget::default();
    let b1 = enumerate_bias_set(1, 8, &budget, 1).unwrap();
    let values: Vec<BigRational> = b1
        .entries
        .iter()
        .map(|e| match &e.value {
            multibias::bias::BiasValue::Rational(r) => r.clone(),
            _ => panic!("rational expected"),
        })
        .collect();
    assert_eq!(values, vec![rat(0, 1), rat(1, 1)], "B_1 slice");

    let b2 = enumerate_bias_set(2, 8, &budget, 1).unwrap();
    let values: Vec<BigRational> = b2
        .entries
        .iter()
        .map(|e| match &e.value {
            multibias::bias::BiasValue::Rational(r) => r.clone(),
            _ => panic!("rational expected"),
        })
        .collect();
    let expected: Vec<BigRational> = (1..=8).rev().map(|n| rat(1, n)).collect();
    assert_eq!(values, expected, "B_2 slice at max order 8");

    // byte-identical across repeated runs and thread counts
    let again = enumerate_bias_set(2, 8, &budget, 1).unwrap();
    assert_eq!(b2.render(), again.render(), "repeat run changed the report");
    for jobs in [2usize, 4] {
        let parallel = enumerate_bias_set(2, 8, &budget, jobs).unwrap();
        assert_eq!(b2.render(), parallel.render(), "jobs={jobs} changed the report");
    }
    println!("ACCEPTANCE 7: spectrum slices B_1 = {{0,1}}, B_2 = {{1/n}}, byte-stable: pass");
}

#[test]
fn c8_oracle_equivalence_on_corpus() {
    let budget = Budget::default();
    let mut checked = 0u64;
    for case in golden_corpus() {
        if total_points(case.map.domains()) <= 4096 {
            let kernel = bias(&case.map);
            let oracle = bias_oracle(&case.map, &budget).unwrap();
            assert_eq!(oracle.as_rational(), Some(kernel), "{}", case.name);
            checked += 1;
        }
    }
    // plus a seeded random sample across shapes
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for _ in 0..150 {
        let k = 1 + (checked as usize + 1) % 3;
        let domains: Vec<FinAbGroup> = (0..k).map(|_| random_group(&mut rng, 16)).collect();
        if total_points(&domains) > 4096 {
            continue;
        }
        let map = random_map_t(&domains, &mut rng);
        let kernel = bias(&map);
        let oracle = bias_oracle(&map, &budget).unwrap();
        assert_eq!(oracle.as_rational(), Some(kernel));
        checked += 1;
    }
    assert!(checked > 100, "too few corpus maps checked ({checked})");
    println!("ACCEPTANCE 8: kernel bias equals oracle bias on {checked} corpus maps: pass");
}
