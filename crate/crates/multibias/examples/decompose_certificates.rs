//! Partition-rank certificates: search, verification, and the bias
//! bound they force.
//!
//! Run with: cargo run --example decompose_certificates

use multibias::bias::bias;
use multibias::group::FinAbGroup;
use multibias::map::{m_q, MultiMapT};
use multibias::structure::{
    decompose_by_induction, prime_support_bound, search_decomposition, verify_certificate,
};
use multibias::torus::TorusValue;
use multibias::Budget;
use num_rational::BigRational;

fn tv(n: i128, d: i128) -> TorusValue {
    TorusValue::new(n, d).unwrap()
}

fn show(name: &str, map: &MultiMapT, max_q: u64, max_rank: usize) {
    let budget = Budget::default();
    match search_decomposition(map, max_q, max_rank, &budget).unwrap() {
        Some(cert) => {
            let bound = cert.bias_bound();
            println!(
                "{name}: rank {} certificate, q's {:?}, bound {bound} <= bias {}",
                cert.rank(),
                cert.terms.iter().map(|t| t.q).collect::<Vec<_>>(),
                bias(map)
            );
            assert!(verify_certificate(map, &cert).unwrap().is_verified());
            assert!(bound <= bias(map));
        }
        None => println!("{name}: no certificate within q <= {max_q}, rank <= {max_rank}"),
    }
}

fn main() {
    show("m_3          ", &m_q(3).unwrap(), 4, 2);
    show("m_4          ", &m_q(4).unwrap(), 4, 2);

    // 2xy/4 on (Z/4)² factors through m_2
    let z4 = FinAbGroup::cyclic(4).unwrap();
    let half = MultiMapT::new(vec![z4.clone(), z4.clone()], vec![tv(2, 4)]).unwrap();
    show("2xy/4        ", &half, 2, 2);

    // xy/6 on (Z/6)² needs one term per primary part: rank 2
    let z6 = FinAbGroup::new(&[6]).unwrap();
    let sixth = MultiMapT::new(
        vec![z6.clone(), z6.clone()],
        vec![tv(1, 2), tv(0, 1), tv(0, 1), tv(2, 3)],
    )
    .unwrap();
    show("xy/6         ", &sixth, 4, 2);

    // the identity form on (Z/2 + Z/2)² has rank 2 over q = 2
    let v = FinAbGroup::new(&[2, 2]).unwrap();
    let ident = MultiMapT::new(
        vec![v.clone(), v],
        vec![tv(1, 2), tv(0, 1), tv(0, 1), tv(1, 2)],
    )
    .unwrap();
    show("x1y1 + x2y2  ", &ident, 2, 3);

    // the induction strategy: restrict to pA_1, decompose, extend,
    // subtract, decompose the remainder
    println!("\ninduction pipeline on m_4:");
    let cert = decompose_by_induction(&m_q(4).unwrap(), 4, 3, &Budget::default())
        .unwrap()
        .unwrap();
    println!(
        "  rank {} with q's {:?} (terms extended through m_pq have larger q)",
        cert.rank(),
        cert.terms.iter().map(|t| t.q).collect::<Vec<_>>()
    );

    // how many primes can support a map of bias >= ε
    println!("\nprime-support bound at k = 2:");
    for (n, d) in [(1i64, 2i64), (1, 4), (1, 10), (1, 100)] {
        let eps = BigRational::new(n.into(), d.into());
        println!(
            "  eps = {n}/{d}: at most {} primes",
            prime_support_bound(&eps, 2).unwrap()
        );
    }
}
