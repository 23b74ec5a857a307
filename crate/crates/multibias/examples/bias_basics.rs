//! Exact biases of multilinear maps, by both algorithms.
//!
//! Run with: cargo run --example bias_basics

use multibias::bias::{bias, bias_oracle};
use multibias::group::FinAbGroup;
use multibias::map::{m_q, MultiMapT};
use multibias::torus::TorusValue;
use multibias::Budget;

fn main() {
    let budget = Budget::default();

    println!("bias(m_q) = 1/q for the multiplication pairing on (Z/q)^2:");
    for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
        let map = m_q(q).unwrap();
        let kernel = bias(&map);
        let oracle = bias_oracle(&map, &budget).unwrap();
        println!(
            "  q = {q:>2}: kernel {}, oracle {}",
            kernel,
            oracle.as_rational().unwrap()
        );
        assert_eq!(oracle.as_rational(), Some(kernel));
    }

    // the zero map averages e(0) = 1 everywhere
    let zero = MultiMapT::zero(vec![
        FinAbGroup::cyclic(4).unwrap(),
        FinAbGroup::cyclic(6).unwrap(),
    ])
    .unwrap();
    println!("\nbias(zero map on Z/4 x Z/6) = {}", bias(&zero));

    // a trilinear example: xyz/2 on (Z/2)^3 vanishes unless all of
    // x, y, z are odd, so the average is (7 - 1)/8 = 3/4
    let z2 = FinAbGroup::cyclic(2).unwrap();
    let triple = MultiMapT::new(
        vec![z2.clone(), z2.clone(), z2],
        vec![TorusValue::new(1, 2).unwrap()],
    )
    .unwrap();
    println!("bias(xyz/2 on (Z/2)^3) = {}", bias(&triple));

    // a nontrivial linear map is a nontrivial character: bias 0
    let z4 = FinAbGroup::cyclic(4).unwrap();
    let linear = MultiMapT::new(vec![z4], vec![TorusValue::new(1, 4).unwrap()]).unwrap();
    println!("bias(x/4 on Z/4)       = {}", bias(&linear));
}
