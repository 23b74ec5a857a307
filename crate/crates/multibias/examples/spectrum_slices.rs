//! Finite slices of the bias spectrum.
//!
//! B_k is the set of all biases of k-linear maps over all finite abelian
//! groups. B_1 = {0, 1} and B_2 = {1/n : n ≥ 1}; at k ≥ 3 the structure
//! is much richer. This enumerates complete slices at bounded group
//! order and reports the distinct exact values found.
//!
//! Run with: cargo run --example spectrum_slices

use multibias::spectrum::{
    enumerate_bias_set, enumerate_bias_set_affine, reverse_gap, SpectrumWitness,
};
use multibias::Budget;
use num_rational::BigRational;

fn main() {
    let budget = Budget::default();

    let b1 = enumerate_bias_set(1, 8, &budget, 1).unwrap();
    println!("B_1 slice (orders <= 8):");
    print!("{}", b1.render());

    let b2 = enumerate_bias_set(2, 8, &budget, 1).unwrap();
    println!("\nB_2 slice (orders <= 8):");
    print!("{}", b2.render());

    // reverse gaps: distance from each value down to the next one
    println!("\nreverse gaps in the B_2 slice:");
    for entry in &b2.entries {
        let multibias::bias::BiasValue::Rational(r) = &entry.value else { continue };
        match reverse_gap(&b2, r) {
            Some(gap) => println!("  below {}: gap {}", r, gap),
            None => println!("  below {}: nothing smaller in the slice", r),
        }
    }

    // a witness map for the smallest value
    if let SpectrumWitness::Linear(map) = &b2.entries[0].witness {
        let doms: Vec<String> = map.domains().iter().map(|g| g.to_string()).collect();
        println!("\nwitness for the smallest value: domains {}", doms.join(" x "));
    }

    // degree-1 multiaffine maps with zero constant term are linear maps
    let affine = enumerate_bias_set_affine(2, 1, 4, &budget, 1).unwrap();
    println!("\nB_(2,1) slice (degree 1, orders <= 4) is {{0, 1}}:");
    print!("{}", affine.render());

    // small k = 3 sample: more denominators than 1/n appear
    let b3 = enumerate_bias_set(3, 4, &budget, 1).unwrap();
    let rationals: Vec<BigRational> = b3
        .entries
        .iter()
        .filter_map(|e| match &e.value {
            multibias::bias::BiasValue::Rational(r) => Some(r.clone()),
            _ => None,
        })
        .collect();
    println!("\nB_3 slice (orders <= 4) has {} values:", rationals.len());
    let rendered: Vec<String> = rationals.iter().map(|r| r.to_string()).collect();
    println!("  {}", rendered.join(", "));
}
