//! Pontryagin duality: group-valued maps as torus-valued maps.
//!
//! A multilinear F : A_1 × … × A_{k−1} → B becomes the torus-valued map
//! φ(x, χ) = ⟨χ, F(x)⟩ on one more axis (the dual of B), and then
//! P(F = 0) = bias(φ). The translation is invertible.
//!
//! Run with: cargo run --example dual_pairing

use multibias::bias::bias;
use multibias::group::{dual_group, pair, FinAbGroup};
use multibias::map::{domain_tuples, from_group_map, to_group_map, MultiMapG};
use num_rational::BigRational;

fn main() {
    let z4 = FinAbGroup::cyclic(4).unwrap();
    let dual = dual_group(&z4);
    println!("dual of {} is {} (same factor list)", z4, dual);
    for chi in 0..4u64 {
        let v = pair(&z4, &z4.element(&[chi]), &z4.element(&[1])).unwrap();
        println!("  <chi={chi}, 1> = {v}");
    }

    // F(x, y) = 2xy on (Z/4)² into Z/4
    let f = MultiMapG::new(
        vec![z4.clone(), z4.clone()],
        z4.clone(),
        vec![z4.element(&[2])],
    )
    .unwrap();

    // count the kernel directly
    let mut zeros = 0u64;
    let mut total = 0u64;
    for x in domain_tuples(f.domains()) {
        total += 1;
        if f.codomain().is_zero(&f.evaluate(&x).unwrap()) {
            zeros += 1;
        }
    }
    let p_zero = BigRational::new(zeros.into(), total.into());
    println!("\nF(x, y) = 2xy on (Z/4)^2: P(F = 0) = {zeros}/{total}");

    // the same number through the dualized map
    let phi = from_group_map(&f).unwrap();
    let b = bias(&phi);
    println!("bias of the dualized 3-linear map = {b}");
    assert_eq!(p_zero, b);

    // and the translation is invertible
    let back = to_group_map(&phi, 2).unwrap();
    assert_eq!(back, f);
    println!("to_group_map(from_group_map(F)) = F  (roundtrip exact)");
}
