//! Quadratic Gauss sums and the complex bias they produce.
//!
//! G(p) = Σ_x e(x²/p) satisfies G(p)² = ±p, and the multiaffine map
//! φ(x,y,z) = (xy + xz + yz)/p on (Z/p)³ has bias p⁻²·conj(G(p)).
//!
//! Run with: cargo run --example gauss_sums

use multibias::bias::bias_oracle_affine;
use multibias::enclose::certified_decimal;
use multibias::group::FinAbGroup;
use multibias::map::{MultiAffine, MultiMapT};
use multibias::spectrum::gauss_sum;
use multibias::torus::TorusValue;
use multibias::Budget;
use num_rational::BigRational;
use std::collections::BTreeMap;

fn quadratic_form_bias(p: u64) -> multibias::cyclo::CycloValue {
    let g = FinAbGroup::cyclic(p).unwrap();
    let pairing = MultiMapT::new(
        vec![g.clone(), g.clone()],
        vec![TorusValue::new(1, p as i128).unwrap()],
    )
    .unwrap();
    let mut terms = BTreeMap::new();
    terms.insert(0b011u32, pairing.clone()); // xy/p
    terms.insert(0b101u32, pairing.clone()); // xz/p
    terms.insert(0b110u32, pairing); // yz/p
    let phi = MultiAffine::new(vec![g.clone(), g.clone(), g], terms).unwrap();
    bias_oracle_affine(&phi, &Budget::default()).unwrap()
}

fn main() {
    for p in [3u64, 5, 7, 11, 13] {
        let g = gauss_sum(p).unwrap();
        let sq = g.mul(&g).as_rational().unwrap();
        println!("G({p:>2}) = {g}");
        println!("        ~= {}", certified_decimal(&g, 12));
        println!("        G({p})^2 = {sq}  (p mod 4 = {})", p % 4);
    }

    println!("\nbias of (xy + xz + yz)/p on (Z/p)^3:");
    for p in [3u64, 5, 7] {
        let b = quadratic_form_bias(p);
        // conj(G(p))/p² computed independently from the Gauss sum
        let expected = gauss_sum(p)
            .unwrap()
            .conj()
            .scale_rational(&BigRational::new(1.into(), (p * p).into()));
        assert_eq!(b, expected);
        println!("  p = {p}: {b}");
        println!("       ~= {}", certified_decimal(&b, 12));
        // |bias|² = p⁻³ exactly
        let m2 = b.abs_sq().as_rational().unwrap();
        println!("       |bias|^2 = {m2}");
    }
}
