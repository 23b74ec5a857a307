//! The three extension constructions, worked on (Z/4)-sized inputs.
//!
//! Starting from a map defined on the subgroup pA_1 (or into the small
//! codomain Z/q), each construction produces a genuinely multilinear
//! extension to the full domain A_1 (or the larger codomain Z/pq), with
//! the compatibility square checked pointwise.
//!
//! Run with: cargo run --example extension_lemmas

use multibias::group::{times_p_subgroup, FinAbGroup, GroupElement};
use multibias::map::MultiMapG;
use multibias::structure::{extend_domain, extend_range, extend_rank_one, RankOneWitness};

fn main() {
    let a1 = FinAbGroup::cyclic(4).unwrap();
    let z2 = FinAbGroup::cyclic(2).unwrap();
    let (sub, incl) = times_p_subgroup(&a1, 2);
    println!("A_1 = {a1}, pA_1 = {sub} included as multiples of 2");

    // --- domain enlargement -------------------------------------------
    // φ(2a, y) = ay mod 2 on pA_1 × Z/4
    let phi = MultiMapG::new(
        vec![sub.clone(), a1.clone()],
        z2.clone(),
        vec![GroupElement { coords: vec![1] }],
    )
    .unwrap();
    let psi = extend_domain(&phi, &a1, 2).unwrap();
    println!("\ndomain enlargement of φ(2a, y) = ay mod 2:");
    println!("  ψ : Z/4 x Z/4 -> Z/{}, ψ(1,1) = {}", 4, psi.entry(&[0, 0]).coords[0]);
    for y in sub.elements() {
        for x in a1.elements() {
            let lhs = psi.evaluate(&[incl.apply(&y), x.clone()]).unwrap().coords[0];
            let rhs = 2 * phi.evaluate(&[y.clone(), x.clone()]).unwrap().coords[0] % 4;
            assert_eq!(lhs, rhs);
        }
    }
    println!("  square ψ(ι(y), x) = 2·φ(y, x) verified on all 8 subdomain points");

    // --- range enlargement --------------------------------------------
    // φ(x, y) = xy mod 2 on (Z/4)², lifted to xy mod 4
    let phi = MultiMapG::new(
        vec![a1.clone(), a1.clone()],
        z2.clone(),
        vec![GroupElement { coords: vec![1] }],
    )
    .unwrap();
    let psi = extend_range(&phi, 2).unwrap();
    println!("\nrange enlargement of φ(x, y) = xy mod 2:");
    println!("  ψ : Z/4 x Z/4 -> Z/4 with ψ mod 2 = φ");
    for x in a1.elements() {
        for y in a1.elements() {
            let lifted = psi.evaluate(&[x.clone(), y.clone()]).unwrap().coords[0];
            let original = phi.evaluate(&[x.clone(), y.clone()]).unwrap().coords[0];
            assert_eq!(lifted % 2, original);
        }
    }
    println!("  reduction verified on all 16 points");

    // --- rank-one extension -------------------------------------------
    // φ = m_2(left, right) on pA_1 × Z/4 extends through m_4
    let left = MultiMapG::new(vec![sub.clone()], z2.clone(), vec![sub.element(&[1])]).unwrap();
    let right = MultiMapG::new(vec![a1.clone()], z2.clone(), vec![z2.element(&[1])]).unwrap();
    let witness = RankOneWitness { q: 2, i_axes: vec![0], left, right };
    let phi = witness.composite(2).unwrap();
    let (psi, new_witness) = extend_rank_one(&phi, &witness, &a1, 2).unwrap();
    println!("\nrank-one extension of a map factoring through m_2:");
    println!("  extends through m_{}", new_witness.q);
    for y in sub.elements() {
        for x in a1.elements() {
            assert_eq!(
                psi.evaluate(&[incl.apply(&y), x.clone()]).unwrap(),
                phi.evaluate(&[y.clone(), x.clone()]).unwrap()
            );
        }
    }
    println!("  extension agrees with φ on the whole subdomain");
}
