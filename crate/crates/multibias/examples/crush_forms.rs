//! Crush-form rewriting: a group-valued map with large kernel becomes a
//! sum of terms that first compress some variables through a small
//! group, then map multilinearly to the codomain.
//!
//! Run with: cargo run --example crush_forms

use multibias::group::FinAbGroup;
use multibias::map::{domain_tuples, from_group_map, MultiMapG};
use multibias::structure::{
    crush_decomposition, search_decomposition, verify_crush, CertTerm, RankCertificate,
};
use multibias::Budget;

fn main() {
    // F(x, y) = 2xy on (Z/4)² → Z/4: P(F = 0) = 3/4
    let z4 = FinAbGroup::cyclic(4).unwrap();
    let f = MultiMapG::new(
        vec![z4.clone(), z4.clone()],
        z4.clone(),
        vec![z4.element(&[2])],
    )
    .unwrap();
    let phi = from_group_map(&f).unwrap();
    let cert = search_decomposition(&phi, 2, 2, &Budget::default()).unwrap().unwrap();
    let d = crush_decomposition(&f, &cert).unwrap();
    println!("F(x, y) = 2xy on (Z/4)^2 -> Z/4:");
    for term in &d.terms {
        println!(
            "  I = {:?} (1-based {:?}), g compresses into {} of order {}",
            term.i_axes,
            term.i_axes.iter().map(|a| a + 1).collect::<Vec<_>>(),
            term.compressor.codomain(),
            term.compressor.codomain().order()
        );
    }
    assert!(verify_crush(&f, &d).unwrap().is_verified());
    // spot-check the reconstruction: F(x, y) = G(g(x), y)
    let term = &d.terms[0];
    for x in domain_tuples(f.domains()) {
        let compressed = term.compressor.evaluate(&[x[0].clone()]).unwrap();
        let rebuilt = term.expander.evaluate(&[compressed, x[1].clone()]).unwrap();
        assert_eq!(rebuilt, f.evaluate(&x).unwrap());
    }
    println!("  reconstruction F(x, y) = G(g(x), y) verified on all 16 points");

    // two certificate terms sharing I merge into one crush term with a
    // product codomain: F = x1y1 + x2y2 on (Z/2 + Z/2)² → Z/2
    let v = FinAbGroup::new(&[2, 2]).unwrap();
    let z2 = FinAbGroup::cyclic(2).unwrap();
    let f = MultiMapG::new(
        vec![v.clone(), v.clone()],
        z2.clone(),
        vec![
            z2.element(&[1]),
            z2.element(&[0]),
            z2.element(&[0]),
            z2.element(&[1]),
        ],
    )
    .unwrap();
    let mut terms = Vec::new();
    for j in 0..2usize {
        let pick = |m: usize| z2.element(&[(m == j) as u64]);
        let left = MultiMapG::new(vec![v.clone()], z2.clone(), vec![pick(0), pick(1)]).unwrap();
        let right =
            MultiMapG::new(vec![v.clone(), z2.clone()], z2.clone(), vec![pick(0), pick(1)])
                .unwrap();
        terms.push(CertTerm { q: 2, i_axes: vec![0], left, right });
    }
    let cert = RankCertificate { terms };
    let d = crush_decomposition(&f, &cert).unwrap();
    println!("\nF = x1y1 + x2y2 on (Z/2+Z/2)^2 -> Z/2 with a two-term certificate:");
    println!(
        "  merged into {} crush term(s); cod(g) = {}",
        d.terms.len(),
        d.terms[0].compressor.codomain()
    );
    assert!(verify_crush(&f, &d).unwrap().is_verified());
    println!("  reconstruction verified");
}
