//! The seeded lemma batteries: every inequality checked exactly on
//! random instances, with witnesses on failure.
//!
//! Run with: cargo run --example lemma_battery

use multibias::battery::{
    run_extension_battery, run_lemma_battery, run_main_term_battery, BatteryConfig,
};

fn main() {
    let cfg = BatteryConfig {
        trials: 150,
        seed: 2024,
        max_order: 16,
        max_k: 3,
        ..Default::default()
    };

    println!("multilinear identities and inequalities ({} trials):", cfg.trials);
    let lemmas = run_lemma_battery(&cfg).unwrap();
    print!("{}", lemmas.render());

    println!("\nmain-term inequality on multiaffine maps:");
    let affine = run_main_term_battery(&cfg).unwrap();
    print!("{}", affine.render());

    println!("\nextension constructions (commuting squares, pointwise):");
    let ext = run_extension_battery(&cfg).unwrap();
    print!("{}", ext.render());

    let total = lemmas.total_violations() + affine.total_violations() + ext.total_violations();
    println!("\ntotal violations: {total}");
    assert_eq!(total, 0);
}
