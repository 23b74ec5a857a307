//! The MLMAP and MLCERT text formats: parsing, canonical emission, and
//! the parse/emit round trip.
//!
//! Run with: cargo run --example mlmap_files

use multibias::format::{emit_mlcert, emit_mlmap, parse_mlcert, parse_mlmap, MlmapDocument};
use multibias::structure::{search_decomposition, verify_certificate};
use multibias::Budget;

fn main() {
    // a hand-written document; orders are normalized at parse time
    let text = "\
# the pairing on Z/6 x Z/6, written with a composite order
mlmap 1
k 2
group 1 6
group 2 6
codomain T
entry 1 1 1/2     # the 2-part
entry 2 2 2/3     # the 3-part
";
    let doc = parse_mlmap(text).unwrap();
    println!("parsed; canonical emission:\n{}", emit_mlmap(&doc));

    let MlmapDocument::Linear(map) = &doc else { panic!("expected a linear map") };
    println!("domains after normalization: {} x {}", map.domains()[0], map.domains()[1]);

    // emit ∘ parse is idempotent
    let emitted = emit_mlmap(&doc);
    let again = parse_mlmap(&emitted).unwrap();
    assert_eq!(emit_mlmap(&again), emitted);
    println!("emit(parse(emit(parse(text)))) = emit(parse(text))");

    // invariant violations are rejected with their line number
    let bad = "mlmap 1\nk 2\ngroup 1 2\ngroup 2 2\ncodomain T\nentry 1 1 1/3\n";
    match parse_mlmap(bad) {
        Err(e) => println!("\nrejected bad entry: {e}"),
        Ok(_) => unreachable!("1/3 is not killed by order 2"),
    }

    // certificates embed two MLMAP blocks per term
    let cert = search_decomposition(map, 4, 2, &Budget::default()).unwrap().unwrap();
    let cert_text = emit_mlcert(&cert);
    println!("\ncertificate for the map above:\n{cert_text}");
    let parsed = parse_mlcert(&cert_text).unwrap();
    assert!(verify_certificate(map, &parsed).unwrap().is_verified());
    println!("reparsed certificate verifies");
}
