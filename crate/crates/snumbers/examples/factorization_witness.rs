//! Identity factorizations through the operator: build both constructions,
//! verify them exactly, export to the witness file format and re-verify the
//! parsed records.
//!
//! Run with `cargo run --example factorization_witness`.

use snumbers::operators::{summation_matrix, volterra_matrix, SampleScheme, VolterraGrid};
use snumbers::witnesses::{
    build_factorization_discrete, build_factorization_volterra, read_witness_file,
    verify_factorization, verify_record, write_witness_file, WitnessFileRecord,
};
use snumbers::ScalarMode;

fn main() {
    let mode = ScalarMode::Exact;

    // coordinate-selection pair against the partial-sum matrix
    let s5 = summation_matrix(mode, 5);
    let w = build_factorization_discrete(mode, 3, 5).unwrap();
    let v = verify_factorization(&w, &s5).unwrap();
    println!(
        "discrete witness n=3 on summation:5  ok={} |A|={} |B|={} bound={}",
        v.ok, w.norm_a, w.norm_b, v.bound
    );
    assert!(v.ok && v.bound == mode.ratio(1, 5));

    // weighted-space pair against the discretized integration operator
    let grid = VolterraGrid::new(mode, 9, SampleScheme::RightEndpoint).unwrap();
    let v9 = volterra_matrix(&grid).unwrap();
    let w2 = build_factorization_volterra(mode, 2, 9).unwrap();
    let v2 = verify_factorization(&w2, &v9).unwrap();
    println!(
        "weighted witness n=2 on volterra:9   ok={} |A|={} |B|={} bound={}",
        v2.ok, w2.norm_a, w2.norm_b, v2.bound
    );
    assert!(v2.ok && v2.bound == mode.ratio(1, 3));

    // round-trip through the export format
    let records = vec![WitnessFileRecord::Factorization(w)];
    let mut buf = Vec::new();
    write_witness_file(&mut buf, &records).unwrap();
    let text = String::from_utf8(buf).unwrap();
    println!("\nexported record:\n{text}");
    let parsed = read_witness_file(&text, mode).unwrap();
    let detail = verify_record(&parsed[0], &s5).unwrap();
    println!("re-verified from text: {detail}");

    // tampering one entry must break the identity
    let mut bad = build_factorization_discrete(mode, 3, 5).unwrap();
    bad.b[(0, 0)] = &bad.b[(0, 0)] + &mode.one();
    let vb = verify_factorization(&bad, &s5).unwrap();
    println!("tampered witness: ok={} offending={:?}", vb.ok, vb.offending_entry);
    assert!(!vb.ok);
}
