//! Full certified report for the partial-sum operator on five coordinates:
//! all six s-numbers as two-sided intervals with witness-backed sides.
//!
//! Run with `cargo run --example compute_summation`.

use snumbers::engines::{report, SNumberKind, SearchBudget};
use snumbers::operators::summation_matrix;
use snumbers::ScalarMode;

fn main() {
    let op = summation_matrix(ScalarMode::Exact, 5);
    let budget = SearchBudget::default();
    let rep = report(&op, 3, &budget).expect("consistent report");

    println!("s-numbers of the 5x5 partial-sum matrix (exact mode)");
    println!("{:<14} {:>2} {:>10} {:>10}  method", "kind", "n", "lower", "upper");
    for row in &rep.rows {
        for kind in SNumberKind::ALL {
            let iv = row.get(kind);
            println!(
                "{:<14} {:>2} {:>10} {:>10}  {}|{}",
                kind.tag(),
                row.n,
                iv.lower.value.to_string(),
                iv.upper.value.to_string(),
                iv.lower.method,
                iv.upper.method,
            );
        }
        println!();
    }

    // the small kinds are pinned at 1/(2n-1) by witnesses and truncation
    for n in 1..=3usize {
        let expect = ScalarMode::Exact.ratio(1, 2 * n as i64 - 1);
        for kind in [
            SNumberKind::Bernstein,
            SNumberKind::Mityagin,
            SNumberKind::Isomorphism,
        ] {
            let iv = rep.interval(kind, n);
            assert_eq!(iv.lower.value, expect);
            assert_eq!(iv.upper.value, expect);
        }
    }
    println!("bernstein, mityagin and isomorphism rows are pinned at 1/(2n-1)");
}
