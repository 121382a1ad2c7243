//! Interval-level axiom checks on random rational matrices: monotonicity,
//! additive and multiplicative stability, and vanishing beyond the rank.
//!
//! Run with `cargo run --example axiom_suite`.

use snumbers::cli::run_axioms;
use snumbers::engines::SearchBudget;

fn main() {
    let budget = SearchBudget {
        candidates: 2,
        refine_rounds: 2,
        seed: 7,
        workers: 1,
    };
    let runs = run_axioms(6, &[3], 7, &budget).unwrap();
    for run in &runs {
        let r = &run.report;
        println!(
            "{}: PASS {}  INDETERMINATE {} ({:.1}%)  FAIL {}  unsupported {}",
            run.axiom.tag(),
            r.pass,
            r.indeterminate,
            100.0 * r.indeterminate_rate(),
            r.fail,
            r.unsupported
        );
        assert_eq!(r.fail, 0, "certified bounds must never contradict an axiom");
    }
}
