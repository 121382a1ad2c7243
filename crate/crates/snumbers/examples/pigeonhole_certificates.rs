//! Quantitative pigeonhole certificates: lower bounds on the Gelfand and
//! Kolmogorov numbers valid for every admissible subspace, with concrete
//! colliding pairs recorded in replayable transcripts.
//!
//! Run with `cargo run --example pigeonhole_certificates`.

use snumbers::operators::summation_matrix;
use snumbers::witnesses::{
    pigeonhole_lower_gelfand, pigeonhole_lower_kolmogorov, replay_pigeonhole,
};
use snumbers::ScalarMode;

fn main() {
    let mode = ScalarMode::Exact;
    println!("pigeonhole lower bounds for n = 2 (limit value 1/2)");
    println!(
        "{:>4} {:>12} {:>10} {:>12} {:>10}",
        "N", "gelfand", "(float)", "kolmogorov", "(float)"
    );
    for n_dim in [8usize, 16, 32, 41, 64, 96, 128] {
        let s = summation_matrix(mode, n_dim);
        let (g, gt) = pigeonhole_lower_gelfand(&s, 2, None).unwrap();
        let (k, kt) = pigeonhole_lower_kolmogorov(&s, 2, None).unwrap();
        replay_pigeonhole(&gt, &s).unwrap();
        replay_pigeonhole(&kt, &s).unwrap();
        println!(
            "{:>4} {:>12} {:>10.6} {:>12} {:>10.6}",
            n_dim,
            g.to_string(),
            g.to_f64(),
            k.to_string(),
            k.to_f64()
        );
    }

    let s41 = summation_matrix(mode, 41);
    let (k41, t41) = pigeonhole_lower_kolmogorov(&s41, 2, None).unwrap();
    assert_eq!(k41, mode.ratio(9, 20), "exactly 0.45 at N = 41");
    let demo = t41.demo.as_ref().unwrap();
    println!(
        "\nN = 41 transcript: {} trial images, separation q = {}, eps = {},",
        t41.trial_count, t41.separation, t41.eps
    );
    println!(
        "colliding approximant pair {:?} with gap {} <= eps; bound (gamma - eps)/2 = {}",
        demo.pair, demo.gap, t41.bound
    );
    println!("derivation: {}", t41.note);

    // certificates stay strictly below the limit value 1/2
    let half = mode.ratio(1, 2);
    assert!(k41.cmp_strict(&half) == std::cmp::Ordering::Less);
}
