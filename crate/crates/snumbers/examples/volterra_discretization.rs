//! Discretizing integration on a uniform grid: cell masses make the domain
//! norm exact, and right-endpoint sampling reproduces the partial-sum matrix
//! entry for entry.
//!
//! Run with `cargo run --example volterra_discretization`.

use snumbers::operators::{op_norm, summation_matrix, volterra_matrix, SampleScheme, VolterraGrid};
use snumbers::ScalarMode;

fn main() {
    let mode = ScalarMode::Exact;

    for n in [1usize, 4, 16, 64] {
        let grid = VolterraGrid::new(mode, n, SampleScheme::RightEndpoint).unwrap();
        let v = volterra_matrix(&grid).unwrap();
        let s = summation_matrix(mode, n);
        assert_eq!(v.matrix, s.matrix, "right-endpoint discretization at N = {n}");
    }
    println!("right-endpoint discretization equals the partial-sum matrix for N in {{1,4,16,64}}");

    let grid = VolterraGrid::new(mode, 4, SampleScheme::Midpoint).unwrap();
    let v = volterra_matrix(&grid).unwrap();
    println!("\nmidpoint scheme, 4 cells:");
    for i in 0..v.matrix.rows {
        let row: Vec<String> = (0..v.matrix.cols)
            .map(|j| v.matrix[(i, j)].to_string())
            .collect();
        println!("  [{}]", row.join(", "));
    }
    let norm = op_norm(&v);
    println!("operator norm: {}", norm.value);
    assert_eq!(norm.value, mode.one());

    // explicit sample points are allowed anywhere in [0,1]
    let samples = vec![mode.zero(), mode.ratio(1, 3), mode.one()];
    let grid = VolterraGrid::new(mode, 6, SampleScheme::Explicit(samples)).unwrap();
    let v = volterra_matrix(&grid).unwrap();
    println!("\nexplicit samples {{0, 1/3, 1}} on 6 cells: {} rows", v.matrix.rows);
    assert!(v.matrix.row(0).iter().all(|x| x.is_zero()), "the primitive vanishes at zero");
}
