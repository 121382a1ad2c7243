//! Covering radii from quotient maps: the image polytope of the unit ball
//! must contain a dilate of the projected cube, computed exactly with
//! zonotope vertices and gauge LPs.
//!
//! Run with `cargo run --example mityagin_cover`.

use snumbers::engines::{mityagin_candidate_rho, mityagin_number, SearchBudget};
use snumbers::linalg::Matrix;
use snumbers::operators::{operator_from_matrix, summation_matrix};
use snumbers::ScalarMode;

fn main() {
    let mode = ScalarMode::Exact;

    // the identity on two coordinates viewed from l1 into linf: the
    // cross-polytope contains exactly half of the cube
    let id2 = operator_from_matrix(Matrix::identity(mode, 2)).unwrap();
    let rho = mityagin_candidate_rho(&id2, &Matrix::identity(mode, 2)).unwrap();
    println!("identity_2, zero subspace: rho = {rho}");
    assert_eq!(rho, mode.ratio(1, 2));

    // projecting onto one coordinate instead reaches the full norm
    let q = Matrix::from_rows(vec![vec![mode.one(), mode.zero()]]);
    let rho1 = mityagin_candidate_rho(&id2, &q).unwrap();
    println!("identity_2, coordinate quotient: rho = {rho1}");
    assert_eq!(rho1, mode.one());

    // odd-coordinate quotient of the partial-sum matrix: the image covers
    // 1/(2n-1) of the quotient ball, matching the factorization bound
    for (n, n_dim) in [(2usize, 3usize), (2, 7), (3, 5)] {
        let s = summation_matrix(mode, n_dim);
        let odd: Vec<usize> = (0..n).map(|k| 2 * k).collect();
        let q = Matrix::from_fn(mode, n, n_dim, |i, j| {
            if odd[i] == j {
                mode.one()
            } else {
                mode.zero()
            }
        });
        let rho = mityagin_candidate_rho(&s, &q).unwrap();
        println!("summation:{n_dim}, odd quotient (n = {n}): rho = {rho}");
        assert_eq!(rho, mode.ratio(1, 2 * n as i64 - 1));
    }

    // the full interval engine pins the value for the truncated operator
    let s3 = summation_matrix(mode, 3);
    let iv = mityagin_number(&s3, 2, &SearchBudget::default()).unwrap();
    println!(
        "m_2(summation:3) = [{}, {}]  ({} | {})",
        iv.lower.value, iv.upper.value, iv.lower.method, iv.upper.method
    );
    assert!(iv.is_pinned());
}
