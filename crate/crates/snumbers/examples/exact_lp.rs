//! The exact simplex kernel: every optimal solve carries primal and dual
//! certificates whose objective values match as identical rationals.
//!
//! Run with `cargo run --example exact_lp`.

use snumbers::linalg::dot;
use snumbers::lp::{lp_solve, LinearProgram, LpStatus};
use snumbers::ScalarMode;

fn main() {
    let m = ScalarMode::Exact;

    // the quotient-distance subproblem: min t s.t. t >= 1-u, t >= 2u-1
    let mut lp = LinearProgram::minimize(m, vec![m.one(), m.zero()]);
    lp.add_ineq_ge(vec![m.one(), m.one()], m.one());
    lp.add_ineq_ge(vec![m.one(), m.from_int(-2)], m.from_int(-1));
    let sol = lp_solve(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Optimal);
    println!("optimum {} at u = {}", sol.value(), sol.point()[1]);
    assert_eq!(sol.value(), &m.ratio(1, 3));

    // duality certificate: u >= 0 multipliers reproduce the objective
    let u = sol.dual_ineq.as_ref().unwrap();
    let dual_value = -&dot(&lp.ineq_rhs, u);
    println!("dual multipliers {:?} reproduce the optimum: {}",
        u.iter().map(|s| s.to_string()).collect::<Vec<_>>(), dual_value);
    assert_eq!(&dual_value, sol.value());

    // infeasible and unbounded problems are reported as such
    let mut bad = LinearProgram::minimize(m, vec![m.zero()]);
    bad.add_ineq(vec![m.one()], m.from_int(-1));
    bad.add_ineq_ge(vec![m.one()], m.one());
    assert_eq!(lp_solve(&bad).unwrap().status, LpStatus::Infeasible);
    println!("contradictory constraints: infeasible");

    let mut unb = LinearProgram::minimize(m, vec![m.one()]);
    unb.add_ineq(vec![m.one()], m.from_int(5));
    assert_eq!(lp_solve(&unb).unwrap().status, LpStatus::Unbounded);
    println!("unbounded objective: detected");
}
