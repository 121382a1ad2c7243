//! Self-contained dense simplex solver with optimality certificates.
//!
//! Problems are stated over free variables as
//!
//! ```text
//!     min/max  c'x   s.t.   A x <= b,   E x = f.
//! ```
//!
//! Internally the solver splits free variables, adds slacks and artificials,
//! and runs two-phase simplex with Bland's rule, so exact-mode runs terminate
//! and never round. An optimal solution carries dual multipliers `(u, v)`,
//! `u >= 0`, satisfying `E'v - A'u = c` and `f'v - b'u = c'x` for the
//! minimization form; in exact mode the objective match is asserted.

use crate::error::{Error, Result};
use crate::linalg::{dot, zeros, Matrix, Vector};
use crate::scalar::{Scalar, ScalarMode};

/// Feasibility epsilon for float-mode pivoting.
pub const LP_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub mode: ScalarMode,
    pub sense: Sense,
    pub objective: Vector,
    pub ineq: Vec<Vector>,
    pub ineq_rhs: Vector,
    pub eq: Vec<Vector>,
    pub eq_rhs: Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output; `primal`, `dual_*` and `optimum` are present iff optimal.
///
/// Dual multipliers certify the *minimization form* of the problem (a `Max`
/// objective is negated internally): `u >= 0` on inequality rows and
/// `E'v - A'u = c_min`, with `f'v - b'u` equal to the minimal value.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub optimum: Option<Scalar>,
    pub primal: Option<Vector>,
    pub dual_ineq: Option<Vector>,
    pub dual_eq: Option<Vector>,
}

impl LpSolution {
    pub fn optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value(&self) -> &Scalar {
        self.optimum.as_ref().expect("LP not optimal")
    }

    pub fn point(&self) -> &Vector {
        self.primal.as_ref().expect("LP not optimal")
    }
}

impl LinearProgram {
    pub fn new(mode: ScalarMode, sense: Sense, objective: Vector) -> LinearProgram {
        LinearProgram {
            mode,
            sense,
            objective,
            ineq: Vec::new(),
            ineq_rhs: Vec::new(),
            eq: Vec::new(),
            eq_rhs: Vec::new(),
        }
    }

    pub fn minimize(mode: ScalarMode, objective: Vector) -> LinearProgram {
        LinearProgram::new(mode, Sense::Min, objective)
    }

    pub fn maximize(mode: ScalarMode, objective: Vector) -> LinearProgram {
        LinearProgram::new(mode, Sense::Max, objective)
    }

    /// Add `row . x <= rhs`.
    pub fn add_ineq(&mut self, row: Vector, rhs: Scalar) {
        self.ineq.push(row);
        self.ineq_rhs.push(rhs);
    }

    /// Add `row . x >= rhs` (stored negated).
    pub fn add_ineq_ge(&mut self, row: Vector, rhs: Scalar) {
        self.ineq.push(row.iter().map(|x| -x).collect());
        self.ineq_rhs.push(-rhs);
    }

    /// Add `row . x = rhs`.
    pub fn add_eq(&mut self, row: Vector, rhs: Scalar) {
        self.eq.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn nvars(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.nvars();
        if n == 0 {
            return Err(Error::Dimension("LP with no variables".into()));
        }
        if self.ineq.len() != self.ineq_rhs.len() || self.eq.len() != self.eq_rhs.len() {
            return Err(Error::Dimension("row/rhs count mismatch".into()));
        }
        for r in self.ineq.iter().chain(self.eq.iter()) {
            if r.len() != n {
                return Err(Error::Dimension(format!(
                    "constraint row has {} entries, expected {n}",
                    r.len()
                )));
            }
        }
        let mode = self.mode;
        let uniform = self
            .objective
            .iter()
            .chain(self.ineq.iter().flatten())
            .chain(self.ineq_rhs.iter())
            .chain(self.eq.iter().flatten())
            .chain(self.eq_rhs.iter())
            .all(|s| s.mode() == mode);
        if !uniform {
            return Err(Error::MixedModes("LP data disagrees with LP mode".into()));
        }
        Ok(())
    }
}

/// Solve the program. See [`LpSolution`] for the certificate contract.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    let mode = lp.mode;
    let n = lp.nvars();
    let minimize: Vector = match lp.sense {
        Sense::Min => lp.objective.clone(),
        Sense::Max => lp.objective.iter().map(|c| -c).collect(),
    };

    let p = lp.ineq.len();
    let q = lp.eq.len();
    let m = p + q;

    // Computational form over nonnegative variables [x+ (n), x- (n), s (p)],
    // row i scaled by eta_i = +-1 so every rhs is nonnegative.
    let nstruct = 2 * n + p;
    let mut rows: Vec<Vector> = Vec::with_capacity(m);
    let mut rhs: Vector = Vec::with_capacity(m);
    let mut negated: Vec<bool> = Vec::with_capacity(m);
    let mut slack_of_row: Vec<Option<usize>> = Vec::with_capacity(m);
    for i in 0..m {
        let (orig, b) = if i < p {
            (&lp.ineq[i], &lp.ineq_rhs[i])
        } else {
            (&lp.eq[i - p], &lp.eq_rhs[i - p])
        };
        let neg = b.is_negative();
        let mut row = zeros(mode, nstruct);
        for j in 0..n {
            let a = if neg { -&orig[j] } else { orig[j].clone() };
            row[n + j] = -&a;
            row[j] = a;
        }
        if i < p {
            row[2 * n + i] = if neg { -mode.one() } else { mode.one() };
        }
        rows.push(row);
        rhs.push(if neg { -b } else { b.clone() });
        negated.push(neg);
        slack_of_row.push(if i < p && !neg { Some(2 * n + i) } else { None });
    }

    let mut cost = zeros(mode, nstruct);
    for j in 0..n {
        cost[j] = minimize[j].clone();
        cost[n + j] = -&minimize[j];
    }

    let mut tab = Tableau::new(mode, &rows, rhs, &cost, &slack_of_row);
    match tab.run_two_phase() {
        Phase::Infeasible => Ok(LpSolution {
            status: LpStatus::Infeasible,
            optimum: None,
            primal: None,
            dual_ineq: None,
            dual_eq: None,
        }),
        Phase::Unbounded => Ok(LpSolution {
            status: LpStatus::Unbounded,
            optimum: None,
            primal: None,
            dual_ineq: None,
            dual_eq: None,
        }),
        Phase::Optimal => {
            let xfull = tab.primal_values(nstruct);
            let x: Vector = (0..n).map(|j| &xfull[j] - &xfull[n + j]).collect();
            let value_min = dot(&minimize, &x);
            let optimum = match lp.sense {
                Sense::Min => value_min.clone(),
                Sense::Max => -&value_min,
            };

            // Dual multipliers from the optimal basis: solve B'y = c_B over
            // the active rows, then undo the row sign normalization.
            let y = tab.dual_from_basis(&rows, &cost);
            let mut u = zeros(mode, p);
            let mut v = zeros(mode, q);
            for (active_idx, &orig_row) in tab.active_rows.iter().enumerate() {
                let w = if negated[orig_row] {
                    -&y[active_idx]
                } else {
                    y[active_idx].clone()
                };
                if orig_row < p {
                    u[orig_row] = -w; // u >= 0 for <= rows of a min problem
                } else {
                    v[orig_row - p] = w;
                }
            }

            if mode == ScalarMode::Exact {
                let dual_value = &dot(&lp.eq_rhs, &v) - &dot(&lp.ineq_rhs, &u);
                assert_eq!(
                    dual_value, value_min,
                    "strong duality violated in exact mode (solver bug)"
                );
            }

            Ok(LpSolution {
                status: LpStatus::Optimal,
                optimum: Some(optimum),
                primal: Some(x),
                dual_ineq: Some(u),
                dual_eq: Some(v),
            })
        }
    }
}

enum Phase {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Full-tableau simplex. Constraint rows first, then the phase-2 cost row and
/// the phase-1 cost row; the rhs is the last column.
struct Tableau {
    mode: ScalarMode,
    t: Vec<Vector>,
    basis: Vec<usize>,
    width: usize,
    nstruct: usize,
    /// original row index per active tableau row (redundant rows get dropped)
    active_rows: Vec<usize>,
}

impl Tableau {
    fn new(
        mode: ScalarMode,
        rows: &[Vector],
        rhs: Vector,
        cost: &Vector,
        slack_of_row: &[Option<usize>],
    ) -> Tableau {
        let m = rows.len();
        let nstruct = cost.len();
        let nart = slack_of_row.iter().filter(|s| s.is_none()).count();
        let width = nstruct + nart + 1;

        let mut t: Vec<Vector> = Vec::with_capacity(m + 2);
        let mut basis = vec![0usize; m];
        let mut next_art = nstruct;
        for i in 0..m {
            let mut tr = zeros(mode, width);
            tr[..nstruct].clone_from_slice(&rows[i]);
            match slack_of_row[i] {
                Some(s) => basis[i] = s,
                None => {
                    tr[next_art] = mode.one();
                    basis[i] = next_art;
                    next_art += 1;
                }
            }
            tr[width - 1] = rhs[i].clone();
            t.push(tr);
        }
        let mut zrow = zeros(mode, width);
        zrow[..nstruct].clone_from_slice(cost);
        t.push(zrow);
        let mut wrow = zeros(mode, width);
        for a in nstruct..nstruct + nart {
            wrow[a] = mode.one();
        }
        t.push(wrow);

        let mut tab = Tableau {
            mode,
            t,
            basis,
            width,
            nstruct,
            active_rows: (0..m).collect(),
        };
        for r in 0..m {
            tab.price_out(r);
        }
        tab
    }

    fn nrows(&self) -> usize {
        self.t.len() - 2
    }

    /// Make the basic column of row `r` canonical in both cost rows.
    fn price_out(&mut self, r: usize) {
        let b = self.basis[r];
        let pivot_row = self.t[r].clone();
        let total = self.t.len();
        for cost_row in [total - 2, total - 1] {
            if !self.t[cost_row][b].is_zero_eps(LP_EPS) {
                let f = self.t[cost_row][b].clone();
                for j in 0..self.width {
                    self.t[cost_row][j] = &self.t[cost_row][j] - &(&f * &pivot_row[j]);
                }
                self.t[cost_row][b] = self.mode.zero();
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for j in 0..self.width {
            self.t[r][j] = &self.t[r][j] * &inv;
        }
        let pivot_row = self.t[r].clone();
        for i in 0..self.t.len() {
            if i != r && !self.t[i][c].is_zero_eps(LP_EPS) {
                let f = self.t[i][c].clone();
                for j in 0..self.width {
                    self.t[i][j] = &self.t[i][j] - &(&f * &pivot_row[j]);
                }
                self.t[i][c] = self.mode.zero();
            }
        }
        self.basis[r] = c;
    }

    /// Bland-rule iterations driven by `cost_row`; false means unbounded.
    fn iterate(&mut self, cost_row: usize) -> bool {
        loop {
            let entering = (0..self.nstruct).find(|&j| is_negative_eps(&self.t[cost_row][j]));
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Scalar)> = None;
            for r in 0..self.nrows() {
                if is_positive_eps(&self.t[r][c]) {
                    let ratio = &self.t[r][self.width - 1] / &self.t[r][c];
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => match ratio.cmp_strict(lratio) {
                            std::cmp::Ordering::Less => true,
                            std::cmp::Ordering::Equal => self.basis[r] < self.basis[*lr],
                            std::cmp::Ordering::Greater => false,
                        },
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    fn run_two_phase(&mut self) -> Phase {
        let has_art = self.width - 1 > self.nstruct;
        if has_art {
            let w_row = self.t.len() - 1;
            let bounded = self.iterate(w_row);
            debug_assert!(bounded, "phase-1 objective is bounded below by zero");
            // After pricing, the w-row rhs equals -(sum of artificials).
            let w_val = -&self.t[w_row][self.width - 1];
            if !w_val.is_zero_eps(1e-9) {
                return Phase::Infeasible;
            }
            // Drive any remaining basic artificials out at level zero; a row
            // with no structural entry left is redundant and gets dropped.
            let mut r = 0;
            while r < self.nrows() {
                if self.basis[r] >= self.nstruct {
                    match (0..self.nstruct).find(|&j| !self.t[r][j].is_zero_eps(LP_EPS)) {
                        Some(c) => self.pivot(r, c),
                        None => {
                            self.t.remove(r);
                            self.basis.remove(r);
                            self.active_rows.remove(r);
                            continue;
                        }
                    }
                }
                r += 1;
            }
        }
        let z_row = self.t.len() - 2;
        if !self.iterate(z_row) {
            return Phase::Unbounded;
        }
        Phase::Optimal
    }

    fn primal_values(&self, ncols: usize) -> Vector {
        let mut x = zeros(self.mode, ncols);
        for (r, &b) in self.basis.iter().enumerate() {
            if b < ncols {
                x[b] = self.t[r][self.width - 1].clone();
            }
        }
        x
    }

    /// Solve `B'y = c_B` over the original (unpivoted) active rows. After
    /// phase 1 every remaining basis column is structural.
    fn dual_from_basis(&self, orig_rows: &[Vector], cost: &Vector) -> Vector {
        let m = self.nrows();
        let mode = self.mode;
        let bmat = Matrix::from_fn(mode, m, m, |i, j| {
            let col = self.basis[j];
            debug_assert!(col < self.nstruct, "artificial column in final basis");
            orig_rows[self.active_rows[i]][col].clone()
        });
        let cb: Vector = self.basis.iter().map(|&b| cost[b].clone()).collect();
        bmat.transpose()
            .solve(&cb, LP_EPS)
            .expect("optimal basis must be invertible")
    }
}

fn is_negative_eps(s: &Scalar) -> bool {
    match s {
        Scalar::Exact(_) => s.is_negative(),
        Scalar::Float(x) => *x < -LP_EPS,
    }
}

fn is_positive_eps(s: &Scalar) -> bool {
    match s {
        Scalar::Exact(_) => s.is_positive(),
        Scalar::Float(x) => *x > LP_EPS,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact() -> ScalarMode {
        ScalarMode::Exact
    }

    /// Check the full certificate: primal feasibility, dual feasibility and
    /// matching objectives, all exactly.
    fn assert_certificate(lp: &LinearProgram, sol: &LpSolution) {
        let x = sol.point();
        for (row, b) in lp.ineq.iter().zip(&lp.ineq_rhs) {
            assert!(dot(row, x).cmp_strict(b) != std::cmp::Ordering::Greater);
        }
        for (row, f) in lp.eq.iter().zip(&lp.eq_rhs) {
            assert_eq!(&dot(row, x), f);
        }
        let u = sol.dual_ineq.as_ref().unwrap();
        let v = sol.dual_eq.as_ref().unwrap();
        assert!(u.iter().all(|ui| !ui.is_negative()));
        let c_min: Vector = match lp.sense {
            Sense::Min => lp.objective.clone(),
            Sense::Max => lp.objective.iter().map(|c| -c).collect(),
        };
        for j in 0..lp.nvars() {
            let mut lhs = lp.mode.zero();
            for (row, vi) in lp.eq.iter().zip(v) {
                lhs += &row[j] * vi;
            }
            for (row, ui) in lp.ineq.iter().zip(u) {
                lhs -= &row[j] * ui;
            }
            assert_eq!(lhs, c_min[j], "dual feasibility at column {j}");
        }
        let dual_value = &dot(&lp.eq_rhs, v) - &dot(&lp.ineq_rhs, u);
        assert_eq!(&dual_value, &dot(&c_min, x), "strong duality");
    }

    #[test]
    fn one_constraint_minimum() {
        // min x s.t. x >= 3
        let m = exact();
        let mut lp = LinearProgram::minimize(m, vec![m.one()]);
        lp.add_ineq_ge(vec![m.one()], m.from_int(3));
        let sol = lp_solve(&lp).unwrap();
        assert!(sol.optimal());
        assert_eq!(sol.value(), &m.from_int(3));
        assert_eq!(sol.point(), &vec![m.from_int(3)]);
        assert_certificate(&lp, &sol);
    }

    #[test]
    fn contradictory_constraints_infeasible() {
        // min 0*x s.t. x <= -1, x >= 1
        let m = exact();
        let mut lp = LinearProgram::minimize(m, vec![m.zero()]);
        lp.add_ineq(vec![m.one()], m.from_int(-1));
        lp.add_ineq_ge(vec![m.one()], m.one());
        let sol = lp_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn quotient_distance_subproblem() {
        // min t s.t. t >= 1-u, t >= 2u-1 over free (t, u): optimum 1/3 at u = 2/3.
        // Closed form: the two lines cross where 1-u = 2u-1.
        let m = exact();
        let mut lp = LinearProgram::minimize(m, vec![m.one(), m.zero()]);
        lp.add_ineq_ge(vec![m.one(), m.one()], m.one()); // t + u >= 1
        lp.add_ineq_ge(vec![m.one(), m.from_int(-2)], m.from_int(-1)); // t - 2u >= -1
        let sol = lp_solve(&lp).unwrap();
        assert!(sol.optimal());
        assert_eq!(sol.value(), &m.ratio(1, 3));
        assert_eq!(sol.point()[1], m.ratio(2, 3));
        assert_certificate(&lp, &sol);
    }

    #[test]
    fn unbounded_detected() {
        let m = exact();
        let mut lp = LinearProgram::minimize(m, vec![m.one()]);
        lp.add_ineq(vec![m.one()], m.from_int(5));
        let sol = lp_solve(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_max_sense() {
        // max x1 + x2 s.t. x1 + x2 + x3 = 1, x_i <= 1, -x_i <= 0
        let m = exact();
        let one = m.one();
        let mut lp = LinearProgram::maximize(m, vec![one.clone(), one.clone(), m.zero()]);
        lp.add_eq(vec![one.clone(), one.clone(), one.clone()], one.clone());
        for j in 0..3 {
            let mut row = zeros(m, 3);
            row[j] = m.one();
            lp.add_ineq(row.clone(), m.one());
            lp.add_ineq(row.iter().map(|x| -x).collect(), m.zero());
        }
        let sol = lp_solve(&lp).unwrap();
        assert!(sol.optimal());
        assert_eq!(sol.value(), &m.one());
        assert_certificate(&lp, &sol);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        // x1 + x2 = 1 stated twice, minimize x1.
        let m = exact();
        let mut lp = LinearProgram::minimize(m, vec![m.one(), m.zero()]);
        lp.add_eq(vec![m.one(), m.one()], m.one());
        lp.add_eq(vec![m.one(), m.one()], m.one());
        lp.add_ineq_ge(vec![m.one(), m.zero()], m.zero());
        let sol = lp_solve(&lp).unwrap();
        assert!(sol.optimal());
        assert_eq!(sol.value(), &m.zero());
        assert_certificate(&lp, &sol);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let m = exact();
        let mut lp = LinearProgram::minimize(m, vec![m.one(), m.one()]);
        lp.add_ineq(vec![m.one()], m.one());
        assert!(matches!(lp_solve(&lp), Err(Error::Dimension(_))));
    }

    #[test]
    fn mixed_modes_rejected() {
        let m = exact();
        let mut lp = LinearProgram::minimize(m, vec![m.one()]);
        lp.add_ineq(vec![Scalar::from_f64(1.0)], m.one());
        assert!(matches!(lp_solve(&lp), Err(Error::MixedModes(_))));
    }

    #[test]
    fn float_mode_agrees() {
        let m = ScalarMode::Float;
        let mut lp = LinearProgram::minimize(m, vec![m.one(), m.zero()]);
        lp.add_ineq_ge(vec![m.one(), m.one()], m.one());
        lp.add_ineq_ge(vec![m.one(), m.from_int(-2)], m.from_int(-1));
        let sol = lp_solve(&lp).unwrap();
        assert!(sol.optimal());
        assert!((sol.value().to_f64() - 1.0 / 3.0).abs() < 1e-9);
    }
}
