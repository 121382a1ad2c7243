//! Finite-dimensional weighted l1 and linf spaces, subspaces and sections.

use crate::error::{Error, Result};
use crate::linalg::{unit, zeros, Matrix, Vector};
use crate::lp::{lp_solve, LinearProgram};
use crate::polytope::VERTEX_DEDUP_TOL;
use crate::scalar::{Scalar, ScalarMode};

/// Default cap on support sets examined by [`section_vertices`].
pub const SECTION_SUPPORT_CAP: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L1,
    Linf,
}

/// Weighted l1 or plain linf norm; weights apply to the L1 kind only.
#[derive(Debug, Clone, PartialEq)]
pub struct NormDescriptor {
    pub kind: NormKind,
    pub weights: Option<Vector>,
}

/// A finite-dimensional space: dimension, norm and the scalar mode its
/// constants live in.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpace {
    pub mode: ScalarMode,
    pub dim: usize,
    pub norm: NormDescriptor,
}

impl VectorSpace {
    pub fn l1(mode: ScalarMode, dim: usize) -> VectorSpace {
        assert!(dim >= 1, "space dimension must be positive");
        VectorSpace {
            mode,
            dim,
            norm: NormDescriptor {
                kind: NormKind::L1,
                weights: None,
            },
        }
    }

    pub fn l1_weighted(mode: ScalarMode, weights: Vector) -> Result<VectorSpace> {
        if weights.is_empty() {
            return Err(Error::Dimension("empty weight vector".into()));
        }
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::Norm("l1 weights must be strictly positive".into()));
        }
        Ok(VectorSpace {
            mode,
            dim: weights.len(),
            norm: NormDescriptor {
                kind: NormKind::L1,
                weights: Some(weights),
            },
        })
    }

    pub fn linf(mode: ScalarMode, dim: usize) -> VectorSpace {
        assert!(dim >= 1, "space dimension must be positive");
        VectorSpace {
            mode,
            dim,
            norm: NormDescriptor {
                kind: NormKind::Linf,
                weights: None,
            },
        }
    }

    pub fn kind(&self) -> NormKind {
        self.norm.kind
    }

    /// Weight of coordinate `j` (1 when unweighted).
    pub fn weight(&self, j: usize) -> Scalar {
        match &self.norm.weights {
            Some(w) => w[j].clone(),
            None => self.mode.one(),
        }
    }

    pub fn is_unweighted(&self) -> bool {
        match &self.norm.weights {
            None => true,
            Some(w) => w.iter().all(|wi| wi == &self.mode.one()),
        }
    }
}

/// Weighted l1 sum or sup of absolute coordinates.
pub fn norm_of(space: &VectorSpace, v: &[Scalar]) -> Result<Scalar> {
    if v.len() != space.dim {
        return Err(Error::Dimension(format!(
            "vector has dim {}, space dim {}",
            v.len(),
            space.dim
        )));
    }
    let mode = space.mode;
    Ok(match space.kind() {
        NormKind::L1 => {
            let mut acc = mode.zero();
            for (j, x) in v.iter().enumerate() {
                acc += &space.weight(j) * &x.abs();
            }
            acc
        }
        NormKind::Linf => {
            let mut best = mode.zero();
            for x in v {
                best = best.max_of(x.abs());
            }
            best
        }
    })
}

/// The 2*dim extreme points `+-e_j / w_j` of a weighted cross-polytope.
pub fn ball_extreme_points(space: &VectorSpace) -> Result<Vec<Vector>> {
    if space.kind() != NormKind::L1 {
        return Err(Error::Norm(
            "ball_extreme_points requires an l1-kind space".into(),
        ));
    }
    let mode = space.mode;
    let mut out = Vec::with_capacity(2 * space.dim);
    for j in 0..space.dim {
        let mut v = zeros(mode, space.dim);
        v[j] = space.weight(j).recip();
        out.push(v.clone());
        for x in v.iter_mut() {
            *x = -x.clone();
        }
        out.push(v);
    }
    Ok(out)
}

/// A subspace carried in whichever representation the caller supplied.
#[derive(Debug, Clone)]
pub enum SubspaceRep {
    /// Columns span the subspace (d x k, full column rank).
    Basis(Matrix),
    /// Rows annihilate the subspace (c x d, full row rank).
    Constraints(Matrix),
}

#[derive(Debug, Clone)]
pub struct Subspace {
    pub ambient: VectorSpace,
    rep: SubspaceRep,
}

impl Subspace {
    pub fn from_basis(ambient: VectorSpace, basis: Matrix) -> Result<Subspace> {
        if basis.rows != ambient.dim {
            return Err(Error::Dimension(
                "basis columns must live in the ambient space".into(),
            ));
        }
        let eps = rank_eps(ambient.mode);
        if basis.cols > 0 && basis.rank(eps) < basis.cols {
            return Err(Error::RankDeficient("subspace basis".into()));
        }
        Ok(Subspace {
            ambient,
            rep: SubspaceRep::Basis(basis),
        })
    }

    pub fn from_constraints(ambient: VectorSpace, rows: Matrix) -> Result<Subspace> {
        if rows.cols != ambient.dim {
            return Err(Error::Dimension(
                "constraint rows must match the ambient dimension".into(),
            ));
        }
        let eps = rank_eps(ambient.mode);
        if rows.rows > 0 && rows.rank(eps) < rows.rows {
            return Err(Error::RankDeficient("subspace constraints".into()));
        }
        Ok(Subspace {
            ambient,
            rep: SubspaceRep::Constraints(rows),
        })
    }

    /// The zero subspace.
    pub fn zero(ambient: VectorSpace) -> Subspace {
        let mode = ambient.mode;
        let dim = ambient.dim;
        Subspace {
            ambient,
            rep: SubspaceRep::Basis(Matrix::zeros(mode, dim, 0)),
        }
    }

    pub fn dim(&self) -> usize {
        match &self.rep {
            SubspaceRep::Basis(b) => b.cols,
            SubspaceRep::Constraints(c) => self.ambient.dim - c.rows,
        }
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim - self.dim()
    }

    /// Basis columns (d x k), converting on demand by exact kernel
    /// computation.
    pub fn basis_matrix(&self) -> Matrix {
        let mode = self.ambient.mode;
        match &self.rep {
            SubspaceRep::Basis(b) => b.clone(),
            SubspaceRep::Constraints(c) => {
                let kern = c.kernel_basis(rank_eps(mode));
                if kern.is_empty() {
                    Matrix::zeros(mode, self.ambient.dim, 0)
                } else {
                    Matrix::from_cols(kern)
                }
            }
        }
    }

    /// Constraint rows (c x d). For a basis representation these are the
    /// kernel of the transpose; they double as exact quotient coordinates.
    pub fn constraint_matrix(&self) -> Matrix {
        let mode = self.ambient.mode;
        match &self.rep {
            SubspaceRep::Constraints(c) => c.clone(),
            SubspaceRep::Basis(b) => {
                let kern = b.transpose().kernel_basis(rank_eps(mode));
                if kern.is_empty() {
                    Matrix::zeros(mode, 0, self.ambient.dim)
                } else {
                    Matrix::from_rows(kern)
                }
            }
        }
    }
}

pub(crate) fn rank_eps(mode: ScalarMode) -> f64 {
    match mode {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => VERTEX_DEDUP_TOL,
    }
}

/// Quotient distance in an linf ambient space together with its minimizer.
#[derive(Debug, Clone)]
pub struct QuotientDistance {
    pub dist: Scalar,
    /// Coefficients against the subspace basis columns.
    pub coeffs: Vector,
    /// The nearest subspace point `W * coeffs`.
    pub nearest: Vector,
}

/// `min_z || v - W z ||_inf` as one Chebyshev LP with retained optimality
/// certificate (the solver asserts strong duality in exact mode). Coordinate
/// and constant-direction subspaces take exact closed forms instead of an LP.
pub fn quotient_distance(
    ambient: &VectorSpace,
    v: &[Scalar],
    sub: &Subspace,
) -> Result<QuotientDistance> {
    if ambient.kind() != NormKind::Linf {
        return Err(Error::Norm("quotient_distance requires an linf ambient".into()));
    }
    if v.len() != ambient.dim {
        return Err(Error::Dimension("vector/ambient mismatch".into()));
    }
    let w = sub.basis_matrix();
    if w.rows != ambient.dim {
        return Err(Error::Dimension("subspace/ambient mismatch".into()));
    }
    let mode = ambient.mode;
    let k = w.cols;
    if let Some(fast) = quotient_distance_fast(ambient, v, &w) {
        return Ok(fast);
    }
    // vars (z_1..z_k, t): min t s.t. -t <= v_i - (Wz)_i <= t
    let mut objective = zeros(mode, k + 1);
    objective[k] = mode.one();
    let mut lp = LinearProgram::minimize(mode, objective);
    for i in 0..ambient.dim {
        let mut up = zeros(mode, k + 1); // -(Wz)_i - t <= -v_i
        let mut dn = zeros(mode, k + 1); // (Wz)_i - t <= v_i
        for j in 0..k {
            up[j] = -&w[(i, j)];
            dn[j] = w[(i, j)].clone();
        }
        up[k] = -mode.one();
        dn[k] = -mode.one();
        lp.add_ineq(up, -&v[i]);
        lp.add_ineq(dn, v[i].clone());
    }
    let sol = lp_solve(&lp)?;
    assert!(sol.optimal(), "quotient-distance LP is always feasible and bounded");
    let point = sol.point();
    let coeffs: Vector = point[..k].to_vec();
    let nearest = w.matvec(&coeffs);
    Ok(QuotientDistance {
        dist: sol.value().clone(),
        coeffs,
        nearest,
    })
}

/// Closed forms for the sup-norm nearest point in special subspaces.
///
/// Coordinate spans `span{+-e_i}`: projecting onto the spanned coordinates is
/// optimal, since the remaining residual coordinates are fixed. A single
/// constant direction `c * ones`: the residual is `max v - t c` versus
/// `t c - min v`, minimized at the midpoint.
fn quotient_distance_fast(
    ambient: &VectorSpace,
    v: &[Scalar],
    w: &Matrix,
) -> Option<QuotientDistance> {
    let mode = ambient.mode;
    let d = ambient.dim;
    if w.cols == 0 {
        let mut dist = mode.zero();
        for x in v {
            dist = dist.max_of(x.abs());
        }
        return Some(QuotientDistance {
            dist,
            coeffs: Vec::new(),
            nearest: zeros(mode, d),
        });
    }

    // every column +-e_i with distinct coordinates
    let mut coords: Vec<(usize, bool)> = Vec::with_capacity(w.cols);
    let mut all_coordinate = true;
    'cols: for j in 0..w.cols {
        let mut hit = None;
        for i in 0..d {
            let x = &w[(i, j)];
            if !x.is_zero() {
                if hit.is_some() || x.abs() != mode.one() {
                    all_coordinate = false;
                    break 'cols;
                }
                hit = Some((i, x.is_positive()));
            }
        }
        match hit {
            Some(h) if !coords.iter().any(|(i, _)| *i == h.0) => coords.push(h),
            _ => {
                all_coordinate = false;
                break;
            }
        }
    }
    if all_coordinate {
        let mut nearest = zeros(mode, d);
        let mut coeffs = Vec::with_capacity(w.cols);
        for &(i, pos) in &coords {
            nearest[i] = v[i].clone();
            coeffs.push(if pos { v[i].clone() } else { -&v[i] });
        }
        let mut dist = mode.zero();
        for (i, x) in v.iter().enumerate() {
            if !coords.iter().any(|(c, _)| *c == i) {
                dist = dist.max_of(x.abs());
            }
        }
        return Some(QuotientDistance {
            dist,
            coeffs,
            nearest,
        });
    }

    if w.cols == 1 {
        let c = w[(0, 0)].clone();
        if !c.is_zero() && (0..d).all(|i| w[(i, 0)] == c) {
            let mut hi = v[0].clone();
            let mut lo = v[0].clone();
            for x in &v[1..] {
                hi = hi.max_of(x.clone());
                lo = lo.min_of(x.clone());
            }
            let two = mode.from_int(2);
            let t = &(&hi + &lo) / &(&two * &c);
            let dist = (&hi - &lo) / two;
            let nearest: Vector = (0..d).map(|_| &t * &c).collect();
            return Some(QuotientDistance {
                dist,
                coeffs: vec![t],
                nearest,
            });
        }
    }
    None
}

/// Weighted-l1 quotient distance `min_{z in sub} || v - z ||_{1,w}` with the
/// minimizing subspace point, used by pigeonhole transcripts.
pub fn quotient_distance_l1(
    ambient: &VectorSpace,
    v: &[Scalar],
    sub: &Subspace,
) -> Result<QuotientDistance> {
    if ambient.kind() != NormKind::L1 {
        return Err(Error::Norm("quotient_distance_l1 requires an l1 ambient".into()));
    }
    if v.len() != ambient.dim {
        return Err(Error::Dimension("vector/ambient mismatch".into()));
    }
    let w = sub.basis_matrix();
    let mode = ambient.mode;
    let k = w.cols;
    let d = ambient.dim;
    // vars (z_1..z_k, s_1..s_d): min sum(w_i s_i) s.t. s_i >= +-(v - Wz)_i
    let mut objective = zeros(mode, k + d);
    for i in 0..d {
        objective[k + i] = ambient.weight(i);
    }
    let mut lp = LinearProgram::minimize(mode, objective);
    for i in 0..d {
        let mut up = zeros(mode, k + d);
        let mut dn = zeros(mode, k + d);
        for j in 0..k {
            up[j] = -&w[(i, j)];
            dn[j] = w[(i, j)].clone();
        }
        up[k + i] = -mode.one();
        dn[k + i] = -mode.one();
        lp.add_ineq(up, -&v[i]);
        lp.add_ineq(dn, v[i].clone());
    }
    let sol = lp_solve(&lp)?;
    assert!(sol.optimal(), "l1 quotient LP is always feasible and bounded");
    let coeffs: Vector = sol.point()[..k].to_vec();
    let nearest = w.matvec(&coeffs);
    Ok(QuotientDistance {
        dist: sol.value().clone(),
        coeffs,
        nearest,
    })
}

/// Exact vertex set of the section `{ x : C x = 0, ||x||_{1,w} <= 1 }`.
///
/// A section point is a vertex exactly when the constraint columns over its
/// support have a one-dimensional kernel, so supports of size up to
/// `codim + 1` enumerate all vertices. Each is returned on the unit sphere.
pub fn section_vertices(space: &VectorSpace, constraints: &Subspace) -> Result<Vec<Vector>> {
    section_vertices_capped(space, constraints, SECTION_SUPPORT_CAP)
}

pub fn section_vertices_capped(
    space: &VectorSpace,
    constraints: &Subspace,
    cap: usize,
) -> Result<Vec<Vector>> {
    if space.kind() != NormKind::L1 {
        return Err(Error::Norm("section_vertices requires an l1-kind space".into()));
    }
    let c = constraints.constraint_matrix();
    if c.cols != space.dim {
        return Err(Error::Dimension("constraints/space mismatch".into()));
    }
    if c.rows == 0 {
        return ball_extreme_points(space);
    }
    let d = space.dim;
    let crows = c.rows;
    let max_support = crows + 1;
    let mut work: usize = 0;
    for k in 1..=max_support.min(d) {
        work = work.saturating_add(n_choose_k(d, k));
    }
    if work > cap {
        return Err(Error::CapExceeded(format!(
            "{work} support sets exceed cap {cap}"
        )));
    }
    let mode = space.mode;
    let eps = rank_eps(mode);
    let mut out: Vec<Vector> = Vec::new();
    for k in 1..=max_support.min(d) {
        let mut support: Vec<usize> = (0..k).collect();
        loop {
            let cs = Matrix::from_fn(mode, crows, k, |i, j| c[(i, support[j])].clone());
            let kern = cs.kernel_basis(eps);
            if kern.len() == 1 && kern[0].iter().all(|x| !x.is_zero_eps(eps)) {
                let mut x = zeros(mode, d);
                for (j, &pos) in support.iter().enumerate() {
                    x[pos] = kern[0][j].clone();
                }
                // orient so the first supported coordinate is positive
                if x[support[0]].is_negative() {
                    for xi in x.iter_mut() {
                        *xi = -xi.clone();
                    }
                }
                let nrm = norm_of(space, &x)?;
                let inv = nrm.recip();
                let x: Vector = x.iter().map(|xi| xi * &inv).collect();
                let neg_x: Vector = x.iter().map(|xi| -xi).collect();
                out.push(x);
                out.push(neg_x);
            }
            if !advance(&mut support, d) {
                break;
            }
        }
    }
    Ok(out)
}

fn n_choose_k(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

fn advance(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < m - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Canonical basis vector scaled to unit weighted-l1 norm.
pub fn unit_ball_vector(space: &VectorSpace, j: usize) -> Vector {
    let mut v = unit(space.mode, space.dim, j);
    v[j] = space.weight(j).recip();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    fn m() -> ScalarMode {
        ScalarMode::Exact
    }

    fn vec_i(coords: &[i64]) -> Vector {
        coords.iter().map(|&c| m().from_int(c)).collect()
    }

    #[test]
    fn norms() {
        let l1 = VectorSpace::l1(m(), 3);
        assert_eq!(norm_of(&l1, &vec_i(&[1, -2, 3])).unwrap(), m().from_int(6));
        let linf = VectorSpace::linf(m(), 3);
        assert_eq!(norm_of(&linf, &vec_i(&[1, -2, 3])).unwrap(), m().from_int(3));
        let w = VectorSpace::l1_weighted(
            m(),
            vec![m().from_int(2), m().from_int(2), m().one()],
        )
        .unwrap();
        assert_eq!(norm_of(&w, &vec_i(&[1, 1, 1])).unwrap(), m().from_int(5));
        assert!(norm_of(&l1, &vec_i(&[1, 2])).is_err());
    }

    #[test]
    fn extreme_points() {
        let l1 = VectorSpace::l1(m(), 2);
        let pts = ball_extreme_points(&l1).unwrap();
        assert_eq!(pts.len(), 4);
        for target in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            assert!(pts.contains(&vec_i(&target)));
        }
        let w = VectorSpace::l1_weighted(m(), vec![m().from_int(2), m().one()]).unwrap();
        let pts = ball_extreme_points(&w).unwrap();
        assert!(pts.contains(&vec![m().ratio(1, 2), m().zero()]));
        for p in &pts {
            assert_eq!(norm_of(&w, p).unwrap(), m().one());
        }
        assert!(ball_extreme_points(&VectorSpace::linf(m(), 2)).is_err());
    }

    #[test]
    fn quotient_distance_closed_form() {
        // v = (1,1), sub = span{(1,2)}: min_t max(|1-t|, |1-2t|) = 1/3 at t = 2/3
        let ambient = VectorSpace::linf(m(), 2);
        let sub = Subspace::from_basis(ambient.clone(), Matrix::from_cols(vec![vec_i(&[1, 2])]))
            .unwrap();
        let qd = quotient_distance(&ambient, &vec_i(&[1, 1]), &sub).unwrap();
        assert_eq!(qd.dist, m().ratio(1, 3));
        assert_eq!(qd.coeffs, vec![m().ratio(2, 3)]);
    }

    #[test]
    fn quotient_distance_member_and_zero_subspace() {
        let ambient = VectorSpace::linf(m(), 2);
        let sub = Subspace::from_basis(ambient.clone(), Matrix::from_cols(vec![vec_i(&[1, 2])]))
            .unwrap();
        let qd = quotient_distance(&ambient, &vec_i(&[2, 4]), &sub).unwrap();
        assert!(qd.dist.is_zero());
        let zero = Subspace::zero(ambient.clone());
        let qd = quotient_distance(&ambient, &vec_i(&[1, -3]), &zero).unwrap();
        assert_eq!(qd.dist, m().from_int(3));
    }

    #[test]
    fn rank_deficient_basis_rejected() {
        let ambient = VectorSpace::linf(m(), 2);
        let b = Matrix::from_cols(vec![vec_i(&[1, 2]), vec_i(&[2, 4])]);
        assert!(matches!(
            Subspace::from_basis(ambient, b),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn section_vertices_sum_zero_plane() {
        let space = VectorSpace::l1(m(), 3);
        let c = Matrix::from_rows(vec![vec_i(&[1, 1, 1])]);
        let sub = Subspace::from_constraints(space.clone(), c).unwrap();
        let vs = section_vertices(&space, &sub).unwrap();
        assert_eq!(vs.len(), 6);
        let half = m().ratio(1, 2);
        for v in &vs {
            assert_eq!(norm_of(&space, v).unwrap(), m().one());
            let s = dot(v, &vec_i(&[1, 1, 1]));
            assert!(s.is_zero());
            assert_eq!(v.iter().filter(|x| x.is_zero()).count(), 1);
            assert!(v.iter().all(|x| x.is_zero() || x.abs() == half));
        }
    }

    #[test]
    fn section_vertices_two_dims() {
        let space = VectorSpace::l1(m(), 2);
        let c = Matrix::from_rows(vec![vec_i(&[1, 1])]);
        let sub = Subspace::from_constraints(space.clone(), c).unwrap();
        let vs = section_vertices(&space, &sub).unwrap();
        assert_eq!(vs.len(), 2);
        assert!(vs.contains(&vec![m().ratio(1, 2), m().ratio(-1, 2)]));
        assert!(vs.contains(&vec![m().ratio(-1, 2), m().ratio(1, 2)]));
    }

    #[test]
    fn section_vertices_no_constraints() {
        let space = VectorSpace::l1(m(), 2);
        let sub = Subspace::from_constraints(space.clone(), Matrix::zeros(m(), 0, 2)).unwrap();
        let vs = section_vertices(&space, &sub).unwrap();
        assert_eq!(vs, ball_extreme_points(&space).unwrap());
    }

    #[test]
    fn basis_constraint_round_trip() {
        let space = VectorSpace::l1(m(), 4);
        let b = Matrix::from_cols(vec![vec_i(&[1, -1, 0, 0]), vec_i(&[0, 0, 1, 2])]);
        let sub = Subspace::from_basis(space, b.clone()).unwrap();
        assert_eq!(sub.dim(), 2);
        assert_eq!(sub.codim(), 2);
        let c = sub.constraint_matrix();
        assert_eq!(c.rows, 2);
        // constraints annihilate the basis exactly
        let prod = c.matmul(&b);
        assert!((0..prod.rows).all(|i| (0..prod.cols).all(|j| prod[(i, j)].is_zero())));
    }
}
