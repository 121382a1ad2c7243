//! Polytope kernel: V-polytopes, gauges, zonotopes and facet enumeration.
//!
//! Everything is exact in rational mode. Dimensions stay small (<= 4 for
//! facet work), so brute-force enumeration with LP pruning is adequate and
//! keeps every result certifiable.

use crate::error::{Error, Result};
use crate::linalg::{dot, neg, sub, veq, zeros, Matrix, Vector};
use crate::lp::{lp_solve, LinearProgram, LpStatus};
use crate::scalar::{Scalar, ScalarMode};

/// Componentwise vertex dedup tolerance in float mode; exact mode compares
/// literally.
pub const VERTEX_DEDUP_TOL: f64 = 1e-9;

/// Default cap on zonotope generator count.
pub const GENERATOR_CAP: usize = 16;

/// Default cap on candidate facet subsets in [`hull_facets`].
pub const FACET_SUBSET_CAP: usize = 2_000_000;

/// Polytope given by its vertices.
#[derive(Debug, Clone)]
pub struct VPolytope {
    vertices: Vec<Vector>,
    symmetric: bool,
}

impl VPolytope {
    /// Build from a vertex list, deduplicating.
    pub fn new(vertices: Vec<Vector>) -> VPolytope {
        VPolytope {
            vertices: dedup_points(vertices),
            symmetric: false,
        }
    }

    /// Build the symmetric hull `conv(points, -points)`.
    pub fn symmetric_hull(points: Vec<Vector>) -> VPolytope {
        let mut all = points.clone();
        all.extend(points.iter().map(|p| neg(p)));
        VPolytope {
            vertices: dedup_points(all),
            symmetric: true,
        }
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn dim(&self) -> usize {
        self.vertices.first().map(|v| v.len()).unwrap_or(0)
    }
}

fn dedup_points(points: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| veq(q, &p, VERTEX_DEDUP_TOL)) {
            out.push(p);
        }
    }
    out
}

/// Gauge value: finite or +infinity (point outside the body's linear span).
#[derive(Debug, Clone, PartialEq)]
pub enum Gauge {
    Finite(Scalar),
    Infinite,
}

impl Gauge {
    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            Gauge::Finite(s) => Some(s),
            Gauge::Infinite => None,
        }
    }
}

/// Minkowski functional `min { t >= 0 : point in t * body }`, one LP over
/// convex coefficients. The body must contain the origin in the relative
/// interior of its hull, which holds for every symmetric body used here.
pub fn gauge(point: &[Scalar], body: &VPolytope) -> Result<Gauge> {
    let verts = body.vertices();
    if verts.is_empty() {
        return Ok(Gauge::Infinite);
    }
    let dim = body.dim();
    if point.len() != dim {
        return Err(Error::Dimension(format!(
            "gauge point has dim {}, body dim {dim}",
            point.len()
        )));
    }
    let mode = point
        .first()
        .map(|s| s.mode())
        .unwrap_or_else(|| verts[0][0].mode());
    // min sum(lambda) s.t. sum(lambda_i v_i) = point, lambda >= 0
    let s = verts.len();
    let mut lp = LinearProgram::minimize(mode, vec![mode.one(); s]);
    for coord in 0..dim {
        let row: Vector = verts.iter().map(|v| v[coord].clone()).collect();
        lp.add_eq(row, point[coord].clone());
    }
    for i in 0..s {
        let mut row = zeros(mode, s);
        row[i] = -mode.one();
        lp.add_ineq(row, mode.zero());
    }
    let sol = lp_solve(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(Gauge::Finite(sol.value().clone())),
        LpStatus::Infeasible => Ok(Gauge::Infinite),
        LpStatus::Unbounded => unreachable!("gauge LP objective is bounded below"),
    }
}

/// Membership test `gauge(p, body) <= 1` via an independent feasibility LP.
pub fn contains(body: &VPolytope, point: &[Scalar]) -> Result<bool> {
    let verts = body.vertices();
    if verts.is_empty() {
        return Ok(false);
    }
    let mode = verts[0][0].mode();
    let s = verts.len();
    let mut lp = LinearProgram::minimize(mode, vec![mode.zero(); s]);
    for coord in 0..body.dim() {
        let row: Vector = verts.iter().map(|v| v[coord].clone()).collect();
        lp.add_eq(row, point[coord].clone());
    }
    let mut sum_row = vec![mode.one(); s];
    lp.add_ineq(std::mem::take(&mut sum_row), mode.one());
    for i in 0..s {
        let mut row = zeros(mode, s);
        row[i] = -mode.one();
        lp.add_ineq(row, mode.zero());
    }
    Ok(lp_solve(&lp)?.status == LpStatus::Optimal)
}

/// Minkowski sum of segments `center + sum_i [-g_i, g_i]`.
#[derive(Debug, Clone)]
pub struct Zonotope {
    pub generators: Vec<Vector>,
    pub center: Vector,
}

impl Zonotope {
    pub fn new(generators: Vec<Vector>, center: Vector) -> Zonotope {
        Zonotope { generators, center }
    }

    /// Centered zonotope spanned by the columns of `m`... generators are the
    /// images of the cube's half-axes, i.e. the columns.
    pub fn from_columns(m: &Matrix) -> Zonotope {
        let mode = m.mode();
        Zonotope {
            generators: (0..m.cols).map(|j| m.col(j)).collect(),
            center: zeros(mode, m.rows),
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }
}

/// Exact vertex set of a zonotope with the default generator cap.
pub fn zonotope_vertices(z: &Zonotope) -> Result<Vec<Vector>> {
    zonotope_vertices_capped(z, GENERATOR_CAP)
}

/// Exact vertex set. A sign vector `s` yields the vertex
/// `center + sum_i s_i g_i` exactly when some direction `y` has
/// `s_i (y.g_i) > 0` for all nonzero generators; the search enumerates sign
/// vectors depth-first and prunes infeasible prefixes with one LP each.
pub fn zonotope_vertices_capped(z: &Zonotope, cap: usize) -> Result<Vec<Vector>> {
    let gens: Vec<&Vector> = z
        .generators
        .iter()
        .filter(|g| !g.iter().all(|x| x.is_zero_eps(VERTEX_DEDUP_TOL)))
        .collect();
    if gens.len() > cap {
        return Err(Error::CapExceeded(format!(
            "{} zonotope generators exceed cap {cap}",
            gens.len()
        )));
    }
    if gens.is_empty() {
        return Ok(vec![z.center.clone()]);
    }
    let mode = z.center.first().map(|s| s.mode()).unwrap_or(ScalarMode::Exact);
    let dim = z.dim();
    let mut signs: Vec<bool> = Vec::with_capacity(gens.len());
    let mut out: Vec<Vector> = Vec::new();
    descend(&gens, mode, dim, &mut signs, &mut out, &z.center)?;
    Ok(dedup_points(out))
}

fn descend(
    gens: &[&Vector],
    mode: ScalarMode,
    dim: usize,
    signs: &mut Vec<bool>,
    out: &mut Vec<Vector>,
    center: &Vector,
) -> Result<()> {
    if !signs.is_empty() && !sign_prefix_feasible(gens, mode, dim, signs)? {
        return Ok(());
    }
    if signs.len() == gens.len() {
        let mut v = center.clone();
        for (g, &s) in gens.iter().zip(signs.iter()) {
            for (vi, gi) in v.iter_mut().zip(g.iter()) {
                if s {
                    *vi += gi.clone();
                } else {
                    *vi -= gi.clone();
                }
            }
        }
        out.push(v);
        return Ok(());
    }
    for s in [true, false] {
        signs.push(s);
        descend(gens, mode, dim, signs, out, center)?;
        signs.pop();
    }
    Ok(())
}

fn sign_prefix_feasible(
    gens: &[&Vector],
    mode: ScalarMode,
    dim: usize,
    signs: &[bool],
) -> Result<bool> {
    // feasibility: exists y with s_i (y.g_i) >= 1 for assigned prefix
    let mut lp = LinearProgram::minimize(mode, zeros(mode, dim));
    for (g, &s) in gens.iter().zip(signs.iter()) {
        let row: Vector = if s {
            (*g).clone()
        } else {
            neg(g)
        };
        lp.add_ineq_ge(row, mode.one());
    }
    Ok(lp_solve(&lp)?.status == LpStatus::Optimal)
}

/// One facet inequality `normal . x <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vector,
    pub offset: Scalar,
}

/// Irredundant H-representation of `conv(points)` in dimension <= 4 by
/// supporting-hyperplane enumeration over point subsets. Degenerate input is
/// reported with its actual affine dimension.
pub fn hull_facets(points: &[Vector], dim: usize) -> Result<Vec<Facet>> {
    if dim == 0 || dim > 4 {
        return Err(Error::Dimension(format!("hull_facets supports dim 1..=4, got {dim}")));
    }
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Dimension("point dimension mismatch".into()));
    }
    let pts = dedup_points(points.to_vec());
    let mode = pts
        .first()
        .and_then(|p| p.first())
        .map(|s| s.mode())
        .unwrap_or(ScalarMode::Exact);
    let eps = match mode {
        ScalarMode::Exact => 0.0,
        ScalarMode::Float => VERTEX_DEDUP_TOL,
    };
    let affine = affine_dim(&pts, eps);
    if affine < dim {
        return Err(Error::Degenerate {
            actual: affine,
            expected: dim,
        });
    }
    let m = pts.len();
    let total = binomial(m, dim);
    if total > FACET_SUBSET_CAP {
        return Err(Error::CapExceeded(format!(
            "{total} candidate facet subsets exceed cap {FACET_SUBSET_CAP}"
        )));
    }

    let mut facets: Vec<Facet> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        if let Some(facet) = supporting_hyperplane(&pts, &subset, mode, eps) {
            if !facets
                .iter()
                .any(|f| veq(&f.normal, &facet.normal, eps) && (&f.offset - &facet.offset).is_zero_eps(eps))
            {
                facets.push(facet);
            }
        }
        if !next_combination(&mut subset, m) {
            break;
        }
    }
    Ok(facets)
}

/// Hyperplane through `dim` affinely independent points, kept only when it
/// supports the whole point set; normalized so the leading nonzero entry of
/// `(normal, offset)` has absolute value 1.
fn supporting_hyperplane(
    pts: &[Vector],
    subset: &[usize],
    mode: ScalarMode,
    eps: f64,
) -> Option<Facet> {
    let base = &pts[subset[0]];
    let diffs: Vec<Vector> = subset[1..].iter().map(|&i| sub(&pts[i], base)).collect();
    let dmat = Matrix::from_rows(diffs);
    let kernel = dmat.kernel_basis(eps);
    if kernel.len() != 1 {
        return None; // affinely dependent subset, or not a hyperplane
    }
    let mut normal = kernel.into_iter().next().unwrap();
    let mut offset = dot(&normal, base);
    let mut above = false;
    let mut below = false;
    for p in pts {
        let d = &dot(&normal, p) - &offset;
        if d.is_zero_eps(eps) {
            continue;
        }
        if d.is_positive() {
            above = true;
        } else {
            below = true;
        }
        if above && below {
            return None;
        }
    }
    if above {
        normal = neg(&normal);
        offset = -offset;
    }
    // canonical scale for dedup
    let lead = normal
        .iter()
        .chain(std::iter::once(&offset))
        .find(|x| !x.is_zero_eps(eps))
        .cloned()
        .unwrap_or_else(|| mode.one());
    let scale = lead.abs().recip();
    let normal: Vector = normal.iter().map(|x| x * &scale).collect();
    let offset = &offset * &scale;
    Some(Facet { normal, offset })
}

fn affine_dim(pts: &[Vector], eps: f64) -> usize {
    match pts.split_first() {
        None => 0,
        Some((base, rest)) => {
            if rest.is_empty() {
                return 0;
            }
            let diffs: Vec<Vector> = rest.iter().map(|p| sub(p, base)).collect();
            Matrix::from_rows(diffs).rank(eps)
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// Advance `subset` to the next k-combination of `0..m`; false when done.
fn next_combination(subset: &mut [usize], m: usize) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn e(mode: ScalarMode, coords: &[i64]) -> Vector {
        coords.iter().map(|&c| mode.from_int(c)).collect()
    }

    fn er(mode: ScalarMode, coords: &[(i64, i64)]) -> Vector {
        coords.iter().map(|&(p, q)| mode.ratio(p, q)).collect()
    }

    fn cross2(mode: ScalarMode) -> VPolytope {
        VPolytope::symmetric_hull(vec![e(mode, &[1, 0]), e(mode, &[0, 1])])
    }

    #[test]
    fn gauge_examples() {
        let m = ScalarMode::Exact;
        let body = cross2(m);
        // vertex of the body
        assert_eq!(
            gauge(&e(m, &[1, 0]), &body).unwrap(),
            Gauge::Finite(m.one())
        );
        // center
        assert_eq!(
            gauge(&e(m, &[0, 0]), &body).unwrap(),
            Gauge::Finite(m.zero())
        );
        // (1,1) = 2 * (1/2, 1/2); brute-force scaling oracle below
        assert_eq!(
            gauge(&e(m, &[1, 1]), &body).unwrap(),
            Gauge::Finite(m.from_int(2))
        );
        let mut t = 0.05f64;
        let mut oracle = None;
        while t < 4.0 {
            // scaled-membership scan: first t with (1,1) in t*body
            let pt = vec![Scalar::from_f64(1.0 / t), Scalar::from_f64(1.0 / t)];
            let fbody = cross2(ScalarMode::Float);
            if contains(&fbody, &pt).unwrap() {
                oracle = Some(t);
                break;
            }
            t += 0.05;
        }
        assert!((oracle.unwrap() - 2.0).abs() < 0.051);
    }

    #[test]
    fn gauge_outside_span_is_infinite() {
        let m = ScalarMode::Exact;
        let segment = VPolytope::symmetric_hull(vec![e(m, &[1, 0])]);
        assert_eq!(gauge(&e(m, &[0, 1]), &segment).unwrap(), Gauge::Infinite);
    }

    #[test]
    fn gauge_membership_iff_at_most_one() {
        let m = ScalarMode::Exact;
        let body = cross2(m);
        for (pt, expect_in) in [
            (er(m, &[(1, 2), (1, 4)]), true),
            (er(m, &[(3, 4), (1, 2)]), false),
            (er(m, &[(1, 2), (1, 2)]), true),
        ] {
            let g = gauge(&pt, &body).unwrap();
            let inside = contains(&body, &pt).unwrap();
            assert_eq!(inside, expect_in);
            match g {
                Gauge::Finite(v) => {
                    assert_eq!(v.cmp_strict(&m.one()) != std::cmp::Ordering::Greater, inside)
                }
                Gauge::Infinite => assert!(!inside),
            }
        }
    }

    #[test]
    fn zonotope_unit_square() {
        let m = ScalarMode::Exact;
        let z = Zonotope::new(vec![e(m, &[1, 0]), e(m, &[0, 1])], e(m, &[0, 0]));
        let mut vs = zonotope_vertices(&z).unwrap();
        vs.sort_by(|a, b| a[0].cmp_strict(&b[0]).then(a[1].cmp_strict(&b[1])));
        let expect = [[-1, -1], [-1, 1], [1, -1], [1, 1]];
        assert_eq!(vs.len(), 4);
        for (v, ex) in vs.iter().zip(expect) {
            assert_eq!(v, &e(m, &ex));
        }
    }

    #[test]
    fn zonotope_segment() {
        let m = ScalarMode::Exact;
        let z = Zonotope::new(vec![e(m, &[1, 0])], e(m, &[0, 0]));
        let vs = zonotope_vertices(&z).unwrap();
        assert_eq!(vs.len(), 2);
        assert!(vs.contains(&e(m, &[1, 0])) && vs.contains(&e(m, &[-1, 0])));
    }

    #[test]
    fn zonotope_sheared() {
        // generators {(1,0),(1,1)} -> {(2,1),(0,-1),(-2,-1),(0,1)}
        let m = ScalarMode::Exact;
        let z = Zonotope::new(vec![e(m, &[1, 0]), e(m, &[1, 1])], e(m, &[0, 0]));
        let vs = zonotope_vertices(&z).unwrap();
        assert_eq!(vs.len(), 4);
        for ex in [[2, 1], [0, -1], [-2, -1], [0, 1]] {
            assert!(vs.contains(&e(m, &ex)), "missing {ex:?}");
        }
    }

    #[test]
    fn zonotope_cap() {
        let m = ScalarMode::Exact;
        let gens: Vec<Vector> = (0..5).map(|i| e(m, &[1, i])).collect();
        let z = Zonotope::new(gens, e(m, &[0, 0]));
        assert!(matches!(
            zonotope_vertices_capped(&z, 4),
            Err(Error::CapExceeded(_))
        ));
    }

    /// Oracle equivalence: vertices = extreme points of all 2^g sign points.
    #[test]
    fn zonotope_matches_sign_enumeration() {
        let m = ScalarMode::Exact;
        let gens = vec![e(m, &[2, 1]), e(m, &[1, 3]), e(m, &[-1, 2]), e(m, &[1, 0])];
        let z = Zonotope::new(gens.clone(), e(m, &[0, 0]));
        let vs = zonotope_vertices(&z).unwrap();

        let g = gens.len();
        let mut all: Vec<Vector> = Vec::new();
        for mask in 0..(1u32 << g) {
            let mut p = e(m, &[0, 0]);
            for (i, gen) in gens.iter().enumerate() {
                let sgn = if mask >> i & 1 == 1 { m.one() } else { -m.one() };
                for (pi, gi) in p.iter_mut().zip(gen) {
                    *pi += &sgn * gi;
                }
            }
            all.push(p);
        }
        let mut extremes: Vec<Vector> = Vec::new();
        for (i, p) in all.iter().enumerate() {
            let others: Vec<Vector> = all
                .iter()
                .enumerate()
                .filter(|&(j, q)| j != i && !veq(q, p, 0.0))
                .map(|(_, q)| q.clone())
                .collect();
            if !contains(&VPolytope::new(others), p).unwrap()
                && !extremes.iter().any(|q| veq(q, p, 0.0))
            {
                extremes.push(p.clone());
            }
        }
        assert_eq!(vs.len(), extremes.len());
        for v in &vs {
            assert!(extremes.iter().any(|q| veq(q, v, 0.0)));
        }
    }

    #[test]
    fn cross_polytope_facets() {
        let m = ScalarMode::Exact;
        let pts = vec![e(m, &[1, 0]), e(m, &[-1, 0]), e(m, &[0, 1]), e(m, &[0, -1])];
        let fs = hull_facets(&pts, 2).unwrap();
        assert_eq!(fs.len(), 4, "|x1|+|x2| <= 1 has 4 facets");
        for f in &fs {
            for p in &pts {
                assert!(dot(&f.normal, p).cmp_strict(&f.offset) != std::cmp::Ordering::Greater);
            }
        }
    }

    #[test]
    fn collinear_points_degenerate() {
        let m = ScalarMode::Exact;
        let pts = vec![e(m, &[0, 0]), e(m, &[1, 1]), e(m, &[2, 2])];
        assert!(matches!(
            hull_facets(&pts, 2),
            Err(Error::Degenerate { actual: 1, expected: 2 })
        ));
    }
}
