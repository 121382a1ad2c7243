//! Executable witnesses: factorization pairs, rank-bounded approximants,
//! block subspaces, trial families and pigeonhole lower-bound certificates.
//!
//! Every bound produced here re-verifies from the stored data alone: products
//! are recomputed entry by entry, norms are recomputed for the correct norm
//! pairs rather than trusted, and each pigeonhole transcript records a
//! concrete colliding pair together with the covering parameters that
//! guarantee a priori that such a pair exists.

use crate::error::{Error, Result};
use crate::linalg::{sub, Matrix, Vector};
use crate::operators::{
    compose, norm_l1w_to_l1w, norm_linf_to_l1w, norm_linf_to_linf, op_norm, OperatorMatrix,
    VolterraGrid,
};
use crate::scalar::{Scalar, ScalarMode};
use crate::spaces::{
    norm_of, quotient_distance, quotient_distance_l1, unit_ball_vector, NormKind, Subspace,
    VectorSpace,
};

/// Identity factorization `A . T . B = I` on `e_space`, certifying
/// `i_n(T) >= 1 / (||A|| ||B||)`.
#[derive(Debug, Clone)]
pub struct FactorizationWitness {
    pub n: usize,
    /// codomain -> E
    pub a: Matrix,
    /// E -> domain
    pub b: Matrix,
    pub e_space: VectorSpace,
    pub norm_a: Scalar,
    pub norm_b: Scalar,
}

impl FactorizationWitness {
    pub fn implied_bound(&self) -> Scalar {
        (&self.norm_a * &self.norm_b).recip()
    }
}

#[derive(Debug, Clone)]
pub struct VerifiedFactorization {
    pub ok: bool,
    /// Valid lower bound for `i_n(T)` when `ok`.
    pub bound: Scalar,
    /// First entry of `A T B` differing from the identity, if any.
    pub offending_entry: Option<(usize, usize)>,
}

/// The discrete construction: select every other output coordinate and feed
/// alternating-sign pairs, giving `A sigma_N B = I_n` with `||A|| = 1` and
/// `||B|| = 2n - 1` on `E = linf_n`.
pub fn build_factorization_discrete(
    mode: ScalarMode,
    n: usize,
    big_n: usize,
) -> Result<FactorizationWitness> {
    if n == 0 {
        return Err(Error::Witness("factorization rank must be positive".into()));
    }
    if big_n < 2 * n - 1 {
        return Err(Error::Witness(format!(
            "need N >= 2n-1 = {}, got {big_n}",
            2 * n - 1
        )));
    }
    let a = Matrix::from_fn(mode, n, big_n, |k, j| {
        if j == 2 * k {
            mode.one()
        } else {
            mode.zero()
        }
    });
    let b = Matrix::from_fn(mode, big_n, n, |i, k| {
        if k + 1 < n {
            if i == 2 * k {
                mode.one()
            } else if i == 2 * k + 1 {
                -mode.one()
            } else {
                mode.zero()
            }
        } else if i == 2 * k {
            mode.one()
        } else {
            mode.zero()
        }
    });
    Ok(FactorizationWitness {
        n,
        a,
        b,
        e_space: VectorSpace::linf(mode, n),
        norm_a: mode.one(),
        norm_b: mode.from_int(2 * n as i64 - 1),
    })
}

/// The integration-operator construction on a uniform grid with `N` cells,
/// `N` divisible by `2n - 1`: sample the primitive at the odd nodes
/// `(2k-1)/(2n-1)` scaled by `2n-1`, and feed alternating characteristic
/// blocks. `E` is the weighted l1 space with weights `(2, ..., 2, 1)`; the
/// witness pairs with the right-endpoint discretization, whose sample points
/// contain all the odd nodes.
pub fn build_factorization_volterra(
    mode: ScalarMode,
    n: usize,
    big_n: usize,
) -> Result<FactorizationWitness> {
    if n == 0 {
        return Err(Error::Witness("factorization rank must be positive".into()));
    }
    let blocks = 2 * n - 1;
    if big_n == 0 || big_n % blocks != 0 {
        return Err(Error::Witness(format!(
            "grid cells must be a positive multiple of 2n-1 = {blocks}, got {big_n}"
        )));
    }
    let per = big_n / blocks;
    let scale = mode.from_int(blocks as i64);
    let a = Matrix::from_fn(mode, n, big_n, |k, j| {
        if j + 1 == per * (2 * k + 1) {
            scale.clone()
        } else {
            mode.zero()
        }
    });
    let mass = mode.ratio(1, big_n as i64);
    let b = Matrix::from_fn(mode, big_n, n, |i, k| {
        let block = i / per; // 0-based coarse cell
        if k + 1 < n {
            if block == 2 * k {
                mass.clone()
            } else if block == 2 * k + 1 {
                -&mass
            } else {
                mode.zero()
            }
        } else if block == 2 * n - 2 {
            mass.clone()
        } else {
            mode.zero()
        }
    });
    let mut weights = vec![mode.from_int(2); n];
    weights[n - 1] = mode.one();
    Ok(FactorizationWitness {
        n,
        a,
        b,
        e_space: VectorSpace::l1_weighted(mode, weights)?,
        norm_a: &scale * &scale,
        norm_b: scale.recip(),
    })
}

/// Recompute `A T B = I` and both norms (for the correct norm pairs), then
/// report the implied isomorphism-number lower bound `1/(||A|| ||B||)`.
pub fn verify_factorization(
    w: &FactorizationWitness,
    t: &OperatorMatrix,
) -> Result<VerifiedFactorization> {
    let e_dim = w.e_space.dim;
    if w.a.rows != e_dim || w.b.cols != e_dim {
        return Err(Error::Dimension("witness maps disagree with E".into()));
    }
    if e_dim < w.n {
        return Err(Error::Dimension(format!(
            "dim E = {e_dim} below target rank {}",
            w.n
        )));
    }
    let mode = t.mode();
    let product = compose(&w.a, t, &w.b)?;
    let mut offending = None;
    'scan: for i in 0..product.rows {
        for j in 0..product.cols {
            let expect = if i == j { mode.one() } else { mode.zero() };
            if !(&product[(i, j)] - &expect).is_zero_eps(1e-9) {
                offending = Some((i, j));
                break 'scan;
            }
        }
    }
    let norm_a = match w.e_space.kind() {
        NormKind::Linf => norm_linf_to_linf(&w.a),
        NormKind::L1 => norm_linf_to_l1w(&w.a, &w.e_space),
    };
    let norm_b = match w.e_space.kind() {
        NormKind::Linf => norm_linf_to_l1w(&w.b, &t.domain),
        NormKind::L1 => norm_l1w_to_l1w(&w.b, &w.e_space, &t.domain),
    };
    Ok(VerifiedFactorization {
        ok: offending.is_none(),
        bound: (&norm_a * &norm_b).recip(),
        offending_entry: offending,
    })
}

/// Rank-bounded approximant with its exact deviation `||T - F||`.
#[derive(Debug, Clone)]
pub struct ApproximantWitness {
    pub f: Matrix,
    pub rank_bound: usize,
    pub deviation: Scalar,
}

impl ApproximantWitness {
    /// Validate the rank claim and compute the deviation exactly.
    pub fn new(t: &OperatorMatrix, f: Matrix, rank_bound: usize) -> Result<ApproximantWitness> {
        if f.rows != t.matrix.rows || f.cols != t.matrix.cols {
            return Err(Error::Dimension("approximant shape mismatch".into()));
        }
        let eps = crate::spaces::rank_eps(t.mode());
        let r = f.rank(eps);
        if r > rank_bound {
            return Err(Error::Witness(format!(
                "approximant has rank {r}, claimed <= {rank_bound}"
            )));
        }
        let deviation = deviation_norm(t, &f);
        Ok(ApproximantWitness {
            f,
            rank_bound,
            deviation,
        })
    }
}

/// `||T - F||` for the operator's own l1w -> linf norm pair.
pub fn deviation_norm(t: &OperatorMatrix, f: &Matrix) -> Scalar {
    let mode = t.mode();
    let diff = Matrix::from_fn(mode, t.matrix.rows, t.matrix.cols, |i, j| {
        &t.matrix[(i, j)] - &f[(i, j)]
    });
    let op = OperatorMatrix::new(diff, t.domain.clone(), t.codomain.clone())
        .expect("difference keeps the operator shape");
    op_norm(&op).value
}

/// The constant matrix with every entry one half: all rows equal, so the rank
/// is one, and against a 0/1 matrix the deviation is exactly one half.
pub fn rank_one_approximant(t: &OperatorMatrix) -> Result<ApproximantWitness> {
    if !t.domain.is_unweighted() {
        return Err(Error::Norm(
            "constant-half approximant assumes an unweighted l1 domain".into(),
        ));
    }
    let mode = t.mode();
    let half = mode.ratio(1, 2);
    let f = Matrix::from_fn(mode, t.matrix.rows, t.matrix.cols, |_, _| half.clone());
    ApproximantWitness::new(t, f, 1)
}

/// Alternating-sign pair blocks plus a final singleton, padded with zeros:
/// the n-dimensional witness subspace for the Bernstein lower bound.
pub fn bernstein_block_subspace(mode: ScalarMode, n: usize, big_n: usize) -> Result<Subspace> {
    let w = build_factorization_discrete(mode, n, big_n)?;
    Subspace::from_basis(VectorSpace::l1(mode, big_n), w.b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialKind {
    Canonical,
    Dyadic,
}

/// Unit-norm trial vectors; members have pairwise disjoint supports, so any
/// two differ by exactly 2 in the l1 norm.
#[derive(Debug, Clone)]
pub struct TrialFamily {
    pub kind: TrialKind,
    pub members: Vec<Vector>,
    pub space: VectorSpace,
}

pub fn trial_family_canonical(mode: ScalarMode, count: usize, dim: usize) -> Result<TrialFamily> {
    if count == 0 || count > dim {
        return Err(Error::Dimension(format!(
            "canonical family needs 1 <= count <= dim, got {count} of {dim}"
        )));
    }
    let space = VectorSpace::l1(mode, dim);
    let members = (0..count).map(|k| unit_ball_vector(&space, k)).collect();
    Ok(TrialFamily {
        kind: TrialKind::Canonical,
        members,
        space,
    })
}

/// Member `k` (from 0) carries the cell masses of the step function
/// `2^(k+1) * chi(2^-k-1, 2^-k)`; the grid must be dyadic and fine enough to
/// hold every requested cell exactly.
pub fn trial_family_dyadic(count: usize, grid: &VolterraGrid) -> Result<TrialFamily> {
    let n = grid.cells;
    if count == 0 {
        return Err(Error::Dimension("empty dyadic family".into()));
    }
    if !n.is_power_of_two() {
        return Err(Error::Witness("dyadic family needs a dyadic grid".into()));
    }
    if n < 1usize << count {
        return Err(Error::Witness(format!(
            "grid with {n} cells too coarse for {count} dyadic members"
        )));
    }
    let mode = grid.mode;
    let space = VectorSpace::l1(mode, n);
    let mut members = Vec::with_capacity(count);
    for k in 0..count {
        // support (2^-(k+1), 2^-k): cells n/2^(k+1) .. n/2^k (0-based)
        let lo = n >> (k + 1);
        let hi = n >> k;
        let mass = mode.ratio(1i64 << (k + 1), n as i64);
        let mut v = vec![mode.zero(); n];
        for cell in lo..hi {
            v[cell] = mass.clone();
        }
        debug_assert_eq!(norm_of(&space, &v).unwrap(), mode.one());
        members.push(v);
    }
    Ok(TrialFamily {
        kind: TrialKind::Dyadic,
        members,
        space,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PigeonholeKind {
    Gelfand,
    Kolmogorov,
}

/// A concrete collision on one demonstration subspace: the recorded pair
/// re-verifies by recomputing its gap from the subspace alone.
#[derive(Debug, Clone)]
pub struct CollisionDemo {
    /// Constraint rows (Gelfand) or basis columns (Kolmogorov).
    pub subspace: Matrix,
    pub pair: (usize, usize),
    pub gap: Scalar,
    /// Quotient coordinates of the trial images (Gelfand) or nearest
    /// subspace approximants (Kolmogorov).
    pub images: Vec<Vector>,
}

/// Certificate data: a lower bound valid for *every* admissible subspace,
/// derived from a volume-packing collision guarantee plus the verified
/// separation of the trial images.
#[derive(Debug, Clone)]
pub struct PigeonholeTranscript {
    pub kind: PigeonholeKind,
    pub n: usize,
    pub trial_count: usize,
    /// Largest possible quotient/search dimension, `n - 1`.
    pub quotient_dim: usize,
    /// Ball radius containing all compared points.
    pub radius: Scalar,
    /// Largest integer `q >= 1` with `(q+1)^(n-1) <= trial_count`.
    pub separation: usize,
    /// Certified collision quantity: for Gelfand the quotient-norm bound on
    /// the half-difference, for Kolmogorov the bound on the approximant gap.
    pub eps: Scalar,
    /// Verified via T: minimal pairwise separation of the trial images
    /// (half-difference sup norm for Gelfand, full for Kolmogorov).
    pub gamma: Scalar,
    pub op_norm: Scalar,
    pub bound: Scalar,
    pub note: String,
    pub demo: Option<CollisionDemo>,
}

/// Largest `q >= 1` with `(q+1)^m <= trials`; `None` if even `q = 1` fails.
fn separation_q(trials: usize, m: usize) -> Option<usize> {
    let mut q: usize = 0;
    loop {
        let next = (q + 2) as u128;
        if next.checked_pow(m as u32).map(|p| p <= trials as u128) == Some(true) {
            q += 1;
        } else {
            break;
        }
    }
    if q >= 1 {
        Some(q)
    } else {
        None
    }
}

fn trial_images(t: &OperatorMatrix) -> Vec<Vector> {
    (0..t.domain.dim)
        .map(|k| t.apply(&unit_ball_vector(&t.domain, k)))
        .collect()
}

fn min_pair_sup_distance(t: &OperatorMatrix, images: &[Vector]) -> Result<Scalar> {
    let mut best: Option<Scalar> = None;
    for k in 0..images.len() {
        for l in k + 1..images.len() {
            let d = norm_of(&t.codomain, &sub(&images[k], &images[l]))?;
            best = Some(match best {
                None => d,
                Some(b) => b.min_of(d),
            });
        }
    }
    best.ok_or_else(|| Error::Certificate("need at least two trial vectors".into()))
}

fn trivial_transcript(kind: PigeonholeKind, t: &OperatorMatrix) -> (Scalar, PigeonholeTranscript) {
    let nrm = op_norm(t).value;
    let mode = t.mode();
    let transcript = PigeonholeTranscript {
        kind,
        n: 1,
        trial_count: t.domain.dim,
        quotient_dim: 0,
        radius: mode.zero(),
        separation: 0,
        eps: mode.zero(),
        gamma: nrm.clone(),
        op_norm: nrm.clone(),
        bound: nrm.clone(),
        note: "n = 1: the first s-number is the operator norm".into(),
        demo: None,
    };
    (nrm, transcript)
}

/// Quotient distance of `v` from a subspace given by constraint rows, in the
/// weighted l1 norm. Coordinate constraint rows admit a closed form: the
/// killed coordinates must vanish, everything else is matched exactly.
fn l1_constraint_distance(space: &VectorSpace, rows: &Matrix, v: &[Scalar]) -> Result<Scalar> {
    if let Some(coords) = coordinate_rows(rows) {
        let mut acc = space.mode.zero();
        for i in coords {
            acc += &space.weight(i) * &v[i].abs();
        }
        return Ok(acc);
    }
    let sub = Subspace::from_constraints(space.clone(), rows.clone())?;
    Ok(quotient_distance_l1(space, v, &sub)?.dist)
}

/// `Some(indices)` when every row is `+-e_i`.
fn coordinate_rows(rows: &Matrix) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(rows.rows);
    for i in 0..rows.rows {
        let mut found = None;
        for j in 0..rows.cols {
            let x = &rows[(i, j)];
            if !x.is_zero() {
                if found.is_some() || x.abs() != x.mode().one() {
                    return None;
                }
                found = Some(j);
            }
        }
        out.push(found?);
    }
    Some(out)
}

/// Lower bound on the Gelfand number `c_n(T)`, uniform over every subspace of
/// codimension below `n`.
///
/// Among the unit trial vectors, two must have quotient images within `2/q`
/// of each other (volume packing in dimension `n - 1`), so the half
/// difference `f` has quotient norm at most `eta = 1/q`; lifting its nearest
/// subspace point into the unit ball loses the factor `1 + eta`, giving
/// `sup_{B_M} ||Tx|| >= (gamma - ||T|| eta) / (1 + eta)` for every admissible
/// `M`, where `gamma` is the verified minimum of `||T(u_k - u_l)||/2`.
pub fn pigeonhole_lower_gelfand(
    t: &OperatorMatrix,
    n: usize,
    demo_subspace: Option<&Subspace>,
) -> Result<(Scalar, PigeonholeTranscript)> {
    if n == 0 {
        return Err(Error::Certificate("n must be positive".into()));
    }
    if n == 1 {
        return Ok(trivial_transcript(PigeonholeKind::Gelfand, t));
    }
    let mode = t.mode();
    let trials = t.domain.dim;
    let m = n - 1;
    let images = trial_images(t);
    let gamma = min_pair_sup_distance(t, &images)? / mode.from_int(2);
    let nrm = op_norm(t).value;
    let q = separation_q(trials, m).ok_or_else(|| {
        Error::Certificate(format!(
            "{trials} trial vectors cannot force a collision in dimension {m}"
        ))
    })?;
    let eta = mode.ratio(1, q as i64);
    let bound = (&gamma - &(&nrm * &eta)) / (&mode.one() + &eta);
    if !bound.is_positive() {
        return Err(Error::Certificate(format!(
            "certificate too weak: eta = 1/{q} does not leave a positive bound"
        )));
    }

    let constraints = match demo_subspace {
        Some(s) => s.constraint_matrix(),
        None => Matrix::from_fn(mode, m, trials, |i, j| {
            if i == j {
                mode.one()
            } else {
                mode.zero()
            }
        }),
    };
    let demo = gelfand_collision_demo(t, &constraints, &eta)?;

    let transcript = PigeonholeTranscript {
        kind: PigeonholeKind::Gelfand,
        n,
        trial_count: trials,
        quotient_dim: m,
        radius: mode.one(),
        separation: q,
        eps: eta,
        gamma,
        op_norm: nrm,
        bound: bound.clone(),
        note: format!(
            "packing: {trials} unit trial images pairwise > 2/{q} apart would pack \
             (1+{q})^{m} > {trials} disjoint balls into the dilated quotient ball; \
             bound = (gamma - |T|/{q}) / (1 + 1/{q})"
        ),
        demo: Some(demo),
    };
    Ok((bound, transcript))
}

/// Find the lexicographically smallest trial pair whose quotient gap on the
/// given subspace is within the certified `2 * eta`.
pub fn gelfand_collision_demo(
    t: &OperatorMatrix,
    constraints: &Matrix,
    eta: &Scalar,
) -> Result<CollisionDemo> {
    let mode = t.mode();
    let trials = t.domain.dim;
    let threshold = &mode.from_int(2) * eta;
    let quotient_images: Vec<Vector> = (0..trials)
        .map(|k| constraints.matvec(&unit_ball_vector(&t.domain, k)))
        .collect();
    for k in 0..trials {
        for l in k + 1..trials {
            let diff = sub(
                &unit_ball_vector(&t.domain, k),
                &unit_ball_vector(&t.domain, l),
            );
            let gap = l1_constraint_distance(&t.domain, constraints, &diff)?;
            if gap.cmp_strict(&threshold) != std::cmp::Ordering::Greater {
                return Ok(CollisionDemo {
                    subspace: constraints.clone(),
                    pair: (k, l),
                    gap,
                    images: quotient_images,
                });
            }
        }
    }
    Err(Error::Inconsistency(
        "covering bound promised a collision but none was found".into(),
    ))
}

/// Lower bound on the Kolmogorov number `d_n(T)`, uniform over every
/// codomain subspace of dimension below `n`.
///
/// Nearest-point approximants of the trial images inside any such subspace
/// live in a ball of radius `2 ||T||`; two of them must collide within
/// `eps = 4 ||T|| / q`, and at a coordinate separating the two trial images
/// by `gamma` one of the two approximation errors is at least
/// `(gamma - eps) / 2`.
pub fn pigeonhole_lower_kolmogorov(
    t: &OperatorMatrix,
    n: usize,
    demo_subspace: Option<&Subspace>,
) -> Result<(Scalar, PigeonholeTranscript)> {
    if n == 0 {
        return Err(Error::Certificate("n must be positive".into()));
    }
    if n == 1 {
        return Ok(trivial_transcript(PigeonholeKind::Kolmogorov, t));
    }
    let mode = t.mode();
    let trials = t.domain.dim;
    let m = n - 1;
    let images = trial_images(t);
    let gamma = min_pair_sup_distance(t, &images)?;
    let nrm = op_norm(t).value;
    let radius = &mode.from_int(2) * &nrm;
    let q = separation_q(trials, m).ok_or_else(|| {
        Error::Certificate(format!(
            "{trials} trial vectors cannot force a collision in dimension {m}"
        ))
    })?;
    let eps = &(&mode.from_int(2) * &radius) / &mode.from_int(q as i64);
    let bound = (&gamma - &eps) / mode.from_int(2);
    if !bound.is_positive() {
        return Err(Error::Certificate(format!(
            "certificate too weak: eps = {eps} swallows the separation {gamma}"
        )));
    }

    let basis = match demo_subspace {
        Some(s) => s.basis_matrix(),
        None => Matrix::from_fn(mode, t.codomain.dim, m, |i, j| {
            if i == j {
                mode.one()
            } else {
                mode.zero()
            }
        }),
    };
    let demo = kolmogorov_collision_demo(t, &basis, &eps, &images)?;

    let transcript = PigeonholeTranscript {
        kind: PigeonholeKind::Kolmogorov,
        n,
        trial_count: trials,
        quotient_dim: m,
        radius,
        separation: q,
        eps,
        gamma,
        op_norm: nrm,
        bound: bound.clone(),
        note: format!(
            "packing: {trials} approximants in the radius-2|T| ball pairwise > 4|T|/{q} \
             apart would pack (1+{q})^{m} > {trials} disjoint balls into the dilated \
             ball; bound = (gamma - eps) / 2"
        ),
        demo: Some(demo),
    };
    Ok((bound, transcript))
}

/// Nearest-point approximants in the subspace spanned by `basis`, then the
/// lexicographically smallest pair within `eps`.
pub fn kolmogorov_collision_demo(
    t: &OperatorMatrix,
    basis: &Matrix,
    eps: &Scalar,
    images: &[Vector],
) -> Result<CollisionDemo> {
    let sub_w = Subspace::from_basis(t.codomain.clone(), basis.clone())?;
    let approximants: Vec<Vector> = images
        .iter()
        .map(|img| Ok(quotient_distance(&t.codomain, img, &sub_w)?.nearest))
        .collect::<Result<_>>()?;
    for k in 0..approximants.len() {
        for l in k + 1..approximants.len() {
            let gap = norm_of(&t.codomain, &sub(&approximants[k], &approximants[l]))?;
            if gap.cmp_strict(eps) != std::cmp::Ordering::Greater {
                return Ok(CollisionDemo {
                    subspace: basis.clone(),
                    pair: (k, l),
                    gap,
                    images: approximants,
                });
            }
        }
    }
    Err(Error::Inconsistency(
        "covering bound promised a collision but none was found".into(),
    ))
}

/// Re-run a transcript: recompute the covering parameters and the verified
/// separation from the operator, recheck the recorded collision gap, and
/// reproduce the claimed bound exactly.
pub fn replay_pigeonhole(tr: &PigeonholeTranscript, t: &OperatorMatrix) -> Result<()> {
    let mode = t.mode();
    if tr.n == 1 {
        let nrm = op_norm(t).value;
        if nrm != tr.bound {
            return Err(Error::Witness("n = 1 transcript bound is not the norm".into()));
        }
        return Ok(());
    }
    let demo = tr
        .demo
        .as_ref()
        .ok_or_else(|| Error::Witness("transcript lacks a collision demo".into()))?;
    let trials = t.domain.dim;
    if trials != tr.trial_count {
        return Err(Error::Witness("trial count differs from the operator".into()));
    }
    let m = tr.n - 1;
    let q = separation_q(trials, m)
        .ok_or_else(|| Error::Witness("no collision is forced at this size".into()))?;
    if q != tr.separation {
        return Err(Error::Witness("separation parameter mismatch".into()));
    }
    let images = trial_images(t);
    match tr.kind {
        PigeonholeKind::Gelfand => {
            let gamma = min_pair_sup_distance(t, &images)? / mode.from_int(2);
            if gamma != tr.gamma {
                return Err(Error::Witness("gamma mismatch".into()));
            }
            let eta = mode.ratio(1, q as i64);
            let expect = (&gamma - &(&op_norm(t).value * &eta)) / (&mode.one() + &eta);
            if expect != tr.bound {
                return Err(Error::Witness("bound does not replay".into()));
            }
            let (k, l) = demo.pair;
            let diff = sub(
                &unit_ball_vector(&t.domain, k),
                &unit_ball_vector(&t.domain, l),
            );
            let gap = l1_constraint_distance(&t.domain, &demo.subspace, &diff)?;
            if gap != demo.gap {
                return Err(Error::Witness("recorded gap does not replay".into()));
            }
            let threshold = &mode.from_int(2) * &eta;
            if gap.cmp_strict(&threshold) == std::cmp::Ordering::Greater {
                return Err(Error::Witness("recorded pair is not a collision".into()));
            }
        }
        PigeonholeKind::Kolmogorov => {
            let gamma = min_pair_sup_distance(t, &images)?;
            if gamma != tr.gamma {
                return Err(Error::Witness("gamma mismatch".into()));
            }
            let radius = &mode.from_int(2) * &op_norm(t).value;
            let eps = &(&mode.from_int(2) * &radius) / &mode.from_int(q as i64);
            if eps != tr.eps {
                return Err(Error::Witness("eps mismatch".into()));
            }
            let expect = (&gamma - &eps) / mode.from_int(2);
            if expect != tr.bound {
                return Err(Error::Witness("bound does not replay".into()));
            }
            let sub_w = Subspace::from_basis(t.codomain.clone(), demo.subspace.clone())?;
            let (k, l) = demo.pair;
            let gk = quotient_distance(&t.codomain, &images[k], &sub_w)?.nearest;
            let gl = quotient_distance(&t.codomain, &images[l], &sub_w)?.nearest;
            let gap = norm_of(&t.codomain, &sub(&gk, &gl))?;
            if gap.cmp_strict(&eps) == std::cmp::Ordering::Greater {
                return Err(Error::Witness("recorded pair is not a collision".into()));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Witness file format
// ---------------------------------------------------------------------------

/// A record of the self-contained witness file: everything needed for
/// independent re-verification against an operator.
#[derive(Debug, Clone)]
pub enum WitnessFileRecord {
    Factorization(FactorizationWitness),
    Approximant(ApproximantWitness),
    Pigeonhole(PigeonholeTranscript),
}

/// Plain-text export: named scalar fields plus matrices in the operator
/// matrix file format (`rows cols` then row-major entries).
pub fn write_witness_file(out: &mut dyn std::io::Write, records: &[WitnessFileRecord]) -> Result<()> {
    use crate::operators::write_matrix;
    writeln!(out, "snumbers-witnesses v1")?;
    for rec in records {
        writeln!(out)?;
        match rec {
            WitnessFileRecord::Factorization(w) => {
                writeln!(out, "record factorization")?;
                writeln!(out, "n {}", w.n)?;
                match w.e_space.kind() {
                    NormKind::Linf => writeln!(out, "e linf {}", w.e_space.dim)?,
                    NormKind::L1 => {
                        let weights: Vec<String> = (0..w.e_space.dim)
                            .map(|k| w.e_space.weight(k).to_string())
                            .collect();
                        writeln!(out, "e l1w {}", weights.join(" "))?;
                    }
                }
                writeln!(out, "norm_a {}", w.norm_a)?;
                writeln!(out, "norm_b {}", w.norm_b)?;
                writeln!(out, "matrix a")?;
                write_matrix(out, &w.a)?;
                writeln!(out, "matrix b")?;
                write_matrix(out, &w.b)?;
                writeln!(out, "end")?;
            }
            WitnessFileRecord::Approximant(w) => {
                writeln!(out, "record approximant")?;
                writeln!(out, "rank_bound {}", w.rank_bound)?;
                writeln!(out, "deviation {}", w.deviation)?;
                writeln!(out, "matrix f")?;
                write_matrix(out, &w.f)?;
                writeln!(out, "end")?;
            }
            WitnessFileRecord::Pigeonhole(t) => {
                writeln!(out, "record pigeonhole")?;
                writeln!(
                    out,
                    "kind {}",
                    match t.kind {
                        PigeonholeKind::Gelfand => "gelfand",
                        PigeonholeKind::Kolmogorov => "kolmogorov",
                    }
                )?;
                writeln!(out, "n {}", t.n)?;
                writeln!(out, "trials {}", t.trial_count)?;
                writeln!(out, "quotient_dim {}", t.quotient_dim)?;
                writeln!(out, "radius {}", t.radius)?;
                writeln!(out, "separation {}", t.separation)?;
                writeln!(out, "eps {}", t.eps)?;
                writeln!(out, "gamma {}", t.gamma)?;
                writeln!(out, "op_norm {}", t.op_norm)?;
                writeln!(out, "bound {}", t.bound)?;
                if let Some(demo) = &t.demo {
                    writeln!(out, "pair {} {}", demo.pair.0, demo.pair.1)?;
                    writeln!(out, "gap {}", demo.gap)?;
                    writeln!(out, "matrix subspace")?;
                    write_matrix(out, &demo.subspace)?;
                }
                writeln!(out, "end")?;
            }
        }
    }
    Ok(())
}

struct LineReader<'a> {
    lines: std::iter::Peekable<std::str::Lines<'a>>,
}

impl<'a> LineReader<'a> {
    fn next_content(&mut self) -> Option<&'a str> {
        for line in self.lines.by_ref() {
            let t = line.trim();
            if !t.is_empty() {
                return Some(t);
            }
        }
        None
    }

    /// A matrix in the operator file format, starting at the header line.
    fn read_matrix(&mut self) -> Result<Matrix> {
        let header = self
            .next_content()
            .ok_or_else(|| Error::Parse("missing matrix header".into()))?;
        let mut parts = header.split_whitespace();
        let rows: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad matrix rows".into()))?;
        let cols: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad matrix cols".into()))?;
        let mut tokens: Vec<String> = Vec::with_capacity(rows * cols);
        while tokens.len() < rows * cols {
            let line = self
                .next_content()
                .ok_or_else(|| Error::Parse("matrix body ran out".into()))?;
            tokens.extend(line.split_whitespace().map(str::to_owned));
        }
        if tokens.len() != rows * cols {
            return Err(Error::Parse("matrix entry count mismatch".into()));
        }
        let text = format!("{rows} {cols}\n{}", tokens.join(" "));
        crate::operators::read_matrix(&mut text.as_bytes())
    }
}

fn parse_scalar_field(line: &str, key: &str, mode: ScalarMode) -> Result<Scalar> {
    let rest = line
        .strip_prefix(key)
        .ok_or_else(|| Error::Parse(format!("expected `{key}`, got `{line}`")))?;
    Scalar::parse_token(rest.trim(), mode)
}

fn parse_usize_field(line: &str, key: &str) -> Result<usize> {
    line.strip_prefix(key)
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| Error::Parse(format!("expected `{key} <int>`, got `{line}`")))
}

/// Parse the witness file format written by [`write_witness_file`].
pub fn read_witness_file(text: &str, mode: ScalarMode) -> Result<Vec<WitnessFileRecord>> {
    let mut rd = LineReader {
        lines: text.lines().peekable(),
    };
    match rd.next_content() {
        Some(h) if h.starts_with("snumbers-witnesses") => {}
        _ => return Err(Error::Parse("missing witness file header".into())),
    }
    let mut out = Vec::new();
    while let Some(line) = rd.next_content() {
        let kind = line
            .strip_prefix("record ")
            .ok_or_else(|| Error::Parse(format!("expected `record`, got `{line}`")))?;
        match kind {
            "factorization" => {
                let n = parse_usize_field(
                    rd.next_content().ok_or_else(|| Error::Parse("eof".into()))?,
                    "n",
                )?;
                let e_line = rd.next_content().ok_or_else(|| Error::Parse("eof".into()))?;
                let e_space = if let Some(rest) = e_line.strip_prefix("e linf") {
                    let dim: usize = rest
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse("bad linf dim".into()))?;
                    VectorSpace::linf(mode, dim)
                } else if let Some(rest) = e_line.strip_prefix("e l1w") {
                    let weights: Vec<Scalar> = rest
                        .split_whitespace()
                        .map(|t| Scalar::parse_token(t, mode))
                        .collect::<Result<_>>()?;
                    VectorSpace::l1_weighted(mode, weights)?
                } else {
                    return Err(Error::Parse(format!("bad E line `{e_line}`")));
                };
                let norm_a = parse_scalar_field(
                    rd.next_content().ok_or_else(|| Error::Parse("eof".into()))?,
                    "norm_a",
                    mode,
                )?;
                let norm_b = parse_scalar_field(
                    rd.next_content().ok_or_else(|| Error::Parse("eof".into()))?,
                    "norm_b",
                    mode,
                )?;
                expect_line(&mut rd, "matrix a")?;
                let a = rd.read_matrix()?;
                expect_line(&mut rd, "matrix b")?;
                let b = rd.read_matrix()?;
                expect_line(&mut rd, "end")?;
                out.push(WitnessFileRecord::Factorization(FactorizationWitness {
                    n,
                    a,
                    b,
                    e_space,
                    norm_a,
                    norm_b,
                }));
            }
            "approximant" => {
                let rank_bound = parse_usize_field(
                    rd.next_content().ok_or_else(|| Error::Parse("eof".into()))?,
                    "rank_bound",
                )?;
                let deviation = parse_scalar_field(
                    rd.next_content().ok_or_else(|| Error::Parse("eof".into()))?,
                    "deviation",
                    mode,
                )?;
                expect_line(&mut rd, "matrix f")?;
                let f = rd.read_matrix()?;
                expect_line(&mut rd, "end")?;
                out.push(WitnessFileRecord::Approximant(ApproximantWitness {
                    f,
                    rank_bound,
                    deviation,
                }));
            }
            "pigeonhole" => {
                let kind_line = rd.next_content().ok_or_else(|| Error::Parse("eof".into()))?;
                let pk = match kind_line.strip_prefix("kind ").map(str::trim) {
                    Some("gelfand") => PigeonholeKind::Gelfand,
                    Some("kolmogorov") => PigeonholeKind::Kolmogorov,
                    _ => return Err(Error::Parse(format!("bad kind line `{kind_line}`"))),
                };
                let n = parse_usize_field(rd.next_content().unwrap_or(""), "n")?;
                let trials = parse_usize_field(rd.next_content().unwrap_or(""), "trials")?;
                let qdim = parse_usize_field(rd.next_content().unwrap_or(""), "quotient_dim")?;
                let radius = parse_scalar_field(rd.next_content().unwrap_or(""), "radius", mode)?;
                let separation =
                    parse_usize_field(rd.next_content().unwrap_or(""), "separation")?;
                let eps = parse_scalar_field(rd.next_content().unwrap_or(""), "eps", mode)?;
                let gamma = parse_scalar_field(rd.next_content().unwrap_or(""), "gamma", mode)?;
                let op_nrm = parse_scalar_field(rd.next_content().unwrap_or(""), "op_norm", mode)?;
                let bound = parse_scalar_field(rd.next_content().unwrap_or(""), "bound", mode)?;
                let next = rd.next_content().unwrap_or("");
                let demo = if next.starts_with("pair") {
                    let mut parts = next
                        .strip_prefix("pair")
                        .unwrap_or("")
                        .split_whitespace()
                        .map(|t| t.parse::<usize>());
                    let k = parts
                        .next()
                        .and_then(|r| r.ok())
                        .ok_or_else(|| Error::Parse("bad pair".into()))?;
                    let l = parts
                        .next()
                        .and_then(|r| r.ok())
                        .ok_or_else(|| Error::Parse("bad pair".into()))?;
                    let gap = parse_scalar_field(rd.next_content().unwrap_or(""), "gap", mode)?;
                    expect_line(&mut rd, "matrix subspace")?;
                    let subspace = rd.read_matrix()?;
                    expect_line(&mut rd, "end")?;
                    Some(CollisionDemo {
                        subspace,
                        pair: (k, l),
                        gap,
                        images: Vec::new(),
                    })
                } else if next == "end" {
                    None
                } else {
                    return Err(Error::Parse(format!("unexpected line `{next}`")));
                };
                out.push(WitnessFileRecord::Pigeonhole(PigeonholeTranscript {
                    kind: pk,
                    n,
                    trial_count: trials,
                    quotient_dim: qdim,
                    radius,
                    separation,
                    eps,
                    gamma,
                    op_norm: op_nrm,
                    bound,
                    note: String::new(),
                    demo,
                }));
            }
            other => return Err(Error::Parse(format!("unknown record kind `{other}`"))),
        }
    }
    Ok(out)
}

fn expect_line(rd: &mut LineReader, want: &str) -> Result<()> {
    match rd.next_content() {
        Some(l) if l == want => Ok(()),
        other => Err(Error::Parse(format!("expected `{want}`, got {other:?}"))),
    }
}

/// Verify one parsed record against an operator; the returned string
/// describes what was checked.
pub fn verify_record(rec: &WitnessFileRecord, t: &OperatorMatrix) -> Result<String> {
    match rec {
        WitnessFileRecord::Factorization(w) => {
            let v = verify_factorization(w, t)?;
            if !v.ok {
                return Err(Error::Witness(format!(
                    "identity fails at entry {:?}",
                    v.offending_entry
                )));
            }
            Ok(format!("factorization ok, bound {}", v.bound))
        }
        WitnessFileRecord::Approximant(w) => {
            let fresh = ApproximantWitness::new(t, w.f.clone(), w.rank_bound)?;
            if fresh.deviation != w.deviation {
                return Err(Error::Witness(format!(
                    "recorded deviation {} but recomputed {}",
                    w.deviation, fresh.deviation
                )));
            }
            Ok(format!("approximant ok, deviation {}", fresh.deviation))
        }
        WitnessFileRecord::Pigeonhole(tr) => {
            replay_pigeonhole(tr, t)?;
            Ok(format!("pigeonhole transcript ok, bound {}", tr.bound))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{operator_from_matrix, summation_matrix, volterra_matrix, SampleScheme};

    fn m() -> ScalarMode {
        ScalarMode::Exact
    }

    #[test]
    fn discrete_witness_sigma5() {
        let w = build_factorization_discrete(m(), 3, 5).unwrap();
        let s5 = summation_matrix(m(), 5);
        // the composition forms the identity on E
        let product = compose(&w.a, &s5, &w.b).unwrap();
        assert_eq!(product, Matrix::identity(m(), 3));
        let v = verify_factorization(&w, &s5).unwrap();
        assert!(v.ok);
        assert_eq!(v.bound, m().ratio(1, 5));
        assert_eq!(w.norm_a, m().one());
        assert_eq!(w.norm_b, m().from_int(5));
    }

    #[test]
    fn discrete_witness_small_cases() {
        let w = build_factorization_discrete(m(), 1, 1).unwrap();
        let v = verify_factorization(&w, &summation_matrix(m(), 1)).unwrap();
        assert!(v.ok);
        assert_eq!(v.bound, m().one());

        // padded with zero columns: n = 2 inside sigma_10 still gives 1/3
        let w = build_factorization_discrete(m(), 2, 10).unwrap();
        let v = verify_factorization(&w, &summation_matrix(m(), 10)).unwrap();
        assert!(v.ok);
        assert_eq!(v.bound, m().ratio(1, 3));

        assert!(build_factorization_discrete(m(), 3, 4).is_err());
    }

    #[test]
    fn volterra_witness_verifies() {
        for (n, cells, expect) in [(2usize, 3usize, (1i64, 3i64)), (1, 1, (1, 1)), (3, 15, (1, 5))]
        {
            let grid = VolterraGrid::new(m(), cells, SampleScheme::RightEndpoint).unwrap();
            let v_op = volterra_matrix(&grid).unwrap();
            let w = build_factorization_volterra(m(), n, cells).unwrap();
            let v = verify_factorization(&w, &v_op).unwrap();
            assert!(v.ok, "n = {n}, cells = {cells}");
            assert_eq!(v.bound, m().ratio(expect.0, expect.1));
            let scale = m().from_int(2 * n as i64 - 1);
            assert_eq!(w.norm_a, &scale * &scale);
            assert_eq!(w.norm_b, scale.recip());
        }
        assert!(build_factorization_volterra(m(), 2, 4).is_err());
    }

    #[test]
    fn tampered_witness_fails() {
        let mut w = build_factorization_discrete(m(), 3, 5).unwrap();
        w.b[(2, 1)] = &w.b[(2, 1)] + &m().one();
        let v = verify_factorization(&w, &summation_matrix(m(), 5)).unwrap();
        assert!(!v.ok);
        assert!(v.offending_entry.is_some());
    }

    #[test]
    fn identity_witness_bounds() {
        // dim 1: A = B = (1) gives bound 1
        let id1 = operator_from_matrix(Matrix::identity(m(), 1)).unwrap();
        let w = FactorizationWitness {
            n: 1,
            a: Matrix::identity(m(), 1),
            b: Matrix::identity(m(), 1),
            e_space: VectorSpace::linf(m(), 1),
            norm_a: m().one(),
            norm_b: m().one(),
        };
        let v = verify_factorization(&w, &id1).unwrap();
        assert!(v.ok);
        assert_eq!(v.bound, m().one());

        // dim n >= 2: the identity pair still verifies, but the linf_n -> l1_n
        // leg costs a factor n, so the recomputed bound is 1/n.
        let id3 = operator_from_matrix(Matrix::identity(m(), 3)).unwrap();
        let w = FactorizationWitness {
            n: 3,
            a: Matrix::identity(m(), 3),
            b: Matrix::identity(m(), 3),
            e_space: VectorSpace::linf(m(), 3),
            norm_a: m().one(),
            norm_b: m().from_int(3),
        };
        let v = verify_factorization(&w, &id3).unwrap();
        assert!(v.ok);
        assert_eq!(v.bound, m().ratio(1, 3));
    }

    #[test]
    fn rank_one_approximant_deviation() {
        for n in [1usize, 2, 8, 31] {
            let s = summation_matrix(m(), n);
            let w = rank_one_approximant(&s).unwrap();
            assert_eq!(w.deviation, m().ratio(1, 2), "N = {n}");
            assert_eq!(w.rank_bound, 1);
        }
        // T = F gives deviation zero
        let s = summation_matrix(m(), 3);
        let f = rank_one_approximant(&s).unwrap().f;
        let half_op = OperatorMatrix::new(f, s.domain.clone(), s.codomain.clone()).unwrap();
        let w = rank_one_approximant(&half_op).unwrap();
        assert!(w.deviation.is_zero());
    }

    #[test]
    fn block_subspace_basis() {
        let sub = bernstein_block_subspace(m(), 2, 3).unwrap();
        let b = sub.basis_matrix();
        assert_eq!(b.col(0), vec![m().one(), -m().one(), m().zero()]);
        assert_eq!(b.col(1), vec![m().zero(), m().zero(), m().one()]);
        let sub = bernstein_block_subspace(m(), 1, 1).unwrap();
        assert_eq!(sub.basis_matrix().col(0), vec![m().one()]);
    }

    #[test]
    fn trial_families() {
        let fam = trial_family_canonical(m(), 3, 3).unwrap();
        for (k, v) in fam.members.iter().enumerate() {
            assert_eq!(norm_of(&fam.space, v).unwrap(), m().one());
            assert!(v[k].is_positive());
        }
        // canonical difference through the partial-sum operator: sup norm 1
        let s4 = summation_matrix(m(), 4);
        for k in 0..4 {
            for l in 0..4 {
                if k != l {
                    let d = sub(
                        &unit_ball_vector(&s4.domain, k),
                        &unit_ball_vector(&s4.domain, l),
                    );
                    assert_eq!(norm_of(&s4.codomain, &s4.apply(&d)).unwrap(), m().one());
                    assert_eq!(norm_of(&s4.domain, &d).unwrap(), m().from_int(2));
                }
            }
        }

        let grid = VolterraGrid::new(m(), 4, SampleScheme::RightEndpoint).unwrap();
        let fam = trial_family_dyadic(2, &grid).unwrap();
        let half = m().ratio(1, 2);
        assert_eq!(
            fam.members[0],
            vec![m().zero(), m().zero(), half.clone(), half]
        );
        assert_eq!(
            fam.members[1],
            vec![m().zero(), m().one(), m().zero(), m().zero()]
        );
        assert!(trial_family_dyadic(3, &grid).is_err());

        // dyadic differences through the discretized integration operator
        let grid8 = VolterraGrid::new(m(), 8, SampleScheme::RightEndpoint).unwrap();
        let v8 = volterra_matrix(&grid8).unwrap();
        let fam = trial_family_dyadic(3, &grid8).unwrap();
        for k in 0..3 {
            for l in k + 1..3 {
                let d = sub(&fam.members[k], &fam.members[l]);
                assert_eq!(norm_of(&v8.codomain, &v8.apply(&d)).unwrap(), m().one());
            }
        }
    }

    #[test]
    fn kolmogorov_certificate_sigma41() {
        let s = summation_matrix(m(), 41);
        let (bound, tr) = pigeonhole_lower_kolmogorov(&s, 2, None).unwrap();
        assert_eq!(bound, m().ratio(9, 20), "exactly 0.45 at N = 41");
        assert_eq!(tr.separation, 40);
        assert_eq!(tr.eps, m().ratio(1, 10));
        assert_eq!(tr.gamma, m().one());
        replay_pigeonhole(&tr, &s).unwrap();
    }

    #[test]
    fn gelfand_certificate_sigma41() {
        let s = summation_matrix(m(), 41);
        let (bound, tr) = pigeonhole_lower_gelfand(&s, 2, None).unwrap();
        assert_eq!(bound, m().ratio(19, 41));
        assert!(bound.cmp_strict(&m().ratio(1, 2)) == std::cmp::Ordering::Less);
        // at least as strong as the coarse net bound (1/2 - 1/10)/(1 + 1/10)
        assert!(bound.cmp_strict(&m().ratio(4, 11)) == std::cmp::Ordering::Greater);
        replay_pigeonhole(&tr, &s).unwrap();
    }

    #[test]
    fn certificates_monotone_and_capped() {
        let half = m().ratio(1, 2);
        let mut last_k = m().zero();
        let mut last_g = m().zero();
        for n in [8usize, 16, 32, 64, 128] {
            let s = summation_matrix(m(), n);
            let (bk, _) = pigeonhole_lower_kolmogorov(&s, 2, None).unwrap();
            let (bg, _) = pigeonhole_lower_gelfand(&s, 2, None).unwrap();
            assert!(bk.cmp_strict(&last_k) != std::cmp::Ordering::Less);
            assert!(bg.cmp_strict(&last_g) != std::cmp::Ordering::Less);
            assert!(bk.cmp_strict(&half) == std::cmp::Ordering::Less);
            assert!(bg.cmp_strict(&half) == std::cmp::Ordering::Less);
            last_k = bk;
            last_g = bg;
        }
    }

    #[test]
    fn certificate_weak_for_tiny_instances() {
        let s2 = summation_matrix(m(), 2);
        assert!(pigeonhole_lower_kolmogorov(&s2, 2, None).is_err());
        // n = 1 returns the operator norm directly
        let (b, _) = pigeonhole_lower_kolmogorov(&s2, 1, None).unwrap();
        assert_eq!(b, m().one());
        let (b, _) = pigeonhole_lower_gelfand(&s2, 1, None).unwrap();
        assert_eq!(b, m().one());
    }

    #[test]
    fn tampered_transcript_rejected() {
        let s = summation_matrix(m(), 16);
        let (_, mut tr) = pigeonhole_lower_kolmogorov(&s, 2, None).unwrap();
        tr.bound = &tr.bound + &m().ratio(1, 100);
        assert!(replay_pigeonhole(&tr, &s).is_err());
    }

    #[test]
    fn witness_file_round_trip_and_verify() {
        let s5 = summation_matrix(m(), 5);
        let s8 = summation_matrix(m(), 8);
        let s16 = summation_matrix(m(), 16);
        let records = vec![
            WitnessFileRecord::Factorization(build_factorization_discrete(m(), 3, 5).unwrap()),
            WitnessFileRecord::Approximant(rank_one_approximant(&s8).unwrap()),
            WitnessFileRecord::Pigeonhole(
                pigeonhole_lower_kolmogorov(&s16, 2, None).unwrap().1,
            ),
        ];
        let mut buf = Vec::new();
        write_witness_file(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back = read_witness_file(&text, m()).unwrap();
        assert_eq!(back.len(), 3);

        assert!(verify_record(&back[0], &s5).unwrap().contains("bound 1/5"));
        assert!(verify_record(&back[1], &s8).unwrap().contains("deviation 1/2"));
        assert!(verify_record(&back[2], &s16).is_ok());

        // tampering is caught on re-verification
        let tampered = text.replace("bound 11/30", "bound 12/30");
        assert_ne!(tampered, text);
        let bad = read_witness_file(&tampered, m()).unwrap();
        assert!(verify_record(&bad[2], &s16).is_err());
        // and against the wrong operator the factorization fails outright
        assert!(verify_record(&back[0], &s8).is_err());
    }

    /// Certificate soundness against gridded subspaces: at N = 4, n = 2 the
    /// Gelfand bound must stay below the exact section supremum of every
    /// codimension-1 subspace on a dense direction grid.
    #[test]
    fn gelfand_certificate_dominated_by_every_subspace() {
        use crate::spaces::section_vertices;
        let mf = ScalarMode::Float;
        let s = summation_matrix(mf, 4);
        let (bound, _) = pigeonhole_lower_gelfand(&s, 2, None).unwrap();
        let steps = 7;
        for a in 0..steps {
            for b in 0..steps {
                for c in 0..steps {
                    let row = vec![
                        Scalar::from_f64((a as f64 / steps as f64) * 2.0 - 1.0),
                        Scalar::from_f64((b as f64 / steps as f64) * 2.0 - 1.0),
                        Scalar::from_f64((c as f64 / steps as f64) * 2.0 - 1.0),
                        Scalar::from_f64(1.0),
                    ];
                    let rows = Matrix::from_rows(vec![row]);
                    let sub_m = Subspace::from_constraints(s.domain.clone(), rows).unwrap();
                    let verts = section_vertices(&s.domain, &sub_m).unwrap();
                    let mut sup = mf.zero();
                    for v in &verts {
                        sup = sup.max_of(norm_of(&s.codomain, &s.apply(v)).unwrap());
                    }
                    assert!(
                        sup.to_f64() + 1e-9 >= bound.to_f64(),
                        "a subspace beat the uniform certificate"
                    );
                }
            }
        }
    }
}
