//! Summation and discretized-integration operator matrices, their exact
//! 1->inf operator norm, composition, and the matrix file format.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::{Scalar, ScalarMode};
use crate::spaces::{norm_of, unit_ball_vector, NormKind, VectorSpace};

/// Where each matrix came from; truncations of the limit operators admit
/// theorem-backed upper bounds downstream.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorFamily {
    /// Partial-sum matrix on N coordinates.
    Summation { n: usize },
    /// Integration matrix on a uniform grid.
    Volterra { grid: VolterraGrid },
    General,
}

/// A dense matrix acting from a weighted l1 space into an linf space.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub matrix: Matrix,
    pub domain: VectorSpace,
    pub codomain: VectorSpace,
    pub family: OperatorFamily,
}

impl OperatorMatrix {
    pub fn new(matrix: Matrix, domain: VectorSpace, codomain: VectorSpace) -> Result<OperatorMatrix> {
        if domain.kind() != NormKind::L1 {
            return Err(Error::Norm("operator domain must be l1-kind".into()));
        }
        if codomain.kind() != NormKind::Linf {
            return Err(Error::Norm("operator codomain must be linf-kind".into()));
        }
        if matrix.rows != codomain.dim || matrix.cols != domain.dim {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows, matrix.cols, codomain.dim, domain.dim
            )));
        }
        let mode = domain.mode;
        if codomain.mode != mode || matrix.mode() != mode {
            return Err(Error::MixedModes("operator pieces disagree on mode".into()));
        }
        Ok(OperatorMatrix {
            matrix,
            domain,
            codomain,
            family: OperatorFamily::General,
        })
    }

    pub fn mode(&self) -> ScalarMode {
        self.domain.mode
    }

    pub fn apply(&self, x: &[Scalar]) -> Vector {
        self.matrix.matvec(x)
    }
}

/// Sampling scheme for the discretized integration operator.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleScheme {
    RightEndpoint,
    Midpoint,
    Explicit(Vector),
}

/// Uniform partition of [0,1] into `cells` intervals plus output samples.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraGrid {
    pub cells: usize,
    pub scheme: SampleScheme,
    pub mode: ScalarMode,
}

impl VolterraGrid {
    pub fn new(mode: ScalarMode, cells: usize, scheme: SampleScheme) -> Result<VolterraGrid> {
        if cells == 0 {
            return Err(Error::Dimension("grid needs at least one cell".into()));
        }
        if let SampleScheme::Explicit(pts) = &scheme {
            let zero = mode.zero();
            let one = mode.one();
            let mut prev: Option<&Scalar> = None;
            for p in pts {
                if p.cmp_strict(&zero) == std::cmp::Ordering::Less
                    || p.cmp_strict(&one) == std::cmp::Ordering::Greater
                {
                    return Err(Error::Parse("sample point outside [0,1]".into()));
                }
                if let Some(q) = prev {
                    if q.cmp_strict(p) == std::cmp::Ordering::Greater {
                        return Err(Error::Parse("sample points must be sorted".into()));
                    }
                }
                prev = Some(p);
            }
        }
        Ok(VolterraGrid { cells, scheme, mode })
    }

    pub fn sample_points(&self) -> Vector {
        let n = self.cells as i64;
        match &self.scheme {
            SampleScheme::RightEndpoint => (1..=n).map(|k| self.mode.ratio(k, n)).collect(),
            SampleScheme::Midpoint => (1..=n).map(|k| self.mode.ratio(2 * k - 1, 2 * n)).collect(),
            SampleScheme::Explicit(pts) => pts.clone(),
        }
    }
}

/// Lower-triangular all-ones partial-sum matrix, l1_N -> linf_N.
pub fn summation_matrix(mode: ScalarMode, n: usize) -> OperatorMatrix {
    assert!(n >= 1, "summation order must be positive");
    let matrix = Matrix::from_fn(mode, n, n, |i, j| {
        if j <= i {
            mode.one()
        } else {
            mode.zero()
        }
    });
    let mut op = OperatorMatrix::new(matrix, VectorSpace::l1(mode, n), VectorSpace::linf(mode, n))
        .expect("summation shapes are consistent");
    op.family = OperatorFamily::Summation { n };
    op
}

/// Discretized integration: coordinate j carries the signed mass of a step
/// function on cell I_j, and output k samples the primitive at t_k, so entry
/// (k, j) is the covered fraction `|I_j intersect [0, t_k]| / |I_j|`.
pub fn volterra_matrix(grid: &VolterraGrid) -> Result<OperatorMatrix> {
    let mode = grid.mode;
    let n = grid.cells;
    let samples = grid.sample_points();
    if samples.is_empty() {
        return Err(Error::Dimension("no sample points".into()));
    }
    let cells_i64 = n as i64;
    let matrix = Matrix::from_fn(mode, samples.len(), n, |k, j| {
        // overlap of [ (j)/n, (j+1)/n ] with [0, t_k], scaled by n
        let left = mode.ratio(j as i64, cells_i64);
        let right = mode.ratio(j as i64 + 1, cells_i64);
        let t = samples[k].clone();
        let hi = t.min_of(right);
        let overlap = (&hi - &left).max_of(mode.zero());
        overlap * mode.from_int(cells_i64)
    });
    let mut op = OperatorMatrix::new(
        matrix,
        VectorSpace::l1(mode, n),
        VectorSpace::linf(mode, samples.len()),
    )?;
    op.family = OperatorFamily::Volterra { grid: grid.clone() };
    Ok(op)
}

/// Exact operator norm with a maximizing domain extreme point as witness.
#[derive(Debug, Clone)]
pub struct OpNorm {
    pub value: Scalar,
    pub extreme_point: Vector,
}

/// `max_j (1/w_j) max_i |T_ij|`, the exact l1w -> linf norm.
pub fn op_norm(op: &OperatorMatrix) -> OpNorm {
    let mode = op.mode();
    let mut best = mode.zero();
    let mut best_j = 0usize;
    for j in 0..op.matrix.cols {
        let mut colmax = mode.zero();
        for i in 0..op.matrix.rows {
            colmax = colmax.max_of(op.matrix[(i, j)].abs());
        }
        let val = colmax / op.domain.weight(j);
        if val.cmp_strict(&best) == std::cmp::Ordering::Greater {
            best = val;
            best_j = j;
        }
    }
    OpNorm {
        value: best,
        extreme_point: unit_ball_vector(&op.domain, best_j),
    }
}

/// Exact product `A * T * B` (shape-checked).
pub fn compose(a: &Matrix, t: &OperatorMatrix, b: &Matrix) -> Result<Matrix> {
    if a.cols != t.matrix.rows || t.matrix.cols != b.rows {
        return Err(Error::Dimension(format!(
            "compose shapes {}x{} . {}x{} . {}x{}",
            a.rows, a.cols, t.matrix.rows, t.matrix.cols, b.rows, b.cols
        )));
    }
    Ok(a.matmul(&t.matrix).matmul(b))
}

/// l1w -> l1w norm: `max_j ||col_j||_{1,cod} / w_j`.
pub fn norm_l1w_to_l1w(m: &Matrix, dom: &VectorSpace, cod: &VectorSpace) -> Scalar {
    let mode = m.mode();
    let mut best = mode.zero();
    for j in 0..m.cols {
        let col = m.col(j);
        let v = norm_of(cod, &col).expect("column length") / dom.weight(j);
        best = best.max_of(v);
    }
    best
}

/// linf -> linf norm: largest absolute row sum.
pub fn norm_linf_to_linf(m: &Matrix) -> Scalar {
    let mode = m.mode();
    let mut best = mode.zero();
    for i in 0..m.rows {
        let mut s = mode.zero();
        for j in 0..m.cols {
            s += m[(i, j)].abs();
        }
        best = best.max_of(s);
    }
    best
}

/// linf -> l1w norm, exact. The maximum over the source cube is attained at a
/// vertex; when the source dimension is small we enumerate vertices, and
/// otherwise we enumerate output sign patterns:
/// `max_s sum_j | sum_i s_i w_i m_ij |` over `s in {-1,1}^rows`.
pub fn norm_linf_to_l1w(m: &Matrix, cod: &VectorSpace) -> Scalar {
    let mode = m.mode();
    if m.cols == 0 || m.rows == 0 {
        return mode.zero();
    }
    assert!(
        m.cols.min(m.rows) <= 20,
        "linf->l1 norm needs one side of the matrix <= 20"
    );
    let mut best = mode.zero();
    if m.cols <= m.rows {
        for mask in 0u32..(1 << m.cols) {
            let mut total = mode.zero();
            for i in 0..m.rows {
                let mut acc = mode.zero();
                for j in 0..m.cols {
                    let s = if mask >> j & 1 == 1 {
                        m[(i, j)].clone()
                    } else {
                        -&m[(i, j)]
                    };
                    acc += s;
                }
                total += &cod.weight(i) * &acc.abs();
            }
            best = best.max_of(total);
        }
    } else {
        for mask in 0u32..(1 << m.rows) {
            let mut total = mode.zero();
            for j in 0..m.cols {
                let mut acc = mode.zero();
                for i in 0..m.rows {
                    let t = &cod.weight(i) * &m[(i, j)];
                    acc += if mask >> i & 1 == 1 { t } else { -t };
                }
                total += acc.abs();
            }
            best = best.max_of(total);
        }
    }
    best
}

/// Write the matrix file format: `rows cols`, then row-major entries.
pub fn write_matrix(out: &mut dyn Write, m: &Matrix) -> Result<()> {
    writeln!(out, "{} {}", m.rows, m.cols)?;
    for i in 0..m.rows {
        let line: Vec<String> = m.row(i).iter().map(|s| s.to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Read the matrix file format. Rational literals (`p/q` or bare integers)
/// keep the data exact; any decimal or exponent literal switches the whole
/// matrix to float mode, and mixing the two styles is rejected.
pub fn read_matrix(input: &mut dyn BufRead) -> Result<Matrix> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut tokens = text.split_whitespace();
    let rows: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing row count".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad row count".into()))?;
    let cols: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("missing column count".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad column count".into()))?;
    let entries: Vec<&str> = tokens.collect();
    if entries.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            rows * cols,
            entries.len()
        )));
    }
    let any_float = entries
        .iter()
        .any(|t| t.contains('.') || t.contains('e') || t.contains('E'));
    let any_rational = entries.iter().any(|t| t.contains('/'));
    if any_float && any_rational {
        return Err(Error::MixedModes(
            "matrix file mixes rational and decimal literals".into(),
        ));
    }
    let mode = if any_float {
        ScalarMode::Float
    } else {
        ScalarMode::Exact
    };
    let mut data = Vec::with_capacity(rows * cols);
    for t in entries {
        data.push(Scalar::parse_token(t, mode)?);
    }
    let mut m = Matrix::zeros(mode, rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = data[i * cols + j].clone();
        }
    }
    Ok(m)
}

/// Wrap a bare matrix as an operator with unweighted l1 domain and linf
/// codomain.
pub fn operator_from_matrix(m: Matrix) -> Result<OperatorMatrix> {
    let mode = m.mode();
    let domain = VectorSpace::l1(mode, m.cols);
    let codomain = VectorSpace::linf(mode, m.rows);
    OperatorMatrix::new(m, domain, codomain)
}
