//! Dense matrices and vectors over [`Scalar`], with Gaussian elimination.
//!
//! Everything here is pivoted by largest absolute value, which is harmless in
//! exact mode and necessary in float mode. Sizes in this crate stay below a
//! few dozen, so dense O(n^3) elimination is the right tool.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarMode};

pub type Vector = Vec<Scalar>;

pub fn zeros(mode: ScalarMode, n: usize) -> Vector {
    vec![mode.zero(); n]
}

pub fn unit(mode: ScalarMode, n: usize, i: usize) -> Vector {
    let mut v = zeros(mode, n);
    v[i] = mode.one();
    v
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    let mut acc = a
        .first()
        .map(|s| s.mode().zero())
        .unwrap_or_else(|| ScalarMode::Exact.zero());
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn axpy(y: &mut [Scalar], alpha: &Scalar, x: &[Scalar]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(v: &[Scalar], alpha: &Scalar) -> Vector {
    v.iter().map(|x| x * alpha).collect()
}

pub fn sub(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Scalar], b: &[Scalar]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn neg(a: &[Scalar]) -> Vector {
    a.iter().map(|x| -x).collect()
}

/// Componentwise equality, exact or within `tol` per coordinate in float mode.
pub fn veq(a: &[Scalar], b: &[Scalar], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).is_zero_eps(tol))
}

/// Dense row-major matrix of scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(mode: ScalarMode, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![mode.zero(); rows * cols],
        }
    }

    pub fn identity(mode: ScalarMode, n: usize) -> Matrix {
        let mut m = Matrix::zeros(mode, n, n);
        for i in 0..n {
            m[(i, i)] = mode.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_cols(cols: Vec<Vector>) -> Matrix {
        Matrix::from_rows(cols).transpose()
    }

    pub fn from_fn(
        mode: ScalarMode,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Matrix {
        let mut m = Matrix::zeros(mode, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn mode(&self) -> ScalarMode {
        self.data
            .first()
            .map(|s| s.mode())
            .unwrap_or(ScalarMode::Exact)
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Scalar] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[Scalar]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.mode(), self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matvec(&self, x: &[Scalar]) -> Vector {
        assert_eq!(self.cols, x.len(), "matvec shape mismatch");
        self.rows_iter().map(|r| dot(r, x)).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        Matrix::from_fn(self.mode(), self.rows, other.cols, |i, j| {
            let mut acc = self.mode().zero();
            for k in 0..self.cols {
                acc += &self[(i, k)] * &other[(k, j)];
            }
            acc
        })
    }

    pub fn entries_max_abs(&self) -> Scalar {
        let mut best = self.mode().zero();
        for e in &self.data {
            best = best.max_of(e.abs());
        }
        best
    }

    /// Reduced row echelon form in place; returns pivot column indices.
    pub fn rref(&mut self, eps: f64) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // best pivot in column c at/below row r
            let mut best: Option<(usize, Scalar)> = None;
            for i in r..self.rows {
                let a = self[(i, c)].abs();
                if !a.is_zero_eps(eps) {
                    match &best {
                        Some((_, b)) if b.cmp_strict(&a) != std::cmp::Ordering::Less => {}
                        _ => best = Some((i, a)),
                    }
                }
            }
            let Some((p, _)) = best else { continue };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                self[(r, j)] = &self[(r, j)] * &inv;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero_eps(eps) {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        self[(i, j)] = &self[(i, j)] - &(&f * &self[(r, j)]);
                    }
                    self[(i, c)] = self.mode().zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            self.data.swap(lo * self.cols + j, hi * self.cols + j);
        }
    }

    pub fn rank(&self, eps: f64) -> usize {
        let mut m = self.clone();
        m.rref(eps).len()
    }

    /// Basis of the null space, one column vector per free variable.
    pub fn kernel_basis(&self, eps: f64) -> Vec<Vector> {
        let mode = self.mode();
        let mut m = self.clone();
        let pivots = m.rref(eps);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = zeros(mode, self.cols);
                v[fc] = mode.one();
                for (ri, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&m[(ri, fc)];
                }
                v
            })
            .collect()
    }

    /// Solve `self * x = b` for one solution; `None` if inconsistent.
    pub fn solve(&self, b: &[Scalar], eps: f64) -> Option<Vector> {
        assert_eq!(self.rows, b.len(), "solve shape mismatch");
        let mode = self.mode();
        let mut aug = Matrix::from_fn(mode, self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let pivots = aug.rref(eps);
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column
        }
        let mut x = zeros(mode, self.cols);
        for (ri, &pc) in pivots.iter().enumerate() {
            x[pc] = aug[(ri, self.cols)].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix; error if singular.
    pub fn inverse(&self, eps: f64) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::Dimension("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mode = self.mode();
        let mut aug = Matrix::from_fn(mode, n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                mode.one()
            } else {
                mode.zero()
            }
        });
        let pivots = aug.rref(eps);
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
            return Err(Error::RankDeficient("singular matrix".into()));
        }
        Ok(Matrix::from_fn(mode, n, n, |i, j| aug[(i, j + n)].clone()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        let c = self.cols;
        &mut self.data[i * c + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(vals: &[&[i64]]) -> Matrix {
        let m = ScalarMode::Exact;
        Matrix::from_rows(
            vals.iter()
                .map(|r| r.iter().map(|&x| m.from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_and_kernel() {
        let a = exact(&[&[1, 2, 3], &[2, 4, 6]]);
        assert_eq!(a.rank(0.0), 1);
        let k = a.kernel_basis(0.0);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.matvec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_inverse() {
        let a = exact(&[&[2, 1], &[1, 1]]);
        let m = ScalarMode::Exact;
        let b = vec![m.from_int(3), m.from_int(2)];
        let x = a.solve(&b, 0.0).unwrap();
        assert_eq!(x, vec![m.from_int(1), m.from_int(1)]);
        let inv = a.inverse(0.0).unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(m, 2));
        let sing = exact(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse(0.0).is_err());
        assert!(sing.solve(&[m.from_int(1), m.from_int(0)], 0.0).is_none());
    }
}
