//! Small row-major square matrices for the dense oracle paths.

use std::ops::{Index, IndexMut, Mul};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Matrix { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from its rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "row {i} has the wrong length");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).take(self.n).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Inverse by LU factorization with partial pivoting on the
    /// row-equilibrated matrix; `None` when a pivot falls below a small
    /// multiple of machine epsilon.
    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let mut lu = self.clone();
        let mut inv = Matrix::identity(n);
        for i in 0..n {
            let scale = (0..n).map(|j| lu[(i, j)].abs()).fold(0.0, f64::max);
            if !(scale > 0.0) || !scale.is_finite() {
                return None;
            }
            for j in 0..n {
                lu[(i, j)] /= scale;
            }
            inv[(i, i)] /= scale;
        }
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| lu[(x, col)].abs().total_cmp(&lu[(y, col)].abs()))?;
            if !(lu[(piv, col)].abs() > 64.0 * f64::EPSILON) {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    lu.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let d = lu[(col, col)];
            for r in col + 1..n {
                let f = lu[(r, col)] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    lu[(r, j)] -= f * lu[(col, j)];
                }
                for j in 0..n {
                    inv[(r, j)] -= f * inv[(col, j)];
                }
            }
        }
        for col in (0..n).rev() {
            let d = lu[(col, col)];
            for j in 0..n {
                let mut x = inv[(col, j)];
                for k in col + 1..n {
                    x -= lu[(col, k)] * inv[(k, j)];
                }
                inv[(col, j)] = x / d;
            }
        }
        Some(inv)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data.iter().zip(&other.data).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self[(i, k)];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += x * rhs[(k, j)];
                }
            }
        }
        out
    }
}
