//! The bidiagonal pencil `(L, M)` holding the lattice state.
//!
//! `L` is upper bidiagonal with `a_1..a_N` on the diagonal and ones on the
//! superdiagonal; `M` is unit lower bidiagonal with `-b_1..-b_{N-1}` on the
//! subdiagonal. The boundary values `b_0 = b_N = 0` are implicit.

use crate::dense::Matrix;
use crate::error::{Entry, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BidiagonalPencil {
    a: Vec<f64>,
    b: Vec<f64>,
}

/// Checks the pencil invariants: `N >= 1`, `b.len() == N - 1`, all entries
/// finite and strictly positive.
pub fn validate_pencil(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidLength("pencil needs at least one diagonal entry".into()));
    }
    if b.len() + 1 != a.len() {
        return Err(Error::InvalidLength(format!(
            "expected {} off-diagonal entries for N = {}, got {}",
            a.len() - 1,
            a.len(),
            b.len()
        )));
    }
    for (which, values) in [(Entry::A, a), (Entry::B, b)] {
        for (i, &x) in values.iter().enumerate() {
            if x.is_infinite() {
                return Err(Error::NonFiniteEntry { index: i + 1, which });
            }
            if !(x > 0.0) {
                return Err(Error::NonPositiveEntry { index: i + 1, which });
            }
        }
    }
    Ok(())
}

impl BidiagonalPencil {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        validate_pencil(&a, &b)?;
        Ok(BidiagonalPencil { a, b })
    }

    /// Skips validation. Used for long-time samples whose `b` entries may
    /// underflow to zero; the exact logarithms travel alongside.
    pub(crate) fn from_parts_unchecked(a: Vec<f64>, b: Vec<f64>) -> Self {
        debug_assert_eq!(a.len(), b.len() + 1);
        BidiagonalPencil { a, b }
    }

    pub fn validate(&self) -> Result<()> {
        validate_pencil(&self.a, &self.b)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `b_n` with the convention `b_0 = b_N = 0`; `n` is 1-based.
    #[inline]
    pub fn b_ext(&self, n: usize) -> f64 {
        if n == 0 || n > self.b.len() {
            0.0
        } else {
            self.b[n - 1]
        }
    }

    /// Matrix size `N`.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `sum a_n + sum b_n`, which equals the sum of the generalized eigenvalues.
    pub fn trace(&self) -> f64 {
        self.a.iter().sum::<f64>() + self.b.iter().sum::<f64>()
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.a, self.b)
    }
}

/// Dense `L`, `M` and the closed-form inverse of `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePencil {
    pub l: Matrix,
    pub m: Matrix,
    pub m_inv: Matrix,
}

/// Assembles `L`, `M` and `M^{-1}`, where `(M^{-1})_{ij} = b_j b_{j+1} ... b_{i-1}`
/// below the diagonal.
pub fn assemble_dense(p: &BidiagonalPencil) -> DensePencil {
    let n = p.len();
    let mut l = Matrix::zeros(n);
    let mut m = Matrix::identity(n);
    let mut m_inv = Matrix::identity(n);
    for i in 0..n {
        l[(i, i)] = p.a[i];
        if i + 1 < n {
            l[(i, i + 1)] = 1.0;
            m[(i + 1, i)] = -p.b[i];
        }
    }
    // Row-wise from the diagonal leftwards, so that each entry is exactly
    // b_j times its right neighbour.
    for i in 0..n {
        let mut prod = 1.0;
        for j in (0..i).rev() {
            prod *= p.b[j];
            m_inv[(i, j)] = prod;
        }
    }
    DensePencil { l, m, m_inv }
}
