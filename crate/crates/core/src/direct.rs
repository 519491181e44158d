//! Direct spectral transform: pencil to eigenvalues and weights.

use crate::error::{Error, Result};
use crate::pencil::BidiagonalPencil;
use crate::poly::{eval_delta_with_derivative, eval_p_upto, zero_cascade};
use crate::spectral::{normalize_computed, PoleResidue, SpectralData};

/// Right and left eigenvectors for one generalized eigenvalue, both scaled
/// to have first component 1.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvectorPair {
    pub right: Vec<f64>,
    pub left: Vec<f64>,
}

/// How the weights are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum WeightMethod {
    /// Residues of `Delta_{N-1} / Delta_N`.
    Residues,
    /// `(u_j^T M v_j)^{-1}` from explicit eigenvectors.
    Eigenvectors,
    /// `(u_j^T M v_j)^{-1}` with the eigenvectors from a twisted
    /// factorization. Accurate for weights far below machine epsilon, where
    /// both formulas above lose everything to cancellation.
    #[default]
    Twisted,
}

/// The `N` generalized eigenvalues of `L x = lambda M x`, increasing.
pub fn generalized_eigenvalues(p: &BidiagonalPencil) -> Result<Vec<f64>> {
    Ok(zero_cascade(p)?.pop().expect("pencil is non-empty"))
}

/// `w_j = Delta_{N-1}(lambda_j) / Delta_N'(lambda_j)`, renormalized.
///
/// Weights far below machine epsilon lose their relative accuracy here:
/// `Delta_{N-1}(lambda_j)` is then a difference of nearly equal products.
pub fn weights_from_residues(p: &BidiagonalPencil, lambda: &[f64]) -> Result<Vec<f64>> {
    let n = p.len();
    let mut w: Vec<f64> = lambda
        .iter()
        .map(|&l| {
            let (vals, ders) = eval_delta_with_derivative(p, l);
            vals[n - 1] / ders[n]
        })
        .collect();
    normalize_computed(&mut w)?;
    Ok(w)
}

/// Eigenvectors from the recurrence values at `lambda`:
/// `v = (P_0, ..., P_{N-1})` and `u_k = P_k / (lambda^k b_1 ... b_k)`.
pub fn eigenvectors(p: &BidiagonalPencil, lambda: f64) -> EigenvectorPair {
    let n = p.len();
    let right = eval_p_upto(p, n - 1, lambda).into_inner();
    let mut scale = 1.0;
    let left = right
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if k > 0 {
                scale *= lambda * p.b()[k - 1];
            }
            v / scale
        })
        .collect();
    EigenvectorPair { right, left }
}

/// `u^T M v` for the pencil's `M`.
pub fn m_bilinear(p: &BidiagonalPencil, u: &[f64], v: &[f64]) -> f64 {
    let mut s = u[0] * v[0];
    for i in 1..p.len() {
        s += u[i] * (v[i] - p.b()[i - 1] * v[i - 1]);
    }
    s
}

/// `w_j = (u_j^T M v_j)^{-1}`, renormalized.
pub fn weights_from_eigenvectors(p: &BidiagonalPencil, lambda: &[f64]) -> Result<Vec<f64>> {
    let mut w: Vec<f64> = lambda
        .iter()
        .map(|&l| {
            let e = eigenvectors(p, l);
            1.0 / m_bilinear(p, &e.left, &e.right)
        })
        .collect();
    normalize_computed(&mut w)?;
    Ok(w)
}

/// The same pair as [`eigenvectors`], computed by twisted factorization.
pub fn eigenvectors_twisted(p: &BidiagonalPencil, lambda: f64) -> EigenvectorPair {
    let (mut right, mut left) = null_vectors(p, lambda);
    let (r0, l0) = (right[0], left[0]);
    right.iter_mut().for_each(|x| *x /= r0);
    left.iter_mut().for_each(|x| *x /= l0);
    EigenvectorPair { right, left }
}

/// `w_j = (u_j^T M v_j)^{-1}` from [`eigenvectors_twisted`], renormalized.
pub fn weights_from_twisted(p: &BidiagonalPencil, lambda: &[f64]) -> Result<Vec<f64>> {
    let mut w: Vec<f64> = lambda
        .iter()
        .map(|&l| {
            let (right, left) = null_vectors(p, l);
            right[0] * left[0] / m_bilinear(p, &left, &right)
        })
        .collect();
    normalize_computed(&mut w)?;
    Ok(w)
}

/// Null vector of a singular tridiagonal matrix (`sub[i]` at `(i+1, i)`,
/// `sup[i]` at `(i, i+1)`) by a twisted factorization: eliminate from both
/// ends, join at the index with the smallest twist element, and back-solve
/// outwards from there. Only divisions by the elimination pivots occur,
/// which keeps the vector accurate even where a one-sided recurrence
/// amplifies the rounding in the eigenvalue.
pub(crate) fn twisted_null_vector(sub: &[f64], diag: &[f64], sup: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let tiny =
        f64::EPSILON * diag.iter().chain(sub).chain(sup).fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let guard = |x: f64| if x.abs() < tiny { tiny.copysign(x) } else { x };
    let mut fwd = vec![0.0; n];
    fwd[0] = diag[0];
    for i in 1..n {
        fwd[i] = diag[i] - sub[i - 1] * sup[i - 1] / guard(fwd[i - 1]);
    }
    let mut bwd = vec![0.0; n];
    bwd[n - 1] = diag[n - 1];
    for i in (0..n - 1).rev() {
        bwd[i] = diag[i] - sup[i] * sub[i] / guard(bwd[i + 1]);
    }
    let k = (0..n)
        .min_by(|&i, &j| (fwd[i] + bwd[i] - diag[i]).abs().total_cmp(&(fwd[j] + bwd[j] - diag[j]).abs()))
        .expect("non-empty");
    let mut z = vec![0.0; n];
    z[k] = 1.0;
    for i in (0..k).rev() {
        z[i] = -sup[i] * z[i + 1] / guard(fwd[i]);
    }
    for i in k + 1..n {
        z[i] = -sub[i - 1] * z[i - 1] / guard(bwd[i]);
    }
    z
}

/// Right and left eigenvectors for `lambda`, the null vectors of
/// `L - lambda M` and its transpose.
///
/// Unnormalized; see [`eigenvectors_twisted`] for the scaled pair.
pub(crate) fn null_vectors(p: &BidiagonalPencil, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let (a, b) = (p.a(), p.b());
    let diag: Vec<f64> = a.iter().map(|x| x - lambda).collect();
    let lb: Vec<f64> = b.iter().map(|x| lambda * x).collect();
    let ones = vec![1.0; b.len()];
    // (L - lambda M)_{i+1,i} = lambda b_i and (L - lambda M)_{i,i+1} = 1.
    let right = twisted_null_vector(&lb, &diag, &ones);
    let left = twisted_null_vector(&ones, &diag, &lb);
    (right, left)
}

pub fn direct_transform(p: &BidiagonalPencil) -> Result<SpectralData> {
    direct_transform_with(p, WeightMethod::default())
}

pub fn direct_transform_with(p: &BidiagonalPencil, method: WeightMethod) -> Result<SpectralData> {
    let lambda = generalized_eigenvalues(p)?;
    let w = match method {
        WeightMethod::Residues => weights_from_residues(p, &lambda)?,
        WeightMethod::Eigenvectors => weights_from_eigenvectors(p, &lambda)?,
        WeightMethod::Twisted => weights_from_twisted(p, &lambda)?,
    };
    Ok(SpectralData::from_parts_unchecked(lambda, w))
}

/// Value and derivative of a Weyl function at a non-pole point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylValue {
    pub value: f64,
    pub derivative: f64,
}

/// `f(z) = sum w_j / (z - lambda_j)` and `f'(z) = -sum w_j / (z - lambda_j)^2`.
pub fn weyl_eval<S: PoleResidue + ?Sized>(s: &S, z: f64) -> Result<WeylValue> {
    let mut value = 0.0;
    let mut derivative = 0.0;
    for (j, (&l, &w)) in s.poles().iter().zip(s.residues()).enumerate() {
        let d = z - l;
        if d == 0.0 {
            return Err(Error::PoleEvaluation(j + 1));
        }
        value += w / d;
        derivative -= w / (d * d);
    }
    Ok(WeylValue { value, derivative })
}
