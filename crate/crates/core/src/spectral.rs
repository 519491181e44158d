//! Spectral data: the generalized eigenvalues and their weights, and the
//! Weyl function `f(z) = sum_j w_j / (z - lambda_j)` they define.

use crate::error::{Error, Result};

/// Largest tolerated deviation of a computed weight sum from one before
/// renormalizing.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

/// Sorted positive eigenvalues with positive weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    lambda: Vec<f64>,
    w: Vec<f64>,
}

/// A member of the class of Weyl functions: simple positive poles with
/// positive residues summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylFunction {
    poles: Vec<f64>,
    residues: Vec<f64>,
}

/// Spectral data with weights held as natural logarithms.
///
/// Long-time evolution drives weights far below the `f64` range; the log
/// form keeps them exact. `log_w` is normalized so that `logsumexp(log_w) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogSpectralData {
    pub lambda: Vec<f64>,
    pub log_w: Vec<f64>,
}

fn check_nodes(nodes: &[f64], what: &str) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::InvalidLength(format!("{what} must not be empty")));
    }
    for (j, &x) in nodes.iter().enumerate() {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidSpectralData(format!("{what} {} = {x} is not a finite positive number", j + 1)));
        }
        if j > 0 && !(nodes[j - 1] < x) {
            return Err(Error::InvalidSpectralData(format!("{what} are not strictly increasing at index {}", j + 1)));
        }
    }
    Ok(())
}

/// Validates and renormalizes a weight vector in place.
///
/// Every entry must be finite and positive, and the sum must lie within
/// [`RENORMALIZE_TOLERANCE`] of one.
fn check_and_normalize(w: &mut [f64], what: &str) -> Result<()> {
    for (j, &x) in w.iter().enumerate() {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::InvalidSpectralData(format!("{what} {} = {x} is not a finite positive number", j + 1)));
        }
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
        return Err(Error::InvalidSpectralData(format!("{what} sum to {sum}, expected 1")));
    }
    w.iter_mut().for_each(|x| *x /= sum);
    Ok(())
}

/// Renormalizes computed weights, reporting rounding failures as numerical
/// errors rather than input errors.
pub(crate) fn normalize_computed(w: &mut [f64]) -> Result<()> {
    if let Some(j) = w.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveWeight(j + 1));
    }
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
        return Err(Error::WeightSum(sum));
    }
    w.iter_mut().for_each(|x| *x /= sum);
    Ok(())
}

impl SpectralData {
    pub fn new(lambda: Vec<f64>, mut w: Vec<f64>) -> Result<Self> {
        check_nodes(&lambda, "eigenvalues")?;
        if w.len() != lambda.len() {
            return Err(Error::InvalidLength(format!("{} eigenvalues but {} weights", lambda.len(), w.len())));
        }
        check_and_normalize(&mut w, "weights")?;
        Ok(SpectralData { lambda, w })
    }

    /// For weights already normalized by the caller.
    pub(crate) fn from_parts_unchecked(lambda: Vec<f64>, w: Vec<f64>) -> Self {
        SpectralData { lambda, w }
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn weyl(&self) -> WeylFunction {
        WeylFunction { poles: self.lambda.clone(), residues: self.w.clone() }
    }

    pub fn to_log(&self) -> LogSpectralData {
        LogSpectralData { lambda: self.lambda.clone(), log_w: self.w.iter().map(|w| w.ln()).collect() }
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.lambda, self.w)
    }
}

impl WeylFunction {
    pub fn new(poles: Vec<f64>, mut residues: Vec<f64>) -> Result<Self> {
        check_nodes(&poles, "poles")?;
        if residues.len() != poles.len() {
            return Err(Error::InvalidLength(format!("{} poles but {} residues", poles.len(), residues.len())));
        }
        check_and_normalize(&mut residues, "residues")?;
        Ok(WeylFunction { poles, residues })
    }

    pub(crate) fn from_parts_unchecked(poles: Vec<f64>, residues: Vec<f64>) -> Self {
        WeylFunction { poles, residues }
    }

    pub fn poles(&self) -> &[f64] {
        &self.poles
    }

    pub fn residues(&self) -> &[f64] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn into_spectral_data(self) -> SpectralData {
        SpectralData { lambda: self.poles, w: self.residues }
    }
}

impl From<SpectralData> for WeylFunction {
    fn from(s: SpectralData) -> Self {
        WeylFunction { poles: s.lambda, residues: s.w }
    }
}

impl From<&SpectralData> for WeylFunction {
    fn from(s: &SpectralData) -> Self {
        s.weyl()
    }
}

/// Anything exposing a pole-residue representation.
pub trait PoleResidue {
    fn poles(&self) -> &[f64];
    fn residues(&self) -> &[f64];
}

impl PoleResidue for SpectralData {
    fn poles(&self) -> &[f64] {
        &self.lambda
    }
    fn residues(&self) -> &[f64] {
        &self.w
    }
}

impl PoleResidue for WeylFunction {
    fn poles(&self) -> &[f64] {
        &self.poles
    }
    fn residues(&self) -> &[f64] {
        &self.residues
    }
}

/// `ln(sum exp(x_i))` without overflow. Returns `-inf` for an empty slice.
pub fn logsumexp(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

impl LogSpectralData {
    /// Normalizes `log_w` in place so that the weights sum to one.
    pub fn new(lambda: Vec<f64>, mut log_w: Vec<f64>) -> Result<Self> {
        check_nodes(&lambda, "eigenvalues")?;
        if log_w.len() != lambda.len() {
            return Err(Error::InvalidLength(format!("{} eigenvalues but {} log-weights", lambda.len(), log_w.len())));
        }
        if let Some(j) = log_w.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectralData(format!("log-weight {} is not finite", j + 1)));
        }
        let lse = logsumexp(&log_w);
        log_w.iter_mut().for_each(|x| *x -= lse);
        Ok(LogSpectralData { lambda, log_w })
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// Linear-scale weights; entries below the `f64` range come back as 0.
    pub fn weights(&self) -> Vec<f64> {
        self.log_w.iter().map(|l| l.exp()).collect()
    }

    /// Converts to ordinary spectral data, failing if a weight underflows.
    pub fn to_spectral_data(&self) -> Result<SpectralData> {
        let w = self.weights();
        if let Some(j) = w.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::DegenerateWeight { index: j + 1, t: None });
        }
        SpectralData::new(self.lambda.clone(), w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalizes_within_tolerance() {
        let s = SpectralData::new(vec![1.0, 2.0], vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((s.w().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(SpectralData::new(vec![1.0, 2.0], vec![0.5, 0.6]).is_err());
        assert!(SpectralData::new(vec![2.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(SpectralData::new(vec![1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(SpectralData::new(vec![-1.0, 1.0], vec![0.5, 0.5]).is_err());
        assert!(SpectralData::new(vec![1.0, 2.0], vec![1.0, 0.0]).is_err());
        assert!(SpectralData::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(SpectralData::new(vec![], vec![]).is_err());
        assert!(WeylFunction::new(vec![1.0], vec![2.0]).is_err());
    }

    #[test]
    fn logsumexp_is_stable() {
        assert!((logsumexp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((logsumexp(&[-1000.0, -1000.0]) - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(logsumexp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn log_data_normalizes() {
        let s = LogSpectralData::new(vec![1.0, 2.0, 3.0], vec![-2000.0, 0.0, 5.0]).unwrap();
        assert!(logsumexp(&s.log_w).abs() < 1e-15);
        assert!(matches!(s.to_spectral_data(), Err(Error::DegenerateWeight { index: 1, .. })));
    }
}
