//! Inverse spectral transform: eigenvalues and weights back to the pencil.
//!
//! The primary route expands the Weyl function as a terminating T-fraction
//!
//! ```text
//! f(z) = 1 / (z - a_1 - b_1 z / (z - a_2 - b_2 z / ( ... - b_{N-1} z / (z - a_N))))
//! ```
//!
//! one level at a time, keeping every remainder in pole-residue form. The
//! second route rebuilds the Laurent orthogonal polynomials on the nodes and
//! reads the coefficients off their norms; it shares no code with the first.

use crate::error::{Entry, Error, Result};
use crate::pencil::BidiagonalPencil;
use crate::spectral::{normalize_computed, SpectralData, WeylFunction};

/// Incoming weights below this are rejected rather than deflated.
pub const WEIGHT_FLOOR: f64 = 1e-250;

/// One level of the continued fraction: `f(z) = 1 / (z - a - b z g(z))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeelStep {
    pub a: f64,
    pub b: f64,
    pub rest: WeylFunction,
}

fn check_floor(w: &[f64]) -> Result<()> {
    match w.iter().position(|&x| x < WEIGHT_FLOOR) {
        Some(j) => Err(Error::DegenerateWeight { index: j + 1, t: None }),
        None => Ok(()),
    }
}

/// Bisects geometrically on `|o|` in `[lo, hi]` (both positive) for a sign
/// change of `g`, where `g` has sign `near_sign` at `lo`.
fn geometric_bisect(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, near_sign: f64) -> Result<f64> {
    let (glo, ghi) = (g(lo), g(hi));
    if glo * near_sign < 0.0 || ghi * near_sign > 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    for _ in 0..crate::poly::BISECTION_MAX_ITER {
        if hi - lo <= crate::poly::BISECTION_REL_WIDTH * hi {
            break;
        }
        // Geometric midpoint while the bracket spans orders of magnitude.
        let mid = if hi > 4.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm * near_sign > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The zero of `f` between poles `j` and `j + 1`, as `(anchor, offset)` with
/// the zero at `poles[anchor] + offset` and the anchor the nearer pole.
fn zero_in_gap(poles: &[f64], w: &[f64], j: usize) -> Result<(usize, f64)> {
    let f_at = |anchor: usize, o: f64| -> f64 {
        poles
            .iter()
            .zip(w)
            .enumerate()
            .map(|(k, (&l, &wk))| if k == anchor { wk / o } else { wk / ((poles[anchor] - l) + o) })
            .sum()
    };
    let half = 0.5 * (poles[j + 1] - poles[j]);
    // f runs from +inf just right of pole j to -inf just left of pole j+1.
    let right_half = f_at(j, half) > 0.0;
    let (anchor, dir) = if right_half { (j + 1, -1.0) } else { (j, 1.0) };
    // Away from the anchor every other term is bounded by twice its value at
    // the anchor, so the anchor term dominates below this offset.
    let bound: f64 = poles
        .iter()
        .zip(w)
        .enumerate()
        .filter(|&(k, _)| k != anchor)
        .map(|(_, (&l, &wk))| 2.0 * wk / (poles[anchor] - l).abs())
        .sum();
    let lo = (0.5 * w[anchor] / bound).min(0.5 * half);
    let near_sign = dir;
    let g = |m: f64| f_at(anchor, dir * m);
    let m = geometric_bisect(&g, lo, half, near_sign)?;
    Ok((anchor, dir * m))
}

/// Sum of `w_j w_k (lambda_k - lambda_j)^2 / (lambda_j lambda_k)` over `j < k`.
///
/// Equals `(sum w lambda)(sum w / lambda) - 1` for normalized weights, written
/// without the cancellation.
fn jensen_gap(poles: &[f64], w: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 1..poles.len() {
        for j in 0..k {
            let d = poles[k] - poles[j];
            s += w[j] * w[k] * d * d / (poles[j] * poles[k]);
        }
    }
    s
}

/// Splits `f` into `a`, `b` and the remainder `g` of one fewer pole.
///
/// `a = (sum w_j / lambda_j)^{-1}`, `b = sum w_j lambda_j - a` (evaluated in
/// a cancellation-free form), the poles of `g` are the zeros of `f` and its
/// residues are `-1 / (b z f'(z))` at those zeros.
pub fn tfraction_peel_step(f: &WeylFunction) -> Result<PeelStep> {
    let (poles, w) = (f.poles(), f.residues());
    let n = poles.len();
    if n < 2 {
        return Err(Error::InvalidLength("peeling needs at least two poles".into()));
    }
    check_floor(w)?;

    let inv_mean: f64 = poles.iter().zip(w).map(|(l, w)| w / l).sum();
    let a = 1.0 / inv_mean;
    let b = a * jensen_gap(poles, w);
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::NonPositiveCoefficient { which: Entry::A, value: a });
    }
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::NonPositiveCoefficient { which: Entry::B, value: b });
    }

    let mut new_poles = Vec::with_capacity(n - 1);
    let mut new_w = Vec::with_capacity(n - 1);
    for j in 0..n - 1 {
        let (anchor, o) = zero_in_gap(poles, w, j)?;
        let z = poles[anchor] + o;
        let fprime_abs: f64 = poles
            .iter()
            .zip(w)
            .enumerate()
            .map(|(k, (&l, &wk))| {
                let d = if k == anchor { o } else { (poles[anchor] - l) + o };
                wk / (d * d)
            })
            .sum();
        new_poles.push(z);
        new_w.push(1.0 / (b * z * fprime_abs));
    }
    if let Some(j) = new_poles.windows(2).position(|p| !(p[0] < p[1])) {
        return Err(Error::BracketFailure { lo: new_poles[j], hi: new_poles[j + 1] });
    }
    normalize_computed(&mut new_w)?;
    Ok(PeelStep { a, b, rest: WeylFunction::from_parts_unchecked(new_poles, new_w) })
}

/// Rebuilds the pencil by `N - 1` peel steps; the last remainder has a single
/// pole, which is `a_N`.
pub fn inverse_transform(s: &SpectralData) -> Result<BidiagonalPencil> {
    check_floor(s.w())?;
    let n = s.len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n - 1);
    let mut f = s.weyl();
    while f.len() > 1 {
        let step = tfraction_peel_step(&f)?;
        a.push(step.a);
        b.push(step.b);
        f = step.rest;
    }
    a.push(f.poles()[0]);
    BidiagonalPencil::new(a, b)
}

/// Inverse transform through Laurent orthogonality.
///
/// With `<f, g>_k = sum_j f(lambda_j) g(lambda_j) w_j / lambda_j^k` and
/// `h_n = <P_n, P_n>_n`,
/// `a_n = h_{n-1} / <P_{n-1}, P_{n-1}>_n` and `b_n = h_n / h_{n-1}`.
///
/// The polynomials are carried on the nodes as unit vectors
/// `q_n(j) = P_n(lambda_j) sqrt(w_j / lambda_j^n) / sqrt(h_n)`, for which
/// the recurrence becomes
///
/// ```text
/// r = (sqrt(lambda) - a_n / sqrt(lambda)) q_{n-1} - sqrt(b_{n-1}) q_{n-2}
/// b_n = |r|^2,  q_n = r / |r|,  a_n = 1 / sum_j q_{n-1}(j)^2 / lambda_j
/// ```
///
/// Each `r` is projected off the span of the earlier polynomials in the
/// `n`-th inner product, i.e. off the vectors `q_m(j) lambda_j^{(m-n)/2}`,
/// since the bare recurrence loses that orthogonality to cancellation.
pub fn inverse_transform_stieltjes(s: &SpectralData) -> Result<BidiagonalPencil> {
    let (lambda, w) = (s.lambda(), s.w());
    let n = lambda.len();
    let sqrt_l: Vec<f64> = lambda.iter().map(|l| l.sqrt()).collect();

    let mut a = Vec::with_capacity(n);
    let mut b: Vec<f64> = Vec::with_capacity(n - 1);
    let mut qs: Vec<Vec<f64>> = vec![w.iter().map(|x| x.sqrt()).collect()];
    for deg in 1..=n {
        let cur = &qs[deg - 1];
        let an = 1.0 / cur.iter().zip(lambda).map(|(q, l)| q * q / l).sum::<f64>();
        if !an.is_finite() {
            return Err(Error::ZeroNorm(deg - 1));
        }
        a.push(an);
        if deg == n {
            break;
        }
        let sb = if deg >= 2 { b[deg - 2].sqrt() } else { 0.0 };
        let mut r: Vec<f64> = (0..n)
            .map(|j| {
                let prev = if deg >= 2 { qs[deg - 2][j] } else { 0.0 };
                (sqrt_l[j] - an / sqrt_l[j]) * cur[j] - sb * prev
            })
            .collect();
        let basis: Vec<Vec<f64>> = qs
            .iter()
            .enumerate()
            .map(|(m, q)| {
                let e = (m as f64 - deg as f64) / 2.0;
                q.iter().zip(lambda).map(|(x, l)| x * l.powf(e)).collect()
            })
            .collect();
        project_out(&mut r, orthonormalize(basis));
        let h: f64 = r.iter().map(|x| x * x).sum();
        if !(h > f64::MIN_POSITIVE) || !h.is_finite() {
            return Err(Error::ZeroNorm(deg));
        }
        b.push(h);
        let norm = h.sqrt();
        qs.push(r.into_iter().map(|x| x / norm).collect());
    }
    BidiagonalPencil::new(a, b)
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Removes the components of `r` along the orthonormal `basis`, twice.
fn project_out(r: &mut [f64], basis: Vec<Vec<f64>>) {
    for _ in 0..2 {
        for q in &basis {
            let c = dot(r, q);
            r.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Gram-Schmidt with reorthogonalization; columns that vanish are dropped.
fn orthonormalize(vectors: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors {
        let scale = dot(&v, &v).sqrt();
        if !(scale > 0.0) || !scale.is_finite() {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= scale);
        project_out(&mut v, out.clone());
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-12 {
            v.iter_mut().for_each(|x| *x /= nv);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example;

    fn rel(x: f64, y: f64) -> f64 {
        (x - y).abs() / y.abs()
    }

    #[test]
    fn peel_two_poles() {
        let r2 = 2f64.sqrt();
        let f = WeylFunction::new(vec![2.0 - r2, 2.0 + r2], vec![0.5, 0.5]).unwrap();
        let step = tfraction_peel_step(&f).unwrap();
        assert!((step.a - 1.0).abs() < 1e-14);
        assert!((step.b - 1.0).abs() < 1e-14);
        assert!((step.rest.poles()[0] - 2.0).abs() < 1e-14);
        assert_eq!(step.rest.residues(), &[1.0]);
    }

    #[test]
    fn peel_example_first_level() {
        let step = tfraction_peel_step(&example::spectral_data().weyl()).unwrap();
        assert!((step.a - 3.0).abs() < 1e-7);
        assert!((step.b - 1.0).abs() < 1e-7);
        assert!((step.rest.residues().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn peel_rejects_single_pole() {
        let f = WeylFunction::new(vec![5.0], vec![1.0]).unwrap();
        assert!(matches!(tfraction_peel_step(&f), Err(Error::InvalidLength(_))));
    }

    #[test]
    fn example_round_trip_both_routes() {
        let s = example::spectral_data();
        for p in [inverse_transform(&s).unwrap(), inverse_transform_stieltjes(&s).unwrap()] {
            for (x, y) in p.a().iter().zip(example::A) {
                assert!((x - y).abs() < 1e-6, "{x} vs {y}");
            }
            for (x, y) in p.b().iter().zip(example::B) {
                assert!((x - y).abs() < 1e-6, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn trivial_and_two_point() {
        let one = SpectralData::new(vec![5.0], vec![1.0]).unwrap();
        for inv in [inverse_transform, inverse_transform_stieltjes] {
            let p = inv(&one).unwrap();
            assert_eq!((p.a(), p.b()), (&[5.0][..], &[][..]));
            let r2 = 2f64.sqrt();
            let s = SpectralData::new(vec![2.0 - r2, 2.0 + r2], vec![0.5, 0.5]).unwrap();
            let p = inv(&s).unwrap();
            assert!(rel(p.a()[0], 1.0) < 1e-13 && rel(p.a()[1], 2.0) < 1e-13 && rel(p.b()[0], 1.0) < 1e-13);
        }
    }

    #[test]
    fn weight_floor() {
        let s = SpectralData::new(vec![1.0, 2.0], vec![1.0 - 1e-300, 1e-300]).unwrap();
        assert_eq!(inverse_transform(&s), Err(Error::DegenerateWeight { index: 2, t: None }));
    }

    #[test]
    fn coalescing_remainder_poles_are_reported() {
        // A nearly massless middle node pulls a zero of f in from each side;
        // in f64 both land on the node itself.
        let s = SpectralData::new(vec![1.0, 2.0, 3.0], vec![0.5, 1e-200, 0.5]).unwrap();
        assert!(matches!(inverse_transform(&s), Err(Error::BracketFailure { .. })));
    }
}
