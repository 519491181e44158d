//! Direct integration of the lattice equations, as an oracle for the
//! spectral route.
//!
//! With `b_0 = b_N = 0`, the general flow reads
//!
//! ```text
//! a_n' = F(L M^{-1})_{n,n-1} - F(M^{-1} L)_{n+1,n}
//! b_n' = F(M^{-1} L)_{n+1,n} - F(L M^{-1})_{n+1,n}
//! ```
//!
//! `F = 1/x` and `F = x` have closed forms; any other `F` goes through the
//! eigenvector factorizations.

use crate::dense::Matrix;
use crate::direct::{generalized_eigenvalues, null_vectors};
use crate::error::{Error, Result};
use crate::flowspec::FlowSpec;
use crate::pencil::BidiagonalPencil;
use crate::trajectory::Trajectory;

/// Time derivatives of `a` and `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub da: Vec<f64>,
    pub db: Vec<f64>,
}

/// `F(x) = 1/x`: `a_n' = b_n/a_{n+1} - b_{n-1}/a_{n-1}`, `b_n' = b_n (1/a_n - 1/a_{n+1})`.
pub fn rhs_reciprocal(p: &BidiagonalPencil) -> VectorField {
    let (a, b) = (p.a(), p.b());
    let n = a.len();
    let da = (0..n)
        .map(|i| {
            let right = if i + 1 < n { b[i] / a[i + 1] } else { 0.0 };
            let left = if i > 0 { b[i - 1] / a[i - 1] } else { 0.0 };
            right - left
        })
        .collect();
    let db = (0..n - 1).map(|i| b[i] * (1.0 / a[i] - 1.0 / a[i + 1])).collect();
    VectorField { da, db }
}

/// `F(x) = x`: `a_n' = a_n (b_{n-1} - b_n)`, `b_n' = b_n (a_n - a_{n+1} + b_{n-1} - b_{n+1})`.
pub fn rhs_identity(p: &BidiagonalPencil) -> VectorField {
    let a = p.a();
    let n = a.len();
    let da = (1..=n).map(|i| a[i - 1] * (p.b_ext(i - 1) - p.b_ext(i))).collect();
    let db = (1..n).map(|i| p.b_ext(i) * (a[i - 1] - a[i] + p.b_ext(i - 1) - p.b_ext(i + 1))).collect();
    VectorField { da, db }
}

/// Any `F`, through `F(M^{-1} L) = V F(D) V^{-1}` and
/// `F(L M^{-1}) = U^{-T} F(D) U^T`, where the columns of `V` and `U` are the
/// right and left generalized eigenvectors and the inverses come from a
/// partially pivoted LU factorization.
pub fn rhs_general(p: &BidiagonalPencil, f: &FlowSpec) -> Result<VectorField> {
    let n = p.len();
    if n == 1 {
        return Ok(VectorField { da: vec![0.0], db: vec![] });
    }
    let lambda = generalized_eigenvalues(p)?;
    let fl: Vec<f64> = lambda.iter().map(|&l| f.eval(l)).collect();
    let mut v = Matrix::zeros(n);
    let mut u = Matrix::zeros(n);
    for (j, &l) in lambda.iter().enumerate() {
        let (right, left) = null_vectors(p, l);
        for i in 0..n {
            v[(i, j)] = right[i];
            u[(i, j)] = left[i];
        }
    }
    let v_inv = v.inverse().ok_or(Error::SingularEigenvectorMatrix)?;
    let u_inv = u.inverse().ok_or(Error::SingularEigenvectorMatrix)?;
    // 0-based (r, c) entries of Y = F(M^{-1} L) and X = F(L M^{-1}).
    let y = |r: usize, c: usize| (0..n).map(|j| v[(r, j)] * fl[j] * v_inv[(j, c)]).sum::<f64>();
    let x = |r: usize, c: usize| (0..n).map(|j| u_inv[(j, r)] * fl[j] * u[(c, j)]).sum::<f64>();
    let da = (0..n)
        .map(|i| {
            let xs = if i > 0 { x(i, i - 1) } else { 0.0 };
            let ys = if i + 1 < n { y(i + 1, i) } else { 0.0 };
            xs - ys
        })
        .collect();
    let db = (0..n - 1).map(|i| y(i + 1, i) - x(i + 1, i)).collect();
    Ok(VectorField { da, db })
}

fn rhs(p: &BidiagonalPencil, f: &FlowSpec) -> Result<VectorField> {
    match f {
        FlowSpec::Reciprocal => Ok(rhs_reciprocal(p)),
        FlowSpec::Identity => Ok(rhs_identity(p)),
        _ => rhs_general(p, f),
    }
}

fn axpy(a: &[f64], b: &[f64], k: &VectorField, h: f64) -> BidiagonalPencil {
    BidiagonalPencil::from_parts_unchecked(
        a.iter().zip(&k.da).map(|(x, d)| x + h * d).collect(),
        b.iter().zip(&k.db).map(|(x, d)| x + h * d).collect(),
    )
}

fn positive(p: &BidiagonalPencil) -> bool {
    p.a().iter().chain(p.b()).all(|&x| x > 0.0 && x.is_finite())
}

/// One classical RK4 step of size `h` (either sign).
fn rk4_step(p: &BidiagonalPencil, f: &FlowSpec, h: f64, t: f64) -> Result<BidiagonalPencil> {
    let (a, b) = (p.a(), p.b());
    let stage = |q: BidiagonalPencil| -> Result<VectorField> {
        if !positive(&q) {
            return Err(Error::PositivityLoss { t });
        }
        rhs(&q, f)
    };
    let k1 = rhs(p, f)?;
    let k2 = stage(axpy(a, b, &k1, 0.5 * h))?;
    let k3 = stage(axpy(a, b, &k2, 0.5 * h))?;
    let k4 = stage(axpy(a, b, &k3, h))?;
    let combine = |x: &[f64], d: [&[f64]; 4]| -> Vec<f64> {
        (0..x.len()).map(|i| x[i] + h / 6.0 * (d[0][i] + 2.0 * d[1][i] + 2.0 * d[2][i] + d[3][i])).collect()
    };
    let next = BidiagonalPencil::from_parts_unchecked(
        combine(a, [&k1.da, &k2.da, &k3.da, &k4.da]),
        combine(b, [&k1.db, &k2.db, &k3.db, &k4.db]),
    );
    if !positive(&next) {
        return Err(Error::PositivityLoss { t: t + h });
    }
    Ok(next)
}

fn steps_for(span: f64, dt: f64) -> usize {
    // Tolerate grids where span/dt is an integer up to rounding.
    ((span.abs() / dt) - 1e-9).ceil().max(1.0) as usize
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidTimes(format!("step {dt} must be finite and positive")));
    }
    Ok(())
}

fn trajectory_from(times: Vec<f64>, samples: Vec<BidiagonalPencil>) -> Trajectory {
    let log_b = samples.iter().map(|p| p.b().iter().map(|b| b.ln()).collect()).collect();
    Trajectory { times, samples, log_b, spectra: None }
}

/// Fixed-step RK4 from `t = 0` to `t_final` (either sign), recording every
/// step. The step is `t_final / ceil(|t_final| / dt)`.
pub fn integrate(p0: &BidiagonalPencil, f: &FlowSpec, t_final: f64, dt: f64) -> Result<Trajectory> {
    check_dt(dt)?;
    if !t_final.is_finite() {
        return Err(Error::InvalidTimes(format!("final time {t_final} is not finite")));
    }
    if t_final == 0.0 {
        return Ok(trajectory_from(vec![0.0], vec![p0.clone()]));
    }
    let steps = steps_for(t_final, dt);
    let h = t_final / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut samples = Vec::with_capacity(steps + 1);
    times.push(0.0);
    samples.push(p0.clone());
    let mut cur = p0.clone();
    for k in 1..=steps {
        let t = (k - 1) as f64 * h;
        cur = rk4_step(&cur, f, h, t)?;
        times.push(if k == steps { t_final } else { k as f64 * h });
        samples.push(cur.clone());
    }
    Ok(trajectory_from(times, samples))
}

/// RK4 samples at strictly increasing `times`, which may straddle 0.
///
/// Integration runs outwards from `t = 0` in both directions; each interval
/// between consecutive sample times is split into equal steps no longer
/// than `dt`.
pub fn integrate_at(p0: &BidiagonalPencil, f: &FlowSpec, times: &[f64], dt: f64) -> Result<Trajectory> {
    check_dt(dt)?;
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidTimes(format!("time {t} is not finite")));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidTimes(format!("times must increase strictly, got {} then {}", w[0], w[1])));
    }
    let split = times.partition_point(|&t| t < 0.0);
    let mut samples: Vec<Option<BidiagonalPencil>> = vec![None; times.len()];
    let forward: Vec<usize> = (split..times.len()).collect();
    let backward: Vec<usize> = (0..split).rev().collect();
    for order in [forward, backward] {
        let (mut t, mut cur) = (0.0, p0.clone());
        for idx in order {
            let target = times[idx];
            if target != t {
                let steps = steps_for(target - t, dt);
                let h = (target - t) / steps as f64;
                for k in 0..steps {
                    cur = rk4_step(&cur, f, h, t + k as f64 * h)?;
                }
                t = target;
            }
            samples[idx] = Some(cur.clone());
        }
    }
    Ok(trajectory_from(times.to_vec(), samples.into_iter().map(|s| s.expect("every time visited")).collect()))
}
