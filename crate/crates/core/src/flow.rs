//! Time evolution of spectral data and what is built on it: trajectories,
//! long-time asymptotics, and the map from Newtonian coordinates.
//!
//! The eigenvalues are constants of motion and the weights evolve as
//! `w_j(t) ∝ w_j(0) exp(-t F(lambda_j))`. Weights are always carried as
//! logarithms; long times push them far below the `f64` range, and
//! [`inverse_transform_log`] reconstructs the pencil from such data.

use rayon::prelude::*;

use crate::direct::direct_transform;
use crate::error::{Entry, Error, Result};
use crate::flowspec::{Direction, FlowSpec, Monotonicity};
use crate::inverse::inverse_transform;
use crate::pencil::BidiagonalPencil;
use crate::spectral::{logsumexp, normalize_computed, LogSpectralData, SpectralData};
use crate::trajectory::Trajectory;
use crate::wide::Wide;

/// Smallest weight for which [`solve_trajectory`] uses the ordinary inverse
/// transform; below it the extended-range reconstruction takes over.
pub const LOG_PATH_THRESHOLD: f64 = 1e-6;

/// Exponential decay of one `b_n` far out in time:
/// `b_n(t) ≈ prefactor * exp(-exponent * |t|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePrediction {
    pub n: usize,
    pub exponent: f64,
    pub prefactor: f64,
    pub direction: Direction,
}

impl RatePrediction {
    /// Predicted `ln b_n(t)`.
    pub fn ln_b(&self, t: f64) -> f64 {
        self.prefactor.ln() - self.exponent * t.abs()
    }
}

/// Limit of `a_n` and the first-order correction
/// `limit - a_n(t) ≈ c_plus * b_n(t) + c_minus * b_{n-1}(t)`.
///
/// A coefficient whose neighbouring eigenvalue does not exist is 0; the
/// matching `b` vanishes identically anyway.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ALimit {
    pub n: usize,
    pub limit: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub direction: Direction,
}

impl ALimit {
    /// Predicted `limit - a_n` given `b_n` and `b_{n-1}` (pass 0 at the ends).
    pub fn correction(&self, b_n: f64, b_prev: f64) -> f64 {
        self.c_plus * b_n + self.c_minus * b_prev
    }
}

/// Positions, momenta and coupling of the Newtonian form of the lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonianState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub epsilon: f64,
}

impl NewtonianState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, epsilon: f64) -> Result<Self> {
        if q.is_empty() || q.len() != p.len() {
            return Err(Error::InvalidLength(format!(
                "need equally many positions and momenta, got {} and {}",
                q.len(),
                p.len()
            )));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidState(format!("epsilon = {epsilon} must be finite and positive")));
        }
        if q.iter().chain(&p).any(|x| !x.is_finite()) {
            return Err(Error::InvalidState("positions and momenta must be finite".into()));
        }
        Ok(NewtonianState { q, p, epsilon })
    }
}

/// A pencil with `b` held as logarithms, as produced far out in time.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPencil {
    pub a: Vec<f64>,
    pub log_b: Vec<f64>,
}

impl LogPencil {
    /// Linear-scale pencil. Entries of `b` below the `f64` range come back as
    /// 0.0, so the result is meant for output, not for further computation.
    pub fn to_pencil(&self) -> BidiagonalPencil {
        BidiagonalPencil::from_parts_unchecked(self.a.clone(), self.log_b.iter().map(|l| l.exp()).collect())
    }
}

/// Evolves log-weights: `ln w_j(t) = ln w_j(0) - t F(lambda_j) - logsumexp(...)`.
pub fn evolve_log_weights(s: &LogSpectralData, f: &FlowSpec, t: f64) -> Result<LogSpectralData> {
    let mut log_w = Vec::with_capacity(s.len());
    for (j, (&l, &lw)) in s.lambda.iter().zip(&s.log_w).enumerate() {
        let x = lw - t * f.eval(l);
        if !x.is_finite() {
            return Err(Error::Overflow(format!("t F(lambda_{}) is not finite at t = {t}", j + 1)));
        }
        log_w.push(x);
    }
    let lse = logsumexp(&log_w);
    log_w.iter_mut().for_each(|x| *x -= lse);
    Ok(LogSpectralData { lambda: s.lambda.clone(), log_w })
}

/// Evolves spectral data to time `t`.
///
/// Fails with `DegenerateWeight` when a weight leaves the `f64` range; use
/// [`evolve_log_weights`] for such times.
pub fn evolve_weights(s0: &SpectralData, f: &FlowSpec, t: f64) -> Result<SpectralData> {
    if t == 0.0 {
        return Ok(s0.clone());
    }
    let ls = evolve_log_weights(&s0.to_log(), f, t)?;
    let mut w = ls.weights();
    if let Some(j) = w.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::DegenerateWeight { index: j + 1, t: Some(t) });
    }
    normalize_computed(&mut w)?;
    Ok(SpectralData::from_parts_unchecked(ls.lambda, w))
}

/// One level of the extended-range continued fraction.
///
/// `x` approximates the poles, `d[i][k] = pole_i - pole_k` holds their exact
/// differences and `lw` the log-residues. The differences are what keep
/// zeros that sit `e^{-1000}` away from a pole distinct.
struct Level {
    x: Vec<f64>,
    d: Vec<Vec<Wide>>,
    lw: Vec<f64>,
}

impl Level {
    fn len(&self) -> usize {
        self.x.len()
    }

    /// Distance from pole `k` to the point `pole_anchor + o`.
    fn dist(&self, anchor: usize, k: usize, o: Wide) -> Wide {
        if k == anchor {
            o
        } else {
            self.d[anchor][k] + o
        }
    }

    /// The Weyl function at `pole_anchor + o`.
    fn f_at(&self, anchor: usize, o: Wide) -> Wide {
        Wide::sum((0..self.len()).map(|k| Wide::exp_of(self.lw[k]) / self.dist(anchor, k, o)))
    }

    /// The zero between poles `j` and `j + 1` as `(anchor, offset)`, found by
    /// bisection on the log of the offset from the nearer pole.
    fn zero_in_gap(&self, j: usize) -> Result<(usize, Wide)> {
        let half = self.d[j + 1][j] * Wide::from_f64(0.5);
        if half.signum() <= 0.0 {
            return Err(Error::BracketFailure { lo: self.x[j], hi: self.x[j + 1] });
        }
        // f falls from +inf right of pole j to -inf left of pole j+1.
        let (anchor, dir) = if self.f_at(j, half).signum() > 0.0 { (j + 1, -1.0) } else { (j, 1.0) };
        // Within half a gap of the anchor every other term is at most twice
        // its value at the anchor, so the anchor term wins below `lo`.
        let bound = Wide::sum(
            (0..self.len())
                .filter(|&k| k != anchor)
                .map(|k| Wide::from_f64(2.0) * Wide::exp_of(self.lw[k]) / self.d[anchor][k].abs()),
        );
        let mut hi = half.ln_abs();
        let mut lo = (self.lw[anchor] - 2f64.ln() - bound.ln_abs()).min(hi - 2f64.ln());
        let sign_at = |ln_m: f64| self.f_at(anchor, Wide::new(dir, ln_m)).signum();
        if sign_at(lo) != dir {
            return Err(Error::BracketFailure { lo: self.x[j], hi: self.x[j + 1] });
        }
        for _ in 0..crate::poly::BISECTION_MAX_ITER {
            let width = hi - lo;
            if width <= 1e-14 || width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let s = sign_at(mid);
            if s == 0.0 {
                return Ok((anchor, Wide::new(dir, mid)));
            } else if s == dir {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok((anchor, Wide::new(dir, 0.5 * (lo + hi))))
    }

    /// Splits off `a` and `ln b` and returns the next level.
    fn peel(&self) -> Result<(f64, f64, Level)> {
        let n = self.len();
        let ln_inv_mean = logsumexp(&self.x.iter().zip(&self.lw).map(|(x, lw)| lw - x.ln()).collect::<Vec<_>>());
        let a = (-ln_inv_mean).exp();
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::NonPositiveCoefficient { which: Entry::A, value: a });
        }
        let mut terms = Vec::with_capacity(n * (n - 1) / 2);
        for k in 1..n {
            for j in 0..k {
                terms.push(self.lw[j] + self.lw[k] + 2.0 * self.d[k][j].ln_abs() - self.x[j].ln() - self.x[k].ln());
            }
        }
        let ln_b = -ln_inv_mean + logsumexp(&terms);
        if !ln_b.is_finite() {
            return Err(Error::NonPositiveCoefficient { which: Entry::B, value: ln_b.exp() });
        }

        let mut zeros = Vec::with_capacity(n - 1);
        for j in 0..n - 1 {
            zeros.push(self.zero_in_gap(j)?);
        }
        let mut x = Vec::with_capacity(n - 1);
        let mut lw = Vec::with_capacity(n - 1);
        for &(anchor, o) in &zeros {
            let z = self.x[anchor] + o.to_f64();
            if !(z > 0.0) {
                return Err(Error::BracketFailure { lo: 0.0, hi: self.x[anchor] });
            }
            // Residue of the remainder: 1 / (b z |f'(z)|); b cancels on
            // normalization.
            let ln_fprime =
                logsumexp(&(0..n).map(|k| self.lw[k] - 2.0 * self.dist(anchor, k, o).ln_abs()).collect::<Vec<_>>());
            x.push(z);
            lw.push(-z.ln() - ln_fprime);
        }
        let lse = logsumexp(&lw);
        lw.iter_mut().for_each(|v| *v -= lse);

        let d: Vec<Vec<Wide>> = zeros
            .iter()
            .map(|&(ai, oi)| {
                zeros.iter().map(|&(am, om)| if ai == am { oi - om } else { self.d[ai][am] + oi - om }).collect()
            })
            .collect();
        if let Some(i) = (0..n - 2).find(|&i| d[i + 1][i].signum() <= 0.0) {
            return Err(Error::BracketFailure { lo: x[i], hi: x[i + 1] });
        }
        Ok((a, ln_b, Level { x, d, lw }))
    }
}

/// Inverse transform for log-weight spectral data of any dynamic range.
///
/// Same continued-fraction peeling as [`inverse_transform`], with residues,
/// pole differences and `b` kept in extended range.
pub fn inverse_transform_log(s: &LogSpectralData) -> Result<LogPencil> {
    let n = s.len();
    let lse = logsumexp(&s.log_w);
    let mut level = Level {
        x: s.lambda.clone(),
        d: s.lambda.iter().map(|&li| s.lambda.iter().map(|&lk| Wide::from_f64(li - lk)).collect()).collect(),
        lw: s.log_w.iter().map(|v| v - lse).collect(),
    };
    let mut a = Vec::with_capacity(n);
    let mut log_b = Vec::with_capacity(n.saturating_sub(1));
    while level.len() > 1 {
        let (an, ln_bn, next) = level.peel()?;
        a.push(an);
        log_b.push(ln_bn);
        level = next;
    }
    a.push(level.x[0]);
    Ok(LogPencil { a, log_b })
}

fn with_time(e: Error, t: f64) -> Error {
    match e {
        Error::DegenerateWeight { index, t: None } => Error::DegenerateWeight { index, t: Some(t) },
        other => other,
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidTimes(format!("time {t} is not finite")));
    }
    if let Some(w) = times.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidTimes(format!("times must increase strictly, got {} then {}", w[0], w[1])));
    }
    Ok(())
}

/// Samples the lattice at `times` by the spectral route.
///
/// The direct transform runs once; each time is then evolved and inverted on
/// its own, in parallel. Times whose smallest weight falls below
/// [`LOG_PATH_THRESHOLD`] are inverted in extended range.
pub fn solve_trajectory(p0: &BidiagonalPencil, f: &FlowSpec, times: &[f64]) -> Result<Trajectory> {
    check_times(times)?;
    let s0 = direct_transform(p0)?.to_log();
    let per_time: Vec<(BidiagonalPencil, Vec<f64>, LogSpectralData)> = times
        .par_iter()
        .map(|&t| {
            let ls = evolve_log_weights(&s0, f, t)?;
            let min_lw = ls.log_w.iter().copied().fold(f64::INFINITY, f64::min);
            let (pencil, log_b) = if min_lw >= LOG_PATH_THRESHOLD.ln() {
                let mut w = ls.weights();
                normalize_computed(&mut w)?;
                let sd = SpectralData::from_parts_unchecked(ls.lambda.clone(), w);
                let p = inverse_transform(&sd).map_err(|e| with_time(e, t))?;
                let log_b = p.b().iter().map(|b| b.ln()).collect();
                (p, log_b)
            } else {
                let lp = inverse_transform_log(&ls).map_err(|e| with_time(e, t))?;
                (lp.to_pencil(), lp.log_b)
            };
            Ok((pencil, log_b, ls))
        })
        .collect::<Result<_>>()?;

    let mut traj = Trajectory {
        times: times.to_vec(),
        samples: Vec::with_capacity(times.len()),
        log_b: Vec::with_capacity(times.len()),
        spectra: Some(Vec::with_capacity(times.len())),
    };
    for (p, lb, ls) in per_time {
        traj.samples.push(p);
        traj.log_b.push(lb);
        traj.spectra.as_mut().expect("set above").push(ls);
    }
    Ok(traj)
}

/// The increasing flow and direction equivalent to `(f, direction)`:
/// for decreasing `F` the weights at `t` under `F` equal those at `-t`
/// under `-F`.
fn increasing_form(f: &FlowSpec, direction: Direction) -> Result<(impl Fn(f64) -> f64 + '_, Direction)> {
    let sign = match f.require_monotone()? {
        Monotonicity::Increasing => 1.0,
        Monotonicity::Decreasing => -1.0,
    };
    let dir = if sign > 0.0 { direction } else { direction.flipped() };
    Ok((move |x: f64| sign * f.eval(x), dir))
}

/// Decay rate and prefactor of `b_n` as `t` tends to `direction`.
pub fn predict_b_rate(s0: &SpectralData, f: &FlowSpec, n: usize, direction: Direction) -> Result<RatePrediction> {
    let big_n = s0.len();
    if n < 1 || n + 1 > big_n {
        return Err(Error::IndexOutOfRange { index: n, max: big_n - 1 });
    }
    let (g, dir) = increasing_form(f, direction)?;
    let l = |i: usize| s0.lambda()[i - 1];
    let lw = |i: usize| s0.w()[i - 1].ln();
    let nf = n as f64;
    let (exponent, ln_prefactor) = match dir {
        Direction::PlusInfinity => {
            let num: f64 = (1..=n).map(|i| (l(n + 1) - l(i)).ln()).sum();
            let den: f64 = (1..n).map(|i| (l(n) - l(i)).ln()).sum();
            (g(l(n + 1)) - g(l(n)), lw(n + 1) - lw(n) + (nf - 1.0) * l(n).ln() - nf * l(n + 1).ln() + 2.0 * (num - den))
        }
        Direction::MinusInfinity => {
            let k = big_n - n;
            let num: f64 = (k + 1..=big_n).map(|i| (l(i) - l(k)).ln()).sum();
            let den: f64 = (k + 2..=big_n).map(|i| (l(i) - l(k + 1)).ln()).sum();
            (g(l(k + 1)) - g(l(k)), lw(k) - lw(k + 1) + (nf - 1.0) * l(k + 1).ln() - nf * l(k).ln() + 2.0 * (num - den))
        }
    };
    Ok(RatePrediction { n, exponent, prefactor: ln_prefactor.exp(), direction })
}

/// Limit of `a_n` as `t` tends to `direction`, with its correction coefficients.
pub fn predict_a_limit(s0: &SpectralData, f: &FlowSpec, n: usize, direction: Direction) -> Result<ALimit> {
    let big_n = s0.len();
    if n < 1 || n > big_n {
        return Err(Error::IndexOutOfRange { index: n, max: big_n });
    }
    let (_, dir) = increasing_form(f, direction)?;
    let l = |i: usize| s0.lambda()[i - 1];
    let (limit, c_plus, c_minus) = match dir {
        Direction::PlusInfinity => {
            let lim = l(n);
            let cp = if n < big_n { lim / (lim - l(n + 1)) } else { 0.0 };
            let cm = if n > 1 { -lim / (l(n - 1) - lim) } else { 0.0 };
            (lim, cp, cm)
        }
        Direction::MinusInfinity => {
            let lim = l(big_n - n + 1);
            let cp = if n < big_n { lim / (lim - l(big_n - n)) } else { 0.0 };
            let cm = if n > 1 { -lim / (l(big_n - n + 2) - lim) } else { 0.0 };
            (lim, cp, cm)
        }
    };
    Ok(ALimit { n, limit, c_plus, c_minus, direction })
}

/// `ln h(x)` for `h(x) = sqrt(1 + eps^2 e^x)`.
fn ln_h(x: f64, ln_eps: f64) -> f64 {
    let y = 2.0 * ln_eps + x;
    if y > 0.0 {
        0.5 * (y + (-y).exp().ln_1p())
    } else {
        0.5 * y.exp().ln_1p()
    }
}

/// The pencil of a Newtonian state:
///
/// ```text
/// a_n = h(q_{n-1} - q_n) e^{p_n} / h(q_n - q_{n+1})
/// b_n = eps^2 e^{q_n - q_{n+1} + p_n} h(q_{n-1} - q_n) / h(q_n - q_{n+1})
/// ```
///
/// with `h(x) = sqrt(1 + eps^2 e^x)` and both boundary factors equal to 1.
/// It evolves under `F(x) = x`.
pub fn newtonian_to_pencil(state: &NewtonianState) -> Result<BidiagonalPencil> {
    let (q, p) = (&state.q, &state.p);
    let n = q.len();
    let ln_eps = state.epsilon.ln();
    // lh[k] = ln h(q_k - q_{k+1}) for the 1-based gap k, with lh[0] = lh[n] = 0.
    let mut lh = vec![0.0; n + 1];
    for k in 1..n {
        let gap = q[k - 1] - q[k];
        if !gap.is_finite() {
            return Err(Error::Overflow(format!("q_{k} - q_{} is not finite", k + 1)));
        }
        lh[k] = ln_h(gap, ln_eps);
    }
    let finite = |v: f64, which: Entry, i: usize| -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow(format!("{which}_{i} = {v} is outside the f64 range")))
        }
    };
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n - 1);
    for i in 1..=n {
        a.push(finite((lh[i - 1] + p[i - 1] - lh[i]).exp(), Entry::A, i)?);
        if i < n {
            let ln_b = 2.0 * ln_eps + q[i - 1] - q[i] + p[i - 1] + lh[i - 1] - lh[i];
            b.push(finite(ln_b.exp(), Entry::B, i)?);
        }
    }
    BidiagonalPencil::new(a, b)
}

/// Asymptotic slopes of `q_{n+1} - q_n` under the Newtonian flow.
pub fn q_gap_slopes(s0: &SpectralData, direction: Direction) -> Vec<f64> {
    let l = s0.lambda();
    let gaps = l.windows(2).map(|w| w[1] - w[0]);
    match direction {
        Direction::PlusInfinity => gaps.collect(),
        Direction::MinusInfinity => gaps.rev().map(|g| -g).collect(),
    }
}
