//! The recurrence polynomials `P_n(z) = det(z M_n - L_n)` (leading blocks)
//! and `Delta_n(z)` (trailing blocks), and zero isolation by interlacing.
//!
//! Nothing here forms polynomial coefficients; every value comes straight
//! from the three-term recurrences.

use std::ops::Index;

use crate::error::{Error, Result};
use crate::pencil::BidiagonalPencil;

/// Relative bracket width at which bisection stops.
pub const BISECTION_REL_WIDTH: f64 = 1e-14;
/// Hard cap on bisection steps.
pub const BISECTION_MAX_ITER: usize = 200;
const COLLAPSE_RATIO: f64 = 1e-6;

/// `values[n]` is the degree-`n` member of a recurrence family at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceSequence(Vec<f64>);

impl RecurrenceSequence {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Value of the highest-degree member.
    pub fn last(&self) -> f64 {
        *self.0.last().expect("sequence always holds the degree-0 member")
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for RecurrenceSequence {
    type Output = f64;

    fn index(&self, n: usize) -> &f64 {
        &self.0[n]
    }
}

/// `P_0..P_N` at `z`, from `P_n = (z - a_n) P_{n-1} - b_{n-1} z P_{n-2}`.
pub fn eval_p(p: &BidiagonalPencil, z: f64) -> RecurrenceSequence {
    eval_p_upto(p, p.len(), z)
}

/// `P_0..P_degree` at `z`.
pub fn eval_p_upto(p: &BidiagonalPencil, degree: usize, z: f64) -> RecurrenceSequence {
    let mut out = Vec::with_capacity(degree + 1);
    out.push(1.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 1..=degree {
        let next = (z - p.a()[n - 1]) * cur - p.b_ext(n - 1) * z * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    RecurrenceSequence(out)
}

/// `P_degree(z)` and its derivative.
pub fn eval_p_with_derivative(p: &BidiagonalPencil, degree: usize, z: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    for n in 1..=degree {
        let (a, b) = (p.a()[n - 1], p.b_ext(n - 1));
        let next = (z - a) * cur - b * z * prev;
        let dnext = cur + (z - a) * dcur - b * prev - b * z * dprev;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    (cur, dcur)
}

/// `Delta_0..Delta_N` at `z`, built from the bottom-right corner:
/// `Delta_n = (z - a_{N-n+1}) Delta_{n-1} - b_{N-n+1} z Delta_{n-2}`.
pub fn eval_delta(p: &BidiagonalPencil, z: f64) -> RecurrenceSequence {
    eval_delta_with_derivative(p, z).0
}

/// `Delta_n(z)` together with `Delta_n'(z)` for every `n`.
pub fn eval_delta_with_derivative(p: &BidiagonalPencil, z: f64) -> (RecurrenceSequence, RecurrenceSequence) {
    let big_n = p.len();
    let mut vals = Vec::with_capacity(big_n + 1);
    let mut ders = Vec::with_capacity(big_n + 1);
    vals.push(1.0);
    ders.push(0.0);
    let (mut prev, mut cur) = (0.0, 1.0);
    let (mut dprev, mut dcur) = (0.0, 0.0);
    for n in 1..=big_n {
        let a = p.a()[big_n - n];
        // b_{N-n+1}; the n = 1 step multiplies Delta_{-1} = 0 by b_N = 0.
        let b = p.b_ext(big_n - n + 1);
        let next = (z - a) * cur - b * z * prev;
        let dnext = cur + (z - a) * dcur - b * prev - b * z * dprev;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
        vals.push(cur);
        ders.push(dcur);
    }
    (RecurrenceSequence(vals), RecurrenceSequence(ders))
}

#[inline]
fn sign_of(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Bisects `f` on `(lo, hi)` assuming sign `left_sign` just right of `lo`.
fn bisect_unchecked(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, left_sign: f64) -> (f64, f64) {
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_REL_WIDTH * lo.abs().max(hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return (mid, mid);
        }
        if sign_of(fm) == left_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Zeros of a monic degree-`n` member of an interlacing family, given the
/// `n - 1` zeros of its predecessor.
///
/// The brackets are `(0, z_1)`, `(z_j, z_{j+1})` and `(z_{n-1}, U)`, where
/// `U` doubles from `upper_hint` until `evaluate(U) > 0`. Each zero is bisected
/// to relative width `1e-14` and, when `derivative` is given, receives one
/// Newton step that is kept only if it stays inside the final bracket.
pub fn zeros_interlaced(
    evaluate: &dyn Fn(f64) -> f64,
    derivative: Option<&dyn Fn(f64) -> f64>,
    prev_zeros: &[f64],
    upper_hint: f64,
) -> Result<Vec<f64>> {
    let n = prev_zeros.len() + 1;
    let mut upper = upper_hint.max(prev_zeros.last().copied().unwrap_or(0.0)).max(f64::MIN_POSITIVE);
    let mut doublings = 0;
    while !(evaluate(upper) > 0.0) || prev_zeros.last().is_some_and(|&z| upper <= z) {
        upper *= 2.0;
        doublings += 1;
        if doublings > 2000 || !upper.is_finite() {
            return Err(Error::BracketFailure { lo: upper_hint, hi: upper });
        }
    }

    let mut zeros = Vec::with_capacity(n);
    for j in 0..n {
        let lo = if j == 0 { 0.0 } else { prev_zeros[j - 1] };
        let hi = if j + 1 == n { upper } else { prev_zeros[j] };
        // The monic polynomial is positive right of its largest zero and
        // alternates sign leftwards.
        let left_sign = if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        // Zeros of consecutive levels can agree to below one ulp, so the sign
        // at an interior endpoint is not trusted; only 0 and U are checked.
        if j == 0 && sign_of(evaluate(0.0)) == -left_sign {
            return Err(Error::BracketFailure { lo, hi });
        }
        let (blo, bhi) = bisect_unchecked(evaluate, lo, hi, left_sign);
        // Collapsing onto an interior endpoint is only plausible when the
        // function is negligible there compared to the bracket interior.
        let collapsed = (j > 0 && blo == lo) || (j + 1 < n && bhi == hi);
        if collapsed {
            let at = if blo == lo { lo } else { hi };
            if !(evaluate(at).abs() <= COLLAPSE_RATIO * evaluate(0.5 * (lo + hi)).abs()) {
                return Err(Error::BracketFailure { lo, hi });
            }
        }
        let mut root = 0.5 * (blo + bhi);
        if let Some(df) = derivative {
            let d = df(root);
            if d != 0.0 && d.is_finite() {
                let polished = root - evaluate(root) / d;
                if polished >= blo && polished <= bhi {
                    root = polished;
                }
            }
        }
        zeros.push(root);
    }
    if let Some(k) = zeros.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::BracketFailure { lo: zeros[k], hi: zeros[k + 1] });
    }
    Ok(zeros)
}

/// Zeros of `P_n` for every `n = 1..=N`, by cascading [`zeros_interlaced`].
pub fn zero_cascade(p: &BidiagonalPencil) -> Result<Vec<Vec<f64>>> {
    let upper_hint = p.trace() + 1.0;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(p.len());
    let mut prev: Vec<f64> = Vec::new();
    for degree in 1..=p.len() {
        let zeros = if degree == 1 {
            vec![p.a()[0]]
        } else {
            let f = |z: f64| eval_p_with_derivative(p, degree, z).0;
            let df = |z: f64| eval_p_with_derivative(p, degree, z).1;
            zeros_interlaced(&f, Some(&df), &prev, upper_hint)?
        };
        out.push(zeros.clone());
        prev = zeros;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_pencil() -> BidiagonalPencil {
        BidiagonalPencil::new(vec![3.0, 12.0, 16.0, 7.0, 5.0], vec![1.0, 6.0, 11.0, 5.0]).unwrap()
    }

    fn small() -> BidiagonalPencil {
        BidiagonalPencil::new(vec![1.0, 2.0], vec![1.0]).unwrap()
    }

    #[test]
    fn p_by_hand() {
        assert_eq!(eval_p(&small(), 0.0).values(), &[1.0, -1.0, 2.0]);
        // P_2(z) = z^2 - 4z + 2
        for z in [-1.5, 0.3, 2.0, 7.0] {
            assert!((eval_p(&small(), z)[2] - (z * z - 4.0 * z + 2.0)).abs() < 1e-12);
        }
        assert_eq!(eval_p(&example_pencil(), 3.7)[0], 1.0);
    }

    #[test]
    fn p_vanishes_at_published_eigenvalue() {
        let p = example_pencil();
        let z = 1.9812757881;
        let (v, d) = eval_p_with_derivative(&p, 5, z);
        // The published value carries 10 decimals; the residual is within
        // the derivative times that rounding.
        assert!(v.abs() < 1e-6 * d.abs().max(1.0), "{v} {d}");
    }

    #[test]
    fn delta_by_hand() {
        let s = eval_delta(&small(), 3.0);
        assert_eq!(s.values(), &[1.0, 1.0, -1.0]);
        assert_eq!(eval_delta(&example_pencil(), 0.2)[0], 1.0);
    }

    #[test]
    fn delta_matches_p_at_full_degree() {
        let p = example_pencil();
        for z in [0.5, 2.0, 7.5, 13.0, 55.0] {
            let (dp, dd) = (eval_p(&p, z).last(), eval_delta(&p, z).last());
            assert!((dp - dd).abs() <= 1e-12 * dp.abs().max(1.0), "{z}: {dp} vs {dd}");
        }
    }

    #[test]
    fn delta_derivative() {
        let one = BidiagonalPencil::new(vec![5.0], vec![]).unwrap();
        for z in [-3.0, 0.0, 9.0] {
            let (v, d) = eval_delta_with_derivative(&one, z);
            assert_eq!(v[1], z - 5.0);
            assert_eq!(d[1], 1.0);
        }
        let (_, d) = eval_delta_with_derivative(&small(), 2.0);
        assert_eq!(d[2], 0.0);

        // Central differences.
        let p = example_pencil();
        let (z, h) = (10.0, 1e-6);
        let (_, d) = eval_delta_with_derivative(&p, z);
        let (up, dn) = (eval_delta(&p, z + h), eval_delta(&p, z - h));
        for n in 1..=p.len() {
            let fd = (up[n] - dn[n]) / (2.0 * h);
            assert!((fd - d[n]).abs() <= 1e-5 * d[n].abs(), "n={n}: {fd} vs {}", d[n]);
        }
    }

    #[test]
    fn quadratic_zeros() {
        let p = small();
        let f = |z: f64| eval_p(&p, z)[2];
        let z = zeros_interlaced(&f, None, &[1.0], 5.0).unwrap();
        assert!((z[0] - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((z[1] - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn first_zero_is_a1() {
        assert_eq!(zero_cascade(&example_pencil()).unwrap()[0], vec![3.0]);
    }

    #[test]
    fn cascade_reproduces_published_table() {
        let published = [1.9812757881, 2.6941860907, 6.6927423653, 13.8305993379, 40.8011964181];
        let zeros = zero_cascade(&example_pencil()).unwrap();
        for (z, l) in zeros[4].iter().zip(published) {
            assert!((z - l).abs() < 1e-8, "{z} vs {l}");
        }
        let sum: f64 = zeros[4].iter().sum();
        let prod: f64 = zeros[4].iter().product();
        assert!((sum - 66.0).abs() < 66.0 * 1e-10);
        assert!((prod - 20160.0).abs() < 20160.0 * 1e-10);
    }

    #[test]
    fn upper_bracket_doubles() {
        // A hint below the largest zero still brackets it.
        let p = small();
        let f = |z: f64| eval_p(&p, z)[2];
        let z = zeros_interlaced(&f, None, &[1.0], 0.01).unwrap();
        assert!((z[1] - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        // z^2 + 1 has no real zeros.
        let f = |z: f64| z * z + 1.0;
        assert!(matches!(zeros_interlaced(&f, None, &[1.0], 4.0), Err(Error::BracketFailure { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn pencil_strategy() -> impl Strategy<Value = BidiagonalPencil> {
            (1usize..=12).prop_flat_map(|n| {
                (prop::collection::vec(-1.0f64..1.0, n), prop::collection::vec(-1.0f64..1.0, n - 1)).prop_map(
                    |(a, b)| {
                        BidiagonalPencil::new(
                            a.into_iter().map(|x| 10f64.powf(x)).collect(),
                            b.into_iter().map(|x| 10f64.powf(x)).collect(),
                        )
                        .unwrap()
                    },
                )
            })
        }

        proptest! {
            #[test]
            fn interlacing(p in pencil_strategy()) {
                let zeros = zero_cascade(&p).unwrap();
                for n in 1..zeros.len() {
                    let (cur, prev) = (&zeros[n], &zeros[n - 1]);
                    prop_assert!(cur[0] > 0.0);
                    // Non-strict: neighbouring levels may share a zero to
                    // working precision.
                    for j in 0..prev.len() {
                        prop_assert!(cur[j] <= prev[j] && prev[j] <= cur[j + 1]);
                        prop_assert!(cur[j] < cur[j + 1]);
                    }
                }
            }

            #[test]
            fn trace_and_determinant(p in pencil_strategy()) {
                let zeros = zero_cascade(&p).unwrap().pop().unwrap();
                let sum: f64 = zeros.iter().sum();
                let prod: f64 = zeros.iter().product();
                let det: f64 = p.a().iter().product();
                prop_assert!((sum - p.trace()).abs() <= 1e-10 * p.trace());
                prop_assert!((prod - det).abs() <= 1e-10 * det);
            }

            #[test]
            fn delta_equals_p(p in pencil_strategy(), z in 0.01f64..100.0) {
                let (dp, dd) = (eval_p(&p, z).last(), eval_delta(&p, z).last());
                // Relative to the magnitude the recurrence sums carry, which
                // is what bounds the rounding near a zero.
                let (mut prev, mut cur) = (0.0, 1.0f64);
                for n in 1..=p.len() {
                    let next = (z + p.a()[n - 1]) * cur + p.b_ext(n - 1) * z * prev;
                    prev = cur;
                    cur = next;
                }
                prop_assert!((dp - dd).abs() <= 1e-12 * cur, "{} vs {}", dp, dd);
            }
        }
    }
}
