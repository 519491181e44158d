//! Signed reals stored as `sign * exp(ln)`, for quantities far outside the
//! `f64` exponent range.
//!
//! Relative precision is that of `ln` as an absolute quantity, i.e. about
//! `1e-16 * |ln|`, which stays near `1e-13` for magnitudes like `e^{-2000}`.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Wide {
    sign: f64,
    ln: f64,
}

impl Wide {
    pub const ZERO: Wide = Wide { sign: 0.0, ln: f64::NEG_INFINITY };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Wide { sign: x.signum(), ln: x.abs().ln() }
        }
    }

    /// `sign * exp(ln)` for `sign` in `{-1, 1}`.
    pub fn new(sign: f64, ln: f64) -> Self {
        Wide { sign, ln }
    }

    /// `exp(ln)` without evaluating it.
    pub fn exp_of(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Wide { sign: 1.0, ln }
        }
    }

    pub fn signum(self) -> f64 {
        self.sign
    }

    /// `ln |x|`; `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        self.ln
    }

    pub fn abs(self) -> Self {
        if self.sign == 0.0 {
            self
        } else {
            Wide { sign: 1.0, ln: self.ln }
        }
    }

    pub fn to_f64(self) -> f64 {
        self.sign * self.ln.exp()
    }

    pub fn recip(self) -> Self {
        Wide { sign: self.sign, ln: -self.ln }
    }

    pub fn sum<I: IntoIterator<Item = Wide>>(it: I) -> Self {
        it.into_iter().fold(Self::ZERO, |acc, x| acc + x)
    }
}

impl Add for Wide {
    type Output = Wide;

    fn add(self, rhs: Wide) -> Wide {
        if self.sign == 0.0 {
            return rhs;
        }
        if rhs.sign == 0.0 {
            return self;
        }
        let (big, small) = if self.ln >= rhs.ln { (self, rhs) } else { (rhs, self) };
        let r = (small.ln - big.ln).exp();
        if big.sign == small.sign {
            Wide { sign: big.sign, ln: big.ln + r.ln_1p() }
        } else if r == 1.0 {
            Self::ZERO
        } else {
            Wide { sign: big.sign, ln: big.ln + (-r).ln_1p() }
        }
    }
}

impl Neg for Wide {
    type Output = Wide;

    fn neg(self) -> Wide {
        Wide { sign: -self.sign, ln: self.ln }
    }
}

impl Sub for Wide {
    type Output = Wide;

    fn sub(self, rhs: Wide) -> Wide {
        self + (-rhs)
    }
}

impl Mul for Wide {
    type Output = Wide;

    fn mul(self, rhs: Wide) -> Wide {
        if self.sign == 0.0 || rhs.sign == 0.0 {
            return Self::ZERO;
        }
        Wide { sign: self.sign * rhs.sign, ln: self.ln + rhs.ln }
    }
}

impl Div for Wide {
    type Output = Wide;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Wide) -> Wide {
        self * rhs.recip()
    }
}

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Wide) -> Option<Ordering> {
        let d = *self - *other;
        d.sign.partial_cmp(&0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: Wide, y: f64) -> bool {
        (x.to_f64() - y).abs() <= 1e-14 * y.abs().max(1e-300)
    }

    #[test]
    fn arithmetic_matches_f64() {
        let (a, b) = (Wide::from_f64(3.5), Wide::from_f64(-1.25));
        assert!(close(a + b, 2.25));
        assert!(close(a - b, 4.75));
        assert!(close(b - a, -4.75));
        assert!(close(a * b, -4.375));
        assert!(close(a / b, -2.8));
        assert_eq!((a - a).signum(), 0.0);
        assert!(close(Wide::ZERO + b, -1.25));
        assert!(a > b && b < Wide::ZERO);
    }

    #[test]
    fn survives_beyond_f64_range() {
        let tiny = Wide::exp_of(-2000.0);
        let s = tiny + tiny;
        assert!((s.ln_abs() - (-2000.0 + 2f64.ln())).abs() < 1e-12);
        // Through `ln = -2000` only about `2000 * eps` of relative precision remains.
        let q = (tiny * Wide::from_f64(3.0)) / tiny;
        assert!((q.to_f64() - 3.0).abs() < 1e-12);
        assert_eq!(tiny.to_f64(), 0.0);
        assert!(tiny > -tiny && Wide::new(-1.0, -3000.0) < tiny);
    }
}
