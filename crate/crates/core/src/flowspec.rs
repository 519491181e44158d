//! The flow function `F` that selects a member of the generalized lattice hierarchy.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowSpec {
    /// `F(x) = 1/x`, the classical relativistic lattice.
    Reciprocal,
    /// `F(x) = x`, the second classical form.
    Identity,
    /// `F(x) = x^p` with `p != 0`.
    Power(f64),
    /// `F(x) = ln x`.
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// Which end of the time axis an asymptotic statement refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    PlusInfinity,
    MinusInfinity,
}

impl Direction {
    pub fn flipped(self) -> Self {
        match self {
            Direction::PlusInfinity => Direction::MinusInfinity,
            Direction::MinusInfinity => Direction::PlusInfinity,
        }
    }
}

impl FlowSpec {
    pub fn power(p: f64) -> Result<Self> {
        if p == 0.0 || !p.is_finite() {
            return Err(Error::InvalidFlow(format!("power exponent must be finite and nonzero, got {p}")));
        }
        Ok(FlowSpec::Power(p))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            FlowSpec::Reciprocal => 1.0 / x,
            FlowSpec::Identity => x,
            FlowSpec::Power(p) => x.powf(p),
            FlowSpec::Log => x.ln(),
        }
    }

    /// Monotonicity on the positive half-line, or `None` for a constant function.
    pub fn monotonicity(&self) -> Option<Monotonicity> {
        match *self {
            FlowSpec::Reciprocal => Some(Monotonicity::Decreasing),
            FlowSpec::Identity | FlowSpec::Log => Some(Monotonicity::Increasing),
            FlowSpec::Power(p) if p > 0.0 => Some(Monotonicity::Increasing),
            FlowSpec::Power(p) if p < 0.0 => Some(Monotonicity::Decreasing),
            FlowSpec::Power(_) => None,
        }
    }

    pub(crate) fn require_monotone(&self) -> Result<Monotonicity> {
        self.monotonicity().ok_or_else(|| Error::NonMonotoneFlow(self.to_string()))
    }
}

impl fmt::Display for FlowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowSpec::Reciprocal => f.write_str("reciprocal"),
            FlowSpec::Identity => f.write_str("identity"),
            FlowSpec::Power(p) => write!(f, "power:{p}"),
            FlowSpec::Log => f.write_str("log"),
        }
    }
}

impl FromStr for FlowSpec {
    type Err = Error;

    /// Accepts `reciprocal`, `identity`, `log` and `power:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "reciprocal" => Ok(FlowSpec::Reciprocal),
            "identity" => Ok(FlowSpec::Identity),
            "log" => Ok(FlowSpec::Log),
            other => match other.strip_prefix("power:") {
                Some(p) => {
                    let p: f64 =
                        p.trim().parse().map_err(|_| Error::InvalidFlow(format!("bad power exponent in {other:?}")))?;
                    FlowSpec::power(p)
                }
                None => Err(Error::InvalidFlow(format!("unknown flow {other:?}"))),
            },
        }
    }
}
