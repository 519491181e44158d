//! Spectral solver for the finite generalized relativistic Toda lattice.
//!
//! The lattice state is a pair of bidiagonal matrices `(L, M)`. Its
//! generalized eigenvalues are conserved by every flow of the hierarchy and
//! the associated weights evolve in closed form, so the state at any time is
//! recovered by
//!
//! 1. the direct transform ([`direct::direct_transform`]),
//! 2. closed-form weight evolution ([`flow::evolve_weights`]),
//! 3. the inverse transform by continued-fraction peeling
//!    ([`inverse::inverse_transform`]).
//!
//! [`ode`] integrates the lattice equations directly and serves as an
//! independent check on the spectral route.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dense;
pub mod direct;
pub mod error;
pub mod flow;
pub mod flowspec;
pub mod inverse;
pub mod ode;
pub mod pencil;
pub mod poly;
pub mod spectral;
pub mod trajectory;
mod wide;

pub use error::{Entry, Error, Result};
pub use flowspec::{Direction, FlowSpec, Monotonicity};
pub use pencil::{assemble_dense, validate_pencil, BidiagonalPencil, DensePencil};
pub use spectral::{LogSpectralData, PoleResidue, SpectralData, WeylFunction};
pub use trajectory::Trajectory;

/// The worked example: initial data of a five-site lattice.
pub mod example {
    pub const A: [f64; 5] = [3.0, 12.0, 16.0, 7.0, 5.0];
    pub const B: [f64; 4] = [1.0, 6.0, 11.0, 5.0];
    /// Reference eigenvalues, rounded to ten decimals.
    pub const LAMBDA: [f64; 5] = [1.9812757881, 2.6941860907, 6.6927423653, 13.8305993379, 40.8011964181];
    /// Reference weights at `t = 0`, rounded to ten decimals.
    pub const W: [f64; 5] = [0.0097186754, 0.8409233539, 0.0757415291, 0.0665694128, 0.0070470286];

    pub fn pencil() -> crate::BidiagonalPencil {
        crate::BidiagonalPencil::new(A.to_vec(), B.to_vec()).expect("example data is valid")
    }

    pub fn spectral_data() -> crate::SpectralData {
        crate::SpectralData::new(LAMBDA.to_vec(), W.to_vec()).expect("example data is valid")
    }
}
