//! SONC and DSONC nonnegativity certificates for polynomials, and Lyapunov
//! stability certification of polynomial ODEs built on them.
//!
//! Every certificate comes with a witness that can be re-checked without the
//! conic solver that produced it.

// comparisons are written so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affine;
pub mod certificates;
pub mod conic;
pub mod error;
pub mod geometry;
pub mod lyapunov;
pub mod poly;

pub use affine::AffineForm;
pub use certificates::CertificateKind;
pub use error::{Error, Result};
pub use lyapunov::{LyapunovResult, Mode, Objective, SearchOptions, StabilityReport, Verdict};
pub use poly::{
    lie_derivative, lie_derivative_symbolic, parse_poly, DynSystem, Exponent, LinearFormPoly,
    SparsePoly, SupportSplit, Variables,
};
