//! SL(2,C) trace calculus, matrix reconstruction from trace coordinates, and the
//! catalog of irreducible character-variety components of the knot 8_18.
//!
//! The algebraic layers (`numfield`, `mat2`, `tracealg`) are generic over the
//! real scalar through [`numfield::Real`]; the aliases below fix it to `f64`.

pub mod catalog;
pub mod error;
pub mod mat2;
pub mod numfield;
pub mod random;
pub mod reconstruct;
pub mod tracealg;
pub mod wirtinger;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
pub type Mat2f64 = mat2::Mat2<f64>;
pub type GtElementf64 = mat2::GtElement<f64>;
pub type TracelessMat2f64 = mat2::TracelessMat2<f64>;
pub type TraceVectorf64 = tracealg::TraceVector<f64>;
pub type SCoordsf64 = tracealg::SCoords<f64>;
pub type Residualf64 = numfield::Residual<f64>;
pub type Polyf64 = numfield::PolyLE4<f64>;

pub type Mat2f32 = mat2::Mat2<f32>;
pub type TraceVectorf32 = tracealg::TraceVector<f32>;
