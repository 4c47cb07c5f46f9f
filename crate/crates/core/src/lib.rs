//! Finite-blocklength information spectra of quantum states.
//!
//! The crate is generic over the real scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`.

pub mod channel;
pub mod engine;
pub mod error;
pub mod io;
pub mod operator;
pub mod rates;
pub mod scalar;

#[cfg(test)]
mod oracle;

pub use channel::{KrausChannel, Unitality};
pub use error::{Error, Result};
pub use operator::{
    partial_trace, positive_part_trace, purify, spectral_projector, tensor_product, Relation,
    SubsystemShape,
};
pub use scalar::Real;

pub type Hermitian = operator::HermitianOperator<f64>;
pub type Positive = operator::PositiveOperator<f64>;
pub type Density = operator::DensityMatrix<f64>;
pub type Matrix = operator::ComplexMatrix<f64>;
pub type Channel = channel::KrausChannel<f64>;
