//! Quantum 6j-symbols and Turaev–Viro invariants at `q = exp(2πi/r)`, with
//! the hyperbolic-volume functions their growth rates are compared against.

pub mod asympt;
pub mod error;
pub mod fsl;
pub mod lobachevsky;
pub mod qarith;
pub mod sixj;
pub mod tetvol;
pub mod tvstate;

pub use error::{Error, Result};
