//! Coherent-state (Berezin–Toeplitz) quantization of measure spaces.
//!
//! A measure space `(X, μ)` is represented by a weighted point set
//! ([`spaces`]). Choosing an orthonormal family `{φ_n}` in `L²(X, μ)`
//! ([`frames`]) fixes the coherent states
//! `|x⟩ = N(x)^{-1/2} Σ_n φ_n(x) |n⟩` ([`coherent`]) and the quantization map
//! `f ↦ A_f = ∫ f(x) |x⟩⟨x| N(x) μ(dx)` ([`quantize`]). The Fock–Bargmann
//! ladder operators are recovered in [`canonical`], and [`cli`] builds the
//! reports emitted by the command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod canonical;
pub mod cli;
pub mod coherent;
mod error;
pub mod frames;
pub mod linalg;
pub mod quantize;
pub mod spaces;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used for frames and operators.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;
