//! Exact, translation-invariant integration on a valued field whose residue
//! field is a non-archimedean local field.
//!
//! The engine realises the full pipeline: exact arithmetic in the value
//! field C(Gamma) ([`gamma`]), in the residue local field K ([`local`]) and
//! in the iterated Laurent series field F ([`valued`]); step functions on
//! K^n with exact Haar integration ([`stepfn`]); lifted functions on F^n
//! with the repeated-integral (Fubini) engine and its closed form
//! ([`lift`]); and matrix-level integration on M_N(F) and GL_N(F)
//! ([`glfn`], [`matrix`]).
//!
//! All values are immutable after construction; everything is `Send + Sync`
//! and deterministic. There is no floating point anywhere.

pub mod error;
pub mod gamma;
pub mod glfn;
pub mod lift;
pub mod local;
pub mod matrix;
pub mod oracle;
pub mod qi;
pub mod sample;
pub mod stepfn;
pub mod valued;

pub use error::{Error, Result};
