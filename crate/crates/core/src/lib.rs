//! Exact-arithmetic construction and verification of volume-preserving
//! birational maps between toric Landau-Ginzburg models built from
//! different nef partitions, together with mutation-equivalence
//! certificates for the Laurent-polynomial mirrors they induce.
//!
//! Everything is computed over the rationals with arbitrary precision;
//! every verified identity is exact.

pub mod certificate;
pub mod engine;
pub mod error;
pub mod lattice;
pub mod laurent;
pub mod mirror;
pub mod modelfile;
pub mod pullback;
pub mod sequences;
pub mod toric;

pub use error::Error;
pub use laurent::{Coeff, ExpVec, LaurentPoly, RationalFn};
