//! Exact-arithmetic verification workbench for twisted trace identities on
//! finite sigma-modules and their number-theoretic instantiations.
//!
//! The crate is organized in layers:
//! - [`matrix`], [`group`], [`cyclotomic`], [`character`]: exact linear
//!   algebra over Z, finitely generated abelian groups in Smith normal form,
//!   and character values in Q[x]/Phi_e.
//! - [`sigma`]: finite sigma-modules and the twisted trace formula — kernel
//!   trace, spectral and geometric sides, Hilbert-90 checks, the sharp/flat
//!   identities, kappa-twist sums, the crucial index ratio and the exterior
//!   algebra constant.
//! - [`matching`]: factorized test functions, local orbital sums, and the
//!   construction of the matched base-field function.
//! - [`local`]: p-adic splitting types, Hilbert symbols, local norm groups at
//!   finite precision, Frobenius lifts.
//! - [`global`]: quadratic and cyclic cubic fields over Q, ray-class models,
//!   global norm indices, the Hasse-norm oracle, and the bridge that builds
//!   arithmetic sigma-modules.
//!
//! All arithmetic is exact; there is no floating point and no tolerance
//! policy anywhere.

pub mod character;
pub mod cyclotomic;
pub mod fixtures;
pub mod global;
pub mod group;
pub mod local;
pub mod matching;
pub mod matrix;
pub mod sigma;

pub use character::Character;
pub use cyclotomic::CyclotomicValue;
pub use group::{FgAbelianGroup, GroupElement, GroupHom, Index};
pub use matrix::IntMatrix;
