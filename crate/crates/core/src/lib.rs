//! Exact computation over the subspace lattice of finite vector spaces
//! GF(q)^n: canonical subspaces and their lattice operations, Gaussian
//! binomial coefficients with exact cover-free bounds, family predicates
//! (cover-free, intersecting, q-Steiner), extremal construction and
//! classification, exhaustive maximum search by branch and bound, and a
//! brute-force audit engine for the supporting lemmas at desk scale.
//!
//! Everything that feeds a certificate is computed in exact integer or
//! rational arithmetic; floating point appears only in the real-argument
//! Gaussian binomial and its inversion, always with explicit tolerances.

pub mod audit;
pub mod error;
pub mod family;
pub mod format;
pub mod gfq;
pub mod mask;
pub mod qbinom;
pub mod search;
pub mod subspace;
pub mod util;

pub use error::{Error, Result};
pub use family::{
    classify_extremal, construct_pencil, psi_matching, random_cover_free, CoverWitness,
    ExtremalClassification, Family,
};
pub use gfq::{make_field, FieldSpec};
pub use qbinom::{cf_bound, invert_qbinom, qbinom_int, qbinom_real, CFBound};
pub use subspace::{
    enumerate_avoiding, enumerate_k, fiber, lex_complement, partition_avoiding, Ambient, Subspace,
};
