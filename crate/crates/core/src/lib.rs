//! Nearest points on real algebraic matrix groups and their Euclidean
//! distance degrees.
//!
//! Given a data matrix `u`, the crate finds the element `x` of a matrix group
//! `G` minimising `||u - x||^2` in the Frobenius norm, and enumerates every
//! real critical point of that squared distance on `G`:
//!
//! - [`orthonear`]: orthogonal, special orthogonal and unitary groups through
//!   the polar decomposition, with all `2^n` sign choices.
//! - [`slnear`]: `SL^±` and `SL` by eliminating the eigenvalues of `x^t x`
//!   with a chain of resultants ([`polyres`]).
//! - [`torused`]: compact tori, where the count is bounded by the normalised
//!   volume of the weight polytope.
//! - [`critsearch`]: group-generic critical equations and a seeded multistart
//!   Newton census, used as an oracle and for symplectic groups.
//!
//! [`matcore`] holds the dense matrix substrate shared by all of the above.

pub mod critsearch;
pub mod error;
pub mod matcore;
pub mod orthonear;
pub mod polyres;
pub mod slnear;
pub mod torused;

pub use error::{Error, Result};
pub use matcore::{CMatrix, EigenDecomposition, Matrix};
