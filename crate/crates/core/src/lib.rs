//! Equivariant constructible sheaves on cocompact simplicial complexes and
//! their L2 cohomology.
//!
//! The crate computes von Neumann Betti numbers of finite group ring
//! complexes, checks the index identity against the quotient Euler
//! characteristic, builds combinatorial dual complexes, and probes spectral
//! density near zero.

// Index loops are kept where rows, columns, and group elements co-index
// several structures at once; iterator forms obscure the matrix arithmetic.
#![allow(clippy::needless_range_loop)]

pub mod chain;
pub mod complex;
pub mod duality;
pub mod error;
pub mod group;
pub mod group_ring;
pub mod json;
pub mod l2;
pub mod laurent;
pub mod vn;
pub mod qmat;
pub mod scalar;
pub mod sheaf;

pub use error::{Error, Result};
