//! Poisson-Lie structures on the nine real three-dimensional Lie groups.
//!
//! The crate encodes, for each group: the Lie algebra and a faithful matrix
//! representation, the coordinate chart and group law, every multiparametric
//! Poisson-Lie bracket family with its Casimir functions, the classical
//! r-matrices and coboundary identifications, and the classification table of
//! inequivalent structures.  Every identity these objects satisfy
//! (multiplicativity, Jacobi, Casimir invariance, cocycle and co-Jacobi
//! conditions, Yang-Baxter, Sklyanin matching) is verified numerically with
//! exact forward-mode derivatives.

pub mod algebra;
pub mod bialgebra;
pub mod classify;
pub mod derive;
pub mod group;
pub mod jet;
pub mod poisson;
pub mod report;

pub use algebra::GroupId;
pub use group::GroupSpec;
