//! Antilinear EPR maps of bipartite vectors, the imperfect teleportation
//! channels they generate, and finite-dimensional modular theory.
//!
//! Operators are dense [`nalgebra`] matrices over `Complex64`. An antilinear
//! map is stored as the matrix `M` with `t(v) = M conj(v)`; see [`antilinear`].

pub mod antilinear;
pub mod bipartite;
pub mod error;
pub mod io;
pub mod matcore;
pub mod modular;
pub mod random;
pub mod teleport;
pub mod verify;

pub use antilinear::{AntilinearMap, Operator};
pub use bipartite::BipartiteVector;
pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, ComplexVector, Subsystem};
