//! Finite unipotent supergroup schemes, materialized as explicit finite-dimensional
//! graded Hopf algebras over small finite fields of odd characteristic.
//!
//! - [`linalg`]: arithmetic in F_{p^e} and dense row reduction.
//! - [`witt`]: Witt structure polynomials and truncated Witt vector arithmetic.
//! - [`dieudonne`]: p-killed Dieudonné modules and their classification.
//! - [`superalg`]: the catalog of group algebras with coproducts and Hopf checks.
//! - [`homology`]: modules, projectivity, minimal resolutions, Ext and Yoneda products.
//! - [`steenrod`]: bigraded-commutative cohomology rings with Steenrod operations.
//! - [`catalog`]: the textual algebra descriptors used by the command line.

pub mod linalg;
pub mod witt;
pub mod dieudonne;
pub mod superalg;
pub mod homology;
pub mod steenrod;
