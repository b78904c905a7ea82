//! Exact computations for Cubist subsets of `Z^r` and their graded algebras:
//! decomposition and Cartan matrices, identity checks, a path-algebra
//! dimension oracle, flips, weight-2 block combinatorics and SVG rendering.

pub mod blocks;
pub mod cubist;
pub mod flips;
pub mod laurent;
pub mod linalg;
pub mod oracle;
pub mod qmatrix;
pub mod render;

pub use cubist::{BaseIdeal, CubistError, CubistSet, Facet, LatticePoint, Reach, Window};
pub use laurent::{geometric_power, quantum_integer, LaurentError, LaurentPoly, TruncSeries};
