//! Globally conservative fourth-order compact finite-difference schemes.
//!
//! The crate builds the boundary closures of the P1/P2/P3 families, checks
//! their order and conservation identities, analyses resolution and
//! stability, searches the free parameters with differential evolution and
//! runs the scheme on advection and Euler benchmarks.

pub mod error;
pub mod analysis;
pub mod grid;
pub mod linalg;
pub mod operator;
pub mod optimizer;
pub mod pde;
pub mod scheme;
pub mod schemefile;

pub use error::{Error, ErrorComponent, Result};
pub use grid::Grid;
pub use operator::{build_operator, DerivativeOperator, PeriodicOperator};
pub use scheme::{assemble_matrices, bundled, close_scheme, SchemeDefinition, SchemeId, SchemeMatrices};
pub use schemefile::{Provenance, SchemeFile};
