//! Triangle-map laboratory.
//!
//! * [`mcf`]: the fast, slow, homogeneous and sliced triangle maps.
//! * [`cells`]: exact big-integer cylinder cells and periodic certification.
//! * [`combinatorics`]: the partial-fraction and signed multinomial-tree identities.
//! * [`measure`]: invariant densities, transfer operators, normalizing
//!   constants and Monte Carlo ergodicity experiments.

pub mod cells;
pub mod combinatorics;
pub mod error;
pub mod linalg;
pub mod mcf;
pub mod measure;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{NumberKind, Scalar};
