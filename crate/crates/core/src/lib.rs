//! Symplectic classification of effective 3-forms on `R^6`.
//!
//! Basis convention: `e_1, e_2, e_3` are indices 1 to 3 and `f_1, f_2, f_3` are
//! indices 4 to 6, with `Omega = sum e_i* ^ f_i*`.

pub mod classify;
pub mod error;
pub mod exec;
pub mod invariants;
pub mod linalg;
pub mod mae;
pub mod multilinear;
pub mod normal_forms;
pub mod poly;
pub mod sampling;
pub mod scalar;
pub mod stabilizer;
pub mod symplectic;
pub mod witness;

pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::Mat;
pub use multilinear::{KForm, LinearMap, Vector};
pub use scalar::{Rational, Scalar};
