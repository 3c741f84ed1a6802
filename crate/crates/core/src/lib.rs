//! Exact R-matrix calculus over truncated power series in `h`.
//!
//! The crate builds spectral-parameter R-matrices (rational and
//! trigonometric), their quantum determinants and normalizing functions, the
//! comodule R-matrices and braidings of tensor words of shifted basic
//! comodules, and the quantum Knizhnik–Zamolodchikov difference connection.
//! Every identity is checked exactly in `Q(w)[[h]] / (h^{D+1})`.

pub mod check;
pub mod error;
pub mod field;
pub mod poly;
pub mod qdet;
pub mod qkz;
pub mod ratfn;
pub mod reps;
pub mod rmatrix;
pub mod series;
pub mod tensor;
pub mod text;

pub use check::Status;
pub use error::{Error, Result};
pub use field::Field;
pub use poly::{Poly, Q};
pub use qdet::{NormalizedFamily, QDetData};
pub use qkz::QKZInstance;
pub use ratfn::RatFn;
pub use reps::ComoduleWord;
pub use rmatrix::{FamilyDescriptor, FamilyKind, RMatrixFamily};
pub use series::{HSeries, Mode, Point, Scalar, Series};
pub use tensor::{Entry, LegMatrix, LegShape};
