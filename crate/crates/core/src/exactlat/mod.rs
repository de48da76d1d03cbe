//! Exact integer and quadratic-field linear algebra: the arithmetic layer
//! under every enumeration and under the stable/unstable splitting.

mod eigen;
mod matrix;
mod quad;
mod snf;

pub use eigen::EigenData;
pub use matrix::IntMatrix2;
pub use quad::QuadNumber;
pub use snf::{smith_normal_form, SnfDecomposition};
