pub mod error;
pub mod linalg;
pub mod scalar;
pub mod screening;
pub mod superdata;
pub mod vertexcalc;
pub mod walgebras;

pub use error::{Error, Result};
pub use scalar::{Poly, Scalar, Q};
