//! Random walks on the unipotent upper-triangular group `U_n(Z/pZ)`: exact
//! convolution, super-character bounds, explicit generator words and the
//! comparison constant between the walks `P` and `Q`.

pub mod comparison;
pub mod error;
pub mod group;
pub mod limits;
pub mod paths;
pub mod spectral;
pub mod superclass;
pub mod supercharacter;
pub mod walk;

pub use error::{Error, Result};
pub use group::{GeneratorStep, GeneratorWord, PrimeModulus, Sign, UniTriMatrix};
pub use limits::Limits;
