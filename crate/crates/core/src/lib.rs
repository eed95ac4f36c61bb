pub mod error;
pub mod fit;
pub mod fock;
pub mod lattice;
pub mod schemes;
pub mod spectral;
pub mod vacuum;

pub use error::{Error, Result};
