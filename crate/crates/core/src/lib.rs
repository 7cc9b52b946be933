pub mod assembly;
pub mod basis;
pub mod cli;
pub mod error;
pub mod mp;
pub mod quadrature;
pub mod transforms;
pub mod verifier;

pub use error::{Error, Result};
