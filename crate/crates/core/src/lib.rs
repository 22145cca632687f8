pub mod appell;
pub mod dual;
pub mod error;
pub mod fpm1d;
pub mod fpm2d;
pub mod process;
pub mod specfun;
pub mod stats;
pub mod stirling;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
