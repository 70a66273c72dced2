pub mod error;
pub mod estimator;
pub mod kotz;
pub mod kw;
pub mod matops;
pub mod mc;
pub mod specfun;
pub mod sum;
pub mod varma;
pub mod zonal;

pub use error::{Error, Result};
