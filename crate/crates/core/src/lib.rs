pub mod cli;
pub mod dfield;
pub mod ecurve;
pub mod error;
pub mod hassewitt;
pub mod jets;
pub mod manin;
pub mod pfgm;
pub mod upoly;

pub use error::{Error, Result};
