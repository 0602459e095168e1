pub mod error;
pub mod linalg;
pub mod delta;
pub mod radii;
pub mod suite;

pub use error::{Error, Result};
