pub mod cli;
pub mod constructions;
pub mod criticality;
pub mod error;
pub mod geometry;
pub(crate) mod linalg;
pub mod optimizer;
pub mod santalo;
pub mod verify;

pub use error::{Error, Result};
