pub mod error;
pub mod qfield;
pub mod series;
pub mod ncalg;
pub mod blocks;
pub mod projection;
pub mod rmatrix;
pub mod verify;
pub mod io;
pub mod cache;
pub mod cli;

pub use error::{Error, Result};
