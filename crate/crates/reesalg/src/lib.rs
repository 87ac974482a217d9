pub mod cli;
pub mod error;
pub mod groebner;
pub mod lnd;
pub mod modification;
pub mod poly;
pub mod rees;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
