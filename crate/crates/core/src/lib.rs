pub mod aggregation;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod io;
pub mod oracles;
pub mod report;

pub use error::{Error, Result};
