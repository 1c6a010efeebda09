pub mod bitmatrix;
pub mod error;
pub mod f2poly;
pub mod genkit;
pub mod lattice;
pub mod merit;
pub mod oracle;
pub mod report;
pub mod stats;

pub use error::{Error, Result};
