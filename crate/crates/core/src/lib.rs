pub mod admissibility;
pub mod asymptotics;
pub mod closed_forms;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod mirror;
pub mod model;
pub mod report;
pub mod scalars;
pub mod series;

pub use error::{Error, Result};
