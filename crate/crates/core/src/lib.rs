pub mod driver;
pub mod eigsolve;
pub mod error;
pub mod estimator;
pub mod fem;
pub mod linalg;
pub mod marking;
pub mod mesh;
pub mod problem;

pub use error::{Error, Result};
