pub mod acceptance;
pub mod cli;
pub mod config;
pub mod error;
pub mod laws;
pub mod linalg;
pub mod model;
pub mod montecarlo;
pub mod ncpoly;
pub mod perturb;
pub mod randmat;

pub use error::{Error, Result};
