pub mod dynamosa;
pub mod error;
pub mod experiment;
pub mod mio;
pub mod operators;
pub mod param_space;
pub mod run;
pub mod stats;
pub mod subject;
pub mod tuner;

pub use error::{Error, Result};
