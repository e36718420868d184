pub mod analysis;
pub mod boost;
pub mod csp;
pub mod dsp;
pub mod error;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod model;
pub mod precondition;
pub mod seed;
pub mod svm;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
