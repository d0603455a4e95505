pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod extract;
pub mod io;
pub mod markov;
pub mod neep;
pub mod nn;
pub mod rng;
pub mod select;
pub mod sigent;
pub mod synth;

pub use error::{Error, Result};
