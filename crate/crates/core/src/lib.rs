pub mod acceptance;
pub mod cli;
pub mod config;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod manifold;
pub mod report;
pub mod rng;
pub mod samplers;
pub mod spectral;
pub mod statistics;
pub mod sweep;
pub mod transport;

pub use error::{Error, Result};
