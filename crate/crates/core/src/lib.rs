//! A laboratory for critical percolation: exploration algorithms with exact
//! bookkeeping of revealed bits, Fourier-Walsh analysis of small boolean
//! functions, and continuous-time dynamical percolation.

pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod explore;
pub mod fourier;
pub mod interfaces;
pub mod lattice;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
