//! Command-line front end and experiment drivers for `partdist-core`.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod io;
pub mod output;
pub mod render;
pub mod reproduce;
pub mod summary;
