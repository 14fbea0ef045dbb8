//! CLI and HTTP service over a greylit repository.

pub mod api;
pub mod cli;
pub mod views;
