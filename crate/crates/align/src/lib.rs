//! Command line and HTTP alignment-trial service for `comptex`.

pub mod cli;
pub mod service;
pub mod trial;
