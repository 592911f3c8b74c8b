//! Command-line front end for the K-KP verification lab.

pub mod commands;
pub mod config;
pub mod output;
