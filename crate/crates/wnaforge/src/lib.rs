//! Command-line workbench over `wnaforge-core`: file formats, reports and the subcommands.

pub mod cli;
pub mod commands;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod report;
