//! Command-line front end: an expression mini-language and subcommands
//! that print JSON.

pub mod commands;
pub mod eval;
pub mod lang;

pub use commands::{main_with, run, Cli, CliError, Outcome, Status};
pub use lang::{parse_spec, Expr, ParseError};
