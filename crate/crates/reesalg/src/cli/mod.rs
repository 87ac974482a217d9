//! Command-line front end: the derivation spec format and subcommand drivers.

pub mod commands;
pub mod expr;
pub mod spec;

pub use commands::{run_command, Command, CommandOutput, Invocation};
pub use expr::{parse_expr, parse_poly, Expr};
pub use spec::{parse_spec, ParsedSpec, SpecOptions};
