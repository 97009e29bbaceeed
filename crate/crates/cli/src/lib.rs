//! Front end for the `edp` tool: model-file parsing, serialization and
//! subcommand dispatch. The binary is a thin wrapper over [`run_command`].

pub mod commands;
pub mod model;

pub use commands::{run_command, Outcome};
pub use model::{
    parse_model, parse_presentation, serialize_model, serialize_presentation, Model, ModelError, ParseError,
};
