//! Input parsing, raw-data streaming and output rendering for the CLI.

mod parse;
mod raw;
mod render;

pub use parse::{parse_stats_input, InputFormat};
pub use raw::{compute_raw, fold_chunks, RawSummary};
pub use render::{format_column, render_table, OutputFormat, RenderConfig};

use thiserror::Error;

/// Failures while reading or decoding input.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("line {line}, column {column}: {message}")]
    Cell {
        line: usize,
        column: String,
        message: String,
    },

    #[error("line {line}: {message}")]
    Line { line: usize, message: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
