use thiserror::Error;

use crate::game::Violation;

/// Errors raised by the numeric engines and file loaders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("angle {value} for player {player}, type {type_index} is outside [0, 2π)")]
    AngleOutOfRange {
        player: usize,
        type_index: usize,
        value: f64,
    },

    #[error("{name} = {value} is outside {range}")]
    CoordinatorOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("game failed validation: {}", format_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal error: {0}")]
    Internal(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
