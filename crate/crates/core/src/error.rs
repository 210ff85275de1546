use thiserror::Error;

use crate::lattice::Coord;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid lattice spec: {0}")]
    Spec(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("qubit ({}, {}) is outside the lattice or was removed by a dislocation", .0.x, .0.y)]
    MissingQubit(Coord),

    #[error("logical operator `{label}` anticommutes with generator {generator}")]
    InvalidLogical { label: String, generator: String },

    #[error("logical operator `{label}`: {reason}")]
    LogicalChain { label: String, reason: String },

    #[error("generator set is not a valid stabilizer presentation: {0}")]
    NotStabilizer(String),

    #[error("state is not pure: {generators} independent generators on {qubits} qubits")]
    NotPure { generators: usize, qubits: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("canonical form: {0}")]
    Canonical(String),

    #[error("dense oracle limited to {cap} qubits, got {n}")]
    OracleSize { n: usize, cap: usize },

    #[error("generator signs are contradictory: no state is fixed by all of them")]
    Contradiction,

    #[error("invalid fusion table: {0}")]
    FusionTable(String),

    #[error("area-law fit: {0}")]
    AreaLaw(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
