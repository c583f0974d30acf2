use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("motor is not unit: reverse(M) M = {scalar} + {pseudo} e0123")]
    NonUnitMotor { scalar: f64, pseudo: f64 },

    #[error("transform is not rigid (orthogonality error {orthogonality:e}, bottom row error {bottom_row:e})")]
    NonRigidTransform { orthogonality: f64, bottom_row: f64 },

    #[error("pseudo-inertia is not symmetric (max asymmetry {0:e})")]
    AsymmetricInertia(f64),

    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: line {line}, column {column}: {message}")]
    Schema {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid robot model: field `{field}`: {message}")]
    Model { field: String, message: String },

    #[error("configuration out of workspace: loop residual {residual:e} after {iterations} iterations")]
    OutOfWorkspace { residual: f64, iterations: usize },

    #[error("passive constraint Jacobian is singular (condition number {cond:e})")]
    Singular { cond: f64 },

    #[error("no accepted samples out of {requested} ({out_of_workspace} out of workspace, {ill_conditioned} above the condition gate)")]
    NoAcceptedSamples {
        requested: usize,
        out_of_workspace: usize,
        ill_conditioned: usize,
    },

    #[error("nullspace basis is rank deficient: rank {rank} < {columns} columns")]
    RankDeficientNullspace { rank: usize, columns: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
