//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A diagnostic is undefined on the supplied field (zero norm, vanishing
    /// amplitude on a sampling loop, ...).
    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("non-finite values: {0}")]
    NonFinite(String),

    /// Probe amplitude present at nodes where the total control field is
    /// exactly zero; the adiabatic conversion into the first polariton is
    /// undefined there.
    #[error("probe present where the controls vanish at {nodes} nodes")]
    NonAdiabatic { nodes: usize },

    /// The switch-off envelope does not preserve the control-field ratio.
    #[error("control ratio drift: {0}")]
    RatioDrift(String),

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
