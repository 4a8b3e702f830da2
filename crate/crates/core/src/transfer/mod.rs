//! Grid discretisation of the transfer operator and its leading eigendata.

mod grid;
mod operator;
mod spectral;
mod ulam;

pub use grid::{Grid, GridFn, Measure};
pub use operator::{CsrMatrix, DenseMatrix, TransferOperator};
pub use spectral::{
    convergence_series, power_iterate, pushforward_distance, pushforward_series, test_panel, PowerOptions, SpectralData,
};
pub use ulam::{perron_root, refinement_study, ulam_dense, ulam_matrix, RefinementRow, UlamScheme, DENSE_LIMIT};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransferError {
    #[error("power iteration did not converge after {iterations} iterations (bracket width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },
    #[error("grid has {cells} cells, dense oracle limited to {limit}")]
    SizeLimit { cells: usize, limit: usize },
}
