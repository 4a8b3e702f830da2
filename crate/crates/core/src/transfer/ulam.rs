//! Ulam discretisations of `L`, kept as an independent check on the main path.

use super::grid::Grid;
use super::operator::{CsrMatrix, DenseMatrix, TransferOperator};
use super::TransferError;
use crate::dynamics::preimages_g;
use crate::par;
use crate::potential::Potential;
use crate::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest grid accepted by the dense eigensolver.
pub const DENSE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UlamScheme {
    /// Entry `(i, j)` is `e^{phi*(c_j)}` for every preimage of the centre
    /// `c_i` falling in cell `j`.
    #[default]
    Cell,
    /// Bilinear weights with `e^{phi*}` at the exact preimage; the matrix of
    /// [`TransferOperator`].
    Interpolated,
}

pub fn ulam_matrix(grid: &Grid, potential: &Potential, scheme: UlamScheme) -> CsrMatrix {
    match scheme {
        UlamScheme::Interpolated => TransferOperator::new(grid, potential).matrix().clone(),
        UlamScheme::Cell => {
            let params = *grid.params();
            let rows = par::map_indexed(grid.len(), |i| {
                preimages_g(&params, &grid.center(i))
                    .iter()
                    .map(|y| {
                        let j = grid.locate(y);
                        (j, potential.eval(&grid.center(j)).exp())
                    })
                    .collect()
            });
            CsrMatrix::from_rows(rows)
        }
    }
}

/// Dense Ulam matrix, refused above [`DENSE_LIMIT`] cells.
pub fn ulam_dense(grid: &Grid, potential: &Potential, scheme: UlamScheme) -> Result<DenseMatrix, TransferError> {
    if grid.len() > DENSE_LIMIT {
        return Err(TransferError::SizeLimit {
            cells: grid.len(),
            limit: DENSE_LIMIT,
        });
    }
    ulam_matrix(grid, potential, scheme).to_dense(DENSE_LIMIT)
}

/// Perron root of a nonnegative matrix whose rows are all nonzero, by power
/// iteration with the Collatz–Wielandt bracket.
pub fn perron_root(m: &CsrMatrix, tol: f64, max_iter: usize) -> Result<f64, TransferError> {
    let mut v = vec![1.0; m.n];
    let mut width = f64::INFINITY;
    for it in 1..=max_iter {
        let w = m.matvec(&v);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (a, b) in w.iter().zip(&v) {
            let r = a / b;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        width = hi - lo;
        if width < tol {
            return Ok(0.5 * (lo + hi));
        }
        let top = w.iter().copied().fold(0.0, f64::max);
        v = w.iter().map(|x| x / top).collect();
        if it == max_iter {
            break;
        }
    }
    Err(TransferError::NoConvergence {
        iterations: max_iter,
        width,
    })
}

/// One row of a refinement study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub nx: usize,
    pub ny: usize,
    pub cells: usize,
    pub lambda_cell: f64,
    pub lambda_interpolated: f64,
}

pub fn refinement_study(
    params: &crate::domain::Params,
    potential: &Potential,
    sizes: &[usize],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<RefinementRow>, TransferError> {
    sizes
        .iter()
        .map(|&s| {
            let grid = Grid::uniform(params, s, s);
            let cell = perron_root(&ulam_matrix(&grid, potential, UlamScheme::Cell), tol, max_iter)?;
            let interp = perron_root(&ulam_matrix(&grid, potential, UlamScheme::Interpolated), tol, max_iter)?;
            Ok(RefinementRow {
                nx: s,
                ny: s,
                cells: grid.len(),
                lambda_cell: cell,
                lambda_interpolated: interp,
            })
        })
        .collect()
}
