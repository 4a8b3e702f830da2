//! The transfer operator `L psi(x) = sum_{G y = x} e^{phi*(y)} psi(y)` on a grid.

use super::grid::{Grid, GridFn, Measure};
use super::TransferError;
use crate::domain::{Params, QPoint};
use crate::dynamics::preimages_g;
use crate::par;
use crate::potential::Potential;
use crate::prelude::*;

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c as u32);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .map(|&c| c as usize)
            .zip(self.vals[r].iter().copied())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        par::fill_indexed(&mut out, |i| self.row(i).map(|(c, v)| v * x[c]).sum());
        out
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                rows[c].push((i, v));
            }
        }
        CsrMatrix::from_rows(rows)
    }

    pub fn to_dense(&self, limit: usize) -> Result<DenseMatrix, TransferError> {
        if self.n > limit {
            return Err(TransferError::SizeLimit { cells: self.n, limit });
        }
        let mut data = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for (c, v) in self.row(i) {
                data[i * self.n + c] += v;
            }
        }
        Ok(DenseMatrix { n: self.n, data })
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

/// `L` for a fixed grid and potential. Each row holds the bilinear stencils of
/// the exact preimages of the cell centre, weighted by `e^{phi*}` at the
/// preimage.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    grid: Grid,
    potential: Potential,
    matrix: CsrMatrix,
}

impl TransferOperator {
    pub fn new(grid: &Grid, potential: &Potential) -> Self {
        let params = *grid.params();
        let rows = par::map_indexed(grid.len(), |i| {
            let x = grid.center(i);
            let mut row = Vec::with_capacity(8);
            for y in preimages_g(&params, &x).iter() {
                let w = potential.eval(y).exp();
                for (k, s) in grid.stencil(y) {
                    if s != 0.0 {
                        row.push((k, w * s));
                    }
                }
            }
            row
        });
        TransferOperator {
            grid: grid.clone(),
            potential: potential.clone(),
            matrix: CsrMatrix::from_rows(rows),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &Params {
        self.grid.params()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn apply(&self, psi: &GridFn) -> GridFn {
        GridFn(self.matrix.matvec(&psi.0))
    }

    /// `L^n psi` by composition.
    pub fn apply_n(&self, psi: &GridFn, n: usize) -> GridFn {
        let mut cur = psi.clone();
        for _ in 0..n {
            cur = self.apply(&cur);
        }
        cur
    }

    /// `L psi` at an arbitrary point, `psi` interpolated at the preimages.
    pub fn apply_at(&self, psi: &GridFn, q: &QPoint) -> f64 {
        preimages_g(self.params(), q)
            .iter()
            .map(|y| self.potential.eval(y).exp() * self.grid.interpolate(&psi.0, y))
            .sum()
    }

    /// Dual action on cell measures, `integral psi d(L* m) = integral L psi dm`.
    pub fn apply_dual(&self, m: &Measure, transposed: &CsrMatrix) -> Measure {
        Measure(transposed.matvec(&m.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RectId;

    #[test]
    fn constant_one_counts_preimages() {
        let p = Params::default();
        let g = Grid::uniform(&p, 8, 8);
        let op = TransferOperator::new(&g, &Potential::zero());
        let l1 = op.apply(&g.constant(1.0));
        for k in 0..g.len() {
            let expected = if g.rect_of(k) == RectId::R3 { 1.0 } else { 2.0 };
            assert!((l1.0[k] - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn transpose_roundtrip() {
        let m = CsrMatrix::from_rows(vec![vec![(1, 2.0), (0, 1.0), (1, 0.5)], vec![], vec![(2, 3.0)]]);
        assert_eq!(m.row(0).collect::<Vec<_>>(), vec![(0, 1.0), (1, 2.5)]);
        assert_eq!(m.transpose().transpose(), m);
        assert!(matches!(m.to_dense(2), Err(TransferError::SizeLimit { .. })));
    }
}
