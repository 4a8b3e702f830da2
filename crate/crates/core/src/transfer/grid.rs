//! Cell grids on `Q`, sampled functions and cell measures.

use crate::domain::{Params, QPoint, RectId};
use crate::prelude::*;
use core::ops::Range;
use serde::{Deserialize, Serialize};

/// A regular `nx x ny` cell grid on each rectangle. Cells are numbered
/// rectangle by rectangle, row-major within a rectangle (`x` fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    params: Params,
    res: [(usize, usize); 3],
    offsets: [usize; 4],
}

impl Grid {
    pub fn new(params: &Params, res: [(usize, usize); 3]) -> Self {
        let res = res.map(|(a, b)| (a.max(1), b.max(1)));
        let mut offsets = [0usize; 4];
        for r in 0..3 {
            offsets[r + 1] = offsets[r] + res[r].0 * res[r].1;
        }
        Grid {
            params: *params,
            res,
            offsets,
        }
    }

    /// The same resolution on every rectangle.
    pub fn uniform(params: &Params, nx: usize, ny: usize) -> Self {
        Grid::new(params, [(nx, ny); 3])
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn resolution(&self, r: RectId) -> (usize, usize) {
        self.res[r.index()]
    }

    pub fn len(&self) -> usize {
        self.offsets[3]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rect_range(&self, r: RectId) -> Range<usize> {
        self.offsets[r.index()]..self.offsets[r.index() + 1]
    }

    pub fn cell(&self, r: RectId, i: usize, j: usize) -> usize {
        self.offsets[r.index()] + j * self.res[r.index()].0 + i
    }

    pub fn coords(&self, idx: usize) -> (RectId, usize, usize) {
        let r = if idx < self.offsets[1] {
            RectId::R1
        } else if idx < self.offsets[2] {
            RectId::R2
        } else {
            RectId::R3
        };
        let local = idx - self.offsets[r.index()];
        let nx = self.res[r.index()].0;
        (r, local % nx, local / nx)
    }

    pub fn rect_of(&self, idx: usize) -> RectId {
        self.coords(idx).0
    }

    pub fn cell_size(&self, r: RectId) -> (f64, f64) {
        let ([x0, x1], [y0, y1]) = self.params.bounds(r);
        let (nx, ny) = self.res[r.index()];
        ((x1 - x0) / nx as f64, (y1 - y0) / ny as f64)
    }

    pub fn center(&self, idx: usize) -> QPoint {
        let (rect, i, j) = self.coords(idx);
        let ([x0, _], [y0, _]) = self.params.bounds(rect);
        let (dx, dy) = self.cell_size(rect);
        QPoint {
            rect,
            x: x0 + (i as f64 + 0.5) * dx,
            y: y0 + (j as f64 + 0.5) * dy,
        }
    }

    pub fn centers(&self) -> Vec<QPoint> {
        (0..self.len()).map(|k| self.center(k)).collect()
    }

    pub fn area(&self, idx: usize) -> f64 {
        let (dx, dy) = self.cell_size(self.rect_of(idx));
        dx * dy
    }

    /// Lower-left corner and size of a cell.
    pub fn cell_box(&self, idx: usize) -> ([f64; 2], [f64; 2]) {
        let (rect, i, j) = self.coords(idx);
        let ([x0, _], [y0, _]) = self.params.bounds(rect);
        let (dx, dy) = self.cell_size(rect);
        ([x0 + i as f64 * dx, y0 + j as f64 * dy], [dx, dy])
    }

    /// Index of the cell containing `q` (boundary points go to the upper cell,
    /// the last row and column are closed).
    pub fn locate(&self, q: &QPoint) -> usize {
        let ([x0, _], [y0, _]) = self.params.bounds(q.rect);
        let (dx, dy) = self.cell_size(q.rect);
        let (nx, ny) = self.res[q.rect.index()];
        let i = (((q.x - x0) / dx).floor().max(0.0) as usize).min(nx - 1);
        let j = (((q.y - y0) / dy).floor().max(0.0) as usize).min(ny - 1);
        self.cell(q.rect, i, j)
    }

    /// Bilinear stencil over cell centres, clamped at the rectangle edges.
    pub fn stencil(&self, q: &QPoint) -> [(usize, f64); 4] {
        let ([x0, _], [y0, _]) = self.params.bounds(q.rect);
        let (dx, dy) = self.cell_size(q.rect);
        let (nx, ny) = self.res[q.rect.index()];
        let (i0, tx) = axis(q.x, x0, dx, nx);
        let (j0, ty) = axis(q.y, y0, dy, ny);
        let i1 = (i0 + 1).min(nx - 1);
        let j1 = (j0 + 1).min(ny - 1);
        [
            (self.cell(q.rect, i0, j0), (1.0 - tx) * (1.0 - ty)),
            (self.cell(q.rect, i1, j0), tx * (1.0 - ty)),
            (self.cell(q.rect, i0, j1), (1.0 - tx) * ty),
            (self.cell(q.rect, i1, j1), tx * ty),
        ]
    }

    pub fn interpolate(&self, values: &[f64], q: &QPoint) -> f64 {
        self.stencil(q).iter().map(|&(k, w)| w * values[k]).sum()
    }

    pub fn sample<F: Fn(&QPoint) -> f64>(&self, f: F) -> GridFn {
        GridFn((0..self.len()).map(|k| f(&self.center(k))).collect())
    }

    pub fn constant(&self, c: f64) -> GridFn {
        GridFn(vec![c; self.len()])
    }

    pub fn indicator(&self, r: RectId) -> GridFn {
        let range = self.rect_range(r);
        GridFn(
            (0..self.len())
                .map(|k| if range.contains(&k) { 1.0 } else { 0.0 })
                .collect(),
        )
    }

    /// Per-rectangle sums of a measure.
    pub fn rect_masses(&self, m: &Measure) -> [f64; 3] {
        RectId::ALL.map(|r| m.0[self.rect_range(r)].iter().sum())
    }

    /// Per-rectangle means of a function.
    pub fn rect_means(&self, f: &GridFn) -> [f64; 3] {
        RectId::ALL.map(|r| {
            let s = &f.0[self.rect_range(r)];
            s.iter().sum::<f64>() / s.len() as f64
        })
    }
}

fn axis(u: f64, u0: f64, du: f64, n: usize) -> (usize, f64) {
    if n == 1 {
        return (0, 0.0);
    }
    let mut s = ((u - u0) / du - 0.5).clamp(0.0, (n - 1) as f64);
    // snap onto a centre so that centre values are reproduced exactly
    if (s - s.round()).abs() < 1e-9 {
        s = s.round();
    }
    let k = (s.floor() as usize).min(n - 2);
    (k, s - k as f64)
}

/// Values at cell centres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFn(pub Vec<f64>);

impl GridFn {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFn {
        GridFn(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn zip(&self, o: &GridFn, f: impl Fn(f64, f64) -> f64) -> GridFn {
        GridFn(self.0.iter().zip(&o.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn scale(&self, t: f64) -> GridFn {
        self.map(|v| t * v)
    }

    pub fn sup(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn sup_dist(&self, o: &GridFn) -> f64 {
        self.0.iter().zip(&o.0).fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }
}

/// Nonnegative weights per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure(pub Vec<f64>);

impl Measure {
    pub fn mass(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn is_probability(&self) -> bool {
        self.0.iter().all(|&w| w >= 0.0) && (self.mass() - 1.0).abs() <= 1e-12
    }

    pub fn integrate(&self, f: &GridFn) -> f64 {
        self.0.iter().zip(&f.0).map(|(w, v)| w * v).sum()
    }

    pub fn normalized(&self) -> Measure {
        let m = self.mass();
        Measure(self.0.iter().map(|w| w / m).collect())
    }

    pub fn l1_dist(&self, o: &Measure) -> f64 {
        self.0.iter().zip(&o.0).map(|(a, b)| (a - b).abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_partition_and_locate() {
        let p = Params::default();
        let g = Grid::new(&p, [(4, 5), (3, 2), (2, 6)]);
        assert_eq!(g.len(), 20 + 6 + 12);
        for k in 0..g.len() {
            assert_eq!(g.locate(&g.center(k)), k);
        }
        let total: f64 = (0..g.len()).map(|k| g.area(k)).sum();
        let expected = p.rho * 1.0 + p.rho * p.sigma + p.rho * 1.0;
        assert!((total - expected).abs() < 1e-14);
        let corner = QPoint::new(&p, RectId::R3, p.rho, 2.0 + p.eps).unwrap();
        assert_eq!(g.locate(&corner), g.len() - 1);
    }

    #[test]
    fn interpolation_is_exact_at_centres() {
        let p = Params::default();
        let g = Grid::uniform(&p, 6, 7);
        let f = g.sample(|q| q.x * 3.0 + q.y * q.y);
        for k in 0..g.len() {
            assert_eq!(g.interpolate(&f.0, &g.center(k)), f.0[k]);
        }
        // bilinear functions are reproduced between centres
        let lin = g.sample(|q| 2.0 * q.x - q.y + 1.0);
        let q = QPoint::new(&p, RectId::R1, 0.037, 0.41).unwrap();
        assert!((g.interpolate(&lin.0, &q) - (2.0 * 0.037 - 0.41 + 1.0)).abs() < 1e-13);
    }
}
