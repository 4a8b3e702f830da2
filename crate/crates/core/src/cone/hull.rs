//! Planar convex hulls (monotone chain) with an octagon prefilter.

use crate::par;
use crate::prelude::*;

pub type P2 = [f64; 2];

/// Fixed work unit for the chunked hull; independent of the worker count.
pub const HULL_CHUNK: usize = 1 << 16;

fn cross(o: P2, a: P2, b: P2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Hull vertices in counter-clockwise order, collinear points dropped.
pub fn convex_hull(mut pts: Vec<P2>) -> Vec<P2> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<P2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

const DIRS: [P2; 8] = [
    [1.0, 0.0],
    [1.0, 1.0],
    [0.0, 1.0],
    [-1.0, 1.0],
    [-1.0, 0.0],
    [-1.0, -1.0],
    [0.0, -1.0],
    [1.0, -1.0],
];

/// Extreme points in eight directions, in angular order.
fn octagon(pts: &[P2]) -> Vec<P2> {
    let mut best = [[0.0; 2]; 8];
    let mut score = [f64::NEG_INFINITY; 8];
    for &p in pts {
        for (k, d) in DIRS.iter().enumerate() {
            let s = p[0] * d[0] + p[1] * d[1];
            if s > score[k] {
                score[k] = s;
                best[k] = p;
            }
        }
    }
    let mut poly: Vec<P2> = Vec::with_capacity(8);
    for p in best {
        if poly.last() != Some(&p) && poly.first() != Some(&p) {
            poly.push(p);
        }
    }
    poly
}

fn strictly_inside(poly: &[P2], p: P2) -> bool {
    if poly.len() < 3 {
        return false;
    }
    (0..poly.len()).all(|i| cross(poly[i], poly[(i + 1) % poly.len()], p) > 0.0)
}

/// Hull of a large point set produced on demand by `point(i)`, `i < n`.
/// Points strictly inside the extreme octagon are discarded before sorting.
pub fn hull_of<F>(n: usize, point: F) -> Vec<P2>
where
    F: Fn(usize) -> P2 + Sync + Send,
{
    let partial = par::map_chunks(n, HULL_CHUNK, |r| {
        let local: Vec<P2> = r.map(&point).collect();
        let oct = octagon(&local);
        let kept: Vec<P2> = local.into_iter().filter(|&p| !strictly_inside(&oct, p)).collect();
        convex_hull(kept)
    });
    convex_hull(partial.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_interior_points() {
        let mut pts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]];
        pts.extend((0..50).map(|i| [0.01 * i as f64 + 0.2, 0.3]));
        let h = convex_hull(pts.clone());
        assert_eq!(h.len(), 4);
        let h2 = hull_of(pts.len(), |i| pts[i]);
        assert_eq!(h, h2);
    }
}
