//! Uniform bucket grid for axis-aligned box queries.

use crate::geom::PointCloud;

pub(crate) struct Grid<'a> {
    points: &'a PointCloud,
    lo: Vec<f64>,
    width: Vec<f64>,
    shape: Vec<usize>,
    /// CSR layout: bucket b holds `order[starts[b]..starts[b + 1]]`.
    starts: Vec<usize>,
    order: Vec<usize>,
}

impl<'a> Grid<'a> {
    pub fn new(points: &'a PointCloud) -> Self {
        let k = points.dim();
        let n = points.len().max(1);
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for p in points.iter() {
            for a in 0..k {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        // About one point per bucket, split evenly across axes.
        let per_axis = ((n as f64).powf(1.0 / k as f64).ceil() as usize).max(1);
        let mut shape = vec![per_axis; k];
        let mut width = vec![1.0; k];
        for a in 0..k {
            let len = hi[a] - lo[a];
            if len > 0.0 && len.is_finite() {
                width[a] = len / per_axis as f64;
            } else {
                shape[a] = 1;
                lo[a] = if lo[a].is_finite() { lo[a] } else { 0.0 };
            }
        }
        let total: usize = shape.iter().product();
        let bucket: Vec<usize> = points.iter().map(|p| Self::bucket_of(&lo, &width, &shape, p)).collect();
        let mut starts = vec![0usize; total + 1];
        for &b in &bucket {
            starts[b + 1] += 1;
        }
        for b in 0..total {
            starts[b + 1] += starts[b];
        }
        let mut fill = starts.clone();
        let mut order = vec![0usize; points.len()];
        for (i, &b) in bucket.iter().enumerate() {
            order[fill[b]] = i;
            fill[b] += 1;
        }
        Self {
            points,
            lo,
            width,
            shape,
            starts,
            order,
        }
    }

    fn axis_cell(lo: f64, width: f64, count: usize, x: f64) -> usize {
        let c = ((x - lo) / width).floor();
        if c <= 0.0 || c.is_nan() {
            0
        } else {
            (c as usize).min(count - 1)
        }
    }

    fn bucket_of(lo: &[f64], width: &[f64], shape: &[usize], p: &[f64]) -> usize {
        let mut b = 0;
        for a in 0..shape.len() {
            b = b * shape[a] + Self::axis_cell(lo[a], width[a], shape[a], p[a]);
        }
        b
    }

    /// Largest bucket width; a margin that any query box can be padded by.
    pub fn cell_size(&self) -> f64 {
        self.width
            .iter()
            .zip(&self.shape)
            .filter(|(_, &s)| s > 1)
            .map(|(w, _)| *w)
            .fold(0.0, f64::max)
    }

    /// Indices of all points in buckets overlapping `[qlo, qhi]` (a superset
    /// of the points inside the box). Returns `true` when the query degraded
    /// to a full scan.
    pub fn query(&self, qlo: &[f64], qhi: &[f64], out: &mut Vec<usize>) -> bool {
        out.clear();
        let k = self.shape.len();
        let mut from = vec![0usize; k];
        let mut to = vec![0usize; k];
        let mut cells = 1usize;
        for a in 0..k {
            from[a] = Self::axis_cell(self.lo[a], self.width[a], self.shape[a], qlo[a]);
            to[a] = Self::axis_cell(self.lo[a], self.width[a], self.shape[a], qhi[a]);
            cells = cells.saturating_mul(to[a] - from[a] + 1);
        }
        if cells.saturating_mul(2) >= self.starts.len() - 1 {
            out.extend(0..self.points.len());
            return true;
        }
        let mut at = from.clone();
        loop {
            let mut b = 0;
            for (s, &x) in self.shape.iter().zip(&at) {
                b = b * s + x;
            }
            out.extend_from_slice(&self.order[self.starts[b]..self.starts[b + 1]]);
            // odometer increment
            let mut a = k;
            loop {
                if a == 0 {
                    return false;
                }
                a -= 1;
                if at[a] < to[a] {
                    at[a] += 1;
                    break;
                }
                at[a] = from[a];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_query_is_a_superset() {
        let rows: Vec<[f64; 2]> = (0..400)
            .map(|i| {
                let t = i as f64;
                [(t * 0.37).sin() * 3.0, (t * 1.13).cos()]
            })
            .collect();
        let pts = PointCloud::from_rows(&rows).unwrap();
        let grid = Grid::new(&pts);
        let mut out = Vec::new();
        let (qlo, qhi) = ([-0.5, -0.2], [0.7, 0.3]);
        let full = grid.query(&qlo, &qhi, &mut out);
        assert!(!full);
        assert!(out.len() < 400);
        for (i, p) in rows.iter().enumerate() {
            let inside = (0..2).all(|a| p[a] >= qlo[a] && p[a] <= qhi[a]);
            if inside {
                assert!(out.contains(&i));
            }
        }
    }

    #[test]
    fn flat_axis_and_huge_boxes() {
        let pts = PointCloud::from_rows(&[[0.0, 1.0], [1.0, 1.0], [2.0, 1.0]]).unwrap();
        let grid = Grid::new(&pts);
        let mut out = Vec::new();
        assert!(grid.query(&[-10.0, -10.0], &[10.0, 10.0], &mut out));
        assert_eq!(out.len(), 3);
    }
}
