//! Delaunay cells as the lower convex hull of points lifted to the paraboloid.
//!
//! Only used to propose candidate neighbor sets; every cell is re-certified
//! downstream against the full image set, so qhull's combinatorics never
//! decide a verdict on their own.

use qhull::QhBuilder;

use crate::geom::{dot, PointCloud};

#[derive(Debug)]
pub(crate) enum Cells {
    /// Full-dimensional simplices (k+1 vertex indices each).
    Simplices(Vec<Vec<usize>>),
    /// The hull backend gave up (cospherical or too few points).
    Failed(String),
}

/// Delaunay simplices of a full-dimensional point set in ℝᵏ, k ≥ 2.
/// `joggle` retries with randomly perturbed input (deterministically seeded
/// by qhull), for inputs the exact pass rejects as too degenerate.
pub(crate) fn delaunay_cells(points: &PointCloud, joggle: bool) -> Cells {
    let k = points.dim();
    let n = points.len();
    if n < k + 2 {
        return Cells::Failed(format!("{n} points in dimension {k}"));
    }
    let mut centroid = vec![0.0; k];
    for p in points.iter() {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / n as f64;
        }
    }
    let scale = points
        .iter()
        .map(|p| p.iter().zip(&centroid).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        .fold(0.0, f64::max)
        .sqrt();
    if scale == 0.0 {
        return Cells::Failed("all points coincide".into());
    }
    let mut lifted = Vec::with_capacity(n * (k + 1));
    for p in points.iter() {
        let start = lifted.len();
        lifted.extend(p.iter().zip(&centroid).map(|(a, b)| (a - b) / scale));
        let sq = dot(&lifted[start..], &lifted[start..]);
        lifted.push(sq);
    }

    let mut builder = QhBuilder::default();
    if joggle {
        builder = builder.qhull_args(["QJ"]).expect("static argument");
    }
    let qh = match builder
        .triangulate(true)
        .capture_stdout(true)
        .capture_stderr(true)
        .build(k + 1, &mut lifted)
    {
        Ok(qh) => qh,
        Err(e) => {
            let msg = e
                .error_message
                .as_deref()
                .unwrap_or("qhull error")
                .lines()
                .next()
                .unwrap_or("")
                .to_string();
            return Cells::Failed(msg);
        }
    };

    let mut cells = Vec::new();
    for facet in qh.facets() {
        let Some(normal) = facet.normal() else {
            continue;
        };
        // lower hull only
        if normal[k] >= -1e-12 {
            continue;
        }
        let Some(verts) = facet.vertices() else {
            continue;
        };
        let mut idx: Vec<usize> = verts.iter().filter_map(|v| v.index(&qh)).collect();
        if idx.len() != k + 1 {
            continue;
        }
        idx.sort_unstable();
        cells.push(idx);
    }
    cells.sort();
    cells.dedup();
    if cells.is_empty() {
        return Cells::Failed("no lower facets".into());
    }
    Cells::Simplices(cells)
}

/// Boundary triangles of the convex hull of points in ℝ³, oriented so the
/// normal (b − a) × (c − a) points away from the centroid.
pub(crate) fn hull_triangles(points: &PointCloud) -> Result<Vec<[usize; 3]>, String> {
    if points.dim() != 3 {
        return Err(format!("hull of points in dimension {}", points.dim()));
    }
    let n = points.len();
    if n < 4 {
        return Err(format!("{n} points"));
    }
    let mut centroid = [0.0; 3];
    for p in points.iter() {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / n as f64;
        }
    }
    let mut flat = points.flat().to_vec();
    let qh = QhBuilder::default()
        .triangulate(true)
        .capture_stdout(true)
        .capture_stderr(true)
        .build(3, &mut flat)
        .map_err(|e| e.error_message.unwrap_or_else(|| "qhull error".into()))?;
    let mut tris = Vec::new();
    for facet in qh.facets() {
        let Some(verts) = facet.vertices() else {
            continue;
        };
        let idx: Vec<usize> = verts.iter().filter_map(|v| v.index(&qh)).collect();
        let [a, b, c] = idx[..] else {
            continue;
        };
        let (pa, pb, pc) = (points.get(a), points.get(b), points.get(c));
        let u: Vec<f64> = (0..3).map(|k| pb[k] - pa[k]).collect();
        let v: Vec<f64> = (0..3).map(|k| pc[k] - pa[k]).collect();
        let nrm = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let out: f64 = (0..3).map(|k| nrm[k] * (pa[k] - centroid[k])).sum();
        tris.push(if out >= 0.0 { [a, b, c] } else { [a, c, b] });
    }
    tris.sort_unstable();
    Ok(tris)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_center() {
        let pts = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.5, 0.5]]).unwrap();
        let Cells::Simplices(cells) = delaunay_cells(&pts, false) else {
            panic!("expected cells");
        };
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| c.contains(&4)));
    }

    #[test]
    fn anisotropic_input_uses_euclidean_metric() {
        // A flat rhombus: the short diagonal must be the Delaunay edge.
        let pts = PointCloud::from_rows(&[[-10.0, 0.0], [10.0, 0.0], [0.0, 1.0], [0.0, -1.0], [0.0, 30.0]]).unwrap();
        let Cells::Simplices(cells) = delaunay_cells(&pts, false) else {
            panic!("expected cells");
        };
        let has_edge = |a: usize, b: usize| cells.iter().any(|c| c.contains(&a) && c.contains(&b));
        assert!(has_edge(2, 3));
        assert!(!has_edge(0, 1));
    }

    #[test]
    fn tetrahedra_in_space() {
        let mut rows = Vec::new();
        for i in 0..40 {
            let t = i as f64;
            rows.push([
                (t * 1.3).sin(),
                (t * 0.7).cos() * 1.5,
                (t * 2.1).sin() * (t * 0.3).cos(),
            ]);
        }
        let pts = PointCloud::from_rows(&rows).unwrap();
        let Cells::Simplices(cells) = delaunay_cells(&pts, false) else {
            panic!("expected cells");
        };
        assert!(cells.iter().all(|c| c.len() == 4));
        assert!(cells.len() > 40);
    }

    #[test]
    fn cocircular_points_need_joggle_or_fail_cleanly() {
        let rows: Vec<[f64; 2]> = (0..16)
            .map(|i| {
                let t = i as f64 * std::f64::consts::TAU / 16.0;
                [t.cos(), t.sin()]
            })
            .collect();
        let pts = PointCloud::from_rows(&rows).unwrap();
        let _ = delaunay_cells(&pts, false);
        let Cells::Simplices(cells) = delaunay_cells(&pts, true) else {
            panic!("joggled pass should succeed");
        };
        assert_eq!(cells.len(), 14);
    }

    #[test]
    fn too_few_points_fail() {
        let pts = PointCloud::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(delaunay_cells(&pts, false), Cells::Failed(_)));
    }

    #[test]
    fn octahedron_hull_is_closed_and_outward() {
        let pts = PointCloud::from_rows(&[
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ])
        .unwrap();
        let tris = hull_triangles(&pts).unwrap();
        assert_eq!(tris.len(), 8);
        // every directed edge appears once, its reverse once
        let mut edges = std::collections::BTreeSet::new();
        for t in &tris {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                assert!(edges.insert(e));
            }
        }
        assert!(edges.iter().all(|&(a, b)| edges.contains(&(b, a))));
    }
}
