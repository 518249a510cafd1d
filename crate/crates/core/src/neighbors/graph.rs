//! Neighbor graph of a whole image set, and D_f.
//!
//! Coincident images are merged first. The remaining representatives are
//! projected onto their affine hull, where f-neighbor sets are exactly the
//! vertex sets of empty circumspheres: Delaunay cells propose them, every
//! cell's sphere is re-checked against the images through a bucket grid, and
//! the members found on a checked sphere form one tuple certificate. Cell
//! edges that no checked sphere covers go through the LP predicate.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::fast::{decide, Decision};
use super::grid::Grid;
use super::{check_sphere, max_pair_distance, NeighborCertificate, Witness};
use crate::delaunay::{delaunay_cells, Cells};
use crate::domains::SampledDomain;
use crate::error::{Error, Result};
use crate::geom::{circumsphere, dist, dist2, dot, Point, PointCloud, Sphere};
use crate::maps::ImageSet;
use crate::tolerance::Tolerances;

/// Above this many representatives a failed triangulation is an error rather
/// than a quadratic fallback.
const BRUTE_FORCE_LIMIT: usize = 256;

/// Certified f-neighbor sets of the sampled image set, sorted by indices.
pub fn neighbor_graph(images: &ImageSet, domain: &SampledDomain, tol: &Tolerances) -> Result<Vec<NeighborCertificate>> {
    if images.len() != domain.len() {
        return Err(Error::Invalid(format!(
            "{} images for {} samples",
            images.len(),
            domain.len()
        )));
    }
    let n = images.len();
    if n < 2 {
        return Ok(Vec::new());
    }
    let s = images.images.extent();
    let groups = coincidence_groups(&images.images, tol.eps_coincide * s);
    let mut certs = Vec::new();

    for g in groups.iter().filter(|g| g.len() > 1) {
        let p = images.get(g[0]);
        let slack = if groups.len() == 1 {
            0.0
        } else {
            let mut best = s;
            for other in groups.iter().filter(|h| h[0] != g[0]) {
                best = best.min(dist(images.get(other[0]), p));
            }
            best
        };
        certs.push(NeighborCertificate {
            indices: g.clone(),
            witness: Witness::Coincidence,
            slack,
            pair_distance: max_pair_distance(Some(domain), g),
        });
    }

    if groups.len() > 1 {
        let reps: Vec<usize> = groups.iter().map(|g| g[0]).collect();
        let hull = AffineHull::of(&images.images, &reps, tol.rank * s);
        let proj = hull.project(&images.images, &reps);
        let spheres = rep_spheres(&proj, s, tol)?;
        let mut seen = BTreeSet::new();
        for rs in spheres {
            if !seen.insert(rs.members.clone()) {
                continue;
            }
            let mut indices: Vec<usize> = rs.members.iter().flat_map(|&r| groups[r].iter().copied()).collect();
            indices.sort_unstable();
            let pair_distance = max_pair_distance(Some(domain), &indices);
            certs.push(NeighborCertificate {
                indices,
                witness: Witness::Sphere(Sphere {
                    center: Point::new(hull.lift(&rs.center)).expect("finite center"),
                    radius: rs.radius,
                }),
                slack: rs.slack,
                pair_distance,
            });
        }
    }
    certs.sort_by(|a, b| a.indices.cmp(&b.indices));
    Ok(certs)
}

/// D_f: the largest intrinsic distance over certified neighbor sets.
pub fn compute_df(certs: &[NeighborCertificate]) -> f64 {
    certs.iter().map(|c| c.pair_distance).fold(0.0, f64::max)
}

/// All certified pairs (i < j), sorted.
pub fn neighbor_pairs(certs: &[NeighborCertificate]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for c in certs {
        for (k, &i) in c.indices.iter().enumerate() {
            for &j in &c.indices[k + 1..] {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Groups of images within `eps` of each other (transitively), each sorted,
/// ordered by their smallest index.
fn coincidence_groups(points: &PointCloud, eps: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    // Sweep along a fixed generic direction; only points whose projections
    // are within eps can coincide.
    let m = points.dim();
    let dir: Vec<f64> = (0..m).map(|k| 1.0 + 0.618_033_988_75 * k as f64).collect();
    let len = dot(&dir, &dir).sqrt();
    let key: Vec<f64> = points.iter().map(|p| dot(p, &dir) / len).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key[a].total_cmp(&key[b]).then(a.cmp(&b)));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if key[j] - key[i] > eps {
                break;
            }
            if dist(points.get(i), points.get(j)) <= eps {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        by_root.entry(r).or_default().push(i);
    }
    let mut groups: Vec<Vec<usize>> = by_root.into_values().collect();
    groups.sort_by_key(|g| g[0]);
    groups
}

/// Orthonormal frame of the affine hull of a point subset.
struct AffineHull {
    origin: Vec<f64>,
    basis: Vec<Vec<f64>>,
}

impl AffineHull {
    fn of(points: &PointCloud, subset: &[usize], tol: f64) -> Self {
        let origin = points.get(subset[0]).to_vec();
        let m = points.dim();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        while basis.len() < m {
            // farthest point from the current span
            let mut best = (0.0, None);
            for &i in subset {
                let r = residual(points.get(i), &origin, &basis);
                let d = dot(&r, &r);
                if d > best.0 {
                    best = (d, Some(r));
                }
            }
            match best {
                (d, Some(r)) if d.sqrt() > tol => {
                    let l = d.sqrt();
                    basis.push(r.into_iter().map(|x| x / l).collect());
                }
                _ => break,
            }
        }
        Self { origin, basis }
    }

    fn project(&self, points: &PointCloud, subset: &[usize]) -> PointCloud {
        let k = self.basis.len();
        let mut out = Vec::with_capacity(subset.len() * k);
        for &i in subset {
            let p = points.get(i);
            let rel: Vec<f64> = p.iter().zip(&self.origin).map(|(a, b)| a - b).collect();
            out.extend(self.basis.iter().map(|e| dot(&rel, e)));
        }
        PointCloud::from_flat(k.max(1), if k == 0 { vec![0.0; subset.len()] } else { out }).expect("finite projection")
    }

    fn lift(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.origin.clone();
        for (yk, e) in y.iter().zip(&self.basis) {
            for (xi, ei) in x.iter_mut().zip(e) {
                *xi += yk * ei;
            }
        }
        x
    }
}

fn residual(p: &[f64], origin: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r: Vec<f64> = p.iter().zip(origin).map(|(a, b)| a - b).collect();
    for e in basis {
        let c = dot(&r, e);
        r.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
    }
    r
}

/// A checked empty sphere in projected coordinates; `members` index into the
/// representative list.
struct RepSphere {
    members: Vec<usize>,
    center: Vec<f64>,
    radius: f64,
    slack: f64,
}

/// Empty spheres covering every neighbor pair among distinct points.
fn rep_spheres(points: &PointCloud, s: f64, tol: &Tolerances) -> Result<Vec<RepSphere>> {
    let n = points.len();
    let k = points.dim();
    if k == 1 {
        return Ok(line_spheres(points, s, tol));
    }
    let grid = Grid::new(points);
    let checker = SphereChecker {
        points,
        grid: &grid,
        s,
        tol,
    };
    let cells = if n < k + 2 {
        Err(format!("{n} points in dimension {k}"))
    } else {
        match delaunay_cells(points, false) {
            Cells::Simplices(c) => Ok(c),
            Cells::Failed(_) => {
                if let Some(all) = checker.all_cospherical() {
                    return Ok(vec![all]);
                }
                match delaunay_cells(points, true) {
                    Cells::Simplices(c) => Ok(c),
                    Cells::Failed(msg) => Err(msg),
                }
            }
        }
    };
    let cells = match cells {
        Ok(c) => c,
        Err(_) if n <= BRUTE_FORCE_LIMIT => {
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    edges.push((a, b));
                }
            }
            return Ok(edges.par_iter().filter_map(|&(a, b)| checker.pair(a, b)).collect());
        }
        Err(msg) => {
            return Err(Error::Degenerate(format!(
                "could not triangulate {n} distinct images in dimension {k}: {msg}"
            )))
        }
    };

    let checked: Vec<Option<RepSphere>> = cells.par_iter().map(|c| checker.cell(c)).collect();
    let mut spheres: Vec<RepSphere> = Vec::new();
    let mut uncovered = BTreeSet::new();
    {
        let mut containing: HashMap<usize, Vec<usize>> = HashMap::new();
        for (id, rs) in checked.iter().enumerate() {
            if let Some(rs) = rs {
                for &v in &rs.members {
                    containing.entry(v).or_default().push(id);
                }
            }
        }
        for (cell, rs) in cells.iter().zip(&checked) {
            if rs.is_some() {
                continue;
            }
            for (x, &a) in cell.iter().enumerate() {
                for &b in &cell[x + 1..] {
                    let covered = match (containing.get(&a), containing.get(&b)) {
                        (Some(la), Some(lb)) => la.iter().any(|id| lb.contains(id)),
                        _ => false,
                    };
                    if !covered {
                        uncovered.insert((a, b));
                    }
                }
            }
        }
    }
    spheres.extend(checked.into_iter().flatten());
    let uncovered: Vec<(usize, usize)> = uncovered.into_iter().collect();
    spheres.extend(
        uncovered
            .par_iter()
            .filter_map(|&(a, b)| checker.pair(a, b))
            .collect::<Vec<_>>(),
    );
    Ok(spheres)
}

/// Images on a line: neighbors are consecutive distinct values.
fn line_spheres(points: &PointCloud, s: f64, tol: &Tolerances) -> Vec<RepSphere> {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| points.get(a)[0].total_cmp(&points.get(b)[0]).then(a.cmp(&b)));
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for (w, pair) in order.windows(2).enumerate() {
        let (x, y) = (points.get(pair[0])[0], points.get(pair[1])[0]);
        let c = 0.5 * (x + y);
        let r = 0.5 * (y - x);
        // nearest outside values on either side
        let left = if w > 0 { x - points.get(order[w - 1])[0] } else { s };
        let right = if w + 2 < n { points.get(order[w + 2])[0] - y } else { s };
        let mut members = vec![pair[0], pair[1]];
        members.sort_unstable();
        out.push(RepSphere {
            members,
            center: vec![c],
            radius: r,
            slack: left.min(right).min(s),
        });
    }
    let _ = tol;
    out
}

struct SphereChecker<'a> {
    points: &'a PointCloud,
    grid: &'a Grid<'a>,
    s: f64,
    tol: &'a Tolerances,
}

impl SphereChecker<'_> {
    fn sphere(&self, center: Vec<f64>, radius: f64) -> Option<RepSphere> {
        let band = self.grid.cell_size().max(self.tol.on_sphere * self.s);
        let reach = radius + band;
        let qlo: Vec<f64> = center.iter().map(|c| c - reach).collect();
        let qhi: Vec<f64> = center.iter().map(|c| c + reach).collect();
        let mut cand = Vec::new();
        let full = self.grid.query(&qlo, &qhi, &mut cand);
        let cap = if full { self.s } else { band.min(self.s) };
        let ok = check_sphere(
            self.points,
            cand,
            &center,
            radius,
            self.tol.on_sphere * self.s,
            self.tol.eps_inside * self.s,
            cap,
        )?;
        Some(RepSphere {
            members: ok.members,
            center,
            radius,
            slack: ok.slack,
        })
    }

    fn cell(&self, cell: &[usize]) -> Option<RepSphere> {
        let pts: Vec<&[f64]> = cell.iter().map(|&i| self.points.get(i)).collect();
        let sp = circumsphere(&pts, self.tol.rank).ok()?;
        let rs = self.sphere(sp.center.into_inner(), sp.radius)?;
        // the cell's own vertices must have been recognized as members
        cell.iter().all(|v| rs.members.binary_search(v).is_ok()).then_some(rs)
    }

    fn pair(&self, a: usize, b: usize) -> Option<RepSphere> {
        match decide(a, b, self.points, 0..self.points.len(), self.s, self.tol) {
            Decision::Sphere {
                center,
                radius,
                members,
                slack,
            } => Some(RepSphere {
                members,
                center,
                radius,
                slack,
            }),
            _ => None,
        }
    }

    /// If every point lies on one sphere, that sphere (all points members).
    fn all_cospherical(&self) -> Option<RepSphere> {
        let k = self.points.dim();
        let n = self.points.len();
        // k+1 affinely independent points: greedy farthest-from-span picks
        let mut chosen = vec![0usize];
        let origin = self.points.get(0).to_vec();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        while chosen.len() < k + 1 {
            let (i, r) = (0..n)
                .map(|i| (i, residual(self.points.get(i), &origin, &basis)))
                .max_by(|a, b| dot(&a.1, &a.1).total_cmp(&dot(&b.1, &b.1)))?;
            let l = dot(&r, &r).sqrt();
            if l == 0.0 {
                return None;
            }
            basis.push(r.into_iter().map(|x| x / l).collect());
            chosen.push(i);
        }
        let pts: Vec<&[f64]> = chosen.iter().map(|&i| self.points.get(i)).collect();
        let sp = circumsphere(&pts, self.tol.rank).ok()?;
        let c = sp.center.coords();
        let on = self.tol.on_sphere * self.s;
        let all_on = self.points.iter().all(|p| (dist2(p, c).sqrt() - sp.radius).abs() <= on);
        all_on.then(|| RepSphere {
            members: (0..n).collect(),
            center: c.to_vec(),
            radius: sp.radius,
            slack: self.s,
        })
    }
}
