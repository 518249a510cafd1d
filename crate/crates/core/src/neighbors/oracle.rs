//! Exhaustive pair predicate for tiny instances.
//!
//! Centers of spheres through f(a) and f(b) form the bisector hyperplane, and
//! emptiness of the open ball is linear in the center, so the feasible
//! centers form a polyhedron. Its vertices are circumcenters of f(a), f(b)
//! and m−1 further images; lower-dimensional circumcenters cover polyhedra
//! with a lineality space. Enumerating all of them, plus the diametral
//! center and the limiting half-space, decides the predicate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{circumsphere, dist, dot, norm, Point, Sphere};
use crate::maps::ImageSet;
use crate::tolerance::Tolerances;

pub const ORACLE_MAX_POINTS: usize = 14;
pub const ORACLE_MAX_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleWitness {
    Sphere(Sphere),
    Coincidence,
    /// Open half-space bounded by a hyperplane through f(a) and f(b).
    Halfspace {
        normal: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub neighbor: bool,
    pub witness: Option<OracleWitness>,
}

pub fn pair_is_neighbor_oracle(a: usize, b: usize, images: &ImageSet, tol: &Tolerances) -> Result<OracleVerdict> {
    let n = images.len();
    let m = images.dim();
    if n > ORACLE_MAX_POINTS || m > ORACLE_MAX_DIM {
        return Err(Error::ScaleGuard(format!(
            "{n} points in dimension {m} (limit {ORACLE_MAX_POINTS} points, dimension {ORACLE_MAX_DIM})"
        )));
    }
    if a >= n || b >= n || a == b {
        return Err(Error::Invalid(format!("pair ({a}, {b}) out of {n} images")));
    }
    let s = images.images.extent();
    let (pa, pb) = (images.get(a), images.get(b));
    let yes = |witness| {
        Ok(OracleVerdict {
            neighbor: true,
            witness: Some(witness),
        })
    };
    if dist(pa, pb) <= tol.eps_coincide * s {
        return yes(OracleWitness::Coincidence);
    }
    let coincide = tol.eps_coincide * s;
    let others: Vec<usize> = (0..n)
        .filter(|&i| dist(images.get(i), pa) > coincide && dist(images.get(i), pb) > coincide)
        .collect();
    let empty = |c: &[f64], r: f64| others.iter().all(|&i| dist(images.get(i), c) >= r - tol.eps_inside * s);

    // Diametral sphere, then circumspheres with up to m−1 extra images.
    let mid: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| 0.5 * (x + y)).collect();
    let r = 0.5 * dist(pa, pb);
    if empty(&mid, r) {
        return yes(OracleWitness::Sphere(Sphere {
            center: Point::new(mid).expect("finite midpoint"),
            radius: r,
        }));
    }
    for extra in 1..m {
        let mut subset: Vec<usize> = (0..extra).collect();
        if subset.len() > others.len() {
            break;
        }
        loop {
            let mut pts: Vec<&[f64]> = vec![pa, pb];
            pts.extend(subset.iter().map(|&k| images.get(others[k])));
            if let Ok(sp) = circumsphere(&pts, tol.rank) {
                if empty(sp.center.coords(), sp.radius) {
                    return yes(OracleWitness::Sphere(sp));
                }
            }
            if !crate::geom::next_combination(&mut subset, others.len()) {
                break;
            }
        }
    }

    if let Some(normal) = strict_halfspace(pa, pb, images, &others, tol.eps_inside * s) {
        return yes(OracleWitness::Halfspace { normal });
    }
    Ok(OracleVerdict {
        neighbor: false,
        witness: None,
    })
}

/// A unit normal d ⊥ f(b) − f(a) with ⟨y − f(a), d⟩ ≤ −margin for all other
/// images y, found by enumerating the arc midpoints that bound the feasible
/// cone of directions (m ≤ 3, so the direction space is at most a circle).
fn strict_halfspace(pa: &[f64], pb: &[f64], images: &ImageSet, others: &[usize], margin: f64) -> Option<Vec<f64>> {
    let m = pa.len();
    let u: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| y - x).collect();
    let basis = perpendicular_basis(&u);
    if basis.is_empty() {
        return None;
    }
    let z: Vec<Vec<f64>> = others
        .iter()
        .map(|&i| {
            let y = images.get(i);
            let rel: Vec<f64> = y.iter().zip(pa).map(|(p, q)| p - q).collect();
            basis.iter().map(|e| dot(&rel, e)).collect()
        })
        .collect();
    let ok = |d: &[f64]| z.iter().all(|zi| dot(zi, d) <= -margin);
    let lift = |d: &[f64]| {
        let mut out = vec![0.0; m];
        for (di, e) in d.iter().zip(&basis) {
            for (o, ek) in out.iter_mut().zip(e) {
                *o += di * ek;
            }
        }
        out
    };

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    match basis.len() {
        1 => {
            candidates.push(vec![1.0]);
            candidates.push(vec![-1.0]);
        }
        _ => {
            let mut bounds: Vec<[f64; 2]> = Vec::new();
            for zi in &z {
                let l = norm(zi);
                if l > 0.0 {
                    candidates.push(vec![-zi[0] / l, -zi[1] / l]);
                    bounds.push([-zi[1] / l, zi[0] / l]);
                    bounds.push([zi[1] / l, -zi[0] / l]);
                }
            }
            for i in 0..bounds.len() {
                for j in i + 1..bounds.len() {
                    let v = [bounds[i][0] + bounds[j][0], bounds[i][1] + bounds[j][1]];
                    let l = norm(&v);
                    if l > 1e-12 {
                        candidates.push(vec![v[0] / l, v[1] / l]);
                        candidates.push(vec![-v[0] / l, -v[1] / l]);
                    }
                }
            }
            if z.is_empty() {
                candidates.push(vec![1.0, 0.0]);
            }
        }
    }
    candidates.into_iter().find(|d| ok(d)).map(|d| lift(&d))
}

/// Orthonormal basis of the complement of `u`.
fn perpendicular_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let m = u.len();
    let l = norm(u);
    if l == 0.0 {
        return Vec::new();
    }
    let mut basis: Vec<Vec<f64>> = vec![u.iter().map(|x| x / l).collect()];
    for k in 0..m {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        for b in &basis {
            let p = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let lv = norm(&v);
        if lv > 1e-6 {
            basis.push(v.into_iter().map(|x| x / lv).collect());
        }
        if basis.len() == m {
            break;
        }
    }
    basis.remove(0);
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PointCloud;

    fn set(rows: &[[f64; 2]]) -> ImageSet {
        ImageSet::new(PointCloud::from_rows(rows).unwrap())
    }

    #[test]
    fn far_third_point_gives_gabriel_sphere() {
        let v = pair_is_neighbor_oracle(
            0,
            1,
            &set(&[[0.0, 0.0], [1.0, 0.0], [0.5, 10.0]]),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(v.neighbor);
        let Some(OracleWitness::Sphere(sp)) = v.witness else {
            panic!("{v:?}")
        };
        assert_eq!(sp.center.coords(), &[0.5, 0.0]);
        assert_eq!(sp.radius, 0.5);
    }

    #[test]
    fn collinear_midpoint_blocks() {
        let v = pair_is_neighbor_oracle(
            0,
            1,
            &set(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]]),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!v.neighbor);
    }

    #[test]
    fn slightly_raised_third_point_allows_off_axis_sphere() {
        let v = pair_is_neighbor_oracle(
            0,
            1,
            &set(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.1]]),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(v.neighbor);
        // Any empty sphere has its center below the axis: (0.1 + t)² ≥ 0.25 + t²
        // for the center (0.5, −t) requires t ≥ 1.2.
        match v.witness {
            Some(OracleWitness::Sphere(sp)) => assert!(sp.center.coords()[1] <= -1.2 + 1e-9),
            Some(OracleWitness::Halfspace { normal }) => assert!(normal[1] > 0.0),
            w => panic!("{w:?}"),
        }
    }

    #[test]
    fn coincident_pair() {
        let v = pair_is_neighbor_oracle(
            0,
            1,
            &set(&[[2.0, 2.0], [2.0, 2.0], [2.0, 2.1]]),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(v.witness, Some(OracleWitness::Coincidence));
    }

    #[test]
    fn scale_guard() {
        let rows = vec![[0.0, 0.0]; 15];
        let err = pair_is_neighbor_oracle(0, 1, &set(&rows), &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::ScaleGuard(_)));
    }
}
