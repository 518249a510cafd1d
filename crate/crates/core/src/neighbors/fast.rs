//! Scalable pair predicate.
//!
//! With f(a) translated to the origin, a center c on the bisector hyperplane
//! has radius |c| and y stays outside the open ball iff
//! 2⟨c, y⟩ − |y|² ≤ 0. Maximizing the common margin t in
//! 2⟨c, y⟩ − |y|² ≤ −t is a linear program. A feasible optimum is turned
//! into a sphere and re-checked exactly; an infeasible one bounds the
//! intrusion of the worst image over a box of centers, which is what makes a
//! negative verdict definite.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};
use serde::{Deserialize, Serialize};

use super::{check_sphere, max_pair_distance, NeighborCertificate, Witness};
use crate::domains::SampledDomain;
use crate::geom::{dist, dot, Point, PointCloud, Sphere};
use crate::maps::ImageSet;
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Uncertain,
}

/// Decide whether samples `a` and `b` are f-neighbors. `domain` (optional)
/// supplies ρ for the certificate's pair distance; without it the distance
/// is reported as 0.
pub fn pair_is_neighbor_fast(
    a: usize,
    b: usize,
    images: &ImageSet,
    domain: Option<&SampledDomain>,
    tol: &Tolerances,
) -> (Verdict, Option<NeighborCertificate>) {
    let s = images.images.extent();
    let all = 0..images.len();
    match decide(a, b, &images.images, all, s, tol) {
        Decision::Coincidence(members) => {
            let slack = (0..images.len())
                .filter(|i| members.binary_search(i).is_err())
                .map(|i| dist(images.get(i), images.get(a)))
                .fold(s, f64::min);
            let pair_distance = max_pair_distance(domain, &members);
            (
                Verdict::Yes,
                Some(NeighborCertificate {
                    indices: members,
                    witness: Witness::Coincidence,
                    slack,
                    pair_distance,
                }),
            )
        }
        Decision::Sphere {
            center,
            radius,
            members,
            slack,
        } => {
            let pair_distance = max_pair_distance(domain, &members);
            (
                Verdict::Yes,
                Some(NeighborCertificate {
                    indices: members,
                    witness: Witness::Sphere(Sphere {
                        center: Point::new(center).expect("finite center"),
                        radius,
                    }),
                    slack,
                    pair_distance,
                }),
            )
        }
        Decision::No => (Verdict::No, None),
        Decision::Uncertain => (Verdict::Uncertain, None),
    }
}

pub(crate) enum Decision {
    Coincidence(Vec<usize>),
    Sphere {
        center: Vec<f64>,
        radius: f64,
        members: Vec<usize>,
        slack: f64,
    },
    No,
    Uncertain,
}

/// Core decision over the points `candidates` of `points` (which must
/// include `a` and `b`); `s` is the scale tolerances are relative to.
pub(crate) fn decide(
    a: usize,
    b: usize,
    points: &PointCloud,
    candidates: impl Iterator<Item = usize> + Clone,
    s: f64,
    tol: &Tolerances,
) -> Decision {
    let (pa, pb) = (points.get(a), points.get(b));
    let coincide = tol.eps_coincide * s;
    if s == 0.0 || dist(pa, pb) <= coincide {
        let mut members: Vec<usize> = candidates.filter(|&i| dist(points.get(i), pa) <= coincide).collect();
        members.sort_unstable();
        return Decision::Coincidence(members);
    }
    let check = |c: &[f64], r: f64| {
        check_sphere(
            points,
            candidates.clone(),
            c,
            r,
            tol.on_sphere * s,
            tol.eps_inside * s,
            s,
        )
    };

    // Gabriel sphere.
    let mid: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| 0.5 * (x + y)).collect();
    let r = 0.5 * dist(pa, pb);
    if let Some(ok) = check(&mid, r) {
        return Decision::Sphere {
            center: mid,
            radius: r,
            members: ok.members,
            slack: ok.slack,
        };
    }

    // Normalized coordinates: f(a) at the origin, unit scale.
    let m = pa.len();
    let u: Vec<f64> = pa.iter().zip(pb).map(|(x, y)| (y - x) / s).collect();
    let uu = dot(&u, &u);
    let z: Vec<Vec<f64>> = candidates
        .clone()
        .filter(|&i| {
            let y = points.get(i);
            dist(y, pa) > coincide && dist(y, pb) > coincide
        })
        .map(|i| points.get(i).iter().zip(pa).map(|(y, x)| (y - x) / s).collect())
        .collect();
    let half_u: Vec<f64> = u.iter().map(|x| 0.5 * x).collect();
    let eps = tol.eps_inside;

    let solve = |rho: f64| -> Option<(f64, Vec<f64>)> {
        let mut lp = Problem::new(OptimizationDirection::Maximize);
        let c: Vec<_> = half_u.iter().map(|&h| lp.add_var(0.0, (h - rho, h + rho))).collect();
        let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
        lp.add_constraint(c.iter().zip(&u).map(|(&v, &uk)| (v, uk)), ComparisonOp::Eq, 0.5 * uu);
        for zy in &z {
            let mut expr: Vec<_> = c.iter().zip(zy).map(|(&v, &zk)| (v, 2.0 * zk)).collect();
            expr.push((t, 1.0));
            lp.add_constraint(expr, ComparisonOp::Le, dot(zy, zy));
        }
        let Ok(SolveOutcome::Solution(sol)) = lp.solve() else {
            return None;
        };
        Some((sol[t], c.iter().map(|&v| sol[v]).collect()))
    };
    // Largest radius of a sphere through f(a) centered in the box.
    let r_max = |rho: f64| 0.5 * uu.sqrt() + (m as f64).sqrt() * rho;

    let mut layers: Vec<f64> = Vec::new();
    let mut rho = 1.0;
    while rho < tol.max_radius {
        layers.push(rho);
        rho *= 10.0;
    }
    layers.push(tol.max_radius);

    let try_center = |c: Vec<f64>| -> Option<Decision> {
        // project onto the bisector and return to input coordinates
        let off = (dot(&c, &u) - 0.5 * uu) / uu;
        let center: Vec<f64> = c
            .iter()
            .zip(&u)
            .zip(pa)
            .map(|((ck, uk), xk)| xk + s * (ck - off * uk))
            .collect();
        let radius = dist(&center, pa);
        check(&center, radius).map(|ok| Decision::Sphere {
            center,
            radius,
            members: ok.members,
            slack: ok.slack,
        })
    };

    let Some((t_big, c_big)) = solve(*layers.last().expect("non-empty")) else {
        return Decision::Uncertain;
    };
    if t_big >= 0.0 {
        return try_center(c_big).unwrap_or(Decision::Uncertain);
    }
    let bound = |t: f64, rho: f64| -t / (2.0 * r_max(rho));
    if bound(t_big, tol.max_radius) > eps {
        return Decision::No;
    }
    // Shell by shell: centers in box_i \ box_{i−1} have radius ≤ r_max(ρ_i)
    // and power intrusion ≥ −t*_i.
    for &rho in &layers[..layers.len() - 1] {
        let Some((t, c)) = solve(rho) else {
            return Decision::Uncertain;
        };
        if t >= 0.0 {
            return try_center(c).unwrap_or(Decision::Uncertain);
        }
        if bound(t, rho) <= eps {
            // A near-feasible center may still pass the tolerant check.
            return try_center(c).unwrap_or(Decision::Uncertain);
        }
    }
    Decision::No
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{sample_sphere, SamplingScheme};
    use crate::maps::{evaluate, MapSpec};

    fn set(rows: &[[f64; 2]]) -> ImageSet {
        ImageSet::new(PointCloud::from_rows(rows).unwrap())
    }

    #[test]
    fn spec_triples() {
        let tol = Tolerances::default();
        let (v, c) = pair_is_neighbor_fast(0, 1, &set(&[[0.0, 0.0], [1.0, 0.0], [0.5, 10.0]]), None, &tol);
        assert_eq!(v, Verdict::Yes);
        assert!(matches!(c.unwrap().witness, Witness::Sphere(ref sp) if sp.radius == 0.5));
        let (v, _) = pair_is_neighbor_fast(0, 1, &set(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.0]]), None, &tol);
        assert_eq!(v, Verdict::No);
        let (v, c) = pair_is_neighbor_fast(0, 1, &set(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.1]]), None, &tol);
        assert_eq!(v, Verdict::Yes);
        let Witness::Sphere(sp) = c.unwrap().witness else {
            panic!()
        };
        assert!(sp.center.coords()[1] <= -1.2 + 1e-6);
    }

    #[test]
    fn identity_circle_every_pair() {
        let d = sample_sphere(1, 64, 0, SamplingScheme::QuasiUniform).unwrap();
        let img = evaluate(&MapSpec::identity(2), &d).unwrap();
        let tol = Tolerances::default();
        for a in 0..64 {
            for b in a + 1..64 {
                let (v, c) = pair_is_neighbor_fast(a, b, &img, Some(&d), &tol);
                assert_eq!(v, Verdict::Yes, "{a} {b}");
                assert!(c.unwrap().verify(&img, &tol));
            }
        }
    }

    #[test]
    fn constant_map_coincidence() {
        let d = sample_sphere(1, 16, 0, SamplingScheme::QuasiUniform).unwrap();
        let img = evaluate(&MapSpec::constant(&[1.0, 2.0]), &d).unwrap();
        let (v, c) = pair_is_neighbor_fast(0, 8, &img, Some(&d), &Tolerances::default());
        assert_eq!(v, Verdict::Yes);
        let c = c.unwrap();
        assert_eq!(c.witness, Witness::Coincidence);
        assert_eq!(c.indices.len(), 16);
        assert!((c.pair_distance - 2.0).abs() < 1e-12);
    }
}
