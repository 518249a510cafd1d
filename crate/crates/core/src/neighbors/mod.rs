//! The f-neighbor predicate on sampled images, neighbor graphs, D_f and the
//! witness-point search.
//!
//! Sample indices a₁,…,a_k are f-neighbors when their images lie on a common
//! sphere whose open ball contains no image, or when all their images
//! coincide. Everything here is decided against the sampled image set.

mod fast;
mod graph;
mod grid;
mod oracle;
mod witness;

use serde::{Deserialize, Serialize};

pub use fast::{pair_is_neighbor_fast, Verdict};
pub use graph::{compute_df, neighbor_graph, neighbor_pairs};
pub use oracle::{pair_is_neighbor_oracle, OracleVerdict, OracleWitness, ORACLE_MAX_DIM, ORACLE_MAX_POINTS};
pub use witness::{disjoint_faces_check, witness_point, DisjointFaces, WitnessReport};

use crate::domains::SampledDomain;
use crate::geom::{dist, PointCloud, Sphere};
use crate::maps::ImageSet;
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Sphere(Sphere),
    /// All member images coincide (radius-zero case).
    Coincidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborCertificate {
    /// Sorted sample indices whose images lie on the witness.
    pub indices: Vec<usize>,
    pub witness: Witness,
    /// Lower bound on how far non-member images stay outside the open ball
    /// (negative: the largest tolerated intrusion). Capped at the image scale.
    pub slack: f64,
    /// Largest intrinsic distance between two members.
    pub pair_distance: f64,
}

impl NeighborCertificate {
    /// Re-check the certificate against a full image set with a linear scan.
    pub fn verify(&self, images: &ImageSet, tol: &Tolerances) -> bool {
        let s = images.images.extent();
        match &self.witness {
            Witness::Coincidence => {
                let p = images.get(self.indices[0]);
                self.indices
                    .iter()
                    .all(|&i| dist(images.get(i), p) <= tol.eps_coincide * s)
            }
            Witness::Sphere(sp) => {
                let c = sp.center.coords();
                let on = self
                    .indices
                    .iter()
                    .all(|&i| (dist(images.get(i), c) - sp.radius).abs() <= tol.on_sphere * s);
                on && images
                    .images
                    .iter()
                    .all(|y| dist(y, c) - sp.radius >= -tol.eps_inside * s)
            }
        }
    }
}

/// Largest ρ between two of the given samples.
pub(crate) fn max_pair_distance(domain: Option<&SampledDomain>, indices: &[usize]) -> f64 {
    let Some(domain) = domain else {
        return 0.0;
    };
    // Antipodal members already realize the sphere's diameter.
    if let Some(anti) = domain.antipode() {
        if indices.len() > 64 {
            let set: std::collections::HashSet<usize> = indices.iter().copied().collect();
            if indices.iter().any(|&i| set.contains(&anti[i])) {
                return indices
                    .iter()
                    .filter(|&&i| set.contains(&anti[i]))
                    .map(|&i| domain.intrinsic_dist(i, anti[i]))
                    .fold(0.0, f64::max);
            }
        }
    }
    let mut best = 0.0f64;
    for (k, &i) in indices.iter().enumerate() {
        for &j in &indices[k + 1..] {
            best = best.max(domain.intrinsic_dist(i, j));
        }
    }
    best
}

/// The pair of samples realizing D_f, with its intrinsic distance: the
/// lowest-index pair of maximal ρ within the first certificate attaining it.
pub fn extremal_pair(domain: &SampledDomain, certs: &[NeighborCertificate]) -> Option<(usize, usize, f64)> {
    let df = compute_df(certs);
    let cert = certs.iter().find(|c| c.pair_distance == df && c.indices.len() >= 2)?;
    let mut best: Option<(usize, usize, f64)> = None;
    for (k, &i) in cert.indices.iter().enumerate() {
        for &j in &cert.indices[k + 1..] {
            let d = domain.intrinsic_dist(i, j);
            if best.is_none_or(|b| d > b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best
}

/// Result of testing one candidate sphere against (a subset of) the images.
#[derive(Debug)]
pub(crate) struct SphereCheck {
    pub members: Vec<usize>,
    pub slack: f64,
}

/// Scan `candidates` against the sphere: members within `on_tol`, failure if
/// any point intrudes by more than `inside_tol`. `cap` bounds the slack from
/// above (points outside the scanned region are at least that far out).
pub(crate) fn check_sphere(
    points: &PointCloud,
    candidates: impl IntoIterator<Item = usize>,
    center: &[f64],
    radius: f64,
    on_tol: f64,
    inside_tol: f64,
    cap: f64,
) -> Option<SphereCheck> {
    let mut members = Vec::new();
    let mut slack = cap;
    for i in candidates {
        let gap = dist(points.get(i), center) - radius;
        if gap < -inside_tol {
            return None;
        }
        if gap.abs() <= on_tol {
            members.push(i);
        } else {
            slack = slack.min(gap);
        }
    }
    members.sort_unstable();
    Some(SphereCheck { members, slack })
}
