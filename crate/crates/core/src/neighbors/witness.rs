//! Witness point: a center equidistant from every cover element's image and
//! from the whole image.
//!
//! slack(x) = maxⱼ d(x, f(Cⱼ)) − d(x, f(X)) vanishes exactly at such points.
//! It is minimized by a multi-start simplex search; independently, every
//! certified empty sphere whose members meet all cover elements ("rainbow")
//! has slack zero up to rounding at its center, so those centers are scored
//! too and the better of the two answers is reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fast::{pair_is_neighbor_fast, Verdict};
use super::graph::neighbor_graph;
use super::{NeighborCertificate, Witness};
use crate::domains::{CoverAssignment, CubeFaces, DomainKind, SampledDomain};
use crate::error::{Error, Result};
use crate::geom::{circumsphere, dist2};
use crate::maps::ImageSet;
use crate::optim::NelderMead;
use crate::tolerance::Tolerances;

const RANDOM_PROBES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    Search,
    RainbowSphere,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub w: Vec<f64>,
    /// R = d(w, f(X)).
    pub radius: f64,
    /// slack(w) ≥ 0.
    pub residual: f64,
    /// ε_witness scaled to the image.
    pub threshold: f64,
    pub found: bool,
    /// `(cover element, sample index)` nearest to the sphere ∂B_R(w).
    pub chosen: Vec<(usize, usize)>,
    pub source: WitnessSource,
    pub evaluations: usize,
}

impl WitnessReport {
    /// Turn an unsuccessful search into an error.
    pub fn require(self) -> Result<Self> {
        if self.found {
            Ok(self)
        } else {
            Err(Error::NoWitnessFound {
                residual: self.residual,
                threshold: self.threshold,
            })
        }
    }
}

struct Slack<'a> {
    images: &'a ImageSet,
    members: Vec<Vec<usize>>,
}

impl Slack<'_> {
    /// Nearest squared distance to each element's images.
    fn element_d2(&self, x: &[f64]) -> Vec<f64> {
        self.members
            .iter()
            .map(|ms| {
                ms.iter()
                    .map(|&i| dist2(x, self.images.get(i)))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let d = self.element_d2(x);
        let hi = d.iter().copied().fold(0.0, f64::max).sqrt();
        let lo = d.iter().copied().fold(f64::INFINITY, f64::min).sqrt();
        hi - lo
    }
}

pub fn witness_point(
    domain: &SampledDomain,
    cover: &CoverAssignment,
    images: &ImageSet,
    tol: &Tolerances,
) -> Result<WitnessReport> {
    let n = domain.len();
    if images.len() != n || cover.labels.len() != n {
        return Err(Error::Invalid("domain, cover and images are not aligned".into()));
    }
    if !cover.common_intersection_empty() {
        return Err(Error::CoverDegenerate("cover elements share a common sample".into()));
    }
    let m = images.dim();
    let s = images.images.extent();
    let slack = Slack {
        images,
        members: (0..cover.element_count).map(|j| cover.members(j)).collect(),
    };
    let threshold = tol.eps_witness * s;

    // Search.
    let mut starts: Vec<Vec<f64>> = Vec::new();
    let mut centroid = vec![0.0; m];
    for p in images.images.iter() {
        for (c, x) in centroid.iter_mut().zip(p) {
            *c += x / n as f64;
        }
    }
    starts.push(centroid);
    let reps: Vec<&[f64]> = slack.members.iter().map(|ms| images.get(ms[0])).collect();
    if reps.len() <= m + 1 {
        if let Ok(sp) = circumsphere(&reps, tol.rank) {
            starts.push(sp.center.into_inner());
        }
    }
    let (lo, hi) = bounding_box(images);
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed() ^ 0x5749_544e);
    let mut best_probe = (f64::INFINITY, Vec::new());
    for _ in 0..RANDOM_PROBES {
        let x: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| a + (b - a) * rng.gen::<f64>())
            .collect();
        let v = slack.eval(&x);
        if v < best_probe.0 {
            best_probe = (v, x);
        }
    }
    starts.push(best_probe.1);

    let mut evaluations = RANDOM_PROBES;
    let mut best = (f64::INFINITY, Vec::new());
    if s > 0.0 {
        let nm = NelderMead {
            f_tol: 0.0,
            x_tol: 1e-13 * s,
            ..NelderMead::default()
        }
        .with_budget(400 * (m + 1));
        for x0 in &starts {
            let mut x = x0.clone();
            let mut step = 0.1 * s;
            for _ in 0..3 {
                let r = nm.clone().with_step(step).minimize(|x| slack.eval(x), &x);
                evaluations += r.evals;
                x = r.x;
                step *= 0.05;
            }
            let v = slack.eval(&x);
            if v < best.0 {
                best = (v, x);
            }
        }
    } else {
        best = (0.0, images.get(0).to_vec());
    }
    let mut source = WitnessSource::Search;

    // Rainbow spheres.
    if s > 0.0 && best.0 > 0.0 {
        let certs = neighbor_graph(images, domain, tol)?;
        for c in certs.iter().filter(|c| is_rainbow(c, cover)) {
            let center = match &c.witness {
                Witness::Sphere(sp) => sp.center.coords().to_vec(),
                Witness::Coincidence => images.get(c.indices[0]).to_vec(),
            };
            let v = slack.eval(&center);
            evaluations += 1;
            if v <= best.0 {
                best = (v, center);
                source = WitnessSource::RainbowSphere;
            }
        }
    }

    let (residual, w) = best;
    let d2 = slack.element_d2(&w);
    let radius = d2.iter().copied().fold(f64::INFINITY, f64::min).sqrt();
    let tie = tol.on_sphere * s;
    let chosen = slack
        .members
        .iter()
        .enumerate()
        .map(|(j, ms)| {
            let gap = |i: usize| (dist2(&w, images.get(i)).sqrt() - radius).abs();
            let g = ms.iter().map(|&i| gap(i)).fold(f64::INFINITY, f64::min);
            let i = *ms.iter().find(|&&i| gap(i) <= g + tie).expect("non-empty element");
            (j, i)
        })
        .collect();
    Ok(WitnessReport {
        w,
        radius,
        residual: residual.max(0.0),
        threshold,
        found: residual <= threshold,
        chosen,
        source,
        evaluations,
    })
}

fn is_rainbow(cert: &NeighborCertificate, cover: &CoverAssignment) -> bool {
    let mut hit = vec![false; cover.element_count];
    for &i in &cert.indices {
        for &l in &cover.labels[i] {
            hit[l] = true;
        }
    }
    hit.into_iter().all(|h| h)
}

fn bounding_box(images: &ImageSet) -> (Vec<f64>, Vec<f64>) {
    let m = images.dim();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for p in images.images.iter() {
        for k in 0..m {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointFaces {
    /// Sample on σⱼ = {xⱼ = 0}.
    pub near: usize,
    /// Sample on σ'ⱼ = {xⱼ = 1}.
    pub far: usize,
    /// The coordinate j (0-based).
    pub face: usize,
    pub verdict: Verdict,
    pub certificate: Option<NeighborCertificate>,
    pub witness: WitnessReport,
}

/// Pair of f-neighbors on opposite faces of ∂[0,1]ᵐ, extracted from the
/// witness point of the cover {σ₁, …, σₘ, P}.
pub fn disjoint_faces_check(
    domain: &SampledDomain,
    cover: &CoverAssignment,
    faces: &CubeFaces,
    images: &ImageSet,
    tol: &Tolerances,
) -> Result<DisjointFaces> {
    if domain.kind() != DomainKind::CubeBoundary(faces.m) || cover.element_count != faces.m + 1 {
        return Err(Error::Invalid("expected the cube-boundary cover".into()));
    }
    let report = witness_point(domain, cover, images, tol)?.require()?;
    let far = report.chosen[faces.far_element()].1;
    let mut fallback = None;
    for j in 0..faces.m {
        if !faces.on_far_face(domain.sample(far), j) {
            continue;
        }
        let near = report.chosen[j].1;
        let (verdict, certificate) = pair_is_neighbor_fast(near, far, images, Some(domain), tol);
        let found = DisjointFaces {
            near,
            far,
            face: j,
            verdict,
            certificate,
            witness: report.clone(),
        };
        if verdict == Verdict::Yes {
            return Ok(found);
        }
        fallback.get_or_insert(found);
    }
    fallback.ok_or_else(|| Error::Invalid("chosen point of P lies on no far face".into()))
}
