//! Partition-of-unity map h: X → ∂Δⁿ⁻¹ of a closed cover and its degree.
//!
//! Each element Cᵢ is thickened to the open set Uᵢ = {x : ρ(x, Cᵢ) < r} and
//! gᵢ(x) = max(0, r − ρ(x, Cᵢ)) is normalized to φ. h(x) = Σ φᵢ(x) eᵢ lies
//! on the boundary of the standard simplex as long as no sample is within r
//! of every element, i.e. r is below the cover's covering radius
//! r* = minₓ maxᵢ ρ(x, Cᵢ).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delaunay::hull_triangles;
use crate::domains::{CoverAssignment, DomainKind, SampledDomain};
use crate::error::{Error, Result};
use crate::geom::{dist, dot, norm, PointCloud};

/// Thickening used by `certify_cover`, as a fraction of r*.
pub const DEFAULT_THICKENING: f64 = 0.6;
/// Further fractions tried to check the class does not depend on r.
pub const RETRY_THICKENINGS: [f64; 2] = [0.5, 0.75];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    /// φ(x) per sample, one entry per cover element.
    pub values: Vec<Vec<f64>>,
    /// Elements with φᵢ(x) > 0, per sample.
    pub support: Vec<Vec<usize>>,
    pub r_thick: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyEstimate {
    pub degree: i64,
    /// max(0, 1 − 2·|raw_sum − degree|).
    pub confidence: f64,
    pub raw_sum: f64,
}

/// ρ(x, Cᵢ) for every sample and element.
pub fn element_distances(domain: &SampledDomain, cover: &CoverAssignment) -> Result<Vec<Vec<f64>>> {
    if cover.labels.len() != domain.len() {
        return Err(Error::Invalid("cover and domain are not aligned".into()));
    }
    let pts = domain.samples();
    let n = cover.element_count;
    Ok((0..domain.len())
        .into_par_iter()
        .map(|i| {
            let mut d = vec![f64::INFINITY; n];
            let x = pts.get(i);
            for (j, ls) in cover.labels.iter().enumerate() {
                let r = dist(x, pts.get(j));
                for &l in ls {
                    if r < d[l] {
                        d[l] = r;
                    }
                }
            }
            d
        })
        .collect())
}

/// r* = minₓ maxᵢ ρ(x, Cᵢ): thickenings below it keep the common
/// intersection empty.
pub fn covering_radius(domain: &SampledDomain, cover: &CoverAssignment) -> Result<f64> {
    let d = element_distances(domain, cover)?;
    Ok(d.iter()
        .map(|row| row.iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min))
}

pub fn build_partition(domain: &SampledDomain, cover: &CoverAssignment, r_thick: f64) -> Result<PartitionOfUnity> {
    if !(r_thick > 0.0 && r_thick.is_finite()) {
        return Err(Error::CoverDegenerate(format!("thickening {r_thick} must be positive")));
    }
    let d = element_distances(domain, cover)?;
    let mut values = Vec::with_capacity(d.len());
    let mut support = Vec::with_capacity(d.len());
    for (i, row) in d.iter().enumerate() {
        let g: Vec<f64> = row.iter().map(|&r| (r_thick - r).max(0.0)).collect();
        let total: f64 = g.iter().sum();
        if total <= 0.0 {
            return Err(Error::CoverDegenerate(format!(
                "sample {i} lies in no thickened element"
            )));
        }
        let phi: Vec<f64> = g.iter().map(|v| v / total).collect();
        let sup: Vec<usize> = (0..phi.len()).filter(|&k| phi[k] > 0.0).collect();
        if sup.len() == phi.len() {
            return Err(Error::CoverDegenerate(format!(
                "thickening {r_thick} makes all elements meet at sample {i}"
            )));
        }
        values.push(phi);
        support.push(sup);
    }
    Ok(PartitionOfUnity {
        values,
        support,
        r_thick,
    })
}

/// h(x) = Σ φᵢ(x) eᵢ in ℝⁿ.
pub fn h_map(pou: &PartitionOfUnity) -> Result<Vec<Vec<f64>>> {
    for (i, phi) in pou.values.iter().enumerate() {
        if phi.iter().all(|&v| v > 0.0) {
            return Err(Error::InteriorHit(i));
        }
    }
    Ok(pou.values.clone())
}

/// Orthonormal basis of the hyperplane Σ xᵢ = 0 in ℝⁿ (Helmert vectors):
/// uₖ = (1, …, 1, −k, 0, …)/√(k(k+1)), k = 1..n−1.
fn helmert(n: usize) -> Vec<Vec<f64>> {
    (1..n)
        .map(|k| {
            let s = ((k * (k + 1)) as f64).sqrt();
            (0..n)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Less => 1.0 / s,
                    std::cmp::Ordering::Equal => -(k as f64) / s,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect()
}

/// Central projection of points of ∂Δⁿ⁻¹ from the barycenter onto the unit
/// sphere S^{n−2}, in Helmert coordinates of ℝ^{n−1}.
pub fn project_to_sphere(h: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let Some(n) = h.first().map(Vec::len) else {
        return Ok(Vec::new());
    };
    let basis = helmert(n);
    h.iter()
        .map(|p| {
            let c: Vec<f64> = p.iter().map(|x| x - 1.0 / n as f64).collect();
            let y: Vec<f64> = basis.iter().map(|u| dot(u, &c)).collect();
            let r = norm(&y);
            if r <= 1e-12 {
                return Err(Error::Degenerate("point at the barycenter".into()));
            }
            Ok(y.into_iter().map(|v| v / r).collect())
        })
        .collect()
}

/// A cycle to take the degree of: an ordered loop on S¹ or an oriented
/// triangle mesh with values on S².
#[derive(Clone, Debug, PartialEq)]
pub enum Chain {
    Loop(Vec<Vec<f64>>),
    Mesh {
        values: Vec<Vec<f64>>,
        triangles: Vec<[usize; 3]>,
    },
}

impl Chain {
    /// The same cycle with the opposite orientation.
    pub fn reversed(&self) -> Self {
        match self {
            Chain::Loop(pts) => Chain::Loop(pts.iter().rev().cloned().collect()),
            Chain::Mesh { values, triangles } => Chain::Mesh {
                values: values.clone(),
                triangles: triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
            },
        }
    }
}

pub fn degree_estimate(chain: &Chain, x_dim: usize) -> Result<HomotopyEstimate> {
    let raw_sum = match (chain, x_dim) {
        (Chain::Loop(pts), 1) => winding(pts)?,
        (Chain::Mesh { values, triangles }, 2) => spherical_degree(values, triangles)?,
        _ => {
            return Err(Error::Invalid(format!(
                "degree needs a loop for dimension 1 or a mesh for dimension 2, got dimension {x_dim}"
            )))
        }
    };
    let degree = raw_sum.round();
    Ok(HomotopyEstimate {
        degree: degree as i64,
        confidence: (1.0 - 2.0 * (raw_sum - degree).abs()).max(0.0),
        raw_sum,
    })
}

fn winding(pts: &[Vec<f64>]) -> Result<f64> {
    if pts.iter().any(|p| p.len() != 2) {
        return Err(Error::Invalid("loop points must lie in the plane".into()));
    }
    let mut total = 0.0;
    for (k, p) in pts.iter().enumerate() {
        let q = &pts[(k + 1) % pts.len()];
        let step = (p[0] * q[1] - p[1] * q[0]).atan2(p[0] * q[0] + p[1] * q[1]);
        if step.abs() >= PI / 2.0 {
            return Err(Error::Undersampled(format!(
                "turning step {step:.3} at loop position {k}"
            )));
        }
        total += step;
    }
    Ok(total / (2.0 * PI))
}

fn spherical_degree(values: &[Vec<f64>], triangles: &[[usize; 3]]) -> Result<f64> {
    if values.iter().any(|p| p.len() != 3) {
        return Err(Error::Invalid("mesh values must lie in ℝ³".into()));
    }
    let mut total = 0.0;
    for t in triangles {
        let (a, b, c) = (&values[t[0]], &values[t[1]], &values[t[2]]);
        let angle = |u: &[f64], v: &[f64]| dot(u, v).clamp(-1.0, 1.0).acos();
        let diam = angle(a, b).max(angle(b, c)).max(angle(c, a));
        if diam >= PI / 2.0 {
            return Err(Error::Undersampled(format!("image triangle {t:?} spans {diam:.3} rad")));
        }
        // Van Oosterom–Strackee solid angle
        let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]);
        let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
        total += 2.0 * det.atan2(den);
    }
    Ok(total / (4.0 * PI))
}

/// Samples centered and radially projected onto the unit sphere of
/// dimension dim X, in dim X + 1 coordinates. Loops come out
/// counterclockwise and meshes outward when the chain is built from them.
fn frame(domain: &SampledDomain) -> Result<PointCloud> {
    let pts = domain.samples();
    let (center, basis): (Vec<f64>, Option<Vec<Vec<f64>>>) = match domain.kind() {
        DomainKind::Sphere(n) => (vec![0.0; n + 1], None),
        DomainKind::CubeBoundary(m) => (vec![0.5; m], None),
        DomainKind::SimplexBoundary(n) => (vec![1.0 / n as f64; n], Some(helmert(n))),
    };
    let mut out = PointCloud::new(domain.kind().dim() + 1);
    for p in pts.iter() {
        let c: Vec<f64> = p.iter().zip(&center).map(|(x, o)| x - o).collect();
        let y = match &basis {
            Some(b) => b.iter().map(|u| dot(u, &c)).collect(),
            None => c,
        };
        let r = norm(&y);
        if r <= 1e-12 {
            return Err(Error::Degenerate("sample at the domain center".into()));
        }
        out.push(&y.iter().map(|v| v / r).collect::<Vec<_>>());
    }
    Ok(out)
}

/// The domain's fundamental cycle carrying the given per-sample values.
pub fn domain_chain(domain: &SampledDomain, values: Vec<Vec<f64>>) -> Result<Chain> {
    let f = frame(domain)?;
    match domain.kind().dim() {
        1 => {
            let mut order: Vec<usize> = (0..f.len()).collect();
            let angle = |i: usize| f.get(i)[1].atan2(f.get(i)[0]);
            order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)).then(a.cmp(&b)));
            Ok(Chain::Loop(order.into_iter().map(|i| values[i].clone()).collect()))
        }
        2 => {
            let triangles = hull_triangles(&f).map_err(Error::Degenerate)?;
            Ok(Chain::Mesh { values, triangles })
        }
        d => Err(Error::Invalid(format!("no fundamental cycle for dimension {d}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverClass {
    NonNullHomotopic,
    NullHomotopic,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThickeningRun {
    pub fraction: f64,
    pub r_thick: f64,
    pub estimate: Option<HomotopyEstimate>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub class: CoverClass,
    pub reason: String,
    pub covering_radius: f64,
    /// The primary run first, then the retries.
    pub runs: Vec<ThickeningRun>,
}

/// Degree of h at thickening `r_thick`.
pub fn cover_degree(domain: &SampledDomain, cover: &CoverAssignment, r_thick: f64) -> Result<HomotopyEstimate> {
    let pou = build_partition(domain, cover, r_thick)?;
    let h = project_to_sphere(&h_map(&pou)?)?;
    degree_estimate(&domain_chain(domain, h)?, domain.kind().dim())
}

/// Classify the cover by the degree of h. `r_thick` overrides the primary
/// thickening (default 0.6·r*); the retries always run at 0.5·r* and
/// 0.75·r*.
pub fn certify_cover(
    domain: &SampledDomain,
    cover: &CoverAssignment,
    r_thick: Option<f64>,
) -> Result<CoverCertificate> {
    let x_dim = domain.kind().dim();
    let covering_radius = covering_radius(domain, cover)?;
    let inconclusive = |reason: String, runs| CoverCertificate {
        class: CoverClass::Inconclusive,
        reason,
        covering_radius,
        runs,
    };
    if cover.element_count != x_dim + 2 {
        return Ok(inconclusive(
            format!(
                "degree decides only covers of {} elements on a {x_dim}-dimensional domain, got {}",
                x_dim + 2,
                cover.element_count
            ),
            Vec::new(),
        ));
    }
    if !(1..=2).contains(&x_dim) {
        return Ok(inconclusive(
            format!("degree is not computed in dimension {x_dim}"),
            Vec::new(),
        ));
    }
    if !cover.common_intersection_empty() || covering_radius <= 0.0 {
        return Ok(inconclusive("cover elements share a common sample".into(), Vec::new()));
    }

    let primary = r_thick.unwrap_or(DEFAULT_THICKENING * covering_radius);
    let mut plan = vec![(primary / covering_radius, primary)];
    plan.extend(RETRY_THICKENINGS.iter().map(|&f| (f, f * covering_radius)));
    let runs: Vec<ThickeningRun> = plan
        .into_iter()
        .map(|(fraction, r)| match cover_degree(domain, cover, r) {
            Ok(e) => ThickeningRun {
                fraction,
                r_thick: r,
                estimate: Some(e),
                error: None,
            },
            Err(e) => ThickeningRun {
                fraction,
                r_thick: r,
                estimate: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let Some(est) = runs[0].estimate.clone() else {
        let reason = runs[0].error.clone().unwrap_or_default();
        return Ok(inconclusive(reason, runs));
    };
    if est.confidence < 0.9 {
        return Ok(inconclusive(
            format!("confidence {:.3} below 0.9", est.confidence),
            runs,
        ));
    }
    if let Some(other) = runs[1..]
        .iter()
        .find(|r| r.estimate.as_ref().is_some_and(|e| e.degree.abs() != est.degree.abs()))
    {
        return Ok(inconclusive(
            format!("degree changes with thickening (r = {:.4})", other.r_thick),
            runs,
        ));
    }
    let (class, reason) = if est.degree != 0 {
        (CoverClass::NonNullHomotopic, format!("degree {}", est.degree))
    } else {
        (CoverClass::NullHomotopic, "degree 0".to_string())
    };
    Ok(CoverCertificate {
        class,
        reason,
        covering_radius,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{
        degenerate_three_arc_cover, regular_triangulation_cover, sample_sphere, three_arc_cover, SamplingScheme,
    };

    fn circle(n: usize) -> SampledDomain {
        sample_sphere(1, n, 0, SamplingScheme::QuasiUniform).unwrap()
    }

    #[test]
    fn interior_sample_gets_an_indicator() {
        let d = circle(360);
        let cover = three_arc_cover(&d, 0.0).unwrap();
        let pou = build_partition(&d, &cover, 0.2).unwrap();
        // angle π/3 is the middle of the first arc
        let i = (0..d.len())
            .min_by(|&a, &b| {
                let t = |i: usize| (d.sample(i)[1].atan2(d.sample(i)[0]) - PI / 3.0).abs();
                t(a).total_cmp(&t(b))
            })
            .unwrap();
        assert_eq!(pou.values[i], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn shared_endpoint_splits_evenly() {
        let d = circle(360);
        let cover = three_arc_cover(&d, 0.0).unwrap();
        let pou = build_partition(&d, &cover, 0.2).unwrap();
        for (i, ls) in cover.labels.iter().enumerate() {
            if ls.len() == 2 {
                let mut v = pou.values[i].clone();
                v.sort_by(f64::total_cmp);
                assert_eq!(v, vec![0.0, 0.5, 0.5]);
            }
        }
        for v in &pou.values {
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn h_of_indicators_and_edges() {
        let pou = PartitionOfUnity {
            values: vec![vec![1.0, 0.0, 0.0], vec![0.5, 0.5, 0.0]],
            support: vec![vec![0], vec![0, 1]],
            r_thick: 0.1,
        };
        assert_eq!(h_map(&pou).unwrap(), pou.values);
        let full = PartitionOfUnity {
            values: vec![vec![0.2, 0.3, 0.5]],
            support: vec![vec![0, 1, 2]],
            r_thick: 0.1,
        };
        assert!(matches!(h_map(&full), Err(Error::InteriorHit(0))));
    }

    #[test]
    fn too_thick_is_degenerate() {
        let d = circle(360);
        let cover = three_arc_cover(&d, 0.0).unwrap();
        let r = covering_radius(&d, &cover).unwrap();
        assert!((r - 1.0).abs() < 0.02, "{r}");
        assert!(matches!(
            build_partition(&d, &cover, 1.1 * r),
            Err(Error::CoverDegenerate(_))
        ));
    }

    #[test]
    fn three_arc_loop_visits_every_edge_and_winds_once() {
        let d = circle(2048);
        let cover = three_arc_cover(&d, 0.0).unwrap();
        let h = h_map(&build_partition(&d, &cover, 0.2).unwrap()).unwrap();
        for k in 0..3 {
            // the edge opposite vertex k: coordinate k vanishes, the others not
            assert!(h
                .iter()
                .any(|p| p[k] == 0.0 && p.iter().filter(|&&v| v > 0.0).count() == 2));
        }
        let e = cover_degree(&d, &cover, 0.2).unwrap();
        assert_eq!(e.degree.abs(), 1);
        assert!(e.confidence > 0.99);
    }

    #[test]
    fn constant_loop_has_degree_zero() {
        let e = degree_estimate(&Chain::Loop(vec![vec![1.0, 0.0]; 10]), 1).unwrap();
        assert_eq!(e.degree, 0);
        assert_eq!(e.raw_sum, 0.0);
        assert_eq!(e.confidence, 1.0);
    }

    #[test]
    fn coarse_loop_is_undersampled() {
        let sq = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        assert!(matches!(
            degree_estimate(&Chain::Loop(sq), 1),
            Err(Error::Undersampled(_))
        ));
    }

    #[test]
    fn identity_sphere_mesh_has_degree_one() {
        let d = sample_sphere(2, 600, 0, SamplingScheme::QuasiUniform).unwrap();
        let vals: Vec<Vec<f64>> = d.samples().iter().map(|p| p.to_vec()).collect();
        let chain = domain_chain(&d, vals).unwrap();
        let e = degree_estimate(&chain, 2).unwrap();
        assert_eq!(e.degree, 1);
        assert!((e.raw_sum - 1.0).abs() < 1e-9);
        assert_eq!(degree_estimate(&chain.reversed(), 2).unwrap().degree, -1);
    }

    #[test]
    fn certify_the_standard_covers() {
        let d = circle(2048);
        let c = certify_cover(&d, &three_arc_cover(&d, 0.3).unwrap(), None).unwrap();
        assert_eq!(c.class, CoverClass::NonNullHomotopic, "{}", c.reason);
        let c = certify_cover(&d, &degenerate_three_arc_cover(&d, 0.3).unwrap(), None).unwrap();
        assert_eq!(c.class, CoverClass::NullHomotopic, "{}", c.reason);
        let s = sample_sphere(2, 1024, 0, SamplingScheme::QuasiUniform).unwrap();
        let c = certify_cover(&s, &regular_triangulation_cover(&s).unwrap(), None).unwrap();
        assert_eq!(c.class, CoverClass::NonNullHomotopic, "{}", c.reason);
        assert_eq!(c.runs.len(), 3);
    }

    #[test]
    fn wrong_dimension_is_inconclusive() {
        let d = circle(64);
        let cover = crate::domains::arc_cover(&d, &[(0.0, 2.0), (1.5, 4.0), (3.5, 5.5), (5.0, 6.6)]).unwrap();
        let c = certify_cover(&d, &cover, None).unwrap();
        assert_eq!(c.class, CoverClass::Inconclusive);
        assert!(c.runs.is_empty());
    }
}
