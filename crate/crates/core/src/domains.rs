//! Sampled domains (spheres, simplex boundaries, cube boundaries) and the
//! closed covers the covering results are applied to.
//!
//! Covers are stored as per-sample label sets. A sample on the common boundary
//! of two closed elements carries both labels, so the representation is a
//! closed cover rather than a partition.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dist, dist2, dot, norm, PointCloud};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    /// Unit sphere Sⁿ ⊂ ℝⁿ⁺¹.
    Sphere(usize),
    /// Boundary of the standard simplex Δⁿ⁻¹ ⊂ ℝⁿ.
    SimplexBoundary(usize),
    /// Boundary of the unit cube [0,1]ᵐ.
    CubeBoundary(usize),
}

impl DomainKind {
    pub fn name(&self) -> &'static str {
        match self {
            DomainKind::Sphere(_) => "sphere",
            DomainKind::SimplexBoundary(_) => "simplex_boundary",
            DomainKind::CubeBoundary(_) => "cube_boundary",
        }
    }

    pub fn parameter(&self) -> usize {
        match *self {
            DomainKind::Sphere(n) | DomainKind::SimplexBoundary(n) | DomainKind::CubeBoundary(n) => n,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            DomainKind::Sphere(n) => n + 1,
            DomainKind::SimplexBoundary(n) | DomainKind::CubeBoundary(n) => n,
        }
    }

    /// Topological dimension of the domain.
    pub fn dim(&self) -> usize {
        match *self {
            DomainKind::Sphere(n) => n,
            DomainKind::SimplexBoundary(n) => n - 2,
            DomainKind::CubeBoundary(m) => m - 1,
        }
    }

    pub fn from_name(name: &str, param: usize) -> Result<Self> {
        match name {
            "sphere" => Ok(DomainKind::Sphere(param)),
            "simplex_boundary" | "simplex" => Ok(DomainKind::SimplexBoundary(param)),
            "cube_boundary" | "cube" => Ok(DomainKind::CubeBoundary(param)),
            other => Err(Error::Invalid(format!("unknown domain kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for DomainKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}({})", self.name(), self.parameter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingScheme {
    UniformRandom,
    QuasiUniform,
}

/// Finite sample of a domain X. The intrinsic metric ρ is the ambient
/// Euclidean distance for every kind (the chord metric on spheres).
#[derive(Debug)]
pub struct SampledDomain {
    kind: DomainKind,
    seed: u64,
    samples: PointCloud,
    antipode: Option<Vec<usize>>,
    local: OnceLock<Local>,
}

#[derive(Clone, Debug)]
struct Local {
    mesh: f64,
    neighbors: Vec<Vec<usize>>,
}

impl Clone for SampledDomain {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind,
            seed: self.seed,
            samples: self.samples.clone(),
            antipode: self.antipode.clone(),
            local: self.local.clone(),
        }
    }
}

impl SampledDomain {
    pub fn new(kind: DomainKind, seed: u64, samples: PointCloud) -> Result<Self> {
        if samples.dim() != kind.ambient_dim() {
            return Err(Error::Invalid(format!(
                "samples of dimension {} for domain {kind}",
                samples.dim()
            )));
        }
        let antipode = match kind {
            DomainKind::Sphere(_) => Some(match_antipodes(&samples)?),
            _ => None,
        };
        Ok(Self {
            kind,
            seed,
            samples,
            antipode,
            local: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> &PointCloud {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        self.samples.get(i)
    }

    /// ρ between two sample indices.
    pub fn intrinsic_dist(&self, i: usize, j: usize) -> f64 {
        dist(self.samples.get(i), self.samples.get(j))
    }

    pub fn antipode(&self) -> Option<&[usize]> {
        self.antipode.as_deref()
    }

    /// Largest nearest-neighbor distance over the sample: every sample has a
    /// neighbor at most this far away.
    pub fn mesh_size(&self) -> f64 {
        self.local().mesh
    }

    /// The few nearest samples of each sample (by ρ, ties by index), used for
    /// finite-difference estimates of a map's modulus of continuity.
    pub fn local_neighbors(&self) -> &[Vec<usize>] {
        &self.local().neighbors
    }

    fn local(&self) -> &Local {
        self.local.get_or_init(|| {
            let n = self.len();
            let k = (2 * self.kind.dim() + 2).min(n.saturating_sub(1));
            let neighbors: Vec<(f64, Vec<usize>)> = (0..n)
                .into_par_iter()
                .map(|i| {
                    let p = self.samples.get(i);
                    let mut near: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
                    for j in (0..n).filter(|&j| j != i) {
                        let d = dist2(p, self.samples.get(j));
                        if near.len() < k || d < near[near.len() - 1].0 {
                            let at = near.partition_point(|&(e, _)| e <= d);
                            near.insert(at, (d, j));
                            near.truncate(k);
                        }
                    }
                    let nn = near.first().map_or(0.0, |e| e.0);
                    (nn, near.into_iter().map(|e| e.1).collect())
                })
                .collect();
            let mesh = neighbors.iter().map(|e| e.0).fold(0.0, f64::max).sqrt();
            Local {
                mesh,
                neighbors: neighbors.into_iter().map(|e| e.1).collect(),
            }
        })
    }

    /// Largest intrinsic distance in the domain (2 for spheres).
    pub fn diameter(&self) -> f64 {
        match self.kind {
            DomainKind::Sphere(_) => 2.0,
            DomainKind::SimplexBoundary(_) => 2f64.sqrt(),
            DomainKind::CubeBoundary(m) => (m as f64).sqrt(),
        }
    }
}

fn match_antipodes(samples: &PointCloud) -> Result<Vec<usize>> {
    let n = samples.len();
    let mut out = vec![usize::MAX; n];
    // Sort by first coordinate so the partner of x is found near -x₀.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| samples.get(a)[0].total_cmp(&samples.get(b)[0]).then(a.cmp(&b)));
    let keys: Vec<f64> = order.iter().map(|&i| samples.get(i)[0]).collect();
    const TOL: f64 = 1e-9;
    for (i, slot) in out.iter_mut().enumerate() {
        let p = samples.get(i);
        let target = -p[0];
        let start = keys.partition_point(|&k| k < target - TOL);
        let mut found = None;
        for (pos, &k) in keys.iter().enumerate().skip(start) {
            if k > target + TOL {
                break;
            }
            let j = order[pos];
            let q = samples.get(j);
            if p.iter().zip(q).all(|(a, b)| (a + b).abs() <= TOL) {
                found = Some(j);
                break;
            }
        }
        *slot = found.ok_or_else(|| Error::Invalid(format!("sphere sample {i} has no antipodal partner")))?;
    }
    Ok(out)
}

/// Closed cover of a sampled domain as per-sample label sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverAssignment {
    pub labels: Vec<Vec<usize>>,
    pub element_count: usize,
}

impl CoverAssignment {
    pub fn new(labels: Vec<Vec<usize>>, element_count: usize) -> Result<Self> {
        let mut nonempty = vec![false; element_count];
        for (i, ls) in labels.iter().enumerate() {
            if ls.is_empty() {
                return Err(Error::Invalid(format!("sample {i} is not covered")));
            }
            for &l in ls {
                if l >= element_count {
                    return Err(Error::Invalid(format!("label {l} out of range")));
                }
                nonempty[l] = true;
            }
        }
        if let Some(j) = nonempty.iter().position(|&b| !b) {
            return Err(Error::Invalid(format!("cover element {j} is empty")));
        }
        Ok(Self { labels, element_count })
    }

    pub fn has(&self, sample: usize, element: usize) -> bool {
        self.labels[sample].contains(&element)
    }

    pub fn members(&self, element: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.has(i, element)).collect()
    }

    /// True when no sample carries every label.
    pub fn common_intersection_empty(&self) -> bool {
        self.labels.iter().all(|ls| ls.len() < self.element_count)
    }
}

/// Sample Sⁿ with antipodal closure.
///
/// `QuasiUniform` places ⌈N/2⌉ low-discrepancy points on the closed upper
/// half (equal angles on S¹, a Fibonacci spiral on S², an additive recurrence
/// pushed through the normal quantile for n ≥ 3) and appends their antipodes.
/// `UniformRandom` draws N Gaussian directions and appends their antipodes, so
/// it returns 2N samples. Sample `i + half` is always the antipode of `i`.
pub fn sample_sphere(n: usize, count: usize, seed: u64, scheme: SamplingScheme) -> Result<SampledDomain> {
    if n < 1 {
        return Err(Error::OutOfRange("sphere dimension must be at least 1".into()));
    }
    if count < n + 2 {
        return Err(Error::OutOfRange(format!("need at least {} samples on S^{n}", n + 2)));
    }
    let d = n + 1;
    let mut base = PointCloud::new(d);
    match scheme {
        SamplingScheme::QuasiUniform => {
            let half = count.div_ceil(2);
            match n {
                1 => {
                    for k in 0..half {
                        let t = PI * k as f64 / half as f64;
                        base.push(&[t.cos(), t.sin()]);
                    }
                }
                2 => {
                    let golden = PI * (3.0 - 5f64.sqrt());
                    for k in 0..half {
                        let z = 1.0 - (k as f64 + 0.5) / half as f64;
                        let r = (1.0 - z * z).max(0.0).sqrt();
                        let t = golden * k as f64;
                        base.push(&[r * t.cos(), r * t.sin(), z]);
                    }
                }
                _ => {
                    let alphas = kronecker_alphas(d);
                    let normal =
                        statrs::distribution::Normal::new(0.0, 1.0).map_err(|e| Error::Invalid(e.to_string()))?;
                    use statrs::distribution::ContinuousCDF;
                    for k in 0..half {
                        let mut v: Vec<f64> = alphas
                            .iter()
                            .map(|a| {
                                let u = (0.5 + a * (k + 1) as f64).fract();
                                normal.inverse_cdf(u.clamp(1e-12, 1.0 - 1e-12))
                            })
                            .collect();
                        let nv = norm(&v);
                        v.iter_mut().for_each(|x| *x /= nv);
                        if v[d - 1] < 0.0 {
                            v.iter_mut().for_each(|x| *x = -*x);
                        }
                        base.push(&v);
                    }
                }
            }
        }
        SamplingScheme::UniformRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                loop {
                    let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
                    let nv = norm(&v);
                    if nv > 1e-6 {
                        v.iter_mut().for_each(|x| *x /= nv);
                        base.push(&v);
                        break;
                    }
                }
            }
        }
    }
    let half = base.len();
    let mut all = base.clone();
    for i in 0..half {
        let p: Vec<f64> = base.get(i).iter().map(|x| -x).collect();
        all.push(&p);
    }
    let antipode = (0..2 * half).map(|i| (i + half) % (2 * half)).collect();
    Ok(SampledDomain {
        kind: DomainKind::Sphere(n),
        seed,
        samples: all,
        antipode: Some(antipode),
        local: OnceLock::new(),
    })
}

// Additive recurrence constants from the generalized golden ratio.
fn kronecker_alphas(d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|k| (1.0 / phi.powi(k as i32)).fract()).collect()
}

/// Vertices of a regular (n+1)-simplex inscribed in Sⁿ, the first one at the
/// north pole (last coordinate 1).
pub fn regular_simplex_vertices(n: usize) -> Vec<Vec<f64>> {
    let k = n + 2;
    // Centered standard basis of ℝ^{n+2}, orthonormalized with the image of
    // e₀ as the first axis.
    let centered: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / k as f64)
                .collect()
        })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for v in centered.iter().take(n + 1) {
        let mut u = v.clone();
        for b in &basis {
            let p = dot(&u, b);
            u.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let nu = norm(&u);
        u.iter_mut().for_each(|x| *x /= nu);
        basis.push(u);
    }
    centered
        .iter()
        .map(|v| {
            let mut c: Vec<f64> = basis.iter().map(|b| dot(v, b)).collect();
            let nc = norm(&c);
            c.iter_mut().for_each(|x| *x /= nc);
            // First basis axis becomes the last coordinate.
            c.rotate_left(1);
            c
        })
        .collect()
}

/// Cover of Sⁿ by the n+2 spherical simplices of the regular triangulation.
///
/// Element `i` is the central projection of the facet opposite vertex `vᵢ`,
/// i.e. the samples where `⟨x, vᵢ⟩` is minimal; near-ties keep every label.
pub fn regular_triangulation_cover(domain: &SampledDomain) -> Result<CoverAssignment> {
    let DomainKind::Sphere(n) = domain.kind() else {
        return Err(Error::Invalid(format!(
            "regular triangulation cover needs a sphere, got {}",
            domain.kind()
        )));
    };
    const TIE: f64 = 1e-9;
    let verts = regular_simplex_vertices(n);
    let labels = domain
        .samples()
        .iter()
        .map(|x| {
            let proj: Vec<f64> = verts.iter().map(|v| dot(x, v)).collect();
            let lo = proj.iter().copied().fold(f64::INFINITY, f64::min);
            (0..verts.len()).filter(|&i| proj[i] <= lo + TIE).collect()
        })
        .collect();
    CoverAssignment::new(labels, n + 2)
}

fn lattice_resolution(min_count: usize, count: impl Fn(usize) -> usize) -> usize {
    let mut k = 1;
    while count(k) < min_count {
        k += 1;
    }
    k
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Lattice sample of ∂Δⁿ⁻¹ with the facet cover `Δᵢ = {xᵢ = 0}`.
pub fn simplex_boundary_cover(n: usize, count: usize) -> Result<(SampledDomain, CoverAssignment)> {
    if n < 2 {
        return Err(Error::OutOfRange("simplex boundary needs n ≥ 2".into()));
    }
    // lattice points with every coordinate ≥ 1/k are interior
    let k = lattice_resolution(count.max(n), |k| binomial(k + n - 1, n - 1) - binomial(k - 1, n - 1));
    let mut samples = PointCloud::new(n);
    let mut labels = Vec::new();
    let mut parts = vec![0usize; n];
    compositions(k, &mut parts, 0, &mut |c| {
        if c.contains(&0) {
            let p: Vec<f64> = c.iter().map(|&v| v as f64 / k as f64).collect();
            samples.push(&p);
            labels.push((0..n).filter(|&i| c[i] == 0).collect());
        }
    });
    let domain = SampledDomain::new(DomainKind::SimplexBoundary(n), 0, samples)?;
    let cover = CoverAssignment::new(labels, n)?;
    Ok((domain, cover))
}

fn compositions(total: usize, parts: &mut Vec<usize>, at: usize, f: &mut impl FnMut(&[usize])) {
    let n = parts.len();
    if at == n - 1 {
        parts[at] = total;
        f(parts);
        return;
    }
    for v in (0..=total).rev() {
        parts[at] = v;
        compositions(total - v, parts, at + 1, f);
    }
}

/// Everything needed to rebuild a sampled domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub samples: usize,
    pub seed: u64,
    pub scheme: SamplingScheme,
}

impl DomainSpec {
    pub fn build(&self) -> Result<SampledDomain> {
        match self.kind {
            DomainKind::Sphere(n) => sample_sphere(n, self.samples, self.seed, self.scheme),
            DomainKind::SimplexBoundary(n) => Ok(simplex_boundary_cover(n, self.samples)?.0),
            DomainKind::CubeBoundary(m) => Ok(cube_boundary_cover(m, self.samples)?.0),
        }
    }

    pub fn with_samples(self, samples: usize) -> Self {
        Self { samples, ..self }
    }
}

/// Cube cover element ids: `j < m` is σⱼ = {xⱼ = 0}, `m` is P = ⋃ σ'ⱼ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeFaces {
    pub m: usize,
}

impl CubeFaces {
    pub fn far_element(&self) -> usize {
        self.m
    }

    /// Whether sample `x` lies on σ'ⱼ = {xⱼ = 1}, the face disjoint from σⱼ.
    pub fn on_far_face(&self, x: &[f64], j: usize) -> bool {
        (x[j] - 1.0).abs() <= 1e-12
    }

    pub fn on_near_face(&self, x: &[f64], j: usize) -> bool {
        x[j].abs() <= 1e-12
    }
}

/// Lattice sample of ∂[0,1]ᵐ with the cover {σ₁, …, σₘ, P}.
pub fn cube_boundary_cover(m: usize, count: usize) -> Result<(SampledDomain, CoverAssignment, CubeFaces)> {
    if m < 2 {
        return Err(Error::OutOfRange("cube boundary needs m ≥ 2".into()));
    }
    let k = lattice_resolution(count.max(2 * m), |k| {
        (k + 1).pow(m as u32) - (k.saturating_sub(1)).pow(m as u32)
    });
    let mut samples = PointCloud::new(m);
    let mut labels = Vec::new();
    let total = (k + 1).pow(m as u32);
    let mut digits = vec![0usize; m];
    for code in 0..total {
        let mut c = code;
        for d in digits.iter_mut().rev() {
            *d = c % (k + 1);
            c /= k + 1;
        }
        let low: Vec<usize> = (0..m).filter(|&i| digits[i] == 0).collect();
        let high = digits.contains(&k);
        if low.is_empty() && !high {
            continue;
        }
        let p: Vec<f64> = digits.iter().map(|&v| v as f64 / k as f64).collect();
        samples.push(&p);
        let mut ls = low;
        if high {
            ls.push(m);
        }
        labels.push(ls);
    }
    let domain = SampledDomain::new(DomainKind::CubeBoundary(m), 0, samples)?;
    let cover = CoverAssignment::new(labels, m + 1)?;
    Ok((domain, cover, CubeFaces { m }))
}

/// Cover of S¹ by three arcs of length 2π/3 starting at angle `phase`.
pub fn three_arc_cover(domain: &SampledDomain, phase: f64) -> Result<CoverAssignment> {
    arc_cover(
        domain,
        &[
            (phase, phase + TAU / 3.0),
            (phase + TAU / 3.0, phase + 2.0 * TAU / 3.0),
            (phase + 2.0 * TAU / 3.0, phase + TAU),
        ],
    )
}

/// Closed cover of S¹ by the given arcs `[start, end]` (angles, counterclockwise).
pub fn arc_cover(domain: &SampledDomain, arcs: &[(f64, f64)]) -> Result<CoverAssignment> {
    let DomainKind::Sphere(1) = domain.kind() else {
        return Err(Error::Invalid("arc covers live on S^1".into()));
    };
    const TIE: f64 = 1e-9;
    let labels = domain
        .samples()
        .iter()
        .map(|p| {
            let t = p[1].atan2(p[0]);
            arcs.iter()
                .enumerate()
                .filter(|(_, &(a, b))| {
                    let len = b - a;
                    let off = (t - a).rem_euclid(TAU);
                    off <= len + TIE || off >= TAU - TIE
                })
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    CoverAssignment::new(labels, arcs.len())
}

/// Null-homotopic three-element cover of S¹: the whole circle except the
/// point at angle π, plus two disjoint short arcs, one around π and one
/// around 0.
pub fn degenerate_three_arc_cover(domain: &SampledDomain, half_width: f64) -> Result<CoverAssignment> {
    let DomainKind::Sphere(1) = domain.kind() else {
        return Err(Error::Invalid("arc covers live on S^1".into()));
    };
    let labels = domain
        .samples()
        .iter()
        .map(|p| {
            let t = p[1].atan2(p[0]);
            let mut ls = Vec::new();
            let from_pi = PI - t.abs();
            if from_pi > 1e-9 {
                ls.push(0);
            }
            if from_pi <= half_width {
                ls.push(1);
            }
            if t.abs() <= half_width {
                ls.push(2);
            }
            ls
        })
        .collect();
    CoverAssignment::new(labels, 3)
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct DomainDocument {
    pub kind: String,
    pub n_or_m: usize,
    pub seed: u64,
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<Vec<usize>>,
}

impl DomainDocument {
    pub fn new(domain: &SampledDomain, cover: Option<&CoverAssignment>) -> Self {
        Self {
            kind: domain.kind().name().to_string(),
            n_or_m: domain.kind().parameter(),
            seed: domain.seed(),
            samples: domain.samples().to_rows(),
            labels: cover.map(|c| c.labels.clone()).unwrap_or_default(),
        }
    }

    pub fn into_domain(self) -> Result<(SampledDomain, Option<CoverAssignment>)> {
        let kind = DomainKind::from_name(&self.kind, self.n_or_m)?;
        let samples = PointCloud::from_rows(&self.samples)?;
        let domain = SampledDomain::new(kind, self.seed, samples)?;
        let cover = if self.labels.is_empty() {
            None
        } else {
            if self.labels.len() != domain.len() {
                return Err(Error::Invalid("label list does not match samples".into()));
            }
            let count = self.labels.iter().flatten().max().map_or(0, |m| m + 1);
            Some(CoverAssignment::new(self.labels, count)?)
        };
        Ok((domain, cover))
    }
}
