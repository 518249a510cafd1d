//! Parametric map families X → ℝᵐ.
//!
//! Parameter layouts are output-coordinate-major: the block for output
//! coordinate 0 comes first, then coordinate 1, and so on.
//!
//! | family           | domains        | params per output coordinate                    |
//! |------------------|----------------|-------------------------------------------------|
//! | `constant`       | any            | 1 (the value)                                   |
//! | `affine`         | any            | d + 1 (row of the matrix, then the offset)      |
//! | `identity_embed` | any            | none; ambient coordinates padded with zeros     |
//! | `circle_fourier` | S¹             | 2K+1: a₀, a₁, b₁, …, a_K, b_K                   |
//! | `sphere_harmonic`| Sⁿ             | C(D+d, d) monomial coefficients, graded order   |
//! | `polynomial`     | any            | as `sphere_harmonic`                            |
//! | `radial_warp`    | S¹             | A: 2 per coordinate, then a shared 2K+1 block   |
//!
//! `radial_warp` is p ↦ g(θ)·A·p with g = 1 + s(θ)² for a trigonometric
//! polynomial s, so g is a positive trigonometric polynomial.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{DomainKind, SampledDomain};
use crate::error::{Error, Result};
use crate::geom::{dist, PointCloud};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Constant,
    Affine,
    IdentityEmbed,
    CircleFourier,
    SphereHarmonic,
    Polynomial,
    RadialWarp,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Constant,
        Family::Affine,
        Family::IdentityEmbed,
        Family::CircleFourier,
        Family::SphereHarmonic,
        Family::Polynomial,
        Family::RadialWarp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Constant => "constant",
            Family::Affine => "affine",
            Family::IdentityEmbed => "identity_embed",
            Family::CircleFourier => "circle_fourier",
            Family::SphereHarmonic => "sphere_harmonic",
            Family::Polynomial => "polynomial",
            Family::RadialWarp => "radial_warp",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::Invalid(format!("unknown map family `{name}`")))
    }

    pub fn admits(self, kind: DomainKind) -> bool {
        match self {
            Family::Constant | Family::Affine | Family::IdentityEmbed | Family::Polynomial => true,
            Family::CircleFourier | Family::RadialWarp => kind == DomainKind::Sphere(1),
            Family::SphereHarmonic => matches!(kind, DomainKind::Sphere(_)),
        }
    }

    /// Parameter count for a given shape. `degree` is K for the trigonometric
    /// families and the polynomial degree for `sphere_harmonic`; other
    /// families ignore it.
    pub fn arity(self, kind: DomainKind, m_out: usize, degree: usize) -> usize {
        let d = kind.ambient_dim();
        match self {
            Family::Constant => m_out,
            Family::Affine => m_out * (d + 1),
            Family::IdentityEmbed => 0,
            Family::CircleFourier => m_out * (2 * degree + 1),
            Family::SphereHarmonic | Family::Polynomial => m_out * monomial_count(d, degree),
            Family::RadialWarp => 2 * m_out + 2 * degree + 1,
        }
    }

    /// Recover the degree from a parameter count, if the count is valid.
    fn degree_for(self, kind: DomainKind, m_out: usize, len: usize) -> Option<usize> {
        match self {
            Family::Constant | Family::Affine | Family::IdentityEmbed => {
                (self.arity(kind, m_out, 0) == len).then_some(0)
            }
            _ => (0..=64).find(|&k| self.arity(kind, m_out, k) == len),
        }
    }

    fn arity_description(self, kind: DomainKind, m_out: usize) -> String {
        let d = kind.ambient_dim();
        match self {
            Family::Constant | Family::Affine | Family::IdentityEmbed => self.arity(kind, m_out, 0).to_string(),
            Family::CircleFourier => format!("{m_out}·(2K+1)"),
            Family::SphereHarmonic | Family::Polynomial => format!("{m_out}·C(D+{d},{d})"),
            Family::RadialWarp => format!("{}+2K+1", 2 * m_out),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub family: Family,
    pub m_out: usize,
    pub params: Vec<f64>,
}

/// Images of a domain's samples, index-aligned with it.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageSet {
    pub images: PointCloud,
}

impl ImageSet {
    pub fn new(images: PointCloud) -> Self {
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.images.dim()
    }

    pub fn get(&self, i: usize) -> &[f64] {
        self.images.get(i)
    }
}

impl MapSpec {
    pub fn new(family: Family, m_out: usize, params: Vec<f64>) -> Result<Self> {
        if m_out == 0 {
            return Err(Error::Invalid("target dimension must be at least 1".into()));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Invalid("non-finite map parameter".into()));
        }
        Ok(Self { family, m_out, params })
    }

    pub fn constant(point: &[f64]) -> Self {
        Self {
            family: Family::Constant,
            m_out: point.len(),
            params: point.to_vec(),
        }
    }

    pub fn identity(m_out: usize) -> Self {
        Self {
            family: Family::IdentityEmbed,
            m_out,
            params: Vec::new(),
        }
    }

    /// Checks family/domain compatibility and parameter count; returns the
    /// family degree implied by the parameter count.
    pub fn check(&self, kind: DomainKind) -> Result<usize> {
        if self.m_out == 0 {
            return Err(Error::Invalid("target dimension must be at least 1".into()));
        }
        if !self.family.admits(kind) {
            return Err(Error::FamilyMismatch {
                family: self.family.name().into(),
                domain: kind.to_string(),
            });
        }
        if self.family == Family::IdentityEmbed && self.m_out < kind.ambient_dim() {
            return Err(Error::Invalid(format!(
                "identity_embed needs m_out ≥ {}, got {}",
                kind.ambient_dim(),
                self.m_out
            )));
        }
        self.family
            .degree_for(kind, self.m_out, self.params.len())
            .ok_or_else(|| Error::Arity {
                family: self.family.name().into(),
                expected: self.family.arity_description(kind, self.m_out),
                got: self.params.len(),
            })
    }

    /// Image of a single domain point.
    pub fn apply(&self, kind: DomainKind, degree: usize, x: &[f64], out: &mut [f64]) {
        let m = self.m_out;
        let p = &self.params;
        match self.family {
            Family::Constant => out.copy_from_slice(p),
            Family::Affine => {
                let d = x.len();
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &p[i * (d + 1)..(i + 1) * (d + 1)];
                    *o = row[d] + row[..d].iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                }
            }
            Family::IdentityEmbed => {
                out.iter_mut().for_each(|o| *o = 0.0);
                out[..x.len()].copy_from_slice(x);
            }
            Family::CircleFourier => {
                let theta = x[1].atan2(x[0]);
                let block = 2 * degree + 1;
                for (i, o) in out.iter_mut().enumerate() {
                    *o = trig_poly(&p[i * block..(i + 1) * block], theta);
                }
            }
            Family::SphereHarmonic | Family::Polynomial => {
                let mono = monomials(x, degree);
                let block = mono.len();
                for (i, o) in out.iter_mut().enumerate() {
                    *o = p[i * block..(i + 1) * block]
                        .iter()
                        .zip(&mono)
                        .map(|(a, b)| a * b)
                        .sum();
                }
            }
            Family::RadialWarp => {
                let theta = x[1].atan2(x[0]);
                let s = trig_poly(&p[2 * m..], theta);
                let g = 1.0 + s * s;
                for (i, o) in out.iter_mut().enumerate() {
                    *o = g * (p[2 * i] * x[0] + p[2 * i + 1] * x[1]);
                }
            }
        }
        debug_assert_eq!(kind.ambient_dim(), x.len());
    }
}

fn trig_poly(coeffs: &[f64], theta: f64) -> f64 {
    let mut v = coeffs[0];
    for (k, ab) in coeffs[1..].chunks_exact(2).enumerate() {
        let t = (k + 1) as f64 * theta;
        v += ab[0] * t.cos() + ab[1] * t.sin();
    }
    v
}

/// Number of monomials of degree ≤ `degree` in `d` variables.
pub fn monomial_count(d: usize, degree: usize) -> usize {
    // C(degree + d, d)
    let mut c = 1usize;
    for i in 1..=d {
        c = c * (degree + i) / i;
    }
    c
}

/// Monomials of degree ≤ `degree`, graded, each degree in lexicographic
/// order of exponent vectors (x₀ highest): 1, x₀, x₁, …, x₀², x₀x₁, …
pub fn monomials(x: &[f64], degree: usize) -> Vec<f64> {
    let mut out = vec![1.0];
    // Monomials of the previous degree, each tagged with the index of its
    // last (largest-index) variable so products stay non-decreasing.
    let mut prev: Vec<(f64, usize)> = vec![(1.0, 0)];
    for _ in 0..degree {
        let mut next = Vec::new();
        for &(v, last) in &prev {
            for (j, xj) in x.iter().enumerate().skip(last) {
                next.push((v * xj, j));
            }
        }
        out.extend(next.iter().map(|e| e.0));
        prev = next;
    }
    out
}

/// Evaluate a map on every sample of a domain.
pub fn evaluate(map: &MapSpec, domain: &SampledDomain) -> Result<ImageSet> {
    let kind = domain.kind();
    let degree = map.check(kind)?;
    let m = map.m_out;
    let rows: Vec<f64> = (0..domain.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = vec![0.0; m];
            map.apply(kind, degree, domain.sample(i), &mut out);
            out
        })
        .collect();
    Ok(ImageSet::new(PointCloud::from_flat(m, rows)?))
}

/// Map with i.i.d. uniform parameters in [−scale, scale] drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn random_map(
    family: Family,
    kind: DomainKind,
    m_out: usize,
    degree: usize,
    seed: u64,
    scale: f64,
) -> Result<MapSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arity = family.arity(kind, m_out, degree);
    let params = (0..arity).map(|_| (2.0 * rng.gen::<f64>() - 1.0) * scale).collect();
    let map = MapSpec::new(family, m_out, params)?;
    map.check(kind)?;
    Ok(map)
}

/// Finite-difference Lipschitz estimate max |f(x) − f(y)| / ρ(x, y) over
/// each sample and its nearest samples.
pub fn lipschitz_estimate(domain: &SampledDomain, images: &ImageSet) -> f64 {
    domain
        .local_neighbors()
        .par_iter()
        .enumerate()
        .map(|(i, near)| {
            near.iter()
                .map(|&j| {
                    let r = domain.intrinsic_dist(i, j);
                    if r > 0.0 {
                        dist(images.get(i), images.get(j)) / r
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Sampling allowance δ_N = 2 · (Lipschitz estimate) · (mesh size).
pub fn delta_allowance(domain: &SampledDomain, images: &ImageSet) -> f64 {
    2.0 * lipschitz_estimate(domain, images) * domain.mesh_size()
}
