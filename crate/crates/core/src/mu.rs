//! μ(X, ℝᵐ) = inf_f D_f: family-relative upper bounds by simplex search,
//! randomized checks of the lower bound, and the exploratory histogram of
//! neighbor-pair distances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domains::{DomainKind, DomainSpec, SampledDomain};
use crate::error::{Error, Result};
use crate::geom::thm2_bound;
use crate::maps::{delta_allowance, evaluate, random_map, Family, MapSpec};
use crate::neighbors::{compute_df, extremal_pair, neighbor_graph, NeighborCertificate};
use crate::optim::NelderMead;
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuConfig {
    pub restarts: usize,
    /// Objective evaluations across all restarts.
    pub budget: usize,
    /// K for trigonometric families, polynomial degree otherwise.
    pub degree: usize,
    /// Half-width of the uniform perturbation of each restart's start.
    pub perturbation: f64,
    pub optimizer: NelderMead,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl Default for MuConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            budget: 2000,
            degree: 3,
            perturbation: 0.1,
            optimizer: NelderMead::default().with_step(0.05),
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub index: usize,
    pub start_df: f64,
    pub best_df: f64,
    pub evaluations: usize,
}

/// An evaluated map that fell below the lower bound by more than δ_N.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reproducer {
    pub domain: DomainSpec,
    pub map: MapSpec,
    pub df: f64,
    pub delta: f64,
    pub lower_bound: f64,
    pub certificates: Vec<NeighborCertificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub domain: DomainSpec,
    pub family: Family,
    pub m_out: usize,
    pub settings: MuConfig,
    /// √((n+2)/n) for spheres with m_out > n, 2 for m_out ≤ n; none for
    /// other domains.
    pub lower_bound: Option<f64>,
    /// D_f of the incumbent re-evaluated at twice the sample count.
    pub best_df: f64,
    /// D_f of the incumbent at the search density.
    pub search_df: f64,
    pub best_map: MapSpec,
    /// δ_N of the incumbent at the re-evaluation density.
    pub delta: f64,
    /// `(evaluation index, running minimum)`, restarts concatenated in order.
    pub trace: Vec<(usize, f64)>,
    pub restarts: Vec<RestartSummary>,
    pub violations: Vec<Reproducer>,
}

/// Lower bound on D_f for maps of `kind` into ℝ^m_out, where one is known.
pub fn lower_bound(kind: DomainKind, m_out: usize) -> Option<f64> {
    match kind {
        DomainKind::Sphere(n) if m_out > n => thm2_bound(n).ok(),
        DomainKind::Sphere(_) => Some(2.0),
        _ => None,
    }
}

/// Parameters of the family member closest to the standard embedding
/// (zero for `constant`).
pub fn embedding_params(family: Family, kind: DomainKind, m_out: usize, degree: usize) -> Vec<f64> {
    let d = kind.ambient_dim();
    let mut p = vec![0.0; family.arity(kind, m_out, degree)];
    match family {
        Family::Constant | Family::IdentityEmbed => {}
        Family::Affine => {
            for i in 0..m_out.min(d) {
                p[i * (d + 1) + i] = 1.0;
            }
        }
        Family::CircleFourier => {
            let block = 2 * degree + 1;
            if degree >= 1 {
                p[1] = 1.0;
                if m_out > 1 {
                    p[block + 2] = 1.0;
                }
            }
        }
        Family::SphereHarmonic | Family::Polynomial => {
            let block = p.len() / m_out;
            if degree >= 1 {
                for i in 0..m_out.min(d) {
                    p[i * block + 1 + i] = 1.0;
                }
            }
        }
        Family::RadialWarp => {
            for i in 0..m_out.min(2) {
                p[2 * i + i] = 1.0;
            }
        }
    }
    p
}

struct Objective<'a> {
    domain: &'a SampledDomain,
    family: Family,
    m_out: usize,
    tol: &'a Tolerances,
}

impl Objective<'_> {
    fn map(&self, params: &[f64]) -> Result<MapSpec> {
        MapSpec::new(self.family, self.m_out, params.to_vec())
    }

    fn graph(&self, map: &MapSpec) -> Result<(Vec<NeighborCertificate>, f64, f64)> {
        let img = evaluate(map, self.domain)?;
        let certs = neighbor_graph(&img, self.domain, self.tol)?;
        let df = compute_df(&certs);
        Ok((certs, df, delta_allowance(self.domain, &img)))
    }
}

pub fn estimate_mu(spec: &DomainSpec, family: Family, m_out: usize, cfg: &MuConfig) -> Result<MuEstimate> {
    let domain = spec.build()?;
    let kind = domain.kind();
    let x0 = embedding_params(family, kind, m_out, cfg.degree);
    MapSpec::new(family, m_out, x0.clone())?.check(kind)?;
    let bound = lower_bound(kind, m_out);
    let obj = Objective {
        domain: &domain,
        family,
        m_out,
        tol: &cfg.tolerances,
    };
    let restarts = cfg.restarts.max(1);
    let per_restart = (cfg.budget / restarts).max(1);

    struct Run {
        x: Vec<f64>,
        summary: RestartSummary,
        trace: Vec<(usize, f64)>,
        violations: Vec<Reproducer>,
    }
    let runs: Vec<Run> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let start: Vec<f64> = x0
                .iter()
                .map(|v| v + (2.0 * rng.gen::<f64>() - 1.0) * cfg.perturbation)
                .collect();
            let mut violations = Vec::new();
            let mut start_df = f64::NAN;
            let f = |p: &[f64]| -> f64 {
                let Ok(map) = obj.map(p) else {
                    return f64::INFINITY;
                };
                let Ok((certs, df, delta)) = obj.graph(&map) else {
                    return f64::INFINITY;
                };
                if start_df.is_nan() {
                    start_df = df;
                }
                if let Some(lb) = bound {
                    if df < lb - delta {
                        violations.push(Reproducer {
                            domain: *spec,
                            map,
                            df,
                            delta,
                            lower_bound: lb,
                            certificates: certs,
                        });
                    }
                }
                df
            };
            let m = cfg.optimizer.clone().with_budget(per_restart).minimize(f, &start);
            Run {
                x: m.x,
                summary: RestartSummary {
                    index: r,
                    start_df,
                    best_df: m.value,
                    evaluations: m.evals,
                },
                trace: m.trace,
                violations,
            }
        })
        .collect();

    let mut trace = Vec::new();
    let mut offset = 0;
    let mut running = f64::INFINITY;
    let mut best: Option<&Run> = None;
    for run in &runs {
        for &(i, v) in &run.trace {
            if v < running {
                running = v;
                trace.push((offset + i, v));
            }
        }
        offset += run.summary.evaluations;
        if best.is_none_or(|b| run.summary.best_df < b.summary.best_df) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    let best_map = obj.map(&best.x)?;

    let dense = spec.with_samples(2 * spec.samples).build()?;
    let dense_obj = Objective { domain: &dense, ..obj };
    let (_, best_df, delta) = dense_obj.graph(&best_map)?;

    Ok(MuEstimate {
        domain: *spec,
        family,
        m_out,
        settings: cfg.clone(),
        lower_bound: bound,
        best_df,
        search_df: best.summary.best_df,
        best_map,
        delta,
        trace,
        restarts: runs.iter().map(|r| r.summary.clone()).collect(),
        violations: runs.into_iter().flat_map(|r| r.violations).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm2Config {
    pub samples: usize,
    pub seed: u64,
    /// Degrees cycle through 1..=max_degree across trials.
    pub max_degree: usize,
    /// Coefficients are uniform in [−scale, scale].
    pub scale: f64,
    /// Include the standard embedding as trial 0.
    pub include_identity: bool,
    pub tolerances: Tolerances,
}

impl Default for Thm2Config {
    fn default() -> Self {
        Self {
            samples: 2048,
            seed: 0,
            max_degree: 4,
            scale: 1.0,
            include_identity: false,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm2Trial {
    pub index: usize,
    pub seed: u64,
    pub map: MapSpec,
    pub df: f64,
    pub delta: f64,
    /// D_f − bound.
    pub margin: f64,
    /// Samples realizing D_f and their intrinsic distance.
    pub pair: Option<(usize, usize, f64)>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thm2Report {
    pub n: usize,
    pub m_out: usize,
    pub domain: DomainSpec,
    pub settings: Thm2Config,
    pub bound: f64,
    pub trials: Vec<Thm2Trial>,
    pub all_passed: bool,
    /// First violating trial; later trials are not run.
    pub reproducer: Option<Reproducer>,
}

/// Random maps Sⁿ → ℝ^m_out (circle_fourier for n = 1, sphere_harmonic
/// otherwise); each trial passes when D_f ≥ √((n+2)/n) − δ_N.
pub fn verify_thm2(n: usize, m_out: usize, trials: usize, cfg: &Thm2Config) -> Result<Thm2Report> {
    if m_out <= n {
        return Err(Error::OutOfRange(format!(
            "the bound needs m_out > n, got n = {n}, m_out = {m_out}"
        )));
    }
    let spec = DomainSpec {
        kind: DomainKind::Sphere(n),
        samples: cfg.samples,
        seed: cfg.seed,
        scheme: crate::domains::SamplingScheme::QuasiUniform,
    };
    let domain = spec.build()?;
    let bound = thm2_bound(n)?;
    let family = if n == 1 {
        Family::CircleFourier
    } else {
        Family::SphereHarmonic
    };
    let obj = Objective {
        domain: &domain,
        family,
        m_out,
        tol: &cfg.tolerances,
    };
    let maps: Vec<(u64, MapSpec)> = (0..trials)
        .map(|t| {
            let seed = cfg.seed.wrapping_add(t as u64);
            if t == 0 && cfg.include_identity {
                return Ok((seed, MapSpec::identity(m_out)));
            }
            let degree = 1 + t % cfg.max_degree.max(1);
            Ok((seed, random_map(family, domain.kind(), m_out, degree, seed, cfg.scale)?))
        })
        .collect::<Result<_>>()?;

    let mut report = Thm2Report {
        n,
        m_out,
        domain: spec,
        settings: cfg.clone(),
        bound,
        trials: Vec::new(),
        all_passed: true,
        reproducer: None,
    };
    for (index, (seed, map)) in maps.into_iter().enumerate() {
        let (certs, df, delta) = obj.graph(&map)?;
        let margin = df - bound;
        let passed = margin >= -delta;
        report.trials.push(Thm2Trial {
            index,
            seed,
            map: map.clone(),
            df,
            delta,
            margin,
            pair: extremal_pair(&domain, &certs),
            passed,
        });
        if !passed {
            report.all_passed = false;
            report.reproducer = Some(Reproducer {
                domain: spec,
                map,
                df,
                delta,
                lower_bound: bound,
                certificates: certs,
            });
            break;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaHistogram {
    /// `bins + 1` edges spanning [0, 2].
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub pairs: u64,
    pub min: f64,
    pub max: f64,
    /// Widest interval inside [min, max] containing no pair distance.
    pub largest_gap: f64,
}

/// Histogram of ρ(x, y) over certified neighbor pairs. Exploratory: nothing
/// is asserted about the result.
pub fn delta_sweep(domain: &SampledDomain, map: &MapSpec, bins: usize, tol: &Tolerances) -> Result<DeltaHistogram> {
    let bins = bins.max(1);
    let img = evaluate(map, domain)?;
    let certs = neighbor_graph(&img, domain, tol)?;
    let width = 2.0 / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut dists = Vec::new();
    for c in &certs {
        for (k, &i) in c.indices.iter().enumerate() {
            for &j in &c.indices[k + 1..] {
                let d = domain.intrinsic_dist(i, j);
                counts[((d / width) as usize).min(bins - 1)] += 1;
                dists.push(d);
            }
        }
    }
    dists.sort_by(f64::total_cmp);
    let pairs = counts.iter().sum();
    let largest_gap = dists.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    Ok(DeltaHistogram {
        edges: (0..=bins).map(|b| b as f64 * width).collect(),
        counts,
        pairs,
        min: dists.first().copied().unwrap_or(0.0),
        max: dists.last().copied().unwrap_or(0.0),
        largest_gap,
    })
}
