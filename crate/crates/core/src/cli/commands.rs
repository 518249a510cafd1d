use std::path::Path;

use serde::Serialize;

use fneighbors::cover::{certify_cover, CoverCertificate};
use fneighbors::domains::{
    cube_boundary_cover, degenerate_three_arc_cover, regular_triangulation_cover, simplex_boundary_cover,
    three_arc_cover, CoverAssignment, CubeFaces, DomainKind, SampledDomain,
};
use fneighbors::maps::{delta_allowance, evaluate, random_map, Family, MapSpec};
use fneighbors::mu::{
    delta_sweep, estimate_mu, verify_thm2, DeltaHistogram, MuConfig, MuEstimate, Thm2Config, Thm2Report,
};
use fneighbors::neighbors::{
    compute_df, disjoint_faces_check, extremal_pair, neighbor_graph, neighbor_pairs, pair_is_neighbor_fast,
    NeighborCertificate, Verdict, Witness, WitnessReport,
};
use fneighbors::report::{Report, RunConfig};
use fneighbors::svg::neighbors_svg;

use super::{Command, Failure, Outputs, EXIT_INTERNAL};

const DEFAULT_DEGREE: usize = 3;

pub fn dispatch(command: Command, config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    match command {
        Command::Neighbors => neighbors(config, outputs),
        Command::VerifyThm2 => verify(config, outputs),
        Command::VerifyCube => cube(config, outputs),
        Command::Mu => mu(config, outputs),
        Command::Witness => witness(config, outputs),
        Command::Degree => degree(config, outputs),
        Command::DeltaSweep => sweep(config, outputs),
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| io_failure(path, e))
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_failure(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_failure(path, e))?;
    }
    w.flush().map_err(|e| io_failure(path, e))
}

fn emit<T: Serialize>(
    config: &RunConfig,
    outputs: &Outputs,
    passed: bool,
    result: T,
    summary: &str,
) -> Result<bool, Failure> {
    let json = Report {
        config: config.clone(),
        passed,
        result,
    }
    .to_json()?;
    match &outputs.out {
        Some(path) => {
            write_file(path, &json)?;
            println!("{summary}");
        }
        None => {
            print!("{json}");
            eprintln!("{summary}");
        }
    }
    Ok(passed)
}

fn domain(config: &RunConfig) -> Result<SampledDomain, Failure> {
    Ok(config.domain.build()?)
}

/// The explicit map, else a random member of `--family`, else the
/// standard embedding.
fn map_for(config: &RunConfig, domain: &SampledDomain, seed: u64) -> Result<MapSpec, Failure> {
    if let Some(m) = &config.map {
        m.check(domain.kind())?;
        return Ok(m.clone());
    }
    match config.family {
        Some(family) => Ok(random_map(
            family,
            domain.kind(),
            config.m_out,
            config.degree.unwrap_or(DEFAULT_DEGREE),
            seed,
            1.0,
        )?),
        None => Ok(MapSpec::identity(config.m_out)),
    }
}

fn cover_for(config: &RunConfig, domain: &SampledDomain) -> Result<(CoverAssignment, Option<CubeFaces>), Failure> {
    let kind = domain.kind();
    let name = config.cover.as_deref().unwrap_or(match kind {
        DomainKind::Sphere(_) => "triangulation",
        DomainKind::CubeBoundary(_) => "cube",
        DomainKind::SimplexBoundary(_) => "simplex",
    });
    let samples = config.domain.samples;
    Ok(match (name, kind) {
        ("triangulation", DomainKind::Sphere(_)) => (regular_triangulation_cover(domain)?, None),
        ("three-arc", DomainKind::Sphere(1)) => (three_arc_cover(domain, 0.0)?, None),
        ("degenerate", DomainKind::Sphere(1)) => (degenerate_three_arc_cover(domain, 0.3)?, None),
        ("cube", DomainKind::CubeBoundary(m)) => {
            let (_, c, f) = cube_boundary_cover(m, samples)?;
            (c, Some(f))
        }
        ("simplex", DomainKind::SimplexBoundary(n)) => (simplex_boundary_cover(n, samples)?.1, None),
        _ => return Err(Failure::usage(format!("cover `{name}` is not available on {kind}"))),
    })
}

#[derive(Serialize)]
struct Extremal {
    i: usize,
    j: usize,
    distance: f64,
    certificate: NeighborCertificate,
}

#[derive(Serialize)]
struct NeighborsResult {
    map: MapSpec,
    d_f: f64,
    delta: f64,
    certificates: usize,
    coincidence_certificates: usize,
    extremal: Option<Extremal>,
}

fn neighbors(config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    let domain = domain(config)?;
    let map = map_for(config, &domain, config.domain.seed)?;
    let img = evaluate(&map, &domain)?;
    let certs = neighbor_graph(&img, &domain, &config.tolerances)?;
    let d_f = compute_df(&certs);
    let extremal = extremal_pair(&domain, &certs).map(|(i, j, distance)| {
        let cert = certs
            .iter()
            .find(|c| c.indices.binary_search(&i).is_ok() && c.indices.binary_search(&j).is_ok())
            .expect("pair comes from a certificate")
            .clone();
        Extremal {
            i,
            j,
            distance,
            certificate: cert,
        }
    });
    if let Some(path) = &outputs.dump_certs {
        write_file(
            path,
            &(serde_json::to_string_pretty(&certs).map_err(fneighbors::Error::from)? + "\n"),
        )?;
    }
    if let Some(path) = &outputs.csv {
        #[derive(Serialize)]
        struct Row {
            i: usize,
            j: usize,
            distance: f64,
        }
        write_csv(
            path,
            neighbor_pairs(&certs).into_iter().map(|(i, j)| Row {
                i,
                j,
                distance: domain.intrinsic_dist(i, j),
            }),
        )?;
    }
    if let Some(path) = &outputs.svg {
        let witness = extremal.as_ref().and_then(|e| match &e.certificate.witness {
            Witness::Sphere(s) => Some(s),
            Witness::Coincidence => None,
        });
        let pair = extremal.as_ref().map(|e| (e.i, e.j));
        match neighbors_svg(&domain, &img, witness, pair) {
            Some(svg) => write_file(path, &svg)?,
            None => eprintln!("warning: SVG output needs planar images (m_out = 2)"),
        }
    }
    let summary = match &extremal {
        Some(e) => format!("D_f = {d_f:.6}  pair ({}, {}) at distance {:.6}", e.i, e.j, e.distance),
        None => format!("D_f = {d_f:.6}"),
    };
    let result = NeighborsResult {
        map,
        d_f,
        delta: delta_allowance(&domain, &img),
        certificates: certs.len(),
        coincidence_certificates: certs.iter().filter(|c| c.witness == Witness::Coincidence).count(),
        extremal,
    };
    emit(config, outputs, true, result, &summary)
}

fn verify(config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    let DomainKind::Sphere(n) = config.domain.kind else {
        unreachable!("checked when resolving");
    };
    let cfg = Thm2Config {
        samples: config.domain.samples,
        seed: config.domain.seed,
        max_degree: config.degree.unwrap_or(4),
        tolerances: config.tolerances.clone(),
        ..Thm2Config::default()
    };
    let report: Thm2Report = verify_thm2(n, config.m_out, config.trials.unwrap_or(20), &cfg)?;
    if let Some(path) = &outputs.csv {
        #[derive(Serialize)]
        struct Row {
            trial: usize,
            seed: u64,
            d_f: f64,
            delta: f64,
            margin: f64,
            passed: bool,
        }
        write_csv(
            path,
            report.trials.iter().map(|t| Row {
                trial: t.index,
                seed: t.seed,
                d_f: t.df,
                delta: t.delta,
                margin: t.margin,
                passed: t.passed,
            }),
        )?;
    }
    let worst = report.trials.iter().map(|t| t.margin).fold(f64::INFINITY, f64::min);
    let summary = format!(
        "bound {:.6}; {} trials; smallest margin {worst:.6}; {}",
        report.bound,
        report.trials.len(),
        if report.all_passed { "pass" } else { "VIOLATION" }
    );
    let passed = report.all_passed;
    emit(config, outputs, passed, report, &summary)
}

#[derive(Serialize)]
struct CubeTrial {
    seed: u64,
    map: MapSpec,
    near: Option<usize>,
    far: Option<usize>,
    face: Option<usize>,
    verdict: Option<Verdict>,
    residual: Option<f64>,
    error: Option<String>,
    passed: bool,
}

fn cube(config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    let DomainKind::CubeBoundary(m) = config.domain.kind else {
        unreachable!("checked when resolving");
    };
    let (domain, cover, faces) = cube_boundary_cover(m, config.domain.samples)?;
    let family = config.family.unwrap_or(Family::Polynomial);
    let degree = config.degree.unwrap_or(DEFAULT_DEGREE);
    let mut trials = Vec::new();
    for t in 0..config.trials.unwrap_or(10) {
        let seed = config.domain.seed.wrapping_add(t as u64);
        let map = match &config.map {
            Some(m) => m.clone(),
            None => random_map(family, domain.kind(), config.m_out, degree, seed, 1.0)?,
        };
        let img = evaluate(&map, &domain)?;
        let trial = match disjoint_faces_check(&domain, &cover, &faces, &img, &config.tolerances) {
            Ok(r) => CubeTrial {
                seed,
                map,
                near: Some(r.near),
                far: Some(r.far),
                face: Some(r.face),
                verdict: Some(r.verdict),
                residual: Some(r.witness.residual),
                error: None,
                passed: r.verdict == Verdict::Yes,
            },
            Err(e) => CubeTrial {
                seed,
                map,
                near: None,
                far: None,
                face: None,
                verdict: None,
                residual: None,
                error: Some(e.to_string()),
                passed: false,
            },
        };
        trials.push(trial);
    }
    if let Some(path) = &outputs.csv {
        #[derive(Serialize)]
        struct Row {
            seed: u64,
            near: Option<usize>,
            far: Option<usize>,
            face: Option<usize>,
            passed: bool,
        }
        write_csv(
            path,
            trials.iter().map(|t| Row {
                seed: t.seed,
                near: t.near,
                far: t.far,
                face: t.face,
                passed: t.passed,
            }),
        )?;
    }
    let ok = trials.iter().filter(|t| t.passed).count();
    let passed = ok == trials.len();
    let summary = format!("{ok}/{} trials found a neighbor pair on disjoint faces", trials.len());
    emit(config, outputs, passed, trials, &summary)
}

fn mu(config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    let family = config.family.unwrap_or(match config.domain.kind {
        DomainKind::Sphere(1) => Family::CircleFourier,
        DomainKind::Sphere(_) => Family::SphereHarmonic,
        _ => Family::Polynomial,
    });
    let defaults = MuConfig::default();
    let cfg = MuConfig {
        restarts: config.restarts.unwrap_or(defaults.restarts),
        budget: config.budget.unwrap_or(defaults.budget),
        degree: config.degree.unwrap_or(defaults.degree),
        seed: config.domain.seed,
        tolerances: config.tolerances.clone(),
        ..defaults
    };
    let est: MuEstimate = estimate_mu(&config.domain, family, config.m_out, &cfg)?;
    if let Some(path) = &outputs.csv {
        #[derive(Serialize)]
        struct Row {
            evaluation: usize,
            d_f: f64,
        }
        write_csv(path, est.trace.iter().map(|&(evaluation, d_f)| Row { evaluation, d_f }))?;
    }
    let lower = est.lower_bound.map_or("unknown".to_string(), |b| format!("{b:.6}"));
    let summary = format!(
        "mu bracket [{lower}, {:.6}] (search density {:.6}, delta {:.4}, {} violations)",
        est.best_df,
        est.search_df,
        est.delta,
        est.violations.len()
    );
    let passed = est.violations.is_empty();
    emit(config, outputs, passed, est, &summary)
}

#[derive(Serialize)]
struct WitnessResult {
    map: MapSpec,
    report: WitnessReport,
    /// Fast verdicts between the chosen samples.
    pairs: Vec<(usize, usize, Verdict)>,
}

fn witness(config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    let domain = domain(config)?;
    let (cover, _) = cover_for(config, &domain)?;
    let map = map_for(config, &domain, config.domain.seed)?;
    let img = evaluate(&map, &domain)?;
    let report = fneighbors::neighbors::witness_point(&domain, &cover, &img, &config.tolerances)?;
    let chosen: Vec<usize> = report.chosen.iter().map(|c| c.1).collect();
    let mut pairs = Vec::new();
    for (k, &a) in chosen.iter().enumerate() {
        for &b in &chosen[k + 1..] {
            if a != b {
                pairs.push((
                    a,
                    b,
                    pair_is_neighbor_fast(a, b, &img, Some(&domain), &config.tolerances).0,
                ));
            }
        }
    }
    let summary = format!(
        "w = {:?}  R = {:.6}  residual {:.3e} (threshold {:.3e})",
        report.w, report.radius, report.residual, report.threshold
    );
    let passed = report.found;
    emit(config, outputs, passed, WitnessResult { map, report, pairs }, &summary)
}

fn degree(config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    let domain = domain(config)?;
    let (cover, _) = cover_for(config, &domain)?;
    let cert: CoverCertificate = certify_cover(&domain, &cover, config.r_thick)?;
    let summary = match cert.runs.first().and_then(|r| r.estimate.as_ref()) {
        Some(e) => format!(
            "degree {}  confidence {:.4}  raw {:.6}  ({:?}: {})",
            e.degree, e.confidence, e.raw_sum, cert.class, cert.reason
        ),
        None => format!("{:?}: {}", cert.class, cert.reason),
    };
    emit(config, outputs, true, cert, &summary)
}

fn sweep(config: &RunConfig, outputs: &Outputs) -> Result<bool, Failure> {
    let domain = domain(config)?;
    let map = map_for(config, &domain, config.domain.seed)?;
    let hist: DeltaHistogram = delta_sweep(&domain, &map, config.bins.unwrap_or(20), &config.tolerances)?;
    if let Some(path) = &outputs.csv {
        #[derive(Serialize)]
        struct Row {
            lo: f64,
            hi: f64,
            count: u64,
        }
        write_csv(
            path,
            hist.counts.iter().enumerate().map(|(b, &count)| Row {
                lo: hist.edges[b],
                hi: hist.edges[b + 1],
                count,
            }),
        )?;
    }
    let summary = format!(
        "{} pairs, distances in [{:.4}, {:.4}], largest gap {:.4}",
        hist.pairs, hist.min, hist.max, hist.largest_gap
    );
    emit(config, outputs, true, hist, &summary)
}
