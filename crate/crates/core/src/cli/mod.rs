//! Command-line surface. Flags override the `--config` JSON file, which
//! mirrors the flag names (with underscores).

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use fneighbors::domains::{DomainKind, DomainSpec, SamplingScheme};
use fneighbors::maps::{Family, MapSpec};
use fneighbors::report::RunConfig;
use fneighbors::{Error, Tolerances};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fneighbors", version, about = "Empty-sphere neighbors of sampled maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Neighbor graph, D_f and the extremal pair of one map.
    Neighbors,
    /// Random maps Sⁿ → ℝᵐ against the √((n+2)/n) bound.
    VerifyThm2,
    /// Random maps of the cube boundary: neighbors on disjoint faces.
    VerifyCube,
    /// Minimize D_f over a map family.
    Mu,
    /// Witness point of a cover's images.
    Witness,
    /// Degree of the partition-of-unity map of a cover.
    Degree,
    /// Histogram of neighbor-pair distances.
    DeltaSweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Neighbors => "neighbors",
            Command::VerifyThm2 => "verify-thm2",
            Command::VerifyCube => "verify-cube",
            Command::Mu => "mu",
            Command::Witness => "witness",
            Command::Degree => "degree",
            Command::DeltaSweep => "delta-sweep",
        }
    }

    fn randomized(self, has_family: bool) -> bool {
        match self {
            Command::VerifyThm2 | Command::VerifyCube | Command::Mu => true,
            Command::Degree => false,
            Command::Neighbors | Command::Witness | Command::DeltaSweep => has_family,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Scheme {
    Quasi,
    Random,
}

/// Flags shared by every subcommand. All optional so the config file can
/// supply them.
#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Flags {
    /// JSON file with defaults for any of these flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// sphere | cube | simplex
    #[arg(long, global = true)]
    domain: Option<String>,
    /// Domain parameter: n for Sⁿ, m for ∂[0,1]ᵐ, n for ∂Δⁿ⁻¹.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long = "m-out", global = true)]
    m_out: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    scheme: Option<Scheme>,
    /// Map as inline JSON or a path to a JSON file.
    #[arg(long, global = true)]
    map: Option<String>,
    #[arg(long, global = true)]
    family: Option<String>,
    /// K for trigonometric families, polynomial degree otherwise.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// triangulation | three-arc | degenerate | cube | simplex
    #[arg(long, global = true)]
    cover: Option<String>,
    #[arg(long = "r-thick", global = true)]
    r_thick: Option<f64>,
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long, global = true)]
    bins: Option<usize>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long = "eps-inside", global = true)]
    eps_inside: Option<f64>,
    #[arg(long = "eps-witness", global = true)]
    eps_witness: Option<f64>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    #[arg(long = "dump-certs", global = true)]
    dump_certs: Option<PathBuf>,
}

impl Flags {
    fn or(self, file: Flags) -> Flags {
        Flags {
            config: self.config,
            domain: self.domain.or(file.domain),
            n: self.n.or(file.n),
            m_out: self.m_out.or(file.m_out),
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed),
            scheme: self.scheme.or(file.scheme),
            map: self.map.or(file.map),
            family: self.family.or(file.family),
            degree: self.degree.or(file.degree),
            trials: self.trials.or(file.trials),
            cover: self.cover.or(file.cover),
            r_thick: self.r_thick.or(file.r_thick),
            budget: self.budget.or(file.budget),
            restarts: self.restarts.or(file.restarts),
            bins: self.bins.or(file.bins),
            threads: self.threads.or(file.threads),
            eps_inside: self.eps_inside.or(file.eps_inside),
            eps_witness: self.eps_witness.or(file.eps_witness),
            out: self.out.or(file.out),
            csv: self.csv.or(file.csv),
            svg: self.svg.or(file.svg),
            dump_certs: self.dump_certs.or(file.dump_certs),
        }
    }
}

/// Side-file destinations; not part of the report.
#[derive(Debug, Default)]
pub struct Outputs {
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub dump_certs: Option<PathBuf>,
}

pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invalid(_) | Error::FamilyMismatch { .. } | Error::Arity { .. } | Error::OutOfRange(_) => EXIT_USAGE,
            Error::NoWitnessFound { .. } => EXIT_VIOLATION,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn read_map(source: &str) -> Result<MapSpec, Failure> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        std::fs::read_to_string(source).map_err(|e| Failure::usage(format!("cannot read map `{source}`: {e}")))?
    };
    let map: MapSpec = serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad map JSON: {e}")))?;
    MapSpec::new(map.family, map.m_out, map.params).map_err(Failure::from)
}

fn resolve(command: Command, flags: Flags) -> Result<(RunConfig, Outputs, Option<usize>), Failure> {
    let flags = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
            let file: Flags =
                serde_json::from_str(&text).map_err(|e| Failure::usage(format!("bad config JSON: {e}")))?;
            flags.or(file)
        }
        None => flags,
    };
    let default_domain = match command {
        Command::VerifyCube => "cube",
        _ => "sphere",
    };
    let domain_name = flags.domain.as_deref().unwrap_or(default_domain);
    let default_n = if domain_name.starts_with("sphere") { 1 } else { 2 };
    let kind = DomainKind::from_name(domain_name, flags.n.unwrap_or(default_n))?;
    if command == Command::VerifyThm2 && !matches!(kind, DomainKind::Sphere(_)) {
        return Err(Failure::usage("verify-thm2 runs on spheres"));
    }
    if command == Command::VerifyCube && !matches!(kind, DomainKind::CubeBoundary(_)) {
        return Err(Failure::usage("verify-cube runs on the cube boundary"));
    }
    let family = flags.family.as_deref().map(Family::from_name).transpose()?;
    if command.randomized(family.is_some()) && flags.seed.is_none() {
        return Err(Failure::usage(format!("{} needs --seed", command.name())));
    }
    let map = flags.map.as_deref().map(read_map).transpose()?;
    let m_out = flags
        .m_out
        .or(map.as_ref().map(|m| m.m_out))
        .unwrap_or(match (command, kind) {
            (Command::VerifyThm2 | Command::Mu, DomainKind::Sphere(n)) => n + 1,
            _ => kind.ambient_dim(),
        });
    if let Some(m) = &map {
        if m.m_out != m_out {
            return Err(Failure::usage(format!(
                "map has m_out {} but --m-out is {m_out}",
                m.m_out
            )));
        }
    }
    let scheme = match flags.scheme.unwrap_or(Scheme::Quasi) {
        Scheme::Quasi => SamplingScheme::QuasiUniform,
        Scheme::Random => SamplingScheme::UniformRandom,
    };
    let mut tolerances = Tolerances::default();
    if let Some(e) = flags.eps_inside {
        tolerances.eps_inside = e;
    }
    if let Some(e) = flags.eps_witness {
        tolerances.eps_witness = e;
    }
    let default_samples = match (command, kind) {
        (Command::VerifyThm2, DomainKind::Sphere(n)) if n >= 2 => 4096,
        _ => 2048,
    };
    let config = RunConfig {
        command: command.name().to_string(),
        domain: DomainSpec {
            kind,
            samples: flags.samples.unwrap_or(default_samples),
            seed: flags.seed.unwrap_or(0),
            scheme,
        },
        m_out,
        map,
        family,
        degree: flags.degree,
        trials: flags.trials,
        cover: flags.cover,
        r_thick: flags.r_thick,
        budget: flags.budget,
        restarts: flags.restarts,
        bins: flags.bins,
        tolerances,
    };
    let outputs = Outputs {
        out: flags.out,
        csv: flags.csv,
        svg: flags.svg,
        dump_certs: flags.dump_certs,
    };
    Ok((config, outputs, flags.threads))
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let outcome = resolve(cli.command, cli.opts).and_then(|(config, outputs, threads)| {
        if let Some(t) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global()
                .map_err(|e| Failure {
                    code: EXIT_INTERNAL,
                    message: e.to_string(),
                })?;
        }
        commands::dispatch(cli.command, &config, &outputs)
    });
    match outcome {
        Ok(passed) => {
            if passed {
                EXIT_PASS
            } else {
                EXIT_VIOLATION
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
