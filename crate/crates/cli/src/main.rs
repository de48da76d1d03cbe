//! Batch experiment runner over the exact dynamics library: every module
//! is exposed as a reproducible command with machine-readable output.
//!
//! Runs are deterministic given their configuration (randomness is always
//! seeded), outputs carry a provenance header with the config hash, and a
//! failing run writes no files at all.

mod commands;
mod config;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use commands::{execute, OutputFile};
use config::ExperimentConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "anosovlab",
    version,
    about = "Exact experiments on hyperbolic toral automorphisms, their sphere quotients, and carpet blow-ups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// System matrix, four integers `a b c d` (row-major)
    #[arg(long, default_value = "2 1 1 1")]
    matrix: String,
    /// Arithmetic mode: exact certificates or 256-bit rounded solves
    #[arg(long, default_value = "exact", value_parser = ["exact", "highprec"])]
    mode: String,
    /// Output path; secondary outputs derive from it. Stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form periodic counting tables, optionally enumeration-verified
    Count {
        #[command(flatten)]
        common: CommonArgs,
        /// Inclusive depth range `a..b`
        #[arg(long, default_value = "1..12")]
        n_range: String,
        /// Verify every row by full enumeration with the fiber certificate
        #[arg(long)]
        enumerate: bool,
    },
    /// Enumerate a periodic point set as CSV
    Enumerate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        n: u32,
        /// periodic | antipodal | sphere
        #[arg(long, default_value = "periodic")]
        kind: String,
    },
    /// Shadow a periodic pseudo-orbit by an exactly periodic point
    Shadow {
        #[command(flatten)]
        common: CommonArgs,
        /// Pseudo-orbit file (header `space N periodic`)
        #[arg(long, conflicts_with_all = ["length", "noise", "x0"])]
        input: Option<PathBuf>,
        /// Generated pseudo-orbit length
        #[arg(long)]
        length: Option<usize>,
        /// Per-step noise bound, a rational like 1/1000
        #[arg(long)]
        noise: Option<String>,
        /// torus | sphere
        #[arg(long, default_value = "torus")]
        space: String,
        /// Start point `p/q r/s`; a seeded periodic point when omitted
        #[arg(long)]
        x0: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Glue orbit segments into one periodic point (specification)
    Spec {
        #[command(flatten)]
        common: CommonArgs,
        /// Segments `x y:len;x y:len`, points in `p/q r/s` form
        #[arg(long)]
        segments: String,
        /// Gap length between consecutive segments
        #[arg(long)]
        gap: u32,
    },
    /// Periodic-orbit empirical measure and its character discrepancy
    Measure {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        n: u32,
        /// torus | sphere
        #[arg(long, default_value = "torus")]
        space: String,
        /// Exclude the spine classes and renormalize
        #[arg(long)]
        starred: bool,
        /// Frequency cutoff for the character family
        #[arg(long, alias = "K", default_value_t = 3)]
        k_max: i64,
    },
    /// Separated-set growth, periodic-scheme growth, or the exact sandwich
    Entropy {
        #[command(flatten)]
        common: CommonArgs,
        /// grid | periodic | growth
        #[arg(long, default_value = "grid")]
        scheme: String,
        /// Grid mesh denominator (grid scheme)
        #[arg(long)]
        mesh: Option<u32>,
        /// Separation scale, a rational like 1/10
        #[arg(long)]
        delta: Option<String>,
        #[arg(long)]
        n_range: String,
        /// torus | sphere
        #[arg(long, default_value = "torus")]
        space: String,
    },
    /// Blow-up registry validation, the periodic ledger, and measures
    Carpet {
        #[command(flatten)]
        common: CommonArgs,
        /// Registry file: one base point `p/q r/s` per line
        #[arg(long)]
        registry: PathBuf,
        #[arg(long, default_value = "1..20")]
        n_range: String,
        /// base | direction: how circle periodic points are booked
        #[arg(long, default_value = "base")]
        period_mode: String,
        /// Emit the validation report only
        #[arg(long)]
        validate_only: bool,
        /// Also export the projected measure and discrepancy at this depth
        #[arg(long)]
        measure_n: Option<u32>,
        #[arg(long, alias = "K", default_value_t = 3)]
        k_max: i64,
    },
    /// Normalized Bowen-ball masses over seeded centers
    Homogeneity {
        #[command(flatten)]
        common: CommonArgs,
        /// Period of the sampling measure
        #[arg(long)]
        r: u32,
        #[arg(long, default_value = "2..5")]
        n_range: String,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        #[arg(long, default_value_t = 50)]
        centers: usize,
        #[arg(long)]
        seed: u64,
        /// torus | sphere
        #[arg(long, default_value = "torus")]
        space: String,
        #[arg(long)]
        starred: bool,
    },
    /// Run an experiment described by a TOML config file
    Run {
        /// Config file; its canonical form is hashed into the provenance
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output path
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn build_config(command: &Command) -> Result<ExperimentConfig> {
    let out_string = |o: &Option<PathBuf>| o.as_ref().map(|p| p.display().to_string());
    let cfg = match command {
        Command::Count {
            common,
            n_range,
            enumerate,
        } => {
            let mut cfg = base(common, "count");
            cfg.n_range = Some(n_range.clone());
            cfg.enumerate = enumerate.then_some(true);
            cfg
        }
        Command::Enumerate { common, n, kind } => {
            let mut cfg = base(common, "enumerate");
            cfg.n = Some(*n);
            cfg.kind = Some(kind.clone());
            cfg
        }
        Command::Shadow {
            common,
            input,
            length,
            noise,
            space,
            x0,
            seed,
        } => {
            let mut cfg = base(common, "shadow");
            cfg.input = out_string(input);
            cfg.length = *length;
            cfg.noise = noise.clone();
            cfg.space = Some(space.clone());
            cfg.x0 = x0.clone();
            cfg.seed = *seed;
            cfg
        }
        Command::Spec {
            common,
            segments,
            gap,
        } => {
            let mut cfg = base(common, "spec");
            cfg.segments = Some(segments.clone());
            cfg.gap = Some(*gap);
            cfg
        }
        Command::Measure {
            common,
            n,
            space,
            starred,
            k_max,
        } => {
            let mut cfg = base(common, "measure");
            cfg.n = Some(*n);
            cfg.space = Some(space.clone());
            cfg.starred = starred.then_some(true);
            cfg.k_max = Some(*k_max);
            cfg
        }
        Command::Entropy {
            common,
            scheme,
            mesh,
            delta,
            n_range,
            space,
        } => {
            let mut cfg = base(common, "entropy");
            cfg.scheme = Some(scheme.clone());
            cfg.mesh = *mesh;
            cfg.delta = delta.clone();
            cfg.n_range = Some(n_range.clone());
            cfg.space = Some(space.clone());
            cfg
        }
        Command::Carpet {
            common,
            registry,
            n_range,
            period_mode,
            validate_only,
            measure_n,
            k_max,
        } => {
            let mut cfg = base(common, "carpet");
            cfg.registry = Some(registry.display().to_string());
            cfg.n_range = Some(n_range.clone());
            cfg.period_mode = Some(period_mode.clone());
            cfg.validate_only = validate_only.then_some(true);
            cfg.measure_n = *measure_n;
            cfg.k_max = Some(*k_max);
            cfg
        }
        Command::Homogeneity {
            common,
            r,
            n_range,
            epsilon,
            centers,
            seed,
            space,
            starred,
        } => {
            let mut cfg = base(common, "homogeneity");
            cfg.r = Some(*r);
            cfg.n_range = Some(n_range.clone());
            cfg.epsilon = Some(epsilon.clone());
            cfg.centers = Some(*centers);
            cfg.seed = Some(*seed);
            cfg.space = Some(space.clone());
            cfg.starred = starred.then_some(true);
            cfg
        }
        Command::Run { config, out } => {
            let text = std::fs::read_to_string(config)
                .with_context(|| format!("reading config {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_toml(&text)?;
            if let Some(out) = out {
                cfg.out = Some(out.display().to_string());
            }
            cfg
        }
    };
    Ok(cfg)
}

fn base(common: &CommonArgs, command: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::empty(command);
    cfg.matrix = common.matrix.clone();
    cfg.mode = common.mode.clone();
    cfg.out = common.out.as_ref().map(|p| p.display().to_string());
    cfg
}

fn write_outputs(cfg: &ExperimentConfig, outputs: Vec<OutputFile>) -> Result<()> {
    match &cfg.out {
        None => {
            for (i, out) in outputs.iter().enumerate() {
                if outputs.len() > 1 {
                    let name = out.suffix.unwrap_or("primary");
                    if i > 0 {
                        println!();
                    }
                    println!("# --- {name} ---");
                }
                print!("{}", out.content);
            }
        }
        Some(path) => {
            let primary = PathBuf::from(path);
            if let Some(parent) = primary.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            for out in &outputs {
                let target = match out.suffix {
                    None => primary.clone(),
                    Some(suffix) => {
                        let mut name = primary.as_os_str().to_owned();
                        name.push(".");
                        name.push(suffix);
                        PathBuf::from(name)
                    }
                };
                std::fs::write(&target, &out.content)
                    .with_context(|| format!("writing {}", target.display()))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli.command) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    match execute(&cfg).and_then(|outputs| write_outputs(&cfg, outputs)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
