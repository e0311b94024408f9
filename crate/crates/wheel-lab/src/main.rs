use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wheel_lab_core::field::FieldMode;
use wheel_lab_core::report::{
    render, run_pipeline, run_stages, write_artifacts, CheckToggles, Layer, RunConfig, BLOCK_NAMES,
};
use wheel_lab_core::tree::RootMode;

#[derive(Parser)]
#[command(name = "wheel-lab", version, about = "Discrete LQG geodesic trees and their contour curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and every enabled check; writes the report and exports.
    Run(ConfigArgs),
    /// Build the stages and draw the requested layers.
    Render {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated: ball-heatmap, geodesics, tree, dual-tree, wheel-path, short-hair-subtree.
        #[arg(long, value_delimiter = ',', required = true)]
        layers: Vec<String>,
    },
    /// Run the pipeline with a single check block enabled.
    Check {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(BLOCK_NAMES))]
        only: String,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON run configuration; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    /// Field mode: zero-boundary or torus.
    #[arg(long)]
    mode: Option<String>,
    /// Root: `wired`, `point:<vertex id>` or `point:<row>,<col>`.
    #[arg(long)]
    root: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_root(s: &str, n: usize) -> Result<RootMode> {
    if s == "wired" {
        return Ok(RootMode::Wired);
    }
    let Some(rest) = s.strip_prefix("point:") else {
        bail!("root must be `wired` or `point:<v>`, got `{s}`");
    };
    match rest.split_once(',') {
        Some((r, c)) => {
            let (r, c): (usize, usize) = (r.trim().parse()?, c.trim().parse()?);
            if r > n || c > n {
                bail!("({r}, {c}) is off the lattice");
            }
            Ok(RootMode::Point(r * (n + 1) + c))
        }
        None => Ok(RootMode::Point(rest.trim().parse()?)),
    }
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => RunConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(g) = self.gamma {
            cfg.gamma = g;
        }
        if self.xi.is_some() {
            cfg.xi = self.xi;
        }
        if let Some(m) = &self.mode {
            cfg.field_mode = m.parse::<FieldMode>()?;
        }
        if let Some(r) = &self.root {
            cfg.root_mode = parse_root(r, cfg.n)?;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("WHEEL_LAB_THREADS") {
        let threads: usize = v
            .parse()
            .with_context(|| format!("WHEEL_LAB_THREADS must be a positive integer, got `{v}`"))?;
        if threads == 0 {
            bail!("WHEEL_LAB_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run_and_write(cfg: &RunConfig, draw: bool) -> Result<bool> {
    let outcome = run_pipeline(cfg)?;
    let written = write_artifacts(&outcome, &cfg.out)?;
    for p in &written {
        println!("wrote {}", p.display());
    }
    if draw {
        let (svg, png) = render(&outcome.artifacts, &Layer::ALL, &cfg.out)?;
        println!("wrote {}\nwrote {}", svg.display(), png.display());
    }
    for b in &outcome.report.blocks {
        let status = if b.passed { "pass" } else { "FAIL" };
        match &b.error {
            Some(e) => println!("{status} {} ({e})", b.name),
            None => println!("{status} {}", b.name),
        }
    }
    for d in &outcome.report.summary.disabled {
        println!("skip {d}");
    }
    Ok(outcome.report.summary.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Run(args) => run_and_write(&args.resolve()?, true),
        Command::Check { config, only } => {
            let mut cfg = config.resolve()?;
            cfg.checks = CheckToggles::only(&only).expect("clap restricts block names");
            run_and_write(&cfg, false)
        }
        Command::Render { config, layers } => {
            let cfg = config.resolve()?;
            let layers = layers
                .iter()
                .map(|l| l.parse::<Layer>())
                .collect::<Result<Vec<_>, _>>()?;
            let (art, _) = run_stages(&cfg)?;
            let (svg, png) = render(&art, &layers, &cfg.out)?;
            println!("wrote {}\nwrote {}", svg.display(), png.display());
            Ok(true)
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
