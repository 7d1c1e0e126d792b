use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use chatter_cli::config::{parse_grid, parse_range};
use chatter_cli::{load_config, parse_config, resolve_out_dir, run, Command, Overrides, BENCHMARK};
use chatter_core::Hold;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chatter", version, about = "Milling stability lobes and surface location error")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Run configuration (key = value); the bundled benchmark setup when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory [default: $CHATTER_OUT_DIR, then `out_dir` from the config, then .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    hold: Option<HoldArg>,

    /// Samples per tooth period
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Speed points x depth points, e.g. 40x50
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, usize)>,

    /// lo:hi in rev/min
    #[arg(long, global = true, value_parser = |s: &str| parse_range(s, "rpm"))]
    speed_range: Option<(f64, f64)>,

    /// lo:hi in mm
    #[arg(long, global = true, value_parser = |s: &str| parse_range(s, "mm"))]
    depth_range: Option<(f64, f64)>,

    /// Worker threads for grid sweeps
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Spectral-radius grid and stability mask
    Sld,
    /// SLE along the speed axis at the configured depth
    Sle,
    /// Dominant-eigenvalue convergence against a fine IMP reference
    Converge,
    /// Time-marching oracle trajectory at the configured cutting point
    Simulate,
    /// Lobe diagram coloured by SLE (SVG)
    Chart,
}

#[derive(ValueEnum, Clone, Copy)]
enum HoldArg {
    Imp,
    Zoh,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => parse_config(BENCHMARK).context("bundled benchmark.cfg")?,
    };
    Overrides {
        hold: cli.hold.map(|h| match h {
            HoldArg::Imp => Hold::Imp,
            HoldArg::Zoh => Hold::Zoh,
        }),
        steps: cli.steps,
        grid: cli.grid,
        speed_range: cli.speed_range,
        depth_range: cli.depth_range,
    }
    .apply(&mut config)?;

    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .context("thread pool")?;
    }

    let command = match cli.command {
        Cmd::Sld => Command::Sld,
        Cmd::Sle => Command::Sle,
        Cmd::Converge => Command::Converge,
        Cmd::Simulate => Command::Simulate,
        Cmd::Chart => Command::Chart,
    };
    let out_dir = resolve_out_dir(cli.out.as_deref(), &config);
    let outcome = run(command, &config, &out_dir)?;
    println!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}
