use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chatter_core::oracle::{build_dde, simulate_dde, InitialHistory};
use chatter_core::stability::{convergence_curve, sld_grid};
use chatter_core::surface::{sle_over_grid, sle_sweep};
use chatter_core::{Discretization, Error as CoreError, Hold};

use crate::chart;
use crate::config::{ConfigError, RunConfig};
use crate::output;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CHATTER_OUT_DIR";

pub const SLD_FILE: &str = "sld.csv";
pub const SLE_FILE: &str = "sle.csv";
pub const SLE_GRID_FILE: &str = "sle_grid.csv";
pub const CONVERGENCE_FILE: &str = "converge.csv";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const CHART_FILE: &str = "chart.svg";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sld,
    Sle,
    Converge,
    Simulate,
    Chart,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub hold: Option<Hold>,
    pub steps: Option<usize>,
    /// Speed points by depth points.
    pub grid: Option<(usize, usize)>,
    /// rev/min.
    pub speed_range: Option<(f64, f64)>,
    /// mm.
    pub depth_range: Option<(f64, f64)>,
}

impl Overrides {
    pub fn apply(&self, config: &mut RunConfig) -> Result<(), ConfigError> {
        if let Some(h) = self.hold {
            config.hold = h;
        }
        if let Some(m) = self.steps {
            config.steps = m;
        }
        if let Some((w, h)) = self.grid {
            config.speeds.count = w;
            config.depths.count = h;
        }
        if let Some((lo, hi)) = self.speed_range {
            config.speeds.min = lo;
            config.speeds.max = hi;
        }
        if let Some((lo, hi)) = self.depth_range {
            config.depths.min = lo * 1e-3;
            config.depths.max = hi * 1e-3;
        }
        config.validate().map_err(|(key, constraint)| ConfigError::Invalid {
            line: 0,
            key: key.into(),
            constraint,
        })
    }
}

/// `--out`, then the environment variable, then the config file, then the working directory.
pub fn resolve_out_dir(flag: Option<&Path>, config: &RunConfig) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    config.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).with_context(|| format!("cannot write {}", path.display()))
}

fn disc(config: &RunConfig) -> Result<Discretization> {
    Ok(Discretization::new(config.steps, config.hold)?)
}

pub fn run(command: Command, config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    match command {
        Command::Sld => sld(config, out_dir),
        Command::Sle => sle(config, out_dir),
        Command::Converge => converge(config, out_dir),
        Command::Simulate => simulate(config, out_dir),
        Command::Chart => chart_cmd(config, out_dir),
    }
}

fn sld(config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let grid = sld_grid(
        &config.scenario,
        &config.speeds.values(),
        &config.depths.values(),
        disc(config)?,
        config.margin,
    )?;
    let path = out_dir.join(SLD_FILE);
    write_file(&path, |w| output::write_sld(&grid, w))?;
    let stable = grid.stable.iter().filter(|&&s| s).count();
    let mut summary = format!(
        "{} cells ({} x {}), {stable} stable, {} failed",
        grid.radius.len(),
        grid.speeds.len(),
        grid.depths.len(),
        grid.failures.len()
    );
    if !grid.radius.is_empty() {
        let b = grid.boundary();
        let lo = b.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = b.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        summary += &format!("; boundary {:.3}..{:.3} mm", lo * 1e3, hi * 1e3);
    }
    for f in &grid.failures {
        summary += &format!(
            "\n  cell ({}, {}) failed: {}",
            f.speed_index, f.depth_index, f.message
        );
    }
    Ok(Outcome { files: vec![path], summary })
}

fn sle(config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let map = sle_sweep(&config.scenario, &config.speeds.values(), disc(config)?)?;
    let path = out_dir.join(SLE_FILE);
    write_file(&path, |w| output::write_sle(&map, w))?;
    let valid: Vec<f64> = map.values.iter().flatten().copied().collect();
    let mut summary = format!("{} of {} speeds stable", valid.len(), map.values.len());
    if !valid.is_empty() {
        let lo = valid.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = valid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        summary += &format!("; SLE {:.4}..{:.4} um", lo * 1e6, hi * 1e6);
        let peaks: Vec<String> = map.local_maxima().iter().map(|&i| format!("{:.0}", map.speeds[i])).collect();
        if !peaks.is_empty() {
            summary += &format!("; |SLE| peaks at {} rpm", peaks.join(", "));
        }
    }
    if map.lateral_feed {
        summary += "\n  note: feed has a y component; the SLE is evaluated along y regardless";
    }
    Ok(Outcome { files: vec![path], summary })
}

fn converge(config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let records = convergence_curve(&config.scenario, &config.converge_steps, config.hold, config.reference_steps)?;
    let path = out_dir.join(CONVERGENCE_FILE);
    write_file(&path, |w| output::write_convergence(&records, w))?;
    let summary = records
        .iter()
        .map(|r| format!("m = {:>4}: |mu| = {:.6}, rel err = {:.3e}", r.steps, r.eigenvalue.norm(), r.relative_error))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome { files: vec![path], summary })
}

fn simulate(config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let system = build_dde(&config.scenario)?;
    let initial = InitialHistory::Displacement(config.initial_displacement);
    match simulate_dde(&system, initial, config.periods, config.substeps) {
        Ok(traj) => {
            let path = out_dir.join(TRAJECTORY_FILE);
            write_file(&path, |w| traj.write_csv(config.scenario.flexible, w))?;
            let amp = traj.period_amplitudes();
            let last = amp.last().copied().unwrap_or(0.0);
            let summary = format!(
                "{} periods x {} substeps; peak |dz| {:.4e} m in the first period, {:.4e} m in the last",
                config.periods,
                config.substeps,
                amp.first().copied().unwrap_or(0.0),
                last
            );
            Ok(Outcome { files: vec![path], summary })
        }
        // blow-up is a result of the run, not a usage error
        Err(CoreError::Divergence { period }) => Ok(Outcome {
            files: Vec::new(),
            summary: format!("trajectory diverged in tooth period {period}; no file written"),
        }),
        Err(e) => Err(e.into()),
    }
}

fn chart_cmd(config: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let sld_path = out_dir.join(SLD_FILE);
    let mut files = Vec::new();
    let grid = if sld_path.exists() {
        let text = std::fs::read_to_string(&sld_path).with_context(|| format!("cannot read {}", sld_path.display()))?;
        let rows = output::read_sld(&text).map_err(|e| anyhow::anyhow!("{}: {e}", sld_path.display()))?;
        output::grid_from_rows(&rows).map_err(|e| anyhow::anyhow!("{}: {e}", sld_path.display()))?
    } else {
        let outcome = sld(config, out_dir)?;
        files.extend(outcome.files);
        let text = std::fs::read_to_string(&sld_path)?;
        output::grid_from_rows(&output::read_sld(&text).map_err(anyhow::Error::msg)?).map_err(anyhow::Error::msg)?
    };
    let sle = sle_over_grid(&config.scenario, &grid, disc(config)?)?;
    let grid_path = out_dir.join(SLE_GRID_FILE);
    write_file(&grid_path, |w| output::write_sle_grid(&grid.speeds, &grid.depths, &sle, w))?;
    files.push(grid_path);

    let title = format!(
        "Stability lobes and SLE, a_r/D = {}, {} m = {}",
        chatter_core::fmt::significant(config.scenario.immersion_ratio(), 3),
        config.hold.to_string().to_uppercase(),
        config.steps
    );
    let svg = chart::render(&grid, &sle, &title);
    let path = out_dir.join(CHART_FILE);
    write_file(&path, |w| w.write_all(svg.as_bytes()))?;
    files.push(path);
    let stable = grid.stable.iter().filter(|&&s| s).count();
    Ok(Outcome {
        files,
        summary: format!("{stable} of {} cells stable and coloured", grid.radius.len()),
    })
}
