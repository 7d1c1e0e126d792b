//! CSV layouts. Every number is written with 12 significant digits; rows end in `\n`.

use std::io::{self, Write};

use chatter_core::fmt::sig12;
use chatter_core::nalgebra::DMatrix;
use chatter_core::stability::{ConvergenceRecord, SldGrid};
use chatter_core::surface::SleMap;

pub const SLD_HEADER: &str = "omega_rpm,ap_mm,spectral_radius,stable";
pub const SLE_HEADER: &str = "omega_rpm,sle_um,valid";
pub const SLE_GRID_HEADER: &str = "omega_rpm,ap_mm,sle_um,valid";
pub const CONVERGENCE_HEADER: &str = "m,mu_re,mu_im,rel_err";

/// Speed-major rows; failed cells carry `nan` and `stable = 0`.
pub fn write_sld<W: Write>(grid: &SldGrid, mut w: W) -> io::Result<()> {
    writeln!(w, "{SLD_HEADER}")?;
    for (i, &omega) in grid.speeds.iter().enumerate() {
        for (j, &a_p) in grid.depths.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                sig12(omega),
                sig12(a_p * 1e3),
                sig12(grid.radius[(i, j)]),
                u8::from(grid.stable[(i, j)])
            )?;
        }
    }
    Ok(())
}

pub fn write_sle<W: Write>(map: &SleMap, mut w: W) -> io::Result<()> {
    writeln!(w, "{SLE_HEADER}")?;
    for (omega, value) in map.speeds.iter().zip(&map.values) {
        match value {
            Some(v) => writeln!(w, "{},{},1", sig12(*omega), sig12(v * 1e6))?,
            None => writeln!(w, "{},nan,0", sig12(*omega))?,
        }
    }
    Ok(())
}

/// SLE on a lobe grid, `NaN` cells marked invalid.
pub fn write_sle_grid<W: Write>(speeds: &[f64], depths: &[f64], sle: &DMatrix<f64>, mut w: W) -> io::Result<()> {
    writeln!(w, "{SLE_GRID_HEADER}")?;
    for (i, &omega) in speeds.iter().enumerate() {
        for (j, &a_p) in depths.iter().enumerate() {
            let v = sle[(i, j)];
            writeln!(
                w,
                "{},{},{},{}",
                sig12(omega),
                sig12(a_p * 1e3),
                sig12(v * 1e6),
                u8::from(v.is_finite())
            )?;
        }
    }
    Ok(())
}

pub fn write_convergence<W: Write>(records: &[ConvergenceRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{}",
            r.steps,
            sig12(r.eigenvalue.re),
            sig12(r.eigenvalue.im),
            sig12(r.relative_error)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SldRow {
    pub omega_rpm: f64,
    pub ap_mm: f64,
    pub spectral_radius: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleRow {
    pub omega_rpm: f64,
    pub sle_um: Option<f64>,
}

fn fields<'a>(text: &'a str, header: &str) -> Result<Vec<Vec<&'a str>>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => return Err(format!("expected header {header:?}, got {other:?}")),
    }
    let width = header.split(',').count();
    lines
        .enumerate()
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() == width {
                Ok(f)
            } else {
                Err(format!("row {}: expected {width} fields, got {}", i + 1, f.len()))
            }
        })
        .collect()
}

fn num(s: &str) -> Result<f64, String> {
    s.parse().map_err(|_| format!("not a number: {s:?}"))
}

fn flag(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("expected 0 or 1, got {s:?}")),
    }
}

pub fn read_sld(text: &str) -> Result<Vec<SldRow>, String> {
    fields(text, SLD_HEADER)?
        .into_iter()
        .map(|f| {
            Ok(SldRow {
                omega_rpm: num(f[0])?,
                ap_mm: num(f[1])?,
                spectral_radius: num(f[2])?,
                stable: flag(f[3])?,
            })
        })
        .collect()
}

pub fn read_sle(text: &str) -> Result<Vec<SleRow>, String> {
    fields(text, SLE_HEADER)?
        .into_iter()
        .map(|f| {
            let valid = flag(f[2])?;
            Ok(SleRow {
                omega_rpm: num(f[0])?,
                sle_um: if valid { Some(num(f[1])?) } else { None },
            })
        })
        .collect()
}

pub fn read_convergence(text: &str) -> Result<Vec<ConvergenceRecord>, String> {
    fields(text, CONVERGENCE_HEADER)?
        .into_iter()
        .map(|f| {
            Ok(ConvergenceRecord {
                steps: f[0].parse().map_err(|_| format!("bad m {:?}", f[0]))?,
                eigenvalue: chatter_core::Complex64::new(num(f[1])?, num(f[2])?),
                relative_error: num(f[3])?,
            })
        })
        .collect()
}

/// Rebuilds the grid axes and mask from speed-major SLD rows.
pub fn grid_from_rows(rows: &[SldRow]) -> Result<SldGrid, String> {
    let mut speeds: Vec<f64> = Vec::new();
    for r in rows {
        if speeds.last() != Some(&r.omega_rpm) {
            speeds.push(r.omega_rpm);
        }
    }
    if speeds.is_empty() {
        return Err("no rows".into());
    }
    if !rows.len().is_multiple_of(speeds.len()) {
        return Err(format!("{} rows do not form a grid over {} speeds", rows.len(), speeds.len()));
    }
    let nd = rows.len() / speeds.len();
    let depths: Vec<f64> = rows[..nd].iter().map(|r| r.ap_mm * 1e-3).collect();
    let mut radius = DMatrix::zeros(speeds.len(), nd);
    let mut stable = DMatrix::from_element(speeds.len(), nd, false);
    for (i, &omega) in speeds.iter().enumerate() {
        for j in 0..nd {
            let r = &rows[i * nd + j];
            if r.omega_rpm != omega || r.ap_mm * 1e-3 != depths[j] {
                return Err(format!("row {} breaks the speed-major grid layout", i * nd + j + 1));
            }
            radius[(i, j)] = r.spectral_radius;
            stable[(i, j)] = r.stable;
        }
    }
    Ok(SldGrid {
        speeds,
        depths,
        radius,
        stable,
        margin: 0.0,
        failures: Vec::new(),
    })
}
