//! Three operations for the static demo page, on the benchmark machine with
//! adjustable immersion, hold and resolution. Lengths cross the boundary in
//! mm (depths) and µm (vibration, SLE); speeds in rev/min.

use chatter_core::scenario::FlexibleAxes;
use chatter_core::stability::{linspace, sld_grid};
use chatter_core::surface::{edge_trajectory, sle_sweep, steady_state_vibration, surface_location_error};
use chatter_core::{Discretization, Hold, MillingScenario};
use wasm_bindgen::prelude::*;

fn scenario(immersion: f64) -> Result<MillingScenario, JsError> {
    Ok(MillingScenario::benchmark().with_immersion(immersion)?)
}

fn disc(steps: usize, zoh: bool) -> Result<Discretization, JsError> {
    let hold = if zoh { Hold::Zoh } else { Hold::Imp };
    Ok(Discretization::new(steps, hold)?)
}

#[wasm_bindgen]
pub struct LobeMap {
    speeds: Vec<f64>,
    depths_mm: Vec<f64>,
    radius: Vec<f64>,
    boundary_mm: Vec<f64>,
}

#[wasm_bindgen]
impl LobeMap {
    pub fn speeds(&self) -> Vec<f64> {
        self.speeds.clone()
    }

    pub fn depths_mm(&self) -> Vec<f64> {
        self.depths_mm.clone()
    }

    /// Spectral radius, speed-major (`NaN` for failed cells).
    pub fn radius(&self) -> Vec<f64> {
        self.radius.clone()
    }

    pub fn boundary_mm(&self) -> Vec<f64> {
        self.boundary_mm.clone()
    }
}

/// Spectral radius over a speed x depth grid.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn stability_map(
    speed_lo: f64,
    speed_hi: f64,
    speed_count: usize,
    depth_hi_mm: f64,
    depth_count: usize,
    immersion: f64,
    steps: usize,
    zoh: bool,
) -> Result<LobeMap, JsError> {
    let s = scenario(immersion)?;
    let speeds = linspace(speed_lo, speed_hi, speed_count);
    let depths = linspace(0.0, depth_hi_mm * 1e-3, depth_count);
    let grid = sld_grid(&s, &speeds, &depths, disc(steps, zoh)?, 0.0)?;
    let radius = (0..speeds.len())
        .flat_map(|i| (0..depths.len()).map(move |j| (i, j)))
        .map(|(i, j)| grid.radius[(i, j)])
        .collect();
    Ok(LobeMap {
        boundary_mm: grid.boundary().iter().map(|b| b * 1e3).collect(),
        speeds,
        depths_mm: depths.iter().map(|d| d * 1e3).collect(),
        radius,
    })
}

/// SLE in µm along the speed axis; `NaN` where the cut chatters.
#[wasm_bindgen]
pub fn sle_curve(
    speed_lo: f64,
    speed_hi: f64,
    speed_count: usize,
    depth_mm: f64,
    immersion: f64,
    steps: usize,
    zoh: bool,
) -> Result<Vec<f64>, JsError> {
    let s = scenario(immersion)?.with_axial_depth(depth_mm * 1e-3)?;
    let map = sle_sweep(&s, &linspace(speed_lo, speed_hi, speed_count), disc(steps, zoh)?)?;
    Ok(map.values.iter().map(|v| v.map_or(f64::NAN, |x| x * 1e6)).collect())
}

/// Steady-state vibration over one tooth period, interleaved `[x0, y0, x1, y1, ...]` in µm,
/// followed by the SLE in µm as the last element.
#[wasm_bindgen]
pub fn vibration_profile(speed: f64, depth_mm: f64, immersion: f64, steps: usize, zoh: bool) -> Result<Vec<f64>, JsError> {
    let s = scenario(immersion)?.with_speed(speed)?.with_axial_depth(depth_mm * 1e-3)?;
    let pair = s.lift(disc(steps, zoh)?)?;
    let vib = steady_state_vibration(&pair.structure, &pair.force, s.conditions.axial_depth)?;
    let planar = vib.planar(FlexibleAxes::Both);
    let traj = edge_trajectory(&planar, &s.tool, &s.conditions.feed);
    let sle = surface_location_error(&traj, s.tool.direction, s.tool.diameter)?;
    let mut out: Vec<f64> = planar.iter().flat_map(|p| [p[0] * 1e6, p[1] * 1e6]).collect();
    out.push(sle.value * 1e6);
    Ok(out)
}
