//! Steady-state forced vibration and the surface location error (SLE).

use nalgebra::{DMatrix, DVector, Vector2};

use crate::cutting_force::{averaged_coefficients, MillingDirection, ToolGeometry};
use crate::dense;
use crate::error::{Error, Result};
use crate::lifted::{LiftedForce, LiftedModel};
use crate::scenario::{restrict_to, Discretization, FlexibleAxes, MillingScenario};
use crate::stability::{classify, spectral_radius, Classification, SldGrid};

/// Periodic steady-state vibration over one tooth-passing angle, slot `k` at angle `kΔθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyStateVibration {
    /// Stacked `[Δz_0; …; Δz_{m-1}]` over the flexible axes.
    pub stacked: DVector<f64>,
    pub io_dim: usize,
}

impl SteadyStateVibration {
    pub fn steps(&self) -> usize {
        self.stacked.len() / self.io_dim.max(1)
    }

    pub fn sample(&self, k: usize) -> DVector<f64> {
        self.stacked.rows(self.io_dim * k, self.io_dim).into_owned()
    }

    /// Samples as planar `[x, y]` vectors, rigid axes reading zero.
    pub fn planar(&self, flexible: FlexibleAxes) -> Vec<Vector2<f64>> {
        let axes = flexible.indices();
        (0..self.steps())
            .map(|k| {
                let mut v = Vector2::zeros();
                for (slot, &axis) in axes.iter().enumerate() {
                    v[axis] = self.stacked[self.io_dim * k + slot];
                }
                v
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.stacked.amax()
    }
}

/// `Δz̄_ss = a_p [C_L (I - A_L)^-1 B_L + D_L] (r̄ - S̄ s̄)`.
///
/// The regenerative terms cancel in steady state (`Δz̄_K = Δz̄_{K-1}`), so only
/// a `2nr` solve is needed.
pub fn steady_state_vibration(
    lm: &LiftedModel,
    lf: &LiftedForce,
    axial_depth: f64,
) -> Result<SteadyStateVibration> {
    if lm.lifted_dim() != lf.lifted_dim() {
        return Err(Error::Dimension(format!(
            "lifted structure is {}-dimensional, lifted force {}-dimensional",
            lm.lifted_dim(),
            lf.lifted_dim()
        )));
    }
    let n = lm.state_dim();
    let u = lf.excitation();
    let lhs = DMatrix::identity(n, n) - &lm.a;
    let bu = &lm.b * &u;
    let x = dense::solve(&lhs, &DMatrix::from_column_slice(n, 1, bu.as_slice()))
        .ok_or(Error::NoSteadyState("I - A_L is singular; the structure is undamped"))?;
    let stacked = (&lm.c * x.column(0) + &lm.d * &u) * axial_depth;
    Ok(SteadyStateVibration {
        stacked,
        io_dim: lm.io_dim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePoint {
    /// 1-based tooth index.
    pub tooth: usize,
    pub index: usize,
    pub x: f64,
    pub y: f64,
}

/// Cutting-edge positions `Δz_k + (D/2)[sin φ_jk; cos φ_jk] + (k/m) s_t` for every tooth.
pub fn edge_trajectory(
    vibration: &[Vector2<f64>],
    tool: &ToolGeometry,
    feed: &Vector2<f64>,
) -> Vec<EdgePoint> {
    let m = vibration.len();
    let n = tool.teeth_count;
    let pitch = tool.tooth_pitch();
    let step = pitch / m.max(1) as f64;
    let radius = 0.5 * tool.diameter;
    let mut out = Vec::with_capacity(n * m);
    for j in 0..n {
        for (k, dz) in vibration.iter().enumerate() {
            let phi = k as f64 * step + pitch * j as f64;
            let frac = k as f64 / m as f64;
            out.push(EdgePoint {
                tooth: j + 1,
                index: k,
                x: dz[0] + radius * phi.sin() + frac * feed[0],
                y: dz[1] + radius * phi.cos() + frac * feed[1],
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Undercut,
    Overcut,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SleResult {
    /// Signed, m; positive is undercut.
    pub value: f64,
    pub sense: Sense,
    /// `(tooth, k)` of the sample with the largest `y_e`.
    pub extremal: (usize, usize),
}

/// `D/2 - max y_e` for up-milling and its negative for down-milling.
pub fn surface_location_error(
    trajectory: &[EdgePoint],
    direction: MillingDirection,
    diameter: f64,
) -> Result<SleResult> {
    let top = trajectory
        .iter()
        .max_by(|a, b| a.y.total_cmp(&b.y))
        .ok_or_else(|| Error::domain("trajectory", "is empty"))?;
    let gap = 0.5 * diameter - top.y;
    let value = match direction {
        MillingDirection::Up => gap,
        MillingDirection::Down => -gap,
    };
    let sense = if value > 0.0 {
        Sense::Undercut
    } else if value < 0.0 {
        Sense::Overcut
    } else {
        Sense::Zero
    };
    Ok(SleResult {
        value,
        sense,
        extremal: (top.tooth, top.index),
    })
}

/// SLE of a scenario from an already computed steady state.
pub fn sle_from_vibration(scenario: &MillingScenario, vib: &SteadyStateVibration) -> Result<SleResult> {
    let planar = vib.planar(scenario.flexible);
    let traj = edge_trajectory(&planar, &scenario.tool, &scenario.conditions.feed);
    surface_location_error(&traj, scenario.tool.direction, scenario.tool.diameter)
}

/// Steady state and SLE of the scenario as configured.
pub fn scenario_sle(scenario: &MillingScenario, disc: Discretization) -> Result<SleResult> {
    let pair = scenario.lift(disc)?;
    let vib = steady_state_vibration(&pair.structure, &pair.force, scenario.conditions.axial_depth)?;
    sle_from_vibration(scenario, &vib)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SleMap {
    pub speeds: Vec<f64>,
    /// SLE in m, `None` where the cut chatters or the computation failed.
    pub values: Vec<Option<f64>>,
    pub axial_depth: f64,
    pub feed: Vector2<f64>,
    /// Set when the feed has a `y` component; the SLE formula ignores feed direction.
    pub lateral_feed: bool,
}

impl SleMap {
    /// Indices of interior local maxima of `|SLE|` among consecutive valid cells.
    pub fn local_maxima(&self) -> Vec<usize> {
        let v = &self.values;
        (1..v.len().saturating_sub(1))
            .filter(|&i| match (v[i - 1], v[i], v[i + 1]) {
                (Some(a), Some(b), Some(c)) => b.abs() > a.abs() && b.abs() >= c.abs(),
                _ => false,
            })
            .collect()
    }
}

/// Speed sweep of the SLE at the scenario's axial depth.
pub fn sle_sweep(scenario: &MillingScenario, speeds: &[f64], disc: Discretization) -> Result<SleMap> {
    let full = averaged_coefficients(&scenario.force_model()?, disc.steps)?;
    let (coeffs, feed) = restrict_to(&full, scenario.flexible, &scenario.conditions.feed)?;
    let a_p = scenario.conditions.axial_depth;
    let cell = |omega: f64| -> Result<Option<f64>> {
        let s = scenario.clone().with_speed(omega)?;
        let pair = s.lift_with(disc, &coeffs, &feed)?;
        let (radius, _) = spectral_radius(&pair.closed_loop(a_p)?.phi)?;
        if classify(radius, 0.0) != Classification::Stable {
            return Ok(None);
        }
        let vib = steady_state_vibration(&pair.structure, &pair.force, a_p)?;
        Ok(Some(sle_from_vibration(&s, &vib)?.value))
    };
    let values = speeds.iter().map(|&w| cell(w).ok().flatten()).collect();
    Ok(SleMap {
        speeds: speeds.to_vec(),
        values,
        axial_depth: a_p,
        feed: scenario.conditions.feed,
        lateral_feed: scenario.conditions.feed[1] != 0.0,
    })
}

/// SLE on every stable cell of a lobe grid (`NaN` elsewhere).
///
/// The vibration is exactly linear in `a_p`, so one steady state per speed at
/// unit depth is rescaled to each depth; the SLE itself is not linear and is
/// re-evaluated per cell.
pub fn sle_over_grid(
    scenario: &MillingScenario,
    grid: &SldGrid,
    disc: Discretization,
) -> Result<DMatrix<f64>> {
    let full = averaged_coefficients(&scenario.force_model()?, disc.steps)?;
    let (coeffs, feed) = restrict_to(&full, scenario.flexible, &scenario.conditions.feed)?;
    let (ns, nd) = grid.shape();
    let mut out = DMatrix::from_element(ns, nd, f64::NAN);
    for (i, &omega) in grid.speeds.iter().enumerate() {
        if (0..nd).all(|j| !grid.stable[(i, j)]) {
            continue;
        }
        let s = scenario.clone().with_speed(omega)?;
        let pair = s.lift_with(disc, &coeffs, &feed)?;
        let unit = steady_state_vibration(&pair.structure, &pair.force, 1.0)?;
        for (j, &a_p) in grid.depths.iter().enumerate() {
            if grid.stable[(i, j)] {
                let vib = SteadyStateVibration {
                    stacked: &unit.stacked * a_p,
                    io_dim: unit.io_dim,
                };
                out[(i, j)] = sle_from_vibration(&s, &vib)?.value;
            }
        }
    }
    Ok(out)
}

/// `Ω_SLE = 60 f_n / (kN)`, rev/min, for `k = 1..=k_max`.
pub fn sle_critical_speeds(natural_frequency_hz: f64, teeth_count: usize, k_max: usize) -> Vec<f64> {
    (1..=k_max)
        .map(|k| 60.0 * natural_frequency_hz / (k * teeth_count) as f64)
        .collect()
}
