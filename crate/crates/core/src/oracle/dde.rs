//! Time marching of `q' = A q - a_p B S(θ) (C q - Δz(θ - Θ)) + a_p B [r(θ) - S(θ) s_t]`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};

use super::restricted_terms;
use crate::cutting_force::ForceModel;
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::scenario::{FlexibleAxes, MillingScenario};
use crate::structural::StateSpaceModel;

/// Fewest integration steps per tooth period accepted by [`simulate_dde`].
pub const MIN_SUBSTEPS: usize = 500;

#[derive(Debug, Clone)]
pub struct DdeSystem {
    /// Angle-domain structural matrices.
    pub structure: StateSpaceModel,
    pub force: ForceModel,
    pub flexible: FlexibleAxes,
    pub feed: nalgebra::Vector2<f64>,
    pub axial_depth: f64,
    /// Tooth-passing angle `Θ`, rad.
    pub delay: f64,
}

pub fn build_dde(scenario: &MillingScenario) -> Result<DdeSystem> {
    Ok(DdeSystem {
        structure: scenario.angle_structure()?,
        force: scenario.force_model()?,
        flexible: scenario.flexible,
        feed: scenario.conditions.feed,
        axial_depth: scenario.conditions.axial_depth,
        delay: scenario.delay(),
    })
}

impl DdeSystem {
    pub fn state_dim(&self) -> usize {
        self.structure.state_dim()
    }

    pub fn io_dim(&self) -> usize {
        self.structure.c.nrows()
    }

    /// `a_p S(θ)` and `a_p [r(θ) - S(θ) s_t]` on the flexible axes.
    fn force_terms(&self, theta: f64) -> (DMatrix<f64>, DVector<f64>) {
        let (r, s) = self.force.at(theta);
        let (u, s) = restricted_terms(&r, &s, self.flexible, &self.feed);
        (s * self.axial_depth, u * self.axial_depth)
    }

    /// `B_p(θ) = a_p B S(θ) C`.
    pub fn delayed_gain(&self, theta: f64) -> DMatrix<f64> {
        let (s, _) = self.force_terms(theta);
        &self.structure.b * s * &self.structure.c
    }

    /// `w(θ) = a_p B [r(θ) - S(θ) s_t]`.
    pub fn forcing(&self, theta: f64) -> DVector<f64> {
        let (_, u) = self.force_terms(theta);
        &self.structure.b * u
    }

    fn rhs(&self, theta: f64, q: &DVector<f64>, delayed: &DVector<f64>) -> DVector<f64> {
        let (s, u) = self.force_terms(theta);
        let dz = &self.structure.c * q;
        let f = u - s * (dz - delayed);
        &self.structure.a * q + &self.structure.b * f
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialHistory {
    /// Structure at rest.
    Rest,
    /// Every modal displacement set to this value (m); velocities and the
    /// delayed output history are zero.
    Displacement(f64),
}

impl Default for InitialHistory {
    fn default() -> Self {
        InitialHistory::Displacement(1e-6)
    }
}

/// Output samples `Δz(i h)`, `h = Θ / substeps`, for `i = 0..=periods·substeps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub step_angle: f64,
    pub substeps: usize,
    pub io_dim: usize,
    /// Flat, sample-major.
    pub outputs: Vec<f64>,
    pub final_state: DVector<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.outputs.len() / self.io_dim
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn periods(&self) -> usize {
        (self.len() - 1) / self.substeps
    }

    pub fn output(&self, i: usize) -> &[f64] {
        &self.outputs[self.io_dim * i..self.io_dim * (i + 1)]
    }

    /// Samples at `kΘ/m`, `k = 0..m-1`, within tooth period `period` (0-based).
    pub fn period_samples(&self, period: usize, m: usize) -> Result<Vec<DVector<f64>>> {
        if m == 0 || !self.substeps.is_multiple_of(m) {
            return Err(Error::domain(
                "steps",
                format!("{} substeps per period are not a multiple of m = {m}", self.substeps),
            ));
        }
        if period >= self.periods() {
            return Err(Error::domain("period", format!("only {} periods simulated", self.periods())));
        }
        let stride = self.substeps / m;
        let base = period * self.substeps;
        Ok((0..m)
            .map(|k| DVector::from_column_slice(self.output(base + k * stride)))
            .collect())
    }

    /// Largest `|Δz|` component within each tooth period.
    pub fn period_amplitudes(&self) -> Vec<f64> {
        (0..self.periods())
            .map(|p| {
                let lo = p * self.substeps * self.io_dim;
                let hi = (p + 1) * self.substeps * self.io_dim;
                self.outputs[lo..hi].iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
            })
            .collect()
    }

    /// Writes `period_index,theta_rad,x_m,y_m`; rigid axes read zero.
    pub fn write_csv<W: Write>(&self, flexible: FlexibleAxes, mut w: W) -> std::io::Result<()> {
        writeln!(w, "period_index,theta_rad,x_m,y_m")?;
        let axes = flexible.indices();
        for i in 0..self.len() {
            let mut xy = [0.0; 2];
            for (slot, &axis) in axes.iter().enumerate() {
                xy[axis] = self.output(i)[slot];
            }
            writeln!(
                w,
                "{},{},{},{}",
                i / self.substeps,
                sig12(i as f64 * self.step_angle),
                sig12(xy[0]),
                sig12(xy[1])
            )?;
        }
        Ok(())
    }
}

/// Cubic Lagrange interpolation through the four stored samples around
/// fractional index `t`; indices before zero read the (zero) initial history.
fn interpolate(outputs: &[f64], io_dim: usize, t: f64, out: &mut DVector<f64>) {
    let base = t.floor() as isize - 1;
    let x = t - (base + 1) as f64;
    // nodes at -1, 0, 1, 2 relative to base + 1
    let w = [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ];
    out.fill(0.0);
    for (node, wk) in w.iter().enumerate() {
        let idx = base + node as isize;
        if idx < 0 || *wk == 0.0 {
            continue;
        }
        let lo = idx as usize * io_dim;
        for d in 0..io_dim {
            out[d] += wk * outputs[lo + d];
        }
    }
}

/// Fixed-step RK4 over `periods` tooth periods.
///
/// The delayed output `Δz(θ - Θ)` lies exactly `substeps` samples back, so
/// only the half-step stages need interpolation.
pub fn simulate_dde(
    system: &DdeSystem,
    initial: InitialHistory,
    periods: usize,
    substeps: usize,
) -> Result<Trajectory> {
    if substeps < MIN_SUBSTEPS {
        return Err(Error::domain(
            "substeps",
            format!("need at least {MIN_SUBSTEPS} per period, got {substeps}"),
        ));
    }
    let n = system.state_dim();
    let r = system.io_dim();
    let h = system.delay / substeps as f64;
    let total = periods * substeps;

    let mut q = DVector::zeros(n);
    if let InitialHistory::Displacement(amp) = initial {
        for i in (0..n).step_by(2) {
            q[i] = amp;
        }
    }
    let mut outputs = Vec::with_capacity((total + 1) * r);
    outputs.extend((&system.structure.c * &q).iter());

    let mut d0 = DVector::zeros(r);
    let mut dh = DVector::zeros(r);
    let mut d1 = DVector::zeros(r);
    for i in 0..total {
        // Coefficients are Θ-periodic; using the in-period angle keeps samples that
        // land on an engagement switch gated identically in every period.
        let theta = (i % substeps) as f64 * h;
        // delayed index i - substeps (+0, +1/2, +1); history before 0 is zero
        let back = i as f64 - substeps as f64;
        interpolate(&outputs, r, back, &mut d0);
        interpolate(&outputs, r, back + 0.5, &mut dh);
        interpolate(&outputs, r, back + 1.0, &mut d1);

        let k1 = system.rhs(theta, &q, &d0);
        let k2 = system.rhs(theta + 0.5 * h, &(&q + &k1 * (0.5 * h)), &dh);
        let k3 = system.rhs(theta + 0.5 * h, &(&q + &k2 * (0.5 * h)), &dh);
        let k4 = system.rhs(theta + h, &(&q + &k3 * h), &d1);
        q += (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);

        if q.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { period: i / substeps });
        }
        outputs.extend((&system.structure.c * &q).iter());
    }
    Ok(Trajectory {
        step_angle: h,
        substeps,
        io_dim: r,
        outputs,
        final_state: q,
    })
}
