//! Modal structural dynamics and its exact zero-phase discretization.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// One vibration mode of a single axis, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Natural frequency, rad/s.
    pub natural_frequency: f64,
    pub damping_ratio: f64,
    /// Modal stiffness, N/m.
    pub stiffness: f64,
}

impl Mode {
    pub fn new(natural_frequency: f64, damping_ratio: f64, stiffness: f64) -> Result<Self> {
        if !(natural_frequency.is_finite() && natural_frequency > 0.0) {
            return Err(Error::domain(
                "natural_frequency",
                format!("must be > 0, got {natural_frequency}"),
            ));
        }
        if !(damping_ratio > 0.0 && damping_ratio < 1.0) {
            return Err(Error::domain(
                "damping_ratio",
                format!("must lie in (0, 1), got {damping_ratio}"),
            ));
        }
        if !(stiffness.is_finite() && stiffness > 0.0) {
            return Err(Error::domain("stiffness", format!("must be > 0, got {stiffness}")));
        }
        Ok(Self {
            natural_frequency,
            damping_ratio,
            stiffness,
        })
    }

    pub fn from_hz(frequency_hz: f64, damping_ratio: f64, stiffness: f64) -> Result<Self> {
        Self::new(2.0 * PI * frequency_hz, damping_ratio, stiffness)
    }

    pub fn frequency_hz(&self) -> f64 {
        self.natural_frequency / (2.0 * PI)
    }
}

/// Modes acting along one machine axis; their receptances add.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalAxis {
    pub modes: Vec<Mode>,
}

impl ModalAxis {
    pub fn new(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::domain("modes", "an axis needs at least one mode"));
        }
        Ok(Self { modes })
    }

    /// Keeps the first `n` modes.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.modes.len() {
            return Err(Error::domain(
                "modes",
                format!("cannot keep {n} of {} modes", self.modes.len()),
            ));
        }
        Self::new(self.modes.iter().take(n).copied().collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Time,
    /// Independent variable is spindle angle; `rate` is the spindle angular speed in rad/s.
    Angle { rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// Modes per axis, in axis order.
    pub mode_counts: Vec<usize>,
    pub domain: Domain,
}

impl StateSpaceModel {
    pub fn axes_count(&self) -> usize {
        self.mode_counts.len()
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    /// `n` when every axis carries the same number of modes.
    pub fn modes_per_axis(&self) -> Option<usize> {
        let n = *self.mode_counts.first()?;
        self.mode_counts.iter().all(|&k| k == n).then_some(n)
    }
}

/// Per-mode `[displacement; velocity]` realization of a set of axes.
///
/// Each axis force drives only that axis's modes, and each output sums the
/// modal displacements of its axis, so `C (sI - A)^-1 B` is diagonal with
/// entries `Σ (ω²/K) / (s² + 2ξωs + ω²)`.
pub fn realize_axes(axes: &[ModalAxis]) -> Result<StateSpaceModel> {
    if axes.is_empty() {
        return Err(Error::domain("axes", "need at least one axis"));
    }
    let total_modes: usize = axes.iter().map(|a| a.modes.len()).sum();
    if axes.iter().any(|a| a.modes.is_empty()) {
        return Err(Error::domain("modes", "an axis needs at least one mode"));
    }
    let n_states = 2 * total_modes;
    let r = axes.len();
    let mut a = DMatrix::zeros(n_states, n_states);
    let mut b = DMatrix::zeros(n_states, r);
    let mut c = DMatrix::zeros(r, n_states);
    let mut blk = 0;
    for (axis, modal) in axes.iter().enumerate() {
        for mode in &modal.modes {
            let m = Mode::new(mode.natural_frequency, mode.damping_ratio, mode.stiffness)?;
            let w = m.natural_frequency;
            let i = 2 * blk;
            a[(i, i + 1)] = 1.0;
            a[(i + 1, i)] = -w * w;
            a[(i + 1, i + 1)] = -2.0 * m.damping_ratio * w;
            b[(i + 1, axis)] = w * w / m.stiffness;
            c[(axis, i)] = 1.0;
            blk += 1;
        }
    }
    Ok(StateSpaceModel {
        a,
        b,
        c,
        mode_counts: axes.iter().map(|a| a.modes.len()).collect(),
        domain: Domain::Time,
    })
}

pub fn realize_modal(x_axis: &ModalAxis, y_axis: &ModalAxis) -> Result<StateSpaceModel> {
    realize_axes(&[x_axis.clone(), y_axis.clone()])
}

/// Spindle angular speed in rad/s for a speed in rev/min.
pub fn spindle_rate(spindle_speed_rpm: f64) -> f64 {
    2.0 * PI * spindle_speed_rpm / 60.0
}

/// Rescales a time-domain model to the spindle-angle domain: `A/ω`, `B/ω`, `C`.
pub fn to_angle_domain(model: &StateSpaceModel, spindle_speed: f64) -> Result<StateSpaceModel> {
    if model.domain != Domain::Time {
        return Err(Error::domain("domain", "model is already in the angle domain"));
    }
    if !(spindle_speed.is_finite() && spindle_speed > 0.0) {
        return Err(Error::domain("spindle_speed", format!("must be > 0, got {spindle_speed}")));
    }
    let rate = spindle_rate(spindle_speed);
    Ok(StateSpaceModel {
        a: &model.a / rate,
        b: &model.b / rate,
        c: model.c.clone(),
        mode_counts: model.mode_counts.clone(),
        domain: Domain::Angle { rate },
    })
}

/// Whether every entry outside the 2×2 diagonal blocks is zero.
fn is_block_diagonal_2x2(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    if !n.is_multiple_of(2) || n != m.ncols() {
        return false;
    }
    for j in 0..n {
        for i in 0..n {
            if i / 2 != j / 2 && m[(i, j)] != 0.0 {
                return false;
            }
        }
    }
    true
}

/// `exp` of the 2×2 matrix `[[p, q], [r, s]]` in closed form.
///
/// With `t = (p+s)/2` and `N = M - tI`, `N² = δI` where `δ = ((p-s)/2)² + qr`,
/// so `e^M = e^t (c(δ) I + g(δ) N)` with `c = cosh√δ` or `cos√-δ` and
/// `g = sinh√δ/√δ` or `sin√-δ/√-δ`.
fn expm_2x2(p: f64, q: f64, r: f64, s: f64) -> [f64; 4] {
    let t = 0.5 * (p + s);
    let h = 0.5 * (p - s);
    let delta = h * h + q * r;
    let (cpart, gpart) = if delta > 0.0 {
        let x = delta.sqrt();
        let (ep, em) = ((t + x).exp(), (t - x).exp());
        let g = if x < 1e-4 {
            t.exp() * (1.0 + delta / 6.0 + delta * delta / 120.0)
        } else {
            (ep - em) / (2.0 * x)
        };
        (0.5 * (ep + em), g)
    } else {
        let y = (-delta).sqrt();
        let et = t.exp();
        let g = if y < 1e-4 {
            et * (1.0 + delta / 6.0 + delta * delta / 120.0)
        } else {
            et * y.sin() / y
        };
        (et * y.cos(), g)
    };
    [cpart + gpart * h, gpart * q, gpart * r, cpart - gpart * h]
}

/// Matrix exponential.
///
/// Block-diagonal inputs made of 2×2 blocks (the modal realization) use the
/// closed-form damped-oscillator exponential per block; anything else goes
/// through Padé scaling and squaring.
pub fn matrix_exponential(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "exponential of non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix", "exponential of a matrix with non-finite entries"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if is_block_diagonal_2x2(m) {
        let mut out = DMatrix::zeros(n, n);
        for k in (0..n).step_by(2) {
            let e = expm_2x2(m[(k, k)], m[(k, k + 1)], m[(k + 1, k)], m[(k + 1, k + 1)]);
            out[(k, k)] = e[0];
            out[(k, k + 1)] = e[1];
            out[(k + 1, k)] = e[2];
            out[(k + 1, k + 1)] = e[3];
        }
        return Ok(out);
    }
    Ok(m.exp())
}

/// `A^-1 B`, solved per 2×2 modal block when `A` is block diagonal.
fn modal_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if is_block_diagonal_2x2(a) {
        let mut out = DMatrix::zeros(b.nrows(), b.ncols());
        for k in (0..a.nrows()).step_by(2) {
            let (p, q, r, s) = (a[(k, k)], a[(k, k + 1)], a[(k + 1, k)], a[(k + 1, k + 1)]);
            let det = p * s - q * r;
            let scale = (p.abs() + q.abs()) * (r.abs() + s.abs());
            if !(det.abs() > 1e-14 * scale) || !det.is_finite() {
                return Err(Error::SingularMode { mode: k / 2 });
            }
            for j in 0..b.ncols() {
                let (b0, b1) = (b[(k, j)], b[(k + 1, j)]);
                out[(k, j)] = (s * b0 - q * b1) / det;
                out[(k + 1, j)] = (-r * b0 + p * b1) / det;
            }
        }
        return Ok(out);
    }
    crate::dense::solve(a, b).ok_or(Error::SingularMode { mode: 0 })
}

/// Zero-phase reconstruction of the sampled cutting force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hold {
    /// Impulse invariance: the force acts as `f_k Δθ δ(θ - kΔθ)`.
    Imp,
    /// Zero-order hold centred on each sample, over `[(k-½)Δθ, (k+½)Δθ)`.
    Zoh,
}

impl std::fmt::Display for Hold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Hold::Imp => "imp",
            Hold::Zoh => "zoh",
        })
    }
}

impl std::str::FromStr for Hold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "imp" => Ok(Hold::Imp),
            "zoh" => Ok(Hold::Zoh),
            other => Err(Error::domain("hold", format!("expected imp or zoh, got {other:?}"))),
        }
    }
}

/// Exact discrete-angle structural model
/// `p_{k+1} = A_d p_k + B_d f_k`, `Δz_k = C_d p_k + D_d f_k`, with `p_k = q_k - E_d f_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub step_angle: f64,
    pub hold: Hold,
}

impl DiscreteModel {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn io_dim(&self) -> usize {
        self.c.nrows()
    }

    /// One sample: returns `(p_{k+1}, Δz_k)`.
    pub fn step(&self, p: &DVector<f64>, f: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (&self.a * p + &self.b * f, &self.c * p + &self.d * f)
    }
}

pub fn discretize(model: &StateSpaceModel, step_angle: f64, hold: Hold) -> Result<DiscreteModel> {
    if !matches!(model.domain, Domain::Angle { .. }) {
        return Err(Error::domain("domain", "discretize expects an angle-domain model"));
    }
    if !(step_angle.is_finite() && step_angle > 0.0) {
        return Err(Error::domain("step_angle", format!("must be > 0, got {step_angle}")));
    }
    let n = model.state_dim();
    let r = model.c.nrows();
    let ad = matrix_exponential(&(&model.a * step_angle))?;
    let (bd, d, e) = match hold {
        Hold::Imp => (
            &ad * &model.b * step_angle,
            DMatrix::zeros(r, r),
            DMatrix::zeros(n, r),
        ),
        Hold::Zoh => {
            let half = matrix_exponential(&(&model.a * (0.5 * step_angle)))?;
            let eye = DMatrix::identity(n, n);
            let ainv_b = modal_solve(&model.a, &model.b)?;
            let e = (&half - &eye) * &ainv_b;
            let bd = &half * ((&ad - &eye) * &ainv_b);
            let d = &model.c * &e;
            (bd, d, e)
        }
    };
    Ok(DiscreteModel {
        a: ad,
        b: bd,
        c: model.c.clone(),
        d,
        e,
        step_angle,
        hold,
    })
}
