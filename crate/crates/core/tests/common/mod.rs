#![allow(dead_code)]

pub mod props;

use chatter_core::cutting_force::{CuttingCoefficients, MillingDirection, ToolGeometry};
use chatter_core::nalgebra::{DMatrix, DVector};
use chatter_core::scenario::FlexibleAxes;
use chatter_core::structural::{discretize, to_angle_domain, realize_axes, DiscreteModel, Hold, ModalAxis, Mode};
use chatter_core::MillingScenario;
use rand::Rng;

/// Benchmark modes plus a stiff third mode on each axis for the n = 3 cases.
pub fn scenario_with(r: usize, n: usize) -> MillingScenario {
    let mut s = MillingScenario::benchmark();
    let x3 = Mode::from_hz(720.0, 0.05, 20e6).unwrap();
    let y3 = Mode::from_hz(690.0, 0.06, 25e6).unwrap();
    let mut xm = s.x_axis.modes.clone();
    xm.push(x3);
    let mut ym = s.y_axis.modes.clone();
    ym.push(y3);
    s.x_axis = ModalAxis::new(xm).unwrap().truncated(n).unwrap();
    s.y_axis = ModalAxis::new(ym).unwrap().truncated(n).unwrap();
    s.flexible = if r == 1 { FlexibleAxes::Y } else { FlexibleAxes::Both };
    s
}

pub fn random_modal_axis<R: Rng>(rng: &mut R, n: usize) -> ModalAxis {
    ModalAxis::new(
        (0..n)
            .map(|_| {
                Mode::from_hz(
                    rng.gen_range(100.0..1500.0),
                    rng.gen_range(0.01..0.3),
                    rng.gen_range(1e6..1e8),
                )
                .unwrap()
            })
            .collect(),
    )
    .unwrap()
}

/// Discretized random modal structure with `r` axes and `n` modes each.
pub fn random_discrete<R: Rng>(rng: &mut R, r: usize, n: usize, m: usize, hold: Hold) -> DiscreteModel {
    let axes: Vec<ModalAxis> = (0..r).map(|_| random_modal_axis(rng, n)).collect();
    let model = realize_axes(&axes).unwrap();
    let rpm = rng.gen_range(2000.0..25000.0);
    let teeth = rng.gen_range(1..=6);
    let angle = to_angle_domain(&model, rpm).unwrap();
    let step = std::f64::consts::TAU / teeth as f64 / m as f64;
    discretize(&angle, step, hold).unwrap()
}

/// Dense random discrete model with `ρ(A) < 1`, not tied to any realization.
pub fn random_dense_discrete<R: Rng>(rng: &mut R, nx: usize, r: usize, hold: Hold) -> DiscreteModel {
    let mut a: DMatrix<f64> = DMatrix::from_fn(nx, nx, |_, _| rng.gen_range(-1.0..1.0));
    // scale by a bound on the spectral radius (the induced 1-norm)
    let norm1 = (0..nx)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    a *= rng.gen_range(0.3..0.95) / norm1.max(1e-12);
    let b = DMatrix::from_fn(nx, r, |_, _| rng.gen_range(-1.0..1.0));
    let c = DMatrix::from_fn(r, nx, |_, _| rng.gen_range(-1.0..1.0));
    let d = match hold {
        Hold::Imp => DMatrix::zeros(r, r),
        Hold::Zoh => DMatrix::from_fn(r, r, |_, _| rng.gen_range(-0.2..0.2)),
    };
    DiscreteModel {
        a,
        b,
        c,
        d,
        e: DMatrix::zeros(nx, r),
        step_angle: 0.01,
        hold,
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-scale..scale))
}

pub fn random_matrix<R: Rng>(rng: &mut R, r: usize, c: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-scale..scale))
}

pub fn coefficients() -> CuttingCoefficients {
    CuttingCoefficients::new(838.7e6, 384.6e6, 19.59e3, 21.18e3).unwrap()
}

pub fn tool(teeth: usize, direction: MillingDirection) -> ToolGeometry {
    ToolGeometry::new(teeth, 25e-3, direction).unwrap()
}

/// `|a - b|_max / max(|b|_max, floor)`.
pub fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>, floor: f64) -> f64 {
    (a - b).amax() / b.amax().max(floor)
}

pub fn rel_diff_vec(a: &DVector<f64>, b: &DVector<f64>, floor: f64) -> f64 {
    (a - b).amax() / b.amax().max(floor)
}

/// Taylor series with scaling and squaring; independent of the crate's exponential.
pub fn expm_taylor(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.amax() * n as f64;
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let x = m / 2f64.powi(s);
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &x / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}
