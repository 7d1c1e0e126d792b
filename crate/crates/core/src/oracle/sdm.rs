//! Classical first-order semi-discretization over one tooth period.
//!
//! On `[t_i, t_i + h]`, `h = Θ/m`, the periodic coefficients are replaced by
//! their interval means and the delayed output by the straight line through
//! `Δz_{i-m}` and `Δz_{i-m+1}`. The augmented state is ordered newest first,
//! `y_i = [x_i; x_{i-1}; …; x_{i-m}]`, with `x` the full structural state.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::restricted_terms;
use crate::cutting_force::SUBSAMPLES_PER_INTERVAL;
use crate::dense;
use crate::error::{Error, Result};
use crate::scenario::MillingScenario;
use crate::structural::matrix_exponential;

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalMonodromy {
    /// Transition over one period, dimension `2nr (m + 1)`.
    pub phi: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub steps: usize,
    /// Structural state dimension `2nr`.
    pub state_dim: usize,
    pub c: DMatrix<f64>,
}

impl ClassicalMonodromy {
    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }
}

/// Per-interval maps `(P, F0 - F1, F1, F0)` from the exponential of
/// `[[A_i, I, 0], [0, 0, I], [0, 0, 0]] h`, whose first block row is
/// `[e^{A_i h}, ∫e^{A_i s}ds, ∫e^{A_i s}(h - s)ds]`.
fn interval_maps(a_i: &DMatrix<f64>, h: f64) -> Result<[DMatrix<f64>; 3]> {
    let n = a_i.nrows();
    let mut k = DMatrix::zeros(3 * n, 3 * n);
    k.view_mut((0, 0), (n, n)).copy_from(&(a_i * h));
    for i in 0..n {
        k[(i, n + i)] = h;
        k[(n + i, 2 * n + i)] = h;
    }
    // k's off-diagonal identities are scaled by h so that blocks come out as
    // ∫ e^{A s} ds and ∫ e^{A s}(h - s) ds directly.
    let e = matrix_exponential(&k)?;
    let p = e.view((0, 0), (n, n)).into_owned();
    let f0 = e.view((0, n), (n, n)).into_owned();
    let f1 = e.view((0, 2 * n), (n, n)).into_owned() / h;
    Ok([p, f0, f1])
}

pub fn classical_sdm(scenario: &MillingScenario, steps: usize) -> Result<ClassicalMonodromy> {
    if steps == 0 {
        return Err(Error::domain("steps", "must be at least 1"));
    }
    let model = scenario.angle_structure()?;
    let force = scenario.force_model()?;
    let a_p = scenario.conditions.axial_depth;
    let feed = scenario.conditions.feed;
    let n = model.state_dim();
    let m = steps;
    let dim = n * (m + 1);
    let h = scenario.delay() / m as f64;

    // Block rows of the accumulated transition, newest state first.
    let mut rows: VecDeque<DMatrix<f64>> = (0..=m)
        .map(|b| {
            let mut blk = DMatrix::zeros(n, dim);
            blk.view_mut((0, n * b), (n, n)).fill_with_identity();
            blk
        })
        .collect();
    let mut forced: VecDeque<DVector<f64>> = (0..=m).map(|_| DVector::zeros(n)).collect();

    for i in 0..m {
        let (r_avg, s_avg) = force.average_over(
            i as f64 * h,
            (i + 1) as f64 * h,
            SUBSAMPLES_PER_INTERVAL,
        );
        let (u, s) = restricted_terms(&r_avg, &s_avg, scenario.flexible, &feed);
        let g = &model.b * (s * a_p) * &model.c;
        let w = &model.b * (u * a_p);
        let [p, f0, f1] = interval_maps(&(&model.a - &g), h)?;
        let g_old = (&f0 - &f1) * &g;
        let g_new = &f1 * &g;

        // x_{i+1} = P x_i + (F0 - F1) G x_{i-m} + F1 G x_{i-m+1} + F0 w
        let next = dense::matmul(&p, &rows[0])
            + dense::matmul(&g_new, &rows[m - 1])
            + dense::matmul(&g_old, &rows[m]);
        let next_forced = &p * &forced[0] + &g_new * &forced[m - 1] + &g_old * &forced[m] + &f0 * w;
        rows.pop_back();
        rows.push_front(next);
        forced.pop_back();
        forced.push_front(next_forced);
    }

    let mut phi = DMatrix::zeros(dim, dim);
    let mut sigma = DVector::zeros(dim);
    for b in 0..=m {
        phi.rows_mut(n * b, n).copy_from(&rows[b]);
        sigma.rows_mut(n * b, n).copy_from(&forced[b]);
    }
    Ok(ClassicalMonodromy {
        phi,
        sigma,
        steps: m,
        state_dim: n,
        c: model.c.clone(),
    })
}

/// Periodic output samples `Δz_k = C x_k`, `k = 0..m-1`, of the fixed point
/// `(I - Φ_a)^-1 σ_a`. Block `b` of the fixed point holds `x_{m-b}`.
pub fn classical_steady_state(cm: &ClassicalMonodromy) -> Result<Vec<DVector<f64>>> {
    let dim = cm.dim();
    let n = cm.state_dim;
    let lhs = DMatrix::identity(dim, dim) - &cm.phi;
    let y = dense::solve(&lhs, &DMatrix::from_column_slice(dim, 1, cm.sigma.as_slice()))
        .ok_or(Error::NoSteadyState("I - Phi_a is singular (marginal stability)"))?;
    Ok((0..cm.steps)
        .map(|k| {
            let b = cm.steps - k;
            &cm.c * y.view((n * b, 0), (n, 1))
        })
        .map(|v| v.column(0).into_owned())
        .collect())
}
