//! Lifting over one tooth period and the minimal closed-loop state equation.
//!
//! Slot `k` of a lifted vector holds the sample `mK + k`, `k = 0..m-1`.

use nalgebra::{DMatrix, DVector};

use crate::cutting_force::PeriodicCoefficients;
use crate::dense::{self, Lu};
use crate::error::{Error, Result};
use crate::structural::DiscreteModel;

/// `p̄_{K+1} = A_L p̄_K + B_L f̄_K`, `Δz̄_K = C_L p̄_K + D_L f̄_K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedModel {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub steps: usize,
    /// Force/displacement dimension `r` of a single sample.
    pub io_dim: usize,
}

impl LiftedModel {
    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn lifted_dim(&self) -> usize {
        self.io_dim * self.steps
    }
}

pub fn lift_structure(model: &DiscreteModel, steps: usize) -> Result<LiftedModel> {
    if steps == 0 {
        return Err(Error::domain("steps", "must be at least 1"));
    }
    let n = model.state_dim();
    let r = model.io_dim();
    let nm = r * steps;

    // powers[k] = A_d^k, k = 0..=m
    let mut powers = Vec::with_capacity(steps + 1);
    powers.push(DMatrix::identity(n, n));
    for k in 0..steps {
        let next = &model.a * &powers[k];
        powers.push(next);
    }

    let mut b = DMatrix::zeros(n, nm);
    let mut c = DMatrix::zeros(nm, n);
    for k in 0..steps {
        b.view_mut((0, r * k), (n, r))
            .copy_from(&(&powers[steps - 1 - k] * &model.b));
        c.view_mut((r * k, 0), (r, n))
            .copy_from(&(&model.c * &powers[k]));
    }

    // Markov parameters C_d A_d^j B_d fill the strictly lower Toeplitz part.
    let markov: Vec<DMatrix<f64>> = (0..steps.saturating_sub(1))
        .map(|j| c.view((r * j, 0), (r, n)) * &model.b)
        .collect();
    let mut d = DMatrix::zeros(nm, nm);
    for i in 0..steps {
        d.view_mut((r * i, r * i), (r, r)).copy_from(&model.d);
        for j in 0..i {
            d.view_mut((r * i, r * j), (r, r))
                .copy_from(&markov[i - j - 1]);
        }
    }

    Ok(LiftedModel {
        a: powers.pop().expect("A_d^m"),
        b,
        c,
        d,
        steps,
        io_dim: r,
    })
}

/// Stacked force law `f̄_K = a_p [r̄ - S̄ (s̄_t + Δz̄_K - Δz̄_{K-1})]`, with `S̄` block diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedForce {
    pub r_bar: DVector<f64>,
    pub s_blocks: Vec<DMatrix<f64>>,
    pub feed_bar: DVector<f64>,
    pub io_dim: usize,
}

impl LiftedForce {
    pub fn steps(&self) -> usize {
        self.s_blocks.len()
    }

    pub fn lifted_dim(&self) -> usize {
        self.io_dim * self.steps()
    }

    /// `S̄` as a dense block-diagonal matrix.
    pub fn s_dense(&self) -> DMatrix<f64> {
        let r = self.io_dim;
        let mut s = DMatrix::zeros(self.lifted_dim(), self.lifted_dim());
        for (k, blk) in self.s_blocks.iter().enumerate() {
            s.view_mut((r * k, r * k), (r, r)).copy_from(blk);
        }
        s
    }

    /// `S̄ x` for a stacked vector or matrix `x`.
    pub fn apply_s(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let r = self.io_dim;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (k, blk) in self.s_blocks.iter().enumerate() {
            let rows = x.rows(r * k, r);
            out.rows_mut(r * k, r).copy_from(&(blk * rows));
        }
        out
    }

    /// Feed-forward excitation `r̄ - S̄ s̄_t`.
    pub fn excitation(&self) -> DVector<f64> {
        let s_feed = self.apply_s(&DMatrix::from_column_slice(
            self.feed_bar.len(),
            1,
            self.feed_bar.as_slice(),
        ));
        &self.r_bar - s_feed.column(0)
    }

    pub fn force(
        &self,
        axial_depth: f64,
        dz_now: &DVector<f64>,
        dz_prev: &DVector<f64>,
    ) -> DVector<f64> {
        let v = &self.feed_bar + dz_now - dz_prev;
        let sv = self.apply_s(&DMatrix::from_column_slice(v.len(), 1, v.as_slice()));
        (&self.r_bar - sv.column(0)) * axial_depth
    }
}

pub fn lift_force(coeffs: &PeriodicCoefficients, feed: &DVector<f64>) -> Result<LiftedForce> {
    let r = coeffs.dim();
    if feed.len() != r {
        return Err(Error::Dimension(format!(
            "feed has {} entries for {r}-axis coefficients",
            feed.len()
        )));
    }
    let m = coeffs.steps;
    let mut r_bar = DVector::zeros(r * m);
    let mut feed_bar = DVector::zeros(r * m);
    for k in 0..m {
        r_bar.rows_mut(r * k, r).copy_from(&coeffs.edge_terms[k]);
        feed_bar.rows_mut(r * k, r).copy_from(feed);
    }
    Ok(LiftedForce {
        r_bar,
        s_blocks: coeffs.directional_terms.clone(),
        feed_bar,
        io_dim: r,
    })
}

/// `ξ̄_{K+1} = Φ̄ ξ̄_K + σ̄` with `ξ̄_K = [p̄_K; Δz̄_{K-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopSystem {
    pub phi: DMatrix<f64>,
    pub sigma: DVector<f64>,
    pub state_dim: usize,
    pub lifted_dim: usize,
}

impl ClosedLoopSystem {
    pub fn dim(&self) -> usize {
        self.phi.nrows()
    }

    /// Fixed point `(I - Φ̄)^-1 σ̄`.
    pub fn fixed_point(&self) -> Result<DVector<f64>> {
        let n = self.dim();
        let lhs = DMatrix::identity(n, n) - &self.phi;
        let rhs = DMatrix::from_column_slice(n, 1, self.sigma.as_slice());
        dense::solve(&lhs, &rhs)
            .map(|x| x.column(0).into_owned())
            .ok_or(Error::NoSteadyState("I - Phi is singular (marginal stability)"))
    }
}

/// Builds `Φ̄` and `σ̄` of the lifted feedback loop.
///
/// With `M = I + a_p S̄ D̄_L` and the push-through identity
/// `(I + a_p D̄_L S̄)^-1 = I - a_p D̄_L M^-1 S̄`, every inverse reduces to one LU of `M`:
///
/// ```text
/// Φ̄ = [ A_L - a B_L Y    a B_L X ]      X = M^-1 S̄,  Y = X C_L,  v = M^-1 (r̄ - S̄ s̄)
///     [ C_L - a D_L Y    a D_L X ]
/// σ̄ = [ a B_L v ; a D_L v ]
/// ```
pub fn assemble_closed_loop(
    lm: &LiftedModel,
    lf: &LiftedForce,
    axial_depth: f64,
) -> Result<ClosedLoopSystem> {
    if lm.lifted_dim() != lf.lifted_dim() || lm.io_dim != lf.io_dim {
        return Err(Error::Dimension(format!(
            "lifted structure is {}-dimensional, lifted force {}-dimensional",
            lm.lifted_dim(),
            lf.lifted_dim()
        )));
    }
    if !(axial_depth.is_finite() && axial_depth >= 0.0) {
        return Err(Error::domain("axial_depth", format!("must be >= 0, got {axial_depth}")));
    }
    let n = lm.state_dim();
    let nm = lm.lifted_dim();
    let dim = n + nm;
    let mut phi = DMatrix::zeros(dim, dim);
    let mut sigma = DVector::zeros(dim);

    if axial_depth == 0.0 {
        phi.view_mut((0, 0), (n, n)).copy_from(&lm.a);
        phi.view_mut((n, 0), (nm, n)).copy_from(&lm.c);
        return Ok(ClosedLoopSystem {
            phi,
            sigma,
            state_dim: n,
            lifted_dim: nm,
        });
    }

    let a = axial_depth;
    let mut feedback = lf.apply_s(&lm.d) * a;
    for i in 0..nm {
        feedback[(i, i)] += 1.0;
    }
    let lu = Lu::new(&feedback)?;
    if lu.is_singular() {
        return Err(Error::IllConditioned {
            axial_depth,
            rcond: lu.rcond(),
        });
    }

    // rhs = [S̄ C_L | S̄ | r̄ - S̄ s̄]
    let mut rhs = DMatrix::zeros(nm, n + nm + 1);
    rhs.view_mut((0, 0), (nm, n)).copy_from(&lf.apply_s(&lm.c));
    let r = lf.io_dim;
    for (k, blk) in lf.s_blocks.iter().enumerate() {
        rhs.view_mut((r * k, n + r * k), (r, r)).copy_from(blk);
    }
    rhs.column_mut(n + nm).copy_from(&lf.excitation());
    let sol = lu.solve(&rhs);

    let bl_sol = dense::matmul(&lm.b, &sol) * a;
    let dl_sol = dense::matmul(&lm.d, &sol) * a;

    phi.view_mut((0, 0), (n, n))
        .copy_from(&(&lm.a - bl_sol.columns(0, n)));
    phi.view_mut((0, n), (n, nm))
        .copy_from(&bl_sol.columns(n, nm));
    phi.view_mut((n, 0), (nm, n))
        .copy_from(&(&lm.c - dl_sol.columns(0, n)));
    phi.view_mut((n, n), (nm, nm))
        .copy_from(&dl_sol.columns(n, nm));
    sigma.rows_mut(0, n).copy_from(&bl_sol.column(n + nm));
    sigma.rows_mut(n, nm).copy_from(&dl_sol.column(n + nm));

    Ok(ClosedLoopSystem {
        phi,
        sigma,
        state_dim: n,
        lifted_dim: nm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structural::Hold;

    fn toy_discrete(hold: Hold) -> DiscreteModel {
        let a = DMatrix::from_row_slice(2, 2, &[0.9, 0.1, -0.2, 0.8]);
        let b = DMatrix::from_row_slice(2, 1, &[0.0, 0.5]);
        let c = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let d = match hold {
            Hold::Imp => DMatrix::zeros(1, 1),
            Hold::Zoh => DMatrix::from_element(1, 1, 0.05),
        };
        DiscreteModel {
            a,
            b,
            c,
            d,
            e: DMatrix::zeros(2, 1),
            step_angle: 0.1,
            hold,
        }
    }

    #[test]
    fn single_step_lift_is_identity_map() {
        let dm = toy_discrete(Hold::Zoh);
        let lm = lift_structure(&dm, 1).unwrap();
        assert_eq!(lm.a, dm.a);
        assert_eq!(lm.b, dm.b);
        assert_eq!(lm.c, dm.c);
        assert_eq!(lm.d, dm.d);
    }

    #[test]
    fn two_step_lift_blocks() {
        let dm = toy_discrete(Hold::Zoh);
        let lm = lift_structure(&dm, 2).unwrap();
        assert_eq!(lm.a, &dm.a * &dm.a);
        assert_eq!(lm.b.columns(0, 1), &dm.a * &dm.b);
        assert_eq!(lm.b.columns(1, 1), dm.b);
        assert_eq!(lm.d[(0, 0)], dm.d[(0, 0)]);
        assert_eq!(lm.d[(0, 1)], 0.0);
        assert_eq!(lm.d[(1, 0)], (&dm.c * &dm.b)[(0, 0)]);
        assert_eq!(lm.d[(1, 1)], dm.d[(0, 0)]);
    }

    #[test]
    fn imp_lift_is_strictly_lower() {
        let lm = lift_structure(&toy_discrete(Hold::Imp), 5).unwrap();
        for i in 0..5 {
            for j in i..5 {
                assert_eq!(lm.d[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn zero_depth_closed_loop() {
        let lm = lift_structure(&toy_discrete(Hold::Zoh), 4).unwrap();
        let coeffs = PeriodicCoefficients {
            steps: 4,
            step_angle: 0.1,
            edge_terms: vec![DVector::from_element(1, 1.0); 4],
            directional_terms: vec![DMatrix::from_element(1, 1, 2.0); 4],
        };
        let lf = lift_force(&coeffs, &DVector::from_element(1, 0.1)).unwrap();
        let cl = assemble_closed_loop(&lm, &lf, 0.0).unwrap();
        assert_eq!(cl.dim(), 2 + 4);
        assert_eq!(cl.phi.view((0, 0), (2, 2)), lm.a);
        assert_eq!(cl.phi.view((2, 0), (4, 2)), lm.c);
        assert!(cl.phi.columns(2, 4).iter().all(|&v| v == 0.0));
        assert!(cl.sigma.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lift_force_stacks() {
        let coeffs = PeriodicCoefficients {
            steps: 1,
            step_angle: 1.0,
            edge_terms: vec![DVector::from_vec(vec![1.0, 2.0])],
            directional_terms: vec![DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])],
        };
        let lf = lift_force(&coeffs, &DVector::from_vec(vec![0.5, 0.0])).unwrap();
        assert_eq!(lf.r_bar, coeffs.edge_terms[0]);
        assert_eq!(lf.s_dense(), coeffs.directional_terms[0]);
        assert!(lift_force(&coeffs, &DVector::from_vec(vec![0.5])).is_err());
    }

    #[test]
    fn singular_feedback_is_reported() {
        // ZOH with D_d = -1 and S = 1: I + a S D_L = 0 at a = 1.
        let mut dm = toy_discrete(Hold::Zoh);
        dm.d = DMatrix::from_element(1, 1, -1.0);
        let lm = lift_structure(&dm, 1).unwrap();
        let coeffs = PeriodicCoefficients {
            steps: 1,
            step_angle: 0.1,
            edge_terms: vec![DVector::from_element(1, 0.0)],
            directional_terms: vec![DMatrix::from_element(1, 1, 1.0)],
        };
        let lf = lift_force(&coeffs, &DVector::from_element(1, 0.0)).unwrap();
        match assemble_closed_loop(&lm, &lf, 1.0) {
            Err(Error::IllConditioned { axial_depth, .. }) => assert_eq!(axial_depth, 1.0),
            other => panic!("expected conditioning error, got {other:?}"),
        }
    }
}
