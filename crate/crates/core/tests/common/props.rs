//! Invariant checks shared by the property suite and the acceptance runner.

use std::f64::consts::{PI, TAU};

use chatter_core::cutting_force::{
    directional_coefficients, immersion_window, rotation_matrix, MillingDirection,
};
use chatter_core::lifted::{assemble_closed_loop, lift_force, lift_structure};
use chatter_core::cutting_force::PeriodicCoefficients;
use chatter_core::nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use chatter_core::structural::{matrix_exponential, Hold};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{coefficients, expm_taylor, random_dense_discrete, random_matrix, random_vector, rel_diff};

pub const CASES: u32 = 256;

fn direction() -> impl Strategy<Value = MillingDirection> {
    prop_oneof![Just(MillingDirection::Up), Just(MillingDirection::Down)]
}

pub fn rotation_strategy() -> impl Strategy<Value = f64> {
    -100.0..100.0f64
}

pub fn rotation_is_orthogonal(phi: f64) -> Result<(), TestCaseError> {
    let r = rotation_matrix(phi);
    let err = (r.transpose() * r - Matrix2::identity()).amax();
    prop_assert!(err < 1e-14, "R^T R - I = {err:e} at {phi}");
    prop_assert!((r.determinant() - 1.0).abs() < 1e-14);
    Ok(())
}

/// `(θ, teeth, a_r/D, direction)`.
pub fn periodicity_strategy() -> impl Strategy<Value = (f64, usize, f64, MillingDirection)> {
    (-20.0..20.0f64, 1usize..=8, 0.0..=1.0f64, direction())
}

/// Distance of any tooth angle from the window edges; at an edge the gate is
/// decided by rounding and periodicity only holds up to that rounding.
fn edge_clearance(theta: f64, teeth: usize, ratio: f64, dir: MillingDirection) -> f64 {
    let w = immersion_window(dir, ratio * 25e-3, 25e-3).unwrap();
    (0..teeth)
        .map(|j| (theta + TAU * j as f64 / teeth as f64).rem_euclid(TAU))
        .flat_map(|phi| {
            [w.start_angle, w.exit_angle, w.start_angle + TAU, w.exit_angle - TAU]
                .map(|e| (phi - e).abs())
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn coefficients_are_periodic(
    (theta, teeth, ratio, dir): (f64, usize, f64, MillingDirection),
) -> Result<(), TestCaseError> {
    prop_assume!(edge_clearance(theta, teeth, ratio, dir) > 1e-9);
    let k = coefficients();
    let w = immersion_window(dir, ratio * 25e-3, 25e-3).unwrap();
    let pitch = TAU / teeth as f64;
    let (r0, s0) = directional_coefficients(theta, &k, &w, teeth);
    let (r1, s1) = directional_coefficients(theta + pitch, &k, &w, teeth);
    prop_assert!((r0 - r1).amax() <= 1e-9 * k.normal_edge, "r: {r0} vs {r1}");
    prop_assert!((s0 - s1).amax() <= 1e-9 * k.tangential_cutting, "S: {s0} vs {s1}");
    Ok(())
}

/// `(θ, teeth, a_r/D, direction, a_p, feed, vib, vib_delayed)`.
pub type ForceCase = (f64, usize, f64, MillingDirection, f64, [f64; 2], [f64; 2], [f64; 2]);

pub fn force_strategy() -> impl Strategy<Value = ForceCase> {
    let v = || prop::array::uniform2(-50e-6..50e-6f64);
    (
        -20.0..20.0f64,
        1usize..=8,
        0.0..=1.0f64,
        direction(),
        0.0..5e-3f64,
        prop::array::uniform2(-0.3e-3..0.3e-3f64),
        v(),
        v(),
    )
}

/// The directional form `a_p (r - S v)` against the force summed tooth by tooth
/// from the tangential/normal cutting law `F = a_p (k_c h + k_e)`.
pub fn directional_form_matches_per_tooth(case: ForceCase) -> Result<(), TestCaseError> {
    let (theta, teeth, ratio, dir, a_p, feed, vib, old) = case;
    prop_assume!(edge_clearance(theta, teeth, ratio, dir) > 1e-9);
    let k = coefficients();
    let w = immersion_window(dir, ratio * 25e-3, 25e-3).unwrap();
    let v = Vector2::new(feed[0] + vib[0] - old[0], feed[1] + vib[1] - old[1]);

    let mut brute = Vector2::zeros();
    for j in 0..teeth {
        let phi = (theta + TAU * j as f64 / teeth as f64).rem_euclid(TAU);
        if !(w.start_angle <= phi && phi <= w.exit_angle) {
            continue;
        }
        let (s, c) = phi.sin_cos();
        let h = s * v[0] + c * v[1];
        let ft = a_p * (k.tangential_cutting * h + k.tangential_edge);
        let fn_ = a_p * (k.normal_cutting * h + k.normal_edge);
        // tangential direction (-cos, sin), normal direction (-sin, -cos)
        brute += Vector2::new(-c * ft - s * fn_, s * ft - c * fn_);
    }
    let (r, sm) = directional_coefficients(theta, &k, &w, teeth);
    let f = (r - sm * v) * a_p;
    let scale = brute.amax().max(a_p * k.normal_edge).max(1e-12);
    prop_assert!((f - brute).amax() <= 1e-12 * scale, "{f} vs {brute}");
    Ok(())
}

/// `(seed, dim, scale, modal)`.
pub fn expm_strategy() -> impl Strategy<Value = (u64, usize, f64, bool)> {
    (any::<u64>(), 1usize..=5, 0.01..4.0f64, any::<bool>())
}

pub fn exponential_matches_taylor((seed, dim, scale, modal): (u64, usize, f64, bool)) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = if modal {
        // damped-oscillator blocks, the closed-form path
        let mut m = DMatrix::zeros(2 * dim, 2 * dim);
        for b in 0..dim {
            let w: f64 = rand::Rng::gen_range(&mut rng, 0.1..3.0) * scale;
            let z: f64 = rand::Rng::gen_range(&mut rng, 0.0..1.5);
            m[(2 * b, 2 * b + 1)] = 1.0;
            m[(2 * b + 1, 2 * b)] = -w * w;
            m[(2 * b + 1, 2 * b + 1)] = -2.0 * z * w;
        }
        m
    } else {
        random_matrix(&mut rng, dim + 1, dim + 1, scale)
    };
    let ours = matrix_exponential(&m).unwrap();
    let oracle = expm_taylor(&m);
    let err = rel_diff(&ours, &oracle, 1.0);
    prop_assert!(err < 1e-10, "expm relative error {err:e}");
    Ok(())
}

/// `(seed, r, m, hold, a_p)`.
pub fn push_through_strategy() -> impl Strategy<Value = (u64, usize, usize, bool, f64)> {
    (any::<u64>(), 1usize..=2, 1usize..=12, any::<bool>(), 0.0..3.0f64)
}

/// `B_L (I + a S̄ D_L)^-1 S̄ = B_L S̄ (I + a D_L S̄)^-1`, and the assembled
/// `Φ̄`, `σ̄` against the closed-loop formula written with the second placement and explicit inverses.
pub fn push_through_identity((seed, r, m, zoh, a): (u64, usize, usize, bool, f64)) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hold = if zoh { Hold::Zoh } else { Hold::Imp };
    let nx = 2 * r;
    let dm = random_dense_discrete(&mut rng, nx, r, hold);
    let lm = lift_structure(&dm, m).unwrap();
    let coeffs = PeriodicCoefficients {
        steps: m,
        step_angle: PI / m as f64,
        edge_terms: (0..m).map(|_| random_vector(&mut rng, r, 1.0)).collect(),
        directional_terms: (0..m).map(|_| random_matrix(&mut rng, r, r, 0.3)).collect(),
    };
    let feed = random_vector(&mut rng, r, 0.5);
    let lf = lift_force(&coeffs, &feed).unwrap();
    let sbar = lf.s_dense();
    let nm = r * m;
    let eye = DMatrix::<f64>::identity(nm, nm);

    let left_inv = match (&eye + &sbar * &lm.d * a).try_inverse() {
        Some(x) => x,
        None => return Err(TestCaseError::reject("singular feedback")),
    };
    let right_inv = match (&eye + &lm.d * &sbar * a).try_inverse() {
        Some(x) => x,
        None => return Err(TestCaseError::reject("singular feedback")),
    };
    // keep to well-conditioned draws; the identity is exact, rounding is not
    prop_assume!(left_inv.amax() < 1e4);
    let lhs = &lm.b * &left_inv * &sbar;
    let rhs = &lm.b * &sbar * &right_inv;
    prop_assert!(rel_diff(&lhs, &rhs, 1.0) < 1e-12, "push-through {:e}", rel_diff(&lhs, &rhs, 1.0));

    let g = &sbar * &right_inv; // (I + a S̄ D_L)^-1 S̄ via the second placement
    let u = &lf.r_bar - &sbar * &lf.feed_bar;
    let ginv_u = &left_inv * &u;
    let n = lm.state_dim();
    let mut phi = DMatrix::zeros(n + nm, n + nm);
    phi.view_mut((0, 0), (n, n)).copy_from(&(&lm.a - &lm.b * &g * &lm.c * a));
    phi.view_mut((0, n), (n, nm)).copy_from(&(&lm.b * &g * a));
    phi.view_mut((n, 0), (nm, n)).copy_from(&(&lm.c - &lm.d * &g * &lm.c * a));
    phi.view_mut((n, n), (nm, nm)).copy_from(&(&lm.d * &g * a));
    let mut sigma = DVector::zeros(n + nm);
    sigma.rows_mut(0, n).copy_from(&(&lm.b * &ginv_u * a));
    sigma.rows_mut(n, nm).copy_from(&(&lm.d * &ginv_u * a));

    let cl = assemble_closed_loop(&lm, &lf, a).unwrap();
    prop_assert!(rel_diff(&cl.phi, &phi, 1.0) < 1e-10, "Phi {:e}", rel_diff(&cl.phi, &phi, 1.0));
    let ds = (&cl.sigma - &sigma).amax() / sigma.amax().max(1.0);
    prop_assert!(ds < 1e-10, "sigma {ds:e}");
    Ok(())
}
