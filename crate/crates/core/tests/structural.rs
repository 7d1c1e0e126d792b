mod common;

use chatter_core::nalgebra::DMatrix;
use chatter_core::structural::{discretize, matrix_exponential, Hold};
use chatter_core::MillingScenario;
use common::{expm_taylor, random_matrix, rel_diff};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_stable_8x8_exponential_matches_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        // shift left of the Gershgorin discs so every eigenvalue has negative real part
        let mut m = random_matrix(&mut rng, 8, 8, 0.5);
        let shift = (0..8).map(|i| m.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        for i in 0..8 {
            m[(i, i)] -= shift;
        }
        let err = rel_diff(&matrix_exponential(&m).unwrap(), &expm_taylor(&m), 1e-300);
        assert!(err < 1e-12, "{err:e}");
    }
}

/// Composite Simpson of `∫_0^L e^{A s} B ds` with series exponentials.
fn convolution(a: &DMatrix<f64>, b: &DMatrix<f64>, len: f64, panels: usize) -> DMatrix<f64> {
    let h = len / panels as f64;
    let mut acc = DMatrix::zeros(b.nrows(), b.ncols());
    for i in 0..=panels {
        let w = if i == 0 || i == panels { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += expm_taylor(&(a * (h * i as f64))) * b * (w * h / 3.0);
    }
    acc
}

#[test]
fn zoh_matrices_match_convolution_quadrature() {
    for (rpm, m) in [(12500.0, 20), (4000.0, 50), (23000.0, 7)] {
        let s = MillingScenario::benchmark().with_speed(rpm).unwrap();
        let model = s.angle_structure().unwrap();
        let step = s.delay() / m as f64;
        let dm = discretize(&model, step, Hold::Zoh).unwrap();

        // force f_k acts on [(k-1/2)Δθ, (k+1/2)Δθ): the half intervals either side of a sample
        let half = expm_taylor(&(&model.a * (0.5 * step)));
        let e = convolution(&model.a, &model.b, 0.5 * step, 400);
        let ad = expm_taylor(&(&model.a * step));
        let bd = &ad * &e + &half * &e;

        assert!(rel_diff(&dm.a, &ad, 1e-300) < 1e-10);
        assert!(rel_diff(&dm.e, &e, 1e-300) < 1e-10, "E {:e}", rel_diff(&dm.e, &e, 1e-300));
        assert!(rel_diff(&dm.b, &bd, 1e-300) < 1e-10, "B_d {:e}", rel_diff(&dm.b, &bd, 1e-300));
        assert!(rel_diff(&dm.d, &(&model.c * &e), 1e-300) < 1e-10);
    }
}

#[test]
fn imp_input_map_is_propagated_impulse() {
    let s = MillingScenario::benchmark();
    let model = s.angle_structure().unwrap();
    let step = s.delay() / 30.0;
    let dm = discretize(&model, step, Hold::Imp).unwrap();
    let expected = expm_taylor(&(&model.a * step)) * &model.b * step;
    let err = rel_diff(&dm.b, &expected, 1e-300);
    assert!(err < 1e-10, "{err:e}");
    assert_eq!(dm.d.amax(), 0.0);
}
