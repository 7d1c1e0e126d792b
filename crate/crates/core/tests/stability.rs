mod common;

use chatter_core::nalgebra::DMatrix;
use chatter_core::stability::{
    classify, convergence_curve, linspace, sld_grid, spectral_radius, stability_boundary, verdict, Classification,
};
use chatter_core::structural::Hold;
use chatter_core::{Discretization, MillingScenario};

#[test]
fn companion_matrix_radius_is_golden_ratio() {
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
    let (rho, mu) = spectral_radius(&m).unwrap();
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((rho - phi).abs() < 1e-14);
    assert!((mu.re - phi).abs() < 1e-14 && mu.im == 0.0);
}

#[cfg(feature = "parallel")]
#[test]
fn grid_is_identical_across_thread_counts() {
    let s = MillingScenario::benchmark();
    let speeds = linspace(5000.0, 20000.0, 7);
    let depths = linspace(0.0, 4e-3, 9);
    let disc = Discretization::imp(30);
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| sld_grid(&s, &speeds, &depths, disc, 1e-6).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap()
        .install(|| sld_grid(&s, &speeds, &depths, disc, 1e-6).unwrap());
    assert_eq!(serial.stable, parallel.stable);
    for (a, b) in serial.radius.iter().zip(parallel.radius.iter()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn radius_grows_from_zero_depth_to_first_unstable_cell() {
    let s = MillingScenario::benchmark();
    let speeds = linspace(3000.0, 23000.0, 9);
    let depths = linspace(0.0, 10e-3, 41);
    let grid = sld_grid(&s, &speeds, &depths, Discretization::imp(40), 0.0).unwrap();
    for i in 0..speeds.len() {
        let first_unstable = (0..depths.len()).find(|&j| !grid.stable[(i, j)]).expect("lobe within 10 mm");
        assert!(
            grid.radius[(i, 0)] < grid.radius[(i, first_unstable)],
            "speed {}: {} vs {}",
            speeds[i],
            grid.radius[(i, 0)],
            grid.radius[(i, first_unstable)]
        );
        assert!(grid.radius[(i, 0)] < 1.0);
    }
}

#[test]
fn labels_follow_classification_of_radius() {
    let s = MillingScenario::benchmark();
    let speeds = linspace(6000.0, 18000.0, 5);
    let depths = linspace(0.5e-3, 6e-3, 6);
    let margin = 1e-3;
    let grid = sld_grid(&s, &speeds, &depths, Discretization::zoh(30), margin).unwrap();
    for i in 0..speeds.len() {
        for j in 0..depths.len() {
            let expected = classify(grid.radius[(i, j)], margin) == Classification::Stable;
            assert_eq!(grid.stable[(i, j)], expected);
        }
    }
    let cell = s.with_speed(speeds[2]).unwrap().with_axial_depth(depths[3]).unwrap();
    let v = verdict(&cell.closed_loop(Discretization::zoh(30)).unwrap(), margin).unwrap();
    assert_eq!(v.spectral_radius.to_bits(), grid.radius[(2, 3)].to_bits());
}

#[test]
fn early_terminating_scan_matches_grid_boundary() {
    let s = MillingScenario::benchmark().with_immersion(0.1).unwrap();
    let speeds = linspace(3000.0, 23000.0, 11);
    let depths = linspace(0.0, 10e-3, 51);
    let disc = Discretization::imp(40);
    let from_grid = sld_grid(&s, &speeds, &depths, disc, 0.0).unwrap().boundary();
    let scanned = stability_boundary(&s, &speeds, &depths, disc).unwrap();
    assert_eq!(from_grid, scanned);
}

#[test]
fn self_reference_has_zero_error() {
    let s = MillingScenario::benchmark().with_immersion(1.0).unwrap().with_speed(4000.0).unwrap();
    let s = s.with_axial_depth(0.9e-3).unwrap();
    let curve = convergence_curve(&s, &[20, 60], Hold::Imp, 60).unwrap();
    assert_eq!(curve[1].relative_error, 0.0);
    assert!(curve[0].relative_error > 0.0);
    let zoh = convergence_curve(&s, &[20, 40, 60], Hold::Zoh, 60).unwrap();
    assert!(zoh[0].relative_error > zoh[2].relative_error);
}
