use std::path::Path;

use chatter_cli::chart::cell_mask;
use chatter_cli::commands::{CHART_FILE, CONVERGENCE_FILE, SLD_FILE, SLE_FILE, SLE_GRID_FILE};
use chatter_cli::output::{self, read_convergence, read_sld, read_sle, SLD_HEADER};
use chatter_cli::{parse_config, run, Command, Overrides, RunConfig, BENCHMARK};
use chatter_core::stability::{classify, sld_grid, Classification};
use chatter_core::{Discretization, Hold};

fn small(speeds: usize, depths: usize, steps: usize) -> RunConfig {
    let mut c = parse_config(BENCHMARK).unwrap();
    Overrides {
        hold: Some(Hold::Imp),
        steps: Some(steps),
        grid: Some((speeds, depths)),
        depth_range: Some((0.0, 6.0)),
        ..Default::default()
    }
    .apply(&mut c)
    .unwrap();
    c
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn sld_writes_every_cell_and_labels_match_radius() {
    let c = small(20, 20, 20);
    let dir = tempfile::tempdir().unwrap();
    let outcome = run(Command::Sld, &c, dir.path()).unwrap();
    assert_eq!(outcome.files, vec![dir.path().join(SLD_FILE)]);
    let text = read(dir.path(), SLD_FILE);
    assert_eq!(text.lines().next(), Some(SLD_HEADER));
    let rows = read_sld(&text).unwrap();
    assert_eq!(rows.len(), 400);
    let mut stable = 0;
    for r in &rows {
        assert!(r.spectral_radius.is_finite());
        let expect = classify(r.spectral_radius, c.margin) == Classification::Stable;
        assert_eq!(r.stable, expect, "{r:?}");
        stable += usize::from(r.stable);
    }
    assert!(stable > 0 && stable < 400);
    // speed-major
    assert!(rows[..20].iter().all(|r| r.omega_rpm == rows[0].omega_rpm));
    assert!(rows[0].ap_mm == 0.0 && rows[0].stable);
}

#[test]
fn sld_is_byte_identical_across_runs() {
    let c = small(12, 10, 16);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(Command::Sld, &c, a.path()).unwrap();
    run(Command::Sld, &c, b.path()).unwrap();
    assert_eq!(read(a.path(), SLD_FILE), read(b.path(), SLD_FILE));
}

#[test]
fn sld_round_trips_to_twelve_digits() {
    let c = small(9, 8, 16);
    let disc = Discretization::new(c.steps, c.hold).unwrap();
    let grid = sld_grid(&c.scenario, &c.speeds.values(), &c.depths.values(), disc, c.margin).unwrap();
    let mut buf = Vec::new();
    output::write_sld(&grid, &mut buf).unwrap();
    let back = output::grid_from_rows(&read_sld(std::str::from_utf8(&buf).unwrap()).unwrap()).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-11 * a.abs().max(b.abs()).max(1e-300);
    assert_eq!(back.shape(), grid.shape());
    assert_eq!(back.stable, grid.stable);
    for (x, y) in grid.speeds.iter().zip(&back.speeds) {
        assert!(close(*x, *y));
    }
    for (x, y) in grid.depths.iter().zip(&back.depths) {
        assert!(close(*x, *y) || (*x == 0.0 && *y == 0.0));
    }
    for (x, y) in grid.radius.iter().zip(back.radius.iter()) {
        assert!(close(*x, *y), "{x} vs {y}");
    }
}

#[test]
fn empty_grid_writes_header_only() {
    let c = small(3, 3, 8);
    let disc = Discretization::new(c.steps, c.hold).unwrap();
    let grid = sld_grid(&c.scenario, &[], &[], disc, c.margin).unwrap();
    let mut buf = Vec::new();
    output::write_sld(&grid, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{SLD_HEADER}\n"));
}

#[test]
fn converge_error_falls_monotonically() {
    let c = small(3, 3, 40);
    let dir = tempfile::tempdir().unwrap();
    run(Command::Converge, &c, dir.path()).unwrap();
    let records = read_convergence(&read(dir.path(), CONVERGENCE_FILE)).unwrap();
    assert_eq!(records.iter().map(|r| r.steps).collect::<Vec<_>>(), c.converge_steps);
    for w in records.windows(2) {
        assert!(w[1].relative_error < w[0].relative_error, "{records:?}");
    }
}

#[test]
fn sle_marks_unstable_speeds_invalid() {
    let mut c = small(25, 3, 20);
    c.scenario.conditions.axial_depth = 2e-3;
    let dir = tempfile::tempdir().unwrap();
    run(Command::Sle, &c, dir.path()).unwrap();
    let rows = read_sle(&read(dir.path(), SLE_FILE)).unwrap();
    assert_eq!(rows.len(), 25);
    let valid = rows.iter().filter(|r| r.sle_um.is_some()).count();
    assert!(valid > 0 && valid < 25, "{valid}");
    assert!(rows.iter().flat_map(|r| r.sle_um).all(f64::is_finite));
}

#[test]
fn chart_mask_matches_sld_cell_for_cell() {
    let c = small(16, 14, 16);
    let dir = tempfile::tempdir().unwrap();
    let outcome = run(Command::Chart, &c, dir.path()).unwrap();
    for name in [SLD_FILE, SLE_GRID_FILE, CHART_FILE] {
        assert!(outcome.files.contains(&dir.path().join(name)), "{name}");
    }
    let rows = read_sld(&read(dir.path(), SLD_FILE)).unwrap();
    let mask = cell_mask(&read(dir.path(), CHART_FILE));
    assert_eq!(mask.len(), rows.len());
    for (i, j, coloured) in mask {
        assert_eq!(coloured, rows[i * 14 + j].stable, "cell ({i}, {j})");
    }
}

#[test]
fn chart_reuses_existing_sld() {
    let c = small(8, 6, 12);
    let dir = tempfile::tempdir().unwrap();
    run(Command::Sld, &c, dir.path()).unwrap();
    let before = read(dir.path(), SLD_FILE);
    let outcome = run(Command::Chart, &c, dir.path()).unwrap();
    assert!(!outcome.files.contains(&dir.path().join(SLD_FILE)));
    assert_eq!(read(dir.path(), SLD_FILE), before);
}
