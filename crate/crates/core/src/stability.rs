//! Floquet stability of the lifted closed loop: spectral radius, lobe grids, convergence.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cutting_force::averaged_coefficients;
use crate::dense;
use crate::error::{Error, Result};
use crate::lifted::ClosedLoopSystem;
use crate::scenario::{restrict_to, Discretization, LiftedPair, MillingScenario};
use crate::structural::Hold;

/// Relative tolerance under which two eigenvalue moduli count as tied.
const MODULUS_TIE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Stable,
    MarginallyStable,
    Unstable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict {
    pub spectral_radius: f64,
    pub classification: Classification,
    pub dominant_eigenvalue: Complex64,
}

/// Removes rows/columns that are identically zero (each contributes a zero
/// eigenvalue) until none are left. Exact, and it shrinks the partial-immersion
/// monodromy a lot because `S_k = 0` out of cut.
fn deflate(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut keep: Vec<usize> = (0..m.nrows()).collect();
    loop {
        let next: Vec<usize> = keep
            .iter()
            .copied()
            .filter(|&i| {
                let col_zero = keep.iter().all(|&r| m[(r, i)] == 0.0);
                let row_zero = keep.iter().all(|&c| m[(i, c)] == 0.0);
                !(col_zero || row_zero)
            })
            .collect();
        if next.len() == keep.len() {
            break;
        }
        keep = next;
    }
    if keep.len() == m.nrows() {
        return m.clone();
    }
    DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
}

/// Largest eigenvalue modulus and one eigenvalue attaining it.
///
/// Ties (moduli within a relative `1e-10`) go to the largest real part, then
/// the largest imaginary part, so a complex pair always reports `Im ≥ 0`.
pub fn spectral_radius(m: &DMatrix<f64>) -> Result<(f64, Complex64)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "spectral radius of non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("matrix", "contains non-finite entries"));
    }
    let reduced = deflate(m);
    if reduced.nrows() == 0 {
        return Ok((0.0, Complex64::new(0.0, 0.0)));
    }
    let eig = dense::eigenvalues(&reduced)?;
    let radius = eig.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let cutoff = radius * (1.0 - MODULUS_TIE);
    let dominant = eig
        .iter()
        .filter(|z| z.norm() >= cutoff)
        .copied()
        .max_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)))
        .expect("non-empty spectrum");
    Ok((radius, dominant))
}

pub fn classify(radius: f64, margin: f64) -> Classification {
    let margin = margin.max(0.0);
    if radius < 1.0 - margin {
        Classification::Stable
    } else if radius > 1.0 + margin {
        Classification::Unstable
    } else {
        Classification::MarginallyStable
    }
}

pub fn verdict(system: &ClosedLoopSystem, margin: f64) -> Result<StabilityVerdict> {
    let (spectral_radius, dominant_eigenvalue) = spectral_radius(&system.phi)?;
    Ok(StabilityVerdict {
        spectral_radius,
        classification: classify(spectral_radius, margin),
        dominant_eigenvalue,
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Stability lobe grid. Cell `(i, j)` is speed `i`, depth `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SldGrid {
    /// rev/min, ascending.
    pub speeds: Vec<f64>,
    /// m, ascending.
    pub depths: Vec<f64>,
    /// Spectral radius, `NaN` for cells whose assembly or eigen-solve failed.
    pub radius: DMatrix<f64>,
    pub stable: DMatrix<bool>,
    pub margin: f64,
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellFailure {
    pub speed_index: usize,
    pub depth_index: usize,
    pub message: String,
}

impl SldGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.speeds.len(), self.depths.len())
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.radius[(i, j)].is_finite()
    }

    /// Per speed, the stability boundary depth: the top of the largest fully
    /// stable depth prefix, refined by linear interpolation of the radius to 1
    /// against the next cell. Columns stable throughout report the top depth;
    /// columns unstable at the first depth report the first depth.
    pub fn boundary(&self) -> Vec<f64> {
        (0..self.speeds.len())
            .map(|i| {
                let column: Vec<f64> = (0..self.depths.len()).map(|j| self.radius[(i, j)]).collect();
                let stable: Vec<bool> = (0..self.depths.len()).map(|j| self.stable[(i, j)]).collect();
                boundary_from_column(&self.depths, &column, &stable)
            })
            .collect()
    }
}

fn boundary_from_column(depths: &[f64], radius: &[f64], stable: &[bool]) -> f64 {
    let prefix = stable.iter().take_while(|&&s| s).count();
    if prefix == 0 {
        return depths.first().copied().unwrap_or(0.0);
    }
    let j = prefix - 1;
    if prefix == depths.len() {
        return depths[j];
    }
    let (r0, r1) = (radius[j], radius[j + 1]);
    if !(r0.is_finite() && r1.is_finite()) || r1 <= r0 {
        return depths[j];
    }
    let t = ((1.0 - r0) / (r1 - r0)).clamp(0.0, 1.0);
    depths[j] + t * (depths[j + 1] - depths[j])
}

fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Lifted matrices for every speed, sharing one set of force coefficients.
fn lift_each_speed(
    scenario: &MillingScenario,
    speeds: &[f64],
    disc: Discretization,
) -> Result<Vec<Result<LiftedPair>>> {
    let full = averaged_coefficients(&scenario.force_model()?, disc.steps)?;
    let (coeffs, feed) = restrict_to(&full, scenario.flexible, &scenario.conditions.feed)?;
    Ok(map_indexed(speeds.len(), |i| {
        scenario
            .clone()
            .with_speed(speeds[i])
            .and_then(|s| s.lift_with(disc, &coeffs, &feed))
    }))
}

fn check_axis(name: &'static str, values: &[f64], positive: bool) -> Result<()> {
    if values.iter().any(|v| !v.is_finite() || (positive && *v <= 0.0) || *v < 0.0) {
        return Err(Error::domain(name, "values must be finite and in range"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain(name, "values must be strictly ascending"));
    }
    Ok(())
}

/// Spectral radius over every `(speed, depth)` pair.
///
/// The lifted structure is built once per speed and reused across depths.
/// Failing cells are recorded and left as `NaN`/unstable.
pub fn sld_grid(
    scenario: &MillingScenario,
    speeds: &[f64],
    depths: &[f64],
    disc: Discretization,
    margin: f64,
) -> Result<SldGrid> {
    check_axis("speeds", speeds, true)?;
    check_axis("depths", depths, false)?;
    let lifted = lift_each_speed(scenario, speeds, disc)?;
    let rows: Vec<Vec<std::result::Result<f64, String>>> = map_indexed(speeds.len(), |i| {
        match &lifted[i] {
            Err(e) => vec![Err(e.to_string()); depths.len()],
            Ok(pair) => depths
                .iter()
                .map(|&a| {
                    pair.closed_loop(a)
                        .and_then(|cl| spectral_radius(&cl.phi))
                        .map(|(r, _)| r)
                        .map_err(|e| e.to_string())
                })
                .collect(),
        }
    });
    let (ns, nd) = (speeds.len(), depths.len());
    let mut radius = DMatrix::from_element(ns, nd, f64::NAN);
    let mut stable = DMatrix::from_element(ns, nd, false);
    let mut failures = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        for (j, cell) in row.into_iter().enumerate() {
            match cell {
                Ok(r) => {
                    radius[(i, j)] = r;
                    stable[(i, j)] = classify(r, margin) == Classification::Stable;
                }
                Err(message) => failures.push(CellFailure {
                    speed_index: i,
                    depth_index: j,
                    message,
                }),
            }
        }
    }
    Ok(SldGrid {
        speeds: speeds.to_vec(),
        depths: depths.to_vec(),
        radius,
        stable,
        margin,
        failures,
    })
}

/// Boundary depth per speed without filling the whole grid: each column is
/// scanned upward and abandoned at its first non-stable cell. Gives the same
/// numbers as [`SldGrid::boundary`] on the full grid.
pub fn stability_boundary(
    scenario: &MillingScenario,
    speeds: &[f64],
    depths: &[f64],
    disc: Discretization,
) -> Result<Vec<f64>> {
    check_axis("speeds", speeds, true)?;
    check_axis("depths", depths, false)?;
    let lifted = lift_each_speed(scenario, speeds, disc)?;
    let columns = map_indexed(speeds.len(), |i| -> Result<f64> {
        let pair = lifted[i].as_ref().map_err(Clone::clone)?;
        let mut radius = Vec::with_capacity(depths.len());
        let mut stable = Vec::with_capacity(depths.len());
        for &a in depths {
            let r = pair
                .closed_loop(a)
                .and_then(|cl| spectral_radius(&cl.phi))
                .map(|(r, _)| r)
                .unwrap_or(f64::NAN);
            let ok = classify(r, 0.0) == Classification::Stable;
            radius.push(r);
            stable.push(ok);
            if !ok {
                break;
            }
        }
        stable.resize(depths.len(), false);
        radius.resize(depths.len(), f64::NAN);
        Ok(boundary_from_column(depths, &radius, &stable))
    });
    columns.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    pub steps: usize,
    pub eigenvalue: Complex64,
    pub relative_error: f64,
}

/// Dominant eigenvalue of the scenario's closed loop.
pub fn dominant_eigenvalue(scenario: &MillingScenario, disc: Discretization) -> Result<Complex64> {
    let cl = scenario.closed_loop(disc)?;
    Ok(spectral_radius(&cl.phi)?.1)
}

/// Relative error of the dominant eigenvalue against the IMP eigenvalue at `reference_steps`.
pub fn convergence_curve(
    scenario: &MillingScenario,
    steps_list: &[usize],
    hold: Hold,
    reference_steps: usize,
) -> Result<Vec<ConvergenceRecord>> {
    if steps_list.iter().any(|&m| m > reference_steps) {
        return Err(Error::domain(
            "reference_steps",
            format!("must be at least every m in the list, got {reference_steps}"),
        ));
    }
    let mu0 = dominant_eigenvalue(scenario, Discretization::imp(reference_steps))?;
    convergence_against(scenario, steps_list, hold, mu0)
}

/// Same as [`convergence_curve`] with a precomputed reference eigenvalue.
pub fn convergence_against(
    scenario: &MillingScenario,
    steps_list: &[usize],
    hold: Hold,
    reference: Complex64,
) -> Result<Vec<ConvergenceRecord>> {
    if reference.norm() == 0.0 {
        return Err(Error::domain("reference", "reference eigenvalue is zero"));
    }
    let mut out = Vec::with_capacity(steps_list.len());
    for &m in steps_list {
        let mu = dominant_eigenvalue(scenario, Discretization::new(m, hold)?)?;
        out.push(ConvergenceRecord {
            steps: m,
            eigenvalue: mu,
            relative_error: (mu - reference).norm() / reference.norm(),
        });
    }
    Ok(out)
}

/// `Σ|α_ref − α_est| / Σ|α_ref|`, in percent.
pub fn relative_error(reference: &[f64], estimate: &[f64]) -> Result<f64> {
    if reference.len() != estimate.len() {
        return Err(Error::Dimension(format!(
            "reference has {} values, estimate {}",
            reference.len(),
            estimate.len()
        )));
    }
    let den: f64 = reference.iter().map(|v| v.abs()).sum();
    if !(den > 0.0) {
        return Err(Error::domain("reference", "sum of |reference| is zero"));
    }
    let num: f64 = reference.iter().zip(estimate).map(|(r, e)| (r - e).abs()).sum();
    Ok(100.0 * num / den)
}

pub fn normalized_time(candidate_seconds: f64, baseline_seconds: f64) -> Result<f64> {
    if !(baseline_seconds > 0.0) {
        return Err(Error::domain("baseline_seconds", "must be > 0"));
    }
    Ok(candidate_seconds / baseline_seconds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_of_simple_matrices() {
        assert_eq!(spectral_radius(&DMatrix::identity(4, 4)).unwrap().0, 1.0);
        assert_eq!(spectral_radius(&DMatrix::zeros(3, 3)).unwrap().0, 0.0);
        let companion = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let (r, mu) = spectral_radius(&companion).unwrap();
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        assert!((r - golden).abs() < 1e-12);
        assert!((mu.re - golden).abs() < 1e-12 && mu.im == 0.0);
    }

    #[test]
    fn tie_break_prefers_real_then_positive_imaginary() {
        let m = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        assert_eq!(spectral_radius(&m).unwrap().1, Complex64::new(1.0, 0.0));
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let mu = spectral_radius(&rot).unwrap().1;
        assert!(mu.im > 0.0 && (mu.im - 2.0).abs() < 1e-12);
    }

    #[test]
    fn deflation_is_exact() {
        // zero column 1 and zero row 2
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[2.0, 0.0, 1.0, 3.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        );
        let d = deflate(&m);
        assert_eq!(d, DMatrix::from_element(1, 1, 2.0));
        assert!((spectral_radius(&m).unwrap().0 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn classification_branches() {
        assert_eq!(classify(0.5, 1e-6), Classification::Stable);
        assert_eq!(classify(1.0, 1e-6), Classification::MarginallyStable);
        assert_eq!(classify(1.2, 1e-6), Classification::Unstable);
        assert_eq!(classify(1.0, 0.0), Classification::MarginallyStable);
    }

    #[test]
    fn relative_error_arithmetic() {
        assert_eq!(relative_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(relative_error(&[1.0, 2.0], &[2.0, 4.0]).unwrap(), 100.0);
        assert_eq!(relative_error(&[1.0, 1.0], &[1.0, 0.0]).unwrap(), 50.0);
        assert!(relative_error(&[0.0], &[1.0]).is_err());
        assert!(relative_error(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn normalized_time_ratio() {
        assert_eq!(normalized_time(3.0, 3.0).unwrap(), 1.0);
        assert_eq!(normalized_time(6.0, 3.0).unwrap(), 2.0);
        assert!(normalized_time(1.0, 0.0).is_err());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(1.0, 2.0, 3), vec![1.0, 1.5, 2.0]);
        assert_eq!(linspace(1.0, 2.0, 1), vec![1.0]);
        assert!(linspace(1.0, 2.0, 0).is_empty());
    }

    #[test]
    fn boundary_interpolates_on_radius() {
        let depths = [0.0, 1.0, 2.0, 3.0];
        let b = boundary_from_column(&depths, &[0.5, 0.8, 1.2, 0.9], &[true, true, false, true]);
        assert!((b - 1.5).abs() < 1e-15);
        assert_eq!(boundary_from_column(&depths, &[0.1; 4], &[true; 4]), 3.0);
        assert_eq!(boundary_from_column(&depths, &[1.5; 4], &[false; 4]), 0.0);
    }

    #[test]
    fn zero_depth_row_is_free_structure() {
        let s = MillingScenario::benchmark();
        let disc = Discretization::imp(10);
        let grid = sld_grid(&s, &[6000.0, 9000.0], &[0.0, 1e-3], disc, 0.0).unwrap();
        for i in 0..2 {
            let pair = s.clone().with_speed(grid.speeds[i]).unwrap().lift(disc).unwrap();
            let free = spectral_radius(&pair.structure.a).unwrap().0;
            assert!(grid.stable[(i, 0)]);
            assert!((grid.radius[(i, 0)] - free).abs() < 1e-12);
            assert!(free < 1.0);
        }
    }

    #[test]
    fn boundary_scan_matches_full_grid() {
        let s = MillingScenario::benchmark();
        let speeds = linspace(8000.0, 14000.0, 4);
        let depths = linspace(0.0, 4e-3, 9);
        let disc = Discretization::imp(16);
        let grid = sld_grid(&s, &speeds, &depths, disc, 0.0).unwrap();
        let scan = stability_boundary(&s, &speeds, &depths, disc).unwrap();
        assert_eq!(grid.boundary(), scan);
    }
}
