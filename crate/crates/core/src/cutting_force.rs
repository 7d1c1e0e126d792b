//! Zero-helix multi-tooth milling force model.
//!
//! Forces are summed over all teeth in the fixed `xy` frame and split into a
//! static part `a_p r(θ)` and a regenerative part `a_p S(θ) (s_t + Δz(θ) - Δz(θ-Θ))`.
//! Both `r` and `S` are periodic in the tooth-passing angle `Θ = 2π/N`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};

/// Sub-panels per sampling interval used when averaging `r(θ)` and `S(θ)`.
pub const SUBSAMPLES_PER_INTERVAL: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MillingDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToolGeometry {
    pub teeth_count: usize,
    /// Cutter diameter in meters.
    pub diameter: f64,
    pub direction: MillingDirection,
}

impl ToolGeometry {
    pub fn new(teeth_count: usize, diameter: f64, direction: MillingDirection) -> Result<Self> {
        if teeth_count == 0 {
            return Err(Error::domain("teeth_count", "must be at least 1"));
        }
        if !(diameter.is_finite() && diameter > 0.0) {
            return Err(Error::domain("diameter", format!("must be > 0, got {diameter}")));
        }
        Ok(Self {
            teeth_count,
            diameter,
            direction,
        })
    }

    /// Tooth-passing angle `Θ = 2π/N`.
    pub fn tooth_pitch(&self) -> f64 {
        TAU / self.teeth_count as f64
    }
}

/// Linear force-law coefficients, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingCoefficients {
    /// N/m²
    pub tangential_cutting: f64,
    /// N/m²
    pub normal_cutting: f64,
    /// N/m
    pub tangential_edge: f64,
    /// N/m
    pub normal_edge: f64,
}

impl CuttingCoefficients {
    pub fn new(
        tangential_cutting: f64,
        normal_cutting: f64,
        tangential_edge: f64,
        normal_edge: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("tangential_edge", tangential_edge),
            ("normal_edge", normal_edge),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(name, "must be finite"));
            }
        }
        for (name, v) in [
            ("tangential_cutting", tangential_cutting),
            ("normal_cutting", normal_cutting),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(Self {
            tangential_cutting,
            normal_cutting,
            tangential_edge,
            normal_edge,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingConditions {
    /// Axial depth of cut `a_p`, m.
    pub axial_depth: f64,
    /// Radial depth of cut `a_r`, m.
    pub radial_depth: f64,
    /// Spindle speed, rev/min.
    pub spindle_speed: f64,
    /// Feed per tooth `[s_x, s_y]`, m/tooth.
    pub feed: Vector2<f64>,
}

impl CuttingConditions {
    pub fn new(
        tool: &ToolGeometry,
        axial_depth: f64,
        radial_depth: f64,
        spindle_speed: f64,
        feed: Vector2<f64>,
    ) -> Result<Self> {
        if !(axial_depth.is_finite() && axial_depth >= 0.0) {
            return Err(Error::domain("axial_depth", format!("must be >= 0, got {axial_depth}")));
        }
        if !(radial_depth.is_finite() && (0.0..=tool.diameter).contains(&radial_depth)) {
            return Err(Error::domain(
                "radial_depth",
                format!("must lie in [0, {}], got {radial_depth}", tool.diameter),
            ));
        }
        if !(spindle_speed.is_finite() && spindle_speed > 0.0) {
            return Err(Error::domain("spindle_speed", format!("must be > 0, got {spindle_speed}")));
        }
        if !(feed[0].is_finite() && feed[1].is_finite()) {
            return Err(Error::domain("feed", "must be finite"));
        }
        Ok(Self {
            axial_depth,
            radial_depth,
            spindle_speed,
            feed,
        })
    }
}

/// Angular range `[start, exit]` in which a tooth is cutting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImmersionWindow {
    pub start_angle: f64,
    pub exit_angle: f64,
}

pub fn immersion_window(
    direction: MillingDirection,
    radial_depth: f64,
    diameter: f64,
) -> Result<ImmersionWindow> {
    if !(diameter.is_finite() && diameter > 0.0) {
        return Err(Error::domain("diameter", format!("must be > 0, got {diameter}")));
    }
    if !(radial_depth.is_finite() && (0.0..=diameter).contains(&radial_depth)) {
        return Err(Error::domain(
            "radial_depth",
            format!("must lie in [0, {diameter}], got {radial_depth}"),
        ));
    }
    let ratio = radial_depth / diameter;
    let window = match direction {
        MillingDirection::Up => ImmersionWindow {
            start_angle: 0.0,
            exit_angle: (1.0 - 2.0 * ratio).clamp(-1.0, 1.0).acos(),
        },
        MillingDirection::Down => ImmersionWindow {
            start_angle: (2.0 * ratio - 1.0).clamp(-1.0, 1.0).acos(),
            exit_angle: PI,
        },
    };
    Ok(window)
}

/// Angle of tooth `j` (1-based) when the spindle is at `spindle_angle`.
pub fn tooth_angle(spindle_angle: f64, tooth_index: usize, teeth_count: usize) -> Result<f64> {
    if teeth_count == 0 || tooth_index == 0 || tooth_index > teeth_count {
        return Err(Error::domain(
            "tooth_index",
            format!("must lie in 1..={teeth_count}, got {tooth_index}"),
        ));
    }
    Ok(spindle_angle + TAU / teeth_count as f64 * (tooth_index - 1) as f64)
}

/// Switching function: 1 when the tooth angle (mod 2π) lies in the window, bounds inclusive.
pub fn engagement(tooth_angle: f64, window: &ImmersionWindow) -> u8 {
    let phi = tooth_angle.rem_euclid(TAU);
    u8::from(window.start_angle <= phi && phi <= window.exit_angle)
}

/// Rotation from the tangential-normal frame of a tooth to the fixed `xy` frame.
pub fn rotation_matrix(tooth_angle: f64) -> Matrix2<f64> {
    let (s, c) = tooth_angle.sin_cos();
    Matrix2::new(-c, -s, s, -c)
}

/// Instantaneous chip thickness `h = -[0 1] R^T(φ) (s_t + Δz - Δz_delayed)`.
pub fn chip_thickness(
    tooth_angle: f64,
    feed: &Vector2<f64>,
    vib: &Vector2<f64>,
    vib_delayed: &Vector2<f64>,
) -> f64 {
    let v = feed + vib - vib_delayed;
    let rt = rotation_matrix(tooth_angle).transpose();
    -(rt.row(1) * v)[0]
}

/// Ungated contribution of a single tooth at angle `phi` to `r` and `S`.
fn tooth_terms(phi: f64, k: &CuttingCoefficients) -> (Vector2<f64>, Matrix2<f64>) {
    let (s, c) = phi.sin_cos();
    let (s2, c2) = (2.0 * phi).sin_cos();
    let (kct, kcn) = (k.tangential_cutting, k.normal_cutting);
    let (ket, ken) = (k.tangential_edge, k.normal_edge);
    let r = Vector2::new(-(ket * c + ken * s), ket * s - ken * c);
    let sm = 0.5
        * Matrix2::new(
            kct * s2 + kcn * (1.0 - c2),
            kct * (1.0 + c2) + kcn * s2,
            -kct * (1.0 - c2) + kcn * s2,
            -kct * s2 + kcn * (1.0 + c2),
        );
    (r, sm)
}

/// Periodic directional force coefficients `r(θ)` and `S(θ)` summed over the engaged teeth.
pub fn directional_coefficients(
    spindle_angle: f64,
    coeffs: &CuttingCoefficients,
    window: &ImmersionWindow,
    teeth_count: usize,
) -> (Vector2<f64>, Matrix2<f64>) {
    let pitch = TAU / teeth_count as f64;
    let mut r = Vector2::zeros();
    let mut s = Matrix2::zeros();
    for j in 0..teeth_count {
        let phi = spindle_angle + pitch * j as f64;
        if engagement(phi, window) == 1 {
            let (rj, sj) = tooth_terms(phi, coeffs);
            r += rj;
            s += sj;
        }
    }
    (r, s)
}

/// Everything the force model needs besides the vibration: coefficients, window, tooth count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceModel {
    pub coefficients: CuttingCoefficients,
    pub window: ImmersionWindow,
    pub teeth_count: usize,
}

impl ForceModel {
    pub fn pitch(&self) -> f64 {
        TAU / self.teeth_count as f64
    }

    pub fn at(&self, spindle_angle: f64) -> (Vector2<f64>, Matrix2<f64>) {
        directional_coefficients(spindle_angle, &self.coefficients, &self.window, self.teeth_count)
    }

    /// Angles in `(a, b)` where some tooth enters or leaves the cut.
    fn switch_angles(&self, a: f64, b: f64) -> Vec<f64> {
        let pitch = self.pitch();
        let mut out = Vec::new();
        for edge in [self.window.start_angle, self.window.exit_angle] {
            let mut t = edge + ((a - edge) / pitch).floor() * pitch;
            while t < b {
                if t > a {
                    out.push(t);
                }
                t += pitch;
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * pitch);
        out
    }

    /// Mean of `r(θ)` and `S(θ)` over `[a, b]`.
    ///
    /// The interval is split at engagement switches; each smooth piece uses
    /// composite Simpson with a panel count proportional to its length.
    pub fn average_over(&self, a: f64, b: f64, subsamples: usize) -> (Vector2<f64>, Matrix2<f64>) {
        let width = b - a;
        let mut knots = vec![a];
        knots.extend(self.switch_angles(a, b));
        knots.push(b);

        let pitch = self.pitch();
        let mut r_int = Vector2::zeros();
        let mut s_int = Matrix2::zeros();
        for w in knots.windows(2) {
            let (u, v) = (w[0], w[1]);
            if v <= u {
                continue;
            }
            let mid = 0.5 * (u + v);
            let engaged: Vec<usize> = (0..self.teeth_count)
                .filter(|&j| engagement(mid + pitch * j as f64, &self.window) == 1)
                .collect();
            if engaged.is_empty() {
                continue;
            }
            let eval = |t: f64| {
                let mut r = Vector2::zeros();
                let mut s = Matrix2::zeros();
                for &j in &engaged {
                    let (rj, sj) = tooth_terms(t + pitch * j as f64, &self.coefficients);
                    r += rj;
                    s += sj;
                }
                (r, s)
            };
            let mut panels = ((subsamples as f64) * (v - u) / width).ceil() as usize;
            panels = panels.max(2);
            panels += panels % 2;
            let h = (v - u) / panels as f64;
            for i in 0..=panels {
                let wgt = if i == 0 || i == panels {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let (r, s) = eval(u + h * i as f64);
                r_int += r * (wgt * h / 3.0);
                s_int += s * (wgt * h / 3.0);
            }
        }
        (r_int / width, s_int / width)
    }
}

/// Piecewise-constant force coefficients over one tooth period, sampled at `kΔθ`.
///
/// Entries are `r`-dimensional (2 for the planar model, fewer after
/// [`PeriodicCoefficients::restrict`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCoefficients {
    pub steps: usize,
    pub step_angle: f64,
    pub edge_terms: Vec<DVector<f64>>,
    pub directional_terms: Vec<DMatrix<f64>>,
}

impl PeriodicCoefficients {
    pub fn dim(&self) -> usize {
        self.edge_terms.first().map_or(0, |v| v.len())
    }

    /// `r_k` with periodic wrap.
    pub fn edge(&self, k: isize) -> &DVector<f64> {
        &self.edge_terms[k.rem_euclid(self.steps as isize) as usize]
    }

    pub fn directional(&self, k: isize) -> &DMatrix<f64> {
        &self.directional_terms[k.rem_euclid(self.steps as isize) as usize]
    }

    /// Keeps only the flexible `axes`, treating the remaining axes as rigid.
    ///
    /// The feed acting through the dropped columns of `S_k` is folded into the
    /// edge terms so that `r̃_k - S̃_k s̃ = (r_k - S_k s)` restricted to `axes`.
    /// Returns the restricted coefficients and the restricted feed.
    pub fn restrict(&self, axes: &[usize], feed: &DVector<f64>) -> Result<(Self, DVector<f64>)> {
        let dim = self.dim();
        if feed.len() != dim || axes.iter().any(|&a| a >= dim) || axes.is_empty() {
            return Err(Error::Dimension(format!(
                "cannot restrict {dim}-axis coefficients to axes {axes:?}"
            )));
        }
        let rigid: Vec<usize> = (0..dim).filter(|a| !axes.contains(a)).collect();
        let mut edge_terms = Vec::with_capacity(self.steps);
        let mut directional_terms = Vec::with_capacity(self.steps);
        for (r, s) in self.edge_terms.iter().zip(&self.directional_terms) {
            let r_new = DVector::from_fn(axes.len(), |i, _| {
                let row = axes[i];
                r[row] - rigid.iter().map(|&c| s[(row, c)] * feed[c]).sum::<f64>()
            });
            let s_new = DMatrix::from_fn(axes.len(), axes.len(), |i, j| s[(axes[i], axes[j])]);
            edge_terms.push(r_new);
            directional_terms.push(s_new);
        }
        let feed_new = DVector::from_fn(axes.len(), |i, _| feed[axes[i]]);
        Ok((
            Self {
                steps: self.steps,
                step_angle: self.step_angle,
                edge_terms,
                directional_terms,
            },
            feed_new,
        ))
    }
}

/// Averages of `r(θ)` and `S(θ)` over the centred intervals `[(k-½)Δθ, (k+½)Δθ]`, `k = 0..m-1`.
pub fn averaged_coefficients(model: &ForceModel, steps: usize) -> Result<PeriodicCoefficients> {
    averaged_coefficients_with(model, steps, SUBSAMPLES_PER_INTERVAL)
}

pub fn averaged_coefficients_with(
    model: &ForceModel,
    steps: usize,
    subsamples: usize,
) -> Result<PeriodicCoefficients> {
    if steps == 0 {
        return Err(Error::domain("steps", "must be at least 1"));
    }
    let step_angle = model.pitch() / steps as f64;
    let mut edge_terms = Vec::with_capacity(steps);
    let mut directional_terms = Vec::with_capacity(steps);
    for k in 0..steps {
        let centre = k as f64 * step_angle;
        let (r, s) = model.average_over(
            centre - 0.5 * step_angle,
            centre + 0.5 * step_angle,
            subsamples,
        );
        edge_terms.push(DVector::from_column_slice(r.as_slice()));
        directional_terms.push(DMatrix::from_column_slice(2, 2, s.as_slice()));
    }
    Ok(PeriodicCoefficients {
        steps,
        step_angle,
        edge_terms,
        directional_terms,
    })
}
