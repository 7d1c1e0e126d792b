//! Brute-force reference solvers, kept independent of the lifted formulation.
//!
//! * [`dde`]: fixed-step RK4 marching of the angle-domain delay equation
//! * [`sdm`]: classical first-order semi-discretization with an augmented state of
//!   `m + 1` full structural states

pub mod dde;
pub mod sdm;

pub use dde::{build_dde, simulate_dde, DdeSystem, InitialHistory, Trajectory};
pub use sdm::{classical_sdm, classical_steady_state, ClassicalMonodromy};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::scenario::FlexibleAxes;

/// Restricts planar `r`, `S` to the flexible axes: `(r̃ - S̃ s̃, S̃)`, with the
/// feed acting through rigid axes folded into the constant term.
pub(crate) fn restricted_terms(
    r: &Vector2<f64>,
    s: &Matrix2<f64>,
    flexible: FlexibleAxes,
    feed: &Vector2<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let axes = flexible.indices();
    let excitation = r - s * feed;
    (
        DVector::from_fn(axes.len(), |i, _| excitation[axes[i]]),
        DMatrix::from_fn(axes.len(), axes.len(), |i, j| s[(axes[i], axes[j])]),
    )
}
