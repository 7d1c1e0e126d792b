//! Regenerative milling dynamics as a lifted, shift-invariant state-space system.
//!
//! The structural dynamics are discretized exactly under a zero-phase hold
//! (impulse invariance or half-shifted zero-order hold), the cutting force is
//! semi-discretized with interval-averaged periodic coefficients, and both are
//! lifted over one tooth-passing angle. The resulting closed loop has a
//! monodromy matrix of dimension `r(2n+m)`, from which stability lobes follow,
//! while the open feed-forward path gives the steady-state vibration and the
//! surface location error without touching the monodromy matrix.
//!
//! Module map:
//!
//! * [`cutting_force`]: tooth geometry, engagement, directional coefficients
//! * [`structural`]: modal realization, angle domain, zero-phase discretization
//! * [`lifted`]: period lifting and closed-loop assembly
//! * [`stability`]: spectral radius, lobe grids, convergence studies
//! * [`surface`]: steady-state vibration and surface location error
//! * [`oracle`]: brute-force references (time marching, classical SDM)
//! * [`scenario`]: a complete problem instance and the pipeline glue

pub mod cutting_force;
pub mod dense;
pub mod error;
pub mod fmt;
pub mod lifted;
pub mod oracle;
pub mod scenario;
pub mod stability;
pub mod structural;
pub mod surface;

pub use error::{Error, Result};
pub use scenario::{Discretization, MillingScenario};
pub use structural::Hold;

pub use nalgebra;
pub use num_complex::Complex64;
