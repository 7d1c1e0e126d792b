//! A complete milling problem and the path from it to lifted matrices.

use nalgebra::{DVector, Vector2};

use crate::cutting_force::{
    averaged_coefficients, immersion_window, CuttingCoefficients, CuttingConditions, ForceModel,
    MillingDirection, PeriodicCoefficients, ToolGeometry,
};
use crate::error::{Error, Result};
use crate::lifted::{
    assemble_closed_loop, lift_force, lift_structure, ClosedLoopSystem, LiftedForce, LiftedModel,
};
use crate::structural::{
    discretize, realize_axes, to_angle_domain, DiscreteModel, Hold, ModalAxis, Mode,
    StateSpaceModel,
};

/// Which axes vibrate. Rigid axes keep their feed contribution but carry no dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlexibleAxes {
    Both,
    X,
    Y,
}

impl FlexibleAxes {
    pub fn indices(self) -> &'static [usize] {
        match self {
            FlexibleAxes::Both => &[0, 1],
            FlexibleAxes::X => &[0],
            FlexibleAxes::Y => &[1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discretization {
    /// Samples per tooth-passing angle, `m`.
    pub steps: usize,
    pub hold: Hold,
}

impl Discretization {
    pub fn new(steps: usize, hold: Hold) -> Result<Self> {
        if steps == 0 {
            return Err(Error::domain("steps", "must be at least 1"));
        }
        Ok(Self { steps, hold })
    }

    pub fn imp(steps: usize) -> Self {
        Self { steps: steps.max(1), hold: Hold::Imp }
    }

    pub fn zoh(steps: usize) -> Self {
        Self { steps: steps.max(1), hold: Hold::Zoh }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MillingScenario {
    pub tool: ToolGeometry,
    pub coefficients: CuttingCoefficients,
    pub x_axis: ModalAxis,
    pub y_axis: ModalAxis,
    pub conditions: CuttingConditions,
    pub flexible: FlexibleAxes,
}

/// Structural and force matrices lifted at one spindle speed and resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPair {
    pub structure: LiftedModel,
    pub force: LiftedForce,
}

impl LiftedPair {
    pub fn closed_loop(&self, axial_depth: f64) -> Result<ClosedLoopSystem> {
        assemble_closed_loop(&self.structure, &self.force, axial_depth)
    }
}

impl MillingScenario {
    /// The two-flute, two-mode-per-axis down-milling benchmark at half immersion,
    /// `a_p = 0.5 mm`, 12 500 rpm.
    pub fn benchmark() -> Self {
        let tool = ToolGeometry::new(2, 25e-3, MillingDirection::Down).expect("valid tool");
        let coefficients =
            CuttingCoefficients::new(838.7e6, 384.6e6, 19.59e3, 21.18e3).expect("valid coefficients");
        let x_axis = ModalAxis::new(vec![
            Mode::from_hz(350.0, 0.042, 38.462e6).expect("mode"),
            Mode::from_hz(540.0, 0.040, 1.681e6).expect("mode"),
        ])
        .expect("axis");
        let y_axis = ModalAxis::new(vec![
            Mode::from_hz(284.0, 0.054, 16.129e6).expect("mode"),
            Mode::from_hz(554.0, 0.190, 6.579e6).expect("mode"),
        ])
        .expect("axis");
        let conditions = CuttingConditions::new(
            &tool,
            0.5e-3,
            0.5 * tool.diameter,
            12_500.0,
            Vector2::new(0.2e-3, 0.0),
        )
        .expect("valid conditions");
        Self {
            tool,
            coefficients,
            x_axis,
            y_axis,
            conditions,
            flexible: FlexibleAxes::Both,
        }
    }

    fn revalidated(mut self, conditions: CuttingConditions) -> Result<Self> {
        self.conditions = CuttingConditions::new(
            &self.tool,
            conditions.axial_depth,
            conditions.radial_depth,
            conditions.spindle_speed,
            conditions.feed,
        )?;
        Ok(self)
    }

    /// Sets the radial depth to `ratio · D`.
    pub fn with_immersion(self, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && (0.0..=1.0).contains(&ratio)) {
            return Err(Error::domain("immersion", format!("a_r/D must lie in [0, 1], got {ratio}")));
        }
        let c = CuttingConditions { radial_depth: ratio * self.tool.diameter, ..self.conditions };
        self.revalidated(c)
    }

    pub fn with_axial_depth(self, axial_depth: f64) -> Result<Self> {
        let c = CuttingConditions { axial_depth, ..self.conditions };
        self.revalidated(c)
    }

    pub fn with_speed(self, spindle_speed: f64) -> Result<Self> {
        let c = CuttingConditions { spindle_speed, ..self.conditions };
        self.revalidated(c)
    }

    pub fn with_feed(self, feed: Vector2<f64>) -> Result<Self> {
        let c = CuttingConditions { feed, ..self.conditions };
        self.revalidated(c)
    }

    /// Keeps the first `n` modes of each axis.
    pub fn with_modes(mut self, n: usize) -> Result<Self> {
        self.x_axis = self.x_axis.truncated(n)?;
        self.y_axis = self.y_axis.truncated(n)?;
        Ok(self)
    }

    pub fn with_direction(mut self, direction: MillingDirection) -> Self {
        self.tool.direction = direction;
        self
    }

    pub fn with_flexible(mut self, flexible: FlexibleAxes) -> Self {
        self.flexible = flexible;
        self
    }

    pub fn immersion_ratio(&self) -> f64 {
        self.conditions.radial_depth / self.tool.diameter
    }

    /// Number of flexible axes, `r`.
    pub fn io_dim(&self) -> usize {
        self.flexible.indices().len()
    }

    /// Tooth-passing angle `Θ = 2π/N`.
    pub fn delay(&self) -> f64 {
        self.tool.tooth_pitch()
    }

    pub fn axes(&self) -> Vec<&ModalAxis> {
        self.flexible
            .indices()
            .iter()
            .map(|&i| if i == 0 { &self.x_axis } else { &self.y_axis })
            .collect()
    }

    /// Time-domain modal realization of the flexible axes.
    pub fn structure(&self) -> Result<StateSpaceModel> {
        let axes: Vec<ModalAxis> = self.axes().into_iter().cloned().collect();
        realize_axes(&axes)
    }

    pub fn angle_structure(&self) -> Result<StateSpaceModel> {
        to_angle_domain(&self.structure()?, self.conditions.spindle_speed)
    }

    pub fn force_model(&self) -> Result<ForceModel> {
        let window =
            immersion_window(self.tool.direction, self.conditions.radial_depth, self.tool.diameter)?;
        Ok(ForceModel {
            coefficients: self.coefficients,
            window,
            teeth_count: self.tool.teeth_count,
        })
    }

    /// Feed vector restricted to the flexible axes, with rigid-axis feed folded
    /// into the edge terms.
    pub fn periodic_coefficients(&self, steps: usize) -> Result<(PeriodicCoefficients, DVector<f64>)> {
        let full = averaged_coefficients(&self.force_model()?, steps)?;
        restrict_to(&full, self.flexible, &self.conditions.feed)
    }

    pub fn discrete_structure(&self, disc: Discretization) -> Result<DiscreteModel> {
        discretize(&self.angle_structure()?, self.delay() / disc.steps as f64, disc.hold)
    }

    pub fn lift(&self, disc: Discretization) -> Result<LiftedPair> {
        let (coeffs, feed) = self.periodic_coefficients(disc.steps)?;
        self.lift_with(disc, &coeffs, &feed)
    }

    /// Lifts with force coefficients computed elsewhere; they depend only on
    /// immersion and `m`, not on the speed, so sweeps share them.
    pub fn lift_with(
        &self,
        disc: Discretization,
        coeffs: &PeriodicCoefficients,
        feed: &DVector<f64>,
    ) -> Result<LiftedPair> {
        if coeffs.steps != disc.steps {
            return Err(Error::Dimension(format!(
                "coefficients have {} steps, discretization {}",
                coeffs.steps, disc.steps
            )));
        }
        let structure = lift_structure(&self.discrete_structure(disc)?, disc.steps)?;
        let force = lift_force(coeffs, feed)?;
        Ok(LiftedPair { structure, force })
    }

    pub fn closed_loop(&self, disc: Discretization) -> Result<ClosedLoopSystem> {
        self.lift(disc)?.closed_loop(self.conditions.axial_depth)
    }
}

pub(crate) fn restrict_to(
    full: &PeriodicCoefficients,
    flexible: FlexibleAxes,
    feed: &Vector2<f64>,
) -> Result<(PeriodicCoefficients, DVector<f64>)> {
    let feed = DVector::from_column_slice(feed.as_slice());
    match flexible {
        FlexibleAxes::Both => Ok((full.clone(), feed)),
        other => full.restrict(other.indices(), &feed),
    }
}
