//! Benchmark problems: 1D and 2D linear advection and the Euler vortex,
//! advanced with classical RK4 and strong boundary injection.

mod advection;
mod conservation;
mod euler;
mod order;
mod rk4;

pub use advection::{
    advect_1d, advect_2d_varcoeff, advection_potential, Advection1dConfig, Advection2dConfig,
    AdvectionRun, InflowConvention, Snapshot,
};
pub use conservation::{
    conservation_identity_residual, conservation_monitor, relative_identity_residual,
    weighted_mass, ConservationRecord, StepBudget,
};
pub use euler::{euler_vortex_2d, FieldSnapshot, Primitive, SimulationRun, VortexConfig, VortexProblem, N_VARS};
pub use order::{error_and_order, OrderEstimate, ERROR_FLOOR};
pub use rk4::{
    rk4_advance, rk4_step, rk4_step_constrained, Rk4Workspace, StageInjection, StageTime,
    TimeIntegrationConfig, TimeStep,
    RK4_WEIGHTS,
};
