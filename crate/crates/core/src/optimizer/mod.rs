//! Free-parameter search: the resolution/stability objective and a
//! differential-evolution engine.

mod de;
mod objective;

pub use de::{optimize, optimize_seeded, DEConfig, GenerationStats, MutationFactor, OptimizationResult};
pub use objective::{
    assess, objective, Infeasibility, OptimizationProblem, BOUND_SHRINK, DEFAULT_STABILITY_INTERVALS,
    PENALTY,
};
