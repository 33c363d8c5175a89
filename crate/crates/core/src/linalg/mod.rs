//! Direct solvers for the narrow-band systems behind the compact operators.

mod banded;
mod cyclic;

pub use banded::BandedLu;
pub use cyclic::CyclicTridiagonal;
