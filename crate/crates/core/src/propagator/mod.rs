//! Free propagator on the discretized circle and its rational-time
//! structure.

pub mod displacement;
pub mod matrix;
pub mod time;

pub use displacement::{
    allowed_displacements, classify_displacements, conjectured_phase, physical_displacements,
    wrap_displacement, wrap_phase, DisplacementSet, PHYSICAL_THRESHOLD,
};
pub use matrix::{
    direct_propagator, direct_propagator_rational, exact_propagator, mixed_propagator,
    peak_scaling_check, PropagatorKind, PropagatorMatrix,
};
pub use time::{reduce_period, RationalTime};
