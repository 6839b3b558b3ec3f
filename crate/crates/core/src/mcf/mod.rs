//! The triangle map family: fast `T`, slow `t`, homogeneous `T^H` and
//! sliced `T^S`, plus orbit iteration and slow/fast digit conversion.

mod maps;
mod orbit;
mod point;

pub use maps::{
    branch_matrix, digit, embed, fast_step, fast_step_in_place, hom_step, inverse_branch_fast,
    inverse_branch_matrix, inverse_branches_slow, project, slice_normalize, sliced_step,
    slow_step,
};
pub use orbit::{
    fast_digits, fast_to_slow, orbit, slow_to_fast, BitSequence, DigitSequence, Flavor, Orbit,
};
pub use point::{ConeStatus, HomogeneousVector, SimplexPoint};
