//! Invariant measures and the statistical experiments built on them.

mod birkhoff;
mod cell_mc;
mod constant;
mod density;
pub mod quad;
mod sampling;
mod slow;
mod survey;
mod transfer;

pub use birkhoff::{
    birkhoff_average, birkhoff_time_averages, space_average, BirkhoffEstimate, Region,
};
pub use cell_mc::{
    pattern_ratio_mc, sample_in_cell, sample_local, suffix_ratio_mc, zero_tail_ratio_exact,
    zero_tail_ratio_mc, RatioEstimate,
};
pub use constant::{
    closed_form_constant, normalizing_constant, quadrature_constant, series_constant, zeta,
    ConstantEstimate, ConstantMethod,
};
pub use density::{density, density_raw, DensityKind};
pub use sampling::{
    mean_and_error, uniform_simplex_coords, uniform_simplex_point, worker_rng, Parallelism,
    DEFAULT_SEED, DEFAULT_WORKERS,
};
pub use slow::{slow_truncated_mass, SlowMassEstimate};
pub use survey::{
    jump_step, zero_block_survey, ErgodicReport, JumpOutcome, SurveyParams, DEFAULT_MAX_SCAN,
};
pub use transfer::{
    transfer_apply_fast, transfer_apply_slow, transfer_partial_sum_fast, TransferSum,
};
