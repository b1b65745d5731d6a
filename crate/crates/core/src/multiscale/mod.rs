//! Multiscale quantities: the Θ forms and their telescoping identities,
//! lacunary scale ladders, the three-term decomposition of a count and
//! `λ₀` sweeps.

mod decompose;
mod ladder;
mod quadrature;
mod sweep;
mod theta;

pub use decompose::{check_form_scales, decompose, error_ladder_sum, DecompositionRow, LadderSum};
pub use ladder::{covering_multiplicity, ScaleLadder};
pub use quadrature::{ladder_radius, IdentityCheck, QuadratureSpec};
pub use sweep::{
    lambda0_sweep, positive_tail, zero_windows, SweepPlan, SweepReport, SweepSeries, SweepVariant, MIN_TAIL_FRACTION,
    POSITIVITY_THRESHOLD,
};
pub use theta::{square_identity, theta_form, verify_theta_identity, ThetaForm};
