//! Membership evidence for characterized subgroups `t_(a_n)(T)`, their
//! ideal versions `t^I_(a_n)(T)`, and N-set partial sums.

mod convergence;
mod scan;
mod summability;
mod weights;

pub use convergence::{
    classical_convergence, default_epsilons, ideal_convergence, membership_by_support, ConvergenceReport,
    EpsilonStats, DEFAULT_DEPTH,
};
pub use scan::{Point, Route};
pub use summability::{nset_partial_sums, BlockIncrement, GrowthClass, SumCheckpoint, SummabilityReport};
pub use weights::{weight_ideal_link, WeightRule};
