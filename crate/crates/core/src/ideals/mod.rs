//! Subsets of `N`, ideals over them and three-valued membership.

mod ideal;
mod sets;
mod verdict;

pub use ideal::{
    density_estimate, ideal_member, non_snt_witness, prefix_density, translation_invariant_in, DensityEstimate,
    IdealDescriptor, DEFAULT_CUTOFF,
};
pub(crate) use ideal::checkpoints;
pub use sets::{shift_set, EnumRule, Growth, SetDescriptor};
pub use verdict::{Outcome, TracePoint, Verdict};
