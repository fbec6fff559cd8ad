//! Explicit points that separate a characterized subgroup from a
//! classical one, with exact certificates.

mod certificate;
mod digits;
mod plan;

pub use crate::arith::{decompose, Decomposition};
pub use certificate::{
    assemble, build_and_verify, verify_certificate, BlockCheck, IndexCheck, Mismatch, SupportCheck, TargetKind,
    VerifyReport, WitnessCertificate, CAP_BITS,
};
pub use digits::{digit_choice, DigitChoice};
pub use plan::{plan_witness, plan_witness_with, Absorption, PlanOptions, PlannedIndex, Selected, Theorem, WitnessPlan};
