//! Norming weights by exhaustion.
//!
//! A positive continuous `φ` is norming when `‖u‖_φ = ∫|u|φ` is finite for
//! every negative subharmonic `u`, controls `u` from above on compacts, and
//! has uniformly small tails. [`build_weight`] produces such a `φ` from
//! certified Harnack-chain constants; [`verify_norming`] checks the three
//! properties on a [`TestFamily`].

mod chain;
mod family;
mod verify;
mod weight;

pub use chain::{pointwise_mass_constant, CellProbe, CompactSet, MassConstant, LEAF_RATIO};
pub use family::{quarter_disk_green, FamilyMember, TestFamily, IM_INV_SQUARE_TAG};
pub use verify::{
    check_mass_growth, compact_lower_bound, equivalence_ratio, verify_norming, weighted_norm, CompactReport,
    MassGrowth, MemberReport, NormingFailure, NormingProperty, NormingReport, VerifyConfig,
};
pub use weight::{build_weight, ConstantWeight, NormingWeight, Weight, B_CAP};
