//! Counting functions, local split densities, the leading constant and the exponent
//! tables, checked against the enumerated family.

mod constant;
mod constants;
mod count;
mod torsion;

pub use constant::{
    cyclotomic_residue, cyclotomic_residue_euler, l_value_at_one, leading_constant, tame_product,
    wild_factor, LeadingConstant,
};
pub use constants::{paper_constants, PaperConstants};
pub use count::{
    census_discriminants, count_census, delta_local, delta_set, error_exponent_fit,
    least_squares_slope, split_profile, tame_primes_up_to, weighted_count, CensusResult, ErrorFit,
    SplitProfile, WeightedCount,
};
pub use torsion::{torsion_scan, DyadicRange, TorsionScan};
