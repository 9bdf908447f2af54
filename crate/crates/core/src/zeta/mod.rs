//! The discriminant zeta function of the family: brute-force coefficients against the
//! Euler-product side, tame local factors and the Frobenius character-sum identity.

mod cyclo;
mod kummer;
mod series;

pub use cyclo::{cyclotomic_polynomial, reduce_mod, GroupRingElem};
pub use kummer::{
    frobenius_char_sum_check, power_residue_degree, tame_coefficient, tame_local_factor, us_group,
    FrobeniusCheck, FrobeniusContext, KummerLocalDatum, KummerPrimeRecord, TameFactor, UsElement,
};
pub use series::{
    coeffs_bruteforce, coeffs_eulerside, scaled_arch_weight, unram_outside_s_count,
    DirichletCoeffs, Provenance, UnramifiedCount, WildChar, WildPlace,
};
