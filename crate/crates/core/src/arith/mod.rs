//! Integer and multiplicative-structure substrate.

mod character;
mod factor;
mod primes;
mod units;

pub use character::{
    characters_of_order_dividing, local_conductor_exponent, CharValue, CharacterRecord,
    DirichletCharacter,
};
pub use factor::{factorize, Factorization};
pub use primes::{
    divisors, divisors_from, euler_phi, ext_gcd, gcd, inv_mod, iroot, is_prime, is_square, isqrt,
    lcm, moebius, mul_mod, multiplicative_order, pow_mod, primes_up_to, primitive_root, primitive_root_given, valuation,
    SpfTable,
};
pub use units::{ComponentKind, ResidueUnitGroup, UnitComponent};

/// Ramanujan sum c_n(t) = sum over d | gcd(n, t) of mu(n/d) d.
pub fn ramanujan_sum(n: u64, t: u64) -> i64 {
    let g = gcd(n, t % n);
    let g = if g == 0 { n } else { g };
    divisors(g).into_iter().map(|d| moebius(n / d) * d as i64).sum()
}
