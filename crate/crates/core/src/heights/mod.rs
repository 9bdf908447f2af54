//! Weil heights of algebraic numbers, Mahler measures, small generators of quadratic
//! fields and the torsion bound predicted from small split primes.

mod count;
mod eta;
mod mahler;

use serde::{Deserialize, Serialize};

pub use count::{count_small_generators, growth_exponent, SmallGeneratorCount, CUBIC_CAP, QUADRATIC_CAP};
pub use eta::{
    eta_upper_quadratic, ev_bound_report, ev_scan, kronecker_symbol, silverman_scan, EtaEstimate,
    EvBoundReport, EvRange, SilvermanScan, SILVERMAN_CONSTANT,
};
pub use mahler::{
    degree, format_poly, height_by_places, is_kronecker, mahler_measure, mahler_quadratic,
    mahler_quadratic_at_most, roots, MahlerMeasure, Poly,
};

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicNumberRecord {
    pub minimal_polynomial: Poly,
    pub mahler: MahlerMeasure,
    /// Discriminant of the generated field when the degree is 2.
    pub field_discriminant: Option<i64>,
}

impl AlgebraicNumberRecord {
    /// Record for the roots of a primitive polynomial; irreducibility is the caller's.
    pub fn new(f: Poly) -> Result<Self> {
        let n = degree(&f).ok_or_else(|| Error::Domain("zero polynomial".into()))?;
        if f.iter().fold(0u64, |g, &c| gcd(g, c.unsigned_abs())) != 1 {
            return Err(Error::Domain("polynomial is not primitive".into()));
        }
        let mahler = mahler_measure(&f)?;
        let field_discriminant = if n == 2 { Some(squarefree_discriminant(f[1] * f[1] - 4 * f[2] * f[0])?) } else { None };
        Ok(AlgebraicNumberRecord { minimal_polynomial: f[..=n].to_vec(), mahler, field_discriminant })
    }
}

/// Fundamental discriminant of Q(sqrt disc).
fn squarefree_discriminant(disc: i64) -> Result<i64> {
    if disc == 0 {
        return Err(Error::Domain("repeated root".into()));
    }
    let mut core = 1i64;
    for (p, e) in factorize(disc.unsigned_abs())?.factors {
        if e % 2 == 1 {
            core *= p as i64;
        }
    }
    core *= disc.signum();
    if core == 1 {
        return Err(Error::Domain("roots are rational".into()));
    }
    Ok(if core.rem_euclid(4) == 1 { core } else { 4 * core })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records() {
        let r = AlgebraicNumberRecord::new(vec![-1, -1, 1]).unwrap();
        assert_eq!(r.field_discriminant, Some(5));
        let r = AlgebraicNumberRecord::new(vec![3, 0, 1]).unwrap();
        assert_eq!(r.field_discriminant, Some(-3));
        assert_eq!(AlgebraicNumberRecord::new(vec![-2, 0, 1]).unwrap().field_discriminant, Some(8));
        assert!(AlgebraicNumberRecord::new(vec![2, 0, 2]).is_err());
        assert!(AlgebraicNumberRecord::new(vec![-1, 0, 1]).is_err());
    }
}
