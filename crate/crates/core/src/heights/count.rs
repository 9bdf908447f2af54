use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mahler::{mahler_measure, mahler_quadratic_at_most};
use crate::arith::{divisors, gcd, is_square};
use crate::error::{Error, Result};

pub const QUADRATIC_CAP: u64 = 256;
pub const CUBIC_CAP: u64 = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallGeneratorCount {
    pub n: u32,
    pub x: u64,
    /// Irreducible primitive polynomials with positive leading coefficient.
    pub polynomials: u64,
    /// Algebraic numbers: n per polynomial.
    pub numbers: u64,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of algebraic numbers of degree n with height at most X. Candidate minimal
/// polynomials lie in |a_k| <= C(n,k) X, since each coefficient is bounded by the
/// binomial times the Mahler measure.
pub fn count_small_generators(n: u32, x: u64) -> Result<SmallGeneratorCount> {
    let cap = match n {
        2 => QUADRATIC_CAP,
        3 => CUBIC_CAP,
        _ => return Err(Error::Domain("only degrees 2 and 3 are enumerated".into())),
    };
    if x > cap {
        return Err(Error::Domain(format!("X = {x} exceeds the cap {cap} for degree {n}")));
    }
    let xi = x as i64;
    let mid = binomial(n as u64, 1) as i64 * xi;
    let polynomials: u64 = if n == 2 {
        (1..=xi)
            .into_par_iter()
            .map(|a| {
                let mut k = 0u64;
                for b in -mid..=mid {
                    let gab = gcd(a as u64, b.unsigned_abs());
                    for c in -xi..=xi {
                        if c == 0 || gcd(gab, c.unsigned_abs()) != 1 {
                            continue;
                        }
                        let disc = b * b - 4 * a * c;
                        if disc >= 0 && is_square(disc as u64) {
                            continue;
                        }
                        if mahler_quadratic_at_most(a, b, c, xi) {
                            k += 1;
                        }
                    }
                }
                k
            })
            .sum()
    } else {
        let tol = 1e-9;
        (1..=xi)
            .into_par_iter()
            .map(|a3| {
                let mut k = 0u64;
                for a0 in -xi..=xi {
                    if a0 == 0 {
                        continue;
                    }
                    let g0 = gcd(a3 as u64, a0.unsigned_abs());
                    let cands = rational_root_candidates(a0, a3);
                    for a1 in -mid..=mid {
                        let g1 = gcd(g0, a1.unsigned_abs());
                        for a2 in -mid..=mid {
                            if gcd(g1, a2.unsigned_abs()) != 1 {
                                continue;
                            }
                            let f = [a0, a1, a2, a3];
                            if cands.iter().any(|&(p, q)| root_vanishes(&f, p, q)) {
                                continue;
                            }
                            let m = mahler_measure(&f).expect("nonzero cubic");
                            if m.value <= x as f64 * (1.0 + tol) {
                                k += 1;
                            }
                        }
                    }
                }
                k
            })
            .sum()
    };
    Ok(SmallGeneratorCount { n, x, polynomials, numbers: polynomials * n as u64 })
}

/// Candidates +-p/q with p | a0, q | lead.
fn rational_root_candidates(a0: i64, lead: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in divisors(a0.unsigned_abs()) {
        for q in divisors(lead.unsigned_abs()) {
            if gcd(p, q) == 1 {
                out.push((p as i64, q as i64));
                out.push((-(p as i64), q as i64));
            }
        }
    }
    out
}

/// f(p/q) == 0, via q^deg f(p/q).
fn root_vanishes(f: &[i64], p: i64, q: i64) -> bool {
    let d = f.len() - 1;
    let (p, q) = (p as i128, q as i128);
    let mut acc = 0i128;
    for (i, &c) in f.iter().enumerate() {
        acc += c as i128 * p.pow(i as u32) * q.pow((d - i) as u32);
    }
    acc == 0
}

/// Least-squares slope of log N_H against log X.
pub fn growth_exponent(counts: &[SmallGeneratorCount]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        counts.iter().filter(|c| c.numbers > 0).map(|c| ((c.x as f64).ln(), (c.numbers as f64).ln())).collect();
    (pts.len() >= 2).then(|| crate::census::least_squares_slope(&pts).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_unity_only_at_height_one() {
        let c = count_small_generators(2, 1).unwrap();
        assert_eq!(c.numbers, 6);
        assert_eq!(count_small_generators(3, 1).unwrap().numbers, 0);
        assert!(count_small_generators(2, QUADRATIC_CAP + 1).is_err());
        assert!(count_small_generators(4, 1).is_err());
    }

    #[test]
    fn cubic_count_bruteforce() {
        // direct scan of a larger box for X = 2
        let mut k = 0;
        for a3 in 1..=2i64 {
            for a2 in -8..=8i64 {
                for a1 in -8..=8i64 {
                    for a0 in -2..=2i64 {
                        if a0 == 0 || gcd(gcd(a3 as u64, a2.unsigned_abs()), gcd(a1.unsigned_abs(), a0.unsigned_abs())) != 1 {
                            continue;
                        }
                        let f = [a0, a1, a2, a3];
                        if rational_root_candidates(a0, a3).iter().any(|&(p, q)| root_vanishes(&f, p, q)) {
                            continue;
                        }
                        if mahler_measure(&f).unwrap().value <= 2.0 + 1e-9 {
                            k += 3;
                        }
                    }
                }
            }
        }
        assert_eq!(count_small_generators(3, 2).unwrap().numbers, k);
    }

    #[test]
    fn quadratic_growth() {
        let counts: Vec<_> = [4, 8, 16, 32].iter().map(|&x| count_small_generators(2, x).unwrap()).collect();
        let s = growth_exponent(&counts).unwrap();
        assert!((s - 3.0).abs() < 0.3, "{s}");
        for w in counts.windows(2).skip(1) {
            let r = w[1].numbers as f64 / w[0].numbers as f64;
            assert!((r / 8.0 - 1.0).abs() < 0.3, "{r}");
        }
    }
}
