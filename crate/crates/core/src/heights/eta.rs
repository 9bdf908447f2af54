use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mahler::{format_poly, Poly};
use crate::arith::{divisors_from, factorize, isqrt, pow_mod, primes_up_to};
use crate::classgroup::{class_number_table, is_fundamental_discriminant, torsion_count, torsion_with_class_number};
use crate::error::{Error, Result};
use crate::family::fundamental_discriminants;

/// Frozen lower constant for eta_upper / |D|^{1/2}; every quadratic generator of
/// discriminant D k^2 has measure at least sqrt(|D|)/2, so any value below 1/2 is safe.
pub const SILVERMAN_CONSTANT: f64 = 0.45;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaEstimate {
    pub d: i64,
    pub eta_upper: f64,
    /// Minimal polynomial of the witness, constant term first.
    pub witness: Poly,
    pub witness_text: String,
    /// |D|^{1/2}
    pub silverman_lower: f64,
    pub ratio: f64,
}

/// Smallest Mahler measure over a x^2 + b x + c with b^2 - 4ac = D k^2. For fixed (b, k)
/// the best split of ac = (b^2 - D k^2)/4 is the divisor pair closest to the square root,
/// and the measure is at least both sqrt|ac| and (|b| + k sqrt|D|)/2 (real case) or
/// sqrt(ac) (imaginary case), which bounds the scan.
pub fn eta_upper_quadratic(d: i64) -> Result<EtaEstimate> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a fundamental discriminant")));
    }
    let sd = (d.unsigned_abs() as f64).sqrt();
    let mut best = f64::INFINITY;
    let mut witness = (0i64, 0i64, 0i64);
    let mut k = 1i64;
    while (k as f64) * sd / 2.0 < best {
        let disc = d as i128 * (k * k) as i128;
        let sdisc = (disc.unsigned_abs() as f64).sqrt();
        let mut b = disc.rem_euclid(2) as i64;
        loop {
            let lower = if d < 0 {
                ((b as f64).powi(2) + sdisc * sdisc).sqrt() / 2.0
            } else {
                (b as f64 + sdisc) / 2.0
            };
            if lower >= best {
                break;
            }
            let n = (b as i128 * b as i128 - disc) / 4;
            let m = n.unsigned_abs() as u64;
            let r = isqrt(m);
            let f = factorize(m).expect("nonzero");
            let a = divisors_from(&f.factors).into_iter().filter(|&x| x <= r).max().unwrap_or(1);
            let c = (m / a) as f64;
            let value = if d < 0 { c } else { c.max(lower) };
            if value < best {
                best = value;
                let c = if n < 0 { -((m / a) as i64) } else { (m / a) as i64 };
                witness = (a as i64, -b, c);
            }
            b += 2;
        }
        k += 1;
    }
    let (a, b, c) = witness;
    let poly = vec![c, b, a];
    Ok(EtaEstimate {
        d,
        eta_upper: best,
        witness_text: format_poly(&poly),
        witness: poly,
        silverman_lower: sd,
        ratio: best / sd,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SilvermanScan {
    pub x: u64,
    pub fields: u64,
    pub min_ratio: f64,
    pub argmin: i64,
    pub constant: f64,
    pub pass: bool,
}

/// min eta_upper / |D|^{1/2} over fundamental discriminants with |D| <= x.
pub fn silverman_scan(x: u64) -> Result<SilvermanScan> {
    let discs = fundamental_discriminants(x);
    let ests: Vec<EtaEstimate> = discs.par_iter().map(|&d| eta_upper_quadratic(d)).collect::<Result<_>>()?;
    let worst = ests
        .iter()
        .min_by(|p, q| p.ratio.total_cmp(&q.ratio))
        .ok_or_else(|| Error::Domain("no discriminants in range".into()))?;
    Ok(SilvermanScan {
        x,
        fields: ests.len() as u64,
        min_ratio: worst.ratio,
        argmin: worst.d,
        constant: SILVERMAN_CONSTANT,
        pass: worst.ratio >= SILVERMAN_CONSTANT,
    })
}

/// (D/p) for a prime p.
pub fn kronecker_symbol(d: i64, p: u64) -> i32 {
    if p == 2 {
        return match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let r = d.rem_euclid(p as i64) as u64;
    if r == 0 {
        0
    } else if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvBoundReport {
    pub d: i64,
    pub l: u64,
    pub delta: f64,
    pub cutoff: f64,
    /// Split primes up to |D|^delta.
    pub split_primes: u64,
    /// |D|^{1/2} / M, absent when M = 0.
    pub predicted: Option<f64>,
    pub vacuous: bool,
    pub actual: u64,
    pub ratio: Option<f64>,
}

fn check_delta(l: u64, delta: f64) -> Result<()> {
    if l < 2 {
        return Err(Error::Domain("l must be at least 2".into()));
    }
    if !(delta > 0.0 && delta < 0.5 / l as f64) {
        return Err(Error::Domain(format!("delta must lie in (0, 1/(2l)) = (0, {})", 0.5 / l as f64)));
    }
    Ok(())
}

fn report(d: i64, l: u64, delta: f64, actual: u64, primes: &[u64]) -> EvBoundReport {
    let m = d.unsigned_abs() as f64;
    let cutoff = m.powf(delta);
    let split = primes.iter().take_while(|&&p| p as f64 <= cutoff).filter(|&&p| kronecker_symbol(d, p) == 1).count()
        as u64;
    let predicted = (split > 0).then(|| m.sqrt() / split as f64);
    EvBoundReport {
        d,
        l,
        delta,
        cutoff,
        split_primes: split,
        predicted,
        vacuous: split == 0,
        actual,
        ratio: predicted.map(|p| actual as f64 / p),
    }
}

pub fn ev_bound_report(d: i64, l: u64, delta: f64) -> Result<EvBoundReport> {
    check_delta(l, delta)?;
    let actual = torsion_count(d, l)?;
    let primes = primes_up_to((d.unsigned_abs() as f64).powf(delta) as u64 + 1);
    Ok(report(d, l, delta, actual, &primes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvRange {
    pub lo: u64,
    pub hi: u64,
    pub fields: u64,
    pub vacuous: u64,
    /// Fields with #Cl[l] above the predicted bound.
    pub exceeding: u64,
    pub fraction: f64,
}

/// ev_bound_report over imaginary quadratic fields with |D| <= x, per dyadic range.
pub fn ev_scan(x: u64, l: u64, delta: f64) -> Result<Vec<EvRange>> {
    check_delta(l, delta)?;
    let table = class_number_table(x);
    let primes = primes_up_to((x as f64).powf(delta) as u64 + 1);
    let discs: Vec<i64> = fundamental_discriminants(x).into_iter().filter(|&d| d < 0).collect();
    let reports: Vec<EvBoundReport> = discs
        .par_iter()
        .map(|&d| {
            let t = torsion_with_class_number(d, table[d.unsigned_abs() as usize] as u64, l);
            report(d, l, delta, t, &primes)
        })
        .collect();
    let mut out = Vec::new();
    let mut k = 0;
    while (1u64 << k) <= x {
        let (lo, hi) = (1u64 << k, 1u64 << (k + 1));
        let mut r = EvRange { lo, hi, fields: 0, vacuous: 0, exceeding: 0, fraction: 0.0 };
        for rep in reports.iter().filter(|r| (lo..hi).contains(&r.d.unsigned_abs())) {
            r.fields += 1;
            match rep.predicted {
                None => r.vacuous += 1,
                Some(p) if rep.actual as f64 > p => r.exceeding += 1,
                _ => {}
            }
        }
        if r.fields > 0 {
            r.fraction = r.exceeding as f64 / r.fields as f64;
            out.push(r);
        }
        k += 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let e = eta_upper_quadratic(8).unwrap();
        assert_eq!((e.eta_upper, e.witness_text.as_str()), (2.0, "x^2-2"));
        let e = eta_upper_quadratic(5).unwrap();
        assert!((e.eta_upper - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(e.witness_text, "x^2-x-1");
        let e = eta_upper_quadratic(-4).unwrap();
        assert_eq!((e.eta_upper, e.witness_text.as_str()), (1.0, "x^2+1"));
        assert!(eta_upper_quadratic(12 * 4).is_err());
    }

    /// Exhaustive box max-norm <= 4 sqrt|D| for every small discriminant.
    #[test]
    fn matches_box_search() {
        for d in fundamental_discriminants(300) {
            let e = eta_upper_quadratic(d).unwrap();
            let r = (4.0 * (d.unsigned_abs() as f64).sqrt()) as i64;
            let mut best = f64::INFINITY;
            for a in 1..=r {
                for b in -r..=r {
                    for c in -r..=r {
                        let disc = b * b - 4 * a * c;
                        if c == 0 || disc == 0 || disc % d != 0 {
                            continue;
                        }
                        let q = disc / d;
                        if q <= 0 || !crate::arith::is_square(q as u64) {
                            continue;
                        }
                        best = best.min(super::super::mahler::mahler_quadratic(a, b, c));
                    }
                }
            }
            assert!((best - e.eta_upper).abs() < 1e-9, "D={d}: {best} vs {}", e.eta_upper);
            assert!(e.ratio >= 0.5 - 1e-12);
        }
    }

    #[test]
    fn silverman_small() {
        let s = silverman_scan(5000).unwrap();
        assert!(s.pass && s.min_ratio >= 0.5 - 1e-12);
    }

    #[test]
    fn ev_examples() {
        let r = ev_bound_report(-23, 3, 0.15).unwrap();
        assert_eq!(r.actual, 3);
        // 2 splits in Q(sqrt -23), but 23^0.15 < 2
        assert!(r.vacuous);
        assert!(ev_bound_report(-23, 3, 0.3).is_err());
        let r = ev_bound_report(-23, 1 + 1, 0.24).unwrap();
        assert_eq!(r.split_primes, 1);
        assert_eq!(kronecker_symbol(-23, 2), 1);
        assert_eq!(kronecker_symbol(-23, 3), 1);
        assert_eq!(kronecker_symbol(-23, 5), -1);
        let rs = ev_scan(20_000, 3, 1.0 / 8.0).unwrap();
        assert!(rs.iter().all(|r| r.fraction <= 1.0));
    }
}
