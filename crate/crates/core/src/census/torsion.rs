use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classgroup::{class_number_table, torsion_with_class_number};
use crate::error::{Error, Result};
use crate::family::fundamental_discriminants;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicRange {
    /// |D| in [lo, hi)
    pub lo: u64,
    pub hi: u64,
    pub fields: u64,
    pub exceptional: u64,
    pub proportion: f64,
    pub max_torsion: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionScan {
    pub l: u64,
    pub x: u64,
    pub theta: f64,
    pub ranges: Vec<DyadicRange>,
}

impl TorsionScan {
    /// Proportions of the top k ranges never increase.
    pub fn top_non_increasing(&self, k: usize) -> bool {
        let r = &self.ranges[self.ranges.len().saturating_sub(k)..];
        r.windows(2).all(|w| w[1].proportion <= w[0].proportion)
    }
}

/// Imaginary quadratic fields with |D| <= X and #Cl[l] > |D|^theta, per dyadic range.
pub fn torsion_scan(l: u64, x: u64, theta: f64) -> Result<TorsionScan> {
    if l < 2 {
        return Err(Error::Domain("l must be at least 2".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain("theta must lie in (0, 1)".into()));
    }
    let table = class_number_table(x);
    let discs: Vec<i64> = fundamental_discriminants(x).into_iter().filter(|&d| d < 0).collect();
    let torsion: Vec<(u64, u64)> = discs
        .par_iter()
        .map(|&d| {
            let m = d.unsigned_abs();
            (m, torsion_with_class_number(d, table[m as usize] as u64, l))
        })
        .collect();
    let mut ranges = Vec::new();
    let mut k = 0;
    while (1u64 << k) <= x {
        let (lo, hi) = (1u64 << k, 1u64 << (k + 1));
        let mut r = DyadicRange { lo, hi, fields: 0, exceptional: 0, proportion: 0.0, max_torsion: 0 };
        for &(m, t) in torsion.iter().filter(|&&(m, _)| m >= lo && m < hi) {
            r.fields += 1;
            r.max_torsion = r.max_torsion.max(t);
            if t as f64 > (m as f64).powf(theta) {
                r.exceptional += 1;
            }
        }
        if r.fields > 0 {
            r.proportion = r.exceptional as f64 / r.fields as f64;
            ranges.push(r);
        }
        k += 1;
    }
    Ok(TorsionScan { l, x, theta, ranges })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_scan_thins_out() {
        let s = torsion_scan(2, 100_000, 0.49).unwrap();
        let last = s.ranges.last().unwrap();
        assert!(last.proportion < 0.01);
        // 2^(omega-1) stays below |D|^0.49 once |D| is moderately large
        assert!(s.ranges.iter().filter(|r| r.lo >= 256).all(|r| r.exceptional == 0));
        assert!(last.max_torsion >= 16);
    }

    #[test]
    fn above_trivial_bound_nothing_is_exceptional() {
        let s = torsion_scan(3, 50_000, 0.51).unwrap();
        assert!(s.ranges.iter().filter(|r| r.lo >= 64).all(|r| r.exceptional == 0));
        assert!(torsion_scan(1, 10, 0.3).is_err());
        assert!(torsion_scan(3, 10, 1.5).is_err());
    }
}
