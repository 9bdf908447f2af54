use rayon::prelude::*;

use super::descriptor::CyclicFieldDescriptor;
use crate::arith::{primitive_root, ComponentKind, SpfTable};

/// Frobenius lookup for a fixed list of small primes across many fields.
///
/// For each tame prime r = 1 mod n up to the conductor bound the table stores
/// ind_{g_r}(p) mod n for every listed p, with g_r the generator used by the enumerator.
pub struct SplitTable {
    n: u32,
    primes: Vec<u64>,
    row_of: Vec<u32>,
    rows: Vec<u8>,
}

const NO_ROW: u32 = u32::MAX;

impl SplitTable {
    pub fn new(n: u32, conductor_bound: u64, primes: &[u64]) -> Self {
        assert!(n <= 255, "degree too large for byte table");
        let spf = SpfTable::new(conductor_bound.max(2));
        let tame: Vec<u64> = (3..=conductor_bound)
            .filter(|&r| r % n as u64 == 1 && spf.is_prime(r))
            .collect();
        let width = primes.len();
        let rows: Vec<Vec<u8>> = tame
            .par_iter()
            .map(|&r| {
                let g = crate::arith::primitive_root_given(r, &spf.factor(r - 1));
                debug_assert_eq!(g, primitive_root(r));
                let o = (r - 1) / n as u64;
                let beta = pow_small(g, o, r);
                let mut powers = Vec::with_capacity(n as usize);
                let mut cur = 1u64;
                for _ in 0..n {
                    powers.push(cur);
                    cur = cur * beta % r;
                }
                primes
                    .iter()
                    .map(|&p| {
                        if p % r == 0 {
                            return u8::MAX;
                        }
                        let h = pow_small(p % r, o, r);
                        powers.iter().position(|&x| x == h).expect("unit") as u8
                    })
                    .collect()
            })
            .collect();
        let mut row_of = vec![NO_ROW; conductor_bound as usize + 1];
        for (i, &r) in tame.iter().enumerate() {
            row_of[r as usize] = i as u32;
        }
        let mut flat = Vec::with_capacity(rows.len() * width);
        for r in rows {
            flat.extend_from_slice(&r);
        }
        SplitTable { n, primes: primes.to_vec(), row_of, rows: flat }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// chi(p_idx) as an exponent, or None if p_idx divides the conductor.
    pub fn frobenius(&self, d: &CyclicFieldDescriptor, idx: usize) -> Option<u32> {
        let p = self.primes[idx];
        if d.conductor % p == 0 {
            return None;
        }
        let chi = &d.character;
        let n = self.n as u64;
        let width = self.primes.len();
        let mut acc = 0u64;
        for c in &chi.group().components {
            let e = chi.component_exponents(c);
            let row = if c.exponent == 1 && matches!(c.kind, ComponentKind::Cyclic { .. }) {
                self.row_of.get(c.prime as usize).copied().unwrap_or(NO_ROW)
            } else {
                NO_ROW
            };
            if row != NO_ROW {
                let l = self.rows[row as usize * width + idx] as u64;
                acc += l * e[0] as u64;
            } else {
                acc += chi.eval_component(c, p % c.modulus) as u64;
            }
        }
        Some((acc % n) as u32)
    }

    pub fn splits(&self, d: &CyclicFieldDescriptor, idx: usize) -> bool {
        self.frobenius(d, idx) == Some(0)
    }

    /// Indices of the listed primes that split completely in d.
    pub fn split_indices(&self, d: &CyclicFieldDescriptor, out: &mut Vec<u16>) {
        out.clear();
        for i in 0..self.primes.len() {
            if self.splits(d, i) {
                out.push(i as u16);
            }
        }
    }
}

#[inline]
fn pow_small(mut b: u64, mut e: u64, m: u64) -> u64 {
    debug_assert!(m < 1 << 32);
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}
