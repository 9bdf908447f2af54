//! Exact arithmetic in the group ring Z[C_n], read in Z[zeta_n] through the cyclotomic
//! polynomial.

use crate::arith::divisors;

/// sum_j v[j] zeta^j with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElem(pub Vec<i64>);

impl GroupRingElem {
    pub fn zero(n: usize) -> Self {
        GroupRingElem(vec![0; n])
    }

    pub fn monomial(n: usize, j: u32, c: i64) -> Self {
        let mut v = vec![0; n];
        v[j as usize % n] = c;
        GroupRingElem(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a += b;
        }
    }

    pub fn add_scaled(&mut self, o: &Self, s: i64) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a += b * s;
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.0.len();
        let mut out = vec![0i64; n];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                if b != 0 {
                    out[(i + j) % n] += a * b;
                }
            }
        }
        GroupRingElem(out)
    }

    /// Multiply by zeta^t.
    pub fn rotate(&self, t: u32) -> Self {
        let n = self.0.len();
        let mut out = vec![0i64; n];
        for (i, &a) in self.0.iter().enumerate() {
            out[(i + t as usize) % n] = a;
        }
        GroupRingElem(out)
    }

    pub fn scale(&self, s: i64) -> Self {
        GroupRingElem(self.0.iter().map(|&a| a * s).collect())
    }

    /// The image in Z[zeta_n] if it is a rational integer.
    pub fn as_integer(&self, phi_n: &[i64]) -> Option<i64> {
        let r = reduce_mod(&self.0, phi_n);
        if r.iter().skip(1).all(|&c| c == 0) {
            Some(r.first().copied().unwrap_or(0))
        } else {
            None
        }
    }

    /// Complex value with zeta = exp(2 pi i / n).
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let n = self.0.len() as f64;
        self.0
            .iter()
            .enumerate()
            .map(|(j, &c)| num_complex::Complex64::from_polar(c as f64, std::f64::consts::TAU * j as f64 / n))
            .sum()
    }
}

/// Coefficients (low degree first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    // x^n - 1 divided by Phi_d for the proper divisors d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        num = exact_div(&num, &phi_d);
    }
    num
}

fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dn = den.len() - 1;
    let qn = num.len() - 1 - dn;
    let mut q = vec![0i64; qn + 1];
    for i in (0..=qn).rev() {
        let c = rem[i + dn] / den[dn];
        q[i] = c;
        for (k, &d) in den.iter().enumerate() {
            rem[i + k] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

/// Remainder of a polynomial modulo a monic polynomial.
pub fn reduce_mod(v: &[i64], monic: &[i64]) -> Vec<i64> {
    let d = monic.len() - 1;
    let mut r = v.to_vec();
    if r.len() <= d {
        r.resize(d, 0);
        return r;
    }
    for i in (d..r.len()).rev() {
        let c = r[i];
        if c != 0 {
            for (k, &m) in monic.iter().enumerate() {
                r[i - d + k] -= c * m;
            }
        }
    }
    r.truncate(d);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn ramanujan_sums_are_integers() {
        for n in 2..=12u64 {
            let phi = cyclotomic_polynomial(n);
            for t in 0..n {
                let mut e = GroupRingElem::zero(n as usize);
                for u in 1..n {
                    if crate::arith::gcd(u, n) == 1 {
                        e.0[((u * t) % n) as usize] += 1;
                    }
                }
                assert_eq!(e.as_integer(&phi), Some(crate::arith::ramanujan_sum(n, t)));
            }
        }
    }
}
