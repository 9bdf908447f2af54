use serde::{Deserialize, Serialize};

use super::primes::{gcd, is_prime, mul_mod};
use crate::error::{Error, Result};

/// A positive integer with its prime factorization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn product(&self) -> u64 {
        self.factors.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }
}

pub fn factorize(value: u64) -> Result<Factorization> {
    if value == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    if value > i64::MAX as u64 {
        return Err(Error::Range(format!("{value} exceeds 2^63-1")));
    }
    let mut primes = Vec::new();
    let mut m = value;
    for p in [2u64, 3, 5] {
        while m % p == 0 {
            primes.push(p);
            m /= p;
        }
    }
    // wheel trial division up to a small bound
    let mut d = 7u64;
    let incs = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut i = 0;
    while d <= 10_000 && d * d <= m {
        while m % d == 0 {
            primes.push(d);
            m /= d;
        }
        d += incs[i];
        i = (i + 1) % 8;
    }
    if m > 1 {
        split_large(m, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value, factors })
}

fn split_large(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let mut c = 1u64;
    loop {
        if let Some(d) = brent(m, c) {
            split_large(d, out);
            split_large(m / d, out);
            return;
        }
        c += 1;
    }
}

/// Pollard-Brent rho; returns a nontrivial factor or None for this constant.
fn brent(n: u64, c: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let m = 128;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}
