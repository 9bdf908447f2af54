//! Primes, modular exponentiation and small multiplicative functions.

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Extended gcd on signed 128-bit integers: returns (g, x, y) with ax + by = g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Modular inverse of `a` mod `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to `limit` inclusive (sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table, used for fast factorization of many small integers.
#[derive(Debug, Clone)]
pub struct SpfTable {
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn new(limit: u64) -> Self {
        let n = limit.max(1) as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        SpfTable { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn smallest_factor(&self, m: u64) -> u64 {
        self.spf[m as usize] as u64
    }

    /// Prime factorization as (prime, exponent), increasing primes.
    pub fn factor(&self, mut m: u64) -> Vec<(u64, u32)> {
        debug_assert!(m as usize <= self.spf.len() - 1);
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    pub fn is_prime(&self, m: u64) -> bool {
        m >= 2 && self.spf[m as usize] as u64 == m
    }
}

pub fn euler_phi(n: u64) -> u64 {
    let f = super::factor::factorize(n).expect("phi of zero");
    f.factors
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub fn moebius(n: u64) -> i64 {
    let f = super::factor::factorize(n).expect("moebius of zero");
    if f.factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Divisors of n in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let f = super::factor::factorize(n).expect("divisors of zero");
    divisors_from(&f.factors)
}

pub fn divisors_from(factors: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in factors {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn valuation(mut m: u64, p: u64) -> u32 {
    let mut v = 0;
    while m != 0 && m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// Generator of (Z/p^k)^x for every k >= 1: the least primitive root g mod p with
/// g^(p-1) != 1 mod p^2. Only meaningful for odd p.
pub fn primitive_root(p: u64) -> u64 {
    debug_assert!(p > 2 && is_prime(p));
    let fac = super::factor::factorize(p - 1).expect("p-1 > 0");
    primitive_root_given(p, &fac.factors)
}

/// `primitive_root` with the factorization of p - 1 supplied.
pub fn primitive_root_given(p: u64, factors_of_p_minus_1: &[(u64, u32)]) -> u64 {
    let p2 = p as u128 * p as u128;
    'cand: for g in 2..p {
        for &(q, _) in factors_of_p_minus_1 {
            if pow_mod(g, (p - 1) / q, p) == 1 {
                continue 'cand;
            }
        }
        if p2 <= u64::MAX as u128 && pow_mod(g, p - 1, p2 as u64) == 1 {
            continue;
        }
        return g;
    }
    unreachable!("every odd prime has a primitive root")
}

/// Multiplicative order of `a` modulo `m`.
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    let phi = euler_phi(m);
    let fac = super::factor::factorize(phi).expect("positive");
    let mut ord = phi;
    for &(q, _) in &fac.factors {
        while ord % q == 0 && pow_mod(a, ord / q, m) == 1 {
            ord /= q;
        }
    }
    ord
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |v| v <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Floor of n^(1/k).
pub fn iroot(n: u64, k: u32) -> u64 {
    if k == 1 || n <= 1 {
        return n;
    }
    let mut x = (n as f64).powf(1.0 / k as f64).round() as u64;
    let fits = |x: u64| (x as u128).checked_pow(k).map_or(false, |v| v <= n as u128);
    while x > 0 && !fits(x) {
        x -= 1;
    }
    while fits(x + 1) {
        x += 1;
    }
    x
}
