//! The finite group U_S(n) and the tame Kummer data attached to its elements.

use serde::{Deserialize, Serialize};

use super::cyclo::{cyclotomic_polynomial, GroupRingElem};
use crate::arith::{
    divisors, euler_phi, gcd, inv_mod, moebius, mul_mod, pow_mod, primitive_root, ramanujan_sum,
};
use crate::error::{Error, Result};

/// x = (-1)^sign * prod q^k_q, a representative of U_S(n) in Q^x / Q^{x n}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UsElement {
    pub n: u32,
    pub sign: u32,
    /// (q, k_q) with q in S and 0 <= k_q < n, in the order of S.
    pub exponents: Vec<(u64, u32)>,
}

impl UsElement {
    pub fn is_one(&self) -> bool {
        self.sign == 0 && self.exponents.iter().all(|&(_, k)| k == 0)
    }

    /// Residue mod m, or None if a prime of the support divides m.
    pub fn residue(&self, m: u64) -> Option<u64> {
        self.residue_skipping(m, None)
    }

    /// Residue mod m of x with the q-part removed.
    pub fn residue_skipping(&self, m: u64, skip: Option<u64>) -> Option<u64> {
        if m == 1 {
            return Some(0);
        }
        let mut acc = 1 % m;
        for &(q, k) in &self.exponents {
            if Some(q) == skip || k == 0 {
                continue;
            }
            if m % q == 0 {
                return None;
            }
            acc = mul_mod(acc, pow_mod(q % m, k as u64, m), m);
        }
        if self.sign == 1 {
            acc = (m - acc) % m;
        }
        Some(acc)
    }

    /// The integer value, when it fits.
    pub fn value(&self) -> Option<i128> {
        let mut acc: i128 = if self.sign == 1 { -1 } else { 1 };
        for &(q, k) in &self.exponents {
            acc = acc.checked_mul((q as i128).checked_pow(k)?)?;
        }
        Some(acc)
    }

    /// d_v(x) at a prime p = 1 mod n not dividing x.
    pub fn power_residue_degree(&self, p: u64) -> Result<u32> {
        let r = self
            .residue(p)
            .ok_or_else(|| Error::Domain(format!("{p} divides the support of x")))?;
        power_residue_degree_of_residue(r, p, self.n)
    }
}

impl std::fmt::Display for UsElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.sign == 1 {
            f.write_str("-")?;
        }
        let parts: Vec<String> = self
            .exponents
            .iter()
            .filter(|&&(_, k)| k > 0)
            .map(|&(q, k)| if k == 1 { q.to_string() } else { format!("{q}^{k}") })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// Representatives of the subgroup of Q^x / Q^{x n} generated by -1 and the primes of S.
/// For odd n, -1 is an n-th power and no sign is carried.
pub fn us_group(n: u32, s: &[u64]) -> Result<Vec<UsElement>> {
    if n < 2 {
        return Err(Error::Domain("degree must be at least 2".into()));
    }
    let mut primes = s.to_vec();
    primes.sort_unstable();
    primes.dedup();
    for p in crate::family::wild_primes(n) {
        if !primes.contains(&p) {
            return Err(Error::Domain(format!("S must contain {p}, which divides {n}")));
        }
    }
    if primes.iter().any(|&p| !crate::arith::is_prime(p)) {
        return Err(Error::Domain("S must consist of primes".into()));
    }
    let signs = if n % 2 == 0 { 2 } else { 1 };
    let total = (n as usize).pow(primes.len() as u32) * signs;
    let mut out = Vec::with_capacity(total);
    for idx in 0..total {
        let mut t = idx;
        let sign = (t % signs) as u32;
        t /= signs;
        let mut exponents = Vec::with_capacity(primes.len());
        for &q in &primes {
            exponents.push((q, (t % n as usize) as u32));
            t /= n as usize;
        }
        out.push(UsElement { n, sign, exponents });
    }
    Ok(out)
}

/// Largest d | n such that x is a d-th power mod p; requires p = 1 mod n and p not dividing x.
pub fn power_residue_degree(x: i128, p: u64, n: u32) -> Result<u32> {
    let r = x.rem_euclid(p as i128) as u64;
    power_residue_degree_of_residue(r, p, n)
}

fn power_residue_degree_of_residue(r: u64, p: u64, n: u32) -> Result<u32> {
    if p < 2 || (p - 1) % n as u64 != 0 {
        return Err(Error::Domain(format!("{p} is not 1 mod {n}")));
    }
    if r % p == 0 {
        return Err(Error::Domain(format!("{p} divides x")));
    }
    let mut best = 1;
    for d in divisors(n as u64) {
        if pow_mod(r, (p - 1) / d, p) == 1 {
            best = best.max(d);
        }
    }
    Ok(best as u32)
}

/// Tame coefficient sum over d | d_v of mu(n/d) d.
pub fn tame_coefficient(n: u32, dv: u32) -> i64 {
    divisors(dv as u64).into_iter().map(|d| moebius(n as u64 / d) * d as i64).sum()
}

/// Local factor at a tame prime outside S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TameFactor {
    /// p is not 1 mod n: every member is unramified at p and the factor is 1.
    One,
    /// 1 + coefficient * p^{-exponent s}.
    Linear { coefficient: i64, exponent: u32 },
}

pub fn tame_local_factor(x: &UsElement, p: u64, n: u32) -> Result<TameFactor> {
    if n as u64 % p == 0 {
        return Err(Error::Domain(format!("{p} divides {n}")));
    }
    if (p - 1) % n as u64 != 0 {
        return Ok(TameFactor::One);
    }
    let dv = x.power_residue_degree(p)?;
    Ok(TameFactor::Linear { coefficient: tame_coefficient(n, dv), exponent: n - 1 })
}

/// Per-prime Kummer record of an element of U_S(n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerPrimeRecord {
    pub p: u64,
    pub dv: u32,
    pub coefficient: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerLocalDatum {
    pub x: UsElement,
    pub records: Vec<KummerPrimeRecord>,
}

impl KummerLocalDatum {
    /// Records at the given primes that are 1 mod n and prime to x.
    pub fn new(x: &UsElement, primes: &[u64]) -> Self {
        let n = x.n;
        let records = primes
            .iter()
            .filter(|&&p| (p - 1) % n as u64 == 0)
            .filter_map(|&p| {
                let dv = x.power_residue_degree(p).ok()?;
                Some(KummerPrimeRecord { p, dv, coefficient: tame_coefficient(n, dv) })
            })
            .collect();
        KummerLocalDatum { x: x.clone(), records }
    }

    /// Checks c_p = phi(n) mu(n_v) / phi(n_v) with n_v = n / d_v on every record.
    pub fn closed_form_holds(&self) -> bool {
        let n = self.x.n as u64;
        self.records.iter().all(|r| {
            let nv = n / r.dv as u64;
            r.coefficient * euler_phi(nv) as i64 == euler_phi(n) as i64 * moebius(nv)
        })
    }
}

/// Outcome of the Frobenius / character-sum verification at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusCheck {
    pub n: u32,
    pub p: u64,
    pub x: String,
    /// n_v: order of the Frobenius of x.
    pub order: u32,
    /// Frobenius exponent a_w for each embedding w of mu_n into F_p^x.
    pub exponents: Vec<u32>,
    /// Each element of Z/n of order n_v is hit phi(n)/phi(n_v) times.
    pub orbit_count_holds: bool,
    /// Sum over w of chi(sigma_w) equals the tame coefficient.
    pub character_sum_holds: bool,
    pub tame_coefficient: i64,
}

impl FrobeniusCheck {
    pub fn holds(&self) -> bool {
        self.orbit_count_holds && self.character_sum_holds
    }

    pub fn failure(&self) -> Option<&'static str> {
        if !self.orbit_count_holds {
            Some("Frobenius orbit count")
        } else if !self.character_sum_holds {
            Some("character sum")
        } else {
            None
        }
    }
}

/// Frobenius data that depends only on the exponent a_1 in Z/n.
#[derive(Debug, Clone)]
struct ExponentClass {
    order: u32,
    exponents: Vec<u32>,
    orbit_count_holds: bool,
    character_sum_holds: bool,
    tame_coefficient: i64,
}

impl ExponentClass {
    fn new(n: u32, a1: u32, units: &[u32], phi_n: &[i64]) -> Self {
        // under the embedding zeta -> omega^b the exponent is a_1 / b
        let exponents: Vec<u32> = units
            .iter()
            .map(|&b| {
                let binv = inv_mod(b as u64, n as u64).expect("unit") as u32;
                ((a1 as u64 * binv as u64) % n as u64) as u32
            })
            .collect();
        let order = n / gcd(a1 as u64, n as u64) as u32;
        let phi = euler_phi(n as u64);
        let expect_each = phi / euler_phi(order as u64);
        let mut hits = vec![0u64; n as usize];
        for &a in &exponents {
            hits[a as usize] += 1;
        }
        let orbit_count_holds = (0..n).all(|t| {
            let ord_t = n / gcd(t as u64, n as u64) as u32;
            let want = if ord_t == order { expect_each } else { 0 };
            hits[t as usize] == want
        });
        // chi(sigma) = zeta^a has full order on the subgroup generated by a_1
        let mut sum = GroupRingElem::zero(n as usize);
        for &a in &exponents {
            sum.0[a as usize] += 1;
        }
        let rhs = tame_coefficient(n, n / order);
        let character_sum_holds =
            sum.as_integer(phi_n) == Some(rhs) && ramanujan_sum(n as u64, a1 as u64) == rhs;
        ExponentClass { order, exponents, orbit_count_holds, character_sum_holds, tame_coefficient: rhs }
    }
}

/// Precomputed data for repeated checks at a prime.
pub struct FrobeniusContext {
    n: u32,
    p: u64,
    /// omega^a for a in 0..n, omega a primitive n-th root of 1 mod p.
    roots: Vec<u64>,
    classes: Vec<ExponentClass>,
}

impl FrobeniusContext {
    pub fn new(n: u32, p: u64) -> Result<Self> {
        if !crate::arith::is_prime(p) || (p - 1) % n as u64 != 0 {
            return Err(Error::Domain(format!("{p} is not a prime 1 mod {n}")));
        }
        let g = primitive_root(p);
        let omega = pow_mod(g, (p - 1) / n as u64, p);
        let units: Vec<u32> = (1..n).filter(|&b| gcd(b as u64, n as u64) == 1).collect();
        let phi_n = cyclotomic_polynomial(n as u64);
        let mut roots = Vec::with_capacity(n as usize);
        let mut cur = 1u64;
        for _ in 0..n {
            roots.push(cur);
            cur = mul_mod(cur, omega, p);
        }
        let classes = (0..n).map(|a| ExponentClass::new(n, a, &units, &phi_n)).collect();
        Ok(FrobeniusContext { n, p, roots, classes })
    }

    pub fn check(&self, x: &UsElement) -> Result<FrobeniusCheck> {
        let (n, p) = (self.n, self.p);
        let r = x
            .residue(p)
            .ok_or_else(|| Error::Domain(format!("{p} ramifies in the Kummer extension")))?;
        // x^((p-1)/n) = omega^{a_1}
        let y = pow_mod(r, (p - 1) / n as u64, p);
        let a1 = self
            .roots
            .iter()
            .position(|&w| w == y)
            .ok_or_else(|| Error::Invariant("x^((p-1)/n) is not an n-th root of 1".into()))?;
        let c = &self.classes[a1];
        Ok(FrobeniusCheck {
            n,
            p,
            x: x.to_string(),
            order: c.order,
            exponents: c.exponents.clone(),
            orbit_count_holds: c.orbit_count_holds,
            character_sum_holds: c.character_sum_holds,
            tame_coefficient: c.tame_coefficient,
        })
    }
}

/// Verifies at p = 1 mod n, p not in the support of x, that the Frobenius exponents of x
/// over the phi(n) embeddings of mu_n form phi(n)/phi(n_v) copies of the order-n_v
/// elements, and that their image under a full-order character sums to the tame
/// coefficient.
pub fn frobenius_char_sum_check(x: &UsElement, p: u64, n: u32) -> Result<FrobeniusCheck> {
    FrobeniusContext::new(n, p)?.check(x)
}
