//! Dirichlet coefficients of the discriminant zeta function, by enumeration and through
//! the Moebius inversion over d | n with the Poisson-side Euler product for d = n.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::cyclo::{cyclotomic_polynomial, GroupRingElem};
use super::kummer::{us_group, UsElement};
use crate::arith::{
    characters_of_order_dividing, divisors, euler_phi, is_prime, moebius, pow_mod,
    primes_up_to, primitive_root, ramanujan_sum, DirichletCharacter,
};
use crate::family::{
    max_conductor_exponent, wild_primes, ArchType, FamilyEnumerator, LambdaSpec, LocalBehavior,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    BruteForce,
    EulerSide,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::BruteForce => "brute-force",
            Provenance::EulerSide => "euler-side",
        })
    }
}

/// a_1..a_M, stored with a_m at index m - 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCoeffs {
    pub bound: u64,
    pub coeffs: Vec<u64>,
    pub provenance: Provenance,
}

impl DirichletCoeffs {
    pub fn a(&self, m: u64) -> u64 {
        if m == 0 || m > self.bound {
            0
        } else {
            self.coeffs[m as usize - 1]
        }
    }

    /// Number of indices where the two agree.
    pub fn agreement(&self, other: &DirichletCoeffs) -> u64 {
        let b = self.bound.min(other.bound);
        (1..=b).filter(|&m| self.a(m) == other.a(m)).count() as u64
    }

    /// First index where the two differ.
    pub fn first_mismatch(&self, other: &DirichletCoeffs) -> Option<(u64, u64, u64)> {
        let b = self.bound.max(other.bound);
        (1..=b).map(|m| (m, self.a(m), other.a(m))).find(|&(_, a, b)| a != b)
    }

    pub fn csv_rows(&self) -> impl Iterator<Item = String> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, a)| format!("{},{},{}", i + 1, a, self.provenance))
    }
}

fn check_inputs(n: u32, p_set: &[u64], m: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain("degree must be at least 2".into()));
    }
    if m == 0 {
        return Err(Error::Domain("bound must be positive".into()));
    }
    if let Some(&p) = p_set.iter().find(|&&p| !is_prime(p)) {
        return Err(Error::Domain(format!("{p} in P is not prime")));
    }
    Ok(())
}

/// a_m = phi(n) times the number of members with Delta = m split completely at P.
pub fn coeffs_bruteforce(n: u32, lambda: &LambdaSpec, p_set: &[u64], m: u64) -> Result<DirichletCoeffs> {
    check_inputs(n, p_set, m)?;
    let e = FamilyEnumerator::new(n, lambda, m)?;
    let phi = euler_phi(n as u64);
    let counts = e.fold(
        BTreeMap::<u64, u64>::new,
        |mut acc, d| {
            if p_set.iter().all(|&p| d.splits_completely(p)) {
                *acc.entry(d.discriminant).or_default() += 1;
            }
            acc
        },
        |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        },
    );
    let mut coeffs = vec![0u64; m as usize];
    for (delta, c) in counts {
        coeffs[delta as usize - 1] = c * phi;
    }
    Ok(DirichletCoeffs { bound: m, coeffs, provenance: Provenance::BruteForce })
}

/// Local characters at a prime p | n (all characters of (Z/p^K)^x with values in mu_n) with
/// their discriminant exponents and the set of allowed Frobenius exponents.
pub struct WildPlace {
    pub n: u32,
    pub p: u64,
    pub modulus: u64,
    pub chars: Vec<WildChar>,
}

pub struct WildChar {
    pub character: DirichletCharacter,
    /// sum over a = 1..n-1 of the conductor exponent of chi^a
    pub dexp: u32,
    pub behaviors: Vec<LocalBehavior>,
    /// allowed[j]: behavior with Frobenius exponent j lies in Lambda_p
    pub allowed: Vec<bool>,
}

impl WildPlace {
    pub fn new(n: u32, p: u64, lambda: &LambdaSpec, split_only: bool) -> Result<Self> {
        let k = max_conductor_exponent(n, p);
        let modulus = p.pow(k);
        let mut chars = Vec::new();
        for chi in characters_of_order_dividing(modulus, n)? {
            let comp = chi.group().components[0].clone();
            let e = chi.component_order(&comp);
            let c = chi.component_conductor_exponent(&comp);
            let dexp = (1..n as u64)
                .map(|a| {
                    let ca = chi.pow(a);
                    ca.component_conductor_exponent(&ca.group().components[0])
                })
                .sum();
            let behaviors: Vec<LocalBehavior> =
                (0..n).map(|j| LocalBehavior::from_parts(n, e, j, c)).collect();
            let allowed = behaviors
                .iter()
                .map(|b| lambda.allows_finite(p, b) && (!split_only || *b == LocalBehavior::SPLIT))
                .collect();
            chars.push(WildChar { character: chi, dexp, behaviors, allowed });
        }
        Ok(WildPlace { n, p, modulus, chars })
    }

    /// n * L_p at the Fourier variable k with the prime-to-p part u of x, as a sparse
    /// series in p^{-s}: (discriminant exponent, coefficient in Z[C_n]).
    pub fn scaled_factor(&self, k: u32, u: u64) -> Vec<(u32, GroupRingElem)> {
        let n = self.n as usize;
        let mut by_exp: BTreeMap<u32, GroupRingElem> = BTreeMap::new();
        for wc in &self.chars {
            let mut hat = GroupRingElem::zero(n);
            for (j, &ok) in wc.allowed.iter().enumerate() {
                if ok {
                    let t = (n - (k as usize * j) % n) % n;
                    hat.0[t] += 1;
                }
            }
            if hat.is_zero() {
                continue;
            }
            let v = wc.character.eval(u as i64).expect("u is prime to p");
            by_exp.entry(wc.dexp).or_insert_with(|| GroupRingElem::zero(n)).add_assign(&hat.rotate(v));
        }
        by_exp.into_iter().filter(|(_, e)| !e.is_zero()).collect()
    }
}

/// 2 f_inf(k) for n even (k in {0, 1}); f_inf for n odd.
pub fn scaled_arch_weight(n: u32, lambda: &LambdaSpec, k: u32) -> i64 {
    let w0 = lambda.allows_arch(ArchType::RealSplit) as i64;
    if n % 2 == 1 {
        return w0;
    }
    let w1 = lambda.allows_arch(ArchType::Complex) as i64;
    if k % 2 == 0 {
        w0 + w1
    } else {
        w0 - w1
    }
}

type Sparse = Vec<(u64, GroupRingElem)>;

fn sparse_mul(a: &Sparse, b: &Sparse, bound: u64) -> Sparse {
    let mut out: BTreeMap<u64, GroupRingElem> = BTreeMap::new();
    for (ma, ea) in a {
        for (mb, eb) in b {
            let Some(m) = ma.checked_mul(*mb).filter(|&m| m <= bound) else { continue };
            let n = ea.0.len();
            out.entry(m).or_insert_with(|| GroupRingElem::zero(n)).add_assign(&ea.mul(eb));
        }
    }
    out.into_iter().filter(|(_, e)| !e.is_zero()).collect()
}

/// Coefficients from the Euler-product side: the Poisson sum over U_S(n) of products of
/// local factors, by Moebius inversion over the subgroups of C_n. Wild local factors are
/// obtained exactly from the characters of (Z/p^K)^x, so the output is exact for every n.
pub fn coeffs_eulerside(n: u32, lambda: &LambdaSpec, p_set: &[u64], m: u64) -> Result<DirichletCoeffs> {
    check_inputs(n, p_set, m)?;
    lambda.validate(n)?;
    let (acc, scale) = scaled_series(n, lambda, p_set, m)?;
    let phi_n = cyclotomic_polynomial(n as u64);
    let mut coeffs = Vec::with_capacity(m as usize);
    for (i, e) in acc.iter().enumerate().skip(1) {
        let v = e
            .as_integer(&phi_n)
            .ok_or_else(|| Error::Invariant(format!("coefficient {i} is not rational")))?;
        if v % scale != 0 || v < 0 {
            return Err(Error::Invariant(format!("coefficient {i} = {v}/{scale} is not a count")));
        }
        coeffs.push((v / scale) as u64);
    }
    Ok(DirichletCoeffs { bound: m, coeffs, provenance: Provenance::EulerSide })
}

/// Raw group-ring coefficients (index 0..=M) and the common denominator.
fn scaled_series(n: u32, lambda: &LambdaSpec, p_set: &[u64], m: u64) -> Result<(Vec<GroupRingElem>, i64)> {
    let nn = n as usize;
    let wild = wild_primes(n);
    let mut tame_p: Vec<u64> = p_set.iter().copied().filter(|p| !wild.contains(p)).collect();
    tame_p.sort_unstable();
    tame_p.dedup();
    let mut s_f = wild.clone();
    s_f.extend(&tame_p);
    s_f.sort_unstable();
    let places: Vec<WildPlace> = wild
        .iter()
        .map(|&p| WildPlace::new(n, p, lambda, p_set.contains(&p)))
        .collect::<Result<_>>()?;
    let scale = (n as i64).pow(s_f.len() as u32) * if n % 2 == 0 { 2 } else { 1 };

    // tame primes r = 1 mod n outside S_f and their indices of -1 and the S_f primes
    let rmax = crate::arith::iroot(m, n - 1);
    let tame: Vec<(u64, u32, Vec<u32>)> = primes_up_to(rmax)
        .into_iter()
        .filter(|r| r % n as u64 == 1 && !s_f.contains(r))
        .map(|r| {
            let ind = |a: u64| index_mod_n(a % r, r, n);
            (r, ind(r - 1), s_f.iter().map(|&q| ind(q)).collect())
        })
        .collect();

    let mut acc = vec![GroupRingElem::zero(nn); m as usize + 1];
    let mut t = vec![0i64; m as usize + 1];
    for x in us_group(n, &s_f)? {
        let arch = scaled_arch_weight(n, lambda, x.sign);
        if arch == 0 {
            continue;
        }
        let mut v: Sparse = vec![(1, GroupRingElem::monomial(nn, 0, arch))];
        for place in &places {
            let k = x.exponents.iter().find(|&&(q, _)| q == place.p).unwrap().1;
            let u = x.residue_skipping(place.modulus, Some(place.p)).expect("S-unit");
            let local: Sparse = place
                .scaled_factor(k, u)
                .into_iter()
                .filter_map(|(e, c)| place.p.checked_pow(e).map(|pe| (pe, c)))
                .collect();
            v = sparse_mul(&v, &local, m);
        }
        if v.is_empty() {
            continue;
        }
        tame_series(&x, &tame, n, &mut t);
        for (m0, c) in &v {
            for k in 1..=(m / m0) {
                let tk = t[k as usize];
                if tk != 0 {
                    acc[(m0 * k) as usize].add_scaled(c, tk);
                }
            }
        }
    }

    // proper subgroups: finitely many characters unramified outside n
    let m0: u64 = wild.iter().map(|&p| p.pow(max_conductor_exponent(n, p))).product();
    let chars = characters_of_order_dividing(m0, n)?;
    for d in divisors(n as u64) {
        let mu = moebius(n as u64 / d);
        if d == n as u64 || mu == 0 {
            continue;
        }
        for chi in chars.iter().filter(|c| d % c.order() as u64 == 0) {
            if let Some(mm) = subgroup_term(chi, n, lambda, p_set, &wild, m) {
                acc[mm as usize].0[0] += mu * scale;
            }
        }
    }
    Ok((acc, scale))
}

/// Phi_n(chi) if chi passes every local condition and Phi_n(chi) <= M.
fn subgroup_term(
    chi: &DirichletCharacter,
    n: u32,
    lambda: &LambdaSpec,
    p_set: &[u64],
    wild: &[u64],
    m: u64,
) -> Option<u64> {
    let arch = if chi.eval(-1) == Some(0) { ArchType::RealSplit } else { ArchType::Complex };
    if !lambda.allows_arch(arch) {
        return None;
    }
    for &p in wild {
        let comp = chi.group().component_for_prime(p).expect("p | modulus");
        let e = chi.component_order(comp);
        let c = chi.component_conductor_exponent(comp);
        let j = crate::family::unramified_exponent_at(chi, p);
        let b = LocalBehavior::from_parts(n, e, j, c);
        if !lambda.allows_finite(p, &b) || (p_set.contains(&p) && b != LocalBehavior::SPLIT) {
            return None;
        }
    }
    for &q in p_set {
        if !wild.contains(&q) && chi.eval(q as i64) != Some(0) {
            return None;
        }
    }
    let mut mm: u64 = 1;
    for a in 1..n as u64 {
        mm = mm.checked_mul(chi.pow(a).conductor()).filter(|&v| v <= m)?;
    }
    Some(mm)
}

/// ind_g(a) mod n for a prime r = 1 mod n.
fn index_mod_n(a: u64, r: u64, n: u32) -> u32 {
    let g = primitive_root(r);
    let o = (r - 1) / n as u64;
    let beta = pow_mod(g, o, r);
    let y = pow_mod(a, o, r);
    let mut cur = 1u64;
    for t in 0..n {
        if cur == y {
            return t;
        }
        cur = crate::arith::mul_mod(cur, beta, r);
    }
    unreachable!("a is not a unit mod r")
}

/// prod over tame r of (1 + c_r(x) r^{-(n-1)s}), truncated at the length of `t`.
fn tame_series(x: &UsElement, tame: &[(u64, u32, Vec<u32>)], n: u32, t: &mut [i64]) {
    let m = (t.len() - 1) as u64;
    t.iter_mut().for_each(|v| *v = 0);
    t[1] = 1;
    for (r, ind_minus_one, inds) in tame {
        let mut ind = x.sign as u64 * *ind_minus_one as u64;
        for (&(_, k), &i) in x.exponents.iter().zip(inds) {
            ind += k as u64 * i as u64;
        }
        let c = ramanujan_sum(n as u64, ind % n as u64);
        if c == 0 {
            continue;
        }
        let q = r.pow(n - 1);
        for k in (1..=m / q).rev() {
            let tk = t[k as usize];
            if tk != 0 {
                t[(k * q) as usize] += c * tk;
            }
        }
    }
}

/// Cyclic degree-n fields unramified outside S (all of them, and those in the family).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnramifiedCount {
    pub n: u32,
    pub s: Vec<u64>,
    pub fields: u64,
    pub family_fields: u64,
    /// n^{phi(n) |S|}
    pub bound: f64,
    pub ratio: f64,
}

pub fn unram_outside_s_count(n: u32, s: &[u64]) -> Result<UnramifiedCount> {
    let mut s = s.to_vec();
    s.sort_unstable();
    s.dedup();
    for p in wild_primes(n) {
        if !s.contains(&p) {
            return Err(Error::Domain(format!("S must contain {p}, which divides {n}")));
        }
    }
    let modulus: u64 = s.iter().map(|&p| p.pow(max_conductor_exponent(n, p))).product();
    let phi = euler_phi(n as u64);
    let mut all = 0;
    let mut family = 0;
    for chi in characters_of_order_dividing(modulus, n)? {
        if chi.order() != n {
            continue;
        }
        all += 1;
        let tame_ok = chi.group().components.iter().all(|c| {
            n as u64 % c.prime == 0
                || chi.component_conductor_exponent(c) == 0
                || chi.component_order(c) == n
        });
        if tame_ok {
            family += 1;
        }
    }
    let bound = (n as f64).powf(phi as f64 * s.len() as f64);
    let fields = all / phi;
    Ok(UnramifiedCount {
        n,
        s,
        fields,
        family_fields: family / phi,
        bound,
        ratio: fields as f64 / bound,
    })
}
