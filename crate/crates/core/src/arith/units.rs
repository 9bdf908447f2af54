use super::factor::factorize;
use super::primes::{gcd, mul_mod, pow_mod, primitive_root};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentKind {
    /// (Z/p^k)^x for odd p, cyclic with the given generator.
    Cyclic { generator: u64 },
    /// (Z/2^k)^x presented by -1 (when k >= 2) and 5 (when k >= 3).
    TwoPower,
}

/// One prime-power factor q = p^k of the modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitComponent {
    pub prime: u64,
    pub exponent: u32,
    pub modulus: u64,
    pub kind: ComponentKind,
    /// Index of this component's first generator in the group's generator list.
    pub first_generator: usize,
    pub generator_count: usize,
}

impl UnitComponent {
    fn new(prime: u64, exponent: u32, first_generator: usize, root: u64) -> Self {
        let modulus = prime.pow(exponent);
        let (kind, generator_count) = if prime == 2 {
            (ComponentKind::TwoPower, exponent.saturating_sub(1).min(2) as usize)
        } else {
            (ComponentKind::Cyclic { generator: root }, 1)
        };
        UnitComponent { prime, exponent, modulus, kind, first_generator, generator_count }
    }

    /// Orders of this component's generators.
    pub fn orders(&self) -> Vec<u64> {
        match self.kind {
            ComponentKind::Cyclic { .. } => {
                vec![(self.prime - 1) * self.prime.pow(self.exponent - 1)]
            }
            ComponentKind::TwoPower => match self.exponent {
                0 | 1 => vec![],
                2 => vec![2],
                k => vec![2, 1u64 << (k - 2)],
            },
        }
    }

    /// Local generators as residues mod p^k.
    pub fn local_generators(&self) -> Vec<u64> {
        match self.kind {
            ComponentKind::Cyclic { generator } => vec![generator % self.modulus],
            ComponentKind::TwoPower => match self.exponent {
                0 | 1 => vec![],
                2 => vec![3],
                _ => vec![self.modulus - 1, 5],
            },
        }
    }

    /// Discrete logs of a unit `a` (reduced mod p^k) with respect to the local generators,
    /// each reduced modulo gcd(n, generator order). Writes into `out`.
    pub fn log_mod(&self, a: u64, n: u64, out: &mut [u64]) {
        let q = self.modulus;
        let a = a % q;
        match self.kind {
            ComponentKind::Cyclic { generator } => {
                let o = (self.prime - 1) * self.prime.pow(self.exponent - 1);
                out[0] = cyclic_log_mod(a, generator % q, o, q, gcd(n, o));
            }
            ComponentKind::TwoPower => match self.exponent {
                0 | 1 => {}
                2 => {
                    out[0] = if a % 4 == 3 { 1 % gcd(n, 2) } else { 0 };
                }
                k => {
                    let neg = a % 4 == 3;
                    out[0] = if neg { 1 % gcd(n, 2) } else { 0 };
                    let b = if neg { q - a } else { a };
                    let o = 1u64 << (k - 2);
                    out[1] = cyclic_log_mod(b, 5, o, q, gcd(n, o));
                }
            },
        }
    }
}

/// log_gamma(a) mod g where gamma has order o in (Z/q)^x and g | o.
#[inline]
pub(crate) fn cyclic_log_mod(a: u64, gamma: u64, o: u64, q: u64, g: u64) -> u64 {
    if g == 1 {
        return 0;
    }
    let h = pow_mod(a, o / g, q);
    let beta = pow_mod(gamma, o / g, q);
    let mut cur = 1 % q;
    for t in 0..g {
        if cur == h {
            return t;
        }
        cur = mul_mod(cur, beta, q);
    }
    unreachable!("a is not a unit or gamma is not a generator")
}

/// Structure of (Z/f)^x following the CRT splitting of f into prime powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueUnitGroup {
    pub modulus: u64,
    pub components: Vec<UnitComponent>,
    pub generators: Vec<u64>,
    pub orders: Vec<u64>,
}

impl ResidueUnitGroup {
    pub fn new(modulus: u64) -> Result<Self> {
        let fac = factorize(modulus)?;
        Ok(Self::from_factors(modulus, &fac.factors))
    }

    pub fn from_factors(modulus: u64, factors: &[(u64, u32)]) -> Self {
        Self::from_factors_with(modulus, factors, |p| if p == 2 { 0 } else { primitive_root(p) })
    }

    /// As `from_factors`, with primitive roots supplied by the caller (they must agree with
    /// `primitive_root` for characters to be comparable across groups).
    pub fn from_factors_with(
        modulus: u64,
        factors: &[(u64, u32)],
        root: impl Fn(u64) -> u64,
    ) -> Self {
        let mut components = Vec::with_capacity(factors.len());
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        for &(p, k) in factors {
            let comp = UnitComponent::new(p, k, generators.len(), root(p));
            let q = comp.modulus;
            let rest = modulus / q;
            for (g, o) in comp.local_generators().into_iter().zip(comp.orders()) {
                generators.push(crt_pair(g, q, 1, rest));
                orders.push(o);
            }
            components.push(comp);
        }
        ResidueUnitGroup { modulus, components, generators, orders }
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn component_for_prime(&self, p: u64) -> Option<&UnitComponent> {
        self.components.iter().find(|c| c.prime == p)
    }

    /// Exponent vector of `a` with each coordinate reduced mod gcd(n, order); None if
    /// gcd(a, f) > 1.
    pub fn log_mod(&self, a: i64, n: u64) -> Option<Vec<u64>> {
        let m = self.modulus;
        let a = a.rem_euclid(m as i64) as u64;
        if gcd(a, m) != 1 {
            return None;
        }
        let mut out = vec![0u64; self.rank()];
        for c in &self.components {
            let r = &mut out[c.first_generator..c.first_generator + c.generator_count];
            c.log_mod(a, n, r);
        }
        Some(out)
    }

    /// The element with the given exponent vector.
    pub fn element(&self, exps: &[u64]) -> u64 {
        let mut acc = 1 % self.modulus;
        for (g, &e) in self.generators.iter().zip(exps) {
            acc = mul_mod(acc, pow_mod(*g, e, self.modulus), self.modulus);
        }
        acc
    }
}

fn crt_pair(a: u64, m: u64, b: u64, n: u64) -> u64 {
    if n == 1 {
        return a % m;
    }
    // x = a + m * t, with a + m t = b mod n
    let inv = super::primes::inv_mod(m % n, n).expect("coprime moduli");
    let diff = (b % n + n - a % n) % n;
    let t = mul_mod(diff, inv, n);
    (a as u128 + m as u128 * t as u128) as u64 % (m * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes::euler_phi;
    use std::collections::HashSet;

    #[test]
    fn exponent_vectors_are_unique() {
        for f in [1u64, 2, 4, 8, 16, 9, 7, 45, 63, 120, 1024, 243, 360] {
            let g = ResidueUnitGroup::new(f).unwrap();
            assert_eq!(g.order(), euler_phi(f), "f={f}");
            let big = g.order();
            let mut seen = HashSet::new();
            for a in 1..=f {
                if gcd(a, f) != 1 {
                    assert!(g.log_mod(a as i64, big).is_none() || f == 1);
                    continue;
                }
                let v = g.log_mod(a as i64, big).unwrap();
                assert_eq!(g.element(&v), a % f, "f={f} a={a}");
                assert!(seen.insert(v));
            }
        }
    }
}
