use serde::{Deserialize, Serialize};

use super::lambda::{ArchType, LocalBehavior};
use crate::arith::{local_conductor_exponent, DirichletCharacter};
use crate::error::{Error, Result};

/// Classification of a character at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalClass {
    /// p does not divide the conductor; Frobenius exponent chi(p).
    Unramified { frobenius: u32 },
    /// p does not divide n and the p-component has full order n.
    TotallyRamified,
    /// p does not divide n and is partially ramified: not in the family.
    Forbidden,
    /// p divides n: (e, f, conductor exponent).
    AtDivisorOfDegree(LocalBehavior),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WildDatum {
    pub prime: u64,
    pub behavior: LocalBehavior,
}

/// One cyclic degree-n field, given by the lexicographically least character in its
/// Galois orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicFieldDescriptor {
    pub n: u32,
    pub conductor: u64,
    pub character: DirichletCharacter,
    pub discriminant: u64,
    pub tame_ramified_primes: Vec<u64>,
    pub wild_part: Vec<WildDatum>,
    pub arch: ArchType,
}

/// Flat serializable row for CSV / JSON lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorRecord {
    pub n: u32,
    pub f: u64,
    pub delta: u64,
    pub exponent_vector: Vec<u32>,
    pub ram_primes: Vec<u64>,
    pub arch_type: ArchType,
}

impl DescriptorRecord {
    pub fn sort_key(&self) -> (u64, u64, &[u32]) {
        (self.delta, self.f, &self.exponent_vector)
    }

    pub fn csv_header() -> &'static str {
        "n,f,delta,exponent_vector,ram_primes,arch_type"
    }

    pub fn csv_row(&self) -> String {
        let join = |v: &[String]| v.join(" ");
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.f,
            self.delta,
            join(&self.exponent_vector.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
            join(&self.ram_primes.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
            self.arch_type
        )
    }
}

impl CyclicFieldDescriptor {
    pub fn record(&self) -> DescriptorRecord {
        DescriptorRecord {
            n: self.n,
            f: self.conductor,
            delta: self.discriminant,
            exponent_vector: self.character.exponents().to_vec(),
            ram_primes: self.character.group().components.iter().map(|c| c.prime).collect(),
            arch_type: self.arch,
        }
    }

    pub fn sort_key(&self) -> (u64, u64, &[u32]) {
        (self.discriminant, self.conductor, self.character.exponents())
    }

    /// Discriminant with its sign (-1)^{r_2}.
    pub fn signed_discriminant(&self) -> i64 {
        let d = self.discriminant as i64;
        match self.arch {
            ArchType::Complex if (self.n / 2) % 2 == 1 => -d,
            _ => d,
        }
    }

    /// Whether p splits completely. Primes dividing n are handled through the local
    /// behavior; ramified primes never split.
    pub fn splits_completely(&self, p: u64) -> bool {
        if self.conductor % p == 0 {
            return false;
        }
        self.character.eval(p as i64) == Some(0)
    }
}

/// prod_{a=1}^{n-1} cond(chi^a) for a character of exact order n.
pub fn discriminant_of(chi: &DirichletCharacter) -> Result<u128> {
    let n = chi.n();
    if chi.order() != n {
        return Err(Error::Domain(format!(
            "character has order {} but the degree is {n}",
            chi.order()
        )));
    }
    discriminant_exponents(chi)
        .into_iter()
        .try_fold(1u128, |acc, (p, e)| {
            (p as u128).checked_pow(e).and_then(|pe| acc.checked_mul(pe))
        })
        .ok_or_else(|| Error::Range("discriminant exceeds 128 bits".into()))
}

/// (p, v_p(Delta)) over the primes dividing the modulus.
pub fn discriminant_exponents(chi: &DirichletCharacter) -> Vec<(u64, u32)> {
    let n = chi.n();
    let mut out = Vec::new();
    for c in &chi.group().components {
        let exps = chi.component_exponents(c);
        let mut total = 0;
        let mut buf = [0u32; 2];
        for a in 1..n {
            for (b, &e) in buf.iter_mut().zip(exps) {
                *b = ((e as u64 * a as u64) % n as u64) as u32;
            }
            total += local_conductor_exponent(c, &buf[..exps.len()], n);
        }
        if total > 0 {
            out.push((c.prime, total));
        }
    }
    out
}

/// Frobenius exponent of the prime-to-p part of chi at p (p may divide the modulus).
pub fn unramified_exponent_at(chi: &DirichletCharacter, p: u64) -> u32 {
    let n = chi.n() as u64;
    let mut acc = 0u64;
    for c in &chi.group().components {
        if c.prime == p {
            continue;
        }
        acc += chi.eval_component(c, p % c.modulus) as u64;
    }
    (acc % n) as u32
}

/// Ramification/splitting classification of chi at the prime p.
pub fn local_behavior(chi: &DirichletCharacter, p: u64) -> LocalClass {
    let n = chi.n();
    let comp = chi.group().component_for_prime(p);
    let ramified_order = comp.map_or(1, |c| chi.component_order(c));
    if n as u64 % p == 0 {
        let c = comp.map_or(0, |c| chi.component_conductor_exponent(c));
        let j = unramified_exponent_at(chi, p);
        return LocalClass::AtDivisorOfDegree(LocalBehavior::from_parts(n, ramified_order, j, c));
    }
    match comp {
        Some(c) if chi.component_conductor_exponent(c) > 0 => {
            if ramified_order == n {
                LocalClass::TotallyRamified
            } else {
                LocalClass::Forbidden
            }
        }
        _ => LocalClass::Unramified { frobenius: unramified_exponent_at(chi, p) },
    }
}

/// Archimedean type from chi(-1).
pub fn arch_type(chi: &DirichletCharacter) -> ArchType {
    match chi.eval(-1) {
        Some(0) => ArchType::RealSplit,
        _ => ArchType::Complex,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::characters_of_order_dividing;

    fn primitive_of_order(f: u64, n: u32) -> Vec<DirichletCharacter> {
        characters_of_order_dividing(f, n)
            .unwrap()
            .into_iter()
            .filter(|c| c.is_primitive() && c.order() == n)
            .collect()
    }

    #[test]
    fn discriminants() {
        let chi = &primitive_of_order(5, 2)[0];
        assert_eq!(discriminant_of(chi).unwrap(), 5);
        for chi in primitive_of_order(7, 3) {
            assert_eq!(discriminant_of(&chi).unwrap(), 49);
            assert_eq!(discriminant_of(&chi.pow(2)).unwrap(), 49);
        }
        let chi = &primitive_of_order(16, 4)[0];
        assert_eq!(discriminant_of(chi).unwrap(), 2048);
        let triv = &characters_of_order_dividing(7, 3).unwrap()[0];
        assert!(discriminant_of(triv).is_err());
    }

    #[test]
    fn local_classes() {
        let chi = &primitive_of_order(7, 3)[0];
        assert_eq!(local_behavior(chi, 2), LocalClass::Unramified { frobenius: chi.eval(2).unwrap() });
        assert_ne!(chi.eval(2), Some(0));
        assert_eq!(chi.eval(13), Some(0));
        let chi5 = &primitive_of_order(5, 2)[0];
        assert_eq!(local_behavior(chi5, 5), LocalClass::TotallyRamified);
        // order-4 character mod 5*13 whose 5-part has order 2
        let all = characters_of_order_dividing(65, 4).unwrap();
        let g = all[0].group().clone();
        let bad = all
            .iter()
            .find(|c| {
                c.is_primitive()
                    && c.order() == 4
                    && c.component_order(&g.components[0]) == 2
            })
            .unwrap();
        assert_eq!(local_behavior(bad, 5), LocalClass::Forbidden);
    }

    #[test]
    fn splitting_at_divisor_of_degree() {
        // Q(sqrt(-7)): 2 splits (-7 = 1 mod 8)
        let chi = &primitive_of_order(7, 2)[0];
        assert_eq!(
            local_behavior(chi, 2),
            LocalClass::AtDivisorOfDegree(LocalBehavior::SPLIT)
        );
        // Q(sqrt(5)): 2 inert
        let chi = &primitive_of_order(5, 2)[0];
        assert_eq!(
            local_behavior(chi, 2),
            LocalClass::AtDivisorOfDegree(LocalBehavior::new(1, 2, 0))
        );
    }
}
