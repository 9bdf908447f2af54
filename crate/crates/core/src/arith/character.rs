use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::primes::gcd;
use super::units::{ComponentKind, ResidueUnitGroup, UnitComponent};
use crate::error::{Error, Result};

/// Value of a character: an exponent k standing for zeta_n^k, or zero when gcd(a, f) > 1.
pub type CharValue = Option<u32>;

/// A Dirichlet character mod f with values in mu_n, stored as exponents in Z/n on the
/// generators of (Z/f)^x.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<ResidueUnitGroup>,
    n: u32,
    exponents: Vec<u32>,
    primitive: bool,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.group.modulus == other.group.modulus
            && self.exponents == other.exponents
    }
}
impl Eq for DirichletCharacter {}

impl PartialOrd for DirichletCharacter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for DirichletCharacter {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.group.modulus, self.n, &self.exponents).cmp(&(
            other.group.modulus,
            other.n,
            &other.exponents,
        ))
    }
}

/// Serializable form of a character.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub modulus: u64,
    pub n: u32,
    pub exponents: Vec<u32>,
}

impl DirichletCharacter {
    pub fn new(group: Arc<ResidueUnitGroup>, n: u32, exponents: Vec<u32>) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("order bound must be positive".into()));
        }
        if exponents.len() != group.rank() {
            return Err(Error::Domain(format!(
                "expected {} exponents, got {}",
                group.rank(),
                exponents.len()
            )));
        }
        for (&e, &o) in exponents.iter().zip(&group.orders) {
            if e >= n || (e as u64 * o) % n as u64 != 0 {
                return Err(Error::Domain(format!(
                    "exponent {e} incompatible with generator order {o} in Z/{n}"
                )));
            }
        }
        let mut chi = DirichletCharacter { group, n, exponents, primitive: false };
        chi.primitive = chi.conductor() == chi.modulus();
        Ok(chi)
    }

    pub fn trivial(group: Arc<ResidueUnitGroup>, n: u32) -> Self {
        let r = group.rank();
        DirichletCharacter::new(group, n, vec![0; r]).expect("trivial character")
    }

    pub fn from_record(rec: &CharacterRecord) -> Result<Self> {
        let g = Arc::new(ResidueUnitGroup::new(rec.modulus)?);
        DirichletCharacter::new(g, rec.n, rec.exponents.clone())
    }

    pub fn record(&self) -> CharacterRecord {
        CharacterRecord { modulus: self.modulus(), n: self.n, exponents: self.exponents.clone() }
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn group(&self) -> &Arc<ResidueUnitGroup> {
        &self.group
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Exact order of the character (divides n).
    pub fn order(&self) -> u32 {
        let n = self.n as u64;
        let g = self.exponents.iter().fold(n, |acc, &e| gcd(acc, e as u64));
        (n / g) as u32
    }

    /// chi^a.
    pub fn pow(&self, a: u64) -> Self {
        let n = self.n as u64;
        let exps: Vec<u32> =
            self.exponents.iter().map(|&e| ((e as u64 * (a % n)) % n) as u32).collect();
        let mut chi = DirichletCharacter {
            group: self.group.clone(),
            n: self.n,
            exponents: exps,
            primitive: false,
        };
        chi.primitive = chi.conductor() == chi.modulus();
        chi
    }

    /// Exponents belonging to the p-primary component of (Z/f)^x.
    pub fn component_exponents(&self, comp: &UnitComponent) -> &[u32] {
        &self.exponents[comp.first_generator..comp.first_generator + comp.generator_count]
    }

    /// Order of the local component at `comp`.
    pub fn component_order(&self, comp: &UnitComponent) -> u32 {
        let n = self.n as u64;
        let g = self.component_exponents(comp).iter().fold(n, |acc, &e| gcd(acc, e as u64));
        (n / g) as u32
    }

    /// Conductor exponent of the local component at `comp`.
    pub fn component_conductor_exponent(&self, comp: &UnitComponent) -> u32 {
        local_conductor_exponent(comp, self.component_exponents(comp), self.n)
    }

    pub fn conductor(&self) -> u64 {
        self.group
            .components
            .iter()
            .map(|c| c.prime.pow(self.component_conductor_exponent(c)))
            .product()
    }

    /// Value chi(a) as an exponent in Z/n, or None if gcd(a, f) > 1.
    pub fn eval(&self, a: i64) -> CharValue {
        let f = self.modulus();
        let a = a.rem_euclid(f as i64) as u64;
        if gcd(a, f) != 1 {
            return None;
        }
        let n = self.n as u64;
        let mut buf = [0u64; 2];
        let mut acc = 0u64;
        for c in &self.group.components {
            let exps = self.component_exponents(c);
            if exps.iter().all(|&e| e == 0) {
                continue;
            }
            c.log_mod(a, n, &mut buf[..c.generator_count]);
            for (l, &e) in buf.iter().zip(exps) {
                acc += l * e as u64;
            }
        }
        Some((acc % n) as u32)
    }

    /// Value of the local component at `comp` on a unit `a` (mod p^k).
    pub fn eval_component(&self, comp: &UnitComponent, a: u64) -> u32 {
        let exps = self.component_exponents(comp);
        if exps.iter().all(|&e| e == 0) {
            return 0;
        }
        let n = self.n as u64;
        let mut buf = [0u64; 2];
        c_log(comp, a, n, &mut buf);
        let acc: u64 = buf.iter().zip(exps).map(|(l, &e)| l * e as u64).sum();
        (acc % n) as u32
    }

    /// The primitive character inducing this one.
    pub fn primitive_part(&self) -> Self {
        if self.primitive {
            return self.clone();
        }
        let mut factors = Vec::new();
        let mut exps = Vec::new();
        for c in &self.group.components {
            let k = self.component_conductor_exponent(c);
            if k == 0 {
                continue;
            }
            factors.push((c.prime, k));
            let e = self.component_exponents(c);
            match c.kind {
                ComponentKind::Cyclic { .. } => exps.push(e[0]),
                ComponentKind::TwoPower => {
                    exps.push(e[0]);
                    if k >= 3 {
                        exps.push(e[1]);
                    }
                }
            }
        }
        let modulus = factors.iter().map(|&(p, k)| p.pow(k)).product();
        let g = Arc::new(ResidueUnitGroup::from_factors(modulus, &factors));
        DirichletCharacter::new(g, self.n, exps).expect("restriction of a valid character")
    }
}

fn c_log(comp: &UnitComponent, a: u64, n: u64, buf: &mut [u64; 2]) {
    comp.log_mod(a, n, &mut buf[..comp.generator_count]);
}

/// Conductor exponent of a local character on (Z/p^k)^x given by its exponents.
pub fn local_conductor_exponent(comp: &UnitComponent, exps: &[u32], n: u32) -> u32 {
    let n64 = n as u64;
    let ord = |e: u32| n64 / gcd(n64, e as u64);
    match comp.kind {
        ComponentKind::Cyclic { .. } => {
            let r = ord(exps[0]);
            if r == 1 {
                0
            } else {
                1 + super::primes::valuation(r, comp.prime)
            }
        }
        ComponentKind::TwoPower => {
            if comp.generator_count == 0 {
                return 0;
            }
            let r1 = if comp.generator_count == 2 { ord(exps[1]) } else { 1 };
            if r1 > 1 {
                2 + super::primes::valuation(r1, 2)
            } else if exps[0] != 0 {
                2
            } else {
                0
            }
        }
    }
}

/// All characters mod f with values in mu_n (order dividing n).
pub fn characters_of_order_dividing(f: u64, n: u32) -> Result<Vec<DirichletCharacter>> {
    if f == 0 || n < 2 {
        return Err(Error::Domain("need f >= 1 and n >= 2".into()));
    }
    let group = Arc::new(ResidueUnitGroup::new(f)?);
    let steps: Vec<(u32, u32)> = group
        .orders
        .iter()
        .map(|&o| {
            let g = gcd(n as u64, o) as u32;
            (g, n / g)
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0u32; steps.len()];
    loop {
        let exps: Vec<u32> = idx.iter().zip(&steps).map(|(&i, &(_, s))| i * s).collect();
        out.push(DirichletCharacter::new(group.clone(), n, exps)?);
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < steps[pos].0 {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}
