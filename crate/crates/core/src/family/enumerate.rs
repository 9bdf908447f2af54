use std::sync::Arc;

use rayon::prelude::*;

use super::descriptor::{
    arch_type, discriminant_exponents, local_behavior, CyclicFieldDescriptor, LocalClass,
    WildDatum,
};
use super::lambda::{max_conductor_exponent, wild_primes, LambdaSpec};
use crate::arith::{
    euler_phi, gcd, iroot, local_conductor_exponent, primitive_root_given, DirichletCharacter,
    ResidueUnitGroup, SpfTable, UnitComponent,
};
use crate::error::{Error, Result};

/// Default ceiling on the conductor range scanned by one enumeration.
pub const DEFAULT_CONDUCTOR_LIMIT: u64 = 50_000_000;

/// Conductor-first enumerator of T_{Q,n}(Lambda) with discriminant at most X.
pub struct FamilyEnumerator {
    n: u32,
    lambda: LambdaSpec,
    x: u64,
    conductor_bound: u64,
    spf: SpfTable,
    roots: Vec<u32>,
    units: Vec<u32>,
    wild: Vec<u64>,
}

impl FamilyEnumerator {
    pub fn new(n: u32, lambda: &LambdaSpec, x: u64) -> Result<Self> {
        Self::with_limit(n, lambda, x, DEFAULT_CONDUCTOR_LIMIT)
    }

    pub fn with_limit(n: u32, lambda: &LambdaSpec, x: u64, limit: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("degree must be at least 2".into()));
        }
        let phi = euler_phi(n as u64) as u32;
        // cond(chi^a) = f for every a prime to n, so Delta >= f^phi(n)
        let conductor_bound = iroot(x, phi);
        if conductor_bound > limit {
            return Err(Error::Range(format!(
                "X = {x} needs conductors up to {conductor_bound}, limit is {limit}"
            )));
        }
        Self::build(n, lambda, x, conductor_bound)
    }

    /// Every member with conductor at most `max_conductor`, whatever its discriminant
    /// (discriminants must still fit in 64 bits).
    pub fn for_conductors(n: u32, lambda: &LambdaSpec, max_conductor: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("degree must be at least 2".into()));
        }
        if max_conductor > DEFAULT_CONDUCTOR_LIMIT {
            return Err(Error::Range(format!("conductor bound {max_conductor} above limit")));
        }
        Self::build(n, lambda, u64::MAX, max_conductor)
    }

    fn build(n: u32, lambda: &LambdaSpec, x: u64, conductor_bound: u64) -> Result<Self> {
        lambda.validate(n)?;
        let spf = SpfTable::new(conductor_bound.max(2));
        let mut roots = vec![0u32; conductor_bound as usize + 1];
        for p in 3..=conductor_bound {
            if spf.is_prime(p) && (p % n as u64 == 1 || n as u64 % p == 0) {
                roots[p as usize] = primitive_root_given(p, &spf.factor(p - 1)) as u32;
            }
        }
        let units = (1..n).filter(|&a| gcd(a as u64, n as u64) == 1).collect();
        Ok(FamilyEnumerator {
            n,
            lambda: lambda.clone(),
            x,
            conductor_bound,
            spf,
            roots,
            units,
            wild: wild_primes(n),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn lambda(&self) -> &LambdaSpec {
        &self.lambda
    }

    pub fn conductor_bound(&self) -> u64 {
        self.conductor_bound
    }

    /// Factorization of f if f can be the conductor of a member of the family.
    fn admissible_factors(&self, f: u64) -> Option<Vec<(u64, u32)>> {
        let n = self.n as u64;
        let fac = self.spf.factor(f);
        for &(p, k) in &fac {
            if n % p != 0 {
                if k != 1 || p % n != 1 {
                    return None;
                }
            } else if k > max_conductor_exponent(self.n, p) || (p == 2 && k == 1) {
                return None;
            }
        }
        Some(fac)
    }

    /// Exponent choices on one component that are primitive at p^k with order | n (and
    /// exact order n at tame primes).
    fn local_options(&self, comp: &UnitComponent, tame: bool) -> Vec<Vec<u32>> {
        let n = self.n;
        let orders = comp.orders();
        let steps: Vec<(u32, u32)> = orders
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
            let cond = local_conductor_exponent(comp, &exps, n);
            let ord = exps.iter().fold(n as u64, |a, &e| gcd(a, e as u64));
            let ord = n / ord as u32;
            if cond == comp.exponent && (!tame || ord == n) {
                out.push(exps);
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return out;
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

    fn is_orbit_minimum(&self, exps: &[u32]) -> bool {
        let n = self.n as u64;
        for &a in &self.units[1..] {
            for &e in exps {
                let t = ((e as u64 * a as u64) % n) as u32;
                match t.cmp(&e) {
                    std::cmp::Ordering::Less => return false,
                    std::cmp::Ordering::Greater => break,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        true
    }

    /// All members of the family with conductor exactly f, in canonical-exponent order.
    pub fn fields_with_conductor(&self, f: u64) -> Vec<CyclicFieldDescriptor> {
        let mut out = Vec::new();
        self.visit_conductor(f, &mut |d| out.push(d));
        out
    }

    fn visit_conductor(&self, f: u64, sink: &mut impl FnMut(CyclicFieldDescriptor)) {
        let Some(fac) = self.admissible_factors(f) else { return };
        let n = self.n;
        let roots = &self.roots;
        let group = Arc::new(ResidueUnitGroup::from_factors_with(f, &fac, |p| {
            if p == 2 {
                0
            } else {
                roots[p as usize] as u64
            }
        }));
        let options: Vec<Vec<Vec<u32>>> = group
            .components
            .iter()
            .map(|c| self.local_options(c, n as u64 % c.prime != 0))
            .collect();
        if options.iter().any(|o| o.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; options.len()];
        let mut exps = Vec::with_capacity(group.rank());
        loop {
            exps.clear();
            for (o, &i) in options.iter().zip(&idx) {
                exps.extend_from_slice(&o[i]);
            }
            let g = exps.iter().fold(n as u64, |a, &e| gcd(a, e as u64));
            if g == 1 && self.is_orbit_minimum(&exps) {
                let chi = DirichletCharacter::new(group.clone(), n, exps.clone())
                    .expect("exponents built from generator orders");
                if let Some(d) = self.describe(chi) {
                    sink(d);
                }
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return;
                }
                idx[pos] += 1;
                if idx[pos] < options[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Applies the discriminant bound and Lambda to a primitive order-n character.
    pub fn describe(&self, chi: DirichletCharacter) -> Option<CyclicFieldDescriptor> {
        let mut delta: u128 = 1;
        for (p, e) in discriminant_exponents(&chi) {
            delta = delta.checked_mul((p as u128).checked_pow(e)?)?;
            if delta > self.x as u128 {
                return None;
            }
        }
        let arch = arch_type(&chi);
        if !self.lambda.allows_arch(arch) {
            return None;
        }
        let mut wild_part = Vec::with_capacity(self.wild.len());
        for &p in &self.wild {
            match local_behavior(&chi, p) {
                LocalClass::AtDivisorOfDegree(b) => {
                    if !self.lambda.allows_finite(p, &b) {
                        return None;
                    }
                    wild_part.push(WildDatum { prime: p, behavior: b });
                }
                _ => unreachable!("p divides n"),
            }
        }
        let tame_ramified_primes = chi
            .group()
            .components
            .iter()
            .map(|c| c.prime)
            .filter(|&p| self.n as u64 % p != 0)
            .collect();
        Some(CyclicFieldDescriptor {
            n: self.n,
            conductor: chi.modulus(),
            discriminant: delta as u64,
            character: chi,
            tame_ramified_primes,
            wild_part,
            arch,
        })
    }

    /// Members with conductor in [lo, hi), ordered by conductor then exponents.
    pub fn fields_in(&self, lo: u64, hi: u64) -> Vec<CyclicFieldDescriptor> {
        let mut out = Vec::new();
        for f in lo.max(1)..hi.min(self.conductor_bound + 1) {
            self.visit_conductor(f, &mut |d| out.push(d));
        }
        out
    }

    /// Conductor intervals [lo, hi) of the given width covering 1..=conductor_bound.
    pub fn intervals(&self, width: u64) -> Vec<(u64, u64)> {
        let width = width.max(1);
        let end = self.conductor_bound + 1;
        (0..)
            .map(|i| (1 + i * width, (1 + (i + 1) * width).min(end)))
            .take_while(|&(lo, _)| lo < end)
            .collect()
    }

    /// Deterministic parallel fold over all members: each interval is folded in conductor
    /// order and the partial results are combined in interval order.
    pub fn fold<T, Id, F, R>(&self, identity: Id, fold: F, reduce: R) -> T
    where
        T: Send,
        Id: Fn() -> T + Sync,
        F: Fn(T, &CyclicFieldDescriptor) -> T + Sync,
        R: Fn(T, T) -> T,
    {
        let parts: Vec<T> = self
            .intervals(interval_width(self.conductor_bound))
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut acc = Some(identity());
                for f in lo..hi {
                    self.visit_conductor(f, &mut |d| {
                        acc = Some(fold(acc.take().unwrap(), &d));
                    });
                }
                acc.unwrap()
            })
            .collect();
        parts.into_iter().fold(identity(), reduce)
    }

    /// Number of members.
    pub fn count(&self) -> u64 {
        self.fold(|| 0u64, |a, _| a + 1, |a, b| a + b)
    }
}

fn interval_width(bound: u64) -> u64 {
    (bound / 256).clamp(1024, 1 << 16)
}

/// The full family with Delta <= X, sorted by (Delta, f, canonical exponents).
pub fn enumerate_family(n: u32, lambda: &LambdaSpec, x: u64) -> Result<Vec<CyclicFieldDescriptor>> {
    let e = FamilyEnumerator::new(n, lambda, x)?;
    let mut all = e.fold(
        Vec::new,
        |mut v, d| {
            v.push(d.clone());
            v
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    all.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(all)
}
