use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::forms::{
    compose_unchecked, is_fundamental_discriminant, pow_form, reduce_unchecked,
    reduced_forms_definite, rho_cycles, QuadForm,
};
use crate::arith::{factorize, gcd, is_prime, pow_mod, valuation};
use crate::error::{Error, Result};

/// Default bound on |D| accepted by `class_group`.
pub const DEFAULT_DISCRIMINANT_BOUND: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticClassGroup {
    pub d: i64,
    pub h: u64,
    /// d_1 | d_2 | ... with product h.
    pub divisors: Vec<u64>,
    /// A form generating each cyclic factor.
    pub generators: Vec<QuadForm>,
    /// Narrow class number and structure for D > 0.
    pub narrow: Option<(u64, Vec<u64>)>,
}

impl QuadraticClassGroup {
    pub fn torsion(&self, l: u64) -> u64 {
        self.divisors.iter().map(|&d| gcd(l, d)).product()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Definite,
    Narrow,
    Wide,
}

/// Classes of forms of one discriminant with canonical representatives.
pub struct FormClasses {
    d: i64,
    mode: Mode,
    h: u64,
    /// reduced indefinite form -> minimal form of its cycle
    cycle_rep: HashMap<QuadForm, QuadForm>,
    /// generators tried in order
    candidates: Vec<QuadForm>,
    next_prime: u64,
}

impl FormClasses {
    /// Imaginary case with known class number.
    pub fn definite_with_h(d: i64, h: u64) -> Self {
        FormClasses {
            d,
            mode: Mode::Definite,
            h,
            cycle_rep: HashMap::new(),
            candidates: Vec::new(),
            next_prime: 2,
        }
    }

    pub fn definite(d: i64) -> Self {
        let h = reduced_forms_definite(d).len() as u64;
        Self::definite_with_h(d, h)
    }

    /// Real case: the narrow group if `narrow`, else the wide group.
    pub fn indefinite(d: i64, narrow: bool) -> Self {
        let cycles = rho_cycles(d);
        let mut cycle_rep = HashMap::new();
        let mut candidates = Vec::new();
        for c in &cycles {
            let rep = *c.iter().min().unwrap();
            candidates.push(rep);
            for f in c {
                cycle_rep.insert(*f, rep);
            }
        }
        let hp = cycles.len() as u64;
        let mut g = FormClasses {
            d,
            mode: Mode::Narrow,
            h: hp,
            cycle_rep,
            candidates,
            next_prime: u64::MAX,
        };
        if !narrow {
            let one = g.identity();
            let minus_one = g.canonical(QuadForm::principal(d).negate());
            g.mode = Mode::Wide;
            g.h = if minus_one == one { hp } else { hp / 2 };
            let mut c: Vec<QuadForm> = g.candidates.iter().map(|&f| g.canonical(f)).collect();
            c.sort();
            c.dedup();
            g.candidates = c;
        }
        g
    }

    pub fn order(&self) -> u64 {
        self.h
    }

    pub fn canonical(&self, f: QuadForm) -> QuadForm {
        let r = reduce_unchecked(f);
        match self.mode {
            Mode::Definite => r,
            Mode::Narrow => self.cycle_rep[&r],
            Mode::Wide => {
                let s = self.cycle_rep[&reduce_unchecked(r.negate())];
                self.cycle_rep[&r].min(s)
            }
        }
    }

    pub fn identity(&self) -> QuadForm {
        self.canonical(QuadForm::principal(self.d))
    }

    pub fn op(&self, f: QuadForm, g: QuadForm) -> QuadForm {
        self.canonical(compose_unchecked(f, g))
    }

    pub fn pow(&self, f: QuadForm, k: u64) -> QuadForm {
        self.canonical(pow_form(f, k))
    }

    /// Next generator candidate: prime forms in increasing norm (definite case), or the
    /// remaining cycle representatives (indefinite case).
    fn candidate(&mut self, i: usize) -> Option<QuadForm> {
        while i >= self.candidates.len() {
            if self.mode != Mode::Definite {
                return None;
            }
            let p = self.next_prime;
            if 3 * p * p > self.d.unsigned_abs() && p > 2 {
                return None;
            }
            self.next_prime = p + 1;
            if !is_prime(p) {
                continue;
            }
            if let Some(f) = prime_form(self.d, p) {
                let f = self.canonical(f);
                self.candidates.push(f);
            }
        }
        Some(self.candidates[i])
    }

    /// Sylow q-subgroup: its elements with exponent vectors on a basis, the basis, and
    /// the basis orders (descending).
    pub fn sylow(&mut self, q: u64) -> Sylow {
        let v = valuation(self.h, q);
        let target = q.pow(v);
        let m = self.h / target;
        let id = self.identity();
        let mut sub = Sylow { elems: vec![id], index: HashMap::from([(id, 0)]), basis: vec![], orders: vec![], exps: vec![vec![]] };
        let mut pool = vec![id];
        let mut pool_index: HashMap<QuadForm, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        // first the whole Sylow subgroup as a set
        while (pool.len() as u64) < target {
            let Some(g) = self.candidate(i) else { break };
            i += 1;
            let x = self.pow(g, m);
            if pool_index.contains_key(&x) {
                continue;
            }
            let mut coset_rep = x;
            let base = pool.clone();
            while !pool_index.contains_key(&coset_rep) {
                for &e in &base {
                    let y = self.op(e, coset_rep);
                    pool_index.insert(y, pool.len());
                    pool.push(y);
                }
                coset_rep = self.op(coset_rep, x);
            }
        }
        // greedy basis: element of largest order modulo the span found so far
        while sub.elems.len() < pool.len() {
            let mut best: Option<(u64, QuadForm, Vec<u64>)> = None;
            for &x in &pool {
                if sub.index.contains_key(&x) {
                    continue;
                }
                let mut o = 1u64;
                let mut y = x;
                while !sub.index.contains_key(&y) {
                    y = self.pow(y, q);
                    o *= q;
                }
                if best.as_ref().map_or(true, |b| o > b.0) {
                    let coords = sub.exps[sub.index[&y]].clone();
                    best = Some((o, x, coords));
                }
            }
            let (o, x, coords) = best.expect("pool larger than span");
            // x^o = prod g_i^{t_i}; every t_i is divisible by o
            let mut g = x;
            for (k, &t) in coords.iter().enumerate() {
                debug_assert_eq!(t % o, 0);
                let ord = sub.orders[k];
                let back = (ord - (t / o) % ord) % ord;
                g = self.op(g, self.pow(sub.basis[k], back));
            }
            sub.extend(self, g, o);
        }
        sub
    }

    /// Exhaustive count of classes killed by l.
    pub fn torsion_bruteforce(&mut self, l: u64) -> u64 {
        let all = self.all_classes();
        let id = self.identity();
        all.iter().filter(|&&f| self.pow(f, l) == id).count() as u64
    }

    pub fn all_classes(&mut self) -> Vec<QuadForm> {
        match self.mode {
            Mode::Definite => reduced_forms_definite(self.d),
            _ => self.candidates.clone(),
        }
    }

    pub fn structure(&mut self) -> (Vec<u64>, Vec<QuadForm>) {
        let h = self.h;
        let mut per_prime: Vec<Vec<(u64, QuadForm)>> = Vec::new();
        if h > 1 {
            for (q, _) in factorize(h).expect("h > 0").factors {
                let s = self.sylow(q);
                let mut inv: Vec<(u64, QuadForm)> = s.orders.iter().copied().zip(s.basis.iter().copied()).collect();
                inv.sort_by(|a, b| b.0.cmp(&a.0));
                per_prime.push(inv);
            }
        }
        let rank = per_prime.iter().map(|v| v.len()).max().unwrap_or(0);
        let mut divisors = Vec::with_capacity(rank);
        let mut generators = Vec::with_capacity(rank);
        for i in 0..rank {
            let mut d = 1;
            let mut g = self.identity();
            for v in &per_prime {
                if let Some(&(o, f)) = v.get(i) {
                    d *= o;
                    g = self.op(g, f);
                }
            }
            divisors.push(d);
            generators.push(g);
        }
        divisors.reverse();
        generators.reverse();
        (divisors, generators)
    }

    /// #Cl[l] from the Sylow subgroups at the primes dividing gcd(l, h).
    pub fn torsion(&mut self, l: u64) -> u64 {
        let g = gcd(l, self.h);
        if g == 1 {
            return 1;
        }
        let mut total = 1;
        for (q, _) in factorize(g).expect("g > 1").factors {
            let s = self.sylow(q);
            let lq = q.pow(valuation(l, q));
            total *= s.orders.iter().map(|&o| gcd(o, lq)).product::<u64>();
        }
        total
    }
}

/// An abelian q-group with a basis and the coordinates of each element.
pub struct Sylow {
    pub elems: Vec<QuadForm>,
    index: HashMap<QuadForm, usize>,
    pub basis: Vec<QuadForm>,
    pub orders: Vec<u64>,
    exps: Vec<Vec<u64>>,
}

impl Sylow {
    fn extend(&mut self, g: &FormClasses, x: QuadForm, o: u64) {
        let k = self.basis.len();
        for e in self.exps.iter_mut() {
            e.push(0);
        }
        let base: Vec<(QuadForm, Vec<u64>)> =
            self.elems.iter().copied().zip(self.exps.iter().cloned()).collect();
        let mut xp = x;
        for t in 1..o {
            for (f, coords) in &base {
                let y = g.op(*f, xp);
                let mut c = coords.clone();
                c[k] = t;
                self.index.insert(y, self.elems.len());
                self.elems.push(y);
                self.exps.push(c);
            }
            xp = g.op(xp, x);
        }
        self.basis.push(x);
        self.orders.push(o);
    }
}

/// The reduced form (p, b, c) with 0 <= b <= p, if p is not inert.
pub fn prime_form(d: i64, p: u64) -> Option<QuadForm> {
    let pi = p as i64;
    if p == 2 {
        return match d.rem_euclid(8) {
            0 => QuadForm::from_ab(2, 0, d),
            4 => QuadForm::from_ab(2, 2, d),
            1 => QuadForm::from_ab(2, 1, d),
            _ => None,
        };
    }
    let r = d.rem_euclid(pi) as u64;
    if r != 0 && pow_mod(r, (p - 1) / 2, p) != 1 {
        return None;
    }
    // b^2 = d mod p with b = d mod 2
    (0..pi)
        .find(|&b| (b * b - d).rem_euclid(pi) == 0)
        .map(|b| if (b - d).rem_euclid(2) == 0 { b } else { pi - b })
        .and_then(|b| QuadForm::from_ab(pi, b, d))
}

pub fn class_group(d: i64) -> Result<QuadraticClassGroup> {
    class_group_bounded(d, DEFAULT_DISCRIMINANT_BOUND)
}

pub fn class_group_bounded(d: i64, bound: u64) -> Result<QuadraticClassGroup> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a fundamental discriminant")));
    }
    if d.unsigned_abs() > bound {
        return Err(Error::Range(format!("|D| = {} above bound {bound}", d.unsigned_abs())));
    }
    if d < 0 {
        let mut g = FormClasses::definite(d);
        let (divisors, generators) = g.structure();
        Ok(QuadraticClassGroup { d, h: g.order(), divisors, generators, narrow: None })
    } else {
        let mut n = FormClasses::indefinite(d, true);
        let (nd, _) = n.structure();
        let mut w = FormClasses::indefinite(d, false);
        let (divisors, generators) = w.structure();
        Ok(QuadraticClassGroup { d, h: w.order(), divisors, generators, narrow: Some((n.order(), nd)) })
    }
}

/// #Cl_K[l] for K = Q(sqrt D).
pub fn torsion_count(d: i64, l: u64) -> Result<u64> {
    if l < 1 {
        return Err(Error::Domain("l must be positive".into()));
    }
    Ok(class_group(d)?.torsion(l))
}

/// Number of distinct primes dividing D (prime discriminant factors).
pub fn prime_discriminant_count(d: i64) -> u32 {
    factorize(d.unsigned_abs()).map_or(0, |f| f.factors.len() as u32)
}

/// Class numbers h(D) for all discriminants -x <= D < 0 (index |D|), by counting reduced
/// forms.  Entries at non-discriminants are zero.
pub fn class_number_table(x: u64) -> Vec<u32> {
    let mut h = vec![0u32; x as usize + 1];
    let x = x as i64;
    let mut a = 1i64;
    while 3 * a * a <= x {
        for b in 0..=a {
            let mut c = a;
            loop {
                let n = 4 * a * c - b * b;
                if n > x {
                    break;
                }
                let both = b > 0 && b < a && c > a;
                h[n as usize] += if both { 2 } else { 1 };
                c += 1;
            }
        }
        a += 1;
    }
    h
}

/// #Cl[l] for a negative fundamental discriminant with known class number.
pub fn torsion_with_class_number(d: i64, h: u64, l: u64) -> u64 {
    if gcd(l, h) == 1 {
        return 1;
    }
    FormClasses::definite_with_h(d, h).torsion(l)
}

/// Largest h / (sqrt|D| log|D|) over negative fundamental discriminants up to x.
pub fn trivial_bound_constant(x: u64) -> f64 {
    let table = class_number_table(x);
    let mut best: f64 = 0.0;
    for m in 3..=x {
        let d = -(m as i64);
        if table[m as usize] > 0 && is_fundamental_discriminant(d) {
            let mf = m as f64;
            best = best.max(table[m as usize] as f64 / (mf.sqrt() * mf.ln()));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn small_groups() {
        let g = class_group(-4).unwrap();
        assert_eq!((g.h, g.divisors.clone()), (1, vec![]));
        let g = class_group(-23).unwrap();
        assert_eq!((g.h, g.divisors.clone()), (3, vec![3]));
        let g = class_group(-120).unwrap();
        assert_eq!((g.h, g.divisors.clone()), (4, vec![2, 2]));
        assert_eq!(torsion_count(-23, 3).unwrap(), 3);
        assert_eq!(torsion_count(-23, 2).unwrap(), 1);
        assert_eq!(torsion_count(-120, 2).unwrap(), 4);
        assert!(class_group(-12).is_err());
        let g = class_group(-4 * 5 * 7 * 11 * 13).unwrap();
        assert_eq!(g.divisors.iter().product::<u64>(), g.h);
        assert!(g.divisors.windows(2).all(|w| w[1] % w[0] == 0));
    }

    #[test]
    fn generators_have_the_right_orders() {
        for d in [-3299, -4 * 1155, -10_007 * 4, -89_923] {
            if !is_fundamental_discriminant(d) {
                continue;
            }
            let g = class_group(d).unwrap();
            let c = FormClasses::definite(d);
            for (f, &o) in g.generators.iter().zip(&g.divisors) {
                assert_eq!(c.pow(*f, o), c.identity());
                for (q, _) in factorize(o).unwrap().factors {
                    assert_ne!(c.pow(*f, o / q), c.identity());
                }
            }
        }
    }

    #[test]
    fn real_groups() {
        // (D, h, h+)
        for (d, h, hp) in [(5, 1, 1), (8, 1, 1), (12, 1, 2), (40, 2, 2), (60, 2, 4), (136, 2, 4), (229, 3, 3), (1365, 4, 8)] {
            let g = class_group(d).unwrap();
            assert_eq!(g.h, h, "D={d}");
            assert_eq!(g.narrow.as_ref().unwrap().0, hp, "D={d}");
        }
    }

    #[test]
    fn real_narrow_closure_matches_cycles() {
        for d in (5..3000i64).filter(|&d| is_fundamental_discriminant(d)) {
            let mut n = FormClasses::indefinite(d, true);
            let hp = n.order();
            let (div, _) = n.structure();
            assert_eq!(div.iter().product::<u64>().max(1), hp, "D={d}");
            // composition respects the cycle partition
            let ones = n.all_classes();
            let e = n.identity();
            for &f in &ones {
                assert_eq!(n.op(f, f.inverse()), e, "D={d} f={f}");
                assert_eq!(n.canonical(f.negate()), n.op(f, n.canonical(QuadForm::principal(d).negate())));
            }
        }
    }

    #[test]
    fn class_number_table_matches_direct_count() {
        let t = class_number_table(5000);
        for m in 3..=5000u64 {
            let d = -(m as i64);
            if is_fundamental_discriminant(d) {
                assert_eq!(t[m as usize] as usize, reduced_forms_definite(d).len(), "D={d}");
            }
        }
    }

    #[test]
    fn torsion_against_bruteforce() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut done = 0;
        while done < 60 {
            let d = -(rng.gen_range(3..2_000_000i64));
            if !is_fundamental_discriminant(d) {
                continue;
            }
            let mut c = FormClasses::definite(d);
            for l in [2, 3, 4, 5, 6, 9] {
                let bf = c.torsion_bruteforce(l);
                assert_eq!(c.torsion(l), bf, "D={d} l={l}");
                assert_eq!(class_group(d).unwrap().torsion(l), bf);
            }
            done += 1;
        }
    }

    #[test]
    fn genus_theory_small() {
        for m in 3..20_000u64 {
            let d = -(m as i64);
            if is_fundamental_discriminant(d) {
                let mu = prime_discriminant_count(d);
                assert_eq!(torsion_count(d, 2).unwrap(), 1 << (mu - 1), "D={d}");
            }
        }
    }
}
