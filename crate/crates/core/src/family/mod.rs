//! The family of cyclic degree-n fields in which every prime not dividing n is either
//! unramified or totally ramified, enumerated by discriminant with local conditions.

mod checkpoint;
mod descriptor;
mod enumerate;
mod lambda;
mod split;

pub use checkpoint::{CheckpointState, Checkpointed};
pub use descriptor::{
    arch_type, discriminant_exponents, discriminant_of, local_behavior, unramified_exponent_at,
    CyclicFieldDescriptor, DescriptorRecord, LocalClass, WildDatum,
};
pub use enumerate::{enumerate_family, FamilyEnumerator, DEFAULT_CONDUCTOR_LIMIT};
pub use lambda::{
    max_conductor_exponent, possible_behaviors, wild_primes, ArchType, LambdaSpec, LocalBehavior,
};
pub use split::SplitTable;

/// Fundamental discriminants D with |D| <= x, by direct sieve (used as an oracle).
pub fn fundamental_discriminants(x: u64) -> Vec<i64> {
    let mut squarefree = vec![true; x as usize + 1];
    let mut q = 2usize;
    while q * q <= x as usize {
        let mut j = q * q;
        while j <= x as usize {
            squarefree[j] = false;
            j += q * q;
        }
        q += 1;
    }
    let mut out = Vec::new();
    for m in 1..=x as i64 {
        for d in [m, -m] {
            let r = d.rem_euclid(4);
            let fundamental = if r == 1 {
                squarefree[m as usize] && d != 1
            } else if r == 0 {
                let k = (d / 4).rem_euclid(4);
                (k == 2 || k == 3) && squarefree[(m / 4) as usize]
            } else {
                false
            };
            if fundamental {
                out.push(d);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{characters_of_order_dividing, euler_phi};

    #[test]
    fn quadratic_fields_to_30() {
        let fields = enumerate_family(2, &LambdaSpec::all(), 30).unwrap();
        let mut d: Vec<i64> = fields.iter().map(|f| f.signed_discriminant()).collect();
        d.sort();
        assert_eq!(
            d,
            vec![-24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 5, 8, 12, 13, 17, 21, 24, 28, 29]
        );
        let real = enumerate_family(2, &LambdaSpec::real_only(), 30).unwrap();
        assert_eq!(real.len(), 9);
        assert!(real.iter().all(|f| f.signed_discriminant() > 0));
    }

    #[test]
    fn cubic_fields_to_400() {
        let fields = enumerate_family(3, &LambdaSpec::all(), 400).unwrap();
        let f: Vec<u64> = fields.iter().map(|d| d.conductor).collect();
        let delta: Vec<u64> = fields.iter().map(|d| d.discriminant).collect();
        assert_eq!(f, vec![7, 9, 13, 19]);
        assert_eq!(delta, vec![49, 81, 169, 361]);
    }

    #[test]
    fn matches_fundamental_discriminant_sieve() {
        let x = 10_000;
        let fields = enumerate_family(2, &LambdaSpec::all(), x).unwrap();
        let mut ours: Vec<i64> = fields.iter().map(|f| f.signed_discriminant()).collect();
        ours.sort();
        let mut oracle = fundamental_discriminants(x);
        oracle.sort();
        assert_eq!(ours, oracle);
        for d in &fields {
            assert_eq!(d.discriminant, d.conductor);
        }
    }

    #[test]
    fn orbit_accounting() {
        for n in [3u32, 4, 5, 6, 8, 12] {
            let top = crate::arith::iroot(u64::MAX, n - 1).min(400);
            let e = FamilyEnumerator::for_conductors(n, &LambdaSpec::all(), top).unwrap();
            let phi = euler_phi(n as u64) as usize;
            for f in 1..=top {
                let emitted = e.fields_with_conductor(f).len();
                let passing = characters_of_order_dividing(f, n)
                    .unwrap()
                    .into_iter()
                    .filter(|c| c.is_primitive() && c.order() == n)
                    .filter(|c| {
                        c.group().components.iter().all(|comp| {
                            n as u64 % comp.prime == 0 || c.component_order(comp) == n
                        })
                    })
                    .count();
                assert_eq!(passing, phi * emitted, "n={n} f={f}");
            }
        }
    }

    #[test]
    fn prime_degree_filter_is_vacuous() {
        for n in [2u32, 3, 5] {
            for f in 1..3000u64 {
                let chars: Vec<_> = characters_of_order_dividing(f, n)
                    .unwrap()
                    .into_iter()
                    .filter(|c| c.is_primitive() && c.order() == n)
                    .collect();
                for c in &chars {
                    for comp in &c.group().components {
                        if n as u64 % comp.prime != 0 {
                            assert_eq!(c.component_order(comp), n);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn splitting() {
        let fields = enumerate_family(2, &LambdaSpec::all(), 30).unwrap();
        let k = fields.iter().find(|f| f.signed_discriminant() == -23).unwrap();
        assert!(k.splits_completely(2));
        assert!(!k.splits_completely(23));
        let cubic = &enumerate_family(3, &LambdaSpec::all(), 49).unwrap()[0];
        assert!(cubic.splits_completely(13));
        assert!(!cubic.splits_completely(2));
        assert!(!cubic.splits_completely(7));
    }

    #[test]
    fn split_table_agrees_with_eval() {
        let e = FamilyEnumerator::new(3, &LambdaSpec::all(), 1_000_000).unwrap();
        let primes = crate::arith::primes_up_to(60);
        let t = SplitTable::new(3, e.conductor_bound(), &primes);
        for d in e.fields_in(1, e.conductor_bound() + 1) {
            for (i, &p) in primes.iter().enumerate() {
                let direct = if d.conductor % p == 0 { None } else { d.character.eval(p as i64) };
                assert_eq!(t.frobenius(&d, i), direct);
            }
        }
    }

    #[test]
    fn checkpoint_resume_reproduces() {
        let dir = tempfile::tempdir().unwrap();
        let e = FamilyEnumerator::new(2, &LambdaSpec::all(), 20_000).unwrap();
        let c = Checkpointed::new(&e, dir.path(), 1500);
        assert!(c.run(Some(3)).unwrap().is_none());
        let resumed = Checkpointed::new(&e, dir.path(), 1500).run(None).unwrap().unwrap();
        let direct: Vec<_> = enumerate_family(2, &LambdaSpec::all(), 20_000)
            .unwrap()
            .iter()
            .map(|d| d.record())
            .collect();
        assert_eq!(resumed, direct);
    }

    #[test]
    fn lambda_partition_sums() {
        let x = 100_000;
        let total = FamilyEnumerator::new(2, &LambdaSpec::all(), x).unwrap().count();
        let mut sum = 0;
        for b in possible_behaviors(2, 2).unwrap() {
            let l = LambdaSpec::all().with_local(2, [b]);
            sum += FamilyEnumerator::new(2, &l, x).unwrap().count();
        }
        assert_eq!(sum, total);
    }
}
