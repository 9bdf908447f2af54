//! The leading constant c_{Q,n,Lambda} of the counting function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{
    characters_of_order_dividing, euler_phi, gcd, multiplicative_order, primes_up_to, valuation,
};
use crate::error::{Error, Result};
use crate::family::{wild_primes, LambdaSpec};
use crate::zeta::{scaled_arch_weight, us_group, UsElement, WildPlace};

/// Primes r = 1 mod n used to decide whether x is an n-th power in Q(mu_n).
const NTH_POWER_WITNESSES: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeadingConstant {
    pub n: u32,
    pub lambda: String,
    pub tame_cutoff: u64,
    /// Residue of the Dedekind zeta function of Q(mu_n) at s = 1.
    pub residue: f64,
    /// Convergent tame Euler product over primes up to the cutoff.
    pub tame_product: f64,
    /// Contribution of the places dividing n and infinity.
    pub wild_factor: f64,
    /// Elements x of U_S(n) contributing to the pole.
    pub pole_elements: Vec<String>,
    /// Constant for characters (phi(n) per field).
    pub per_character: f64,
    /// Constant for fields: N(X) ~ per_field * X^{1/(n-1)}.
    pub per_field: f64,
    /// Estimated relative error from truncating the tame product.
    pub truncation_error: f64,
    /// The wild factor vanishes, so Lambda selects a set of density zero.
    pub vacuous: bool,
}

/// L(1, chi) for a primitive nontrivial character of conductor k given by its values
/// chi(a) for a = 1..k (zero for non-units), via the digamma function.
pub fn l_value_at_one(values: &[Complex64]) -> Complex64 {
    let k = values.len() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        if v.norm_sqr() > 0.0 {
            acc += v * statrs::function::gamma::digamma((i + 1) as f64 / k);
        }
    }
    -acc / k
}

/// Residue at s = 1 of the Dedekind zeta function of Q(mu_n): the product of L(1, chi)
/// over the nontrivial characters mod n.
pub fn cyclotomic_residue(n: u32) -> Result<f64> {
    if n <= 2 {
        return Ok(1.0);
    }
    let phi = euler_phi(n as u64) as u32;
    let order = phi.max(2);
    let mut prod = Complex64::new(1.0, 0.0);
    for chi in characters_of_order_dividing(n as u64, order)? {
        if chi.is_trivial() {
            continue;
        }
        let prim = chi.primitive_part();
        let k = prim.modulus();
        let values: Vec<Complex64> = (1..=k)
            .map(|a| match prim.eval(a as i64) {
                Some(e) => Complex64::from_polar(1.0, std::f64::consts::TAU * e as f64 / order as f64),
                None => Complex64::new(0.0, 0.0),
            })
            .collect();
        prod *= l_value_at_one(&values);
    }
    if prod.im.abs() > 1e-9 * prod.re.abs() {
        return Err(Error::Invariant(format!("residue has imaginary part {}", prod.im)));
    }
    Ok(prod.re)
}

/// The same residue from the truncated Euler product prod_p (1 - 1/p) zeta_{K,p}(1).
pub fn cyclotomic_residue_euler(n: u32, cutoff: u64) -> f64 {
    let mut log = 0.0;
    for p in primes_up_to(cutoff) {
        let pf = p as f64;
        log += (1.0 - 1.0 / pf).ln();
        let (f, g) = residue_degree(n, p);
        log -= g as f64 * (1.0 - pf.powi(-(f as i32))).ln();
    }
    log.exp()
}

/// Residue degree and number of primes above p in Q(mu_n).
fn residue_degree(n: u32, p: u64) -> (u64, u64) {
    let m = n as u64 / p.pow(valuation(n as u64, p));
    if m <= 1 {
        return (1, 1);
    }
    let f = multiplicative_order(p % m, m);
    (f, euler_phi(m) / f)
}

/// prod over q not dividing n of the Euler factor of zeta_{Q(mu_n)}(1)^{-1}, times
/// (1 + phi(n)/q) when q = 1 mod n.
pub fn tame_product(n: u32, cutoff: u64) -> f64 {
    let phi = euler_phi(n as u64) as f64;
    let mut log = 0.0;
    for q in primes_up_to(cutoff) {
        if n as u64 % q == 0 {
            continue;
        }
        let qf = q as f64;
        if q % n as u64 == 1 {
            log += (1.0 + phi / qf).ln() + phi * (-1.0 / qf).ln_1p();
        } else {
            let (f, g) = residue_degree(n, q);
            log += g as f64 * (-qf.powi(-(f as i32))).ln_1p();
        }
    }
    log.exp()
}

/// True if x passes d_r(x) = n at the first witnesses r = 1 mod n.
fn is_nth_power_in_cyclotomic(x: &UsElement, witnesses: &[u64]) -> bool {
    witnesses.iter().all(|&r| x.power_residue_degree(r).map_or(false, |d| d == x.n))
}

/// Sum over the x in U_S(n) that are n-th powers in Q(mu_n) of the archimedean and wild
/// Fourier factors at s = 1/(n-1), with the local zeta factors of Q(mu_n) at p | n removed.
pub fn wild_factor(n: u32, lambda: &LambdaSpec) -> Result<(f64, Vec<String>)> {
    let wild = wild_primes(n);
    let places: Vec<WildPlace> =
        wild.iter().map(|&p| WildPlace::new(n, p, lambda, false)).collect::<Result<_>>()?;
    let witnesses: Vec<u64> = primes_up_to(1 << 22)
        .into_iter()
        .filter(|&r| r % n as u64 == 1 && gcd(r, n as u64) == 1)
        .take(NTH_POWER_WITNESSES)
        .collect();
    let s = 1.0 / (n as f64 - 1.0);
    let arch_den = if n % 2 == 0 { 2.0 } else { 1.0 };
    let mut total = Complex64::new(0.0, 0.0);
    let mut pole = Vec::new();
    for x in us_group(n, &wild)? {
        if !is_nth_power_in_cyclotomic(&x, &witnesses) {
            continue;
        }
        pole.push(x.to_string());
        let mut term = Complex64::new(scaled_arch_weight(n, lambda, x.sign) as f64 / arch_den, 0.0);
        for place in &places {
            let k = x.exponents.iter().find(|&&(q, _)| q == place.p).unwrap().1;
            let u = x.residue_skipping(place.modulus, Some(place.p)).expect("S-unit");
            let pf = place.p as f64;
            let local: Complex64 = place
                .scaled_factor(k, u)
                .into_iter()
                .map(|(e, c)| c.to_complex() * pf.powf(-(e as f64) * s))
                .sum();
            let (f, g) = residue_degree(n, place.p);
            term *= local / n as f64 * (1.0 - pf.powi(-(f as i32))).powi(g as i32);
        }
        total += term;
    }
    if total.im.abs() > 1e-9 {
        return Err(Error::Invariant(format!("wild factor has imaginary part {}", total.im)));
    }
    Ok((total.re, pole))
}

pub fn leading_constant(n: u32, lambda: &LambdaSpec, tame_cutoff: u64) -> Result<LeadingConstant> {
    if n < 2 {
        return Err(Error::Domain("degree must be at least 2".into()));
    }
    if tame_cutoff < 1000 {
        return Err(Error::Domain("tame cutoff must be at least 1000".into()));
    }
    lambda.validate(n)?;
    let residue = cyclotomic_residue(n)?;
    let tame = tame_product(n, tame_cutoff);
    let (w, pole_elements) = wild_factor(n, lambda)?;
    let phi = euler_phi(n as u64) as f64;
    let per_character = residue * tame * w;
    let y = tame_cutoff as f64;
    Ok(LeadingConstant {
        n,
        lambda: lambda.digest(),
        tame_cutoff,
        residue,
        tame_product: tame,
        wild_factor: w,
        pole_elements,
        per_character,
        per_field: per_character / phi,
        truncation_error: phi * phi / (y * y.ln()),
        vacuous: w.abs() < 1e-15,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::ArchType;

    #[test]
    fn quadratic_constant() {
        let c = leading_constant(2, &LambdaSpec::all(), 1_000_000).unwrap();
        let target = 6.0 / std::f64::consts::PI.powi(2);
        assert!((c.per_field - target).abs() < 1e-5, "{}", c.per_field);
        let im = leading_constant(2, &LambdaSpec::imaginary_only(), 1_000_000).unwrap();
        assert!((im.per_field - target / 2.0).abs() < 1e-5);
        let none = LambdaSpec::all().with_arch(std::iter::empty::<ArchType>());
        assert!(leading_constant(2, &none, 1000).is_err());
        assert!(!c.vacuous);
        assert!(leading_constant(2, &LambdaSpec::all(), 10).is_err());
    }

    #[test]
    fn cubic_constant_parts() {
        let c = leading_constant(3, &LambdaSpec::all(), 100_000).unwrap();
        assert!((c.residue - std::f64::consts::PI / (3.0 * 3f64.sqrt())).abs() < 1e-12);
        assert!((c.wild_factor - 22.0 / 27.0).abs() < 1e-12, "{}", c.wild_factor);
        assert_eq!(c.pole_elements, vec!["1"]);
    }

    #[test]
    fn residues_agree_with_euler_product() {
        for n in [3u32, 4, 5, 7, 8, 12] {
            let a = cyclotomic_residue(n).unwrap();
            let b = cyclotomic_residue_euler(n, 2_000_000);
            assert!((a / b - 1.0).abs() < 0.02, "n={n} {a} {b}");
        }
        assert!((cyclotomic_residue(4).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn quartic_pole_includes_minus_four() {
        let c = leading_constant(4, &LambdaSpec::all(), 1000).unwrap();
        assert!(c.pole_elements.contains(&"-2^2".to_string()), "{:?}", c.pole_elements);
    }
}
