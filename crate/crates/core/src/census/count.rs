use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::constant::leading_constant;
use super::constants::paper_constants;
use crate::arith::{euler_phi, is_prime, primes_up_to};
use crate::error::{Error, Result};
use crate::family::{FamilyEnumerator, LambdaSpec, SplitTable};

/// delta_p: density of members split completely at a prime p not dividing n.
pub fn delta_local(p: u64, n: u32) -> Result<Rational64> {
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if n as u64 % p == 0 {
        return Err(Error::Domain(format!("{p} divides {n}")));
    }
    let n64 = n as i64;
    if p % n as u64 != 1 {
        return Ok(Rational64::new(1, n64));
    }
    let phi = euler_phi(n as u64) as i64;
    // 1 / (n (1 + phi/p)) = p / (n (p + phi))
    Ok(Rational64::new(p as i64, n64 * (p as i64 + phi)))
}

/// delta for a finite set of distinct primes (multiplicative).
pub fn delta_set(p_set: &[u64], n: u32) -> Result<Rational64> {
    let mut seen = p_set.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.iter().try_fold(Rational64::from_integer(1), |acc, &p| Ok(acc * delta_local(p, n)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub n: u32,
    pub lambda: String,
    pub split_primes: Vec<u64>,
    pub grid: Vec<u64>,
    pub counts: Vec<u64>,
    /// Least-squares c in N(X) ~ c X^{1/(n-1)} over the grid.
    pub fitted_leading: f64,
    /// Analytic delta_P c_{Q,n,Lambda} per field.
    pub predicted_leading: f64,
    /// Fitted exponent of the error against the analytic main term, when the grid allows.
    pub fitted_error_exponent: Option<f64>,
}

/// Discriminants of the members passing the split condition, sorted.
pub fn census_discriminants(n: u32, lambda: &LambdaSpec, p_set: &[u64], x: u64) -> Result<Vec<u64>> {
    for &p in p_set {
        if n as u64 % p == 0 {
            return Err(Error::Domain(format!("split prime {p} divides {n}")));
        }
    }
    let e = FamilyEnumerator::new(n, lambda, x)?;
    let mut all = e.fold(
        Vec::new,
        |mut v, d| {
            if p_set.iter().all(|&p| d.splits_completely(p)) {
                v.push(d.discriminant);
            }
            v
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    all.sort_unstable();
    Ok(all)
}

pub fn count_census(n: u32, lambda: &LambdaSpec, p_set: &[u64], grid: &[u64]) -> Result<CensusResult> {
    if grid.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let top = *grid.last().unwrap();
    let discs = census_discriminants(n, lambda, p_set, top)?;
    let counts: Vec<u64> = grid.iter().map(|&x| discs.partition_point(|&d| d <= x) as u64).collect();
    let rho = 1.0 / (n as f64 - 1.0);
    let (num, den) = grid.iter().zip(&counts).fold((0.0, 0.0), |(a, b), (&x, &c)| {
        let t = (x as f64).powf(rho);
        (a + c as f64 * t, b + t * t)
    });
    let delta = delta_set(p_set, n)?;
    let c = leading_constant(n, lambda, 1_000_000)?;
    let predicted = c.per_field * (*delta.numer() as f64 / *delta.denom() as f64);
    let mut split_primes = p_set.to_vec();
    split_primes.sort_unstable();
    let mut result = CensusResult {
        n,
        lambda: lambda.digest(),
        split_primes,
        grid,
        counts,
        fitted_leading: num / den,
        predicted_leading: predicted,
        fitted_error_exponent: None,
    };
    if let Ok(fit) = error_exponent_fit(&result, predicted) {
        result.fitted_error_exponent = fit.exponent;
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorFit {
    /// None when every residual is below the noise floor.
    pub exponent: Option<f64>,
    /// Two standard errors of the slope.
    pub half_width: f64,
    /// (1 - b)/(n - 1) + 0.1 for m = 1.
    pub bound: f64,
    pub below_noise_floor: bool,
    pub points_used: usize,
    pub pass: bool,
}

/// Log-log least-squares slope of |N(X) - c X^{1/(n-1)}| over the grid.
pub fn error_exponent_fit(result: &CensusResult, main_coefficient: f64) -> Result<ErrorFit> {
    let g = &result.grid;
    if g.len() < 8 {
        return Err(Error::Domain(format!("need at least 8 grid points, have {}", g.len())));
    }
    let lo = *g.first().unwrap() as f64;
    let hi = *g.last().unwrap() as f64;
    if hi / lo.max(1.0) < 1000.0 {
        return Err(Error::Domain("grid must span at least 3 decades".into()));
    }
    let n = result.n;
    let rho = 1.0 / (n as f64 - 1.0);
    let b = paper_constants(1, n)?.b;
    let bound = (1.0 - *b.numer() as f64 / *b.denom() as f64) / (n as f64 - 1.0) + 0.1;
    let pts: Vec<(f64, f64)> = g
        .iter()
        .zip(&result.counts)
        .filter_map(|(&x, &c)| {
            let main = main_coefficient * (x as f64).powf(rho);
            let r = (c as f64 - main).abs();
            (r > 1e-9 * main.max(1.0)).then(|| ((x as f64).ln(), r.ln()))
        })
        .collect();
    if pts.len() < 3 {
        return Ok(ErrorFit {
            exponent: None,
            half_width: 0.0,
            bound,
            below_noise_floor: true,
            points_used: pts.len(),
            pass: true,
        });
    }
    let (slope, se) = least_squares_slope(&pts);
    Ok(ErrorFit {
        exponent: Some(slope),
        half_width: 2.0 * se,
        bound,
        below_noise_floor: false,
        points_used: pts.len(),
        pass: slope <= bound,
    })
}

/// Slope and its standard error.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum();
    let se = if pts.len() > 2 { (rss / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, se)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCount {
    pub n: u32,
    pub x: u64,
    /// sum over m <= X of a_m log(X/m), a_m counting characters.
    pub value: f64,
    /// The same quantity as the integral of N(t)/t from 1 to X.
    pub integral: f64,
    /// (n-1) delta_P c X^{1/(n-1)} with c per character.
    pub main_term: f64,
    pub ratio: f64,
}

pub fn weighted_count(n: u32, lambda: &LambdaSpec, p_set: &[u64], x: u64) -> Result<WeightedCount> {
    let discs = census_discriminants(n, lambda, p_set, x)?;
    let phi = euler_phi(n as u64) as f64;
    let xf = x as f64;
    let value: f64 = discs.iter().map(|&m| phi * (xf / m as f64).ln()).sum();
    // N is constant on [d_i, d_{i+1})
    let mut integral = 0.0;
    for (i, &d) in discs.iter().enumerate() {
        let next = discs.get(i + 1).map_or(xf, |&e| e as f64);
        integral += phi * (i + 1) as f64 * (next / d as f64).ln();
    }
    let delta = delta_set(p_set, n)?;
    let c = leading_constant(n, lambda, 1_000_000)?;
    let main_term = (n as f64 - 1.0)
        * (*delta.numer() as f64 / *delta.denom() as f64)
        * c.per_character
        * xf.powf(1.0 / (n as f64 - 1.0));
    Ok(WeightedCount {
        n,
        x,
        value,
        integral,
        main_term,
        ratio: if main_term > 0.0 { value / main_term } else { f64::NAN },
    })
}

/// Per-prime and pairwise split counts over one enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitProfile {
    pub n: u32,
    pub x: u64,
    pub total: u64,
    pub primes: Vec<u64>,
    pub splits: Vec<u64>,
    /// pairs[i][j] = members split at both primes[i] and primes[j].
    pub pairs: Vec<Vec<u64>>,
}

pub fn split_profile(n: u32, lambda: &LambdaSpec, x: u64, primes: &[u64]) -> Result<SplitProfile> {
    let e = FamilyEnumerator::new(n, lambda, x)?;
    let table = SplitTable::new(n, e.conductor_bound(), primes);
    let k = primes.len();
    let zero = || (0u64, vec![0u64; k], vec![0u64; k * k]);
    let (total, splits, flat) = e.fold(
        zero,
        |(t, mut s, mut pr), d| {
            let hit: Vec<usize> = (0..k).filter(|&i| table.splits(d, i)).collect();
            for &i in &hit {
                s[i] += 1;
                for &j in &hit {
                    pr[i * k + j] += 1;
                }
            }
            (t + 1, s, pr)
        },
        |(t1, s1, p1), (t2, s2, p2)| {
            (
                t1 + t2,
                s1.iter().zip(&s2).map(|(a, b)| a + b).collect(),
                p1.iter().zip(&p2).map(|(a, b)| a + b).collect(),
            )
        },
    );
    Ok(SplitProfile {
        n,
        x,
        total,
        primes: primes.to_vec(),
        splits,
        pairs: flat.chunks(k.max(1)).map(|c| c.to_vec()).collect(),
    })
}

/// Primes up to z that are not divisors of n.
pub fn tame_primes_up_to(z: u64, n: u32) -> Vec<u64> {
    primes_up_to(z).into_iter().filter(|&p| n as u64 % p != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_densities() {
        assert_eq!(delta_local(3, 2).unwrap(), Rational64::new(3, 8));
        assert_eq!(delta_local(5, 3).unwrap(), Rational64::new(1, 3));
        assert_eq!(delta_local(7, 3).unwrap(), Rational64::new(7, 27));
        assert!(delta_local(3, 3).is_err());
        for n in 2..=12u32 {
            let phi = euler_phi(n as u64) as i64;
            let lower = Rational64::new(n as i64 + 1, n as i64 * (n as i64 + 1 + phi));
            for p in tame_primes_up_to(500, n) {
                let d = delta_local(p, n).unwrap();
                assert!(d <= Rational64::new(1, n as i64) && d >= lower, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn small_census() {
        let r = count_census(2, &LambdaSpec::all(), &[], &[30]).unwrap();
        assert_eq!(r.counts, vec![19]);
        let r = count_census(3, &LambdaSpec::all(), &[13], &[49]).unwrap();
        assert_eq!(r.counts, vec![1]);
        assert!(count_census(3, &LambdaSpec::all(), &[3], &[49]).is_err());
    }

    #[test]
    fn monotone_in_x_and_p() {
        let grid = [100, 1000, 10_000, 100_000];
        let a = count_census(2, &LambdaSpec::all(), &[], &grid).unwrap();
        let b = count_census(2, &LambdaSpec::all(), &[3], &grid).unwrap();
        let c = count_census(2, &LambdaSpec::all(), &[3, 7], &grid).unwrap();
        for i in 0..grid.len() {
            assert!(c.counts[i] <= b.counts[i] && b.counts[i] <= a.counts[i]);
            if i > 0 {
                assert!(a.counts[i] >= a.counts[i - 1]);
            }
        }
    }

    #[test]
    fn weighted_count_identity() {
        let w = weighted_count(2, &LambdaSpec::all(), &[], 100).unwrap();
        assert!((w.value - w.integral).abs() < 1e-9 * w.value);
        assert_eq!(weighted_count(3, &LambdaSpec::all(), &[], 40).unwrap().value, 0.0);
        let w = weighted_count(3, &LambdaSpec::all(), &[], 1_000_000).unwrap();
        assert!((w.ratio - 1.0).abs() < 0.05, "{}", w.ratio);
    }

    #[test]
    fn synthetic_fit_below_noise_floor() {
        let grid: Vec<u64> = (0..9).map(|k| 10u64.pow(k / 2 + 1) * if k % 2 == 1 { 3 } else { 1 }).collect();
        let counts = grid.clone();
        let r = CensusResult {
            n: 2,
            lambda: "all".into(),
            split_primes: vec![],
            grid,
            counts,
            fitted_leading: 1.0,
            predicted_leading: 1.0,
            fitted_error_exponent: None,
        };
        let f = error_exponent_fit(&r, 1.0).unwrap();
        assert!(f.below_noise_floor && f.exponent.is_none() && f.pass);
        let short = CensusResult { grid: vec![10, 100], counts: vec![1, 2], ..r };
        assert!(error_exponent_fit(&short, 1.0).is_err());
    }

    #[test]
    fn split_profile_matches_filters() {
        let prof = split_profile(2, &LambdaSpec::all(), 20_000, &[3, 5, 7]).unwrap();
        let only3 = census_discriminants(2, &LambdaSpec::all(), &[3], 20_000).unwrap();
        let both = census_discriminants(2, &LambdaSpec::all(), &[3, 5], 20_000).unwrap();
        assert_eq!(prof.splits[0], only3.len() as u64);
        assert_eq!(prof.pairs[0][1], both.len() as u64);
        assert_eq!(prof.pairs[1][1], prof.splits[1]);
    }
}
