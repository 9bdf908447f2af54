//! Chebyshev sieve over an enumerated family: split-prime counts per member and per prime,
//! the mean M(z), remainder sums and the second-moment bound on the exceptional set.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::census::{delta_local, paper_constants};
use crate::error::{Error, Result};
use crate::family::{FamilyEnumerator, LambdaSpec, SplitTable};

/// Pairwise counts are kept only for z up to this bound.
pub const PAIRWISE_Z_CAP: u64 = 1000;
pub const DEFAULT_EPSILON: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub n: u32,
    #[serde(default)]
    pub lambda: LambdaSpec,
    pub x: u64,
    pub z: u64,
    /// Primes left out of the sieve; the divisors of n are always left out.
    #[serde(default)]
    pub excluded: Vec<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Defaults to (rho - tau)/(1 + 2 sigma) for m = 1.
    #[serde(default)]
    pub delta0: Option<f64>,
    #[serde(default = "default_true")]
    pub pairwise: bool,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_true() -> bool {
    true
}

impl SieveConfig {
    pub fn new(n: u32, x: u64, z: u64) -> Self {
        SieveConfig {
            n,
            lambda: LambdaSpec::all(),
            x,
            z,
            excluded: Vec::new(),
            epsilon: DEFAULT_EPSILON,
            delta0: None,
            pairwise: true,
        }
    }

    pub fn delta0(&self) -> Result<f64> {
        match self.delta0 {
            Some(d) => Ok(d),
            None => Ok(ratio_f64(paper_constants(1, self.n)?.delta_tilde_zero)),
        }
    }

    pub fn sieving_primes(&self) -> Vec<u64> {
        primes_up_to(self.z)
            .into_iter()
            .filter(|&p| self.n as u64 % p != 0 && !self.excluded.contains(&p))
            .collect()
    }
}

fn ratio_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Split pattern of every member at the sieving primes, one bit row per member.
#[derive(Debug, Clone)]
pub struct SieveData {
    pub primes: Vec<u64>,
    pub deltas: Vec<Rational64>,
    words: usize,
    rows: Vec<u64>,
}

impl SieveData {
    /// Rows given as the sets of split prime indices.
    pub fn from_sets(primes: Vec<u64>, deltas: Vec<Rational64>, sets: &[Vec<usize>]) -> Result<Self> {
        if primes.len() != deltas.len() {
            return Err(Error::Domain("one density per prime".into()));
        }
        let words = primes.len().div_ceil(64).max(1);
        let mut rows = vec![0u64; words * sets.len()];
        for (a, s) in sets.iter().enumerate() {
            for &i in s {
                if i >= primes.len() {
                    return Err(Error::Domain(format!("prime index {i} out of range")));
                }
                rows[a * words + i / 64] |= 1 << (i % 64);
            }
        }
        Ok(SieveData { primes, deltas, words, rows })
    }

    pub fn from_config(cfg: &SieveConfig) -> Result<Self> {
        if cfg.z < 2 {
            return Err(Error::Domain("z must be at least 2".into()));
        }
        if cfg.pairwise && cfg.z > PAIRWISE_Z_CAP {
            return Err(Error::Range(format!("pairwise counts need z <= {PAIRWISE_Z_CAP}")));
        }
        let primes = cfg.sieving_primes();
        let deltas = primes.iter().map(|&p| delta_local(p, cfg.n)).collect::<Result<Vec<_>>>()?;
        let e = FamilyEnumerator::new(cfg.n, &cfg.lambda, cfg.x)?;
        let table = SplitTable::new(cfg.n, e.conductor_bound(), &primes);
        let words = primes.len().div_ceil(64).max(1);
        let rows = e.fold(
            Vec::new,
            |mut v, d| {
                let base = v.len();
                v.resize(base + words, 0u64);
                for i in 0..primes.len() {
                    if table.splits(d, i) {
                        v[base + i / 64] |= 1 << (i % 64);
                    }
                }
                v
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        Ok(SieveData { primes, deltas, words, rows })
    }

    pub fn fields(&self) -> usize {
        self.rows.len() / self.words
    }

    /// N(a) for every member.
    pub fn split_numbers(&self) -> Vec<u32> {
        self.rows.chunks(self.words).map(|r| r.iter().map(|w| w.count_ones()).sum()).collect()
    }

    pub fn split_counts(&self) -> Vec<u64> {
        let mut c = vec![0u64; self.primes.len()];
        for r in self.rows.chunks(self.words) {
            for (i, ci) in c.iter_mut().enumerate() {
                *ci += (r[i / 64] >> (i % 64)) & 1;
            }
        }
        c
    }

    /// #A_pq for p < q, as a dense upper triangle.
    fn pair_counts(&self) -> Vec<Vec<u64>> {
        let k = self.primes.len();
        let n = self.fields();
        let cw = n.div_ceil(64);
        let mut cols = vec![vec![0u64; cw]; k];
        for (a, r) in self.rows.chunks(self.words).enumerate() {
            for (i, col) in cols.iter_mut().enumerate() {
                if (r[i / 64] >> (i % 64)) & 1 == 1 {
                    col[a / 64] |= 1 << (a % 64);
                }
            }
        }
        use rayon::prelude::*;
        (0..k)
            .into_par_iter()
            .map(|i| {
                (i + 1..k)
                    .map(|j| cols[i].iter().zip(&cols[j]).map(|(x, y)| (x & y).count_ones() as u64).sum())
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    pub p: u64,
    pub q: u64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveReport {
    pub config: Option<SieveConfig>,
    pub fields: u64,
    pub primes: Vec<u64>,
    pub split_counts: Vec<u64>,
    /// Nonzero #A_pq with p < q; empty when pairwise counts are off.
    pub pair_counts: Vec<PairCount>,
    /// Exact values are "a/b" strings, with float companions.
    pub u: String,
    pub u_value: f64,
    pub mean_by_fields: String,
    pub mean_by_primes: String,
    pub means_agree: bool,
    pub mean: f64,
    pub sum_abs_r: String,
    pub sum_abs_r_value: f64,
    /// sum over ordered pairs (p, q) of |R_pq|, diagonal R_pp = R_p.
    pub sum_abs_r_pairs: Option<String>,
    pub sum_abs_r_pairs_value: Option<f64>,
    /// histogram[k] = members with exactly k split sieving primes.
    pub histogram: Vec<u64>,
    pub exceptional_half_mean: u64,
    pub variance_sum: String,
    pub rhs: Option<String>,
    pub rhs_value: Option<f64>,
    pub inequality_holds: Option<bool>,
    /// X^{delta0 - epsilon} and E(A; z, X^{delta0 - epsilon}).
    pub asymptotic_threshold: Option<f64>,
    pub exceptional_asymptotic: Option<u64>,
    /// max_p |R_p| / (p^sigma X^tau).
    pub remainder_scale: Option<f64>,
}

impl SieveReport {
    /// E(A; z, M) = #{a : N(a) <= M}.
    pub fn exceptional_count(&self, m: f64) -> u64 {
        if m < 0.0 {
            return 0;
        }
        self.histogram.iter().take(m.floor() as usize + 1).sum()
    }

    /// (p, #A_p, R_p) rows.
    pub fn remainder_rows(&self) -> Vec<(u64, u64, f64)> {
        let n = self.fields as f64;
        self.primes
            .iter()
            .zip(&self.split_counts)
            .map(|(&p, &c)| {
                let d = self.config.as_ref().and_then(|cfg| delta_local(p, cfg.n).ok()).map_or(0.0, ratio_f64);
                (p, c, c as f64 - d * n)
            })
            .collect()
    }
}

fn big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact sieve statistics. Errors with `Vacuous` when M(z) = 0.
pub fn analyze(data: &SieveData, pairwise: bool) -> Result<SieveReport> {
    let nf = data.fields() as u64;
    if nf == 0 {
        return Err(Error::Domain("empty family".into()));
    }
    let counts = data.split_counts();
    let per_field = data.split_numbers();
    let n_big = int(nf);
    let total_p: u64 = counts.iter().sum();
    let total_a: u64 = per_field.iter().map(|&v| v as u64).sum();
    let mean_p = int(total_p) / &n_big;
    let mean_a = int(total_a) / &n_big;
    if total_p == 0 {
        return Err(Error::Vacuous("M(z) = 0".into()));
    }
    let deltas: Vec<BigRational> = data.deltas.iter().map(|&d| big(d)).collect();
    let u: BigRational = deltas.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
    let r_p: Vec<BigRational> = counts.iter().zip(&deltas).map(|(&c, d)| int(c) - d * &n_big).collect();
    let sum_r = r_p.iter().fold(BigRational::zero(), |a, r| a + r.abs());

    let k = per_field.iter().copied().max().unwrap_or(0) as usize;
    let mut histogram = vec![0u64; k + 1];
    for &v in &per_field {
        histogram[v as usize] += 1;
    }
    // N(a) <= M/2  <=>  2 N N(a) <= sum_p #A_p
    let exceptional_half_mean =
        per_field.iter().filter(|&&v| 2 * nf as u128 * v as u128 <= total_p as u128).count() as u64;
    let variance = per_field.iter().fold(BigRational::zero(), |acc, &v| {
        let d = int(v as u64) - &mean_p;
        acc + &d * &d
    });

    let mut report = SieveReport {
        config: None,
        fields: nf,
        primes: data.primes.clone(),
        split_counts: counts.clone(),
        pair_counts: Vec::new(),
        u_value: to_f64(&u),
        u: u.to_string(),
        mean_by_fields: mean_a.to_string(),
        mean_by_primes: mean_p.to_string(),
        means_agree: mean_a == mean_p,
        mean: to_f64(&mean_p),
        sum_abs_r_value: to_f64(&sum_r),
        sum_abs_r: sum_r.to_string(),
        sum_abs_r_pairs: None,
        sum_abs_r_pairs_value: None,
        histogram,
        exceptional_half_mean,
        variance_sum: variance.to_string(),
        rhs: None,
        rhs_value: None,
        inequality_holds: None,
        asymptotic_threshold: None,
        exceptional_asymptotic: None,
        remainder_scale: None,
    };
    if pairwise {
        let pairs = data.pair_counts();
        let mut sum_pairs = sum_r.clone();
        let two = int(2);
        for (i, row) in pairs.iter().enumerate() {
            for (off, &c) in row.iter().enumerate() {
                let j = i + 1 + off;
                if c > 0 {
                    report.pair_counts.push(PairCount { p: data.primes[i], q: data.primes[j], count: c });
                }
                let r = int(c) - &deltas[i] * &deltas[j] * &n_big;
                sum_pairs += &two * r.abs();
            }
        }
        let rn = &sum_r / &n_big;
        let bracket = &u + &sum_pairs / &n_big + &two * &u * &rn + &rn * &rn;
        let rhs = int(4) * &n_big / (&mean_p * &mean_p) * bracket;
        report.inequality_holds = Some(int(exceptional_half_mean) <= rhs);
        report.rhs_value = Some(to_f64(&rhs));
        report.rhs = Some(rhs.to_string());
        report.sum_abs_r_pairs_value = Some(to_f64(&sum_pairs));
        report.sum_abs_r_pairs = Some(sum_pairs.to_string());
    }
    Ok(report)
}

/// Statistics for an enumerated family, with the asymptotic threshold X^(delta0 - epsilon) filled in.
pub fn sieve_stats(cfg: &SieveConfig) -> Result<SieveReport> {
    let data = SieveData::from_config(cfg)?;
    let mut report = analyze(&data, cfg.pairwise)?;
    let delta0 = cfg.delta0()?;
    let x = cfg.x as f64;
    let threshold = x.powf(delta0 - cfg.epsilon);
    report.asymptotic_threshold = Some(threshold);
    report.exceptional_asymptotic = Some(report.exceptional_count(threshold));
    let pc = paper_constants(1, cfg.n)?;
    let (sigma, tau) = (ratio_f64(pc.sigma), ratio_f64(pc.tau));
    let n = report.fields as f64;
    let scale = data
        .primes
        .iter()
        .zip(&report.split_counts)
        .zip(&data.deltas)
        .map(|((&p, &c), &d)| (c as f64 - ratio_f64(d) * n).abs() / ((p as f64).powf(sigma) * x.powf(tau)))
        .fold(0.0, f64::max);
    report.remainder_scale = Some(scale);
    report.config = Some(cfg.clone());
    Ok(report)
}

pub fn exceptional_count(cfg: &SieveConfig, m: f64) -> Result<u64> {
    let data = SieveData::from_config(cfg)?;
    Ok(data.split_numbers().iter().filter(|&&v| v as f64 <= m).count() as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalPoint {
    pub x: u64,
    pub z: u64,
    pub threshold: f64,
    pub fields: u64,
    pub exceptional: u64,
    /// E / X^{rho - delta0}
    pub normalized: f64,
}

/// E(A; X^{delta0}, X^{delta0 - epsilon}) / X^{rho - delta0} along a grid.
pub fn exceptional_scan(n: u32, lambda: &LambdaSpec, grid: &[u64], epsilon: f64) -> Result<Vec<ExceptionalPoint>> {
    let pc = paper_constants(1, n)?;
    let delta0 = ratio_f64(pc.delta_tilde_zero);
    let rho = ratio_f64(pc.rho);
    grid.iter()
        .map(|&x| {
            let xf = x as f64;
            let z = xf.powf(delta0).floor() as u64;
            let threshold = xf.powf(delta0 - epsilon);
            let mut cfg = SieveConfig::new(n, x, z.max(2));
            cfg.lambda = lambda.clone();
            cfg.pairwise = false;
            let data = SieveData::from_config(&cfg)?;
            let e = data.split_numbers().iter().filter(|&&v| v as f64 <= threshold).count() as u64;
            Ok(ExceptionalPoint {
                x,
                z,
                threshold,
                fields: data.fields() as u64,
                exceptional: e,
                normalized: e as f64 / xf.powf(rho - delta0),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketPoint {
    pub x: u64,
    pub z: u64,
    pub mean: f64,
    /// M(X^{delta0}) log X / X^{delta0}
    pub ratio: f64,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanBracket {
    pub n: u32,
    pub c1: f64,
    pub c2: f64,
    pub points: Vec<BracketPoint>,
    pub violations: Vec<u64>,
    /// The window is an empirical stand-in for existential constants.
    pub note: String,
}

impl MeanBracket {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Frozen window [c1, c2] for M(X^{delta0}) log X / X^{delta0}.
pub fn frozen_bracket(n: u32) -> (f64, f64) {
    match n {
        2 => (0.8, 2.6),
        3 => (0.3, 3.0),
        _ => (0.1, 10.0),
    }
}

pub fn mean_bracket_check(n: u32, lambda: &LambdaSpec, grid: &[u64]) -> Result<MeanBracket> {
    let delta0 = ratio_f64(paper_constants(1, n)?.delta_tilde_zero);
    let (c1, c2) = frozen_bracket(n);
    let mut points = Vec::new();
    let mut violations = Vec::new();
    for &x in grid {
        let xf = x as f64;
        let z = xf.powf(delta0).floor() as u64;
        let mut cfg = SieveConfig::new(n, x, z.max(2));
        cfg.lambda = lambda.clone();
        cfg.pairwise = false;
        let data = SieveData::from_config(&cfg)?;
        let counts = data.split_counts();
        let mean = counts.iter().sum::<u64>() as f64 / data.fields().max(1) as f64;
        if z < 2 || mean == 0.0 {
            return Err(Error::Vacuous(format!("M(z) = 0 at X = {x}")));
        }
        let ratio = mean * xf.ln() / xf.powf(delta0);
        let inside = ratio >= c1 && ratio <= c2;
        if !inside {
            violations.push(x);
        }
        points.push(BracketPoint { x, z, mean, ratio, inside });
    }
    Ok(MeanBracket {
        n,
        c1,
        c2,
        points,
        violations,
        note: "c1, c2 fitted once on the reference grid and frozen".into(),
    })
}
