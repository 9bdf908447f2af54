use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, factorize, gcd, valuation};
use crate::error::{Error, Result};
use crate::zeta::cyclotomic_polynomial;

/// Integer polynomial, coefficients from the constant term up.
pub type Poly = Vec<i64>;

pub fn degree(f: &[i64]) -> Option<usize> {
    f.iter().rposition(|&c| c != 0)
}

pub fn format_poly(f: &[i64]) -> String {
    let mut out = String::new();
    for (i, &c) in f.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 { "-" } else if out.is_empty() { "" } else { "+" };
        let mag = c.unsigned_abs();
        let coef = if mag == 1 && i > 0 { String::new() } else { mag.to_string() };
        let var = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        out.push_str(&format!("{sign}{coef}{var}"));
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MahlerMeasure {
    pub value: f64,
    /// Absolute error bound.
    pub error: f64,
}

fn eval(f: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in f.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots with inclusion radii n |f(z)/f'(z)|.
pub fn roots(f: &[i64]) -> Result<Vec<(Complex64, f64)>> {
    let n = degree(f).ok_or_else(|| Error::Domain("zero polynomial".into()))?;
    let lead = f[n] as f64;
    let g: Vec<f64> = f[..=n].iter().map(|&c| c as f64 / lead).collect();
    if n == 0 {
        return Ok(vec![]);
    }
    // Cauchy radius for the starting circle
    let radius = 1.0 + g[..n].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..300 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = eval(&g, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-14 {
            break;
        }
    }
    Ok(z
        .into_iter()
        .map(|r| {
            let (p, dp) = eval(&g, r);
            let rad = if p.norm() == 0.0 { 0.0 } else { n as f64 * (p / dp).norm() };
            (r, rad)
        })
        .collect())
}

/// f = +-x^k times a product of cyclotomic polynomials.
pub fn is_kronecker(f: &[i64]) -> bool {
    let Some(n) = degree(f) else { return false };
    let mut g: Vec<i64> = f[..=n].to_vec();
    while g.len() > 1 && g[0] == 0 {
        g.remove(0);
    }
    if g.last().unwrap().abs() != 1 {
        return false;
    }
    // Phi_m with phi(m) <= deg; m <= 2 deg^2 suffices for these degrees
    let d = g.len() - 1;
    let mut m = 1u64;
    while g.len() > 1 && m <= (6 * d * d + 6) as u64 {
        if euler_phi(m) as usize <= g.len() - 1 {
            let phi_m = cyclotomic_polynomial(m);
            while let Some(q) = exact_quotient(&g, &phi_m) {
                g = q;
            }
        }
        m += 1;
    }
    g.len() == 1 && g[0].abs() == 1
}

fn exact_quotient(num: &[i64], den: &[i64]) -> Option<Vec<i64>> {
    let (dn, nn) = (den.len() - 1, num.len() - 1);
    if nn < dn {
        return None;
    }
    let mut rem: Vec<i128> = num.iter().map(|&c| c as i128).collect();
    let mut q = vec![0i64; nn - dn + 1];
    let lead = den[dn] as i128;
    for i in (0..=nn - dn).rev() {
        if rem[i + dn] % lead != 0 {
            return None;
        }
        let c = rem[i + dn] / lead;
        q[i] = c as i64;
        for (k, &d) in den.iter().enumerate() {
            rem[i + k] -= c * d as i128;
        }
    }
    rem.iter().all(|&c| c == 0).then_some(q)
}

/// |lead| prod max(1, |root|).
pub fn mahler_measure(f: &[i64]) -> Result<MahlerMeasure> {
    let n = degree(f).ok_or_else(|| Error::Domain("zero polynomial".into()))?;
    match n {
        0 => Ok(MahlerMeasure { value: f[0].unsigned_abs() as f64, error: 0.0 }),
        1 => {
            let (a, b) = (f[1].unsigned_abs() as f64, f[0].unsigned_abs() as f64);
            Ok(MahlerMeasure { value: a.max(b), error: 0.0 })
        }
        2 => {
            let v = mahler_quadratic(f[2], f[1], f[0]);
            Ok(MahlerMeasure { value: v, error: 4.0 * f64::EPSILON * v })
        }
        _ => {
            let rs = roots(f)?;
            let mut value = f[n].unsigned_abs() as f64;
            let mut rel = 0.0;
            for (z, r) in &rs {
                let m = z.norm();
                if m > 1.0 {
                    value *= m;
                }
                if m + r > 1.0 {
                    rel += r / (m - r).max(1.0);
                }
            }
            rel += 8.0 * f64::EPSILON * n as f64;
            if value < 1.0 + 1e-3 && is_kronecker(f) {
                return Ok(MahlerMeasure { value: 1.0, error: 0.0 });
            }
            Ok(MahlerMeasure { value, error: rel * value })
        }
    }
}

/// Mahler measure of a x^2 + b x + c: max(|a|, |c|) for complex roots, and
/// max(|a|, |c|, (|b| + sqrt(disc))/2) for real roots.
pub fn mahler_quadratic(a: i64, b: i64, c: i64) -> f64 {
    let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
    let m = (a.unsigned_abs()).max(c.unsigned_abs()) as f64;
    if disc < 0 {
        m
    } else {
        m.max((b.unsigned_abs() as f64 + (disc as f64).sqrt()) / 2.0)
    }
}

/// Exact test M(a x^2 + b x + c) <= x for an integer x.
pub fn mahler_quadratic_at_most(a: i64, b: i64, c: i64, x: i64) -> bool {
    if a.abs() > x || c.abs() > x {
        return false;
    }
    let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
    if disc < 0 {
        return true;
    }
    let t = 2 * x as i128 - b.abs() as i128;
    t >= 0 && disc <= t * t
}

/// prod over places of max(1, |alpha|_v)^{d_v} for a root alpha of the primitive
/// irreducible f: archimedean embeddings from the roots, finite places from Newton
/// polygons at the primes dividing the leading coefficient.
pub fn height_by_places(f: &[i64]) -> Result<f64> {
    let n = degree(f).ok_or_else(|| Error::Domain("zero polynomial".into()))?;
    let content = f.iter().fold(0u64, |g, &c| gcd(g, c.unsigned_abs()));
    if content != 1 {
        return Err(Error::Domain("polynomial is not primitive".into()));
    }
    let mut log_h = 0.0;
    for (z, _) in roots(f)? {
        log_h += z.norm().max(1.0).ln();
    }
    let lead = f[n].unsigned_abs();
    if lead > 1 {
        for (p, _) in factorize(lead)?.factors {
            log_h += newton_polygon_positive_part(f, p) * (p as f64).ln();
        }
    }
    Ok(log_h.exp())
}

/// Sum over the roots of max(0, -v_p(root)), read from the lower convex hull of
/// (i, v_p(a_i)).
fn newton_polygon_positive_part(f: &[i64], p: u64) -> f64 {
    let pts: Vec<(f64, f64)> = f
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i as f64, valuation(c.unsigned_abs(), p) as f64))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &q in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(q);
    }
    // also account for the zero root when a_0 = 0 (valuation +inf contributes nothing)
    hull.windows(2)
        .map(|w| {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            (w[1].0 - w[0].0) * slope.max(0.0)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn examples() {
        assert_eq!(mahler_measure(&[1, 0, 1]).unwrap().value, 1.0);
        assert!((mahler_measure(&[-2, 0, 1]).unwrap().value - 2.0).abs() < 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((mahler_measure(&[-1, -1, 1]).unwrap().value - phi).abs() < 1e-12);
        assert!(mahler_measure(&[0, 0]).is_err());
        // Lehmer's polynomial
        let lehmer = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];
        assert!((mahler_measure(&lehmer).unwrap().value - 1.176_280_818_259_917).abs() < 1e-9);
        assert_eq!(format_poly(&[-1, -1, 1]), "x^2-x-1");
    }

    #[test]
    fn cubic_agrees_with_roots() {
        // (x - 2)(x^2 + x + 1) and 3x^3 - x - 1
        let m = mahler_measure(&[-2, -1, -1, 1]).unwrap();
        assert!((m.value - 2.0).abs() < 1e-9 && m.error < 1e-9);
        let m = mahler_measure(&[-1, -1, 0, 3]).unwrap();
        assert!(m.value >= 3.0 - 1e-9);
    }

    #[test]
    fn lower_bound_by_max_norm() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let n = rng.gen_range(1..=5);
            let mut f: Vec<i64> = (0..=n).map(|_| rng.gen_range(-30..=30)).collect();
            if f[n] == 0 {
                f[n] = 1;
            }
            let m = mahler_measure(&f).unwrap().value;
            let norm = f.iter().map(|c| c.abs()).max().unwrap() as f64;
            assert!(m * (1.0 + 1e-9) >= norm / 2f64.powi(n as i32), "{f:?}");
            assert!(m >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn kronecker_exhaustive_small() {
        for a0 in -4i64..=4 {
            for a1 in -4i64..=4 {
                for a2 in -4i64..=4 {
                    for lead in [1i64, 2] {
                        let f = vec![a0, a1, a2, lead];
                        let m = mahler_measure(&f).unwrap().value;
                        assert_eq!(m < 1.0 + 1e-9, is_kronecker(&f), "{f:?} {m}");
                    }
                }
            }
        }
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                for c in -3i64..=3 {
                    let f = vec![c, b, a, b, 1];
                    let m = mahler_measure(&f).unwrap().value;
                    assert_eq!(m < 1.0 + 1e-9, is_kronecker(&f), "{f:?} {m}");
                }
            }
        }
    }

    #[test]
    fn height_matches_mahler() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut done = 0;
        while done < 1000 {
            let (a, b, c) = (rng.gen_range(1..60i64), rng.gen_range(-60..60i64), rng.gen_range(-60..60i64));
            let disc = b * b - 4 * a * c;
            if c == 0 || (disc >= 0 && crate::arith::is_square(disc as u64)) {
                continue;
            }
            if gcd(gcd(a as u64, b.unsigned_abs()), c.unsigned_abs()) != 1 {
                continue;
            }
            let h = height_by_places(&[c, b, a]).unwrap();
            let m = mahler_quadratic(a, b, c);
            assert!((h / m - 1.0).abs() < 1e-6, "{a} {b} {c}: {h} vs {m}");
            done += 1;
        }
    }

    #[test]
    fn exact_quadratic_threshold() {
        for a in 1..8i64 {
            for b in -20..=20i64 {
                for c in -8..=8i64 {
                    for x in 1..8i64 {
                        let m = mahler_quadratic(a, b, c);
                        if (m - x as f64).abs() > 1e-9 {
                            assert_eq!(mahler_quadratic_at_most(a, b, c, x), m <= x as f64);
                        }
                    }
                }
            }
        }
    }
}
