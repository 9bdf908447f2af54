use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, factorize, isqrt};
use crate::error::{Error, Result};

/// Binary quadratic form a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The form with the given a and b of discriminant d, if c is integral.
    pub fn from_ab(a: i64, b: i64, d: i64) -> Option<Self> {
        let num = b as i128 * b as i128 - d as i128;
        let den = 4 * a as i128;
        (a != 0 && num % den == 0).then(|| QuadForm { a, b, c: (num / den) as i64 })
    }

    /// x^2 + b0 xy + ... with b0 = D mod 2.
    pub fn principal(d: i64) -> Self {
        let b = d.rem_euclid(2);
        QuadForm { a: 1, b, c: (b * b - d) / 4 }
    }

    /// The inverse class (a, -b, c).
    pub fn inverse(&self) -> Self {
        QuadForm { a: self.a, b: -self.b, c: self.c }
    }

    /// (-a, b, -c): the class of f times that of (-1, b0, -c0).
    pub fn negate(&self) -> Self {
        QuadForm { a: -self.a, b: self.b, c: -self.c }
    }

    pub fn is_reduced(&self) -> bool {
        let d = self.discriminant();
        if d < 0 {
            let (a, b, c) = (self.a, self.b, self.c);
            a > 0 && b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
        } else {
            let s = isqrt(d as u64) as i64;
            let (a, b) = (self.a.abs(), self.b);
            b > 0 && b <= s && 2 * a > s - b && 2 * a <= s + b
        }
    }
}

/// Fundamental discriminant test.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let m = d.unsigned_abs();
    let squarefree = |v: u64| factorize(v).is_ok_and(|f| f.is_squarefree());
    match d.rem_euclid(4) {
        1 => squarefree(m),
        0 => {
            let q = d / 4;
            matches!(q.rem_euclid(4), 2 | 3) && squarefree(q.unsigned_abs())
        }
        _ => false,
    }
}

fn check_discriminant(d: i64) -> Result<()> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::Domain(format!("{d} is not a fundamental discriminant")));
    }
    Ok(())
}

/// Reduced form equivalent to f: the unique reduced form for D < 0, the first reduced form
/// on the rho-path for D > 0.
pub fn reduce_form(f: QuadForm) -> Result<QuadForm> {
    let d = f.discriminant();
    check_discriminant(d)?;
    if d < 0 && f.a < 0 {
        return Err(Error::Domain("negative definite form".into()));
    }
    Ok(reduce_unchecked(f))
}

pub(crate) fn reduce_unchecked(f: QuadForm) -> QuadForm {
    if f.discriminant() < 0 {
        reduce_definite(f)
    } else {
        let mut g = f;
        let s = isqrt(g.discriminant() as u64) as i64;
        while !g.is_reduced() {
            g = rho_with_sqrt(g, s);
        }
        g
    }
}

fn reduce_definite(f: QuadForm) -> QuadForm {
    let (mut a, mut b, mut c) = (f.a as i128, f.b as i128, f.c as i128);
    let d = b * b - 4 * a * c;
    loop {
        // normalize b into (-a, a]
        let two_a = 2 * a;
        let mut r = b.rem_euclid(two_a);
        if r > a {
            r -= two_a;
        }
        if r != b {
            b = r;
            c = (b * b - d) / (4 * a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if b < 0 && (a == c || -b == a) {
            b = -b;
        }
        return QuadForm { a: a as i64, b: b as i64, c: c as i64 };
    }
}

/// One reduction step for an indefinite form.
pub fn rho(f: QuadForm) -> QuadForm {
    rho_with_sqrt(f, isqrt(f.discriminant() as u64) as i64)
}

fn rho_with_sqrt(f: QuadForm, s: i64) -> QuadForm {
    let d = f.discriminant() as i128;
    let c = f.c as i128;
    let ac = c.abs();
    let two = 2 * ac;
    let target = -(f.b as i128);
    let s = s as i128;
    // r = -b mod 2|c|, in (-|c|, |c|] if |c| > sqrt D, else in (sqrt D - 2|c|, sqrt D)
    let r = if ac > s {
        let mut r = target.rem_euclid(two);
        if r > ac {
            r -= two;
        }
        r
    } else {
        let lo = s - two + 1;
        lo + (target - lo).rem_euclid(two)
    };
    let a_new = (r * r - d) / (4 * c);
    QuadForm { a: f.c, b: r as i64, c: a_new as i64 }
}

/// Gauss composition (Dirichlet's united forms), followed by reduction.
pub fn compose_forms(f: QuadForm, g: QuadForm) -> Result<QuadForm> {
    let d = f.discriminant();
    if g.discriminant() != d {
        return Err(Error::Domain(format!("discriminants {} and {} differ", d, g.discriminant())));
    }
    Ok(compose_unchecked(f, g))
}

pub(crate) fn compose_unchecked(f: QuadForm, g: QuadForm) -> QuadForm {
    let d = f.discriminant() as i128;
    let (a1, b1) = (f.a as i128, f.b as i128);
    let (a2, b2) = (g.a as i128, g.b as i128);
    let h = (b1 + b2) / 2;
    let (g1, x1, y1) = ext_gcd(a1, a2);
    let (e, x2, y2) = ext_gcd(g1, h);
    let (u, v, w) = (x1 * x2, y1 * x2, y2);
    let big_a = a1 * a2 / (e * e);
    let num = u * a1 * b2 + v * a2 * b1 + w * (b1 * b2 + d) / 2;
    let two_a = 2 * big_a.abs();
    let big_b = (num / e).rem_euclid(two_a);
    let big_c = (big_b * big_b - d) / (4 * big_a);
    reduce_unchecked(QuadForm { a: big_a as i64, b: big_b as i64, c: big_c as i64 })
}

/// f^k, reduced.
pub fn pow_form(f: QuadForm, mut k: u64) -> QuadForm {
    let mut acc = reduce_unchecked(QuadForm::principal(f.discriminant()));
    let mut base = reduce_unchecked(f);
    while k > 0 {
        if k & 1 == 1 {
            acc = compose_unchecked(acc, base);
        }
        base = compose_unchecked(base, base);
        k >>= 1;
    }
    acc
}

/// All reduced forms of discriminant D < 0.
pub fn reduced_forms_definite(d: i64) -> Vec<QuadForm> {
    let mut out = Vec::new();
    let n = -d;
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = d.rem_euclid(2);
        while b <= a {
            if let Some(f) = QuadForm::from_ab(a, b, d) {
                if f.c >= a {
                    out.push(f);
                    if b > 0 && b < a && f.c > a {
                        out.push(QuadForm { a, b: -b, c: f.c });
                    }
                }
            }
            b += 2;
        }
        a += 1;
    }
    out.sort();
    out
}

/// All reduced indefinite forms of discriminant D > 0.
pub fn reduced_forms_indefinite(d: i64) -> Vec<QuadForm> {
    let s = isqrt(d as u64) as i64;
    let mut out = Vec::new();
    let mut b = if (s - d) % 2 == 0 { s } else { s - 1 };
    while b > 0 {
        let lo = (s - b) / 2 + 1;
        let hi = (s + b) / 2;
        for a in lo..=hi {
            for a in [a, -a] {
                if let Some(f) = QuadForm::from_ab(a, b, d) {
                    if f.is_reduced() {
                        out.push(f);
                    }
                }
            }
        }
        b -= 2;
    }
    out.sort();
    out
}

/// The rho-cycles of reduced indefinite forms.
pub fn rho_cycles(d: i64) -> Vec<Vec<QuadForm>> {
    let forms = reduced_forms_indefinite(d);
    let mut seen = std::collections::HashSet::new();
    let mut cycles = Vec::new();
    for f in forms {
        if seen.contains(&f) {
            continue;
        }
        let mut cyc = vec![f];
        seen.insert(f);
        let mut g = rho(f);
        while g != f {
            seen.insert(g);
            cyc.push(g);
            g = rho(g);
        }
        cycles.push(cyc);
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn definite_reduction() {
        let f = QuadForm::new(1, 1, 6);
        assert_eq!(reduce_form(f).unwrap(), f);
        assert_eq!(reduce_form(QuadForm::new(6, 1, 1)).unwrap(), f);
        assert_eq!(reduced_forms_definite(-23).len(), 3);
        assert_eq!(reduced_forms_definite(-120).len(), 4);
        assert!(reduce_form(QuadForm::new(1, 0, 4)).is_err()); // D = -16
    }

    #[test]
    fn indefinite_reduction_reaches_principal_cycle() {
        let g = reduce_form(QuadForm::new(1, 6, -1)).unwrap();
        assert_eq!(g.discriminant(), 40);
        let cycles = rho_cycles(40);
        let principal = reduce_unchecked(QuadForm::principal(40));
        let pc = cycles.iter().find(|c| c.contains(&principal)).unwrap();
        assert!(pc.contains(&g));
        for f in cycles.iter().flatten() {
            assert!(f.is_reduced());
            assert!(rho(*f).is_reduced());
        }
    }

    #[test]
    fn composition_laws() {
        let f = QuadForm::new(2, 1, 3);
        assert_eq!(compose_forms(f, f).unwrap(), QuadForm::new(2, -1, 3));
        for f in reduced_forms_definite(-120) {
            let e = compose_forms(f, f.inverse()).unwrap();
            assert_eq!(e, reduce_unchecked(QuadForm::principal(-120)));
        }
        assert!(compose_forms(QuadForm::new(1, 1, 6), QuadForm::new(1, 0, 1)).is_err());
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3, -4, -7, -8, -23, -120, 5, 8, 12, 40] {
            assert!(is_fundamental_discriminant(d), "{d}");
        }
        for d in [-16, -12, 1, 0, 4, 9, 20, 2, 3] {
            assert!(!is_fundamental_discriminant(d), "{d}");
        }
    }
}
