//! Exponents entering the counting asymptotics and the torsion bounds, as exact rationals.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::arith::euler_phi;
use crate::error::{Error, Result};

mod ratio_text {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let t = String::deserialize(d)?;
        t.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperConstants {
    pub m: u32,
    pub n: u32,
    /// Power saving in the error term for the full family.
    #[serde(with = "ratio_text")]
    pub beta: Rational64,
    /// Exponent of N(p_1...p_l) in the error term with local conditions.
    #[serde(with = "ratio_text")]
    pub a: Rational64,
    /// Power saving in the error term with local conditions.
    #[serde(with = "ratio_text")]
    pub b: Rational64,
    #[serde(with = "ratio_text")]
    pub delta_tilde: Rational64,
    /// b / ((n-1)(1+2a))
    #[serde(with = "ratio_text")]
    pub delta_prime: Rational64,
    /// rho = 1/(n-1)
    #[serde(with = "ratio_text")]
    pub rho: Rational64,
    /// tau = (1-b)/(n-1)
    #[serde(with = "ratio_text")]
    pub tau: Rational64,
    /// sigma = a
    #[serde(with = "ratio_text")]
    pub sigma: Rational64,
    /// (rho - tau)/(1 + 2 sigma)
    #[serde(with = "ratio_text")]
    pub delta_tilde_zero: Rational64,
}

impl PaperConstants {
    /// a <= 1/(2m) and b > beta.
    pub fn bounds_hold(&self) -> bool {
        self.a <= Rational64::new(1, 2 * self.m as i64) && self.b > self.beta
    }

    pub fn delta_prime_dominates(&self) -> bool {
        self.delta_prime >= self.delta_tilde
    }
}

pub fn paper_constants(m: u32, n: u32) -> Result<PaperConstants> {
    if m < 1 || n < 2 {
        return Err(Error::Domain("need m >= 1 and n >= 2".into()));
    }
    let phi = euler_phi(n as u64) as i64;
    let (mi, ni) = (m as i64, n as i64);
    let r = Rational64::new;
    let beta = if m == 1 { r(1, 4 * phi) } else { r(1, 2 * mi * phi) };
    let (a, b) = match (n, m) {
        (2, 1) => (r(3, 16), r(13, 32)),
        (2, 2) => (r(103, 512), r(153, 512)),
        _ => (r(1, 2 * mi), r(1, 4).min(r(64, 103 * phi * mi))),
    };
    let delta_tilde =
        if m == 1 { r(1, 8 * phi * (ni - 1)) } else { r(1, 2 * (mi + 1) * phi * (ni - 1)) };
    let one = Rational64::from_integer(1);
    let delta_prime = b / (Rational64::from_integer(ni - 1) * (one + a * 2));
    let rho = r(1, ni - 1);
    let tau = (one - b) / (ni - 1);
    let sigma = a;
    let delta_tilde_zero = (rho - tau) / (one + sigma * 2);
    Ok(PaperConstants {
        m,
        n,
        beta,
        a,
        b,
        delta_tilde,
        delta_prime,
        rho,
        tau,
        sigma,
        delta_tilde_zero,
    })
}
