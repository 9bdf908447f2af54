use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{characters_of_order_dividing, factorize, gcd, valuation};
use crate::error::{Error, Result};

/// Local behavior at a finite place: ramification index, residue degree, conductor exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocalBehavior {
    pub e: u32,
    pub f: u32,
    pub conductor_exponent: u32,
}

impl LocalBehavior {
    pub const SPLIT: LocalBehavior = LocalBehavior { e: 1, f: 1, conductor_exponent: 0 };

    pub fn new(e: u32, f: u32, conductor_exponent: u32) -> Self {
        LocalBehavior { e, f, conductor_exponent }
    }

    /// Behavior of a local character with ramified part of order `e` and unramified
    /// Frobenius exponent `j`, inside Z/n.
    pub fn from_parts(n: u32, e: u32, j: u32, conductor_exponent: u32) -> Self {
        let g = gcd((n / e) as u64, j as u64) as u32;
        let degree = n / g;
        LocalBehavior { e, f: degree / e, conductor_exponent }
    }
}

impl fmt::Display for LocalBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.e, self.f, self.conductor_exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArchType {
    RealSplit,
    Complex,
}

impl fmt::Display for ArchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArchType::RealSplit => "real",
            ArchType::Complex => "complex",
        })
    }
}

/// Allowed local behaviors at the places dividing n and at infinity. A place without an
/// entry is unrestricted. Deserializes from the struct form or from the text syntax of
/// `FromStr`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LambdaRepr")]
pub struct LambdaSpec {
    pub finite: BTreeMap<u64, BTreeSet<LocalBehavior>>,
    pub archimedean: Option<BTreeSet<ArchType>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LambdaRepr {
    Text(String),
    Fields {
        // untagged buffering keeps map keys as strings
        #[serde(default)]
        finite: BTreeMap<String, BTreeSet<LocalBehavior>>,
        #[serde(default)]
        archimedean: Option<BTreeSet<ArchType>>,
    },
}

impl TryFrom<LambdaRepr> for LambdaSpec {
    type Error = Error;

    fn try_from(r: LambdaRepr) -> Result<Self> {
        match r {
            LambdaRepr::Text(s) => s.parse(),
            LambdaRepr::Fields { finite, archimedean } => {
                let finite = finite
                    .into_iter()
                    .map(|(k, v)| k.parse().map(|p| (p, v)).map_err(|_| Error::Domain(format!("bad place '{k}'"))))
                    .collect::<Result<_>>()?;
                Ok(LambdaSpec { finite, archimedean })
            }
        }
    }
}

impl LambdaSpec {
    pub fn all() -> Self {
        LambdaSpec::default()
    }

    pub fn real_only() -> Self {
        LambdaSpec { archimedean: Some([ArchType::RealSplit].into()), ..Default::default() }
    }

    pub fn imaginary_only() -> Self {
        LambdaSpec { archimedean: Some([ArchType::Complex].into()), ..Default::default() }
    }

    pub fn with_local(mut self, p: u64, allowed: impl IntoIterator<Item = LocalBehavior>) -> Self {
        self.finite.insert(p, allowed.into_iter().collect());
        self
    }

    pub fn with_arch(mut self, allowed: impl IntoIterator<Item = ArchType>) -> Self {
        self.archimedean = Some(allowed.into_iter().collect());
        self
    }

    pub fn allows_finite(&self, p: u64, b: &LocalBehavior) -> bool {
        self.finite.get(&p).map_or(true, |s| s.contains(b))
    }

    pub fn allows_arch(&self, a: ArchType) -> bool {
        self.archimedean.as_ref().map_or(true, |s| s.contains(&a))
    }

    /// True when every restricted place still admits the trivial (split) behavior.
    pub fn contains_trivial(&self) -> bool {
        self.finite.values().all(|s| s.contains(&LocalBehavior::SPLIT))
            && self.allows_arch(ArchType::RealSplit)
    }

    /// Checks the local conditions against n: keys must be primes dividing n, sets non-empty, and at
    /// least one allowed archimedean type must be achievable.
    pub fn validate(&self, n: u32) -> Result<()> {
        for (&p, set) in &self.finite {
            if n as u64 % p != 0 || !crate::arith::is_prime(p) {
                return Err(Error::Domain(format!("local condition at {p}, which does not divide {n}")));
            }
            if set.is_empty() {
                return Err(Error::Domain(format!("empty local condition at {p}")));
            }
            let possible = possible_behaviors(n, p)?;
            if set.iter().all(|b| !possible.contains(b)) {
                return Err(Error::Domain(format!("no admissible local behavior at {p}")));
            }
        }
        if let Some(a) = &self.archimedean {
            if a.is_empty() {
                return Err(Error::Domain("empty archimedean condition".into()));
            }
            if n % 2 == 1 && !a.contains(&ArchType::RealSplit) {
                return Err(Error::Domain(format!("odd degree {n} fields are totally real")));
            }
        }
        Ok(())
    }

    /// Canonical text form, also used as the digest embedded in reports.
    pub fn digest(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LambdaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(a) = &self.archimedean {
            let s: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            parts.push(format!("inf={}", s.join("|")));
        }
        for (p, set) in &self.finite {
            let s: Vec<String> = set.iter().map(|x| x.to_string()).collect();
            parts.push(format!("{p}={}", s.join("|")));
        }
        if parts.is_empty() {
            f.write_str("all")
        } else {
            f.write_str(&parts.join(";"))
        }
    }
}

impl FromStr for LambdaSpec {
    type Err = Error;

    /// Syntax: `all`, or `;`-separated entries `inf=real|complex` and `p=e.f.c|e.f.c`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut out = LambdaSpec::default();
        if s.is_empty() || s == "all" {
            return Ok(out);
        }
        let bad = |m: &str| Error::Domain(format!("bad local-condition spec '{s}': {m}"));
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, vals) = part.split_once('=').ok_or_else(|| bad("missing '='"))?;
            let key = key.trim();
            if key == "inf" {
                let mut set = BTreeSet::new();
                for v in vals.split('|').map(str::trim) {
                    set.insert(match v {
                        "real" => ArchType::RealSplit,
                        "complex" => ArchType::Complex,
                        _ => return Err(bad("archimedean type must be real or complex")),
                    });
                }
                out.archimedean = Some(set);
            } else {
                let p: u64 = key.parse().map_err(|_| bad("place must be a prime or inf"))?;
                let mut set = BTreeSet::new();
                for v in vals.split('|').map(str::trim) {
                    let nums: Vec<u32> = v
                        .split('.')
                        .map(|x| x.parse::<u32>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("behavior must be e.f.c"))?;
                    if nums.len() != 3 {
                        return Err(bad("behavior must be e.f.c"));
                    }
                    set.insert(LocalBehavior::new(nums[0], nums[1], nums[2]));
                }
                out.finite.insert(p, set);
            }
        }
        Ok(out)
    }
}

/// Largest conductor exponent of a character of (Z/p^k)^x with order dividing n.
pub fn max_conductor_exponent(n: u32, p: u64) -> u32 {
    let v = valuation(n as u64, p);
    if v == 0 {
        1
    } else if p == 2 {
        v + 2
    } else {
        v + 1
    }
}

/// Every local behavior at a prime p | n realized by some character of (Z/p^k)^x with
/// values in mu_n and some unramified Frobenius exponent.
pub fn possible_behaviors(n: u32, p: u64) -> Result<BTreeSet<LocalBehavior>> {
    let k = max_conductor_exponent(n, p);
    let chars = characters_of_order_dividing(p.pow(k), n)?;
    let mut out = BTreeSet::new();
    for chi in chars {
        let e = chi.order();
        let c = crate::arith::factorize(chi.conductor())?
            .factors
            .first()
            .map_or(0, |&(_, c)| c);
        for j in 0..n {
            out.insert(LocalBehavior::from_parts(n, e, j, c));
        }
    }
    Ok(out)
}

/// Primes dividing n.
pub fn wild_primes(n: u32) -> Vec<u64> {
    factorize(n as u64).map(|f| f.primes().collect()).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deserializes_from_text_or_struct() {
        let l = LambdaSpec::real_only().with_local(2, [LocalBehavior::SPLIT, LocalBehavior::new(2, 1, 3)]);
        let text: LambdaSpec = serde_json::from_str("\"inf=real;2=1.1.0|2.1.3\"").unwrap();
        let json: LambdaSpec = serde_json::from_str(&serde_json::to_string(&l).unwrap()).unwrap();
        assert_eq!((text, json), (l.clone(), l));
        assert!(serde_json::from_str::<LambdaSpec>("\"2=1.1\"").is_err());
    }

    #[test]
    fn round_trip_text() {
        let l = LambdaSpec::real_only().with_local(2, [LocalBehavior::SPLIT, LocalBehavior::new(2, 1, 3)]);
        let s = l.to_string();
        assert_eq!(s, "inf=real;2=1.1.0|2.1.3");
        assert_eq!(s.parse::<LambdaSpec>().unwrap(), l);
        assert_eq!("all".parse::<LambdaSpec>().unwrap(), LambdaSpec::all());
        assert!("2=1.1".parse::<LambdaSpec>().is_err());
    }

    #[test]
    fn behaviors_at_two_and_three() {
        let b2 = possible_behaviors(2, 2).unwrap();
        let expect2: BTreeSet<_> = [(1, 1, 0), (1, 2, 0), (2, 1, 2), (2, 1, 3)]
            .into_iter()
            .map(|(e, f, c)| LocalBehavior::new(e, f, c))
            .collect();
        assert_eq!(b2, expect2);
        let b3 = possible_behaviors(3, 3).unwrap();
        let expect3: BTreeSet<_> = [(1, 1, 0), (1, 3, 0), (3, 1, 2)]
            .into_iter()
            .map(|(e, f, c)| LocalBehavior::new(e, f, c))
            .collect();
        assert_eq!(b3, expect3);
    }

    #[test]
    fn validation() {
        assert!(LambdaSpec::all().validate(3).is_ok());
        assert!(LambdaSpec::imaginary_only().validate(3).is_err());
        assert!(LambdaSpec::all().with_local(3, [LocalBehavior::SPLIT]).validate(2).is_err());
        assert!(LambdaSpec::all().with_local(2, [LocalBehavior::new(2, 1, 5)]).validate(2).is_err());
    }
}
