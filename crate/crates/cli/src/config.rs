use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use cycfam::family::{ArchType, LambdaSpec};

pub const CACHE_ENV: &str = "CYCFAM_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arch {
    All,
    Real,
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightsTask {
    Mahler,
    Count,
    Eta,
    Silverman,
    Ev,
    EvScan,
}

/// Accepts plain integers and forms like 1e6.
pub fn parse_count(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v < 0.0 || v.fract() != 0.0 || v > 1e18 {
        return Err(format!("not a non-negative integer: {s}"));
    }
    Ok(v as u64)
}

/// Every knob a job can take. Flags override the values of a --config file; the merged
/// value is embedded in each report.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    /// Degree of the cyclic extensions.
    #[arg(short = 'n', long = "n")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,

    /// m = [F : Q] in the exponent table.
    #[arg(long = "m")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,

    /// Discriminant (or |D|) cutoff.
    #[arg(short = 'X', long = "x", value_parser = parse_count)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<u64>,

    /// Comma separated grid of cutoffs.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<u64>>,

    /// Signature condition.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arch: Option<Arch>,

    /// Full local specification; config file only.
    #[arg(skip)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,

    /// Primes required to split completely.
    #[arg(short = 'P', long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<Vec<u64>>,

    /// Torsion primes l.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<Vec<u64>>,

    /// Fundamental discriminants.
    #[arg(short = 'D', long = "disc", value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disc: Option<Vec<i64>>,

    /// Number of Dirichlet coefficients.
    #[arg(short = 'M', long = "coeffs", value_parser = parse_count)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<u64>,

    /// Sieve prime cutoff.
    #[arg(short = 'z', long = "z", value_parser = parse_count)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<u64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,

    /// Keep pairwise counts in the sieve.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairwise: Option<bool>,

    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<HeightsTask>,

    /// Polynomial coefficients from the leading term down, e.g. 1,0,-2.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Vec<i64>>,

    /// Worker threads.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,

    /// Directory for CSV/JSON artifacts.
    #[arg(short = 'o', long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Checkpoint directory; defaults under $CYCFAM_CACHE_DIR when that is set.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<PathBuf>,

    /// Stop after this many checkpoint batches (for interrupted runs).
    #[arg(long, hide = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_after: Option<usize>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Fields set in `flags` win.
    pub fn overlay(self, flags: &JobConfig) -> Result<Self> {
        let mut base = serde_json::to_value(self)?;
        let top = serde_json::to_value(flags)?;
        if let (Value::Object(b), Value::Object(t)) = (&mut base, top) {
            for (k, v) in t {
                if !v.is_null() {
                    b.insert(k, v);
                }
            }
        }
        Ok(serde_json::from_value(base)?)
    }

    pub fn need_n(&self) -> Result<u32> {
        match self.n {
            Some(n) if n >= 2 => Ok(n),
            Some(n) => bail!("degree n = {n} must be at least 2"),
            None => bail!("missing -n"),
        }
    }

    pub fn need_x(&self) -> Result<u64> {
        self.x.context("missing -X")
    }

    pub fn lambda(&self) -> LambdaSpec {
        let base = self.lambda.clone().unwrap_or_default();
        match self.arch {
            None | Some(Arch::All) => base,
            Some(Arch::Real) => base.with_arch([ArchType::RealSplit]),
            Some(Arch::Imaginary) => base.with_arch([ArchType::Complex]),
        }
    }

    pub fn primes(&self) -> Vec<u64> {
        self.primes.clone().unwrap_or_default()
    }

    /// Explicit checkpoint directory, or one derived from the job under the cache dir.
    pub fn checkpoint_dir(&self, command: &str) -> Option<PathBuf> {
        if let Some(p) = &self.checkpoint {
            return Some(p.clone());
        }
        let root = std::env::var_os(CACHE_ENV)?;
        let tag: String = format!("{command}-n{}-x{}-{}", self.n.unwrap_or(0), self.x.unwrap_or(0), self.lambda())
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        Some(PathBuf::from(root).join(tag))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_prefers_flags() {
        let file = JobConfig { n: Some(3), x: Some(100), ..Default::default() };
        let flags = JobConfig { x: Some(500), ..Default::default() };
        let m = file.overlay(&flags).unwrap();
        assert_eq!((m.n, m.x), (Some(3), Some(500)));
    }

    #[test]
    fn round_trip() {
        let c = JobConfig {
            n: Some(2),
            grid: Some(vec![10, 100]),
            arch: Some(Arch::Real),
            lambda: Some(LambdaSpec::all()),
            disc: Some(vec![-23, 5]),
            task: Some(HeightsTask::Eta),
            ..Default::default()
        };
        let j = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<JobConfig>(&j).unwrap(), c);
    }

    #[test]
    fn counts_accept_exponents() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("30"), Ok(30));
        assert!(parse_count("1.5").is_err());
    }
}
