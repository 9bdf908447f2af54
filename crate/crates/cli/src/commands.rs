use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use cycfam::census::{count_census, leading_constant, paper_constants, torsion_scan};
use cycfam::classgroup::class_group;
use cycfam::family::{enumerate_family, Checkpointed, DescriptorRecord, FamilyEnumerator};
use cycfam::heights::{
    count_small_generators, eta_upper_quadratic, ev_bound_report, ev_scan, growth_exponent, mahler_measure,
    silverman_scan,
};
use cycfam::sieve::{exceptional_scan, mean_bracket_check, sieve_stats, SieveConfig};
use cycfam::zeta::{coeffs_bruteforce, coeffs_eulerside};
use cycfam::Error;

use crate::config::{HeightsTask, JobConfig};

const CHECKPOINT_WIDTH: u64 = 4096;

/// Collected output of one command.
struct Artifacts<'a> {
    command: &'a str,
    cfg: &'a JobConfig,
    csv: Option<(String, Vec<String>)>,
}

impl<'a> Artifacts<'a> {
    fn new(command: &'a str, cfg: &'a JobConfig) -> Self {
        Artifacts { command, cfg, csv: None }
    }

    fn csv(&mut self, header: &str, rows: Vec<String>) {
        self.csv = Some((header.to_string(), rows));
    }

    /// Writes <command>.json (with the job config) and <command>.csv under --out.
    fn finish(self, result: impl Serialize) -> Result<()> {
        let Some(dir) = &self.cfg.out else { return Ok(()) };
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let report = json!({ "command": self.command, "config": self.cfg, "result": result });
        fs::write(dir.join(format!("{}.json", self.command)), serde_json::to_string_pretty(&report)? + "\n")?;
        if let Some((header, rows)) = self.csv {
            write_csv(&dir.join(format!("{}.csv", self.command)), &header, &rows)?;
        }
        Ok(())
    }
}

fn write_csv(path: &Path, header: &str, rows: &[String]) -> Result<()> {
    let mut f = std::io::BufWriter::new(fs::File::create(path)?);
    writeln!(f, "{header}")?;
    for r in rows {
        writeln!(f, "{r}")?;
    }
    f.flush()?;
    Ok(())
}

fn invariant(msg: String) -> anyhow::Error {
    Error::Invariant(msg).into()
}

pub fn run(command: &str, cfg: &JobConfig) -> Result<()> {
    match command {
        "enumerate" => enumerate(cfg),
        "census" => census(cfg),
        "zeta-check" => zeta_check(cfg),
        "classgroup" => classgroup(cfg),
        "torsion-scan" => torsion(cfg),
        "sieve" => sieve(cfg),
        "heights" => heights(cfg),
        "constants" => constants(cfg),
        other => bail!("unknown command {other}"),
    }
}

/// Records sorted by (Delta, f, exponents), through the checkpoint when one is configured.
/// None when an interrupted run left work to do.
fn records(command: &str, cfg: &JobConfig) -> Result<Option<Vec<DescriptorRecord>>> {
    let (n, x) = (cfg.need_n()?, cfg.need_x()?);
    let lambda = cfg.lambda();
    match cfg.checkpoint_dir(command) {
        Some(dir) => {
            let e = FamilyEnumerator::new(n, &lambda, x)?;
            let out = Checkpointed::new(&e, &dir, CHECKPOINT_WIDTH).run(cfg.stop_after)?;
            if out.is_none() {
                println!("checkpoint saved in {}; rerun to resume", dir.display());
            }
            Ok(out)
        }
        None => Ok(Some(enumerate_family(n, &lambda, x)?.iter().map(|d| d.record()).collect())),
    }
}

fn enumerate(cfg: &JobConfig) -> Result<()> {
    let Some(recs) = records("enumerate", cfg)? else { return Ok(()) };
    let rows: Vec<String> = recs.iter().map(|r| r.csv_row()).collect();
    let mut art = Artifacts::new("enumerate", cfg);
    if cfg.out.is_none() {
        println!("{}", DescriptorRecord::csv_header());
        for r in &rows {
            println!("{r}");
        }
    } else {
        println!("fields: {}", recs.len());
    }
    art.csv(DescriptorRecord::csv_header(), rows);
    art.finish(json!({ "fields": recs.len() }))
}

fn census(cfg: &JobConfig) -> Result<()> {
    let n = cfg.need_n()?;
    let lambda = cfg.lambda();
    let p_set = cfg.primes();
    let mut art = Artifacts::new("census", cfg);
    if let Some(grid) = &cfg.grid {
        let r = count_census(n, &lambda, &p_set, grid)?;
        println!("X,N(X)");
        for (x, c) in r.grid.iter().zip(&r.counts) {
            println!("{x},{c}");
        }
        println!("fitted leading constant: {:.6}", r.fitted_leading);
        println!("predicted leading constant: {:.6}", r.predicted_leading);
        if let Some(e) = r.fitted_error_exponent {
            println!("fitted error exponent: {e:.4}");
        }
        art.csv("x,count", r.grid.iter().zip(&r.counts).map(|(x, c)| format!("{x},{c}")).collect());
        return art.finish(&r);
    }
    let x = cfg.need_x()?;
    let fields = enumerate_family(n, &lambda, x)?;
    let kept: Vec<_> = fields.iter().filter(|d| p_set.iter().all(|&p| d.splits_completely(p))).collect();
    println!("N={}", kept.len());
    let rows: Vec<String> = kept
        .iter()
        .map(|d| format!("{},{},{},{}", d.signed_discriminant(), d.discriminant, d.conductor, d.arch))
        .collect();
    for r in &rows {
        println!("{r}");
    }
    let c = leading_constant(n, &lambda, 1_000_000)?;
    art.csv("signed_discriminant,discriminant,conductor,arch", rows);
    art.finish(json!({ "x": x, "count": kept.len(), "split_primes": p_set, "leading_constant": c }))
}

fn zeta_check(cfg: &JobConfig) -> Result<()> {
    let n = cfg.need_n()?;
    let m = cfg.coeffs.context("missing -M")?;
    let lambda = cfg.lambda();
    let p_set = cfg.primes();
    let brute = coeffs_bruteforce(n, &lambda, &p_set, m)?;
    let euler = coeffs_eulerside(n, &lambda, &p_set, m)?;
    let agree = brute.agreement(&euler);
    println!("coefficients match: {agree}/{m}");
    let mut art = Artifacts::new("zeta-check", cfg);
    art.csv(
        "m,bruteforce,eulerside",
        (1..=m).map(|k| format!("{k},{},{}", brute.a(k), euler.a(k))).collect(),
    );
    let mismatch = brute.first_mismatch(&euler);
    art.finish(json!({ "coefficients": m, "matching": agree, "first_mismatch": mismatch }))?;
    if let Some((k, a, b)) = mismatch {
        return Err(invariant(format!("coefficient {k}: brute force {a}, Euler side {b}")));
    }
    Ok(())
}

fn classgroup(cfg: &JobConfig) -> Result<()> {
    let discs = cfg.disc.clone().context("missing -D")?;
    let ells = cfg.ell.clone().unwrap_or_default();
    let mut groups = Vec::new();
    let mut rows = Vec::new();
    for d in discs {
        let g = class_group(d)?;
        let structure: Vec<String> = g.divisors.iter().map(|k| format!("Z/{k}")).collect();
        let structure = if structure.is_empty() { "1".to_string() } else { structure.join(" x ") };
        let tors: String = ells.iter().map(|&l| format!(" #Cl[{l}]={}", g.torsion(l))).collect();
        let narrow = g.narrow.as_ref().map(|(h, _)| format!(" h+={h}")).unwrap_or_default();
        println!("D={d} h={} Cl={structure}{narrow}{tors}", g.h);
        rows.push(format!(
            "{d},{},{},{}",
            g.h,
            g.divisors.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" "),
            g.narrow.as_ref().map_or(String::new(), |(h, _)| h.to_string())
        ));
        groups.push(g);
    }
    let mut art = Artifacts::new("classgroup", cfg);
    art.csv("d,h,elementary_divisors,narrow_h", rows);
    art.finish(&groups)
}

fn torsion(cfg: &JobConfig) -> Result<()> {
    let l = cfg.ell.as_ref().and_then(|v| v.first().copied()).unwrap_or(3);
    let x = cfg.need_x()?;
    let theta = cfg.theta.unwrap_or(0.5 - 0.5 / l as f64);
    let s = torsion_scan(l, x, theta)?;
    println!("lo,hi,fields,exceptional,proportion,max_torsion");
    let rows: Vec<String> = s
        .ranges
        .iter()
        .map(|r| format!("{},{},{},{},{:.6},{}", r.lo, r.hi, r.fields, r.exceptional, r.proportion, r.max_torsion))
        .collect();
    for r in &rows {
        println!("{r}");
    }
    let mut art = Artifacts::new("torsion-scan", cfg);
    art.csv("lo,hi,fields,exceptional,proportion,max_torsion", rows);
    art.finish(&s)
}

fn sieve(cfg: &JobConfig) -> Result<()> {
    let n = cfg.need_n()?;
    let lambda = cfg.lambda();
    let eps = cfg.epsilon.unwrap_or(cycfam::sieve::DEFAULT_EPSILON);
    let mut art = Artifacts::new("sieve", cfg);
    if let Some(grid) = &cfg.grid {
        let points = exceptional_scan(n, &lambda, grid, eps)?;
        let bracket = mean_bracket_check(n, &lambda, grid)?;
        println!("x,z,fields,exceptional,normalized,mean_ratio");
        let rows: Vec<String> = points
            .iter()
            .zip(&bracket.points)
            .map(|(p, b)| format!("{},{},{},{},{:.6},{:.6}", p.x, p.z, p.fields, p.exceptional, p.normalized, b.ratio))
            .collect();
        for r in &rows {
            println!("{r}");
        }
        println!("mean bracket [{}, {}] holds: {} ({})", bracket.c1, bracket.c2, bracket.holds(), bracket.note);
        art.csv("x,z,fields,exceptional,normalized,mean_ratio", rows);
        return art.finish(json!({ "exceptional": points, "bracket": bracket }));
    }
    let mut sc = SieveConfig::new(n, cfg.need_x()?, cfg.z.context("missing -z")?);
    sc.lambda = lambda;
    sc.epsilon = eps;
    sc.delta0 = cfg.delta;
    sc.pairwise = cfg.pairwise.unwrap_or(true);
    let r = sieve_stats(&sc)?;
    println!("N={} primes={} M(z)={:.6} U={:.6}", r.fields, r.primes.len(), r.mean, r.u_value);
    println!("means agree: {}", r.means_agree);
    println!("E(A;z,M/2)={}", r.exceptional_half_mean);
    if let (Some(rhs), Some(h)) = (r.rhs_value, r.inequality_holds) {
        println!("second-moment bound: {rhs:.3} holds: {h}");
    }
    if let (Some(t), Some(e)) = (r.asymptotic_threshold, r.exceptional_asymptotic) {
        println!("E(A;z,{t:.3})={e}");
    }
    art.csv(
        "p,count,remainder",
        r.remainder_rows().iter().map(|(p, c, rem)| format!("{p},{c},{rem:.6}")).collect(),
    );
    let bad = !r.means_agree || r.inequality_holds == Some(false);
    art.finish(&r)?;
    if bad {
        return Err(invariant("second-moment inequality or mean identity failed".into()));
    }
    Ok(())
}

fn heights(cfg: &JobConfig) -> Result<()> {
    let task = cfg.task.context("missing --task")?;
    let mut art = Artifacts::new("heights", cfg);
    match task {
        HeightsTask::Mahler => {
            let mut f = cfg.poly.clone().context("missing --poly")?;
            f.reverse();
            let m = mahler_measure(&f)?;
            println!("M={:.12} error<={:.3e}", m.value, m.error);
            art.finish(&m)
        }
        HeightsTask::Count => {
            let n = cfg.need_n()?;
            let grid = match (&cfg.grid, cfg.x) {
                (Some(g), _) => g.clone(),
                (None, Some(x)) => vec![x],
                _ => bail!("missing -X or --grid"),
            };
            let counts = grid.iter().map(|&x| count_small_generators(n, x)).collect::<cycfam::Result<Vec<_>>>()?;
            let rows: Vec<String> = counts.iter().map(|c| format!("{},{},{}", c.n, c.x, c.numbers)).collect();
            println!("n,X,N_H");
            for r in &rows {
                println!("{r}");
            }
            let slope = growth_exponent(&counts);
            if let Some(s) = slope {
                println!("log-log slope: {s:.4}");
            }
            art.csv("n,x,count", rows);
            art.finish(json!({ "counts": counts, "slope": slope }))
        }
        HeightsTask::Eta => {
            let discs = cfg.disc.clone().context("missing -D")?;
            let ests = discs.iter().map(|&d| eta_upper_quadratic(d)).collect::<cycfam::Result<Vec<_>>>()?;
            let rows: Vec<String> = ests
                .iter()
                .map(|e| format!("{},{:.12},{},{:.6}", e.d, e.eta_upper, e.witness_text, e.ratio))
                .collect();
            println!("D,eta_upper,witness,silverman_ratio");
            for r in &rows {
                println!("{r}");
            }
            art.csv("d,eta_upper,witness,silverman_ratio", rows);
            art.finish(&ests)
        }
        HeightsTask::Silverman => {
            let s = silverman_scan(cfg.need_x()?)?;
            println!("min eta/|D|^(1/2) = {:.6} at D={} (frozen constant {}, pass {})", s.min_ratio, s.argmin, s.constant, s.pass);
            art.finish(&s)
        }
        HeightsTask::Ev => {
            let discs = cfg.disc.clone().context("missing -D")?;
            let l = cfg.ell.as_ref().and_then(|v| v.first().copied()).unwrap_or(3);
            let delta = cfg.delta.context("missing --delta")?;
            let reps = discs.iter().map(|&d| ev_bound_report(d, l, delta)).collect::<cycfam::Result<Vec<_>>>()?;
            for r in &reps {
                let pred = r.predicted.map_or("vacuous".to_string(), |p| format!("{p:.3}"));
                println!("D={} M={} predicted={pred} actual={}", r.d, r.split_primes, r.actual);
            }
            art.finish(&reps)
        }
        HeightsTask::EvScan => {
            let l = cfg.ell.as_ref().and_then(|v| v.first().copied()).unwrap_or(3);
            let delta = cfg.delta.unwrap_or(0.125);
            let ranges = ev_scan(cfg.need_x()?, l, delta)?;
            let rows: Vec<String> = ranges
                .iter()
                .map(|r| format!("{},{},{},{},{},{:.6}", r.lo, r.hi, r.fields, r.vacuous, r.exceeding, r.fraction))
                .collect();
            println!("lo,hi,fields,vacuous,exceeding,fraction");
            for r in &rows {
                println!("{r}");
            }
            art.csv("lo,hi,fields,vacuous,exceeding,fraction", rows);
            art.finish(&ranges)
        }
    }
}

fn constants(cfg: &JobConfig) -> Result<()> {
    let m = cfg.m.unwrap_or(1);
    let n = cfg.need_n()?;
    let c = paper_constants(m, n)?;
    println!("a={}", c.a);
    println!("b={}", c.b);
    println!("β={}", c.beta);
    println!("δ̃={}", c.delta_tilde);
    println!("δ′={}", c.delta_prime);
    println!("ρ={} τ={} σ={}", c.rho, c.tau, c.sigma);
    println!("δ̃₀={}", c.delta_tilde_zero);
    Artifacts::new("constants", cfg).finish(&c)
}
