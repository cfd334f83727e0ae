//! `twcoe`: exact and Monte Carlo moments of permutation-twisted COE matrices.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 usage error.

mod manifest;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use manifest::RunManifest;
use twisted_coe::classify::{census, membership, regular_identity_check, verify_lemmas, ClassKey, Membership};
use twisted_coe::graphmodel::{build_graph, phi, phi_oracle, DEFAULT_ORACLE_BUDGET};
use twisted_coe::moments::{coe_moment, evaluate_moment, tail_check, EnumOptions, MomentError, OPT_IN_MAX_K};
use twisted_coe::montecarlo::{checked_moment, EstimateReport, SampleConfig, RETRY_SEED_OFFSET};
use twisted_coe::perm::{enumerate_s2k, Permutation, MAX_K};
use twisted_coe::twist::{is_admissible, Twist};
use twisted_coe::weingarten::{Ensemble, WgCache};
use twisted_coe::Partition;

#[derive(Parser, Debug)]
#[command(name = "twcoe", version, about = "Eigenvalue moments of permutation-twisted COE matrices")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact M_k(N) as a rational function of N, with its 1/N expansion.
    Moment(MomentArgs),
    /// Weingarten function tables for CUE or COE.
    Wg(WgArgs),
    /// Regular/irregular class census of S_2k.
    Classify(ClassifyArgs),
    /// Index count Phi(omega) from the graph model, optionally against brute force.
    Phi(PhiArgs),
    /// Monte Carlo estimate of <|Tr(P U)^k|^2>.
    Mc(McArgs),
}

#[derive(Args, Debug)]
struct MomentArgs {
    /// Moment order k (permutations act on 2k symbols).
    #[arg(long)]
    k: usize,
    /// Number of 1/N series terms to print.
    #[arg(long, default_value_t = 4)]
    max_order: usize,
    /// Evaluate exactly at these N.
    #[arg(long, num_args = 1..)]
    eval: Vec<i64>,
    /// Write the full report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the (alpha, m) counts as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Allow k = 6 ((12)! permutations).
    #[arg(long)]
    allow_k6: bool,
    /// Enumerate one permutation per coset of the shift s.
    #[arg(long)]
    coset: bool,
}

#[derive(Args, Debug)]
struct WgArgs {
    /// cue or coe.
    #[arg(long)]
    ensemble: Ensemble,
    /// Moment order k (permutations act on 2k symbols).
    #[arg(long)]
    k: usize,
    /// Cycle type, e.g. 2,1 (all entries of the table when omitted).
    #[arg(long = "type")]
    type_: Option<Partition>,
    /// Number of 1/N series terms to print.
    #[arg(long)]
    expand: Option<usize>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    /// Moment order k (permutations act on 2k symbols).
    #[arg(long)]
    k: usize,
    /// Half-type of [omega, T], e.g. 2,1,1.
    #[arg(long, requires = "beta")]
    alpha: Option<Partition>,
    /// Half-type of [omega, Q].
    #[arg(long, requires = "alpha")]
    beta: Option<Partition>,
    /// List every member of the selected classes.
    #[arg(long, conflicts_with = "count")]
    list: bool,
    /// Print only class sizes.
    #[arg(long)]
    count: bool,
    /// Check the classification lemmas and the regular-count identity.
    #[arg(long)]
    verify: bool,
    /// Witnesses kept per class in the census.
    #[arg(long, default_value_t = twisted_coe::classify::DEFAULT_SAMPLE_CAP)]
    samples: usize,
    #[arg(long)]
    allow_k6: bool,
    /// Write the census as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PhiArgs {
    /// Moment order k (permutations act on 2k symbols).
    #[arg(long)]
    k: usize,
    /// Permutation of the 2k symbols in cycle notation, e.g. "(1 ~1)(2 3)".
    #[arg(long)]
    omega: String,
    /// Also count index assignments by brute force.
    #[arg(long, requires = "n")]
    oracle: bool,
    /// Matrix size N for the brute-force count.
    #[arg(long)]
    n: Option<usize>,
    /// Twist permutation: grand, two-cycle, stride, involution or identity.
    #[arg(long, default_value = "grand")]
    perm: Twist,
    /// Brute-force work limit.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
    budget: u64,
    /// Write the graph G_omega in Graphviz format.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct McArgs {
    /// Moment order k (permutations act on 2k symbols).
    #[arg(long)]
    k: usize,
    /// Matrix size N.
    #[arg(long)]
    n: usize,
    /// Number of sampled matrices.
    #[arg(long, default_value_t = 20_000)]
    samples: u64,
    /// RNG seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Twist permutation: grand, two-cycle, stride, involution or identity.
    #[arg(long, default_value = "grand")]
    twist: Twist,
    /// cue or coe.
    #[arg(long, default_value = "coe")]
    ensemble: Ensemble,
    /// Write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Failure classes, mapped to exit codes 2 and 1.
enum Failure {
    Usage(String),
    Violation(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Violation(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn moment_failure(e: MomentError) -> Failure {
    match e {
        MomentError::BudgetExceeded { .. } => usage(e.to_string()),
        other => Failure::Violation(other.into()),
    }
}

fn check_k(k: usize) -> Result<(), Failure> {
    if !(1..=MAX_K).contains(&k) {
        return Err(usage(format!("k must be in 1..={MAX_K}, got {k}")));
    }
    Ok(())
}

fn write_json(path: &PathBuf, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Ok(true): everything checked held.
fn cmd_moment(a: &MomentArgs, m: &mut RunManifest) -> Result<bool, Failure> {
    check_k(a.k)?;
    if a.k > OPT_IN_MAX_K {
        return Err(usage(format!("k = {} is beyond the enumeration cap of {OPT_IN_MAX_K}", a.k)));
    }
    let (tables, stats) = WgCache::from_env().tables_up_to(Ensemble::Coe, a.k).context("building COE Weingarten tables")?;
    m.cache = Some(stats);
    let opts = EnumOptions { coset_speedup: a.coset, allow_large: a.allow_k6, progress: None };
    let report = coe_moment(a.k, &tables[a.k - 1], a.max_order, &opts).map_err(moment_failure)?;
    let tail = tail_check(&report).map_err(moment_failure)?;
    println!("M_{}(N) = {}", a.k, report.moment);
    println!("series: {}", report.tail);
    println!("tail: c1={} c2={} c3={}", tail.c1, tail.c2, tail.c3);
    let mut ok = tail.holds();
    if !ok {
        eprintln!("error: M_{k}(N) - {k} has a nonzero 1/N or 1/N^2 term", k = a.k);
    }
    for &n in &a.eval {
        if n <= 2 * a.k as i64 {
            eprintln!("warning: N = {n} <= 2k; no twist has all cycles longer than 2k, so this value is not a moment");
        }
        match evaluate_moment(&report, n) {
            Ok(v) => println!("M_{}({n}) = {v}", a.k),
            Err(MomentError::PoleAtN(p)) => {
                eprintln!("error: M_{}(N) has a pole at N = {p}", a.k);
                ok = false;
            }
            Err(e) => return Err(moment_failure(e)),
        }
    }
    if let Some(path) = &a.json {
        #[derive(serde::Serialize)]
        struct Out<'a> {
            report: &'a twisted_coe::moments::MomentReport,
            tail_check: &'a twisted_coe::moments::TailCheck,
        }
        write_json(path, &Out { report: &report, tail_check: &tail })?;
    }
    if let Some(path) = &a.csv {
        fs::write(path, report.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    m.note("evaluated", report.meta.evaluated);
    m.note("enumeration_seconds", report.meta.wall_time.as_secs_f64());
    Ok(ok)
}

fn cmd_wg(a: &WgArgs, m: &mut RunManifest) -> Result<bool, Failure> {
    check_k(a.k)?;
    if let Some(t) = &a.type_ {
        if t.weight() != a.k {
            return Err(usage(format!("--type {t} is not a partition of {}", a.k)));
        }
    }
    let (tables, stats) = WgCache::from_env().tables_up_to(a.ensemble, a.k).context("building Weingarten tables")?;
    m.cache = Some(stats);
    let table = &tables[a.k - 1];
    let types: Vec<Partition> = match &a.type_ {
        Some(t) => vec![t.clone()],
        None => Partition::all(a.k),
    };
    for t in &types {
        let f = table.get(t).context("table lookup")?;
        if a.type_.is_some() {
            println!("{f}");
        } else {
            println!("{t}: {f}");
        }
        if let Some(order) = a.expand {
            let s = table.asymptotics(t, order.max(1)).context("series expansion")?;
            println!("series: {s}");
        }
    }
    Ok(true)
}

fn cmd_classify(a: &ClassifyArgs, m: &mut RunManifest) -> Result<bool, Failure> {
    check_k(a.k)?;
    let selected = match (&a.alpha, &a.beta) {
        (Some(al), Some(be)) => {
            for p in [al, be] {
                if p.weight() != a.k {
                    return Err(usage(format!("{p} is not a partition of {}", a.k)));
                }
            }
            Some((al.clone(), be.clone()))
        }
        _ => None,
    };
    let c = census(a.k, a.samples, a.allow_k6, None).map_err(moment_failure)?;
    let mut ok = true;
    match &selected {
        Some((al, be)) => {
            let keys = [ClassKey::new(false, al.clone(), be.clone()), ClassKey::new(true, al.clone(), be.clone())];
            for key in &keys {
                println!("{key} {}", c.count(key));
            }
            if a.list {
                for w in enumerate_s2k(a.k) {
                    if let Membership::Contributing(key) = membership(&w) {
                        if keys.contains(&key) {
                            println!("{} {w}", if key.regular { "Reg" } else { "Irreg" });
                        }
                    }
                }
            }
        }
        None => {
            println!("contributing {} non-contributing {}", c.contributing(), c.non_contributing);
            for (key, e) in &c.table {
                if a.count || a.list {
                    println!("{key} {}", e.count);
                } else {
                    let shown: Vec<String> = e.samples.iter().map(|w| w.to_string()).collect();
                    println!("{key} {} {}", e.count, shown.join(" "));
                }
            }
        }
    }
    if a.verify {
        let lemmas = verify_lemmas(&c);
        for cl in &lemmas.clauses {
            let status = if !cl.passed { "FAIL" } else if cl.vacuous { "vacuous" } else { "ok" };
            println!("clause {}: {status} ({})", cl.clause, cl.detail);
        }
        let identity = regular_identity_check(&c);
        let terms: Vec<String> = identity.terms.iter().map(|(name, v)| format!("{name}={v}")).collect();
        println!("regular identity: {} = {}", terms.join(" "), identity.total);
        match lemmas.clone().into_result(a.k) {
            Ok(_) if identity.total == 0 => println!("all clauses pass"),
            Ok(_) => {
                eprintln!("error: regular identity evaluates to {}", identity.total);
                ok = false;
            }
            Err(v) => {
                eprintln!("error: {v}");
                ok = false;
            }
        }
    }
    if let Some(path) = &a.json {
        write_json(path, &c)?;
    }
    m.note("contributing", c.contributing());
    Ok(ok)
}

fn cmd_phi(a: &PhiArgs, _m: &mut RunManifest) -> Result<bool, Failure> {
    check_k(a.k)?;
    let omega = Permutation::parse_cycles(&a.omega, a.k).map_err(|e| usage(format!("--omega: {e}")))?;
    let ph = phi(&omega);
    if let Some(path) = &a.dot {
        fs::write(path, build_graph(&omega).export_dot()).with_context(|| format!("writing {}", path.display()))?;
    }
    let head = if ph.chi {
        format!("chi=1 m={} phi={}", ph.half_ell_q, ph.render())
    } else {
        format!("chi=0 phi={}", ph.render())
    };
    if !a.oracle {
        println!("{head}");
        return Ok(true);
    }
    let n = a.n.expect("clap enforces --n with --oracle");
    let p = a.perm.permutation(n).map_err(|e| usage(e.to_string()))?;
    let count = phi_oracle(&omega, &p, a.budget).context("brute-force count")?;
    let expected = ph.eval(n as u64);
    let agree = u128::from(count) == expected;
    let admissible = is_admissible(&p, a.k);
    let verdict = match (agree, admissible) {
        (true, _) => "OK",
        (false, true) => "MISMATCH",
        (false, false) => "differs (twist has a cycle of length <= 2k)",
    };
    println!("{head} oracle={count} {verdict}");
    Ok(agree || !admissible)
}

fn cmd_mc(a: &McArgs, m: &mut RunManifest) -> Result<bool, Failure> {
    let cfg = SampleConfig { k: a.k, n: a.n, samples: a.samples, seed: a.seed, twist: a.twist, ensemble: a.ensemble };
    let warnings = cfg.validate().map_err(|e| usage(e.to_string()))?;
    for w in &warnings {
        eprintln!("{w}");
    }
    let outcome = checked_moment(&cfg).context("sampling")?;
    m.seeds.push(cfg.seed);
    println!("{}", EstimateReport::CSV_HEADER);
    println!("{}", outcome.first.csv_row(&cfg));
    if let Some(retry) = &outcome.retry {
        let retry_cfg = SampleConfig { seed: cfg.seed.wrapping_add(RETRY_SEED_OFFSET), ..cfg.clone() };
        eprintln!("first run missed 4 SE; retried with seed {}", retry_cfg.seed);
        m.seeds.push(retry_cfg.seed);
        println!("{}", retry.csv_row(&retry_cfg));
    }
    if let Some(path) = &a.json {
        #[derive(serde::Serialize)]
        struct Out<'a> {
            config: &'a SampleConfig,
            outcome: &'a twisted_coe::montecarlo::CheckOutcome,
        }
        write_json(path, &Out { config: &cfg, outcome: &outcome })?;
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().expect("global pool is configured once");
    }
    let mut manifest = RunManifest::new(std::env::args().collect(), cli.threads);
    let result = match &cli.command {
        Command::Moment(a) => cmd_moment(a, &mut manifest),
        Command::Wg(a) => cmd_wg(a, &mut manifest),
        Command::Classify(a) => cmd_classify(a, &mut manifest),
        Command::Phi(a) => cmd_phi(a, &mut manifest),
        Command::Mc(a) => cmd_mc(a, &mut manifest),
    };
    let code = match result {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Violation(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    manifest.finish(start.elapsed(), code);
    eprintln!("manifest: {}", manifest.to_json());
    ExitCode::from(code)
}
