use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use majority_core::bench::{run_grid, summarize, Algorithm, CheckPolicy, ExperimentConfig, Summary, TrialRow};
use majority_core::certify::{audit, brute_force_majority, same_verdict};
use majority_core::classic::boyer_moore_certified;
use majority_core::instance::generate;
use majority_core::lab::{beta_interval, lower_bound_constant, simulate_balance, Strategy};
use majority_core::randomized::{self, Params};
use majority_core::{Answer, Certificate, ComparisonRecord, CountingOracle, DistributionSpec, Instance, RandomStream};

/// Version tag written as the first line of every bench CSV.
const CSV_SCHEMA: &str = "# majority-bench csv v1";

#[derive(Parser)]
#[command(name = "majority", version, about = "Exact majority search under a counting equality oracle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one instance.
    Run(RunArgs),
    /// Run an experiment grid and emit one row per trial.
    Bench(BenchArgs),
    /// Run on an instance file, audit the certificate and compare with brute force.
    Verify(VerifyArgs),
    /// Lower-bound constants and the balance simulator.
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
struct AlgoArgs {
    /// `boyer-moore` or `rand-majority`.
    #[arg(long, default_value = "rand-majority")]
    algo: Algorithm,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Subproblems of at most this size go to Boyer-Moore.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Multiplier of the sampling tolerance `m^(-1/10)`.
    #[arg(long)]
    epsilon_scale: Option<f64>,
}

impl AlgoArgs {
    fn params(&self) -> Result<Params> {
        let mut p = Params::default();
        if let Some(c) = self.cutoff {
            p = p.with_cutoff(c);
        }
        if let Some(e) = self.epsilon_scale {
            p = p.with_epsilon_scale(e);
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CsvOrJson {
    Csv,
    Json,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    /// Instance file: n on the first line, then one color id per line.
    #[arg(long, conflicts_with_all = ["n", "dist"])]
    instance: Option<PathBuf>,
    #[arg(long, value_parser = parse_size, required_unless_present = "instance")]
    n: Option<usize>,
    /// Distribution spec, e.g. `binary:p=0.5` or `profile:0.48,rest=100`.
    #[arg(long, default_value = "binary:p=0.5")]
    dist: DistributionSpec,
    /// Write the transcript as `left right equal` lines.
    #[arg(long)]
    record_transcript: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    /// Comma-separated sizes; `2^20` is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, required = true)]
    n: Vec<usize>,
    #[arg(long, default_value = "binary:p=0.5")]
    dist: DistributionSpec,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long)]
    jobs: Option<usize>,
    /// Output path; standard output when absent.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: CsvOrJson,
    /// Check every trial regardless of size.
    #[arg(long, conflicts_with = "no_check")]
    paranoid: bool,
    /// Skip ground-truth and certificate checks.
    #[arg(long)]
    no_check: bool,
    /// Record wall time per trial (makes output run-dependent).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    algo: AlgoArgs,
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Print the lower-bound constant and the admissible heavy thresholds.
    #[arg(long, required_unless_present = "martingale")]
    constant: bool,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Simulate the balance process and print statistics as CSV.
    #[arg(long)]
    martingale: bool,
    #[arg(long, value_parser = parse_size, default_value = "10000")]
    n: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// `uniform`, `smallest-first`, `largest-first` or `all`.
    #[arg(long, default_value = "all")]
    strategy: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of evenly spaced trajectory checkpoints.
    #[arg(long, default_value_t = 10)]
    checkpoints: u64,
}

fn parse_size(s: &str) -> std::result::Result<usize, String> {
    let value = match s.split_once('^') {
        Some((base, exp)) => {
            let base: usize = base.trim().parse().map_err(|e| format!("{e}"))?;
            let exp: u32 = exp.trim().parse().map_err(|e| format!("{e}"))?;
            base.checked_pow(exp).ok_or_else(|| format!("{s} overflows"))?
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if value == 0 {
        return Err("size must be at least 1".into());
    }
    Ok(value)
}

/// Process outcome: contract violations exit with 1.
enum Status {
    Ok,
    Violation,
}

#[derive(Serialize)]
struct RunReport<'a> {
    algorithm: Algorithm,
    n: usize,
    answer: &'a Answer,
    comparisons: u64,
    branches: Vec<String>,
    certificate: &'a Certificate,
}

struct Solved {
    answer: Answer,
    certificate: Certificate,
    comparisons: u64,
    branches: Vec<String>,
    transcript: Option<Vec<ComparisonRecord>>,
}

fn solve(instance: &Instance, algo: &AlgoArgs, record: bool) -> Result<Solved> {
    let balls: Vec<usize> = (0..instance.len()).collect();
    let mut oracle = if record { CountingOracle::recording(instance) } else { CountingOracle::new(instance) };
    let (answer, certificate, branches) = match algo.algo {
        Algorithm::BoyerMoore => {
            let (a, c) = boyer_moore_certified(&mut oracle, &balls)?;
            (a, c, vec!["boyer-moore".to_string()])
        }
        Algorithm::RandMajority => {
            let mut rng = RandomStream::new(algo.seed, "algorithm", 0);
            let out = randomized::majority(&mut oracle, &balls, &algo.params()?, &mut rng)?;
            let trace = out.stats.branch_trace().iter().map(|b| b.to_string()).collect();
            (out.answer, out.certificate, trace)
        }
    };
    Ok(Solved { answer, certificate, comparisons: oracle.comparisons(), branches, transcript: oracle.into_transcript() })
}

fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(Instance::parse_text(&text)?)
}

fn cmd_run(args: RunArgs) -> Result<Status> {
    let instance = match &args.instance {
        Some(path) => load_instance(path)?,
        None => {
            let n = args.n.expect("clap requires n");
            generate(&args.dist, n, &mut RandomStream::new(args.algo.seed, "instance", 0))?
        }
    };
    let solved = solve(&instance, &args.algo, args.record_transcript.is_some())?;
    if let (Some(path), Some(t)) = (&args.record_transcript, &solved.transcript) {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        for r in t {
            writeln!(w, "{} {} {}", r.left, r.right, u8::from(r.equal))?;
        }
        w.flush()?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match args.format {
        TextOrJson::Text => {
            writeln!(out, "answer: {}", solved.answer)?;
            writeln!(out, "comparisons: {}", solved.comparisons)?;
            writeln!(out, "branches: {}", solved.branches.join(" > "))?;
        }
        TextOrJson::Json => {
            let report = RunReport {
                algorithm: args.algo.algo,
                n: instance.len(),
                answer: &solved.answer,
                comparisons: solved.comparisons,
                branches: solved.branches.clone(),
                certificate: &solved.certificate,
            };
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
    }
    Ok(Status::Ok)
}

fn cmd_verify(args: VerifyArgs) -> Result<Status> {
    let instance = load_instance(&args.instance)?;
    let solved = solve(&instance, &args.algo, true)?;
    let balls: Vec<usize> = (0..instance.len()).collect();
    let transcript = solved.transcript.as_deref().unwrap_or(&[]);
    let truth = brute_force_majority(&instance);
    let correct = same_verdict(&instance, &solved.answer, &truth);
    let audited = audit(&solved.answer, &solved.certificate, transcript, instance.len(), &balls);
    println!("answer: {}", solved.answer);
    println!("comparisons: {}", solved.comparisons);
    println!("brute force: {truth} ({})", if correct { "agrees" } else { "DISAGREES" });
    match &audited {
        Ok(()) => println!("certificate: accepted"),
        Err(e) => println!("certificate: REJECTED ({e})"),
    }
    Ok(if correct && audited.is_ok() { Status::Ok } else { Status::Violation })
}

fn write_rows(rows: &[TrialRow], format: CsvOrJson, out: &mut dyn Write) -> Result<()> {
    match format {
        CsvOrJson::Csv => {
            writeln!(out, "{CSV_SCHEMA}")?;
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        CsvOrJson::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn print_summary(summaries: &[Summary]) {
    let rate = |r: Option<f64>| r.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
    eprintln!(
        "{:<14} {:>9} {:<24} {:>6} {:>12} {:>10} {:>10} {:>10} {:>10} {:>8} {:>7} {:>7}",
        "algorithm", "n", "distribution", "trials", "mean", "sd", "min", "max", "p95", "ratio", "correct", "cert"
    );
    for s in summaries {
        eprintln!(
            "{:<14} {:>9} {:<24} {:>6} {:>12.1} {:>10.1} {:>10} {:>10} {:>10} {:>8.4} {:>7} {:>7}",
            s.algorithm.to_string(),
            s.n,
            s.distribution,
            s.trials,
            s.mean,
            s.sd,
            s.min,
            s.max,
            s.p95,
            s.ratio,
            rate(s.correctness_rate),
            rate(s.certificate_rate)
        );
    }
}

fn cmd_bench(args: BenchArgs) -> Result<Status> {
    let mut config = ExperimentConfig::new(args.algo.algo, args.n.clone(), args.dist.clone(), args.trials, args.algo.seed);
    config.params = args.algo.params()?;
    config.jobs = args.jobs;
    config.timing = args.timing;
    config.checks = if args.paranoid {
        CheckPolicy::Paranoid
    } else if args.no_check {
        CheckPolicy::Off
    } else {
        CheckPolicy::Default
    };
    let rows = run_grid(&config)?;
    match &args.csv_out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_rows(&rows, args.format, &mut w)?;
            w.flush()?;
        }
        None => write_rows(&rows, args.format, &mut io::stdout().lock())?,
    }
    let summaries = summarize(&rows)?;
    print_summary(&summaries);
    if summaries.iter().any(Summary::has_violation) {
        eprintln!("contract violation: an answer was wrong or a certificate was rejected");
        return Ok(Status::Violation);
    }
    Ok(Status::Ok)
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<Status> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if args.constant {
        let c = lower_bound_constant(args.tolerance)?;
        let (b1, b2) = beta_interval();
        writeln!(out, "lower_bound_constant {c:.10}")?;
        writeln!(out, "beta1 {b1:.10}")?;
        writeln!(out, "beta2 {b2:.10}")?;
    }
    if args.martingale {
        let strategies: Vec<Strategy> = if args.strategy == "all" {
            Strategy::ALL.to_vec()
        } else {
            vec![args.strategy.parse()?]
        };
        if args.trials == 0 {
            bail!("trials must be at least 1");
        }
        let steps = args.checkpoints.max(1);
        let checkpoints: Vec<u64> = (0..steps).map(|i| i * (args.n as u64 - 1) / steps).collect();
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record([
            "strategy",
            "n",
            "trials",
            "k",
            "mean_nonzero",
            "mean_max_balance",
            "mean_total_balance",
            "mean_larger_side_majority",
            "predict_bound",
            "mean_terminal_balance",
            "var_terminal_balance",
        ])?;
        for s in strategies {
            let stats = simulate_balance(args.n, s, args.trials, args.seed, &checkpoints)?;
            for cp in &stats.checkpoints {
                w.write_record([
                    s.to_string(),
                    args.n.to_string(),
                    args.trials.to_string(),
                    cp.k.to_string(),
                    format!("{:.3}", cp.mean_nonzero),
                    format!("{:.3}", cp.mean_max_balance),
                    format!("{:.3}", cp.mean_total_balance),
                    format!("{:.5}", cp.mean_larger_side_majority),
                    format!("{:.5}", cp.predict_bound),
                    format!("{:.3}", stats.mean_terminal_balance),
                    format!("{:.3}", stats.variance_terminal_balance),
                ])?;
            }
        }
        w.flush()?;
    }
    Ok(Status::Ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
