//! `sffcc`: rule verification, encoded-fusion analytics, single trials, threshold sweeps and
//! fault-tolerant region scans.
//!
//! Exit status: 0 on success, 1 when a verification finds a violation, 2 on usage errors,
//! 3 on configuration or I/O errors (reported as JSON on stderr).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sffcc::decoder::{Decoder, OutcomeAssignment};
use sffcc::fusion::{combined_rus_probs, rep_event_probs, simulate_rus, EncodedEvent, EncodedFusionSampler, FusionChannelParams, Strategy, TieRule};
use sffcc::graph_rewrite::{verify_rule_corpus, RuleMutation};
use sffcc::lattice::{build_sffcc_network, check_structure, derive_syndrome_graph, verify_small_instance};
use sffcc::montecarlo::{map_ft_region, region_csv, run_trial, sweep_csv, sweep_summary, trial_rng, LatticeContext, PointSampler, Sweep, SweepConfig, SweepResult};

#[derive(Parser)]
#[command(name = "sffcc", version, about = "Fusion-based photonic QC simulator for the synchronous foliated Floquet color code")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the decomposition rules or the derived lattice against their oracles.
    Verify(VerifyArgs),
    /// Analytic and sampled encoded-fusion event probabilities over an efficiency grid.
    Analytics(AnalyticsArgs),
    /// Run and report a single trial.
    Trial(TrialArgs),
    /// Threshold sweep from a config file.
    Threshold(RunArgs),
    /// Fault-tolerant region scan from a config file with a `[region]` table.
    Region(RunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Rules,
    Lattice,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutation {
    SwapBasis,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    level: Level,
    /// Random graphs in the rule corpus.
    #[arg(long, default_value_t = 200)]
    graphs: usize,
    #[arg(long, default_value_t = 8)]
    max_qubits: u32,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Corrupt the rule output (negative control).
    #[arg(long, value_enum)]
    mutate: Option<Mutation>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyKind {
    Rep,
    Rus,
}

#[derive(Args)]
struct AnalyticsArgs {
    #[arg(long, value_enum)]
    strategy: StrategyKind,
    /// `m` for REP, `N` for RUS.
    #[arg(long)]
    size: usize,
    #[arg(long, default_value_t = 0.8)]
    eta_start: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_stop: f64,
    #[arg(long, default_value_t = 6)]
    points: usize,
    #[arg(long, default_value_t = 1.0)]
    visibility: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long)]
    config: PathBuf,
    /// Sweep parameter value.
    #[arg(long)]
    x: f64,
    #[arg(long)]
    size: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 0)]
    index: u64,
    /// Include per-sector decoder records.
    #[arg(long)]
    dump: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
}

enum Failure {
    Violation,
    Error(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Analytics(a) => analytics(a).map_err(Failure::from),
        Command::Trial(a) => trial(a).map_err(Failure::from),
        Command::Threshold(a) => threshold(a).map_err(Failure::from),
        Command::Region(a) => region(a).map_err(Failure::from),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::from(3)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    let mut report = serde_json::Map::new();
    let mut ok = true;
    if matches!(a.level, Level::Rules | Level::All) {
        let mutation = match a.mutate {
            Some(Mutation::SwapBasis) => RuleMutation::SwapBasis,
            None => RuleMutation::None,
        };
        let r = verify_rule_corpus(a.graphs, a.max_qubits, a.seed, mutation);
        ok &= r.passed();
        report.insert("rules".into(), json!({ "passed": r.passed(), "report": r }));
    }
    if matches!(a.level, Level::Lattice | Level::All) {
        let mut structure = serde_json::Map::new();
        let mut lattice_ok = true;
        for l in [2, 4, 6] {
            let net = build_sffcc_network(l).map_err(anyhow::Error::from)?;
            let v = check_structure(&derive_syndrome_graph(&net));
            lattice_ok &= v.is_empty();
            structure.insert(format!("L{l}"), json!(v));
        }
        let net = build_sffcc_network(2).map_err(anyhow::Error::from)?;
        let oracle = verify_small_instance(&net, &derive_syndrome_graph(&net)).map_err(anyhow::Error::from)?;
        lattice_ok &= oracle.passed;
        ok &= lattice_ok;
        report.insert("lattice".into(), json!({ "passed": lattice_ok, "structure_violations": structure, "oracle": oracle }));
    }
    report.insert("passed".into(), json!(ok));
    emit(a.report.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&Value::Object(report)).expect("json")))?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

fn event_name(e: EncodedEvent) -> &'static str {
    match e {
        EncodedEvent::BothRecovered => "both",
        EncodedEvent::XxOnly => "xx_only",
        EncodedEvent::ZzOnly => "zz_only",
        EncodedEvent::Erasure => "erasure",
    }
}

fn analytics(a: AnalyticsArgs) -> Result<()> {
    use rand::SeedableRng;
    if a.points == 0 || a.size == 0 || a.samples == 0 || !(0.0..=1.0).contains(&a.eta_start) || !(0.0..=1.0).contains(&a.eta_stop) {
        bail!("invalid grid: need points, size and samples ≥ 1 and efficiencies in [0, 1]");
    }
    let mut s = String::from("eta,event,analytic,sampled,sigma,within_3sigma\n");
    for i in 0..a.points {
        let eta = if a.points == 1 { a.eta_start } else { a.eta_start + (a.eta_stop - a.eta_start) * i as f64 / (a.points - 1) as f64 };
        let params = FusionChannelParams::linear_optics(eta, a.visibility)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed ^ ((i as u64) << 20));
        let mut counts = [0u64; 4];
        let analytic = match a.strategy {
            StrategyKind::Rep => {
                let sampler = EncodedFusionSampler::new(Strategy::Rep { m: a.size, tie: TieRule::Erase }, params)?;
                for _ in 0..a.samples {
                    counts[sampler.sample(&mut rng).event.index()] += 1;
                }
                rep_event_probs(a.size, TieRule::Erase, &params)?
            }
            StrategyKind::Rus => {
                for _ in 0..a.samples {
                    counts[simulate_rus(a.size, &params, &mut rng).event.index()] += 1;
                }
                combined_rus_probs(a.size, &params)?
            }
        };
        for e in EncodedEvent::ALL {
            let (p, k) = (analytic[e.index()], counts[e.index()]);
            let f = k as f64 / a.samples as f64;
            let sigma = (p * (1.0 - p) / a.samples as f64).sqrt();
            let ok = (f - p).abs() <= 3.0 * sigma.max(1.0 / a.samples as f64);
            s.push_str(&format!("{eta:.6},{},{p:.8},{f:.8},{sigma:.3e},{ok}\n", event_name(e)));
        }
    }
    emit(a.out.as_deref(), &s)
}

fn trial(a: TrialArgs) -> Result<()> {
    let mut config = SweepConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    let ctx = LatticeContext::new(a.size)?;
    let noise = config.noise.at(a.x)?;
    let sampler = PointSampler::new(&noise)?;
    let mut decoder = Decoder::new(&ctx.graph);
    let mut scratch = OutcomeAssignment::ideal(ctx.graph.n_slots());
    let verdict = run_trial(&ctx, &sampler, &mut decoder, &mut scratch, &mut trial_rng(config.seed, a.x.to_bits(), a.size as u64, a.index));
    let mut out = json!({
        "x": a.x,
        "L": a.size,
        "seed": config.seed,
        "index": a.index,
        "verdict": format!("{verdict:?}"),
        "erased": scratch.erased.iter().filter(|&&e| e).count(),
        "flipped": scratch.flipped.iter().filter(|&&f| f).count(),
    });
    if a.dump {
        let sectors: Vec<Value> = (0..2).map(|k| serde_json::from_str(&decoder.dump(k, &scratch).expect("valid slots")).expect("json")).collect();
        out["sectors"] = json!(sectors);
    }
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(())
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Loads the config and applies command-line overrides.
fn effective_config(a: &RunArgs) -> Result<SweepConfig> {
    let mut c = SweepConfig::load(&a.config)?;
    if let Some(s) = a.seed {
        c.seed = s;
    }
    if let Some(t) = a.trials {
        c.trials = t;
    }
    if let Some(s) = &a.sizes {
        c.sizes = s.clone();
    }
    c.validate()?;
    Ok(c)
}

fn workers(a: &RunArgs) -> usize {
    a.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Writes `<stem>.config.toml` (the effective config, rerunnable as is), the run outputs and
/// `<stem>.manifest.json` listing them.
fn write_outputs(dir: &Path, stem: &str, config: &SweepConfig, started: f64, files: &[(String, String)], workers: usize) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let config_path = dir.join(format!("{stem}.config.toml"));
    fs::write(&config_path, config.to_toml()).with_context(|| format!("writing {}", config_path.display()))?;
    written.push(config_path.display().to_string());
    for (name, text) in files {
        let p = dir.join(name);
        fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?;
        written.push(p.display().to_string());
    }
    let manifest = json!({
        "config_hash": config.hash(),
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed,
        "workers": workers,
        "start_unix_s": started,
        "end_unix_s": unix_now(),
        "outputs": written,
    });
    let p = dir.join(format!("{stem}.manifest.json"));
    fs::write(&p, format!("{}\n", serde_json::to_string_pretty(&manifest).expect("json"))).with_context(|| format!("writing {}", p.display()))?;
    Ok(())
}

fn stem(config: &SweepConfig, default: &str) -> String {
    if config.name.is_empty() {
        default.to_string()
    } else {
        config.name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
    }
}

fn threshold(a: RunArgs) -> Result<()> {
    let started = unix_now();
    let config = effective_config(&a)?;
    let w = workers(&a);
    let result: SweepResult = sffcc::montecarlo::run_sweep(&config, w)?;
    let stem = stem(&config, "threshold");
    let mut summary = serde_json::to_value(sweep_summary(&config, &result)).expect("json");
    summary["manifest"] = json!(format!("{stem}.manifest.json"));
    let summary_text = format!("{}\n", serde_json::to_string_pretty(&summary).expect("json"));
    write_outputs(&a.out, &stem, &config, started, &[(format!("{stem}.csv"), sweep_csv(&result.curves)), (format!("{stem}.summary.json"), summary_text.clone())], w)?;
    print!("{summary_text}");
    Ok(())
}

fn region(a: RunArgs) -> Result<()> {
    let started = unix_now();
    let config = effective_config(&a)?;
    let Some(spec) = &config.region else { bail!("config has no [region] table") };
    let w = workers(&a);
    let base = Sweep { noise: &config.noise, sizes: &config.sizes, trials: config.trials, seed: config.seed, workers: w };
    let rays = map_ft_region(&base, spec, &config.grid.values())?;
    let axes: Vec<String> = spec.axes.iter().map(|x| x.param.clone()).collect();
    let stem = stem(&config, "region");
    let summary = json!({
        "name": config.name,
        "config_hash": config.hash(),
        "axes": axes,
        "rays": rays,
        "manifest": format!("{stem}.manifest.json"),
    });
    let summary_text = format!("{}\n", serde_json::to_string_pretty(&summary).expect("json"));
    write_outputs(&a.out, &stem, &config, started, &[(format!("{stem}.csv"), region_csv(&axes, &rays)), (format!("{stem}.summary.json"), summary_text.clone())], w)?;
    print!("{summary_text}");
    Ok(())
}
