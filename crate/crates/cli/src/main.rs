//! `lpflats`: sample mixtures, fit and search subspaces, evaluate recovery
//! bounds, run sweeps and the property suite. Every output lands in `--out`
//! next to a `manifest.json` holding the config hash and seed; reruns with
//! the same config and seed rewrite identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use lpflats::experiments::{
    phase_transition_sweep, property_suite, write_rows_csv, write_rows_jsonl, ExperimentConfig, ScenarioRef,
};
use lpflats::model::{
    check_exact_recovery_condition, delta_kappa_lower_bounds, noise_recovery_bounds, tau0, tau0_lower_bound_uniform,
    Dataset, DeltaKappaBounds, ExactRecoveryReport, HlmModel, InlierKind, NoiseBounds, OutlierSpec, Scenario,
};
use lpflats::optimize::{grid_search_global, multi_restart_with, GridSpec, MultiRestartOptions};
use lpflats::rng::{derive_seed, derived_rng, DEFAULT_SEED};
use lpflats::Error;

#[derive(Parser)]
#[command(name = "lpflats", version, about = "Multiple-subspace recovery by lp energy minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML config for the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides any seed in the config [default: 1729].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Row format for sweep tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Draw a dataset from a model.
    Sample,
    /// Multi-restart lp K-flats on a sampled or loaded dataset.
    Fit,
    /// Planar grid-search global minimizer (D = 2, d = 1, K ≤ 2).
    Oracle,
    /// Recovery conditions and constants for a model.
    Bounds,
    /// Phase-transition sweep over (p, α0, ε, N) × trials.
    Sweep,
    /// Run the property suite; exits 1 if any property fails.
    Verify,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Jsonl,
}

/// Model source shared by the data-producing subcommands.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSource {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<HlmModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scenario: Option<ScenarioRef>,
}

impl ModelSource {
    fn build(&self, seed: u64) -> Result<HlmModel, Error> {
        match (&self.model, &self.scenario) {
            (Some(m), None) => Ok(m.clone()),
            (None, Some(s)) => Scenario::from_name(&s.name, &s.params)?.build(&mut derived_rng(seed, u64::MAX)),
            _ => Err(Error::Parse("config needs exactly one of `model` and `scenario`".into())),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleConfig {
    n: usize,
    #[serde(flatten)]
    source: ModelSource,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FitConfig {
    p: f64,
    /// Sample size when no dataset file is given.
    #[serde(default)]
    n: Option<usize>,
    /// CSV or binary dataset to fit instead of sampling.
    #[serde(default)]
    dataset: Option<PathBuf>,
    /// K and d; taken from the model when absent.
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    d: Option<usize>,
    #[serde(default = "default_restarts")]
    restarts: usize,
    #[serde(default)]
    grid: GridSpec,
    #[serde(flatten)]
    source: ModelSource,
}

fn default_restarts() -> usize {
    20
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsConfig {
    p: f64,
    /// Monte Carlo budget for the δ/κ lower bounds; skipped when absent.
    #[serde(default)]
    delta_kappa_budget: Option<usize>,
    #[serde(default)]
    grid: GridSpec,
    #[serde(flatten)]
    source: ModelSource,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config_sha256: String,
    seed: u64,
    files: Vec<String>,
}

#[derive(Serialize)]
struct BoundsReport {
    p: f64,
    tau0: Option<f64>,
    /// Closed-form lower bound for uniform-ball inliers; `tau0` falling below
    /// it is flagged, not treated as an error.
    tau0_lower_bound: Option<f64>,
    tau0_below_lower_bound: bool,
    exact: Option<ExactRecoveryReport>,
    noise: Option<NoiseBounds>,
    delta_kappa: Option<DeltaKappaBounds>,
}

/// Failure of the task's claim, as opposed to a usage or capability error.
struct ClaimFailed;

enum Failure {
    Claim,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<ClaimFailed> for Failure {
    fn from(_: ClaimFailed) -> Self {
        Failure::Claim
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Claim) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_config(cli: &Cli) -> Result<(String, Vec<u8>), Failure> {
    let path = cli.config.as_ref().ok_or_else(|| Failure::Usage("this subcommand needs --config".into()))?;
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Usage("config is not UTF-8".into()))?;
    Ok((text, bytes))
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, Failure> {
    toml::from_str(text).map_err(|e| Failure::Usage(format!("config: {e}")))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl<'a> Outputs<'a> {
    fn new(dir: &'a Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        Ok(Outputs { dir, files: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<fs::File>, Failure> {
        self.files.push(name.to_string());
        let path = self.dir.join(name);
        let f = fs::File::create(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        Ok(BufWriter::new(f))
    }

    fn write(&mut self, name: &str, contents: &[u8]) -> Result<(), Failure> {
        use std::io::Write;
        let mut w = self.create(name)?;
        w.write_all(contents).and_then(|()| w.flush()).map_err(|e| Failure::Usage(format!("{name}: {e}")))
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn echo_model(&mut self, model: &HlmModel) -> Result<(), Failure> {
        #[derive(Serialize)]
        struct Echo<'m> {
            model: &'m HlmModel,
        }
        let text = toml::to_string(&Echo { model }).map_err(|e| Failure::Usage(e.to_string()))?;
        self.write("model.toml", text.as_bytes())
    }

    fn finish(mut self, command: &str, config: &[u8], seed: u64) -> Result<(), Failure> {
        let mut files = std::mem::take(&mut self.files);
        files.push("manifest.json".into());
        let manifest = Manifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: sha256_hex(config),
            seed,
            files,
        };
        self.json("manifest.json", &manifest)
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    match cli.command {
        Command::Sample => {
            let (text, bytes) = read_config(cli)?;
            let cfg: SampleConfig = parse(&text)?;
            let model = cfg.source.build(seed)?;
            let ds = model.sample(cfg.n, derive_seed(seed, 0));
            let mut out = Outputs::new(&cli.out)?;
            ds.write_csv(out.create("dataset.csv")?)?;
            ds.write_binary(out.create("dataset.bin")?)?;
            out.echo_model(&model)?;
            out.finish("sample", &bytes, seed)?;
            println!("sampled {} points in R^{}", ds.len(), ds.ambient_dim());
        }
        Command::Fit | Command::Oracle => {
            let (text, bytes) = read_config(cli)?;
            let cfg: FitConfig = parse(&text)?;
            let oracle = matches!(cli.command, Command::Oracle);
            let (ds, model) = fit_input(&cfg, seed)?;
            let k = cfg.k.or(model.as_ref().map(HlmModel::k)).ok_or_else(|| Failure::Usage("need `k` or a model".into()))?;
            let d = cfg.d.or(model.as_ref().map(HlmModel::dim)).ok_or_else(|| Failure::Usage("need `d` or a model".into()))?;
            let found = if oracle {
                if ds.ambient_dim() != 2 || d != 1 {
                    return Err(Failure::Usage(format!(
                        "the grid oracle covers lines in the plane only, got D = {}, d = {d}",
                        ds.ambient_dim()
                    )));
                }
                grid_search_global(&ds, k, cfg.p, &cfg.grid)?
            } else {
                multi_restart_with(&ds, k, d, cfg.p, derive_seed(seed, 1), &MultiRestartOptions::new(cfg.restarts))?
            };
            let name = if oracle { "oracle" } else { "fit" };
            let mut out = Outputs::new(&cli.out)?;
            let mut report = BTreeMap::new();
            report.insert("result", serde_json::to_value(&found).map_err(|e| Failure::Usage(e.to_string()))?);
            if let Some(m) = &model {
                let dist = lpflats::grassmann::recovery_distance(&found.tuple, m.truth())?.0;
                report.insert("recovery_distance", dist.into());
                out.echo_model(m)?;
            }
            out.json(&format!("{name}.json"), &report)?;
            out.finish(name, &bytes, seed)?;
            println!("{name}: energy {:.12e} after {} iterations", found.energy, found.iterations);
        }
        Command::Bounds => {
            let (text, bytes) = read_config(cli)?;
            let cfg: BoundsConfig = parse(&text)?;
            let model = cfg.source.build(seed)?;
            let report = bounds_report(&model, &cfg, seed)?;
            let mut out = Outputs::new(&cli.out)?;
            out.json("bounds.json", &report)?;
            out.echo_model(&model)?;
            out.finish("bounds", &bytes, seed)?;
            if let Some(e) = &report.exact {
                println!("exact recovery: alpha0 = {} vs rhs = {} -> {}", e.lhs, e.rhs, if e.holds { "holds" } else { "fails" });
            }
            if let Some(n) = &report.noise {
                println!("noise: eps = {}, eps_max = {:?}, eps_ceiling = {:?}, f = {:?}", n.eps, n.eps_max, n.eps_ceiling, n.f);
            }
            if let Some(t) = report.tau0 {
                println!("tau0 = {t}");
            }
            if report.tau0_below_lower_bound {
                println!("note: tau0 is below the closed-form lower bound {:?}", report.tau0_lower_bound);
            }
        }
        Command::Sweep => {
            let (text, bytes) = read_config(cli)?;
            let mut cfg: ExperimentConfig = parse(&text)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let result = phase_transition_sweep(&cfg, cli.workers)?;
            let mut out = Outputs::new(&cli.out)?;
            match cli.format {
                Format::Csv => write_rows_csv(&result.rows, out.create("results.csv")?)?,
                Format::Jsonl => write_rows_jsonl(&result.rows, out.create("results.jsonl")?)?,
            }
            out.json("summary.json", &result.cells)?;
            if let Some(m) = &cfg.model {
                out.echo_model(m)?;
            }
            out.finish("sweep", &bytes, cfg.seed)?;
            for c in &result.cells {
                println!(
                    "p={} alpha0={} eps={} N={}: {}/{} (rate {:.3}, 95% CI [{:.3}, {:.3}])",
                    c.p, c.alpha0, c.eps, c.n, c.successes, c.trials, c.success_rate, c.ci_low, c.ci_high
                );
            }
        }
        Command::Verify => {
            let bytes = match &cli.config {
                Some(_) => read_config(cli)?.1,
                None => Vec::new(),
            };
            let report = property_suite(seed);
            let mut out = Outputs::new(&cli.out)?;
            out.json("verify.json", &report)?;
            out.finish("verify", &bytes, seed)?;
            for c in &report.checks {
                println!("{} {:<12} {:<32} margin {:+.3e}", if c.passed { "PASS" } else { "FAIL" }, c.module, c.name, c.margin);
            }
            if !report.all_passed {
                return Err(ClaimFailed.into());
            }
        }
    }
    Ok(())
}

fn fit_input(cfg: &FitConfig, seed: u64) -> Result<(Dataset, Option<HlmModel>), Failure> {
    let model = match (&cfg.source.model, &cfg.source.scenario) {
        (None, None) => None,
        _ => Some(cfg.source.build(seed)?),
    };
    let ds = match (&cfg.dataset, &model, cfg.n) {
        (Some(path), _, _) => {
            let file = fs::File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            if path.extension().is_some_and(|e| e == "bin") {
                Dataset::read_binary(std::io::BufReader::new(file))?
            } else {
                Dataset::read_csv(std::io::BufReader::new(file))?
            }
        }
        (None, Some(m), Some(n)) => m.sample(n, derive_seed(seed, 0)),
        _ => return Err(Failure::Usage("need `dataset`, or a model with `n`".into())),
    };
    Ok((ds, model))
}

fn bounds_report(model: &HlmModel, cfg: &BoundsConfig, seed: u64) -> Result<BoundsReport, Failure> {
    let p = cfg.p;
    let small_p = p > 0.0 && p <= 1.0;
    let tau = if small_p { Some(tau0(model, p)?) } else { None };
    let lower = match (model.inlier().kind, model.outlier()) {
        (InlierKind::UniformBall, OutlierSpec::UniformBallD { radius }) if small_p => {
            Some(tau0_lower_bound_uniform(model.dim(), p, model.k(), model.inlier().radius, *radius))
        }
        _ => None,
    };
    let noiseless = model.noise_level() == 0.0;
    let exact = if noiseless && small_p { Some(check_exact_recovery_condition(model, p)?) } else { None };
    let noise = if !noiseless && small_p { Some(noise_recovery_bounds(model, p)?) } else { None };
    let delta_kappa = match cfg.delta_kappa_budget {
        Some(budget) => Some(delta_kappa_lower_bounds(model, p, &cfg.grid, budget, derive_seed(seed, 2))?),
        None => None,
    };
    Ok(BoundsReport {
        p,
        tau0: tau,
        tau0_lower_bound: lower,
        tau0_below_lower_bound: matches!((tau, lower), (Some(t), Some(l)) if t < l),
        exact,
        noise,
        delta_kappa,
    })
}
