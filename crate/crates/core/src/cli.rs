//! Command-line front end: `limits`, `law`, `simulate`, `hist` and `verify`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::acceptance;
use crate::config::{ExperimentBlock, Kappa, RunConfig};
use crate::error::{Error, Result};
use crate::laws::{self, FluctuationLaw};
use crate::model::ModelSpec;
use crate::montecarlo::{self, EvalOptions, ExperimentConfig, ExperimentReport, Target};
use crate::perturb::{self, LimitSpectrum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "haar-fluct", version, about = "Eigenvalue limits and fluctuations of finite-rank Haar models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides every experiment seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides every experiment sample count.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output directory (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Experiment name, or acceptance criterion name/number for `verify`.
    #[arg(long, global = true)]
    pub filter: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the limiting nontrivial eigenvalues with multiplicities.
    Limits,
    /// Print the limiting fluctuation law of each target and write density tables.
    Law,
    /// Run the experiments and write samples, histograms and reports.
    Simulate,
    /// Run the experiments and write only histogram and density tables.
    Hist,
    /// Run the acceptance suite.
    Verify,
}

/// Runs a parsed command, writing human output to `out`. Returns the exit code.
pub fn run<W: Write>(cli: &Cli, out: &mut W) -> i32 {
    let mut go = || match cli.command {
        Command::Verify => verify(cli, out),
        Command::Limits => limits(cli, out).map(|_| EXIT_OK),
        Command::Law => law(cli, out).map(|_| EXIT_OK),
        Command::Simulate => simulate(cli, out, false).map(|_| EXIT_OK),
        Command::Hist => simulate(cli, out, true).map(|_| EXIT_OK),
    };
    let result = match cli.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(t) => {
            // a second in-process call keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            go()
        }
        None => go(),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("this command needs --config PATH".into()))?;
    let mut cfg = RunConfig::load(path)?;
    for e in &mut cfg.experiments {
        if let Some(seed) = cli.seed {
            e.seed = seed;
        }
        if let Some(samples) = cli.samples {
            e.samples = samples;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &RunConfig) -> Option<PathBuf> {
    cli.out.clone().or_else(|| cfg.output.dir.clone())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize, W: Write>(value: &T, out: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn selected<'a>(cli: &Cli, cfg: &'a RunConfig) -> Result<Vec<(String, &'a ExperimentBlock)>> {
    let picked: Vec<(String, &ExperimentBlock)> = cfg
        .experiments
        .iter()
        .enumerate()
        .map(|(i, e)| (e.label(i), e))
        .filter(|(name, _)| cli.filter.as_deref().is_none_or(|f| f == name))
        .collect();
    if picked.is_empty() {
        return Err(Error::Config(match &cli.filter {
            Some(f) => format!("no experiment named {f}"),
            None => "config has no experiments".into(),
        }));
    }
    Ok(picked)
}

#[derive(Serialize)]
struct LimitsOutput<'a> {
    kind: crate::model::ModelKind,
    n: usize,
    simple: bool,
    #[serde(flatten)]
    limits: &'a LimitSpectrum,
}

fn limits<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    let cfg = load(cli)?;
    let spec = cfg.spec()?;
    let limits = perturb::limiting_eigenvalues(&spec)?;
    let doc = LimitsOutput {
        kind: spec.kind(),
        n: spec.n(),
        simple: limits.is_simple(),
        limits: &limits,
    };
    write_json(&doc, out)?;
    if let Some(dir) = out_dir(cli, &cfg) {
        let mut f = create(&dir, "limits.json")?;
        write_json(&doc, &mut f)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct LawEntry {
    name: String,
    slot: usize,
    limit: Complex64,
    #[serde(skip_serializing_if = "Option::is_none")]
    law: Option<FluctuationLaw>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaling: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    /// Every component of a joint law, this one included.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    joint: Vec<JointComponent>,
}

#[derive(Serialize)]
struct JointComponent {
    slot: usize,
    limit: Complex64,
    law: FluctuationLaw,
    kappa: f64,
    scaling: &'static str,
}

fn same_family(a: &FluctuationLaw, b: &FluctuationLaw) -> bool {
    use FluctuationLaw::*;
    match (a, b) {
        (SharedEigen { alpha1, beta2, .. }, SharedEigen { alpha1: a1, beta2: b2, .. }) => alpha1 == a1 && beta2 == b2,
        (EqualPairs { alpha, .. }, EqualPairs { alpha: a, .. }) => alpha == a,
        _ => false,
    }
}

fn joint_components(spec: &ModelSpec, limits: &LimitSpectrum, law: &FluctuationLaw) -> Vec<JointComponent> {
    (0..limits.len())
        .filter_map(|slot| {
            let other = laws::derive_law(spec, slot).ok()?;
            same_family(law, &other).then(|| JointComponent {
                slot,
                limit: limits.values[slot],
                kappa: other.kappa(),
                scaling: other.scaling_label(),
                law: other,
            })
        })
        .collect()
}

/// Range covering the bulk of a law, from 20000 oracle draws.
fn law_range(law: &FluctuationLaw) -> [f64; 2] {
    let mut xs: Vec<f64> = montecarlo::oracle_draws(law, 20_000, 1).iter().map(|z| z.re).collect();
    xs.sort_by(f64::total_cmp);
    let lo = xs[xs.len() / 1000];
    let hi = xs[xs.len() - 1 - xs.len() / 1000];
    let pad = 0.05 * (hi - lo).max(1e-9);
    [lo - pad, hi + pad]
}

fn law<W: Write>(cli: &Cli, out: &mut W) -> Result<()> {
    let cfg = load(cli)?;
    let spec = cfg.spec()?;
    let limits = perturb::limiting_eigenvalues(&spec)?;
    let targets: Vec<(String, Target, Option<Complex64>)> = if cfg.experiments.is_empty() {
        (0..limits.len()).map(|i| (format!("slot{i}"), Target::Index(i), None)).collect()
    } else {
        selected(cli, &cfg)?
            .into_iter()
            .map(|(name, e)| (name, e.target.to_target(), e.normalizer.map(|z| z.value())))
            .collect()
    };
    let dir = out_dir(cli, &cfg);
    let mut entries = Vec::new();
    for (name, target, normalizer) in targets {
        let slot = target.resolve(&limits)?;
        let raw = laws::derive_law(&spec, slot);
        let joint = raw
            .as_ref()
            .map(|l| joint_components(&spec, &limits, l))
            .unwrap_or_default();
        let derived = raw
            .and_then(|l| l.divided_by(normalizer.unwrap_or(Complex64::new(1.0, 0.0))));
        let entry = match derived {
            Ok(l) => {
                if let Some(dir) = &dir {
                    if l.density(0.0).is_some() {
                        let [lo, hi] = cfg.output.density_range.unwrap_or_else(|| law_range(&l));
                        let mut f = create(dir, &format!("law_{name}.csv"))?;
                        laws::write_density_csv(&l, lo, hi, cfg.output.density_points, &mut f)?;
                    }
                }
                LawEntry {
                    name,
                    slot,
                    limit: limits.values[slot],
                    kappa: Some(l.kappa()),
                    scaling: Some(l.scaling_label()),
                    law: Some(l),
                    error: None,
                    joint,
                }
            }
            Err(e) => LawEntry {
                name,
                slot,
                limit: limits.values[slot],
                law: None,
                kappa: None,
                scaling: None,
                error: Some(e.to_string()),
                joint,
            },
        };
        entries.push(entry);
    }
    write_json(&entries, out)
}

/// Exponent for an experiment: explicit, else the law's, else estimated.
fn resolve_kappa(spec: &ModelSpec, slot: usize, e: &ExperimentBlock, law: Option<&FluctuationLaw>) -> Result<(f64, Option<f64>)> {
    match (e.kappa, law) {
        (Some(Kappa::Value(k)), _) => Ok((k, None)),
        (None, Some(l)) => Ok((l.kappa(), None)),
        _ => {
            let n = spec.n();
            let grid = [n / 4, n / 2, n, 2 * n];
            let est = perturb::estimate_exponent(spec, slot, &grid, 200, e.seed ^ 0x6b61_7070)?;
            if est.exact {
                return Err(Error::Config(
                    "deviation vanishes identically; there is no fluctuation to scale".into(),
                ));
            }
            Ok((est.kappa_hat.round().max(1.0), Some(est.kappa_hat)))
        }
    }
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    name: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_estimate: Option<f64>,
    #[serde(flatten)]
    report: &'a ExperimentReport,
}

fn simulate<W: Write>(cli: &Cli, out: &mut W, hist_only: bool) -> Result<()> {
    let cfg = load(cli)?;
    let spec = cfg.spec()?;
    let limits = perturb::limiting_eigenvalues(&spec)?;
    let dir = out_dir(cli, &cfg);
    if hist_only && dir.is_none() {
        return Err(Error::Config("hist needs an output directory (--out or output.dir)".into()));
    }
    for (name, e) in selected(cli, &cfg)? {
        let target = e.target.to_target();
        let slot = target.resolve(&limits)?;
        let raw_law = laws::derive_law(&spec, slot).ok();
        let (kappa, kappa_estimate) = resolve_kappa(&spec, slot, e, raw_law.as_ref())?;
        let normalizer = e.normalizer.map(|z| z.value());
        // a law only applies at its own scaling
        let law = raw_law
            .filter(|l| l.kappa() == kappa)
            .and_then(|l| l.divided_by(normalizer.unwrap_or(Complex64::new(1.0, 0.0))).ok());
        let samples = montecarlo::run_experiment(&ExperimentConfig {
            spec: spec.clone(),
            target,
            kappa,
            num_samples: e.samples,
            seed: e.seed,
            normalizer,
        })?;
        let opts = EvalOptions {
            threshold: e.threshold,
            bins: cfg.output.bins,
            oracle_seed: e.seed.wrapping_add(0x5eed),
            ..EvalOptions::default()
        };
        let report = montecarlo::evaluate(&samples, law.as_ref(), &opts)?;
        let verdict = match report.verdict {
            Some(true) => format!("KS {:.4} < {:.4} pass", report.ks_statistic.unwrap_or(0.0), report.threshold.unwrap_or(0.0)),
            Some(false) => format!("KS {:.4} >= {:.4} FAIL", report.ks_statistic.unwrap_or(0.0), report.threshold.unwrap_or(0.0)),
            None => "no verdict".into(),
        };
        writeln!(
            out,
            "{name}: limit {}, kappa {kappa}, N {}, {} samples, {verdict} ({:.2}s)",
            report.label, report.n, report.num_samples, report.runtime_secs
        )?;
        for w in &report.warnings {
            writeln!(out, "  warning: {w}")?;
        }
        let Some(dir) = &dir else { continue };
        let mut f = create(dir, &format!("hist_{name}.csv"))?;
        montecarlo::write_histogram_csv(&report.histogram, law.as_ref(), &mut f)?;
        if hist_only {
            if let Some(l) = law.as_ref().filter(|l| l.density(0.0).is_some()) {
                let edges = &report.histogram.edges;
                let [lo, hi] = cfg
                    .output
                    .density_range
                    .unwrap_or([edges[0], edges[edges.len() - 1]]);
                let mut f = create(dir, &format!("density_{name}.csv"))?;
                laws::write_density_csv(l, lo, hi, cfg.output.density_points, &mut f)?;
            }
        } else {
            let mut f = create(dir, &format!("samples_{name}.csv"))?;
            montecarlo::write_samples_csv(&samples, &mut f)?;
            let mut f = create(dir, &format!("report_{name}.json"))?;
            write_json(
                &SimulateOutput {
                    name: &name,
                    kappa_estimate,
                    report: &report,
                },
                &mut f,
            )?;
        }
    }
    Ok(())
}

fn verify<W: Write>(cli: &Cli, out: &mut W) -> Result<i32> {
    if let Some(f) = &cli.filter {
        if !acceptance::criteria().iter().any(|c| c.selected_by(f)) {
            return Err(Error::InvalidArgument(format!("no acceptance criterion matches {f}")));
        }
    }
    let results = acceptance::run_suite(cli.filter.as_deref(), out)?;
    let passed = results.iter().filter(|r| r.passed).count();
    writeln!(out, "{passed}/{} criteria passed", results.len())?;
    Ok(if passed == results.len() { EXIT_OK } else { EXIT_ACCEPTANCE })
}
