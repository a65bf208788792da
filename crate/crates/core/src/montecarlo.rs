//! Repeated-sample experiments: rescaled eigenvalue deviations, histograms and
//! Kolmogorov-Smirnov comparisons against limiting laws.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::FluctuationLaw;
use crate::linalg;
use crate::model::{nontrivial_eigenvalues_from_corner, ModelSpec};
use crate::perturb::{limiting_eigenvalues, LimitSpectrum};
use crate::randmat::RngStream;

/// Asymptotic 1% quantile of `sqrt(n) * D_n`.
pub const KS_QUANTILE_1PCT: f64 = 1.628;

/// Minimum sample count for a KS verdict.
pub const MIN_KS_SAMPLES: usize = 100;

/// Sorts in place and returns the median (mean of the middle pair for even length).
pub fn median(v: &mut [f64]) -> f64 {
    assert!(!v.is_empty(), "median of an empty list");
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Assigns each limit slot one eigenvalue, minimizing the total distance. Inside a
/// cluster of equal limits the assigned eigenvalues are handed out in decreasing
/// order of real part (then imaginary part), so slot order matches rank order.
/// Exact ties in the assignment go to the lower eigenvalue index.
pub fn match_to_limits(eigs: &[Complex64], limits: &LimitSpectrum) -> Result<Vec<Complex64>> {
    let (assign, _) = linalg::match_points(eigs, &limits.values)?;
    let mut out: Vec<Complex64> = assign.iter().map(|&k| eigs[k]).collect();
    for cluster in &limits.clusters {
        if cluster.multiplicity < 2 {
            continue;
        }
        let mut got: Vec<Complex64> = cluster.members.iter().map(|&m| out[m]).collect();
        got.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        for (&m, v) in cluster.members.iter().zip(got) {
            out[m] = v;
        }
    }
    Ok(out)
}

/// `sup |F_n - F|` for a continuous reference CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// `sup |F_a - F_b|` over the pooled sample.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Twice the 1% quantile, the allowance for comparing finite-N samples to a limit law.
pub fn ks_one_sample_threshold(n: usize) -> f64 {
    2.0 * KS_QUANTILE_1PCT / (n as f64).sqrt()
}

pub fn ks_two_sample_threshold(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    2.0 * KS_QUANTILE_1PCT * ((n + m) / (n * m)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bins {
    Count(usize),
    Width(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramData {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub normalized_heights: Vec<f64>,
    /// Non-finite samples left out of the bins.
    pub out_of_range: usize,
}

impl HistogramData {
    pub fn area(&self) -> f64 {
        self.normalized_heights
            .iter()
            .zip(self.edges.windows(2))
            .map(|(h, w)| h * (w[1] - w[0]))
            .sum()
    }
}

/// Area-normalized histogram over `[min, max]`. Defaults to `ceil(2 n^(1/3))` bins. When
/// all samples coincide the result is one bin of width 1 centred on the common value.
pub fn histogram(samples: &[f64], bins: Option<Bins>) -> Result<HistogramData> {
    let finite: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
    let out_of_range = samples.len() - finite.len();
    if finite.is_empty() {
        return Err(Error::InvalidArgument("histogram needs at least one finite sample".into()));
    }
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = finite.len();
    let edges: Vec<f64> = if hi == lo {
        vec![lo - 0.5, lo + 0.5]
    } else {
        let k = match bins {
            None => (2.0 * (n as f64).cbrt()).ceil() as usize,
            Some(Bins::Count(k)) if k > 0 => k,
            Some(Bins::Width(w)) if w > 0.0 && w.is_finite() => ((hi - lo) / w).ceil().max(1.0) as usize,
            Some(b) => return Err(Error::InvalidArgument(format!("bad bin setting {b:?}"))),
        };
        let mut e: Vec<f64> = (0..=k).map(|i| lo + (hi - lo) * i as f64 / k as f64).collect();
        e[k] = hi;
        e
    };
    let k = edges.len() - 1;
    let mut counts = vec![0usize; k];
    for &x in &finite {
        let idx = edges[1..].partition_point(|&e| e < x).min(k - 1);
        counts[idx] += 1;
    }
    let normalized_heights = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, w)| c as f64 / (n as f64 * (w[1] - w[0])))
        .collect();
    Ok(HistogramData {
        edges,
        counts,
        normalized_heights,
        out_of_range,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Slot in [`LimitSpectrum`] order.
    Index(usize),
    /// The `rank`-th largest eigenvalue (1-based) of the cluster near `value`.
    Limit { value: Complex64, rank: usize },
}

impl Target {
    pub fn resolve(&self, limits: &LimitSpectrum) -> Result<usize> {
        match *self {
            Target::Index(i) if i < limits.len() => Ok(i),
            Target::Index(i) => Err(Error::InvalidArgument(format!(
                "limit index {i} out of range for {} limits",
                limits.len()
            ))),
            Target::Limit { value, rank } => limits.slot_for(value, rank, 1e-6),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub spec: ModelSpec,
    pub target: Target,
    /// Deviations are multiplied by `N^(kappa/2)`.
    pub kappa: f64,
    pub num_samples: usize,
    pub seed: u64,
    pub normalizer: Option<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSamples {
    pub slot: usize,
    pub limit: Complex64,
    pub label: String,
    pub kappa: f64,
    pub n: usize,
    pub seed: u64,
    pub values: Vec<Complex64>,
    pub warnings: Vec<String>,
    pub runtime_secs: f64,
}

fn limit_label(limits: &LimitSpectrum, slot: usize) -> String {
    let cluster = limits.cluster_of(slot);
    let v = cluster.value;
    let base = if v.im == 0.0 { format!("{}", v.re) } else { format!("{v}") };
    if cluster.multiplicity > 1 {
        let rank = cluster.members.iter().position(|&m| m == slot).expect("member") + 1;
        format!("{base}#{rank}/{}", cluster.multiplicity)
    } else {
        base
    }
}

/// Draws `num_samples` corners from independent streams `(seed, k)` and returns
/// `N^(kappa/2) (matched eigenvalue - limit) / normalizer` for each.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSamples> {
    if config.num_samples == 0 {
        return Err(Error::InvalidArgument("num_samples must be positive".into()));
    }
    if !config.kappa.is_finite() || config.kappa < 0.0 {
        return Err(Error::InvalidArgument(format!("bad kappa {}", config.kappa)));
    }
    let normalizer = config.normalizer.unwrap_or(Complex64::new(1.0, 0.0));
    if normalizer == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("normalizer must be nonzero".into()));
    }
    let start = Instant::now();
    let spec = &config.spec;
    let limits = limiting_eigenvalues(spec)?;
    let slot = config.target.resolve(&limits)?;
    let limit = limits.values[slot];
    let n = spec.n() as f64;
    let scale = n.powf(config.kappa / 2.0);

    let mut warnings = Vec::new();
    let window = 10.0 / scale;
    for other in &limits.clusters {
        let gap = (other.value - limit).norm();
        if gap > 0.0 && gap < window {
            warnings.push(format!(
                "limit {} is within {gap:.3e} of {limit}; the assignment may mix them",
                other.value
            ));
        }
    }

    let values = (0..config.num_samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::new(config.seed, k).rng();
            let corner = spec.draw_corner(&mut rng);
            let ev = nontrivial_eigenvalues_from_corner(spec, &corner)?;
            let matched = match_to_limits(&ev, &limits)?;
            Ok((matched[slot] - limit) * scale / normalizer)
        })
        .collect::<Result<Vec<Complex64>>>()?;

    Ok(ExperimentSamples {
        slot,
        limit,
        label: limit_label(&limits, slot),
        kappa: config.kappa,
        n: spec.n(),
        seed: config.seed,
        values,
        warnings,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Re,
    Im,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelTest {
    pub channel: Channel,
    /// `closed_form` (one-sample) or `oracle` (two-sample against law draws).
    pub method: String,
    pub ks_statistic: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub label: String,
    pub limit: Complex64,
    pub kappa: f64,
    pub n: usize,
    pub seed: u64,
    pub num_samples: usize,
    pub law: Option<FluctuationLaw>,
    pub histogram: HistogramData,
    pub tests: Vec<ChannelTest>,
    pub ks_statistic: Option<f64>,
    pub threshold: Option<f64>,
    /// `None` without a law or with fewer than [`MIN_KS_SAMPLES`] samples.
    pub verdict: Option<bool>,
    pub warnings: Vec<String>,
    pub runtime_secs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalOptions {
    /// Overrides the default quantile-based threshold.
    pub threshold: Option<f64>,
    pub oracle_draws: usize,
    pub oracle_seed: u64,
    pub bins: Option<Bins>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            threshold: None,
            oracle_draws: 100_000,
            oracle_seed: 0x5eed,
            bins: None,
        }
    }
}

/// Draws from a law on streams `(seed, k)`.
pub fn oracle_draws(law: &FluctuationLaw, count: usize, seed: u64) -> Vec<Complex64> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| law.sample_complex(&mut RngStream::new(seed, k).rng()))
        .collect()
}

fn channel_law(law: &FluctuationLaw, channel: Channel) -> Option<FluctuationLaw> {
    match (law, channel) {
        (_, Channel::Re) => Some(law.clone()),
        (FluctuationLaw::GaussianScaled { c }, Channel::Im) if c.im != 0.0 => Some(FluctuationLaw::GaussianScaled {
            c: Complex64::new(c.im, 0.0),
        }),
        _ => None,
    }
}

/// Compares samples with a law, channel by channel: one-sample KS when the law has a
/// closed-form CDF, otherwise two-sample KS against oracle draws.
pub fn test_against_law(values: &[Complex64], law: &FluctuationLaw, opts: &EvalOptions) -> Vec<ChannelTest> {
    let mut tests = Vec::new();
    for channel in [Channel::Re, Channel::Im] {
        let Some(projected) = channel_law(law, channel) else {
            continue;
        };
        let pick = |z: &Complex64| match channel {
            Channel::Re => z.re,
            Channel::Im => z.im,
        };
        let xs: Vec<f64> = values.iter().map(pick).collect();
        let (method, stat, default_threshold) = if projected.cdf(0.0).is_some() {
            let stat = ks_one_sample(&xs, |x| projected.cdf(x).expect("closed form"));
            ("closed_form", stat, ks_one_sample_threshold(xs.len()))
        } else {
            let draws: Vec<f64> = oracle_draws(law, opts.oracle_draws, opts.oracle_seed).iter().map(pick).collect();
            let stat = ks_two_sample(&xs, &draws);
            ("oracle", stat, ks_two_sample_threshold(xs.len(), draws.len()))
        };
        let threshold = opts.threshold.unwrap_or(default_threshold);
        tests.push(ChannelTest {
            channel,
            method: method.into(),
            ks_statistic: stat,
            threshold,
            passed: stat < threshold,
        });
    }
    tests
}

pub fn evaluate(samples: &ExperimentSamples, law: Option<&FluctuationLaw>, opts: &EvalOptions) -> Result<ExperimentReport> {
    let start = Instant::now();
    let re: Vec<f64> = samples.values.iter().map(|z| z.re).collect();
    let histogram = histogram(&re, opts.bins)?;
    let mut warnings = samples.warnings.clone();
    let tests = match law {
        Some(l) if samples.values.len() >= MIN_KS_SAMPLES => test_against_law(&samples.values, l, opts),
        Some(_) => {
            warnings.push(format!("fewer than {MIN_KS_SAMPLES} samples; no KS verdict"));
            Vec::new()
        }
        None => Vec::new(),
    };
    let worst = tests
        .iter()
        .max_by(|a, b| (a.ks_statistic / a.threshold).total_cmp(&(b.ks_statistic / b.threshold)));
    Ok(ExperimentReport {
        label: samples.label.clone(),
        limit: samples.limit,
        kappa: samples.kappa,
        n: samples.n,
        seed: samples.seed,
        num_samples: samples.values.len(),
        law: law.cloned(),
        histogram,
        ks_statistic: worst.map(|t| t.ks_statistic),
        threshold: worst.map(|t| t.threshold),
        verdict: (!tests.is_empty()).then(|| tests.iter().all(|t| t.passed)),
        tests,
        warnings,
        runtime_secs: samples.runtime_secs + start.elapsed().as_secs_f64(),
    })
}

pub fn write_samples_csv<W: Write>(samples: &ExperimentSamples, out: &mut W) -> Result<()> {
    writeln!(out, "sample_index,limit_label,scaled_deviation_re,scaled_deviation_im")?;
    for (k, z) in samples.values.iter().enumerate() {
        writeln!(out, "{k},{},{:.17e},{:.17e}", samples.label, z.re, z.im)?;
    }
    Ok(())
}

/// `left,right,count,height[,density]`, the last column being the law's density at
/// the bin centre when an overlay is given.
pub fn write_histogram_csv<W: Write>(hist: &HistogramData, overlay: Option<&FluctuationLaw>, out: &mut W) -> Result<()> {
    let with_overlay = overlay.is_some_and(|l| l.density(0.0).is_some());
    if with_overlay {
        writeln!(out, "left,right,count,height,density")?;
    } else {
        writeln!(out, "left,right,count,height")?;
    }
    for (i, w) in hist.edges.windows(2).enumerate() {
        write!(out, "{:.12e},{:.12e},{},{:.12e}", w[0], w[1], hist.counts[i], hist.normalized_heights[i])?;
        if with_overlay {
            let mid = 0.5 * (w[0] + w[1]);
            let d = overlay.and_then(|l| l.density(mid)).unwrap_or(f64::NAN);
            write!(out, ",{d:.12e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn cs(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| c(x)).collect()
    }

    #[test]
    fn obvious_pairing() {
        let limits = LimitSpectrum::from_values(cs(&[4.0, 2.0, 1.0, -4.0, -2.0, -1.0]));
        let eigs = cs(&[-0.99, 3.9, -1.97, 2.1, -4.02, 1.05]);
        let m = match_to_limits(&eigs, &limits).unwrap();
        assert_eq!(m, cs(&[3.9, 2.1, 1.05, -4.02, -1.97, -0.99]));
        assert!(match_to_limits(&eigs[..5], &limits).is_err());
    }

    #[test]
    fn clusters_are_sorted_decreasing() {
        let limits = LimitSpectrum::from_values(cs(&[2.0, 2.0, 2.0, 1.0]));
        let eigs = vec![c(1.98), Complex64::new(2.01, 0.1), c(1.02), c(2.03)];
        let m = match_to_limits(&eigs, &limits).unwrap();
        assert_eq!(m, vec![c(2.03), Complex64::new(2.01, 0.1), c(1.98), c(1.02)]);
    }

    #[test]
    fn equidistant_tie_is_deterministic() {
        let limits = LimitSpectrum::from_values(cs(&[0.0, 2.0]));
        let eigs = cs(&[1.0, 1.0]);
        let a = match_to_limits(&eigs, &limits).unwrap();
        assert_eq!(a, match_to_limits(&eigs, &limits).unwrap());
        assert_eq!(a, cs(&[1.0, 1.0]));
    }

    fn normal_cdf(x: f64) -> f64 {
        laws::gaussian_law(c(std::f64::consts::SQRT_2)).unwrap().cdf(x).unwrap()
    }

    #[test]
    fn ks_one_sample_edge_cases() {
        assert!(ks_one_sample(&vec![0.3; 200], normal_cdf) >= 0.5);
        let exp_cdf = |x: f64| if x < 0.0 { 0.0 } else { 1.0 - (-x).exp() };
        assert_eq!(ks_one_sample(&[-1.0, -2.0, -0.5], exp_cdf), 1.0);
    }

    #[test]
    fn ks_one_sample_null_frequency() {
        use rand_distr::{Distribution, StandardNormal};
        let trials = 200;
        let mut ok = 0;
        for t in 0..trials {
            let mut rng = RngStream::new(77, t).rng();
            let xs: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
            if ks_one_sample(&xs, normal_cdf) < 1.63 / 100.0 {
                ok += 1;
            }
        }
        assert!(ok as f64 >= 0.97 * trials as f64, "{ok}/{trials}");
    }

    #[test]
    fn ks_two_sample_cases() {
        let a = [0.1, 0.5, 0.2, 0.9];
        assert_eq!(ks_two_sample(&a, &a), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0, 5.0]), 1.0);
        assert!(ks_two_sample(&[0.0; 10], &[0.0, 1.0]) - 0.5 < 1e-15);
        use rand_distr::{Distribution, Exp1};
        let trials = 100;
        let mut ok = 0;
        for t in 0..trials {
            let mut rng = RngStream::new(78, t).rng();
            let xs: Vec<f64> = (0..10_000).map(|_| Exp1.sample(&mut rng)).collect();
            let ys: Vec<f64> = (0..10_000).map(|_| Exp1.sample(&mut rng)).collect();
            if ks_two_sample(&xs, &ys) < 1.63 * (2.0f64 / 1e4).sqrt() {
                ok += 1;
            }
        }
        assert!(ok >= 96, "{ok}/{trials}");
    }

    #[test]
    fn histogram_shapes() {
        let h = histogram(&[2.5], None).unwrap();
        assert_eq!(h.edges, vec![2.0, 3.0]);
        assert_eq!(h.normalized_heights, vec![1.0]);
        let h = histogram(&[1.0; 7], None).unwrap();
        assert_eq!(h.counts, vec![7]);
        let xs: Vec<f64> = (0..400).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        let h = histogram(&xs, None).unwrap();
        assert_eq!(h.counts.len(), 15);
        assert_eq!(h.counts.iter().sum::<usize>(), 400);
        assert!((h.area() - 1.0).abs() < 1e-12);
        let h = histogram(&[0.0, 1.0, f64::NAN], Some(Bins::Width(0.25))).unwrap();
        assert_eq!((h.counts.len(), h.out_of_range), (4, 1));
        assert!(histogram(&[], None).is_err());
    }

    fn fig1_config(samples: usize) -> ExperimentConfig {
        ExperimentConfig {
            spec: ModelSpec::rotation(cs(&[4.0, 2.0, 1.0]), 400).unwrap(),
            target: Target::Limit { value: c(4.0), rank: 1 },
            kappa: 1.0,
            num_samples: samples,
            seed: 1,
            normalizer: Some(c(4.0)),
        }
    }

    #[test]
    fn zero_samples_rejected_and_bad_target() {
        assert!(run_experiment(&fig1_config(0)).is_err());
        let mut cfg = fig1_config(10);
        cfg.target = Target::Index(6);
        assert!(run_experiment(&cfg).is_err());
    }

    #[test]
    fn determinism_across_thread_counts() {
        let cfg = fig1_config(64);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap());
        assert_eq!(one.values, many.values);
        assert_eq!(one.label, "4");
    }

    #[test]
    fn report_and_csv() {
        let samples = run_experiment(&fig1_config(200)).unwrap();
        let law = laws::gaussian_law(c(4.0)).unwrap().divided_by(c(4.0)).unwrap();
        let report = evaluate(&samples, Some(&law), &EvalOptions::default()).unwrap();
        assert_eq!(report.verdict, Some(report.ks_statistic.unwrap() < report.threshold.unwrap()));
        assert_eq!(report.tests.len(), 1);
        let mut buf = Vec::new();
        write_samples_csv(&samples, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 201);
        let mut buf = Vec::new();
        write_histogram_csv(&report.histogram, Some(&law), &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("left,right,count,height,density"));
        let json = serde_json::to_string(&report).unwrap();
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.label, report.label);
        assert_eq!(back.num_samples, report.num_samples);
    }

    #[test]
    fn small_runs_get_no_verdict() {
        let samples = run_experiment(&fig1_config(20)).unwrap();
        let law = laws::gaussian_law(c(1.0)).unwrap();
        let report = evaluate(&samples, Some(&law), &EvalOptions::default()).unwrap();
        assert_eq!(report.verdict, None);
    }
}
