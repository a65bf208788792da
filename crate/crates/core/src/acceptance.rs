//! The acceptance suite: twelve reproducibility criteria with fixed seeds and
//! thresholds, shared by `haar-fluct verify` and the `acceptance` test target.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::laws::{self, FluctuationLaw, Side};
use crate::linalg;
use crate::model::{self, ModelKind, ModelSpec};
use crate::montecarlo::{self, ExperimentConfig, Target};
use crate::ncpoly::NCPolynomial;
use crate::perturb::{self, pi1, pi2};
use crate::randmat::{self, RngStream};

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub title: &'static str,
    run: fn() -> Result<Outcome>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub runtime_secs: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2} {}] {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.title,
            self.detail,
            self.runtime_secs
        )
    }
}

impl Criterion {
    pub fn run(&self) -> CriterionResult {
        let start = Instant::now();
        let outcome = (self.run)().unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!("error: {e}"),
        });
        CriterionResult {
            id: self.id,
            name: self.name,
            title: self.title,
            passed: outcome.passed,
            detail: outcome.detail,
            runtime_secs: start.elapsed().as_secs_f64(),
        }
    }

    /// Matches by exact name or id.
    pub fn selected_by(&self, filter: &str) -> bool {
        filter
            .split(',')
            .map(str::trim)
            .any(|f| f == self.name || f.parse::<u32>().ok() == Some(self.id))
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            name: "fig1",
            title: "rotation model top eigenvalue vs standard normal",
            run: fig1,
        },
        Criterion {
            id: 2,
            name: "fig2",
            title: "mixture coefficients and density, cubic conjugation model",
            run: fig2_exact,
        },
        Criterion {
            id: 3,
            name: "fig3",
            title: "mixture coefficients and density, mixed conjugation model",
            run: fig3_exact,
        },
        Criterion {
            id: 4,
            name: "fig2-mc",
            title: "Monte Carlo vs exponential mixture near 2",
            run: fig2_monte_carlo,
        },
        Criterion {
            id: 5,
            name: "trivial",
            title: "full spectrum is reduced spectrum plus zeros",
            run: trivial_structure,
        },
        Criterion {
            id: 6,
            name: "series",
            title: "second-order perturbation terms",
            run: perturbation_series,
        },
        Criterion {
            id: 7,
            name: "minors",
            title: "minor expansion and rescaled characteristic polynomial",
            run: minors_identity,
        },
        Criterion {
            id: 8,
            name: "fig6",
            title: "triple eigenvalue vs spectrum of Z Gamma Z*",
            run: multiplicity_law,
        },
        Criterion {
            id: 9,
            name: "fig4",
            title: "shared eigenvalue with mixed scalings",
            run: mixed_scaling,
        },
        Criterion {
            id: 10,
            name: "fig5",
            title: "equal pairs",
            run: equal_pairs,
        },
        Criterion {
            id: 11,
            name: "exponents",
            title: "fluctuation exponent estimates",
            run: exponents,
        },
        Criterion {
            id: 12,
            name: "haar",
            title: "Haar corner statistics",
            run: haar_statistics,
        },
    ]
}

/// Runs the selected criteria, writing one line per criterion as it finishes.
pub fn run_suite<W: Write>(filter: Option<&str>, out: &mut W) -> std::io::Result<Vec<CriterionResult>> {
    let mut results = Vec::new();
    for c in criteria() {
        if filter.is_some_and(|f| !c.selected_by(f)) {
            continue;
        }
        let r = c.run();
        writeln!(out, "{}", r.line())?;
        out.flush()?;
        results.push(r);
    }
    Ok(results)
}

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn cs(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| c(x)).collect()
}

fn real_parts(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

fn run(spec: &ModelSpec, target: Target, kappa: f64, normalizer: Option<f64>, seed: u64) -> Result<Vec<f64>> {
    let samples = montecarlo::run_experiment(&ExperimentConfig {
        spec: spec.clone(),
        target,
        kappa,
        num_samples: 2000,
        seed,
        normalizer: normalizer.map(c),
    })?;
    Ok(real_parts(&samples.values))
}

fn oracle(law: &FluctuationLaw, seed: u64) -> Vec<f64> {
    real_parts(&montecarlo::oracle_draws(law, 100_000, seed))
}

fn ks_line(label: &str, stat: f64, threshold: f64) -> String {
    format!("{label} KS {stat:.4} (< {threshold})")
}

fn fig1() -> Result<Outcome> {
    let spec = ModelSpec::rotation(cs(&[4.0, 2.0, 1.0]), 400)?;
    let xs = run(&spec, Target::Limit { value: c(4.0), rank: 1 }, 1.0, Some(4.0), 101)?;
    let standard = FluctuationLaw::GaussianScaled { c: c(1.0) };
    let stat = montecarlo::ks_one_sample(&xs, |x| standard.cdf(x).expect("closed form"));
    let derived = laws::gaussian_law(c(4.0))?.divided_by(c(4.0))?;
    let companion = montecarlo::ks_one_sample(&xs, |x| derived.cdf(x).expect("closed form"));
    Ok(Outcome {
        passed: stat < 0.08,
        detail: format!(
            "{}; companion vs N(0,1/2) KS {companion:.4} ({})",
            ks_line("vs N(0,1)", stat, 0.08),
            if companion < 0.08 { "pass" } else { "fail" }
        ),
    })
}

fn exact_check(
    poly: &str,
    alphas: &[f64],
    betas: &[f64],
    side: Side,
    want: &[f64],
    density: fn(f64) -> f64,
    xs: &[f64],
) -> Result<Outcome> {
    let p = NCPolynomial::parse(poly)?;
    let got = laws::mixture_coefficients(&p, &cs(alphas), &cs(betas), side)?;
    let coeff_err = got
        .iter()
        .zip(want)
        .map(|(g, &w)| (g - c(w)).norm())
        .fold(if got.len() == want.len() { 0.0 } else { f64::INFINITY }, f64::max);
    let coeffs: Vec<f64> = got.iter().map(|z| z.re).collect();
    let mut dens_err = 0.0f64;
    for &x in xs {
        dens_err = dens_err.max((laws::expmixture_density(&coeffs, x)? - density(x)).abs());
    }
    Ok(Outcome {
        passed: coeff_err < 1e-10 && dens_err < 1e-10,
        detail: format!("coefficients {coeffs:?}, max coefficient error {coeff_err:.1e}, max density error {dens_err:.1e}"),
    })
}

fn fig2_exact() -> Result<Outcome> {
    exact_check(
        "x + y + x*y*x + y*x*y",
        &[5.0, 2.0, 1.0],
        &[4.0, 3.0, -1.0],
        Side::A(1),
        &[12.0, 6.0, -14.0 / 3.0],
        |x| {
            if x < 0.0 {
                21.0 / 800.0 * (3.0 * x / 14.0).exp()
            } else {
                3.0 / 800.0 * (-25.0 * (-x / 6.0).exp() + 32.0 * (-x / 12.0).exp())
            }
        },
        &[-5.0, -1.0, 0.5, 1.0, 5.0, 20.0],
    )
}

fn fig3_exact() -> Result<Outcome> {
    exact_check(
        "x + y + x*y + y*x + 0.5*x*y*x + 0.5*y*x*y",
        &[2.0, 1.0, -1.0],
        &[4.0, -0.2],
        Side::A(0),
        &[-44.0, -68.0 / 55.0],
        |x| {
            if x < 0.0 {
                55.0 / 2352.0 * ((x / 44.0).exp() - (55.0 * x / 68.0).exp())
            } else {
                0.0
            }
        },
        &[-20.0, -5.0, -1.0, -0.5, -0.1, 0.5, 3.0],
    )
}

fn fig2_spec() -> Result<ModelSpec> {
    ModelSpec::conjugation(
        NCPolynomial::parse("x + y + x*y*x + y*x*y")?,
        cs(&[5.0, 2.0, 1.0]),
        cs(&[4.0, 3.0, -1.0]),
        400,
    )
}

fn fig2_monte_carlo() -> Result<Outcome> {
    let xs = run(&fig2_spec()?, Target::Limit { value: c(2.0), rank: 1 }, 2.0, None, 104)?;
    let k = [12.0, 6.0, -14.0 / 3.0];
    laws::expmixture_cdf(&k, 0.0)?;
    let stat = montecarlo::ks_one_sample(&xs, |x| laws::expmixture_cdf(&k, x).expect("validated"));
    Ok(Outcome {
        passed: stat < 0.06,
        detail: ks_line("vs mixture {12, 6, -14/3}", stat, 0.06),
    })
}

fn random_value<R: Rng + ?Sized>(rng: &mut R, complex: bool) -> Complex64 {
    let mag = rng.random_range(0.5..3.0);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    if complex {
        Complex64::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU))
    } else {
        c(sign * mag)
    }
}

fn random_spec<R: Rng + ?Sized>(rng: &mut R) -> Result<ModelSpec> {
    let kind = [
        ModelKind::Rotation,
        ModelKind::SumConjugation,
        ModelKind::Conjugation,
        ModelKind::GeneralTwoVar,
    ][rng.random_range(0..4)];
    let complex = rng.random_bool(0.3);
    let r = rng.random_range(1..=3);
    let s = rng.random_range(1..=3);
    let alphas: Vec<Complex64> = (0..r).map(|_| random_value(rng, complex)).collect();
    let betas: Vec<Complex64> = if kind == ModelKind::Rotation {
        Vec::new()
    } else {
        (0..s).map(|_| random_value(rng, complex)).collect()
    };
    let poly = kind
        .needs_polynomial()
        .then(|| NCPolynomial::random(rng, 4, 3, 3, complex));
    let n = rng.random_range(20..=50);
    ModelSpec::new(kind, poly, alphas, betas, n)
}

fn trivial_structure() -> Result<Outcome> {
    let mut rng = RngStream::new(105, 0).rng();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for k in 0..50u64 {
        let spec = random_spec(&mut rng)?;
        let u = randmat::haar_unitary(spec.n(), &mut RngStream::new(105, k + 1).rng());
        let report = model::spectrum_consistency_check(&spec, &u, 1e-4)?;
        worst = worst.max(report.max_distance);
        if !report.passed {
            failures += 1;
        }
    }
    Ok(Outcome {
        passed: failures == 0,
        detail: format!("{failures}/50 mismatches, worst matched distance {worst:.2e} (tolerance 1e-4)"),
    })
}

/// Eigenvalue of `Lambda + eps X` continuing `lambda_p`.
fn tracked_eigenvalue(lambdas: &[Complex64], x: &linalg::ComplexMatrix, eps: f64, p: usize) -> Result<Complex64> {
    let n = lambdas.len();
    let m = &linalg::padded_diag(lambdas, n) + &linalg::scale(x, c(eps));
    let ev = linalg::eigenvalues(&m)?;
    let (assign, _) = linalg::match_points(&ev, lambdas)?;
    Ok(ev[assign[p]])
}

fn perturbation_series() -> Result<Outcome> {
    let mut rng = RngStream::new(106, 0).rng();
    let (mut ratio_lo, mut ratio_hi, mut fd_err) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut bad = 0;
    for _ in 0..100 {
        let n = rng.random_range(3..=5);
        // gaps >= 0.5 on a random line through the plane
        let dir = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let mut pos = rng.random_range(-2.0..2.0);
        let lambdas: Vec<Complex64> = (0..n)
            .map(|_| {
                pos += rng.random_range(0.5..1.5);
                dir * pos
            })
            .collect();
        let x = linalg::ComplexMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        for p in 0..n {
            let p1 = pi1(&x, p)?;
            let p2 = pi2(&lambdas, &x, p)?;
            let remainder = |eps: f64| -> Result<f64> {
                Ok((tracked_eigenvalue(&lambdas, &x, eps, p)? - (lambdas[p] + p1 * eps + p2 * eps * eps)).norm())
            };
            let ratio = remainder(1e-2)? / remainder(0.5e-2)?;
            ratio_lo = ratio_lo.min(ratio);
            ratio_hi = ratio_hi.max(ratio);
            let h = 1e-4;
            let plus = tracked_eigenvalue(&lambdas, &x, h, p)?;
            let minus = tracked_eigenvalue(&lambdas, &x, -h, p)?;
            let d1 = (plus - minus) / (2.0 * h);
            let d2 = (plus - lambdas[p] * 2.0 + minus) / (2.0 * h * h);
            let e1 = (d1 - p1).norm() / p1.norm().max(1.0);
            let e2 = (d2 - p2).norm() / p2.norm().max(1.0);
            fd_err = fd_err.max(e1).max(e2);
            if !(6.0..=10.0).contains(&ratio) || e1 > 1e-5 || e2 > 1e-5 {
                bad += 1;
            }
        }
    }
    Ok(Outcome {
        passed: bad == 0,
        detail: format!(
            "remainder ratio in [{ratio_lo:.2}, {ratio_hi:.2}] (want [6, 10]), worst finite-difference error {fd_err:.1e}, {bad} violations"
        ),
    })
}

fn minors_identity() -> Result<Outcome> {
    let mut rng = RngStream::new(107, 0).rng();
    let mut worst_det = 0.0f64;
    for _ in 0..50 {
        let r = rng.random_range(1..=3);
        let s = rng.random_range(1..=3);
        let complex = rng.random_bool(0.5);
        let alphas: Vec<Complex64> = (0..r).map(|_| random_value(&mut rng, complex)).collect();
        let betas: Vec<Complex64> = (0..s).map(|_| random_value(&mut rng, complex)).collect();
        let spec = ModelSpec::sum_conjugation(alphas.clone(), betas.clone(), 20)?;
        let u = spec.draw_corner(&mut rng);
        let x = model::build_reduced(&spec, &u)?.total();
        for _ in 0..20 {
            let lambda = Complex64::new(rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
            let det = linalg::determinant(&(&linalg::scale(&linalg::identity(r + s), lambda) - &x));
            let got = laws::charpoly_minors(&alphas, &betas, &u, lambda)?;
            worst_det = worst_det.max((got - det).norm() / det.norm().max(f64::MIN_POSITIVE));
        }
    }
    let mut worst_psi = 0.0f64;
    for _ in 0..50 {
        let m = rng.random_range(1..=4);
        let s = rng.random_range(1..=4);
        let gamma: Vec<f64> = (0..s).map(|_| random_value(&mut rng, false).re).collect();
        let z = randmat::ginibre(m, s, &mut rng);
        let got = laws::psi_coefficients(&z, &gamma)?;
        let want = laws::monic_from_roots(&laws::spectral_eigenvalues(&z, &gamma)?);
        for (g, w) in got.iter().zip(&want) {
            worst_psi = worst_psi.max((g - w).abs() / w.abs().max(1.0));
        }
    }
    Ok(Outcome {
        passed: worst_det < 1e-9 && worst_psi < 1e-9,
        detail: format!("minor expansion relative error {worst_det:.1e}, psi coefficient error {worst_psi:.1e}"),
    })
}

fn multiplicity_law() -> Result<Outcome> {
    let spec = ModelSpec::sum_conjugation(cs(&[2.0, 2.0, 2.0]), cs(&[1.0, 1.0, -1.0]), 400)?;
    let gamma = laws::gamma_matrix(2.0, &[1.0, 1.0, -1.0])?;
    let mut parts = Vec::new();
    let mut passed = true;
    for (rank, label) in [(1, "top"), (2, "middle"), (3, "bottom")] {
        let xs = run(&spec, Target::Limit { value: c(2.0), rank }, 2.0, None, 108)?;
        let law = FluctuationLaw::MatrixSpectral {
            gamma: gamma.clone(),
            m: 3,
            rank,
        };
        let stat = montecarlo::ks_two_sample(&xs, &oracle(&law, 1108));
        passed &= stat < 0.06;
        parts.push(ks_line(label, stat, 0.06));
    }
    Ok(Outcome {
        passed,
        detail: parts.join("; "),
    })
}

fn mixed_scaling() -> Result<Outcome> {
    use laws::SharedComponent::*;
    let spec = ModelSpec::sum_conjugation(cs(&[1.0, 1.0]), cs(&[1.0, 2.0]), 400)?;
    let law = |component| FluctuationLaw::SharedEigen {
        alpha1: 1.0,
        beta2: 2.0,
        component,
    };
    let a = run(&spec, Target::Limit { value: c(2.0), rank: 1 }, 2.0, None, 109)?;
    let za = law(Zeta);
    let sa = montecarlo::ks_one_sample(&a, |x| za.cdf(x).expect("closed form"));
    let b = run(&spec, Target::Limit { value: c(1.0), rank: 1 }, 1.0, None, 109)?;
    let xb = law(Xi1);
    let sb = montecarlo::ks_one_sample(&b, |x| xb.cdf(x).expect("closed form"));
    let cc = run(&spec, Target::Limit { value: c(1.0), rank: 2 }, 2.0, None, 109)?;
    let sc = montecarlo::ks_two_sample(&cc, &oracle(&law(Xi3), 1109));
    Ok(Outcome {
        passed: sa < 0.06 && sb < 0.06 && sc < 0.06,
        detail: format!(
            "{}; {}; {}",
            ks_line("(a) N-scaled near 2", sa, 0.06),
            ks_line("(b) sqrt(N)-scaled top near 1", sb, 0.06),
            ks_line("(c) N-scaled middle near 1 vs oracle", sc, 0.06)
        ),
    })
}

fn equal_pairs() -> Result<Outcome> {
    let spec = ModelSpec::sum_conjugation(cs(&[2.0, 3.0]), cs(&[2.0, 3.0]), 400)?;
    let xs = run(&spec, Target::Limit { value: c(3.0), rank: 1 }, 1.0, None, 110)?;
    let law = FluctuationLaw::EqualPairs {
        alpha: 3.0,
        component: laws::PairComponent::Top,
    };
    let stat = montecarlo::ks_one_sample(&xs, |x| law.cdf(x).expect("closed form"));
    Ok(Outcome {
        passed: stat < 0.06,
        detail: ks_line("vs (2/9) x exp(-x^2/9)", stat, 0.06),
    })
}

fn exponents() -> Result<Outcome> {
    let grid = [100, 200, 400, 800];
    let shared = ModelSpec::sum_conjugation(cs(&[1.0, 1.0]), cs(&[1.0, 2.0]), 100)?;
    let shared_limits = perturb::limiting_eigenvalues(&shared)?;
    let cases = [
        ("rotation near 4", ModelSpec::rotation(cs(&[4.0, 2.0, 1.0]), 100)?, 0, (0.8, 1.2)),
        ("conjugation near 2", fig2_spec()?.with_n(100)?, 1, (1.7, 2.3)),
        (
            "shared, top near 1",
            shared.clone(),
            shared_limits.slot_for(c(1.0), 1, 1e-9)?,
            (0.8, 1.2),
        ),
        (
            "shared, middle near 1",
            shared.clone(),
            shared_limits.slot_for(c(1.0), 2, 1e-9)?,
            (1.7, 2.3),
        ),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (k, (label, spec, slot, (lo, hi))) in cases.into_iter().enumerate() {
        let est = perturb::estimate_exponent(&spec, slot, &grid, 400, 111 + k as u64)?;
        let ok = (lo..=hi).contains(&est.kappa_hat);
        passed &= ok;
        parts.push(format!("{label} {:.3} in [{lo}, {hi}]", est.kappa_hat));
    }
    Ok(Outcome {
        passed,
        detail: parts.join("; "),
    })
}

fn haar_statistics() -> Result<Outcome> {
    let (n, corner) = (10, 3);
    let draws = 100_000u64;
    let us: Vec<linalg::ComplexMatrix> = (0..draws)
        .into_par_iter()
        .map(|k| randmat::haar_corner(n, corner, corner, &mut RngStream::new(112, k).rng()))
        .collect();
    let scale = (n * (n + 1)) as f64 / 2.0;
    let root_n = (n as f64).sqrt();
    let half_normal = laws::gaussian_law(c(1.0))?;
    let entries: Vec<(usize, usize)> = (0..corner).flat_map(|i| (0..corner).map(move |j| (i, j))).collect();
    let stats: Vec<(f64, f64)> = entries
        .par_iter()
        .map(|&(i, j)| {
            let moment = us.iter().map(|u| u[(i, j)].norm_sqr().powi(2)).sum::<f64>() / draws as f64 * scale;
            let re: Vec<f64> = us.iter().map(|u| u[(i, j)].re * root_n).collect();
            let im: Vec<f64> = us.iter().map(|u| u[(i, j)].im * root_n).collect();
            let cdf = |x: f64| half_normal.cdf(x).expect("closed form");
            let ks = montecarlo::ks_one_sample(&re, cdf).max(montecarlo::ks_one_sample(&im, cdf));
            (moment, ks)
        })
        .collect();
    let worst_moment = stats.iter().map(|s| (s.0 - 1.0).abs()).fold(0.0, f64::max);
    let worst_ks = stats.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst_moment <= 0.05 && worst_ks < 0.02,
        detail: format!(
            "{} corner entries: worst |E|u|^4 N(N+1)/2 - 1| {worst_moment:.4} (<= 0.05), worst KS vs N(0,1/2) {worst_ks:.4} (< 0.02)",
            entries.len()
        ),
    })
}
