//! Limiting fluctuation laws: closed-form densities and CDFs where they exist, and an
//! oracle sampler for every law.

use std::collections::BTreeSet;
use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::model::{ModelKind, ModelSpec};
use crate::ncpoly::{Bucket, NCPolynomial};
use crate::perturb::{limiting_eigenvalues, LimitSpectrum};
use crate::randmat::ginibre;

/// Relative gap below which two mixture coefficients count as coincident.
pub const NEAR_COINCIDENT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharedComponent {
    /// Fluctuation of the simple eigenvalue near `beta2`, scale `N`.
    Zeta,
    /// Top of the triple cluster, scale `sqrt(N)`.
    Xi1,
    /// Middle of the triple cluster, scale `N`.
    Xi3,
    /// Bottom of the triple cluster, scale `sqrt(N)`.
    Xi2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairComponent {
    Top,
    Bottom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum FluctuationLaw {
    /// `c * x` with `x` standard normal.
    GaussianScaled { c: Complex64 },
    /// `sum_j c_j E_j` with `E_j` iid standard exponential.
    ExpMixture { coeffs: Vec<f64> },
    /// `rank`-th largest eigenvalue of `Z Gamma Z*`, `Z` an `m x len(gamma)` Ginibre matrix.
    MatrixSpectral { gamma: Vec<f64>, m: usize, rank: usize },
    SharedEigen { alpha1: f64, beta2: f64, component: SharedComponent },
    EqualPairs { alpha: f64, component: PairComponent },
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// CDF of `c * G` with `G ~ Gamma(2, 1)`.
fn gamma2_cdf(c: f64, x: f64) -> f64 {
    let upper = |t: f64| if t <= 0.0 { 1.0 } else { (-t).exp() * (1.0 + t) };
    if c > 0.0 {
        1.0 - upper(x / c)
    } else {
        upper(x / c)
    }
}

fn gamma2_density(c: f64, x: f64) -> f64 {
    let t = x / c;
    if t < 0.0 {
        0.0
    } else {
        t * (-t).exp() / c.abs()
    }
}

/// CDF of `a * sqrt(G)`, `G ~ Gamma(shape)`, shape 1 or 2, `a > 0`.
fn root_gamma_cdf(shape: u32, a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let t = (x / a).powi(2);
    match shape {
        1 => 1.0 - (-t).exp(),
        _ => 1.0 - (-t).exp() * (1.0 + t),
    }
}

fn root_gamma_density(shape: u32, a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let t = (x / a).powi(2);
    match shape {
        1 => 2.0 * x / (a * a) * (-t).exp(),
        _ => 2.0 * x.powi(3) / a.powi(4) * (-t).exp(),
    }
}

impl FluctuationLaw {
    /// Exponent `kappa` such that `N^(kappa/2)` times the deviation has this law.
    pub fn kappa(&self) -> f64 {
        match self {
            FluctuationLaw::GaussianScaled { .. } | FluctuationLaw::EqualPairs { .. } => 1.0,
            FluctuationLaw::ExpMixture { .. } | FluctuationLaw::MatrixSpectral { .. } => 2.0,
            FluctuationLaw::SharedEigen { component, .. } => match component {
                SharedComponent::Zeta | SharedComponent::Xi3 => 2.0,
                SharedComponent::Xi1 | SharedComponent::Xi2 => 1.0,
            },
        }
    }

    pub fn scaling_label(&self) -> &'static str {
        if self.kappa() == 2.0 {
            "N"
        } else {
            "sqrt(N)"
        }
    }

    /// Law of `self / d`.
    pub fn divided_by(&self, d: Complex64) -> Result<FluctuationLaw> {
        match self {
            FluctuationLaw::GaussianScaled { c } => Ok(FluctuationLaw::GaussianScaled { c: c / d }),
            FluctuationLaw::ExpMixture { coeffs } if d.im == 0.0 && d.re != 0.0 => Ok(FluctuationLaw::ExpMixture {
                coeffs: coeffs.iter().map(|c| c / d.re).collect(),
            }),
            _ if d == Complex64::new(1.0, 0.0) => Ok(self.clone()),
            _ => Err(Error::Unsupported(format!("rescaling this law by {d}"))),
        }
    }

    /// Real part of a draw. Only Gaussian laws with complex coefficient have an
    /// imaginary part.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_complex(rng).re
    }

    pub fn sample_complex<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let real = |v: f64| Complex64::new(v, 0.0);
        match self {
            FluctuationLaw::GaussianScaled { c } => {
                let x: f64 = StandardNormal.sample(rng);
                c * x
            }
            FluctuationLaw::ExpMixture { coeffs } => real(sample_expmixture(coeffs, rng)),
            FluctuationLaw::MatrixSpectral { gamma, m, rank } => real(sample_matrix_spectral(gamma, *m, rng)[rank - 1]),
            FluctuationLaw::SharedEigen {
                alpha1,
                beta2,
                component,
            } => {
                let v = sample_shared_eigen(*alpha1, *beta2, rng);
                real(match component {
                    SharedComponent::Zeta => v[0],
                    SharedComponent::Xi1 => v[1],
                    SharedComponent::Xi3 => v[2],
                    SharedComponent::Xi2 => v[3],
                })
            }
            FluctuationLaw::EqualPairs { alpha, component } => {
                let z = crate::randmat::complex_gaussian(rng);
                let v = (alpha * z).norm();
                real(match component {
                    PairComponent::Top => v,
                    PairComponent::Bottom => -v,
                })
            }
        }
    }

    /// CDF of the real part, when a closed form is known.
    pub fn cdf(&self, x: f64) -> Option<f64> {
        match self {
            FluctuationLaw::GaussianScaled { c } => {
                let sd = c.re.abs();
                if sd == 0.0 {
                    return Some(if x >= 0.0 { 1.0 } else { 0.0 });
                }
                Some(std_normal_cdf(x / sd))
            }
            FluctuationLaw::ExpMixture { coeffs } => expmixture_cdf(coeffs, x).ok(),
            FluctuationLaw::MatrixSpectral { .. } => None,
            FluctuationLaw::SharedEigen {
                alpha1,
                beta2,
                component,
            } => match component {
                SharedComponent::Zeta => Some(gamma2_cdf(alpha1 * beta2 / (beta2 - alpha1), x)),
                SharedComponent::Xi1 => Some(root_gamma_cdf(2, alpha1.abs(), x)),
                SharedComponent::Xi2 => Some(1.0 - root_gamma_cdf(2, alpha1.abs(), -x)),
                SharedComponent::Xi3 => None,
            },
            FluctuationLaw::EqualPairs { alpha, component } => Some(match component {
                PairComponent::Top => root_gamma_cdf(1, alpha.abs(), x),
                PairComponent::Bottom => 1.0 - root_gamma_cdf(1, alpha.abs(), -x),
            }),
        }
    }

    /// Density of the real part, when a closed form is known.
    pub fn density(&self, x: f64) -> Option<f64> {
        match self {
            FluctuationLaw::GaussianScaled { c } => {
                let sd = c.re.abs();
                (sd > 0.0).then(|| (-(x / sd).powi(2) / 2.0).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt()))
            }
            FluctuationLaw::ExpMixture { coeffs } => expmixture_density(coeffs, x).ok(),
            FluctuationLaw::MatrixSpectral { .. } => None,
            FluctuationLaw::SharedEigen {
                alpha1,
                beta2,
                component,
            } => match component {
                SharedComponent::Zeta => Some(gamma2_density(alpha1 * beta2 / (beta2 - alpha1), x)),
                SharedComponent::Xi1 => Some(root_gamma_density(2, alpha1.abs(), x)),
                SharedComponent::Xi2 => Some(root_gamma_density(2, alpha1.abs(), -x)),
                SharedComponent::Xi3 => None,
            },
            FluctuationLaw::EqualPairs { alpha, component } => Some(match component {
                PairComponent::Top => root_gamma_density(1, alpha.abs(), x),
                PairComponent::Bottom => root_gamma_density(1, alpha.abs(), -x),
            }),
        }
    }
}

pub fn gaussian_law(alpha: Complex64) -> Result<FluctuationLaw> {
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("Gaussian law needs a nonzero eigenvalue".into()));
    }
    Ok(FluctuationLaw::GaussianScaled {
        c: alpha * std::f64::consts::FRAC_1_SQRT_2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Eigenvalue near `P1(alpha_i)`.
    A(usize),
    /// Eigenvalue near `Q1(beta_j)`.
    B(usize),
}

/// Coefficients of `|sqrt(N) u_ij|^2` in the `1/N` term of the eigenvalue expansion of
/// `P(A, UBU*)`: over `j` for an A-side index, over `i` for a B-side one.
pub fn mixture_coefficients(
    p: &NCPolynomial,
    alphas: &[Complex64],
    betas: &[Complex64],
    side: Side,
) -> Result<Vec<Complex64>> {
    let d = p.decompose();
    let p1: Vec<Complex64> = alphas.iter().map(|&a| d.p1_at(a)).collect();
    let q1: Vec<Complex64> = betas.iter().map(|&b| d.q1_at(b)).collect();
    let all: Vec<Complex64> = p1.iter().chain(&q1).copied().collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all[i] == all[j] {
                return Err(Error::MultiplicityRegime(format!(
                    "limits {} and {} coincide; use a multiplicity law",
                    all[i], all[j]
                )));
            }
        }
    }
    let cross = |i: usize, j: usize| {
        let (a, b) = (alphas[i], betas[j]);
        (p1[i] + d.eval_component(Bucket::P2, a, b)) * (q1[j] + d.eval_component(Bucket::Q2, a, b)) / (p1[i] - q1[j])
    };
    match side {
        Side::A(i) if i < alphas.len() => Ok((0..betas.len())
            .map(|j| {
                let (a, b) = (alphas[i], betas[j]);
                d.eval_component(Bucket::P2, a, b) + d.eval_component(Bucket::P3, a, b) + cross(i, j)
            })
            .collect()),
        Side::B(j) if j < betas.len() => Ok((0..alphas.len())
            .map(|i| {
                let (a, b) = (alphas[i], betas[j]);
                d.eval_component(Bucket::Q2, a, b) + d.eval_component(Bucket::Q3, a, b) - cross(i, j)
            })
            .collect()),
        _ => Err(Error::InvalidArgument(format!("{side:?} out of range"))),
    }
}

/// Drops zero coefficients and requires real, pairwise distinct ones.
pub fn expmixture_law(coeffs: &[Complex64]) -> Result<FluctuationLaw> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut real = Vec::new();
    for c in coeffs {
        if c.norm() <= 1e-14 * scale.max(1.0) {
            continue;
        }
        if c.im.abs() > 1e-12 * c.norm() {
            return Err(Error::Unsupported(format!("complex mixture coefficient {c}")));
        }
        real.push(c.re);
    }
    check_coefficients(&real)?;
    Ok(FluctuationLaw::ExpMixture { coeffs: real })
}

fn check_coefficients(coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("mixture needs at least one coefficient".into()));
    }
    if coeffs.iter().any(|c| *c == 0.0 || !c.is_finite()) {
        return Err(Error::InvalidArgument("mixture coefficients must be finite and nonzero".into()));
    }
    let scale = coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max);
    for i in 0..coeffs.len() {
        for j in i + 1..coeffs.len() {
            if (coeffs[i] - coeffs[j]).abs() < NEAR_COINCIDENT * scale {
                return Err(Error::NearCoincident(coeffs.to_vec()));
            }
        }
    }
    Ok(())
}

/// Partial-fraction weights `A_j = prod_{k != j} c_j / (c_j - c_k)`.
fn partial_fraction_weights(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(j, &cj)| {
            coeffs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &ck)| cj / (cj - ck))
                .product()
        })
        .collect()
}

pub fn expmixture_density(coeffs: &[f64], x: f64) -> Result<f64> {
    check_coefficients(coeffs)?;
    let w = partial_fraction_weights(coeffs);
    Ok(coeffs
        .iter()
        .zip(&w)
        .filter(|(&c, _)| x * c.signum() >= 0.0)
        .map(|(&c, &a)| a / c.abs() * (-x / c).exp())
        .sum())
}

pub fn expmixture_cdf(coeffs: &[f64], x: f64) -> Result<f64> {
    check_coefficients(coeffs)?;
    if x >= 0.0 && coeffs.iter().all(|&c| c < 0.0) {
        return Ok(1.0);
    }
    if x < 0.0 && coeffs.iter().all(|&c| c > 0.0) {
        return Ok(0.0);
    }
    let w = partial_fraction_weights(coeffs);
    let mut f = 0.0;
    for (&c, &a) in coeffs.iter().zip(&w) {
        f += match (c > 0.0, x >= 0.0) {
            (true, true) => a * -(-x / c).exp_m1(),
            (true, false) => 0.0,
            (false, true) => a,
            (false, false) => a * (-x / c).exp(),
        };
    }
    Ok(f.clamp(0.0, 1.0))
}

pub fn sample_expmixture<R: Rng + ?Sized>(coeffs: &[f64], rng: &mut R) -> f64 {
    coeffs
        .iter()
        .map(|c| {
            let e: f64 = Exp1.sample(rng);
            c * e
        })
        .sum()
}

/// `diag(a' b_j / (a' - b_j))`. Called with the roles swapped, `(b', alphas)`, it gives
/// the B-side matrix `diag(a_i b' / (b' - a_i))`.
pub fn gamma_matrix(alpha_prime: f64, betas: &[f64]) -> Result<Vec<f64>> {
    betas
        .iter()
        .map(|&b| {
            if b == alpha_prime {
                Err(Error::MultiplicityRegime(format!(
                    "{alpha_prime} is shared by both diagonals; use the shared-eigenvalue law"
                )))
            } else {
                Ok(alpha_prime * b / (alpha_prime - b))
            }
        })
        .collect()
}

pub fn eta_matrix(alphas: &[f64], beta_prime: f64) -> Result<Vec<f64>> {
    gamma_matrix(beta_prime, alphas)
}

fn real_diag(values: &[f64]) -> ComplexMatrix {
    let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    linalg::padded_diag(&v, v.len())
}

/// Eigenvalues of `Z Gamma Z*` in decreasing order, for a given `m x s` matrix `Z`.
pub fn spectral_eigenvalues(z: &ComplexMatrix, gamma: &[f64]) -> Result<Vec<f64>> {
    if z.ncols() != gamma.len() {
        return Err(Error::DimensionMismatch(format!(
            "Z has {} columns, Gamma has {} entries",
            z.ncols(),
            gamma.len()
        )));
    }
    let h = &(z * &real_diag(gamma)) * &linalg::adjoint(z);
    linalg::hermitian_eigenvalues_desc(&h)
}

pub fn sample_matrix_spectral<R: Rng + ?Sized>(gamma: &[f64], m: usize, rng: &mut R) -> Vec<f64> {
    let z = ginibre(m, gamma.len(), rng);
    spectral_eigenvalues(&z, gamma).expect("shapes agree by construction")
}

/// One joint draw of `(zeta, xi1, xi3, xi2)` from a single 2x2 Ginibre matrix.
pub fn sample_shared_eigen<R: Rng + ?Sized>(alpha1: f64, beta2: f64, rng: &mut R) -> [f64; 4] {
    let z = ginibre(2, 2, rng);
    let col1 = z[(0, 0)].norm_sqr() + z[(1, 0)].norm_sqr();
    let col2 = z[(0, 1)].norm_sqr() + z[(1, 1)].norm_sqr();
    let det = (z[(0, 0)] * z[(1, 1)] - z[(0, 1)] * z[(1, 0)]).norm_sqr();
    let c = alpha1 * beta2 / (beta2 - alpha1);
    let xi1 = alpha1.abs() * col1.sqrt();
    [c * col2, xi1, -c * det / col1, -xi1]
}

/// One draw of `(|a2 z22|, -|a2 z22|, |a1 z11|, -|a1 z11|)`.
pub fn sample_equal_pairs<R: Rng + ?Sized>(alpha1: f64, alpha2: f64, rng: &mut R) -> [f64; 4] {
    let z11 = crate::randmat::complex_gaussian(rng);
    let z22 = crate::randmat::complex_gaussian(rng);
    let top2 = (alpha2 * z22).norm();
    let top1 = (alpha1 * z11).norm();
    [top2, -top2, top1, -top1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect()
}

/// Characteristic polynomial of the reduced `A + UBU*` matrix at `lambda`, expanded
/// over the minors of `Û`.
pub fn charpoly_minors(alphas: &[Complex64], betas: &[Complex64], u_hat: &ComplexMatrix, lambda: Complex64) -> Result<Complex64> {
    let (r, s) = (alphas.len(), betas.len());
    if u_hat.nrows() != r || u_hat.ncols() != s {
        return Err(Error::DimensionMismatch(format!(
            "corner is {}x{}, expected {r}x{s}",
            u_hat.nrows(),
            u_hat.ncols()
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for n in 0..=r.min(s) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for rows in subsets(r, n) {
            let row_set: BTreeSet<usize> = rows.iter().copied().collect();
            let mut a_part = Complex64::new(1.0, 0.0);
            for (i, &a) in alphas.iter().enumerate() {
                a_part *= if row_set.contains(&i) { a } else { lambda - a };
            }
            for cols in subsets(s, n) {
                let col_set: BTreeSet<usize> = cols.iter().copied().collect();
                let mut b_part = Complex64::new(1.0, 0.0);
                for (j, &b) in betas.iter().enumerate() {
                    b_part *= if col_set.contains(&j) { b } else { lambda - b };
                }
                let minor = linalg::determinant(&linalg::submatrix(u_hat, &rows, &cols)).norm_sqr();
                total += a_part * b_part * minor * sign;
            }
        }
    }
    Ok(total)
}

/// Coefficients of `psi(tau) = sum_n (-1)^n tau^(m-n) sum_{|I|=|J|=n} prod_J gamma_j |[Z]_{I,J}|^2`,
/// listed from `tau^m` down to `tau^0`.
pub fn psi_coefficients(z: &ComplexMatrix, gamma: &[f64]) -> Result<Vec<f64>> {
    let (m, s) = (z.nrows(), z.ncols());
    if gamma.len() != s {
        return Err(Error::DimensionMismatch(format!("Z has {s} columns, Gamma has {}", gamma.len())));
    }
    let mut coeffs = vec![0.0; m + 1];
    coeffs[0] = 1.0;
    for (n, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for rows in subsets(m, n) {
            for cols in subsets(s, n) {
                let g: f64 = cols.iter().map(|&j| gamma[j]).product();
                *slot += sign * g * linalg::determinant(&linalg::submatrix(z, &rows, &cols)).norm_sqr();
            }
        }
    }
    Ok(coeffs)
}

/// Coefficients of `prod (tau - e_k)` from `tau^m` down to `tau^0`.
pub fn monic_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &e in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &ck) in c.iter().enumerate() {
            next[k] += ck;
            next[k + 1] -= e * ck;
        }
        c = next;
    }
    c
}

/// Writes `x,density,cdf` rows on an even grid. Columns without a closed form are empty.
pub fn write_density_csv<W: Write>(law: &FluctuationLaw, lo: f64, hi: f64, points: usize, out: &mut W) -> Result<()> {
    writeln!(out, "x,density,cdf")?;
    let fmt = |v: Option<f64>| v.map(|v| format!("{v:.12e}")).unwrap_or_default();
    for k in 0..points {
        let x = if points == 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (points - 1) as f64
        };
        writeln!(out, "{x:.12e},{},{}", fmt(law.density(x)), fmt(law.cdf(x)))?;
    }
    Ok(())
}

fn real_values(v: &[Complex64], what: &str) -> Result<Vec<f64>> {
    v.iter()
        .map(|z| {
            if z.im == 0.0 {
                Ok(z.re)
            } else {
                Err(Error::Unsupported(format!("multiplicity laws need real {what}")))
            }
        })
        .collect()
}

/// Rank (1-based) of `slot` inside its cluster.
fn rank_in_cluster(limits: &LimitSpectrum, slot: usize) -> (usize, usize) {
    let cluster = limits.cluster_of(slot);
    let rank = cluster.members.iter().position(|&m| m == slot).expect("member") + 1;
    (rank, cluster.multiplicity)
}

/// Limiting law of the eigenvalue in limit slot `slot` (see [`LimitSpectrum`]).
pub fn derive_law(spec: &ModelSpec, slot: usize) -> Result<FluctuationLaw> {
    let limits = limiting_eigenvalues(spec)?;
    if slot >= limits.len() {
        return Err(Error::InvalidArgument(format!(
            "limit index {slot} out of range for {} limits",
            limits.len()
        )));
    }
    let r = spec.alphas().len();
    match spec.kind() {
        ModelKind::Rotation => {
            if !limits.is_simple() {
                return Err(Error::Unsupported("rotation model with repeated limits".into()));
            }
            gaussian_law(spec.alphas()[slot % r])
        }
        ModelKind::Conjugation => {
            let side = if slot < r { Side::A(slot) } else { Side::B(slot - r) };
            let coeffs = mixture_coefficients(spec.poly().expect("validated"), spec.alphas(), spec.betas(), side)?;
            expmixture_law(&coeffs)
        }
        ModelKind::SumConjugation => sum_conjugation_law(spec, &limits, slot),
        ModelKind::GeneralTwoVar => Err(Error::Unsupported(
            "no closed-form law for P(AU*, UB); simulate with an explicit kappa".into(),
        )),
    }
}

fn sum_conjugation_law(spec: &ModelSpec, limits: &LimitSpectrum, slot: usize) -> Result<FluctuationLaw> {
    let x_plus_y = NCPolynomial::parse("x + y").expect("literal");
    if limits.is_simple() {
        let r = spec.alphas().len();
        let side = if slot < r { Side::A(slot) } else { Side::B(slot - r) };
        return expmixture_law(&mixture_coefficients(&x_plus_y, spec.alphas(), spec.betas(), side)?);
    }
    let alphas = real_values(spec.alphas(), "alphas")?;
    let betas = real_values(spec.betas(), "betas")?;
    let value = limits.values[slot].re;
    let (rank, mult) = rank_in_cluster(limits, slot);
    let in_a = alphas.iter().filter(|&&a| a == value).count();
    let in_b = betas.iter().filter(|&&b| b == value).count();

    if alphas.iter().all(|a| !betas.contains(a)) {
        return if in_a > 0 {
            Ok(FluctuationLaw::MatrixSpectral {
                gamma: gamma_matrix(value, &betas)?,
                m: mult,
                rank,
            })
        } else {
            Ok(FluctuationLaw::MatrixSpectral {
                gamma: eta_matrix(&alphas, value)?,
                m: mult,
                rank,
            })
        };
    }

    // alpha1 = alpha2 = beta_k != beta_other
    if alphas.len() == 2 && betas.len() == 2 && alphas[0] == alphas[1] {
        let a1 = alphas[0];
        if let Some(other) = match (betas[0] == a1, betas[1] == a1) {
            (true, false) => Some(betas[1]),
            (false, true) => Some(betas[0]),
            _ => None,
        } {
            let component = if in_a == 0 {
                SharedComponent::Zeta
            } else {
                [SharedComponent::Xi1, SharedComponent::Xi3, SharedComponent::Xi2][rank - 1]
            };
            return Ok(FluctuationLaw::SharedEigen {
                alpha1: a1,
                beta2: other,
                component,
            });
        }
    }

    let mut sa = alphas.clone();
    let mut sb = betas.clone();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let distinct = sa.windows(2).all(|w| w[0] != w[1]);
    if sa == sb && distinct && in_a == 1 && in_b == 1 {
        return Ok(FluctuationLaw::EqualPairs {
            alpha: value,
            component: if rank == 1 { PairComponent::Top } else { PairComponent::Bottom },
        });
    }

    Err(Error::Unsupported(format!(
        "no law for this coincidence pattern of alphas {alphas:?} and betas {betas:?}"
    )))
}
