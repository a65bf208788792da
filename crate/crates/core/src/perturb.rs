//! Limiting eigenvalues, low-order eigenvalue perturbation terms and empirical
//! fluctuation exponents.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::model::{build_reduced, ModelKind, ModelSpec};
use crate::montecarlo::match_to_limits;
use crate::randmat::RngStream;

/// Absolute tolerance for declaring two limits equal.
pub const CLUSTER_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitCluster {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Indices into [`LimitSpectrum::values`].
    pub members: Vec<usize>,
}

/// Limits of the nontrivial eigenvalues in a fixed slot order, with repeated
/// values grouped into clusters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSpectrum {
    pub values: Vec<Complex64>,
    pub clusters: Vec<LimitCluster>,
}

impl LimitSpectrum {
    pub fn from_values(values: Vec<Complex64>) -> Self {
        let mut clusters: Vec<LimitCluster> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            match clusters.iter_mut().find(|c| (c.value - v).norm() <= CLUSTER_TOL) {
                Some(c) => {
                    c.multiplicity += 1;
                    c.members.push(i);
                }
                None => clusters.push(LimitCluster {
                    value: v,
                    multiplicity: 1,
                    members: vec![i],
                }),
            }
        }
        LimitSpectrum { values, clusters }
    }

    pub fn is_simple(&self) -> bool {
        self.clusters.iter().all(|c| c.multiplicity == 1)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn cluster_of(&self, slot: usize) -> &LimitCluster {
        self.clusters
            .iter()
            .find(|c| c.members.contains(&slot))
            .expect("every slot belongs to a cluster")
    }

    /// Slot of the `rank`-th (1-based, decreasing order) eigenvalue near `value`.
    pub fn slot_for(&self, value: Complex64, rank: usize, tol: f64) -> Result<usize> {
        let cluster = self
            .clusters
            .iter()
            .filter(|c| (c.value - value).norm() <= tol)
            .min_by(|a, b| (a.value - value).norm().total_cmp(&(b.value - value).norm()))
            .ok_or_else(|| Error::InvalidArgument(format!("no limiting eigenvalue near {value}")))?;
        if rank == 0 || rank > cluster.multiplicity {
            return Err(Error::InvalidArgument(format!(
                "rank {rank} out of range for limit {} with multiplicity {}",
                cluster.value, cluster.multiplicity
            )));
        }
        Ok(cluster.members[rank - 1])
    }
}

pub fn limiting_eigenvalues(spec: &ModelSpec) -> Result<LimitSpectrum> {
    let values = match spec.kind() {
        ModelKind::Conjugation => {
            let d = spec.poly().expect("validated").decompose();
            spec.alphas()
                .iter()
                .map(|&a| d.p1_at(a))
                .chain(spec.betas().iter().map(|&b| d.q1_at(b)))
                .collect()
        }
        ModelKind::Rotation => spec
            .alphas()
            .iter()
            .copied()
            .chain(spec.alphas().iter().map(|&a| -a))
            .collect(),
        ModelKind::SumConjugation => spec.alphas().iter().chain(spec.betas()).copied().collect(),
        ModelKind::GeneralTwoVar => {
            let (r, s) = spec.corner_shape();
            let red = build_reduced(spec, &linalg::zeros(r, s))?;
            let mut ev = linalg::eigenvalues(&red.m_part)?;
            ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
            ev
        }
    };
    Ok(LimitSpectrum::from_values(values))
}

/// First-order term: the diagonal entry `x_pp` (0-based `p`).
pub fn pi1(x: &ComplexMatrix, p: usize) -> Result<Complex64> {
    if x.nrows() != x.ncols() {
        return Err(Error::DimensionMismatch("pi1 needs a square matrix".into()));
    }
    if p >= x.nrows() {
        return Err(Error::InvalidArgument(format!("index {p} out of range for size {}", x.nrows())));
    }
    Ok(x[(p, p)])
}

/// Second-order term `sum_{i != p} x_ip x_pi / (lambda_p - lambda_i)` (0-based `p`).
pub fn pi2(lambdas: &[Complex64], x: &ComplexMatrix, p: usize) -> Result<Complex64> {
    let n = lambdas.len();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} eigenvalues against a {}x{} perturbation",
            x.nrows(),
            x.ncols()
        )));
    }
    if p >= n {
        return Err(Error::InvalidArgument(format!("index {p} out of range for size {n}")));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..n {
        if i == p {
            continue;
        }
        let gap = lambdas[p] - lambdas[i];
        if gap == Complex64::new(0.0, 0.0) {
            return Err(Error::RepeatedEigenvalue {
                value: lambdas[p].to_string(),
                first: p.min(i),
                second: p.max(i),
            });
        }
        sum += x[(i, p)] * x[(p, i)] / gap;
    }
    Ok(sum)
}

/// Matrix whose column `k` spans the eigenvector of `m` for `values[k]`, with unit
/// norm and its first non-negligible entry real positive.
pub fn diagonalizer(m: &ComplexMatrix, values: &[Complex64]) -> Result<ComplexMatrix> {
    let n = m.nrows();
    let mut r = linalg::zeros(n, n);
    for (k, &mu) in values.iter().enumerate() {
        let shifted = m - &linalg::scale(&linalg::identity(n), mu);
        let mut v = linalg::null_vector(&shifted)?;
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let lead = v
            .iter()
            .copied()
            .find(|z| z.norm() > 1e-10 * norm)
            .ok_or_else(|| Error::Eigensolver("zero eigenvector".into()))?;
        let phase = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z = *z * phase / norm;
        }
        for (i, z) in v.into_iter().enumerate() {
            r[(i, k)] = z;
        }
    }
    Ok(r)
}

/// `mu_i + Pi_1(W) + Pi_2(W)` with `W = R^-1 V R` for the diagonalizer `R` of the
/// main part; valid only when all limits are simple.
pub fn fluctuation_series_approx(spec: &ModelSpec, u_hat: &ComplexMatrix, i: usize) -> Result<Complex64> {
    let limits = limiting_eigenvalues(spec)?;
    if !limits.is_simple() {
        return Err(Error::MultiplicityRegime(
            "limits are not simple; use the laws module for multiplicity regimes".into(),
        ));
    }
    if i >= limits.len() {
        return Err(Error::InvalidArgument(format!("limit index {i} out of range")));
    }
    let red = build_reduced(spec, u_hat)?;
    let r = diagonalizer(&red.m_part, &limits.values)?;
    let w = &(&linalg::inverse(&r)? * &red.v_part) * &r;
    Ok(limits.values[i] + pi1(&w, i)? + pi2(&limits.values, &w, i)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// `-2 x` the least-squares slope of log median deviation against log N.
    pub kappa_hat: f64,
    pub stderr: f64,
    pub n_grid: Vec<usize>,
    pub medians: Vec<f64>,
    /// Deviations stayed at solver noise across the grid (the infinite-exponent case).
    pub exact: bool,
}

/// Median of `|mu_slot^(N) - mu_slot|` at one dimension.
pub fn median_deviation(spec: &ModelSpec, slot: usize, samples: usize, seed: u64, stream_base: u64) -> Result<f64> {
    let limits = limiting_eigenvalues(spec)?;
    if slot >= limits.len() {
        return Err(Error::InvalidArgument(format!("limit index {slot} out of range")));
    }
    let mut devs = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::new(seed, stream_base + k).rng();
            let corner = spec.draw_corner(&mut rng);
            let ev = crate::model::nontrivial_eigenvalues_from_corner(spec, &corner)?;
            let matched = match_to_limits(&ev, &limits)?;
            Ok((matched[slot] - limits.values[slot]).norm())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(crate::montecarlo::median(&mut devs))
}

pub fn estimate_exponent(
    spec: &ModelSpec,
    slot: usize,
    n_grid: &[usize],
    samples_per_n: usize,
    seed: u64,
) -> Result<ExponentEstimate> {
    if n_grid.len() < 3 {
        return Err(Error::InvalidArgument("exponent estimation needs at least 3 grid sizes".into()));
    }
    let lo = *n_grid.iter().min().expect("nonempty");
    let hi = *n_grid.iter().max().expect("nonempty");
    if (hi as f64) < 4.0 * lo as f64 {
        return Err(Error::InvalidArgument(format!(
            "grid {n_grid:?} spans less than a factor of 4"
        )));
    }
    if samples_per_n == 0 {
        return Err(Error::InvalidArgument("samples_per_n must be positive".into()));
    }
    let mut medians = Vec::with_capacity(n_grid.len());
    for (g, &n) in n_grid.iter().enumerate() {
        let at_n = spec.with_n(n)?;
        medians.push(median_deviation(&at_n, slot, samples_per_n, seed, (g as u64) << 32)?);
    }
    if medians.iter().all(|&m| m < 1e-12) {
        return Ok(ExponentEstimate {
            kappa_hat: f64::INFINITY,
            stderr: 0.0,
            n_grid: n_grid.to_vec(),
            medians,
            exact: true,
        });
    }
    let xs: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|&m| m.max(f64::MIN_POSITIVE).ln()).collect();
    let (slope, slope_se) = least_squares_slope(&xs, &ys);
    Ok(ExponentEstimate {
        kappa_hat: -2.0 * slope,
        stderr: 2.0 * slope_se,
        n_grid: n_grid.to_vec(),
        medians,
        exact: false,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let se = if xs.len() > 2 {
        (resid / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, se)
}
