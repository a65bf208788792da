//! Seedable Ginibre and Haar-unitary sampling.
//!
//! Every random object is drawn from an [`RngStream`], a `(master_seed, stream_index)`
//! pair mapped onto an independent ChaCha8 stream. Sample `k` of an experiment always
//! uses stream `k`, so results do not depend on how samples are scheduled.

use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Standard complex Gaussian: real and imaginary parts iid N(0, 1/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `m x n` matrix of iid standard complex Gaussians, drawn column by column so that
/// the first `k` columns of an `m x n` draw equal an `m x k` draw from the same stream.
pub fn ginibre<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> ComplexMatrix {
    let mut g = Mat::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    g
}

/// The first `k` columns of an `n x n` Haar unitary: Householder QR of an `n x k`
/// Ginibre block, with column `j` of `Q` multiplied by `R_jj / |R_jj|` so that the
/// factorization has positive diagonal (the unique, Haar-distributed one).
pub fn haar_columns<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> ComplexMatrix {
    assert!(k <= n && n >= 1, "haar_columns needs 1 <= k <= n");
    let g = ginibre(n, k, rng);
    let qr = g.qr();
    let mut q = qr.compute_thin_Q();
    let r = qr.thin_R();
    for j in 0..k {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag > 0.0 {
            let phase = d / mag;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    haar_columns(n, n, rng)
}

/// Top-left `r x s` corner, copied.
pub fn truncate(u: &ComplexMatrix, r: usize, s: usize) -> Result<ComplexMatrix> {
    if r > u.nrows() || s > u.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "cannot take a {r}x{s} corner of a {}x{} matrix",
            u.nrows(),
            u.ncols()
        )));
    }
    Ok(Mat::from_fn(r, s, |i, j| u[(i, j)]))
}

/// Top `r x s` corner of an `n x n` Haar unitary, drawing only the needed columns.
pub fn haar_corner<R: Rng + ?Sized>(n: usize, r: usize, s: usize, rng: &mut R) -> ComplexMatrix {
    let cols = haar_columns(n, s, rng);
    truncate(&cols, r, s).expect("corner fits inside the drawn columns")
}

/// `|| U* U - I ||_F`
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let g = crate::linalg::adjoint(u) * u;
    let mut s = 0.0;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            s += (g[(i, j)] - Complex64::new(target, 0.0)).norm_sqr();
        }
    }
    s.sqrt()
}
