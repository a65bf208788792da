//! Random-matrix models built from a Haar unitary `U` and diagonal finite-rank
//! `A = diag(alphas, 0, ...)`, `B = diag(betas, 0, ...)`.
//!
//! In the basis `(e_1..e_r, u_1..u_s, e_{r+1}, ...)`, where `u_j` are columns of `U`,
//! each model becomes block upper triangular with a zero last block row. Its nonzero
//! spectrum is therefore the spectrum of the leading `(r+s)` (or `2r`) corner, which
//! depends on `U` only through the corner `Û`. [`build_reduced`] assembles that corner
//! exactly at finite `N`; [`build_full`] forms the literal `N x N` matrix for
//! cross-checks.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, adjoint, padded_diag, set_block, ComplexMatrix};
use crate::ncpoly::NCPolynomial;
use crate::randmat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `P(AU*, UB)`
    GeneralTwoVar,
    /// `P(A, UBU*)`
    Conjugation,
    /// `A + UBU*`
    SumConjugation,
    /// `UA + AU*`
    Rotation,
}

impl ModelKind {
    pub fn needs_polynomial(self) -> bool {
        matches!(self, ModelKind::GeneralTwoVar | ModelKind::Conjugation)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    kind: ModelKind,
    poly: Option<NCPolynomial>,
    alphas: Vec<Complex64>,
    betas: Vec<Complex64>,
    n: usize,
}

impl ModelSpec {
    pub fn new(
        kind: ModelKind,
        poly: Option<NCPolynomial>,
        alphas: Vec<Complex64>,
        betas: Vec<Complex64>,
        n: usize,
    ) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidSpec(m));
        if kind.needs_polynomial() && poly.is_none() {
            return invalid(format!("{kind:?} needs a polynomial"));
        }
        if !kind.needs_polynomial() && poly.is_some() {
            return invalid(format!("{kind:?} takes no polynomial"));
        }
        if alphas.is_empty() {
            return invalid("alphas must be nonempty".into());
        }
        match kind {
            ModelKind::Rotation if !betas.is_empty() => {
                return invalid("Rotation takes no betas".into());
            }
            ModelKind::Rotation => {}
            _ if betas.is_empty() => return invalid("betas must be nonempty".into()),
            _ => {}
        }
        if alphas.iter().chain(&betas).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("alphas and betas must be finite".into());
        }
        if matches!(kind, ModelKind::Conjugation | ModelKind::SumConjugation)
            && alphas.iter().chain(&betas).any(|z| *z == Complex64::new(0.0, 0.0))
        {
            return invalid("alphas and betas must be nonzero for this model".into());
        }
        let width = alphas.len().max(betas.len());
        if n < 2 * width + 2 {
            return invalid(format!("N = {n} is too small; need N >= {}", 2 * width + 2));
        }
        Ok(ModelSpec {
            kind,
            poly,
            alphas,
            betas,
            n,
        })
    }

    pub fn rotation(alphas: Vec<Complex64>, n: usize) -> Result<Self> {
        Self::new(ModelKind::Rotation, None, alphas, Vec::new(), n)
    }

    pub fn sum_conjugation(alphas: Vec<Complex64>, betas: Vec<Complex64>, n: usize) -> Result<Self> {
        Self::new(ModelKind::SumConjugation, None, alphas, betas, n)
    }

    pub fn conjugation(poly: NCPolynomial, alphas: Vec<Complex64>, betas: Vec<Complex64>, n: usize) -> Result<Self> {
        Self::new(ModelKind::Conjugation, Some(poly), alphas, betas, n)
    }

    pub fn general(poly: NCPolynomial, alphas: Vec<Complex64>, betas: Vec<Complex64>, n: usize) -> Result<Self> {
        Self::new(ModelKind::GeneralTwoVar, Some(poly), alphas, betas, n)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn poly(&self) -> Option<&NCPolynomial> {
        self.poly.as_ref()
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alphas
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Same model at another dimension.
    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.kind, self.poly.clone(), self.alphas.clone(), self.betas.clone(), n)
    }

    /// Same model with `alphas` and `betas` multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let f = |v: &[Complex64]| v.iter().map(|z| z * factor).collect();
        Self::new(self.kind, self.poly.clone(), f(&self.alphas), f(&self.betas), self.n)
    }

    /// Block width used by the two-variable and rotation models; shorter diagonals are
    /// padded with zeros up to it.
    fn width(&self) -> usize {
        self.alphas.len().max(self.betas.len())
    }

    /// Shape `(rows, cols)` of the corner `Û` the reduced matrix depends on.
    pub fn corner_shape(&self) -> (usize, usize) {
        match self.kind {
            ModelKind::Rotation => (self.alphas.len(), self.alphas.len()),
            ModelKind::GeneralTwoVar => (self.width(), self.width()),
            ModelKind::Conjugation | ModelKind::SumConjugation => (self.alphas.len(), self.betas.len()),
        }
    }

    /// Number of nontrivial eigenvalues.
    pub fn reduced_dim(&self) -> usize {
        match self.kind {
            ModelKind::Rotation => 2 * self.alphas.len(),
            ModelKind::GeneralTwoVar => 2 * self.width(),
            ModelKind::Conjugation | ModelKind::SumConjugation => self.alphas.len() + self.betas.len(),
        }
    }

    pub fn trivial_count(&self) -> usize {
        self.n - self.reduced_dim()
    }

    /// Draws the corner `Û` of a fresh `N x N` Haar unitary.
    pub fn draw_corner<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let (r, s) = self.corner_shape();
        randmat::haar_corner(self.n, r, s, rng)
    }

    fn padded_alphas(&self) -> Vec<Complex64> {
        let mut a = self.alphas.clone();
        a.resize(self.width(), Complex64::new(0.0, 0.0));
        a
    }

    fn padded_betas(&self) -> Vec<Complex64> {
        let mut b = self.betas.clone();
        b.resize(self.width(), Complex64::new(0.0, 0.0));
        b
    }
}

/// Reduced representation `m_part + v_part`, with `m_part` free of `Û`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedMatrix {
    pub m_part: ComplexMatrix,
    pub v_part: ComplexMatrix,
}

impl ReducedMatrix {
    pub fn dim(&self) -> usize {
        self.m_part.nrows()
    }

    pub fn total(&self) -> ComplexMatrix {
        &self.m_part + &self.v_part
    }
}

/// The literal `N x N` model matrix.
pub fn build_full(spec: &ModelSpec, u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = spec.n;
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "model has N = {n} but U is {}x{}",
            u.nrows(),
            u.ncols()
        )));
    }
    let u_star = adjoint(u);
    let out = match spec.kind {
        ModelKind::Rotation => {
            let a = padded_diag(&spec.alphas, n);
            &(u * &a) + &(&a * &u_star)
        }
        ModelKind::SumConjugation => {
            let a = padded_diag(&spec.alphas, n);
            let b = padded_diag(&spec.betas, n);
            &a + &(&(u * &b) * &u_star)
        }
        ModelKind::Conjugation => {
            let a = padded_diag(&spec.alphas, n);
            let b = padded_diag(&spec.betas, n);
            let ubu = &(u * &b) * &u_star;
            spec.poly.as_ref().expect("validated").eval_matrix(&a, &ubu)?
        }
        ModelKind::GeneralTwoVar => {
            let a = padded_diag(&spec.alphas, n);
            let b = padded_diag(&spec.betas, n);
            let au = &a * &u_star;
            let ub = u * &b;
            spec.poly.as_ref().expect("validated").eval_matrix(&au, &ub)?
        }
    };
    Ok(out)
}

fn reduced_total(spec: &ModelSpec, u_hat: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (rows, cols) = spec.corner_shape();
    if u_hat.nrows() != rows || u_hat.ncols() != cols {
        return Err(Error::DimensionMismatch(format!(
            "{:?} needs a {rows}x{cols} corner, got {}x{}",
            spec.kind,
            u_hat.nrows(),
            u_hat.ncols()
        )));
    }
    let u_star = adjoint(u_hat);
    let out = match spec.kind {
        ModelKind::Rotation => {
            let r = rows;
            let a = padded_diag(&spec.alphas, r);
            let mut t = linalg::zeros(2 * r, 2 * r);
            set_block(&mut t, 0, 0, &(&a * &u_star));
            set_block(&mut t, 0, r, &a);
            set_block(&mut t, r, 0, &a);
            set_block(&mut t, r, r, &(&a * u_hat));
            t
        }
        ModelKind::SumConjugation | ModelKind::Conjugation => {
            let (r, s) = (rows, cols);
            let a = padded_diag(&spec.alphas, r);
            let b = padded_diag(&spec.betas, s);
            let mut at = linalg::zeros(r + s, r + s);
            set_block(&mut at, 0, 0, &a);
            set_block(&mut at, 0, r, &(&a * u_hat));
            let mut bt = linalg::zeros(r + s, r + s);
            set_block(&mut bt, r, 0, &(&b * &u_star));
            set_block(&mut bt, r, r, &b);
            match spec.kind {
                ModelKind::SumConjugation => &at + &bt,
                _ => spec.poly.as_ref().expect("validated").eval_matrix(&at, &bt)?,
            }
        }
        ModelKind::GeneralTwoVar => {
            let d = rows;
            let a = padded_diag(&spec.padded_alphas(), d);
            let b = padded_diag(&spec.padded_betas(), d);
            let mut ap = linalg::zeros(2 * d, 2 * d);
            set_block(&mut ap, 0, 0, &(&a * &u_star));
            set_block(&mut ap, 0, d, &a);
            let mut bp = linalg::zeros(2 * d, 2 * d);
            set_block(&mut bp, d, 0, &b);
            set_block(&mut bp, d, d, &(&b * u_hat));
            spec.poly.as_ref().expect("validated").eval_matrix(&ap, &bp)?
        }
    };
    Ok(out)
}

/// Exact reduced matrix for the corner `u_hat` (shape [`ModelSpec::corner_shape`]).
pub fn build_reduced(spec: &ModelSpec, u_hat: &ComplexMatrix) -> Result<ReducedMatrix> {
    let total = reduced_total(spec, u_hat)?;
    let (rows, cols) = spec.corner_shape();
    let m_part = reduced_total(spec, &linalg::zeros(rows, cols))?;
    let v_part = &total - &m_part;
    Ok(ReducedMatrix { m_part, v_part })
}

/// Eigenvalues of the reduced matrix for a given corner.
pub fn nontrivial_eigenvalues_from_corner(spec: &ModelSpec, u_hat: &ComplexMatrix) -> Result<Vec<Complex64>> {
    linalg::eigenvalues(&reduced_total(spec, u_hat)?)
}

/// Nontrivial eigenvalues for a unitary `u` (at least as many columns as the corner).
pub fn nontrivial_eigenvalues(spec: &ModelSpec, u: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let (r, s) = spec.corner_shape();
    let corner = randmat::truncate(u, r, s)?;
    nontrivial_eigenvalues_from_corner(spec, &corner)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub passed: bool,
    /// Largest distance in the optimal matching of full vs expected spectrum.
    pub max_distance: f64,
    /// Full-spectrum eigenvalues with modulus below the tolerance.
    pub near_zero: usize,
    pub expected_trivial: usize,
}

/// Compares the full `N x N` spectrum against reduced eigenvalues plus
/// `N - reduced_dim` zeros under optimal matching.
pub fn spectrum_consistency_check(spec: &ModelSpec, u: &ComplexMatrix, tol: f64) -> Result<ConsistencyReport> {
    let full = linalg::eigenvalues(&build_full(spec, u)?)?;
    let mut expected = nontrivial_eigenvalues(spec, u)?;
    expected.resize(spec.n, Complex64::new(0.0, 0.0));
    let (_, max_distance) = linalg::match_points(&full, &expected)?;
    Ok(ConsistencyReport {
        passed: max_distance <= tol,
        max_distance,
        near_zero: full.iter().filter(|z| z.norm() < tol).count(),
        expected_trivial: spec.trivial_count(),
    })
}
