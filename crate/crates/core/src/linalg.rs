//! Thin helpers over `faer` plus an optimal-assignment solver.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = Mat<Complex64>;

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> ComplexMatrix {
    Mat::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

/// `n x n` diagonal matrix with `values` leading and zeros after.
pub fn padded_diag(values: &[Complex64], n: usize) -> ComplexMatrix {
    Mat::from_fn(n, n, |i, j| {
        if i == j && i < values.len() {
            values[i]
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    Mat::from_fn(m.ncols(), m.nrows(), |i, j| m[(j, i)].conj())
}

pub fn scale(m: &ComplexMatrix, c: Complex64) -> ComplexMatrix {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * c)
}

/// `out += c * m`
pub fn axpy(out: &mut ComplexMatrix, c: Complex64, m: &ComplexMatrix) {
    for j in 0..out.ncols() {
        for i in 0..out.nrows() {
            out[(i, j)] += c * m[(i, j)];
        }
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    let mut best = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].re.is_finite() && m[(i, j)].im.is_finite()))
}

/// Copies `block` into `target` with its top-left corner at `(row, col)`.
pub fn set_block(target: &mut ComplexMatrix, row: usize, col: usize, block: &ComplexMatrix) {
    for j in 0..block.ncols() {
        for i in 0..block.nrows() {
            target[(row + i, col + j)] = block[(i, j)];
        }
    }
}

pub fn submatrix(m: &ComplexMatrix, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
    Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Eigenvalues of a dense complex matrix (Schur-based, backward stable).
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalues of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if !is_finite(m) {
        return Err(Error::Eigensolver("matrix has non-finite entries".into()));
    }
    m.eigenvalues().map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// Eigenvalues of a Hermitian matrix, nonincreasing.
pub fn hermitian_eigenvalues_desc(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    ev.reverse();
    Ok(ev)
}

pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.determinant()
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let inv = m.partial_piv_lu().inverse();
    if !is_finite(&inv) {
        return Err(Error::InvalidArgument("matrix is singular".into()));
    }
    Ok(inv)
}

/// Unit vector spanning the (numerical) null space of a square matrix: the right
/// singular vector of the smallest singular value.
pub fn null_vector(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let svd = m.svd().map_err(|e| Error::Eigensolver(format!("svd: {e:?}")))?;
    let v = svd.V();
    let last = v.ncols() - 1;
    Ok((0..v.nrows()).map(|i| v[(i, last)]).collect())
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
/// Returns `assign` with row `i` matched to column `assign[i]`. Ties resolve toward
/// lower indices.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    // 1-based potentials formulation (e-maxx); column 0 is a sentinel.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

/// Optimal matching of two equal-size point sets in the plane; returns, for each
/// `b[k]`, the index into `a` matched to it, and the largest matched distance.
pub fn match_points(a: &[Complex64], b: &[Complex64]) -> Result<(Vec<usize>, f64)> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot match {} points against {}",
            a.len(),
            b.len()
        )));
    }
    let cost: Vec<Vec<f64>> = b.iter().map(|&y| a.iter().map(|&x| (x - y).norm()).collect()).collect();
    let assign = min_cost_assignment(&cost);
    let worst = assign
        .iter()
        .enumerate()
        .map(|(k, &i)| cost[k][i])
        .fold(0.0, f64::max);
    Ok((assign, worst))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..cost.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + rec(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(cost, 0, &mut vec![false; cost.len()])
    }

    #[test]
    fn hungarian_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..=6 {
            for _ in 0..30 {
                let cost: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
                let assign = min_cost_assignment(&cost);
                let mut seen = vec![false; n];
                for &j in &assign {
                    assert!(!seen[j]);
                    seen[j] = true;
                }
                let total: f64 = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
                assert!((total - brute_force(&cost)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let m = Mat::from_fn(3, 3, |i, j| {
            if i <= j {
                Complex64::new((i + 1) as f64, if i == j { 0.5 } else { 0.0 })
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e - Complex64::new((k + 1) as f64, 0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn null_vector_of_rank_deficient() {
        let m = Mat::from_fn(2, 2, |_, _| Complex64::new(1.0, 0.0));
        let v = null_vector(&m).unwrap();
        assert!((v[0] + v[1]).norm() < 1e-12);
        assert!(((v[0].norm_sqr() + v[1].norm_sqr()) - 1.0).abs() < 1e-12);
    }
}
