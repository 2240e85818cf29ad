//! Dense linear algebra helpers for small Hermitian matrices and frames.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Relative Frobenius deviation of a matrix from its adjoint.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / norm
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending
/// and eigenvector phases fixed so the largest-magnitude entry is real positive.
pub fn hermitian_eig(m: &CMatrix) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = m.nrows();
    // symmetrize to kill roundoff asymmetry before factorizing
    let h = (m + m.adjoint()).map(|z| z * 0.5);
    let se = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| {
            let mut col: Vec<Complex64> = se.eigenvectors.column(k).iter().cloned().collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    (values, vectors)
}

/// Rotate a unit vector so its largest-magnitude entry is real positive.
pub fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_norm = 0.0;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm_sqr();
        if n > best_norm {
            best_norm = n;
            best = i;
        }
    }
    if best_norm == 0.0 {
        return;
    }
    let phase = v[best] / v[best].norm();
    for z in v.iter_mut() {
        *z /= phase;
    }
}

pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Unitary polar factor of a square matrix, via SVD: M = U Σ V* ↦ U V*.
pub fn polar_unitary(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let svd = m.clone().svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::Invalid("svd failed to produce U".into()))?;
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Invalid("svd failed to produce V^T".into()))?;
    Ok(u * vt)
}

/// Nearest matrix with orthonormal columns, via thin SVD: M = UΣV* ↦ UV*.
pub fn orthonormalize(m: &CMatrix) -> Result<CMatrix> {
    if m.ncols() == 0 {
        return Ok(m.clone());
    }
    let svd = m.clone().svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| Error::Invalid("svd failed to produce U".into()))?;
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Invalid("svd failed to produce V^T".into()))?;
    let min_sv = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if min_sv < 1e-10 {
        return Err(Error::Invalid(format!(
            "columns nearly dependent (singular value {min_sv:.2e})"
        )));
    }
    Ok(u * vt)
}

pub fn smallest_singular_value(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn determinant(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.determinant()
}

/// Best assignment result for a square score matrix.
pub struct Assignment {
    /// `perm[i] = j` assigns row i to column j.
    pub perm: Vec<usize>,
    pub score: f64,
    /// Best total score over assignments that differ from `perm`.
    pub runner_up: f64,
}

/// Maximum-total-score assignment over an n×n score matrix, by exact
/// bitmask dynamic programming. n stays small (band counts), so the
/// exponential table is cheap and the optimum is exact, which matters
/// because ties are an error upstream rather than a guess.
pub fn best_assignment(score: &[Vec<f64>]) -> Assignment {
    let n = score.len();
    assert!(n <= 20, "assignment matrix too large");
    let perm = dp_assignment(score, None);
    let total = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| score[i][j]).sum::<f64>();
    let score_best = total(&perm);
    // second-best: forbid each chosen pair in turn and re-solve
    let mut runner_up = f64::NEG_INFINITY;
    for (i, &j) in perm.iter().enumerate() {
        let alt = dp_assignment(score, Some((i, j)));
        if !alt.is_empty() {
            runner_up = runner_up.max(total(&alt));
        }
    }
    Assignment {
        perm,
        score: score_best,
        runner_up,
    }
}

fn dp_assignment(score: &[Vec<f64>], forbid: Option<(usize, usize)>) -> Vec<usize> {
    let n = score.len();
    if n == 0 {
        return Vec::new();
    }
    let full = 1usize << n;
    // dp[mask] = best score assigning rows 0..popcount(mask) to columns in mask
    let mut dp = vec![f64::NEG_INFINITY; full];
    let mut choice = vec![usize::MAX; full];
    dp[0] = 0.0;
    for mask in 0..full - 1 {
        if dp[mask] == f64::NEG_INFINITY {
            continue;
        }
        let row = (mask as u32).count_ones() as usize;
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            if forbid == Some((row, col)) {
                continue;
            }
            let next = mask | (1 << col);
            let cand = dp[mask] + score[row][col];
            if cand > dp[next] {
                dp[next] = cand;
                choice[next] = col;
            }
        }
    }
    if dp[full - 1] == f64::NEG_INFINITY {
        return Vec::new();
    }
    let mut perm = vec![0usize; n];
    let mut mask = full - 1;
    for row in (0..n).rev() {
        let col = choice[mask];
        perm[row] = col;
        mask &= !(1 << col);
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn assignment_identity_and_swap() {
        let id = vec![vec![1.0, 0.1], vec![0.1, 1.0]];
        let a = best_assignment(&id);
        assert_eq!(a.perm, vec![0, 1]);
        assert!((a.score - 2.0).abs() < 1e-12);
        assert!((a.runner_up - 0.2).abs() < 1e-12);

        let sw = vec![vec![0.1, 0.9], vec![0.9, 0.1]];
        let a = best_assignment(&sw);
        assert_eq!(a.perm, vec![1, 0]);
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let u = polar_unitary(&m).unwrap();
        assert!((u - m).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eig_sorted_and_phase_fixed() {
        let h = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eig(&h);
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        for v in &vecs {
            let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let k = v.iter().position(|z| (z.norm() - m).abs() < 1e-12).unwrap();
            assert!(v[k].im.abs() < 1e-12 && v[k].re > 0.0);
        }
    }
}
